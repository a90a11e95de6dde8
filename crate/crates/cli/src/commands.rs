use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fixpoint_core::certify::{self, range_region, DEFAULT_SCALES, DEFAULT_TOL};
use fixpoint_core::iterate::{check_residual_summability, check_sandwich, fit_rate, little_o_proxy};
use fixpoint_core::problems::{
    default_primal_dual_steps, gradient_operator, gradient_step_mu, primal_dual_mu, primal_dual_operator,
    prox_gradient_mu, prox_gradient_operator, reference_solution, w_norm,
};
use fixpoint_core::report::write_json;
use fixpoint_core::{picard, NormSpec, Operator, OperatorClass, RateModel, SamplingPlan, Vector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{vector_from, Params, RunConfig};

const REFERENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Operator under study with the norm, fixed point and modulus that go with it.
struct Target {
    op: Operator,
    norm: NormSpec,
    reference: Option<Vector>,
    /// Closed-form GAN-2 modulus when the operator comes from a problem.
    mu_theory: Option<f64>,
}

fn build_target(cfg: &RunConfig, p: &Params) -> Result<Target> {
    let mut t = build_target_inner(cfg, p)?;
    if p.reference == Some(false) {
        t.reference = None;
    }
    Ok(t)
}

fn build_target_inner(cfg: &RunConfig, p: &Params) -> Result<Target> {
    let norm_name = p.norm.as_deref().unwrap_or("l2");
    let simple_norm = |name: &str| match name {
        "l2" => Ok(NormSpec::L2),
        "l1" => Ok(NormSpec::L1),
        "w" => bail!("params.norm: `w` needs a primal-dual problem (params.operator = \"t3\")"),
        other => bail!("params.norm: unknown norm `{other}`, expected l2, l1 or w"),
    };
    match (&cfg.problem, &cfg.operator) {
        (Some(_), Some(_)) => bail!("config: give either `problem` or `operator`, not both"),
        (None, None) => bail!("config: one of `problem` or `operator` is required"),
        (None, Some(oc)) => {
            if p.operator.is_some() || p.beta.is_some() || p.eta.is_some() {
                bail!("params.operator/beta/eta: only meaningful with a `problem`");
            }
            let op = oc.build(&cfg.base, p.lambda)?;
            let reference = op.fixed_point_hint().cloned();
            Ok(Target {
                op,
                norm: simple_norm(norm_name)?,
                reference,
                mu_theory: None,
            })
        }
        (Some(pc), None) => {
            let problem = pc.build(&cfg.base, p.lambda)?;
            let default_kind = if problem.b_mat.is_some() {
                "t3"
            } else if problem.prox_g.is_some() {
                "t2"
            } else {
                "t1"
            };
            let kind = p.operator.as_deref().unwrap_or(default_kind).to_ascii_lowercase();
            let l = problem.lipschitz;
            let beta = p.beta.unwrap_or(1.0 / l);
            let (op, norm, mu_theory) = match kind.as_str() {
                "t1" | "t2" => {
                    if kind == "t1" && problem.prox_g.is_some() {
                        bail!("params.operator: t1 drops the nonsmooth term of this problem, use t2");
                    }
                    if problem.b_mat.is_some() {
                        bail!("params.operator: this problem has a coupling matrix B, use t3");
                    }
                    let (op, mu) = if kind == "t1" {
                        (gradient_operator(&problem, Some(beta))?, gradient_step_mu(beta, l).ok())
                    } else {
                        (prox_gradient_operator(&problem, Some(beta))?, prox_gradient_mu(beta, l).ok())
                    };
                    (op, simple_norm(norm_name)?, mu.filter(|_| norm_name == "l2"))
                }
                "t3" => {
                    let (beta, eta_d, _) = default_primal_dual_steps(&problem, Some(beta)).context("params.beta")?;
                    let eta = p.eta.unwrap_or(eta_d);
                    let op = primal_dual_operator(&problem, Some(beta), Some(eta)).context("params.eta")?;
                    let b = problem.b_mat.as_ref().expect("t3 needs B");
                    let norm = match norm_name {
                        "w" => w_norm(beta, eta, b).context("params.eta: W is not positive definite")?,
                        other => simple_norm(other)?,
                    };
                    let mu = primal_dual_mu(l, beta, eta, b).ok().filter(|_| norm_name == "w");
                    (op, norm, mu)
                }
                other => bail!("params.operator: unknown operator `{other}`, expected t1, t2 or t3"),
            };
            let sol = reference_solution(&problem, REFERENCE_TOL).context("problem: reference solution")?;
            let reference = if op.dim() == sol.fixed_point.len() {
                sol.fixed_point
            } else {
                sol.x
            };
            let op = if op.fixed_point_hint().is_none() && reference.len() == op.dim() {
                op.with_fixed_point_hint(reference.clone()).context("problem: reference is not a fixed point")?
            } else {
                op
            };
            let reference = Some(reference).filter(|r| r.len() == op.dim());
            Ok(Target {
                op,
                norm,
                reference,
                mu_theory,
            })
        }
    }
}

fn plan(p: &Params, default_pairs: usize) -> Result<SamplingPlan> {
    let scales = p.scales.clone().unwrap_or_else(|| DEFAULT_SCALES.to_vec());
    SamplingPlan::new(p.n_pairs.unwrap_or(default_pairs), scales, p.seed.unwrap_or(0)).context("params.n_pairs/scales")
}

fn x0(cfg: &RunConfig, p: &Params, dim: usize) -> Result<Vector> {
    let x0 = match &p.x0 {
        Some(v) => vector_from(v, "params.x0", &cfg.base)?,
        None => Vector::zeros(dim),
    };
    if x0.len() != dim {
        bail!("params.x0: expected length {dim}, got {}", x0.len());
    }
    Ok(x0)
}

fn csv_params(t: &Target, p: &Params, tol: f64, max_iter: usize) -> Vec<(&'static str, String)> {
    vec![
        ("operator", t.op.label().to_string()),
        ("norm", t.norm.kind().to_string()),
        ("tol", format!("{tol:e}")),
        ("max_iter", max_iter.to_string()),
        ("seed", p.seed.unwrap_or(0).to_string()),
    ]
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn certify(cfg: &RunConfig, p: &Params, out: &Path) -> Result<Outcome> {
    let t = build_target(cfg, p)?;
    let property = p.property.as_deref().unwrap_or("gan").to_ascii_lowercase();
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| anyhow!("params.{name}: required for property `{property}`"));
    let class = match property.as_str() {
        "gan" => {
            let gamma = p.gamma.unwrap_or(2.0);
            OperatorClass::Gan {
                gamma,
                mu: need(p.mu.or(t.mu_theory.filter(|_| gamma == 2.0)), "mu")?,
            }
        }
        "holder_regular" => OperatorClass::HolderRegular {
            gamma: p.gamma.unwrap_or(1.0),
            mu: need(p.mu, "mu")?,
        },
        "nonexpansive" => OperatorClass::Nonexpansive,
        "contractive" => OperatorClass::Contractive { rho: need(p.rho, "rho")? },
        "fp_contractive" => OperatorClass::FpContractive { rho: need(p.rho, "rho")? },
        other => bail!(
            "params.property: unknown property `{other}`, expected gan, nonexpansive, contractive, fp_contractive or holder_regular"
        ),
    };
    let plan = plan(p, 1000)?;
    let cert = certify::certify(&t.op, class, &t.norm, &plan, p.tol.unwrap_or(DEFAULT_TOL)).context("certify")?;
    write_json(&cert, out.join("certify.json"))?;
    println!(
        "{} {} {} min_slack={:e} checked={} skipped={}",
        if cert.passed() { "PASS" } else { "FAIL" },
        property,
        cert.operator,
        cert.min_slack,
        cert.n_checked,
        cert.n_skipped
    );
    Ok(Outcome::from_bool(cert.passed()))
}

#[derive(Serialize)]
struct SolveSummary {
    #[serde(flatten)]
    summary: fixpoint_core::iterate::TraceSummary,
    converged: bool,
    tol: f64,
    max_iter: usize,
}

pub fn solve(cfg: &RunConfig, p: &Params, out: &Path) -> Result<Outcome> {
    let t = build_target(cfg, p)?;
    let tol = p.tol.unwrap_or(1e-10);
    let max_iter = p.max_iter.unwrap_or(10_000);
    let x0 = x0(cfg, p, t.op.dim())?;
    let trace = picard(&t.op, &x0, max_iter, tol, t.reference.as_ref(), &t.norm)?;
    write_text(&out.join("trace.csv"), &trace.to_csv(&csv_params(&t, p, tol, max_iter)))?;
    let summary = SolveSummary {
        summary: trace.summary(),
        converged: trace.converged(),
        tol,
        max_iter,
    };
    write_json(&summary, out.join("summary.json"))?;
    println!(
        "{:?} {} k_final={} residual={}",
        trace.stop_reason(),
        t.op.label(),
        trace.k_final(),
        trace.final_residual().map_or("-".into(), |r| format!("{r:e}"))
    );
    Ok(Outcome::from_bool(trace.converged()))
}

fn report_value<T: Serialize>(r: Result<T, fixpoint_core::Error>) -> (Value, Option<bool>) {
    match r {
        Ok(v) => {
            let v = serde_json::to_value(v).unwrap_or(Value::Null);
            let pass = v.get("pass").and_then(Value::as_bool);
            (v, pass)
        }
        Err(e) => (json!({ "error": e.to_string() }), Some(false)),
    }
}

pub fn rates(cfg: &RunConfig, p: &Params, out: &Path) -> Result<Outcome> {
    let t = build_target(cfg, p)?;
    let tol = p.tol.unwrap_or(1e-12);
    let max_iter = p.max_iter.unwrap_or(100_000);
    let gamma = p.gamma.unwrap_or(2.0);
    let model = match p.model.as_deref().unwrap_or("exponential") {
        "exponential" => RateModel::Exponential,
        "polynomial" => RateModel::Polynomial,
        other => bail!("params.model: unknown model `{other}`, expected exponential or polynomial"),
    };
    let x0 = x0(cfg, p, t.op.dim())?;
    let trace = picard(&t.op, &x0, max_iter, tol, t.reference.as_ref(), &t.norm)?;
    write_text(&out.join("trace.csv"), &trace.to_csv(&csv_params(&t, p, tol, max_iter)))?;

    let residuals = trace.residuals();
    let (fit, fit_ok) = match fit_rate(residuals, model, trace.k_final() / 2) {
        Ok(f) => (serde_json::to_value(&f)?, true),
        Err(e) => (json!({ "error": e.to_string() }), false),
    };
    write_json(&fit, out.join("fit.json"))?;

    let mut ok = trace.converged() && fit_ok;
    let (little_o, pass) = report_value(little_o_proxy(residuals, gamma));
    ok &= pass.unwrap_or(true);

    let plan = plan(p, 500)?;
    let summability = match &t.reference {
        Some(xhat) => {
            let mu = match p.mu.or(t.mu_theory.filter(|_| gamma == 2.0)) {
                Some(mu) => mu,
                None => certify::estimate_mu(&t.op, gamma, &t.norm, &plan).context("estimating mu")?,
            };
            let (v, pass) = report_value(check_residual_summability(&trace, gamma, mu, xhat));
            ok &= pass.unwrap_or(true);
            v
        }
        None => json!({ "skipped": "no fixed point available" }),
    };
    let sandwich = match (&t.reference, trace.converged()) {
        (Some(xstar), true) => {
            let mu = match p.sandwich_mu {
                Some(mu) => mu,
                None => certify::estimate_mu(&t.op, 1.0, &t.norm, &plan).context("estimating mu at gamma = 1")?,
            };
            let (v, pass) = report_value(check_sandwich(&trace, xstar, mu));
            ok &= pass.unwrap_or(true);
            v
        }
        (None, _) => json!({ "skipped": "no fixed point available" }),
        (_, false) => json!({ "skipped": "trace did not converge" }),
    };
    let checks = json!({
        "little_o": little_o,
        "summability": summability,
        "sandwich": sandwich,
    });
    write_json(&checks, out.join("checks.json"))?;
    println!(
        "{} {} k_final={} fit={}",
        if ok { "PASS" } else { "FAIL" },
        t.op.label(),
        trace.k_final(),
        if fit_ok { "ok" } else { "error" }
    );
    Ok(Outcome::from_bool(ok))
}

pub fn region(_cfg: &RunConfig, p: &Params, out: &Path) -> Result<Outcome> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| anyhow!("params.{name}: required for region"));
    let x = p.x.ok_or_else(|| anyhow!("params.x: required for region"))?;
    let xhat = p.xhat.ok_or_else(|| anyhow!("params.xhat: required for region"))?;
    let grid = range_region(x, xhat, need(p.gamma, "gamma")?, need(p.mu, "mu")?, p.resolution.unwrap_or(201))
        .context("region")?;
    write_text(&out.join("region.csv"), &grid.to_csv())?;
    let inside = grid.cells.iter().filter(|&&c| c).count();
    println!("region {}x{} cells inside={inside}", grid.resolution, grid.resolution);
    Ok(Outcome::Pass)
}
