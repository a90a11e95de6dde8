//! Picard iteration, trace recording, rate fitting, and trajectory checks.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{check_dim, NormSpec};
use crate::operators::Operator;
use crate::report::fmt_f64;
use crate::Vector;

/// Iterates are kept only while `(k + 1) · dim` stays under this many values.
pub const ITERATE_CAP: usize = 2_000_000;
/// A residual above `DIVERGENCE_FACTOR · (1 + r₀)` stops the run as diverged.
pub const DIVERGENCE_FACTOR: f64 = 1e6;
/// Minimum number of tail points for [`fit_rate`].
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    ResidualTol,
    MaxIter,
    Diverged,
}

/// Record of a Picard run `x^{k+1} = T x^k`.
///
/// `residuals[k] = ‖x^{k+1} − x^k‖` for `k < k_final`; `errors_to_ref[k]`
/// is `‖x^k − x*‖` for `k ≤ k_final`.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    label: String,
    norm: NormSpec,
    initial: Vector,
    last: Vector,
    iterates: Option<Vec<Vector>>,
    residuals: Vec<f64>,
    reference: Option<Vector>,
    errors_to_ref: Option<Vec<f64>>,
    k_final: usize,
    stop_reason: StopReason,
}

impl IterationTrace {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn initial(&self) -> &Vector {
        &self.initial
    }

    /// `x^{k_final}`.
    pub fn last(&self) -> &Vector {
        &self.last
    }

    /// All iterates `x^0 … x^{k_final}`, if they fit under [`ITERATE_CAP`].
    pub fn iterates(&self) -> Option<&[Vector]> {
        self.iterates.as_deref()
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn reference(&self) -> Option<&Vector> {
        self.reference.as_ref()
    }

    pub fn errors_to_ref(&self) -> Option<&[f64]> {
        self.errors_to_ref.as_deref()
    }

    pub fn k_final(&self) -> usize {
        self.k_final
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::ResidualTol
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residuals.last().copied()
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            operator: self.label.clone(),
            norm: self.norm.kind(),
            k_final: self.k_final,
            stop_reason: self.stop_reason,
            final_residual: self.final_residual(),
            final_error_to_ref: self.errors_to_ref.as_ref().and_then(|e| e.last().copied()),
            last: self.last.iter().copied().collect(),
        }
    }

    /// CSV with columns `k,residual,error_to_ref`; rows `k = 0..=k_final`.
    /// Absent values are left blank (the residual on the last row always is).
    pub fn to_csv(&self, params: &[(&str, String)]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# operator = {}", self.label);
        let _ = writeln!(s, "# norm = {}", self.norm.kind());
        let _ = writeln!(s, "# stop_reason = {:?}", self.stop_reason);
        let _ = writeln!(s, "# k_final = {}", self.k_final);
        for (k, v) in params {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "k,residual,error_to_ref");
        for k in 0..=self.k_final {
            let r = self.residuals.get(k).map(|&r| fmt_f64(r)).unwrap_or_default();
            let e = self
                .errors_to_ref
                .as_ref()
                .map(|e| fmt_f64(e[k]))
                .unwrap_or_default();
            let _ = writeln!(s, "{k},{r},{e}");
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub operator: String,
    pub norm: &'static str,
    pub k_final: usize,
    pub stop_reason: StopReason,
    pub final_residual: Option<f64>,
    pub final_error_to_ref: Option<f64>,
    pub last: Vec<f64>,
}

/// Runs `x^{k+1} = T x^k` until the residual drops to `res_tol`, `max_iter`
/// steps pass, or the residual blows past the divergence guard.
pub fn picard(
    t: &Operator,
    x0: &Vector,
    max_iter: usize,
    res_tol: f64,
    reference: Option<&Vector>,
    norm: &NormSpec,
) -> Result<IterationTrace> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if !(res_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("res_tol must be nonnegative, got {res_tol}")));
    }
    check_dim(t.dim(), x0.len())?;
    if let Some(r) = reference {
        check_dim(t.dim(), r.len())?;
    }
    let dim = t.dim().max(1);
    let mut iterates = Some(vec![x0.clone()]);
    let mut errors = reference.map(|r| norm.norm(&(x0 - r))).transpose()?.map(|e| vec![e]);
    let mut residuals = Vec::new();
    let mut x = x0.clone();
    let mut stop = StopReason::MaxIter;
    let mut guard = f64::INFINITY;

    for k in 0..max_iter {
        let next = t.apply(&x)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: k + 1 });
        }
        let r = norm.norm(&(&next - &x))?;
        if k == 0 {
            guard = DIVERGENCE_FACTOR * (1.0 + r);
        }
        residuals.push(r);
        if let (Some(e), Some(rf)) = (errors.as_mut(), reference) {
            e.push(norm.norm(&(&next - rf))?);
        }
        if let Some(its) = iterates.as_mut() {
            if (its.len() + 1) * dim <= ITERATE_CAP {
                its.push(next.clone());
            } else {
                iterates = None;
            }
        }
        x = next;
        if r <= res_tol {
            stop = StopReason::ResidualTol;
            break;
        }
        if r > guard {
            stop = StopReason::Diverged;
            break;
        }
    }

    Ok(IterationTrace {
        label: t.label().to_string(),
        norm: norm.clone(),
        initial: x0.clone(),
        k_final: residuals.len(),
        last: x,
        iterates,
        residuals,
        reference: reference.cloned(),
        errors_to_ref: errors,
        stop_reason: stop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateModel {
    Polynomial,
    Exponential,
}

/// Least-squares rate fit on the tail of a positive sequence.
///
/// Index `i` of the sequence is taken as `k = i + 1`. Polynomial fits
/// regress `log s` on `log k` (slope `−p`); exponential fits regress `log s`
/// on `k` (slope `log ρ`).
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub model: RateModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub r_squared: f64,
    pub tail_start: usize,
    pub n_points: usize,
    pub slope: f64,
    pub intercept: f64,
}

/// `(slope, intercept, r²)` of the ordinary least-squares line.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if syy > 0.0 && sxx > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, my - slope * mx, r2)
}

pub fn fit_rate(seq: &[f64], model: RateModel, tail_start: usize) -> Result<RateFit> {
    let tail: Vec<(f64, f64)> = seq
        .iter()
        .enumerate()
        .skip(tail_start)
        .take_while(|(_, &v)| v > 0.0)
        .map(|(i, &v)| ((i + 1) as f64, v.ln()))
        .collect();
    if tail.len() < MIN_FIT_POINTS {
        return Err(Error::TailTooShort {
            len: tail.len(),
            min: MIN_FIT_POINTS,
        });
    }
    let xs: Vec<f64> = tail
        .iter()
        .map(|&(k, _)| if model == RateModel::Polynomial { k.ln() } else { k })
        .collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, y)| y).collect();
    let (slope, intercept, r_squared) = linear_regression(&xs, &ys);
    let (exponent_p, rho) = match model {
        RateModel::Polynomial => (Some(-slope), None),
        RateModel::Exponential => (None, Some(slope.exp())),
    };
    Ok(RateFit {
        model,
        exponent_p,
        rho,
        r_squared,
        tail_start,
        n_points: tail.len(),
        slope,
        intercept,
    })
}

/// Finite-k stand-in for `residual_k = o(k^{−1/γ})`: on the final half of
/// the sequence, `s_k = k^{1/γ} · residual_k` must trend downward (negative
/// regression slope) and end at most half its first value.
#[derive(Debug, Clone, Serialize)]
pub struct LittleOReport {
    pub gamma: f64,
    pub tail_start: usize,
    pub slope: f64,
    pub first: f64,
    pub last: f64,
    pub pass: bool,
    pub note: &'static str,
}

pub fn little_o_proxy(seq: &[f64], gamma: f64) -> Result<LittleOReport> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let start = seq.len() / 2;
    if seq.len() - start < 2 {
        return Err(Error::TailTooShort {
            len: seq.len() - start,
            min: 2,
        });
    }
    let ks: Vec<f64> = (start..seq.len()).map(|i| (i + 1) as f64).collect();
    let s: Vec<f64> = ks
        .iter()
        .zip(&seq[start..])
        .map(|(k, r)| k.powf(1.0 / gamma) * r)
        .collect();
    let (slope, _, _) = linear_regression(&ks, &s);
    let (first, last) = (s[0], s[s.len() - 1]);
    let pass = s.iter().all(|&v| v == 0.0) || (slope < 0.0 && last <= 0.5 * first);
    Ok(LittleOReport {
        gamma,
        tail_start: start,
        slope,
        first,
        last,
        pass,
        note: "finite-k proxy for a little-o rate, not a proof",
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SummabilityReport {
    pub gamma: f64,
    pub mu: f64,
    pub bound: f64,
    pub tol: f64,
    pub partial_sums: Vec<f64>,
    /// Largest `S_K − bound` over all `K`.
    pub worst_excess: f64,
    pub pass: bool,
}

/// Partial sums `S_K = Σ_{k≤K} μ·residual_k^γ` against `‖x⁰ − x̂‖^γ`.
pub fn check_residual_summability(
    trace: &IterationTrace,
    gamma: f64,
    mu: f64,
    xhat: &Vector,
) -> Result<SummabilityReport> {
    check_dim(trace.initial.len(), xhat.len())?;
    let bound = trace.norm.norm(&(&trace.initial - xhat))?.powf(gamma);
    let tol = 1e-10 * bound.max(1.0);
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = trace
        .residuals
        .iter()
        .map(|r| {
            acc += mu * r.powf(gamma);
            acc
        })
        .collect();
    let worst_excess = partial_sums.iter().fold(f64::NEG_INFINITY, |w, s| w.max(s - bound));
    Ok(SummabilityReport {
        gamma,
        mu,
        bound,
        tol,
        pass: partial_sums.iter().all(|s| *s <= bound + tol),
        worst_excess,
        partial_sums,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UpperStatus {
    Checked,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub mu: f64,
    pub tol: f64,
    /// Tail remainder added to the truncated sums for the upper check.
    pub remainder: Option<f64>,
    pub fitted_rho: Option<f64>,
    /// `min_k (‖x^k − x*‖ − μ·tail_k)`.
    pub lower_min_slack: f64,
    pub lower_worst_k: usize,
    /// `min_k (tail_k + remainder − ‖x^k − x*‖)`.
    pub upper_min_slack: Option<f64>,
    pub upper_worst_k: Option<usize>,
    pub upper_status: UpperStatus,
    pub pass: bool,
    pub notes: Vec<String>,
}

pub const SANDWICH_TOL: f64 = 1e-8;

/// Checks `μ Σ_{j≥k} r_j ≤ ‖x^k − x*‖ ≤ Σ_{j≥k} r_j` along a converged trace.
///
/// Tail sums are truncated at `k_final`. The upper check adds the remainder
/// `r_final / (1 − ρ)` from an exponential fit of the residual tail with
/// `r² ≥ 0.99`, or zero when the run ended on an exactly zero residual; without
/// either it is reported as inconclusive.
pub fn check_sandwich(trace: &IterationTrace, xstar: &Vector, mu: f64) -> Result<SandwichReport> {
    if !trace.converged() {
        return Err(Error::NotConverged(format!(
            "sandwich check needs a converged trace, got {:?}",
            trace.stop_reason
        )));
    }
    check_dim(trace.initial.len(), xstar.len())?;
    let dists: Vec<f64> = match (&trace.iterates, &trace.errors_to_ref, &trace.reference) {
        (Some(its), _, _) => its
            .iter()
            .map(|x| trace.norm.norm(&(x - xstar)))
            .collect::<Result<_>>()?,
        (None, Some(e), Some(r)) if r == xstar => e.clone(),
        _ => {
            return Err(Error::InvalidArgument(
                "trace keeps neither iterates nor errors to this reference".into(),
            ))
        }
    };
    let n = trace.k_final;
    let mut tails = vec![0.0; n + 1];
    for k in (0..n).rev() {
        tails[k] = tails[k + 1] + trace.residuals[k];
    }

    let mut notes = vec!["lower check uses tail sums truncated at k_final".to_string()];
    let r_final = trace.residuals.last().copied().unwrap_or(0.0);
    let (remainder, fitted_rho) = if r_final == 0.0 {
        notes.push("exact absorption: remainder is zero".into());
        (Some(0.0), None)
    } else {
        let fit = fit_rate(&trace.residuals, RateModel::Exponential, n / 2)
            .or_else(|_| fit_rate(&trace.residuals, RateModel::Exponential, 0));
        match fit {
            Ok(f) if f.r_squared >= 0.99 && f.rho.is_some_and(|r| r < 1.0) => {
                let rho = f.rho.unwrap_or(0.0);
                notes.push("upper remainder r_final/(1-rho) from exponential tail fit".into());
                (Some(r_final / (1.0 - rho)), Some(rho))
            }
            _ => {
                notes.push("no reliable exponential tail fit: upper check inconclusive".into());
                (None, None)
            }
        }
    };

    let mut lower = (f64::INFINITY, 0);
    let mut upper = (f64::INFINITY, 0);
    for k in 0..=n {
        let lo = dists[k] - mu * tails[k];
        if lo < lower.0 {
            lower = (lo, k);
        }
        if let Some(rem) = remainder {
            let up = tails[k] + rem - dists[k];
            if up < upper.0 {
                upper = (up, k);
            }
        }
    }
    let upper_status = if remainder.is_some() {
        UpperStatus::Checked
    } else {
        UpperStatus::Inconclusive
    };
    let (upper_min_slack, upper_worst_k) = match upper_status {
        UpperStatus::Checked => (Some(upper.0), Some(upper.1)),
        UpperStatus::Inconclusive => (None, None),
    };
    let pass = lower.0 >= -SANDWICH_TOL && upper_min_slack.is_none_or(|u| u >= -SANDWICH_TOL);
    Ok(SandwichReport {
        mu,
        tol: SANDWICH_TOL,
        remainder,
        fitted_rho,
        lower_min_slack: lower.0,
        lower_worst_k: lower.1,
        upper_min_slack,
        upper_worst_k,
        upper_status,
        pass,
        notes,
    })
}

/// `(a_K^{−p} + p Σ_{j=K}^{k−1} b_j)^{−1/p}`; `b` is indexed globally by `j`.
///
/// `p = 0` is accepted as the limit `a_K · exp(−Σ b_j)`.
pub fn recurrence_bound(a_k: f64, p: f64, b: &[f64], k_start: usize, k: usize) -> Result<f64> {
    if k <= k_start {
        return Err(Error::InvalidArgument(format!("need k > K, got K={k_start}, k={k}")));
    }
    if !(p >= 0.0) || !(a_k >= 0.0) {
        return Err(Error::InvalidArgument(format!("need p >= 0 and aK >= 0 (p={p}, aK={a_k})")));
    }
    if b.len() < k {
        return Err(Error::InvalidArgument(format!("b has {} entries, need {k}", b.len())));
    }
    let window = &b[k_start..k];
    if window.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument("b_j must be nonnegative".into()));
    }
    if a_k == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = window.iter().sum();
    if p == 0.0 {
        return Ok(a_k * (-sum).exp());
    }
    Ok((a_k.powf(-p) + p * sum).powf(-1.0 / p))
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceViolation {
    pub k: usize,
    pub run_start: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub p: f64,
    pub mu: f64,
    /// Indices `k` where `a_{k+1} ≤ a_k(1 − μ a_k^p)` holds (up to tolerance).
    pub premise_steps: usize,
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<RecurrenceViolation>,
    pub pass: bool,
}

/// Relative tolerance on both the premise and the bound.
pub const RECURRENCE_TOL: f64 = 1e-12;

/// Along each maximal run of steps satisfying `a_{k+1} ≤ a_k(1 − μ a_k^p)`,
/// checks `a_k` against [`recurrence_bound`] from the start of the run with
/// `b_j = μ`.
pub fn verify_recurrence_bound(seq: &[f64], p: f64, mu: f64) -> Result<RecurrenceReport> {
    if seq.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument("sequence must be nonnegative".into()));
    }
    if !(mu > 0.0) || !(p >= 0.0) {
        return Err(Error::InvalidArgument(format!("need mu > 0 and p >= 0 (mu={mu}, p={p})")));
    }
    let premise = |k: usize| seq[k + 1] <= seq[k] * (1.0 - mu * seq[k].powf(p)) + RECURRENCE_TOL * seq[k];
    let b = vec![mu; seq.len()];
    let mut report = RecurrenceReport {
        p,
        mu,
        premise_steps: 0,
        checked: 0,
        violations: 0,
        first_violation: None,
        pass: true,
    };
    let mut run_start = 0;
    for k in 0..seq.len().saturating_sub(1) {
        if !premise(k) {
            run_start = k + 1;
            continue;
        }
        report.premise_steps += 1;
        let bound = recurrence_bound(seq[run_start], p, &b, run_start, k + 1)?;
        report.checked += 1;
        if seq[k + 1] > bound * (1.0 + RECURRENCE_TOL) {
            report.violations += 1;
            report.first_violation.get_or_insert(RecurrenceViolation {
                k: k + 1,
                run_start,
                value: seq[k + 1],
                bound,
            });
        }
    }
    report.pass = report.violations == 0;
    Ok(report)
}
