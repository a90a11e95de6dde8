//! Concrete optimization instances, their constants, and the operators
//! `T1 = I − β∇f`, `T2 = prox_{βg} ∘ T1`, and the primal-dual map.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iterate::picard;
use crate::metrics::{
    build_w, check_dim, cholesky_lower, cholesky_solve, min_eigenvalue_spd, spectral_norm, NormSpec,
    SPECTRAL_MAX_ITER, SPECTRAL_TOL,
};
use crate::operators::{compose, make_gradient_step, make_primal_dual, Operator, ProxFamily, VectorMap};
use crate::{Matrix, Vector};

/// Smallest accepted `σ_min / σ_max` for a least-squares design.
pub const RANK_TOL: f64 = 1e-10;
/// Iteration budget for [`reference_solution`].
pub const REFERENCE_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProblemKind {
    LeastSquares,
    SeparableSmoothL1,
    AnalysisL1PrimalDual,
}

pub type Objective = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;

/// `min f(x) + g(Bx) + h(x)` (or `f + g` when there is no `B`).
#[derive(Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub grad_f: VectorMap,
    pub prox_g: Option<ProxFamily>,
    pub prox_h: Option<ProxFamily>,
    pub b_mat: Option<Matrix>,
    /// Lipschitz constant of `∇f`.
    pub lipschitz: f64,
    /// Lower constant `L₂` with `‖∇f(x) − ∇f(y)‖ ≥ L₂‖x − y‖`, when known.
    pub lipschitz_lower: Option<f64>,
    pub exact_solution: Option<Vector>,
    /// `(n, m)`: primal dimension and number of rows of `B` (0 without `B`).
    pub dims: (usize, usize),
    pub objective: Objective,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kind", &self.kind)
            .field("prox_g", &self.prox_g)
            .field("prox_h", &self.prox_h)
            .field("lipschitz", &self.lipschitz)
            .field("lipschitz_lower", &self.lipschitz_lower)
            .field("exact_solution", &self.exact_solution)
            .field("dims", &self.dims)
            .finish()
    }
}

impl ProblemSpec {
    pub fn n(&self) -> usize {
        self.dims.0
    }

    pub fn objective_value(&self, x: &Vector) -> f64 {
        (self.objective)(x)
    }

    /// Adds `λ‖x‖₁` to a problem without `B`; the closed-form solution is
    /// dropped unless `λ = 0`.
    pub fn with_l1_penalty(mut self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")));
        }
        if self.b_mat.is_some() || self.prox_g.is_some() {
            return Err(Error::InvalidArgument("problem already has a nonsmooth term".into()));
        }
        if lambda > 0.0 {
            self.exact_solution = None;
        }
        let base = self.objective.clone();
        self.objective = Arc::new(move |x: &Vector| base(x) + lambda * x.lp_norm(1));
        self.prox_g = Some(ProxFamily::l1(lambda));
        Ok(self)
    }
}

fn matvec_grad(a: Matrix, b: Vector) -> VectorMap {
    Arc::new(move |x: &Vector| a.tr_mul(&(&a * x - &b)))
}

fn half_sq_residual(a: Matrix, b: Vector) -> Objective {
    Arc::new(move |x: &Vector| 0.5 * (&a * x - &b).norm_squared())
}

/// `f(x) = ½‖Ax − b‖²` with `A` of full column rank.
pub fn least_squares_problem(a: &Matrix, b: &Vector) -> Result<ProblemSpec> {
    let (m, n) = a.shape();
    check_dim(m, b.len())?;
    if n == 0 || m < n {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let normal = a.tr_mul(a);
    let l = spectral_norm(a, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?.value.powi(2);
    if l == 0.0 {
        return Err(Error::RankDeficient { ratio: 0.0 });
    }
    let factor = match cholesky_lower(&normal) {
        Ok(f) => f,
        Err(Error::NotPositiveDefinite { .. }) => return Err(Error::RankDeficient { ratio: 0.0 }),
        Err(e) => return Err(e),
    };
    let lower = min_eigenvalue_spd(&normal, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?.value;
    let ratio = (lower.max(0.0) / l).sqrt();
    if ratio <= RANK_TOL {
        return Err(Error::RankDeficient { ratio });
    }
    let rhs = a.tr_mul(b);
    let mut x = cholesky_solve(&factor, &rhs);
    // one step of iterative refinement on the normal equations
    let r = &rhs - &normal * &x;
    x += cholesky_solve(&factor, &r);

    Ok(ProblemSpec {
        kind: ProblemKind::LeastSquares,
        grad_f: matvec_grad(a.clone(), b.clone()),
        prox_g: None,
        prox_h: None,
        b_mat: None,
        lipschitz: l,
        lipschitz_lower: Some(lower),
        exact_solution: Some(x),
        dims: (n, 0),
        objective: half_sq_residual(a.clone(), b.clone()),
    })
}

/// `Σ ½cᵢ(xᵢ − bᵢ)² + λ‖x‖₁`, solved componentwise in closed form.
pub fn separable_smooth_l1_problem(coeffs: &Vector, b: &Vector, lambda: f64) -> Result<ProblemSpec> {
    check_dim(coeffs.len(), b.len())?;
    if coeffs.is_empty() || coeffs.iter().any(|c| !(*c > 0.0)) {
        return Err(Error::InvalidArgument("coefficients must be positive".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")));
    }
    let exact = Vector::from_iterator(
        b.len(),
        b.iter()
            .zip(coeffs.iter())
            .map(|(&bi, &ci)| bi - bi.signum() * bi.abs().min(lambda / ci)),
    );
    let (c1, b1) = (coeffs.clone(), b.clone());
    let (c2, b2) = (coeffs.clone(), b.clone());
    Ok(ProblemSpec {
        kind: ProblemKind::SeparableSmoothL1,
        grad_f: Arc::new(move |x: &Vector| (x - &b1).component_mul(&c1)),
        prox_g: Some(ProxFamily::l1(lambda)),
        prox_h: None,
        b_mat: None,
        lipschitz: coeffs.max(),
        lipschitz_lower: Some(coeffs.min()),
        exact_solution: Some(exact),
        dims: (b.len(), 0),
        objective: Arc::new(move |x: &Vector| {
            0.5 * (x - &b2).component_mul(&(x - &b2)).dot(&c2) + lambda * x.lp_norm(1)
        }),
    })
}

/// `½‖Ax − b‖² + λ‖Bx‖₁` for the primal-dual scheme (`h = 0`).
pub fn analysis_l1_problem(a: &Matrix, b: &Vector, b_mat: &Matrix, lambda: f64) -> Result<ProblemSpec> {
    let (m, n) = a.shape();
    check_dim(m, b.len())?;
    check_dim(n, b_mat.ncols())?;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")));
    }
    let l = spectral_norm(a, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?.value.powi(2);
    if !(l > 0.0) {
        return Err(Error::InvalidArgument("A must be nonzero".into()));
    }
    let base = half_sq_residual(a.clone(), b.clone());
    let bm = b_mat.clone();
    Ok(ProblemSpec {
        kind: ProblemKind::AnalysisL1PrimalDual,
        grad_f: matvec_grad(a.clone(), b.clone()),
        prox_g: Some(ProxFamily::l1(lambda)),
        prox_h: Some(ProxFamily::zero()),
        b_mat: Some(b_mat.clone()),
        lipschitz: l,
        lipschitz_lower: None,
        exact_solution: None,
        dims: (n, b_mat.nrows()),
        objective: Arc::new(move |x: &Vector| base(x) + lambda * (&bm * x).lp_norm(1)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepBounds {
    pub beta_max: f64,
    pub beta: Option<f64>,
    /// Largest admissible dual step `η`.
    pub eta_max: Option<f64>,
    pub lipschitz: f64,
    pub b_norm: f64,
}

impl StepBounds {
    /// `(1/β − L/2)(1/η − L/2) > ‖B‖²`.
    pub fn coupling_holds(&self, beta: f64, eta: f64) -> bool {
        let half = 0.5 * self.lipschitz;
        (1.0 / beta - half) > 0.0 && (1.0 / eta - half) * (1.0 / beta - half) > self.b_norm * self.b_norm
    }

    /// Both steps strictly inside their bounds, plus the coupling condition.
    pub fn strictly_inside(&self, beta: f64, eta: f64) -> bool {
        let eta_max = 2.0 * (2.0 - beta * self.lipschitz)
            / (4.0 * beta * self.b_norm * self.b_norm + self.lipschitz * (2.0 - beta * self.lipschitz));
        beta > 0.0 && beta < self.beta_max && eta > 0.0 && eta < eta_max && self.coupling_holds(beta, eta)
    }
}

pub fn step_size_bounds(l: f64, b_norm: f64, beta: Option<f64>) -> Result<StepBounds> {
    if !(l > 0.0) || !(b_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!("need L > 0 and |B| >= 0 (L={l}, |B|={b_norm})")));
    }
    let beta_max = 2.0 / l;
    let eta_max = match beta {
        Some(beta) if !(beta > 0.0 && beta < beta_max) => {
            return Err(Error::InvalidArgument(format!("beta must lie in (0, 2/L) = (0, {beta_max}), got {beta}")))
        }
        Some(beta) => {
            let s = 2.0 - beta * l;
            Some(2.0 * s / (4.0 * beta * b_norm * b_norm + l * s))
        }
        None => None,
    };
    Ok(StepBounds {
        beta_max,
        beta,
        eta_max,
        lipschitz: l,
        b_norm,
    })
}

fn resolve_beta(problem: &ProblemSpec, beta: Option<f64>) -> Result<f64> {
    let beta = beta.unwrap_or(1.0 / problem.lipschitz);
    step_size_bounds(problem.lipschitz, 0.0, Some(beta))?;
    Ok(beta)
}

fn attach_hint(op: Operator, hint: Option<&Vector>) -> Result<Operator> {
    match hint {
        Some(h) => op.with_fixed_point_hint(h.clone()),
        None => Ok(op),
    }
}

/// `T1 = I − β∇f`; `β` defaults to `1/L`.
pub fn gradient_operator(problem: &ProblemSpec, beta: Option<f64>) -> Result<Operator> {
    let beta = resolve_beta(problem, beta)?;
    let op = make_gradient_step(problem.grad_f.clone(), beta, problem.n())?;
    let hint = problem.exact_solution.as_ref().filter(|_| problem.prox_g.is_none() && problem.b_mat.is_none());
    attach_hint(op.with_label(format!("T1(beta={beta})")), hint)
}

/// `T2 = prox_{βg} ∘ (I − β∇f)`; `β` defaults to `1/L`.
pub fn prox_gradient_operator(problem: &ProblemSpec, beta: Option<f64>) -> Result<Operator> {
    if problem.b_mat.is_some() {
        return Err(Error::InvalidArgument("T2 needs g without a linear map; use the primal-dual operator".into()));
    }
    let beta = resolve_beta(problem, beta)?;
    let prox = problem.prox_g.clone().unwrap_or_else(ProxFamily::zero);
    let step = make_gradient_step(problem.grad_f.clone(), beta, problem.n())?;
    let op = compose(&prox.operator(beta, problem.n()), &step)?;
    let label = format!("T2(beta={beta}, g={})", prox.label());
    attach_hint(op.with_label(label), problem.exact_solution.as_ref())
}

/// Default `(β, η)` for the primal-dual map: `β = 1/L`, `η = η_max/2`.
pub fn default_primal_dual_steps(problem: &ProblemSpec, beta: Option<f64>) -> Result<(f64, f64, StepBounds)> {
    let b = problem
        .b_mat
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("primal-dual map needs B".into()))?;
    let b_norm = spectral_norm(b, SPECTRAL_TOL, SPECTRAL_MAX_ITER)?.value;
    let beta = beta.unwrap_or(1.0 / problem.lipschitz);
    let bounds = step_size_bounds(problem.lipschitz, b_norm, Some(beta))?;
    let eta = 0.5 * bounds.eta_max.unwrap_or(0.0);
    Ok((beta, eta, bounds))
}

/// The primal-dual operator on `(x, y) ∈ ℝⁿ⁺ᵐ`.
pub fn primal_dual_operator(problem: &ProblemSpec, beta: Option<f64>, eta: Option<f64>) -> Result<Operator> {
    let (beta_d, eta_d, _) = default_primal_dual_steps(problem, beta)?;
    let eta = eta.unwrap_or(eta_d);
    let b = problem.b_mat.clone().unwrap_or_else(|| Matrix::zeros(0, problem.n()));
    make_primal_dual(
        problem.grad_f.clone(),
        problem.prox_h.clone().unwrap_or_else(ProxFamily::zero),
        problem.prox_g.clone().unwrap_or_else(ProxFamily::zero),
        b,
        beta_d,
        eta,
    )
}

/// The problem's own fixed-point operator: primal-dual with `B`, else `T2`
/// with `g`, else `T1`, all at default steps.
pub fn default_operator(problem: &ProblemSpec) -> Result<Operator> {
    if problem.b_mat.is_some() {
        primal_dual_operator(problem, None, None)
    } else if problem.prox_g.is_some() {
        prox_gradient_operator(problem, None)
    } else {
        gradient_operator(problem, None)
    }
}

/// GAN modulus at exponent 2 of `T1` (`βL/2`-averaged): `(2 − βL)/(βL)`.
pub fn gradient_step_mu(beta: f64, l: f64) -> Result<f64> {
    crate::certify::averaged_mu(0.5 * beta * l)
}

/// GAN modulus at exponent 2 of `T2` (`1/(2 − βL/2)`-averaged): `1 − βL/2`.
pub fn prox_gradient_mu(beta: f64, l: f64) -> Result<f64> {
    crate::certify::averaged_mu(1.0 / (2.0 - 0.5 * beta * l))
}

/// GAN modulus at exponent 2 of the primal-dual map in the `W`-norm:
/// `1 − L / (2 λ_min(W))`, valid when `λ_min(W) > L/2`.
pub fn primal_dual_mu(l: f64, beta: f64, eta: f64, b: &Matrix) -> Result<f64> {
    let w = build_w(beta, eta, b)?;
    let lam = min_eigenvalue_spd(w.weight(), SPECTRAL_TOL, SPECTRAL_MAX_ITER)?.value;
    if !(lam > 0.5 * l) {
        return Err(Error::InvalidArgument(format!(
            "lambda_min(W) = {lam} must exceed L/2 = {}",
            0.5 * l
        )));
    }
    Ok(1.0 - l / (2.0 * lam))
}

/// The metric in which the primal-dual map is averaged.
pub fn w_norm(beta: f64, eta: f64, b: &Matrix) -> Result<NormSpec> {
    Ok(NormSpec::Weighted(build_w(beta, eta, b)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceSolution {
    #[serde(serialize_with = "crate::certify::ser_vector")]
    pub x: Vector,
    /// Full fixed point of the iteration (`(x, y)` for the primal-dual map).
    #[serde(serialize_with = "crate::certify::ser_vector")]
    pub fixed_point: Vector,
    pub residual: Option<f64>,
    pub iterations: usize,
    pub exact: bool,
}

/// The closed-form solution if there is one, else the terminal iterate of
/// the problem's own operator at `res_tol = tol · 10⁻³`.
pub fn reference_solution(problem: &ProblemSpec, tol: f64) -> Result<ReferenceSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if let Some(x) = &problem.exact_solution {
        return Ok(ReferenceSolution {
            x: x.clone(),
            fixed_point: x.clone(),
            residual: None,
            iterations: 0,
            exact: true,
        });
    }
    let op = default_operator(problem)?;
    let x0 = Vector::zeros(op.dim());
    let res_tol = tol * 1e-3;
    let trace = picard(&op, &x0, REFERENCE_MAX_ITER, res_tol, None, &NormSpec::L2)?;
    let residual = trace.final_residual();
    if !trace.converged() {
        return Err(Error::NoConvergence {
            iterations: trace.k_final(),
            estimate: residual.unwrap_or(f64::NAN),
        });
    }
    Ok(ReferenceSolution {
        x: trace.last().rows(0, problem.n()).into_owned(),
        fixed_point: trace.last().clone(),
        residual,
        iterations: trace.k_final(),
        exact: false,
    })
}

/// Seeded matrix with independent standard normal entries.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    m
}

pub fn gaussian_vector(n: usize, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut rng)))
}

/// `(n − 1) × n` first-difference matrix, `(Bx)ᵢ = x_{i+1} − xᵢ`.
pub fn first_difference(n: usize) -> Matrix {
    let mut d = Matrix::zeros(n.saturating_sub(1), n);
    for i in 0..n.saturating_sub(1) {
        d[(i, i)] = -1.0;
        d[(i, i + 1)] = 1.0;
    }
    d
}
