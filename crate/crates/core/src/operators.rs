//! Operator constructors: gradient steps, closed-form proximity maps,
//! composition, affine maps and the primal-dual update.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::metrics::{build_w, check_dim};
use crate::{Matrix, Vector};

/// A map `ℝⁿ → ℝⁿ` shared between operators and threads.
pub type VectorMap = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type ScaledMap = Arc<dyn Fn(&Vector, f64) -> Vector + Send + Sync>;

/// Tolerance used when validating a fixed-point hint.
pub const HINT_TOL: f64 = 1e-8;

/// A self-map of real `dim`-space.
///
/// The optional fixed-point hint is a known member of `Fix(T)`; it is
/// validated on attachment and used wherever a distance to the fixed-point
/// set is needed.
#[derive(Clone)]
pub struct Operator {
    dim: usize,
    map: VectorMap,
    fixed_point_hint: Option<Vector>,
    label: String,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("fixed_point_hint", &self.fixed_point_hint)
            .finish()
    }
}

impl Operator {
    pub fn new<F>(dim: usize, label: impl Into<String>, map: F) -> Self
    where
        F: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        Self::from_map(dim, label, Arc::new(map))
    }

    pub fn from_map(dim: usize, label: impl Into<String>, map: VectorMap) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            dim,
            map,
            fixed_point_hint: None,
            label: label.into(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, "I", |x: &Vector| x.clone())
    }

    /// Attaches a fixed-point hint after checking
    /// `‖T(h) − h‖₂ ≤ 1e-8·(1 + ‖h‖₂)`.
    pub fn with_fixed_point_hint(mut self, hint: Vector) -> Result<Self> {
        let image = self.apply(&hint)?;
        let defect = (&image - &hint).norm();
        if defect > HINT_TOL * (1.0 + hint.norm()) {
            return Err(Error::InvalidArgument(format!(
                "fixed-point hint for {} is off by {defect:.3e}",
                self.label
            )));
        }
        self.fixed_point_hint = Some(hint);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fixed_point_hint(&self) -> Option<&Vector> {
        self.fixed_point_hint.as_ref()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.len())?;
        let y = (self.map)(x);
        check_dim(self.dim, y.len())?;
        Ok(y)
    }
}

/// A proximity map family `(x, s) ↦ prox_{s·φ}(x)` for a fixed function `φ`.
#[derive(Clone)]
pub struct ProxFamily {
    label: String,
    map: ScaledMap,
}

impl fmt::Debug for ProxFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ProxFamily").field(&self.label).finish()
    }
}

impl ProxFamily {
    pub fn new<F>(label: impl Into<String>, map: F) -> Self
    where
        F: Fn(&Vector, f64) -> Vector + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            map: Arc::new(map),
        }
    }

    /// Prox of the zero function: the identity for every scale.
    pub fn zero() -> Self {
        Self::new("0", |x: &Vector, _| x.clone())
    }

    /// Prox of `λ‖·‖₁`.
    pub fn l1(lambda: f64) -> Self {
        assert!(lambda >= 0.0, "lambda must be nonnegative");
        Self::new(format!("{lambda}*|.|_1"), move |x: &Vector, s| {
            soft_threshold(s * lambda, x)
        })
    }

    /// Prox of `λ‖·‖₂`.
    pub fn l2(lambda: f64) -> Self {
        assert!(lambda >= 0.0, "lambda must be nonnegative");
        Self::new(format!("{lambda}*|.|_2"), move |x: &Vector, s| {
            block_soft_threshold(s * lambda, x)
        })
    }

    /// Projection onto the box `[lo, hi]ⁿ` (indicator prox, scale-free).
    pub fn box_projection(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty box");
        Self::new(format!("box[{lo},{hi}]"), move |x: &Vector, _| {
            x.map(|t| t.clamp(lo, hi))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, x: &Vector, scale: f64) -> Vector {
        (self.map)(x, scale)
    }

    /// The operator `prox_{scale·φ}` on `dim`-space.
    pub fn operator(&self, scale: f64, dim: usize) -> Operator {
        let prox = self.clone();
        Operator::new(dim, format!("prox[{}*{}]", scale, self.label), move |x| {
            prox.apply(x, scale)
        })
    }
}

/// Componentwise shrinkage, the prox of `λ‖·‖₁`.
pub fn soft_threshold(lambda: f64, x: &Vector) -> Vector {
    assert!(lambda >= 0.0, "lambda must be nonnegative, got {lambda}");
    x.map(|t| {
        if t > lambda {
            t - lambda
        } else if t < -lambda {
            t + lambda
        } else {
            0.0
        }
    })
}

/// Block shrinkage, the prox of `λ‖·‖₂`.
pub fn block_soft_threshold(lambda: f64, x: &Vector) -> Vector {
    assert!(lambda >= 0.0, "lambda must be nonnegative, got {lambda}");
    if lambda == 0.0 {
        return x.clone();
    }
    let nx = x.norm();
    if nx > lambda {
        x * (1.0 - lambda / nx)
    } else {
        Vector::zeros(x.len())
    }
}

/// Gradient-descent operator `x ↦ x − β∇f(x)`.
pub fn make_gradient_step(grad_f: VectorMap, beta: f64, dim: usize) -> Result<Operator> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    Ok(Operator::new(dim, format!("I-{beta}*grad f"), move |x| {
        x - grad_f(x) * beta
    }))
}

/// `S ∘ T` (apply `T` first).
pub fn compose(s: &Operator, t: &Operator) -> Result<Operator> {
    check_dim(s.dim, t.dim)?;
    let (sm, tm) = (s.map.clone(), t.map.clone());
    let mut op = Operator::from_map(
        s.dim,
        format!("{} o {}", s.label, t.label),
        Arc::new(move |x: &Vector| sm(&tm(x))),
    );
    if let (Some(hs), Some(ht)) = (&s.fixed_point_hint, &t.fixed_point_hint) {
        if (hs - ht).amax() <= HINT_TOL {
            op.fixed_point_hint = Some(ht.clone());
        }
    }
    Ok(op)
}

/// `x ↦ αx + z`, with fixed point `z/(1−α)` whenever `α ≠ 1`.
pub fn affine_op(alpha: f64, z: Vector) -> Operator {
    let dim = z.len();
    let hint = (alpha != 1.0).then(|| &z / (1.0 - alpha));
    let label = format!("{alpha}*I+z");
    let op = Operator::new(dim, label, move |x: &Vector| x * alpha + &z);
    match hint {
        Some(h) if h.iter().all(|v| v.is_finite()) => {
            op.with_fixed_point_hint(h).expect("affine fixed point is exact")
        }
        _ => op,
    }
}

/// The primal-dual operator on `ℝⁿ⁺ᵐ`, `v = (x, y)`:
///
/// ```text
/// x⁺ = prox_{βh}(x − β(∇f(x) + Bᵀy))
/// y⁺ = η (I − prox_{g/η})(y/η + B(2x⁺ − x))
/// ```
///
/// The dual prox of `g*` is obtained through the Moreau decomposition and is
/// never evaluated directly. Construction fails when the metric `W` built
/// from `(β, η, B)` is not positive definite.
pub fn make_primal_dual(
    grad_f: VectorMap,
    prox_h: ProxFamily,
    prox_g: ProxFamily,
    b: Matrix,
    beta: f64,
    eta: f64,
) -> Result<Operator> {
    build_w(beta, eta, &b)?;
    let (m, n) = b.shape();
    let label = format!("primal-dual(beta={beta}, eta={eta}, h={}, g={})", prox_h.label(), prox_g.label());
    Ok(Operator::new(n + m, label, move |v: &Vector| {
        let x = v.rows(0, n).into_owned();
        let y = v.rows(n, m).into_owned();
        let step = &x - (grad_f(&x) + b.tr_mul(&y)) * beta;
        let x_next = prox_h.apply(&step, beta);
        let shifted = &y / eta + &b * (&x_next * 2.0 - &x);
        let y_next = (&shifted - prox_g.apply(&shifted, 1.0 / eta)) * eta;
        let mut out = Vector::zeros(n + m);
        out.rows_mut(0, n).copy_from(&x_next);
        out.rows_mut(n, m).copy_from(&y_next);
        out
    }))
}
