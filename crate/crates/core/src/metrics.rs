//! Norms, weighted inner products, spectral estimates and the primal-dual
//! metric matrix.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Relative asymmetry accepted before a weight matrix is rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Cholesky pivots below `PIVOT_TOL * max(diag)` mean "not positive definite".
pub const PIVOT_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-10;
pub const SPECTRAL_MAX_ITER: usize = 10_000;
const POWER_SEED: u64 = 0x05ee_d0f9_0fe7;

/// A symmetric positive-definite weight `W` together with its lower
/// Cholesky factor `L` (`W = L Lᵀ`).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMetric {
    weight: Matrix,
    factor: Matrix,
}

impl WeightedMetric {
    /// Validates symmetry, symmetrizes as `(W + Wᵀ)/2` and factorizes.
    pub fn new(weight: Matrix) -> Result<Self> {
        if !weight.is_square() || weight.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "weight must be a nonempty square matrix, got {}x{}",
                weight.nrows(),
                weight.ncols()
            )));
        }
        let scale = weight.amax();
        let asym = (&weight - weight.transpose()).amax();
        if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric {
                asymmetry: asym / scale,
            });
        }
        let weight = (&weight + weight.transpose()) * 0.5;
        let factor = cholesky_lower(&weight)?;
        Ok(Self { weight, factor })
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    /// Lower-triangular factor `L` with `L Lᵀ = W`.
    pub fn factor(&self) -> &Matrix {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.weight.nrows()
    }

    /// `⟨x, y⟩_W = xᵀ W y`.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(x.dot(&(&self.weight * y)))
    }

    /// `‖x‖_W = ‖Lᵀx‖₂`.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.factor.tr_mul(x).norm())
    }
}

/// Which norm a computation is carried out in.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    L2,
    L1,
    Weighted(WeightedMetric),
}

impl NormSpec {
    pub fn weighted(weight: Matrix) -> Result<Self> {
        Ok(NormSpec::Weighted(WeightedMetric::new(weight)?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NormSpec::L2 => "L2",
            NormSpec::L1 => "L1",
            NormSpec::Weighted(_) => "Weighted",
        }
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        match self {
            NormSpec::L2 => Ok(x.norm()),
            NormSpec::L1 => Ok(x.lp_norm(1)),
            NormSpec::Weighted(w) => w.norm(x),
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            kind: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            weight: Option<Vec<Vec<f64>>>,
        }
        let weight = match self {
            NormSpec::Weighted(w) => Some(matrix_rows(w.weight())),
            _ => None,
        };
        Repr {
            kind: self.kind(),
            weight,
        }
        .serialize(serializer)
    }
}

/// Norm of `x` under `spec`.
pub fn norm(x: &Vector, spec: &NormSpec) -> Result<f64> {
    spec.norm(x)
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

pub(crate) fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Lower Cholesky factor of a symmetric matrix. Fails on the first pivot
/// that drops below `PIVOT_TOL * max(diag)`.
pub fn cholesky_lower(a: &Matrix) -> Result<Matrix> {
    let n = a.nrows();
    let max_diag = a.diagonal().iter().fold(0.0_f64, |m, &d| m.max(d));
    let threshold = PIVOT_TOL * max_diag;
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > threshold) || max_diag <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: d,
                threshold,
            });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ x = rhs` given the lower factor `L`.
pub fn cholesky_solve(factor: &Matrix, rhs: &Vector) -> Vector {
    let y = factor
        .solve_lower_triangular(rhs)
        .expect("factor has nonzero diagonal");
    factor
        .tr_solve_lower_triangular(&y)
        .expect("factor has nonzero diagonal")
}

/// Result of a power-type eigenvalue estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
}

fn seeded_unit(n: usize) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let v = Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut rng)));
    let nv = v.norm();
    v / nv
}

/// Largest singular value of `m` by power iteration on `MᵀM`.
///
/// Stops once the eigen-residual `‖MᵀMv − θv‖` falls below `tol·θ`.
pub fn spectral_norm(m: &Matrix, tol: f64, max_iter: usize) -> Result<SpectralEstimate> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InvalidArgument("spectral_norm of an empty matrix".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let mut v = seeded_unit(m.ncols());
    let mut theta = 0.0;
    for it in 1..=max_iter {
        let w = m.tr_mul(&(m * &v));
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(SpectralEstimate {
                value: 0.0,
                iterations: it,
            });
        }
        theta = v.dot(&w);
        let resid = (&w - &v * theta).norm();
        if resid <= tol * theta {
            return Ok(SpectralEstimate {
                value: theta.max(0.0).sqrt(),
                iterations: it,
            });
        }
        v = w / wn;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        estimate: theta.max(0.0).sqrt(),
    })
}

/// Smallest eigenvalue of a symmetric positive-definite matrix by inverse
/// power iteration on its Cholesky factorization.
pub fn min_eigenvalue_spd(s: &Matrix, tol: f64, max_iter: usize) -> Result<SpectralEstimate> {
    if !s.is_square() || s.nrows() == 0 {
        return Err(Error::InvalidArgument("expected a nonempty square matrix".into()));
    }
    let factor = cholesky_lower(&((s + s.transpose()) * 0.5))?;
    let mut v = seeded_unit(s.nrows());
    let mut theta = 0.0;
    for it in 1..=max_iter {
        let w = cholesky_solve(&factor, &v);
        theta = v.dot(&w);
        let resid = (&w - &v * theta).norm();
        let wn = w.norm();
        if resid <= tol * theta {
            return Ok(SpectralEstimate {
                value: 1.0 / theta,
                iterations: it,
            });
        }
        v = w / wn;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        estimate: 1.0 / theta,
    })
}

/// Assembles the primal-dual metric
///
/// ```text
/// W = [ I/β   -Bᵀ ]
///     [ -B    I/η ]
/// ```
///
/// and checks positive definiteness through its factorization. A failed
/// pivot means the step sizes `(β, η)` are inadmissible for `B`.
pub fn build_w(beta: f64, eta: f64, b: &Matrix) -> Result<WeightedMetric> {
    if !(beta > 0.0) || !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step sizes must be positive (beta={beta}, eta={eta})"
        )));
    }
    let (m, n) = b.shape();
    let mut w = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        w[(i, i)] = 1.0 / beta;
    }
    for i in 0..m {
        w[(n + i, n + i)] = 1.0 / eta;
    }
    for i in 0..m {
        for j in 0..n {
            w[(n + i, j)] = -b[(i, j)];
            w[(j, n + i)] = -b[(i, j)];
        }
    }
    WeightedMetric::new(w)
}

/// Parses the plain-text matrix format: a `rows cols` header followed by
/// row-major whitespace-separated values.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} in matrix header")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
    };
    let rows = dim("rows")?;
    let cols = dim("cols")?;
    let values = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad matrix entry {t:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries for a {rows}x{cols} matrix, found {}",
            rows * cols,
            values.len()
        )));
    }
    Ok(Matrix::from_row_slice(rows, cols, &values))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_matrix`]; values carry 17 significant digits.
pub fn format_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
