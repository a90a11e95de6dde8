//! Sampled verification of operator-class inequalities.
//!
//! Every check here evaluates a slack (right-hand side minus left-hand side
//! of the defining inequality) on a deterministic, seed-ordered list of
//! samples. A `Pass` verdict only means the samples failed to refute the
//! property; a `Fail` carries the witness pair that refutes it.
//!
//! | class           | slack at a sample                                     |
//! |-----------------|-------------------------------------------------------|
//! | GAN (γ, μ)      | `‖x−y‖^γ − ‖Tx−Ty‖^γ − μ‖(I−T)x−(I−T)y‖^γ`           |
//! | nonexpansive    | `‖x−y‖ − ‖Tx−Ty‖`                                     |
//! | contractive (ρ) | `ρ‖x−y‖ − ‖Tx−Ty‖`                                    |
//! | FP-contr. (ρ)   | `ρ‖x−x̂‖ − ‖Tx−x̂‖`, `x ∉ Fix(T)`                       |
//! | Hölder (γ, μ)   | `μ‖x−Tx‖^γ − ‖x−x̂‖`                                   |
//!
//! `x̂` is the operator's fixed-point hint; the distance to `Fix(T)` is
//! taken as the distance to that single point.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{check_dim, NormSpec};
use crate::operators::Operator;
use crate::report::fmt_f64;
use crate::Vector;

/// Default absolute tolerance on slack for a `Pass` verdict.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default radius scales of the sample clouds.
pub const DEFAULT_SCALES: [f64; 4] = [0.1, 1.0, 10.0, 1e3];
/// Relative cutoff under which a `(I−T)` difference counts as zero.
pub const DENOMINATOR_CUTOFF: f64 = 1e-14;
/// Bisection width for [`estimate_min_gamma`].
pub const GAMMA_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub n_pairs: usize,
    pub radius_scales: Vec<f64>,
    pub seed: u64,
    pub center: Option<Vector>,
}

impl SamplingPlan {
    pub fn new(n_pairs: usize, radius_scales: Vec<f64>, seed: u64) -> Result<Self> {
        if n_pairs == 0 {
            return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
        }
        if radius_scales.is_empty() || radius_scales.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidArgument(
                "radius_scales must be nonempty and positive".into(),
            ));
        }
        Ok(Self {
            n_pairs,
            radius_scales,
            seed,
            center: None,
        })
    }

    pub fn with_default_scales(n_pairs: usize, seed: u64) -> Result<Self> {
        Self::new(n_pairs, DEFAULT_SCALES.to_vec(), seed)
    }

    pub fn with_center(mut self, center: Vector) -> Self {
        self.center = Some(center);
        self
    }

    pub fn total(&self) -> usize {
        self.n_pairs * self.radius_scales.len()
    }
}

/// Operator class plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorClass {
    Gan { gamma: f64, mu: f64 },
    Nonexpansive,
    Contractive { rho: f64 },
    FpContractive { rho: f64 },
    HolderRegular { gamma: f64, mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    #[serde(rename = "GAN")]
    Gan,
    Nonexpansive,
    Contractive,
    FpContractive,
    HolderRegular,
}

impl OperatorClass {
    pub fn property(&self) -> Property {
        match self {
            OperatorClass::Gan { .. } => Property::Gan,
            OperatorClass::Nonexpansive => Property::Nonexpansive,
            OperatorClass::Contractive { .. } => Property::Contractive,
            OperatorClass::FpContractive { .. } => Property::FpContractive,
            OperatorClass::HolderRegular { .. } => Property::HolderRegular,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            OperatorClass::Gan { gamma, .. } | OperatorClass::HolderRegular { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    /// μ for GAN / Hölder, ρ for the contractive classes, 1 for nonexpansive.
    pub fn coefficient(&self) -> f64 {
        match *self {
            OperatorClass::Gan { mu, .. } | OperatorClass::HolderRegular { mu, .. } => mu,
            OperatorClass::Contractive { rho } | OperatorClass::FpContractive { rho } => rho,
            OperatorClass::Nonexpansive => 1.0,
        }
    }

    fn needs_fixed_point(&self) -> bool {
        matches!(
            self,
            OperatorClass::FpContractive { .. } | OperatorClass::HolderRegular { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            OperatorClass::Gan { gamma, mu } | OperatorClass::HolderRegular { gamma, mu } => {
                gamma > 0.0 && mu > 0.0
            }
            OperatorClass::Contractive { rho } | OperatorClass::FpContractive { rho } => rho > 0.0,
            OperatorClass::Nonexpansive => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid class parameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "ser_vector")]
    pub x: Vector,
    #[serde(serialize_with = "ser_vector")]
    pub y: Vector,
}

pub(crate) fn ser_vector<S: serde::Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

/// Outcome of a sampled class check. Always sampled evidence, never a proof.
#[derive(Debug, Clone, Serialize)]
pub struct GanCertificate {
    pub operator: String,
    pub property: Property,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// μ for GAN / Hölder regularity, ρ for the contractive classes.
    pub mu: f64,
    pub norm: NormSpec,
    pub verdict: Verdict,
    pub min_slack: f64,
    pub witness: Witness,
    pub n_checked: usize,
    pub n_skipped: usize,
    pub tol: f64,
    pub evidence: &'static str,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub class: Option<OperatorClass>,
}

impl GanCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Recomputes the slack at the stored witness.
    pub fn reevaluate(&self, t: &Operator) -> Result<f64> {
        let class = self
            .class
            .ok_or_else(|| Error::InvalidArgument("certificate has no class".into()))?;
        Ok(class_slack(t, &class, &self.norm, &self.witness.x, &self.witness.y)?.unwrap_or(f64::INFINITY))
    }
}

/// `‖x−y‖^γ − ‖Tx−Ty‖^γ − μ‖(I−T)x−(I−T)y‖^γ`; nonnegative exactly when the
/// GAN inequality holds at `(x, y)`.
pub fn gan_slack(t: &Operator, x: &Vector, y: &Vector, gamma: f64, mu: f64, norm: &NormSpec) -> Result<f64> {
    let (tx, ty) = (t.apply(x)?, t.apply(y)?);
    gan_slack_from_images(x, y, &tx, &ty, gamma, mu, norm)
}

fn gan_slack_from_images(
    x: &Vector,
    y: &Vector,
    tx: &Vector,
    ty: &Vector,
    gamma: f64,
    mu: f64,
    norm: &NormSpec,
) -> Result<f64> {
    let d = norm.norm(&(x - y))?;
    let dt = norm.norm(&(tx - ty))?;
    let dr = norm.norm(&((x - tx) - (y - ty)))?;
    Ok(d.powf(gamma) - dt.powf(gamma) - mu * dr.powf(gamma))
}

fn cutoff(norm: &NormSpec, x: &Vector, y: &Vector) -> Result<f64> {
    Ok(DENOMINATOR_CUTOFF * 1f64.max(norm.norm(x)?).max(norm.norm(y)?))
}

/// Slack of `class` at a sample; `None` when the sample carries no
/// information (a fixed point in the FP-contractive check).
fn class_slack(t: &Operator, class: &OperatorClass, norm: &NormSpec, x: &Vector, y: &Vector) -> Result<Option<f64>> {
    let tx = t.apply(x)?;
    let slack = match *class {
        OperatorClass::Gan { gamma, mu } => {
            let ty = t.apply(y)?;
            gan_slack_from_images(x, y, &tx, &ty, gamma, mu, norm)?
        }
        OperatorClass::Nonexpansive => {
            let ty = t.apply(y)?;
            norm.norm(&(x - y))? - norm.norm(&(&tx - &ty))?
        }
        OperatorClass::Contractive { rho } => {
            let ty = t.apply(y)?;
            rho * norm.norm(&(x - y))? - norm.norm(&(&tx - &ty))?
        }
        OperatorClass::FpContractive { rho } => {
            if norm.norm(&(&tx - x))? <= cutoff(norm, x, y)? {
                return Ok(None);
            }
            rho * norm.norm(&(x - y))? - norm.norm(&(&tx - y))?
        }
        OperatorClass::HolderRegular { gamma, mu } => {
            mu * norm.norm(&(x - &tx))?.powf(gamma) - norm.norm(&(x - y))?
        }
    };
    Ok(Some(slack))
}

fn gaussian(dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    Vector::from_iterator(dim, (0..dim).map(|_| StandardNormal.sample(rng)))
}

/// Seed-ordered sample pairs.
///
/// For each radius scale `s`, `n_pairs` pairs are drawn around the center
/// (`plan.center`, else the hint, else the origin). With a hint present,
/// every fourth pair is `(x, x̂)` and every fourth (offset by one) straddles
/// the hint as `(x, 2x̂ − x)`.
pub fn sample_pairs(dim: usize, plan: &SamplingPlan, hint: Option<&Vector>) -> Result<Vec<(Vector, Vector)>> {
    let center = match (&plan.center, hint) {
        (Some(c), _) => c.clone(),
        (None, Some(h)) => h.clone(),
        (None, None) => Vector::zeros(dim),
    };
    check_dim(dim, center.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut out = Vec::with_capacity(plan.total());
    for &s in &plan.radius_scales {
        for i in 0..plan.n_pairs {
            let x = &center + gaussian(dim, &mut rng) * s;
            let g = gaussian(dim, &mut rng);
            let y = match (hint, i % 4) {
                (Some(h), 2) => h.clone(),
                (Some(h), 3) => h * 2.0 - &x,
                _ => &center + g * s,
            };
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Seed-ordered single points paired with the fixed-point hint.
fn sample_points(dim: usize, plan: &SamplingPlan, hint: &Vector) -> Result<Vec<(Vector, Vector)>> {
    let center = plan.center.clone().unwrap_or_else(|| hint.clone());
    check_dim(dim, center.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut out = Vec::with_capacity(plan.total());
    for &s in &plan.radius_scales {
        for _ in 0..plan.n_pairs {
            out.push((&center + gaussian(dim, &mut rng) * s, hint.clone()));
        }
    }
    Ok(out)
}

fn plan_samples(t: &Operator, class: &OperatorClass, plan: &SamplingPlan) -> Result<Vec<(Vector, Vector)>> {
    if class.needs_fixed_point() {
        let hint = t.fixed_point_hint().ok_or(Error::MissingFixedPoint(match class {
            OperatorClass::FpContractive { .. } => "FP-contractive check",
            _ => "Hölder-regularity check",
        }))?;
        sample_points(t.dim(), plan, hint)
    } else {
        sample_pairs(t.dim(), plan, t.fixed_point_hint())
    }
}

/// Evaluates in parallel; the minimum is taken over the seed-ordered list
/// (first index wins ties), so the result does not depend on scheduling.
fn min_over<F>(samples: &[(Vector, Vector)], eval: F) -> Result<(Option<(usize, f64)>, usize)>
where
    F: Fn(&Vector, &Vector) -> Result<Option<f64>> + Sync,
{
    let values = samples
        .par_iter()
        .map(|(x, y)| eval(x, y))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(usize, f64)> = None;
    let mut skipped = 0;
    for (i, v) in values.into_iter().enumerate() {
        match v {
            None => skipped += 1,
            Some(s) => {
                let s = if s.is_nan() { f64::NEG_INFINITY } else { s };
                if best.is_none_or(|(_, b)| s < b) {
                    best = Some((i, s));
                }
            }
        }
    }
    Ok((best, skipped))
}

/// Sampled check of `class` for `t` in `norm`.
pub fn certify(
    t: &Operator,
    class: OperatorClass,
    norm: &NormSpec,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<GanCertificate> {
    class.validate()?;
    let samples = plan_samples(t, &class, plan)?;
    let (best, skipped) = min_over(&samples, |x, y| class_slack(t, &class, norm, x, y))?;
    let (idx, min_slack) = best.ok_or(Error::DegenerateSamples)?;
    let (wx, wy) = samples[idx].clone();
    let mut notes = vec!["sampled evidence: PASS means no refuting pair was found".to_string()];
    if class.needs_fixed_point() {
        notes.push("distance to Fix(T) measured to the single fixed-point hint".into());
    }
    Ok(GanCertificate {
        operator: t.label().to_string(),
        property: class.property(),
        gamma: class.gamma(),
        mu: class.coefficient(),
        norm: norm.clone(),
        verdict: if min_slack >= -tol { Verdict::Pass } else { Verdict::Fail },
        min_slack,
        witness: Witness { x: wx, y: wy },
        n_checked: samples.len() - skipped,
        n_skipped: skipped,
        tol,
        evidence: "sampled",
        notes,
        class: Some(class),
    })
}

/// Smallest sampled quotient `(‖x−y‖^γ − ‖Tx−Ty‖^γ) / ‖(I−T)x−(I−T)y‖^γ`,
/// an upper estimate of the best admissible μ. Returns 0 as soon as any
/// quotient is nonpositive.
pub fn estimate_mu(t: &Operator, gamma: f64, norm: &NormSpec, plan: &SamplingPlan) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
    }
    let samples = sample_pairs(t.dim(), plan, t.fixed_point_hint())?;
    let (best, _) = min_over(&samples, |x, y| {
        let (tx, ty) = (t.apply(x)?, t.apply(y)?);
        let den = norm.norm(&((x - &tx) - (y - &ty)))?;
        if den <= cutoff(norm, x, y)? {
            return Ok(None);
        }
        let num = norm.norm(&(x - y))?.powf(gamma) - norm.norm(&(&tx - &ty))?.powf(gamma);
        Ok(Some(num / den.powf(gamma)))
    })?;
    let (_, q) = best.ok_or(Error::DegenerateSamples)?;
    Ok(q.max(0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub bracket: (f64, f64),
    pub notes: Vec<String>,
}

/// Bisection for the smallest exponent at which `certify(GAN, γ, μ)` passes.
///
/// Requires a failing lower end and a passing upper end; returns the upper
/// end once the bracket is narrower than [`GAMMA_WIDTH`].
pub fn estimate_min_gamma(
    t: &Operator,
    mu: f64,
    norm: &NormSpec,
    plan: &SamplingPlan,
    bracket: (f64, f64),
) -> Result<GammaEstimate> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Bracket(format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    let passes = |gamma: f64| -> Result<bool> {
        Ok(certify(t, OperatorClass::Gan { gamma, mu }, norm, plan, DEFAULT_TOL)?.passed())
    };
    if !passes(hi)? {
        return Err(Error::Bracket(format!("GAN check fails at upper end {hi}")));
    }
    if passes(lo)? {
        return Err(Error::Bracket(format!("GAN check already passes at lower end {lo}")));
    }
    while hi - lo > GAMMA_WIDTH {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut notes = vec!["sampled evidence: smallest exponent not refuted by the samples".to_string()];
    if mu < 1.0 {
        notes.push("mu < 1: monotonicity of validity in gamma is assumed, not guaranteed".into());
    }
    Ok(GammaEstimate {
        gamma: hi,
        bracket: (lo, hi),
        notes,
    })
}

/// Largest sampled ratio `‖Tx−x̂‖ / ‖x−x̂‖` over non-fixed points.
pub fn empirical_fp_ratio(t: &Operator, norm: &NormSpec, plan: &SamplingPlan) -> Result<f64> {
    let hint = t
        .fixed_point_hint()
        .ok_or(Error::MissingFixedPoint("FP-contraction ratio"))?
        .clone();
    let samples = sample_points(t.dim(), plan, &hint)?;
    let (best, _) = min_over(&samples, |x, h| {
        let tx = t.apply(x)?;
        let dx = norm.norm(&(x - h))?;
        if norm.norm(&(&tx - x))? <= cutoff(norm, x, h)? || dx == 0.0 {
            return Ok(None);
        }
        Ok(Some(-norm.norm(&(&tx - h))? / dx))
    })?;
    let (_, neg) = best.ok_or(Error::DegenerateSamples)?;
    Ok(-neg)
}

/// `ψ(α) = (1 − α^γ) / (1 − α)^γ` on `[0, 1)`.
pub fn psi(alpha: f64, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) || !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "psi needs 0 <= alpha < 1 and gamma > 0 (alpha={alpha}, gamma={gamma})"
        )));
    }
    Ok((1.0 - alpha.powf(gamma)) / (1.0 - alpha).powf(gamma))
}

/// GAN modulus of a ρ-contraction at exponent γ: `(1 − ρ^γ) / (1 + ρ)^γ`.
pub fn mu_hat(rho: f64, gamma: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) || !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mu_hat needs 0 < rho < 1 and gamma > 0 (rho={rho}, gamma={gamma})"
        )));
    }
    Ok((1.0 - rho.powf(gamma)) / (1.0 + rho).powf(gamma))
}

/// Modulus of `T₁ ∘ T₂` for `T₁`, `T₂` GAN with moduli `μ₁`, `μ₂` at a common
/// exponent `γ ≥ 1`: `2^{1−γ} min(μ₁, μ₂)`.
pub fn composition_mu(mu1: f64, mu2: f64, gamma: f64) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "composition modulus requires gamma >= 1, got {gamma}"
        )));
    }
    if !(mu1 > 0.0 && mu2 > 0.0) {
        return Err(Error::InvalidArgument("moduli must be positive".into()));
    }
    Ok(2f64.powf(1.0 - gamma) * mu1.min(mu2))
}

/// GAN modulus (exponent 2) of an α-averaged operator: `(1 − α)/α`.
pub fn averaged_mu(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok((1.0 - alpha) / alpha)
}

/// Relative slack allowed on the region inequality.
pub const REGION_TOL: f64 = 1e-12;

/// Whether `p` satisfies `‖p−x̂‖^γ + μ‖p−x‖^γ ≤ ‖x−x̂‖^γ` (ℓ2).
pub fn region_contains(p: &Vector, x: &Vector, xhat: &Vector, gamma: f64, mu: f64) -> bool {
    let rhs = (x - xhat).norm().powf(gamma);
    (p - xhat).norm().powf(gamma) + mu * (p - x).norm().powf(gamma) <= rhs * (1.0 + REGION_TOL)
}

/// Membership grid of the possible range of `Tx` for a GAN operator with
/// fixed point `x̂`, over the square enclosing the ball `B(x̂, ‖x−x̂‖)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub x: [f64; 2],
    pub xhat: [f64; 2],
    pub gamma: f64,
    pub mu: f64,
    /// `[x_min, x_max, y_min, y_max]`
    pub bounds: [f64; 4],
    pub resolution: usize,
    /// Row-major, row index along the second coordinate.
    pub cells: Vec<bool>,
}

impl RegionGrid {
    pub fn cell(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.resolution + col]
    }

    /// Offset of cell center `i` from the grid center; symmetric in
    /// `i ↔ resolution − 1 − i` bit-for-bit.
    pub fn offset(&self, i: usize) -> f64 {
        cell_offset(i, self.resolution, self.bounds[1] - self.bounds[0])
    }

    pub fn center(&self, row: usize, col: usize) -> [f64; 2] {
        [self.xhat[0] + self.offset(col), self.xhat[1] + self.offset(row)]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# region of Tx: |y-xhat|^gamma + mu*|y-x|^gamma <= |x-xhat|^gamma (l2)");
        let _ = writeln!(s, "# x = {} {}", fmt_f64(self.x[0]), fmt_f64(self.x[1]));
        let _ = writeln!(s, "# xhat = {} {}", fmt_f64(self.xhat[0]), fmt_f64(self.xhat[1]));
        let _ = writeln!(s, "# gamma = {}", fmt_f64(self.gamma));
        let _ = writeln!(s, "# mu = {}", fmt_f64(self.mu));
        let _ = writeln!(
            s,
            "# bounds = {} {} {} {}",
            fmt_f64(self.bounds[0]),
            fmt_f64(self.bounds[1]),
            fmt_f64(self.bounds[2]),
            fmt_f64(self.bounds[3])
        );
        let _ = writeln!(s, "# resolution = {}", self.resolution);
        let _ = writeln!(s, "# rows run along the second coordinate, increasing; 1 = inside");
        for row in self.cells.chunks(self.resolution) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }
}

fn cell_offset(i: usize, n: usize, width: f64) -> f64 {
    let h = width / n as f64;
    ((2 * i + 1) as f64 - n as f64) * 0.5 * h
}

pub fn range_region(x: [f64; 2], xhat: [f64; 2], gamma: f64, mu: f64, resolution: usize) -> Result<RegionGrid> {
    if x == xhat {
        return Err(Error::InvalidArgument("x must differ from xhat".into()));
    }
    if resolution == 0 || !(gamma > 0.0) || !(mu >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bad region parameters (resolution={resolution}, gamma={gamma}, mu={mu})"
        )));
    }
    let xv = Vector::from_column_slice(&x);
    let hv = Vector::from_column_slice(&xhat);
    let r = (&xv - &hv).norm();
    let bounds = [xhat[0] - r, xhat[0] + r, xhat[1] - r, xhat[1] + r];
    let cells = (0..resolution * resolution)
        .map(|k| {
            let (row, col) = (k / resolution, k % resolution);
            let p = Vector::from_column_slice(&[
                xhat[0] + cell_offset(col, resolution, 2.0 * r),
                xhat[1] + cell_offset(row, resolution, 2.0 * r),
            ]);
            region_contains(&p, &xv, &hv, gamma, mu)
        })
        .collect();
    Ok(RegionGrid {
        x,
        xhat,
        gamma,
        mu,
        bounds,
        resolution,
        cells,
    })
}
