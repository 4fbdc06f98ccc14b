//! One-parameter groups `T(t)` with symbols `e^{iβt|ξ|^α}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::{band_sup_distance, dilate, Dilation, MultiplierSpec};
use crate::propagator::apply;
use crate::semistability::{DEFAULT_LOG_RANGE, DEFAULT_POINTS};
use crate::spectral::{BandSpec, SampledSignal};

/// Minimum number of `(t, β̃)` samples for [`recover_beta`].
pub const MIN_FLOW_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl GroupSpec {
    /// `(0, 0)` is the trivial group; otherwise both parameters are nonzero.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidInput(format!("group ({alpha}, {beta}) is not finite")));
        }
        let trivial = alpha == 0.0 && beta == 0.0;
        if !trivial && (alpha == 0.0 || beta == 0.0) {
            return Err(Error::Domain(format!(
                "group ({alpha}, {beta}): a nontrivial group needs α ≠ 0 and β ≠ 0"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn is_trivial(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }
}

/// Symbol of `T(t)`: `(α, βt)`, and the constant 1 at `t = 0`.
pub fn member(group: &GroupSpec, t: f64) -> MultiplierSpec {
    if t == 0.0 || group.is_trivial() {
        return MultiplierSpec::identity();
    }
    MultiplierSpec::closed_form(group.alpha, group.beta * t)
}

/// `‖T(t1 + t2)f − T(t1)T(t2)f‖ / ‖f‖`.
pub fn check_group_law(
    group: &GroupSpec,
    t1: f64,
    t2: f64,
    f: &SampledSignal,
    band: &BandSpec,
) -> Result<f64> {
    let joint = apply(&member(group, t1 + t2), f, band)?;
    let stepped = apply(&member(group, t1), &apply(&member(group, t2), f, band)?, band)?;
    let norm = f.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(joint.distance(&stepped)? / norm)
}

/// `sup_r |T(t) symbol − T(1)_{t^{1/α}} symbol|` over `r ∈ [e⁻³, e³]`.
pub fn check_scaling(group: &GroupSpec, t: f64) -> Result<f64> {
    if group.alpha == 0.0 {
        return Err(Error::Domain("scaling identity needs α ≠ 0".into()));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("scaling identity needs t > 0, got {t}")));
    }
    let direct = member(group, t);
    let scaled = dilate(&member(group, 1.0), Dilation::root(t, group.alpha))?;
    let band = BandSpec::annulus(DEFAULT_LOG_RANGE.0.exp(), DEFAULT_LOG_RANGE.1.exp())?;
    Ok(band_sup_distance(&direct, &scaled, &band, DEFAULT_POINTS)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    /// Largest `|β̃ − slope·t|`.
    pub residual: f64,
}

/// Least-squares slope through the origin of `β̃(t) = βt`.
pub fn recover_beta(samples: &[(f64, f64)]) -> Result<LinearFit> {
    if samples.len() < MIN_FLOW_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} samples; need at least {MIN_FLOW_SAMPLES}",
            samples.len()
        )));
    }
    if samples.iter().any(|(t, b)| !(t.is_finite() && b.is_finite())) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let t0 = samples[0].0;
    if samples.iter().all(|(t, _)| *t == t0) {
        return Err(Error::InsufficientData("all samples share one t".into()));
    }
    let stt: f64 = samples.iter().map(|(t, _)| t * t).sum();
    let stb: f64 = samples.iter().map(|(t, b)| t * b).sum();
    let slope = stb / stt;
    let residual = samples.iter().map(|(t, b)| (b - slope * t).abs()).fold(0.0, f64::max);
    Ok(LinearFit { slope, residual })
}
