//! Multiplier operators acting on sampled signals, together with translation,
//! dilation and the conjugated operators `T_λ = δ_λ T δ_{1/λ}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multiplier::{band_sup_distance, MultiplierSpec, Symbol};
use crate::phase::cis_product;
use crate::spectral::probe::random_band_signal_stream;
use crate::spectral::transform::scaled_frequency_samples;
use crate::spectral::{
    band_project, forward_transform, inverse_transform, BandSpec, SampledSignal, SpatialGrid, Spectrum,
    DEFAULT_MARGIN,
};

/// Width (FWHM, in bins) of the targeted operator-distance probe.
pub const TARGET_PROBE_FWHM_BINS: f64 = 3.0;
/// Dense samples used to locate the argmax for the targeted probe.
pub const PROBE_SUP_SAMPLES: usize = 8192;

/// `T[m] f`: multiplies the in-band part of `f̂` by `m` and zeros the rest.
pub fn apply(spec: &dyn Symbol, f: &SampledSignal, band: &BandSpec) -> Result<SampledSignal> {
    let spectrum = band_project(&forward_transform(f)?, band)?;
    let grid = *spectrum.grid();
    let mut values = spectrum.into_values();
    for k in band.bins(&grid) {
        values[k] *= spec.eval(grid.xi(k))?;
    }
    inverse_transform(&Spectrum::new(grid, values)?)
}

/// `τ_a f(x) = f(x − a)`, applied as the phase `e^{−iaξ}` on every bin.
pub fn translate(f: &SampledSignal, a: f64) -> Result<SampledSignal> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!("shift {a} is not finite")));
    }
    let spectrum = forward_transform(f)?;
    let grid = *spectrum.grid();
    let values = spectrum
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * cis_product(-a, grid.xi(k)))
        .collect();
    inverse_transform(&Spectrum::new(grid, values)?)
}

/// `δ_λ f(x) = |λ|⁻¹ f(x/λ)`, computed as `ξ ↦ f̂(λξ)` by trigonometric
/// interpolation of the spectrum.
///
/// `f` is taken to be band-limited to `band`; the output is band-limited to
/// `band / |λ|`, which must be resolvable on the grid.
pub fn dilate_signal(f: &SampledSignal, lambda: f64, band: &BandSpec) -> Result<SampledSignal> {
    if !(lambda.is_finite() && lambda != 0.0) {
        return Err(Error::Domain(format!("dilation factor must be finite and nonzero, got {lambda}")));
    }
    let grid = *f.grid();
    let image = band.scaled(1.0 / lambda)?;
    image.check_resolvable(&grid, DEFAULT_MARGIN).map_err(|e| {
        Error::Range(format!(
            "δ_λ with λ = {lambda} maps [{}, {}] to [{}, {}]: {e}",
            band.lower(),
            band.upper(),
            image.lower(),
            image.upper()
        ))
    })?;
    let values = if lambda == 1.0 {
        forward_transform(f)?.into_values()
    } else {
        scaled_frequency_samples(f, lambda)
    };
    let values = values
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            if k != 0 && band.contains(lambda * grid.xi(k)) {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    inverse_transform(&Spectrum::new(grid, values)?)
}

/// `T_λ f = δ_λ T δ_{1/λ} f`, built by composition rather than through the
/// dilated symbol.
pub fn conjugated_apply(
    spec: &dyn Symbol,
    lambda: f64,
    f: &SampledSignal,
    band: &BandSpec,
) -> Result<SampledSignal> {
    if !(lambda.is_finite() && lambda != 0.0) {
        return Err(Error::Domain(format!("dilation factor must be finite and nonzero, got {lambda}")));
    }
    let wide = band.scaled(lambda)?;
    let g = dilate_signal(f, 1.0 / lambda, band)?;
    let h = apply(spec, &g, &wide)?;
    dilate_signal(&h, lambda, &wide)
}

/// Largest observed `‖(T[m1] − T[m2]) f‖ / ‖f‖` over `trials` random band
/// signals plus one probe concentrated near the argmax of `|m1 − m2|`.
///
/// Probe `i` draws from stream `i` of `seed`, so results do not depend on
/// thread scheduling.
pub fn probe_operator_distance(
    m1: &MultiplierSpec,
    m2: &MultiplierSpec,
    band: &BandSpec,
    grid: &SpatialGrid,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidInput("at least one probe trial is required".into()));
    }
    band.check_resolvable(grid, DEFAULT_MARGIN)?;
    let gaps: Vec<(usize, f64)> = band
        .bins(grid)
        .map(|k| {
            let xi = grid.xi(k);
            Ok((k, (m1.eval(xi)? - m2.eval(xi)?).norm()))
        })
        .collect::<Result<_>>()?;
    let ratio = |weights: &dyn Fn(usize) -> f64| -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for &(k, g) in &gaps {
            let w = weights(k);
            num += g * g * w;
            den += w;
        }
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            0.0
        }
    };

    let random = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let s = random_band_signal_stream(band, grid, seed, trial)?;
            let power: Vec<f64> = s.values().iter().map(|v| v.norm_sqr()).collect();
            Ok(ratio(&|k| power[k]))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let peak = band_sup_distance(m1, m2, band, PROBE_SUP_SAMPLES)?;
    let centre = grid.signed_index(grid.nearest_bin(peak.argmax)) as f64;
    let sigma = TARGET_PROBE_FWHM_BINS / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
    let targeted = ratio(&|k| {
        let z = (grid.signed_index(k) as f64 - centre) / sigma;
        // squared amplitude of a Gaussian bump
        (-z * z).exp()
    });
    Ok(random.max(targeted))
}
