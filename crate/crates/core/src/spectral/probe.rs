//! Seeded probe generation.
//!
//! Every probe stream is ChaCha20 keyed by `seed` (expanded through
//! `SeedableRng::seed_from_u64`) with the ChaCha stream id set to the probe
//! index. Both are counter-based, so probe `i` of seed `s` is reproducible
//! independently of how many other probes were drawn or in which thread.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::band::{band_project, BandSpec, DEFAULT_MARGIN};
use super::grid::{SampledSignal, SpatialGrid, Spectrum};
use super::transform::inverse_transform;
use crate::error::Result;

/// Generator for probe `stream` of `seed`.
pub fn probe_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normalize(mut s: Spectrum) -> Spectrum {
    let norm = s.norm();
    if norm > 0.0 {
        s.values_mut().iter_mut().for_each(|v| *v /= norm);
    }
    s
}

/// Unit-norm spectrum with independent complex Gaussian entries on every
/// in-band bin and zeros elsewhere.
pub fn random_band_signal(band: &BandSpec, grid: &SpatialGrid, seed: u64) -> Result<Spectrum> {
    random_band_signal_stream(band, grid, seed, 0)
}

pub(crate) fn random_band_signal_stream(
    band: &BandSpec,
    grid: &SpatialGrid,
    seed: u64,
    stream: u64,
) -> Result<Spectrum> {
    band.check_resolvable(grid, DEFAULT_MARGIN)?;
    let mut rng = probe_rng(seed, stream);
    let mut s = Spectrum::zeros(*grid);
    for (k, v) in s.values_mut().iter_mut().enumerate() {
        // Draw for every bin so the stream layout does not depend on the band.
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        if k != 0 && band.contains(grid.xi(k)) {
            *v = Complex64::new(re, im);
        }
    }
    Ok(normalize(s))
}

/// Unit-norm superposition of a few smooth wave packets whose spectra vanish
/// (below ~1e-13 relative) well before the band edges and whose envelopes
/// sit near the middle of the window.
///
/// White in-band spectra are not spatially localised, so they wrap around the
/// periodic window under dilation; these packets do not.
pub fn random_packet_signal(band: &BandSpec, grid: &SpatialGrid, seed: u64) -> Result<SampledSignal> {
    band.check_resolvable(grid, DEFAULT_MARGIN)?;
    let mut rng = probe_rng(seed, u64::MAX);
    let (lo, hi) = (band.lower(), band.upper());
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let packets = 3;
    let mut s = Spectrum::zeros(*grid);
    for _ in 0..packets {
        // centre in the middle half of the band (log scale)
        let u: f64 = rng.random_range(0.25..0.75);
        let centre = (log_lo + u * (log_hi - log_lo)).exp();
        let room = (centre - lo).min(hi - centre);
        let width = room / 8.0;
        let shift: f64 = rng.random_range(-0.05..0.05) * grid.x_max();
        let side: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let amp = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        for (k, v) in s.values_mut().iter_mut().enumerate() {
            let xi = grid.xi(k);
            let z = (side * xi - centre) / width;
            if z.abs() < 12.0 {
                *v += amp * (-0.5 * z * z).exp() * Complex64::from_polar(1.0, -xi * shift);
            }
        }
    }
    let s = band_project(&s, band)?;
    inverse_transform(&normalize(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (SpatialGrid, BandSpec) {
        (SpatialGrid::new(2048, 200.0).unwrap(), BandSpec::new(3.0).unwrap())
    }

    #[test]
    fn same_seed_same_signal() {
        let (g, b) = setup();
        assert_eq!(random_band_signal(&b, &g, 7).unwrap(), random_band_signal(&b, &g, 7).unwrap());
        assert_ne!(random_band_signal(&b, &g, 7).unwrap(), random_band_signal(&b, &g, 8).unwrap());
    }

    #[test]
    fn unit_norm_and_band_support() {
        let (g, b) = setup();
        for seed in 0..20 {
            let s = random_band_signal(&b, &g, seed).unwrap();
            assert!((s.norm() - 1.0).abs() <= 1e-14);
            assert_eq!(band_project(&s, &b).unwrap(), s);
        }
    }

    #[test]
    fn packets_are_localised() {
        let (g, b) = setup();
        let f = random_packet_signal(&b, &g, 3).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        let n = g.n();
        let edge = f.values()[..n / 16]
            .iter()
            .chain(&f.values()[n - n / 16..])
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(edge < 1e-8, "edge amplitude {edge:e}");
    }
}
