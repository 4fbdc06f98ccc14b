use num_complex::Complex64;
use serde::Serialize;

use super::grid::{SpatialGrid, Spectrum};
use crate::error::{Error, Result};

/// Fraction of the Nyquist range kept free above a band's upper edge.
pub const DEFAULT_MARGIN: f64 = 0.125;

/// Relative slack when comparing bin frequencies to band edges, so bins that
/// sit exactly on an edge survive rounding of `k·Δξ`.
const EDGE_SLACK: f64 = 1e-12;

/// A frequency annulus `lower ≤ |ξ| ≤ upper`; the symmetric band of radius
/// `R` is `[R⁻¹, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSpec {
    lower: f64,
    upper: f64,
}

impl BandSpec {
    /// The band `R⁻¹ ≤ |ξ| ≤ R`.
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 1.0) {
            return Err(Error::Config(format!("band radius must be finite and > 1, got {r}")));
        }
        Ok(Self { lower: 1.0 / r, upper: r })
    }

    pub fn annulus(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower > 0.0 && upper > lower) {
            return Err(Error::Config(format!("invalid band [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Band image under `ξ ↦ |λ|ξ`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let l = lambda.abs();
        Self::annulus(self.lower * l, self.upper * l)
    }

    pub fn contains(&self, xi: f64) -> bool {
        let a = xi.abs();
        a >= self.lower * (1.0 - EDGE_SLACK) && a <= self.upper * (1.0 + EDGE_SLACK)
    }

    /// Checks `lower ≥ Δξ` and `upper ≤ ξ_max·(1 − margin)`.
    pub fn check_resolvable(&self, grid: &SpatialGrid, margin: f64) -> Result<()> {
        if self.lower < grid.dxi() * (1.0 - EDGE_SLACK) {
            return Err(Error::Config(format!(
                "band lower edge {} is below the frequency spacing {} (window too narrow)",
                self.lower,
                grid.dxi()
            )));
        }
        let cap = grid.xi_max() * (1.0 - margin);
        if self.upper > cap * (1.0 + EDGE_SLACK) {
            return Err(Error::Config(format!(
                "band upper edge {} exceeds {} = ξ_max·(1 − {margin}) (grid too coarse)",
                self.upper, cap
            )));
        }
        Ok(())
    }

    /// FFT bins of `grid` that lie inside the band.
    pub fn bins<'a>(&'a self, grid: &'a SpatialGrid) -> impl Iterator<Item = usize> + 'a {
        (0..grid.n()).filter(move |&k| k != 0 && self.contains(grid.xi(k)))
    }
}

/// Zeros every bin outside the band; the DC bin is always removed.
pub fn band_project(spectrum: &Spectrum, band: &BandSpec) -> Result<Spectrum> {
    let grid = *spectrum.grid();
    if band.lower > grid.xi_max() || band.bins(&grid).next().is_none() {
        return Err(Error::Config(format!(
            "band [{}, {}] contains no frequency bin of the grid",
            band.lower, band.upper
        )));
    }
    let mut out = spectrum.clone();
    for (k, v) in out.values_mut().iter_mut().enumerate() {
        if k == 0 || !band.contains(grid.xi(k)) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inner_product, inverse_transform, random_band_signal};
    use std::f64::consts::PI;

    fn filled(grid: SpatialGrid) -> Spectrum {
        Spectrum::from_fn(grid, |xi| Complex64::new(1.0 + xi.cos(), xi.sin())).unwrap()
    }

    #[test]
    fn wide_band_removes_only_dc() {
        let g = SpatialGrid::new(64, 4.0).unwrap();
        let band = BandSpec::new(32.0).unwrap();
        let s = filled(g);
        let p = band_project(&s, &band).unwrap();
        assert_eq!(p.values()[0], Complex64::new(0.0, 0.0));
        assert_eq!(&p.values()[1..], &s.values()[1..]);
    }

    #[test]
    fn survivors_match_index_enumeration() {
        // Δξ = 0.05 exactly when x_max = 20π; R = 2 keeps 10 ≤ |k| ≤ 40.
        let g = SpatialGrid::new(128, 20.0 * PI).unwrap();
        let band = BandSpec::new(2.0).unwrap();
        let s = filled(g);
        let p = band_project(&s, &band).unwrap();
        for k in 0..128 {
            let idx = g.signed_index(k).abs();
            let keep = (10..=40).contains(&idx);
            if keep {
                assert_eq!(p.values()[k], s.values()[k], "bin {k}");
            } else {
                assert_eq!(p.values()[k], Complex64::new(0.0, 0.0), "bin {k}");
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_contracting() {
        let g = SpatialGrid::new(256, 30.0).unwrap();
        let band = BandSpec::new(2.5).unwrap();
        let s = filled(g);
        let once = band_project(&s, &band).unwrap();
        let twice = band_project(&once, &band).unwrap();
        assert_eq!(once, twice);
        assert!(once.norm() <= s.norm());
    }

    #[test]
    fn projection_is_self_adjoint() {
        let g = SpatialGrid::new(256, 30.0).unwrap();
        let wide = BandSpec::new(8.0).unwrap();
        let band = BandSpec::new(2.5).unwrap();
        for seed in 0..10 {
            let f = random_band_signal(&wide, &g, seed).unwrap();
            let h = random_band_signal(&wide, &g, 1000 + seed).unwrap();
            let pf = inverse_transform(&band_project(&f, &band).unwrap()).unwrap();
            let ph = inverse_transform(&band_project(&h, &band).unwrap()).unwrap();
            let lhs = inner_product(&pf, &inverse_transform(&h).unwrap()).unwrap();
            let rhs = inner_product(&inverse_transform(&f).unwrap(), &ph).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn resolvability_is_checked() {
        let g = SpatialGrid::new(64, 4.0).unwrap();
        // Δξ ≈ 0.785, ξ_max ≈ 25.1
        assert!(BandSpec::new(1.2).unwrap().check_resolvable(&g, DEFAULT_MARGIN).is_ok());
        assert!(BandSpec::new(2.0).unwrap().check_resolvable(&g, DEFAULT_MARGIN).is_err());
        let g2 = SpatialGrid::new(64, 40.0).unwrap();
        // ξ_max ≈ 2.51; R = 2.3 > 2.2
        assert!(BandSpec::new(2.3).unwrap().check_resolvable(&g2, DEFAULT_MARGIN).is_err());
        assert!(BandSpec::new(0.5).is_err());
    }

    #[test]
    fn empty_band_is_a_configuration_error() {
        let g = SpatialGrid::new(16, 100.0).unwrap();
        let band = BandSpec::annulus(10.0, 20.0).unwrap();
        assert!(matches!(band_project(&Spectrum::zeros(g), &band), Err(Error::Config(_))));
    }
}
