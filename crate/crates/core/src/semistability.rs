//! Symbol-level semistability: `m(aξ) = m(ξ)²`, `m(bξ) = m(ξ)³` and
//! `m(−ξ) = m(ξ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiplier::{band_sup_distance, combine, dilate, eval, Dilation, MultiplierSpec, Symbol};
use crate::propagator::{apply, conjugated_apply};
use crate::spectral::{BandSpec, SampledSignal};

/// Default tolerance for [`check_semistable`].
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default test radii: `r ∈ [e⁻³, e³]`, 4096 log-uniform points.
pub const DEFAULT_LOG_RANGE: (f64, f64) = (-3.0, 3.0);
pub const DEFAULT_POINTS: usize = 4096;

/// Semistability constants `(a, b)` with `T² = T_a` and `T³ = T_b`.
///
/// Pairs built by [`canonical_pair`] remember the order `α` so that
/// `a^α = 2` and `b^α = 3` are applied exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemistablePair {
    pub a: f64,
    pub b: f64,
    #[serde(skip)]
    order: Option<f64>,
}

impl SemistablePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if a == 1.0 {
            return Err(Error::Domain("a = 1 forces the symbol to be constant 1".into()));
        }
        Ok(Self { a, b, order: None })
    }

    pub fn order(&self) -> Option<f64> {
        self.order
    }

    pub fn a_dilation(&self) -> Dilation {
        match self.order {
            Some(order) => Dilation::root(2.0, order),
            None => Dilation::Factor(self.a),
        }
    }

    pub fn b_dilation(&self) -> Dilation {
        match self.order {
            Some(order) => Dilation::root(3.0, order),
            None => Dilation::Factor(self.b),
        }
    }
}

/// `(2^{1/α}, 3^{1/α})`.
pub fn canonical_pair(alpha: f64) -> Result<SemistablePair> {
    if !alpha.is_finite() || alpha == 0.0 {
        return Err(Error::Domain(format!(
            "the canonical pair needs a finite nonzero order, got α = {alpha}"
        )));
    }
    Ok(SemistablePair {
        a: 2f64.powf(1.0 / alpha),
        b: 3f64.powf(1.0 / alpha),
        order: Some(alpha),
    })
}

/// `count` log-uniform radii on `[e^{s_lo}, e^{s_hi}]`.
pub fn log_radius_grid(s_lo: f64, s_hi: f64, count: usize) -> Vec<f64> {
    let step = if count > 1 { (s_hi - s_lo) / (count - 1) as f64 } else { 0.0 };
    (0..count).map(|k| (s_lo + k as f64 * step).exp()).collect()
}

pub fn default_radius_grid() -> Vec<f64> {
    log_radius_grid(DEFAULT_LOG_RANGE.0, DEFAULT_LOG_RANGE.1, DEFAULT_POINTS)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemistabilityReport {
    pub res2: f64,
    pub res3: f64,
    pub sym_res: f64,
    pub pass: bool,
    pub pair: SemistablePair,
    pub tol: f64,
    /// Radii actually tested; narrower than requested when a tabulated
    /// symbol cannot be evaluated at `a·r` or `b·r`.
    pub effective_range: (f64, f64),
}

/// Sup residuals of the semistability identities over `r_grid`.
pub fn check_semistable(
    spec: &MultiplierSpec,
    pair: &SemistablePair,
    r_grid: &[f64],
    tol: f64,
) -> Result<SemistabilityReport> {
    if r_grid.is_empty() || r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidInput("test radii must be positive and finite".into()));
    }
    let at_a = dilate(spec, pair.a_dilation())?;
    let at_b = dilate(spec, pair.b_dilation())?;
    let inside = |m: &MultiplierSpec, r: f64| {
        let (lo, hi) = m.radial_domain();
        r >= lo && r <= hi
    };
    let radii: Vec<f64> = r_grid
        .iter()
        .copied()
        .filter(|&r| inside(spec, r) && inside(&at_a, r) && inside(&at_b, r))
        .collect();
    let (Some(&first), Some(&last)) = (radii.first(), radii.last()) else {
        let (lo, hi) = spec.radial_domain();
        return Err(Error::Range(format!(
            "no test radius r has r, a·r and b·r inside the symbol's range [{lo}, {hi}] (a = {}, b = {})",
            pair.a, pair.b
        )));
    };

    let (mut res2, mut res3, mut sym_res) = (0.0f64, 0.0f64, 0.0f64);
    for &r in &radii {
        let m = eval(spec, r)?;
        res2 = res2.max((eval(&at_a, r)? - m * m).norm());
        res3 = res3.max((eval(&at_b, r)? - m * m * m).norm());
        sym_res = sym_res.max((eval(spec, -r)? - m).norm());
    }
    Ok(SemistabilityReport {
        res2,
        res3,
        sym_res,
        pass: res2 <= tol && res3 <= tol && sym_res <= tol,
        pair: *pair,
        tol,
        effective_range: (first, last),
    })
}

/// `sup |m(λr) − m(r)²|` over `r ∈ [e⁻³, e³]` for a closed form.
pub fn order_residual(spec: &MultiplierSpec, lambda: Dilation) -> Result<f64> {
    let (alpha, beta) = spec
        .as_closed_form()
        .ok_or_else(|| Error::InvalidInput("order check applies to closed-form symbols".into()))?;
    if alpha == 0.0 && beta != 0.0 {
        return Err(Error::Domain(format!(
            "α = 0 with β = {beta} is a constant phase, not an operator of nonzero order"
        )));
    }
    let squared = combine(&[(spec.clone(), 2)])?;
    let dilated = dilate(spec, lambda)?;
    let band = BandSpec::annulus(DEFAULT_LOG_RANGE.0.exp(), DEFAULT_LOG_RANGE.1.exp())?;
    Ok(band_sup_distance(&dilated, &squared, &band, DEFAULT_POINTS)?.value)
}

/// Whether `T² = T_{2^{1/α}}` holds at the symbol level within `1e−12`.
pub fn check_order(spec: &MultiplierSpec) -> Result<bool> {
    let (alpha, _) = spec
        .as_closed_form()
        .ok_or_else(|| Error::InvalidInput("order check applies to closed-form symbols".into()))?;
    let lambda = if alpha == 0.0 { Dilation::Factor(2.0) } else { Dilation::root(2.0, alpha) };
    Ok(order_residual(spec, lambda)? <= DEFAULT_TOL)
}

/// `‖T²f − T_a f‖ / ‖f‖` with `T_a` built by signal dilation.
pub fn signal_residual(
    spec: &MultiplierSpec,
    pair: &SemistablePair,
    f: &SampledSignal,
    band: &BandSpec,
) -> Result<f64> {
    let twice = apply(spec, &apply(spec, f, band)?, band)?;
    let conj = conjugated_apply(spec, pair.a, f, band)?;
    let norm = f.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(twice.distance(&conj)? / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::spectral::{random_packet_signal, SpatialGrid};

    #[test]
    #[allow(clippy::approx_constant)]
    fn canonical_examples() {
        let p = canonical_pair(2.0).unwrap();
        assert!((p.a - 1.41421356).abs() < 1e-8 && (p.b - 1.73205081).abs() < 1e-8);
        let p = canonical_pair(1.0).unwrap();
        assert_eq!((p.a, p.b), (2.0, 3.0));
        let p = canonical_pair(-1.0).unwrap();
        assert_eq!((p.a, p.b), (0.5, 1.0 / 3.0));
        assert!(matches!(canonical_pair(0.0), Err(Error::Domain(_))));
        assert!(SemistablePair::new(1.0, 2.0).is_err());
    }

    #[test]
    fn semistable_examples() {
        let grid = default_radius_grid();
        let m = MultiplierSpec::closed_form(2.0, 1.0);
        let rep = check_semistable(&m, &canonical_pair(2.0).unwrap(), &grid, DEFAULT_TOL).unwrap();
        assert!(rep.res2 <= 1e-13 && rep.res3 <= 1e-13 && rep.pass, "{rep:?}");

        let any = SemistablePair::new(1.7, 0.4).unwrap();
        let rep = check_semistable(&MultiplierSpec::identity(), &any, &grid, DEFAULT_TOL).unwrap();
        assert_eq!((rep.res2, rep.res3, rep.sym_res), (0.0, 0.0, 0.0));
        assert!(rep.pass);

        // oracle: sup over a dense grid of |e^{0.25 i r²} − 1| on [e⁻³, e³]; 0.25 r² passes π
        let wrong = SemistablePair::new(1.5, 3f64.sqrt()).unwrap();
        let rep = check_semistable(&m, &wrong, &grid, DEFAULT_TOL).unwrap();
        let oracle = log_radius_grid(-3.0, 3.0, 200_000)
            .into_iter()
            .map(|r| (Complex64::from_polar(1.0, 0.25 * r * r) - 1.0).norm())
            .fold(0.0, f64::max);
        assert!((oracle - 2.0).abs() < 1e-6);
        assert!((rep.res2 - 2.0).abs() < 1e-3, "{}", rep.res2);
        assert!(!rep.pass);
    }

    #[test]
    fn sweep_passes_and_perturbation_fails() {
        let grid = default_radius_grid();
        for &alpha in &[-2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0] {
            for &beta in &[-5.0, -1.0, 0.1, 1.0, 7.0] {
                let m = MultiplierSpec::closed_form(alpha, beta);
                let pair = canonical_pair(alpha).unwrap();
                let rep = check_semistable(&m, &pair, &grid, 1e-12).unwrap();
                assert!(rep.pass, "({alpha}, {beta}): {rep:?}");
                let off = SemistablePair::new(pair.a * 1.01, pair.b).unwrap();
                assert!(!check_semistable(&m, &off, &grid, 1e-12).unwrap().pass, "({alpha}, {beta})");
            }
        }
    }

    #[test]
    fn order_examples() {
        assert!(check_order(&MultiplierSpec::closed_form(2.0, 1.0)).unwrap());
        assert!(check_order(&MultiplierSpec::closed_form(0.5, -3.0)).unwrap());
        assert_eq!(
            dilate(&MultiplierSpec::closed_form(0.5, -3.0), 4.0).unwrap(),
            MultiplierSpec::closed_form(0.5, -6.0)
        );
        let r = order_residual(&MultiplierSpec::closed_form(2.0, 1.0), Dilation::Factor(1.4)).unwrap();
        assert!(r > 1e-12);
        assert!(matches!(check_order(&MultiplierSpec::closed_form(0.0, 1.0)), Err(Error::Domain(_))));
        assert!(check_order(&MultiplierSpec::identity()).unwrap());
    }

    #[test]
    fn tabulated_range_is_narrowed() {
        let m = MultiplierSpec::closed_form(1.0, 0.3);
        let tab = MultiplierSpec::Tabulated(m.tabulate(-4.0, 4.0, 4096).unwrap());
        let pair = canonical_pair(1.0).unwrap();
        let rep = check_semistable(&tab, &pair, &default_radius_grid(), 1e-9).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.effective_range.1 <= 4f64.exp() / 3.0 * (1.0 + 1e-12));
        let narrow = MultiplierSpec::Tabulated(m.tabulate(-0.1, 0.1, 64).unwrap());
        assert!(matches!(
            check_semistable(&narrow, &pair, &default_radius_grid(), 1e-9),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn operator_level_agrees() {
        let grid = SpatialGrid::new(4096, 512.0).unwrap();
        let band = BandSpec::new(1.5).unwrap();
        for (seed, &(alpha, beta)) in [(2.0, 1.0), (1.0, -0.7), (0.5, 2.0)].iter().enumerate() {
            let m = MultiplierSpec::closed_form(alpha, beta);
            let f = random_packet_signal(&band, &grid, seed as u64).unwrap();
            let r = signal_residual(&m, &canonical_pair(alpha).unwrap(), &f, &band).unwrap();
            assert!(r <= 1e-7, "({alpha}, {beta}): {r:e}");
        }
    }
}
