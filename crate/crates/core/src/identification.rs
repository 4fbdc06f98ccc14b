//! Recovery of `(α, β)` from a sampled semistable symbol.
//!
//! Pipeline: lift the phase continuously around `r = 1`, read off the branch
//! integers from `φ(ar) − 2φ(r)` and `φ(br) − 3φ(r)`, shift to the branch-free
//! phase `φ₁ = φ + 2πM`, then fit `ln|φ₁(e^s)| = αs + γ`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiplier::TabulatedProfile;
use crate::phase::{cis_product, principal_arg};
use crate::semistability::SemistablePair;

/// Adjacent principal steps at least this close to `π` are ambiguous.
pub const UNWRAP_SLACK: f64 = 1e-3;
/// Largest principal step accepted inside the identification window.
pub const WINDOW_STEP: f64 = FRAC_PI_2;
/// Minimum number of radii at which the branch integers are read.
pub const MIN_BRANCH_POINTS: usize = 100;
/// Allowed distance of a branch ratio from an integer.
pub const BRANCH_DEVIATION: f64 = 0.01;
/// Minimum number of full mollifier windows for the affine fit.
pub const MIN_FIT_WINDOWS: usize = 16;
/// `|φ₁|` at or below this is treated as zero.
pub const ZERO_PHASE: f64 = 1e-12;

/// Continuous phase on a uniform `s = ln r` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTrace {
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
    pub base_index: usize,
}

impl PhaseTrace {
    /// Linear interpolation of `φ` at `s`, `None` outside the trace.
    pub fn phase_at(&self, s: f64) -> Option<f64> {
        let n = self.s.len();
        if n < 2 {
            return None;
        }
        let ds = (self.s[n - 1] - self.s[0]) / (n - 1) as f64;
        let t = (s - self.s[0]) / ds;
        if !(t >= -1e-9 && t <= (n - 1) as f64 + 1e-9) {
            return None;
        }
        let t = t.clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let u = t - i as f64;
        Some(self.phi[i] + u * (self.phi[i + 1] - self.phi[i]))
    }
}

/// Continuous lift of unit-modulus `values` sampled on the increasing grid `s`.
///
/// The lift is pinned at the sample nearest `s = 0` to the branch of
/// `base_value`; every other phase is its sample's principal argument plus
/// the multiple of 2π closest to the neighbour's phase plus the principal
/// step, so rounding does not accumulate along the trace.
pub fn unwrap_phase(s: &[f64], values: &[Complex64], base_value: f64) -> Result<PhaseTrace> {
    if s.len() != values.len() || s.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} grid points but {} values",
            s.len(),
            values.len()
        )));
    }
    if !base_value.is_finite() {
        return Err(Error::InvalidInput("base value must be finite".into()));
    }
    if let Some(k) = s.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!("s grid not increasing at index {}", k + 1)));
    }
    if let Some(k) = values.iter().position(|v| (v.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidInput(format!("|value| = {} at index {k} is not 1", values[k].norm())));
    }
    let base_index = s
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);

    let n = values.len();
    let mut phi = vec![0.0; n];
    let a0 = principal_arg(values[base_index]);
    phi[base_index] = a0 + TAU * ((base_value - a0) / TAU).round();

    let step = |from: usize, to: usize, phi: &mut [f64]| -> Result<()> {
        let d = principal_arg(values[to] * values[from].conj());
        if d.abs() >= PI - UNWRAP_SLACK {
            return Err(Error::UnwrapResolution { index: to, step: d });
        }
        let a = principal_arg(values[to]);
        let predicted = phi[from] + d;
        phi[to] = a + TAU * ((predicted - a) / TAU).round();
        Ok(())
    };
    for k in base_index + 1..n {
        step(k - 1, k, &mut phi)?;
    }
    for k in (0..base_index).rev() {
        step(k + 1, k, &mut phi)?;
    }
    Ok(PhaseTrace { s: s.to_vec(), phi, base_index })
}

/// Branch integers `M = (φ(ar) − 2φ(r))/2π` and `N = (φ(br) − 3φ(r))/2π`,
/// which must be constant along the trace and satisfy `N = 2M`.
pub fn branch_integers(trace: &PhaseTrace, pair: &SemistablePair) -> Result<(i64, i64)> {
    let (la, lb) = (pair.a.ln(), pair.b.ln());
    let mut m_vals = Vec::new();
    let mut n_vals = Vec::new();
    for (&s, &phi) in trace.s.iter().zip(&trace.phi) {
        if let (Some(pa), Some(pb)) = (trace.phase_at(s + la), trace.phase_at(s + lb)) {
            m_vals.push((pa - 2.0 * phi) / TAU);
            n_vals.push((pb - 3.0 * phi) / TAU);
        }
    }
    if m_vals.len() < MIN_BRANCH_POINTS {
        return Err(Error::InsufficientData(format!(
            "only {} radii r have a·r and b·r on the trace; need {MIN_BRANCH_POINTS}",
            m_vals.len()
        )));
    }
    let m = constant_integer(&m_vals, "M")?;
    let n = constant_integer(&n_vals, "N")?;
    if n != 2 * m {
        return Err(Error::SemistabilityViolation { n, twice_m: 2 * m });
    }
    Ok((m, n))
}

fn constant_integer(vals: &[f64], name: &str) -> Result<i64> {
    let first = vals[0].round();
    for (k, &v) in vals.iter().enumerate() {
        let dev = (v - v.round()).abs();
        if v.round() != first || dev > BRANCH_DEVIATION {
            return Err(Error::InconsistentBranch(format!(
                "{name} ratio is {v:.6} at test point {k}, expected the integer {first}"
            )));
        }
    }
    Ok(first as i64)
}

/// Least-squares line through the moving averages of `psi` over windows of
/// half-width `delta` (trapezoidal weights). Returns `(slope, intercept,
/// max deviation of the averages from the line)`.
pub fn mollified_affine_fit(s: &[f64], psi: &[f64], delta: f64) -> Result<(f64, f64, f64)> {
    weighted_mollified_affine_fit(s, psi, &vec![1.0; psi.len()], delta)
}

/// As [`mollified_affine_fit`], with the window centred on sample `k`
/// weighted by `weights[k]` in the regression.
pub fn weighted_mollified_affine_fit(
    s: &[f64],
    psi: &[f64],
    weights: &[f64],
    delta: f64,
) -> Result<(f64, f64, f64)> {
    if s.len() != psi.len() || s.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} grid points, {} values and {} weights",
            s.len(),
            psi.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidInput("fit weights must be finite and non-negative".into()));
    }
    let n = s.len();
    if n < MIN_FIT_WINDOWS {
        return Err(Error::InsufficientData(format!("{n} samples; need at least {MIN_FIT_WINDOWS}")));
    }
    let ds = (s[n - 1] - s[0]) / (n - 1) as f64;
    if !(delta.is_finite() && delta >= ds * (1.0 - 1e-9)) {
        return Err(Error::InvalidInput(format!("mollifier half-width {delta} is below the spacing {ds}")));
    }
    let h = ((delta / ds).round() as usize).max(1);
    if n < 2 * h + MIN_FIT_WINDOWS {
        return Err(Error::InsufficientData(format!(
            "{} full windows of half-width {h} samples; need {MIN_FIT_WINDOWS}",
            n.saturating_sub(2 * h)
        )));
    }
    let centres = &s[h..n - h];
    let w = &weights[h..n - h];
    let averages: Vec<f64> = (h..n - h)
        .map(|k| {
            let win = &psi[k - h..=k + h];
            let inner: f64 = win[1..win.len() - 1].iter().sum();
            (inner + 0.5 * (win[0] + win[win.len() - 1])) / (2 * h) as f64
        })
        .collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InsufficientData("all fit weights vanish".into()));
    }
    let s_mean = centres.iter().zip(w).map(|(x, w)| w * x).sum::<f64>() / total;
    let p_mean = averages.iter().zip(w).map(|(y, w)| w * y).sum::<f64>() / total;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for ((x, y), wk) in centres.iter().zip(&averages).zip(w) {
        sxy += wk * (x - s_mean) * (y - p_mean);
        sxx += wk * (x - s_mean) * (x - s_mean);
    }
    let slope = sxy / sxx;
    let intercept = p_mean - slope * s_mean;
    let residual = centres
        .iter()
        .zip(&averages)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, residual))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifyOptions {
    /// Identity threshold on `sup |m̃ − 1|` and reconstruction tolerance.
    pub tol: f64,
    /// Tolerance on `|a^α − 2|` and `|b^α − 3|`.
    pub pair_tol: f64,
    /// Mollifier half-width in grid spacings.
    pub delta_spacings: f64,
    /// Whole turns added to the base branch at `r = 1`.
    pub base_turns: i64,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        Self { tol: 1e-9, pair_tol: 1e-6, delta_spacings: 8.0, base_turns: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationResult {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "M")]
    pub m: i64,
    #[serde(rename = "N")]
    pub n: i64,
    /// `ln|β|`; absent for the identity.
    pub gamma: Option<f64>,
    pub fit_residual: f64,
    /// `(|a^α − 2|, |b^α − 3|)`; absent for the identity.
    pub pair_residuals: Option<(f64, f64)>,
    pub is_identity: bool,
    /// Radii `[r_lo, r_hi]` on which the samples resolve the phase.
    pub window: (f64, f64),
    /// `sup |e^{iβr^α} − m̃(r)|` over the window.
    pub reconstruction_residual: f64,
}

pub fn identify(profile: &TabulatedProfile, pair: &SemistablePair, tol: f64) -> Result<IdentificationResult> {
    identify_with(profile, pair, IdentifyOptions { tol, ..IdentifyOptions::default() })
}

/// Indices `[lo, hi]` around `s = 0` over which every principal step stays
/// below [`WINDOW_STEP`]; beyond it the tabulation under-samples the phase.
fn resolvable_window(profile: &TabulatedProfile) -> (usize, usize) {
    let values = profile.values();
    let n = values.len();
    let centre = ((-profile.log_start() / profile.log_step()).round().max(0.0) as usize).min(n - 1);
    let ok = |k: usize| principal_arg(values[k + 1] * values[k].conj()).abs() <= WINDOW_STEP;
    let mut hi = centre;
    while hi + 1 < n && ok(hi) {
        hi += 1;
    }
    let mut lo = centre;
    while lo > 0 && ok(lo - 1) {
        lo -= 1;
    }
    (lo, hi)
}

pub fn identify_with(
    profile: &TabulatedProfile,
    pair: &SemistablePair,
    options: IdentifyOptions,
) -> Result<IdentificationResult> {
    let values = profile.values();
    let one = Complex64::new(1.0, 0.0);
    let (r_lo, r_hi) = profile.radial_range();
    if values.iter().all(|v| (v - one).norm() <= options.tol) {
        let reconstruction_residual = values.iter().map(|v| (v - one).norm()).fold(0.0, f64::max);
        return Ok(IdentificationResult {
            alpha: 0.0,
            beta: 0.0,
            m: 0,
            n: 0,
            gamma: None,
            fit_residual: 0.0,
            pair_residuals: None,
            is_identity: true,
            window: (r_lo, r_hi),
            reconstruction_residual,
        });
    }

    let (lo, hi) = resolvable_window(profile);
    let s: Vec<f64> = (lo..=hi).map(|k| profile.log_radius(k)).collect();
    let window_values = &values[lo..=hi];
    let base = s
        .iter()
        .zip(window_values)
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .map(|(_, v)| principal_arg(*v))
        .unwrap_or(0.0);
    let trace = unwrap_phase(&s, window_values, base + TAU * options.base_turns as f64)?;
    let (m, n) = branch_integers(&trace, pair)?;

    let phi1: Vec<f64> = trace.phi.iter().map(|p| p + TAU * m as f64).collect();
    let mut first = 0;
    let mut last = phi1.len();
    while first < last && phi1[first].abs() <= ZERO_PHASE {
        first += 1;
    }
    while last > first && phi1[last - 1].abs() <= ZERO_PHASE {
        last -= 1;
    }
    let core = &phi1[first..last];
    if core.is_empty() {
        return Err(Error::DegenerateSymbol(
            "the branch-free phase vanishes on the whole window but the symbol is not 1".into(),
        ));
    }
    let sign = core[0].signum();
    if let Some(k) = core.iter().position(|p| p.abs() <= ZERO_PHASE || p.signum() != sign) {
        return Err(Error::DegenerateSymbol(format!(
            "the branch-free phase changes sign or vanishes at r = {:.6e}",
            s[first + k].exp()
        )));
    }
    let psi: Vec<f64> = core.iter().map(|p| p.abs().ln()).collect();
    // ψ = ln|φ₁| inherits an absolute phase error ε as ε/|φ₁|, so windows
    // where the phase is tiny are weighted down by φ₁².
    let weights: Vec<f64> = core.iter().map(|p| p * p).collect();
    let delta = options.delta_spacings * profile.log_step();
    let (alpha, gamma, fit_residual) = weighted_mollified_affine_fit(&s[first..last], &psi, &weights, delta)?;
    let beta = sign * gamma.exp();

    let pair_residuals = ((pair.a.powf(alpha) - 2.0).abs(), (pair.b.powf(alpha) - 3.0).abs());
    if pair_residuals.0 > options.pair_tol || pair_residuals.1 > options.pair_tol {
        return Err(Error::InconsistentPair(format!(
            "|a^α − 2| = {:.3e}, |b^α − 3| = {:.3e} with α = {alpha}",
            pair_residuals.0, pair_residuals.1
        )));
    }

    let reconstruction_residual = s
        .iter()
        .zip(window_values)
        .map(|(sk, v)| (cis_product(beta, (alpha * sk).exp()) - v).norm())
        .fold(0.0, f64::max);
    if reconstruction_residual > options.tol {
        return Err(Error::ModelMismatch(format!(
            "e^{{iβr^α}} with α = {alpha}, β = {beta} misses the samples by {reconstruction_residual:.3e}"
        )));
    }
    Ok(IdentificationResult {
        alpha,
        beta,
        m,
        n,
        gamma: Some(gamma),
        fit_residual,
        pair_residuals: Some(pair_residuals),
        is_identity: false,
        window: (s[0].exp(), s[s.len() - 1].exp()),
        reconstruction_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::MultiplierSpec;
    use crate::semistability::canonical_pair;
    use rand::{Rng, SeedableRng};

    fn grid(s0: f64, s1: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| s0 + (s1 - s0) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn unwrap_examples() {
        let s = grid(-5.0, 5.0, 101);
        let v: Vec<Complex64> = (0..101).map(|k| Complex64::from_polar(1.0, 0.1 * k as f64)).collect();
        // base sample is k = 50 with phase 5.0; its principal branch is 5 − 2π
        let t = unwrap_phase(&s, &v, 5.0).unwrap();
        for (k, p) in t.phi.iter().enumerate() {
            assert!((p - 0.1 * k as f64).abs() < 1e-12);
        }
        let t = unwrap_phase(&s, &vec![Complex64::new(1.0, 0.0); 101], 0.0).unwrap();
        assert!(t.phi.iter().all(|&p| p == 0.0));

        let s = grid(0.0, 1.0, 2048);
        let v: Vec<Complex64> = s.iter().map(|x| Complex64::from_polar(1.0, 7.0 * x.exp())).collect();
        let t = unwrap_phase(&s, &v, 7.0 - TAU).unwrap();
        assert_eq!(t.base_index, 0);
        for (x, p) in s.iter().zip(&t.phi) {
            assert!((p - (7.0 * x.exp() - TAU)).abs() < 1e-12);
        }
    }

    #[test]
    fn unwrap_reports_jumps() {
        let s = grid(0.0, 1.0, 8);
        let mut v = vec![Complex64::new(1.0, 0.0); 8];
        v[5] = Complex64::new(-1.0, 0.0);
        match unwrap_phase(&s, &v, 0.0) {
            Err(Error::UnwrapResolution { index, .. }) => assert_eq!(index, 5),
            other => panic!("{other:?}"),
        }
    }

    fn trace_of(alpha: f64, beta: f64, base: f64) -> PhaseTrace {
        let s = grid(-3.0, 3.0, 4096);
        let v: Vec<Complex64> = s.iter().map(|x| cis_product(beta, (alpha * x).exp())).collect();
        unwrap_phase(&s, &v, base).unwrap()
    }

    #[test]
    fn branch_examples() {
        let pair = SemistablePair::new(4.0, 9.0).unwrap();
        assert_eq!(branch_integers(&trace_of(0.5, 1.5, 1.5), &pair).unwrap(), (0, 0));

        let s = grid(-1.0, 2.5, 4096);
        let v: Vec<Complex64> = s.iter().map(|x| cis_product(7.0, x.exp())).collect();
        let t = unwrap_phase(&s, &v, 7.0 - TAU).unwrap();
        assert_eq!(branch_integers(&t, &SemistablePair::new(2.0, 3.0).unwrap()).unwrap(), (1, 2));

        let flat = trace_of(1.0, 0.0, 0.0);
        assert_eq!(branch_integers(&flat, &SemistablePair::new(1.3, 2.2).unwrap()).unwrap(), (0, 0));

        let wrong = SemistablePair::new(1.5, 3f64.sqrt()).unwrap();
        assert!(matches!(
            branch_integers(&trace_of(2.0, 1.0, 1.0), &wrong),
            Err(Error::InconsistentBranch(_))
        ));
    }

    #[test]
    fn fit_examples() {
        let s = grid(-2.0, 2.0, 400);
        let ds = s[1] - s[0];
        let line: Vec<f64> = s.iter().map(|x| 2.0 * x + 0.3).collect();
        let (a, g, res) = mollified_affine_fit(&s, &line, 8.0 * ds).unwrap();
        assert!((a - 2.0).abs() < 1e-13 && (g - 0.3).abs() < 1e-13 && res <= 1e-14);

        let flat = vec![5.0; 400];
        let (a, g, _) = mollified_affine_fit(&s, &flat, 8.0 * ds).unwrap();
        assert!(a.abs() < 1e-15 && (g - 5.0).abs() < 1e-14);

        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
        let noisy: Vec<f64> = line.iter().map(|y| y + rng.random_range(-1e-8..1e-8)).collect();
        let (a, g, _) = mollified_affine_fit(&s, &noisy, 8.0 * ds).unwrap();
        assert!((a - 2.0).abs() < 1e-6 && (g - 0.3).abs() < 1e-6);

        assert!(matches!(
            mollified_affine_fit(&s[..20], &line[..20], 8.0 * ds),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn weights_suppress_noisy_samples() {
        let s = grid(-3.0, 3.0, 601);
        let ds = s[1] - s[0];
        // the left half carries 1e-3 noise; zero weight on every window touching it
        // recovers the clean line
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
        let psi: Vec<f64> =
            s.iter().map(|&x| 2.0 * x + 0.3 + if x < 0.0 { rng.random_range(-1e-3..1e-3) } else { 0.0 }).collect();
        let w: Vec<f64> = s.iter().map(|&x| if x < 0.1 { 0.0 } else { 1.0 }).collect();
        let (a, g, _) = weighted_mollified_affine_fit(&s, &psi, &w, 8.0 * ds).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (g - 0.3).abs() < 1e-12, "{a} {g}");
        let (a, _, _) = mollified_affine_fit(&s, &psi, 8.0 * ds).unwrap();
        assert!((a - 2.0).abs() > 1e-9);
        assert!(weighted_mollified_affine_fit(&s, &psi, &vec![0.0; s.len()], 8.0 * ds).is_err());
        assert!(weighted_mollified_affine_fit(&s, &psi, &w[1..], 8.0 * ds).is_err());
    }

    fn table(alpha: f64, beta: f64, n: usize) -> TabulatedProfile {
        MultiplierSpec::closed_form(alpha, beta).tabulate(-6.0, 6.0, n).unwrap()
    }

    #[test]
    fn identify_examples() {
        let pair = SemistablePair::new(4.0, 9.0).unwrap();
        let r = identify(&table(0.5, 1.5, 4096), &pair, 1e-9).unwrap();
        assert!((r.alpha - 0.5).abs() < 1e-8 && (r.beta - 1.5).abs() < 1e-8, "{r:?}");
        assert_eq!((r.m, r.n), (0, 0));

        let r = identify(&table(0.0, 0.0, 4096), &pair, 1e-9).unwrap();
        assert!(r.is_identity && r.alpha == 0.0 && r.beta == 0.0);

        let r = identify(&table(1.0, 7.0, 4096), &SemistablePair::new(2.0, 3.0).unwrap(), 1e-9).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-8 && (r.beta - 7.0).abs() < 1e-8, "{r:?}");
        assert_eq!((r.m, r.n), (1, 2));
    }

    #[test]
    fn wrong_pair_is_rejected() {
        let wrong = SemistablePair::new(1.5, 3f64.sqrt()).unwrap();
        let err = identify(&table(2.0, 1.0, 4096), &wrong, 1e-9).unwrap_err();
        assert!(matches!(err, Error::InconsistentBranch(_)), "{err}");
    }

    #[test]
    fn branch_shift_is_absorbed() {
        let t = table(1.5, -3.7, 4096);
        let pair = canonical_pair(1.5).unwrap();
        let a = identify(&t, &pair, 1e-9).unwrap();
        for turns in [-2, 1, 3] {
            let options = IdentifyOptions { base_turns: turns, ..IdentifyOptions::default() };
            let b = identify_with(&t, &pair, options).unwrap();
            assert!((a.alpha - b.alpha).abs() <= 1e-9 && (a.beta - b.beta).abs() <= 1e-9);
            assert_eq!(b.m, a.m - turns);
        }
    }

    #[test]
    fn sign_change_is_degenerate() {
        // phase 1e-8·(r − 1): branch integers are 0 but the phase crosses zero at r = 1
        let s = grid(-3.0, 3.0, 2048);
        let r: Vec<f64> = s.iter().map(|x| x.exp()).collect();
        let v: Vec<Complex64> = r.iter().map(|x| Complex64::from_polar(1.0, 1e-8 * (x - 1.0))).collect();
        let t = TabulatedProfile::new(&r, &v).unwrap();
        let err = identify(&t, &SemistablePair::new(2.0, 3.0).unwrap(), 1e-9).unwrap_err();
        assert!(matches!(err, Error::DegenerateSymbol(_)), "{err}");
    }
}
