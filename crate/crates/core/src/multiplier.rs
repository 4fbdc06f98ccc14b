//! Unimodular radial Fourier symbols `m(ξ) = m̃(|ξ|)`.
//!
//! A symbol is either the closed form `e^{iβ|ξ|^α}` or a profile tabulated on
//! a log-uniform radius grid. Tabulated profiles are interpolated on their
//! unwrapped phase (cubic Lagrange in `s = ln r`) and re-exponentiated, so the
//! interpolant stays on the unit circle.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::{cis_product, cis_sum, principal_arg};
use crate::spectral::BandSpec;

/// Tolerance on `|value| − 1` accepted when building a tabulated profile.
pub const MODULUS_TOL: f64 = 1e-9;
/// Relative tolerance on the uniformity of `ln r` spacing.
pub const LOG_SPACING_TOL: f64 = 1e-9;
/// Golden-section stopping width (in `ln r`) for sup-distance refinement.
pub const SUP_REFINE_TOL: f64 = 1e-10;
/// Minimum number of dense samples for [`band_sup_distance`].
pub const MIN_SUP_SAMPLES: usize = 1024;

/// Anything that can be evaluated as a radial Fourier symbol.
pub trait Symbol: Sync {
    fn eval(&self, xi: f64) -> Result<Complex64>;

    /// Closed interval of radii on which [`Symbol::eval`] is defined.
    fn radial_domain(&self) -> (f64, f64);
}

/// A positive dilation factor. `Root { base, order }` is `base^{1/order}` kept
/// in exact form so that `λ^α` with `α = order` is exactly `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Dilation {
    Factor(f64),
    Root { base: f64, order: f64 },
}

impl Dilation {
    pub fn root(base: f64, order: f64) -> Self {
        Dilation::Root { base, order }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Dilation::Factor(l) => l,
            Dilation::Root { base, order } => base.powf(1.0 / order),
        }
    }

    pub fn ln(&self) -> f64 {
        match *self {
            Dilation::Factor(l) => l.ln(),
            Dilation::Root { base, order } => base.ln() / order,
        }
    }

    /// `λ^α`.
    pub fn pow(&self, alpha: f64) -> f64 {
        match *self {
            Dilation::Factor(l) => l.powf(alpha),
            Dilation::Root { base, order } => base.powf(alpha / order),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Dilation::Factor(l) => l.is_finite() && l > 0.0,
            Dilation::Root { base, order } => {
                base.is_finite() && base > 0.0 && order.is_finite() && order != 0.0
            }
        };
        let v = self.value();
        if ok && v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("dilation factor must be positive and finite, got {self:?}")))
        }
    }
}

impl From<f64> for Dilation {
    fn from(l: f64) -> Self {
        Dilation::Factor(l)
    }
}

/// Radial profile sampled at `r_k = e^{s0 + k·ds}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedProfile {
    s0: f64,
    ds: f64,
    values: Vec<Complex64>,
    #[serde(skip)]
    phase: Vec<f64>,
}

impl TabulatedProfile {
    /// Builds a profile from strictly increasing, log-uniform radii and
    /// unit-modulus values (each within [`MODULUS_TOL`]; renormalised).
    pub fn new(r: &[f64], values: &[Complex64]) -> Result<Self> {
        if r.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} radii but {} values",
                r.len(),
                values.len()
            )));
        }
        if r.len() < 4 {
            return Err(Error::InvalidInput("a tabulated profile needs at least 4 samples".into()));
        }
        if let Some(k) = r.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidInput(format!("radius {k} is not positive and finite")));
        }
        if let Some(k) = r.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!("radii not strictly increasing at row {}", k + 1)));
        }
        let logs: Vec<f64> = r.iter().map(|x| x.ln()).collect();
        let n = logs.len();
        let ds = (logs[n - 1] - logs[0]) / (n - 1) as f64;
        for (k, w) in logs.windows(2).enumerate() {
            let step = w[1] - w[0];
            if (step - ds).abs() > LOG_SPACING_TOL * ds {
                return Err(Error::InvalidInput(format!(
                    "radii are not log-uniform at row {}: step {step} vs mean {ds}",
                    k + 1
                )));
            }
        }
        let mut unit = Vec::with_capacity(n);
        for (k, v) in values.iter().enumerate() {
            let m = v.norm();
            if !m.is_finite() || (m - 1.0).abs() > MODULUS_TOL {
                return Err(Error::InvalidInput(format!("|value| = {m} at row {k} is not 1")));
            }
            unit.push(v / m);
        }
        Ok(Self::from_parts(logs[0], ds, unit))
    }

    fn from_parts(s0: f64, ds: f64, values: Vec<Complex64>) -> Self {
        let phase = continuous_phase(&values);
        Self { s0, ds, values, phase }
    }

    /// Tabulates `symbol` at `n` log-uniform radii spanning `[e^{s_min}, e^{s_max}]`.
    pub fn sample(symbol: &dyn Symbol, s_min: f64, s_max: f64, n: usize) -> Result<Self> {
        if n < 4 || !(s_max > s_min) {
            return Err(Error::InvalidInput(format!(
                "cannot tabulate {n} points on [{s_min}, {s_max}]"
            )));
        }
        let ds = (s_max - s_min) / (n - 1) as f64;
        let values = (0..n)
            .map(|k| symbol.eval((s_min + k as f64 * ds).exp()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(s_min, ds, values))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn log_start(&self) -> f64 {
        self.s0
    }

    pub fn log_step(&self) -> f64 {
        self.ds
    }

    pub fn log_radius(&self, k: usize) -> f64 {
        self.s0 + k as f64 * self.ds
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.log_radius(k).exp()).collect()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Phase lift with principal steps between neighbours, anchored at the
    /// principal argument of the first sample.
    pub fn sample_phases(&self) -> &[f64] {
        &self.phase
    }

    pub fn radial_range(&self) -> (f64, f64) {
        (self.s0.exp(), self.log_radius(self.len() - 1).exp())
    }

    /// Interpolated phase at radius `r`, continuous with [`Self::sample_phases`].
    pub fn phase_at(&self, r: f64) -> Result<f64> {
        let n = self.len();
        let t = (r.ln() - self.s0) / self.ds;
        let slack = 1e-9;
        if !(t >= -slack && t <= (n - 1) as f64 + slack) {
            let (lo, hi) = self.radial_range();
            return Err(Error::Range(format!(
                "radius {r} outside tabulated range [{lo}, {hi}]"
            )));
        }
        let t = t.clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).clamp(1, n - 3);
        let u = t - i as f64;
        let p = &self.phase[i - 1..i + 3];
        let w = [
            -u * (u - 1.0) * (u - 2.0) / 6.0,
            (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
            -(u + 1.0) * u * (u - 2.0) / 2.0,
            (u + 1.0) * u * (u - 1.0) / 6.0,
        ];
        // Interpolate the offsets from p[1] to keep the large common part exact.
        let base = p[1];
        let delta: f64 = w.iter().zip(p).map(|(wk, pk)| wk * (pk - base)).sum();
        Ok(base + delta)
    }

    fn shifted(&self, log_shift: f64) -> Self {
        Self {
            s0: self.s0 - log_shift,
            ds: self.ds,
            values: self.values.clone(),
            phase: self.phase.clone(),
        }
    }

    /// Sign-flips one sample; used to build discontinuous test profiles.
    pub fn with_negated_sample(&self, k: usize) -> Self {
        let mut values = self.values.clone();
        values[k] = -values[k];
        Self::from_parts(self.s0, self.ds, values)
    }
}

/// Anchored phase lift: each phase is the principal argument of its sample
/// plus the multiple of 2π closest to the previous phase plus the principal step.
fn continuous_phase(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<(f64, Complex64)> = None;
    for &v in values {
        let a = principal_arg(v);
        let p = match prev {
            None => a,
            Some((pp, pv)) => {
                let predicted = pp + principal_arg(v * pv.conj());
                a + std::f64::consts::TAU * ((predicted - a) / std::f64::consts::TAU).round()
            }
        };
        out.push(p);
        prev = Some((p, v));
    }
    out
}

/// A radial symbol: closed form `e^{iβ|ξ|^α}` or a tabulated profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    ClosedForm { alpha: f64, beta: f64 },
    Tabulated(TabulatedProfile),
}

impl MultiplierSpec {
    pub fn closed_form(alpha: f64, beta: f64) -> Self {
        MultiplierSpec::ClosedForm { alpha, beta }
    }

    /// The constant symbol `1`.
    pub fn identity() -> Self {
        MultiplierSpec::ClosedForm { alpha: 0.0, beta: 0.0 }
    }

    pub fn as_closed_form(&self) -> Option<(f64, f64)> {
        match *self {
            MultiplierSpec::ClosedForm { alpha, beta } => Some((alpha, beta)),
            MultiplierSpec::Tabulated(_) => None,
        }
    }

    pub fn tabulate(&self, s_min: f64, s_max: f64, n: usize) -> Result<TabulatedProfile> {
        TabulatedProfile::sample(self, s_min, s_max, n)
    }

    /// Phase of the symbol at radius `r > 0` (any continuous branch).
    pub fn phase_at(&self, r: f64) -> Result<f64> {
        match self {
            MultiplierSpec::ClosedForm { alpha, beta } => Ok(beta * closed_form_power(*alpha, r)?),
            MultiplierSpec::Tabulated(t) => t.phase_at(r),
        }
    }

    /// Upper bound on `|dφ/d ln r|` over `[lo, hi]`, used to scale the
    /// continuity threshold. Tabulated profiles use a median-filtered finite
    /// difference so isolated jumps do not inflate the bound.
    pub fn log_slope_bound(&self, lo: f64, hi: f64) -> f64 {
        match self {
            MultiplierSpec::ClosedForm { alpha, beta } => {
                (alpha * beta).abs() * lo.powf(*alpha).max(hi.powf(*alpha))
            }
            MultiplierSpec::Tabulated(t) => {
                let steps: Vec<f64> = t
                    .phase
                    .windows(2)
                    .enumerate()
                    .filter(|(k, _)| {
                        let r = t.log_radius(*k).exp();
                        r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)
                    })
                    .map(|(_, w)| (w[1] - w[0]).abs() / t.ds)
                    .collect();
                median_filter_max(&steps, 5)
            }
        }
    }
}

fn median_filter_max(xs: &[f64], width: usize) -> f64 {
    if xs.len() < width {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        return v.get(v.len() / 2).copied().unwrap_or(0.0);
    }
    xs.windows(width)
        .map(|w| {
            let mut v = w.to_vec();
            v.sort_by(f64::total_cmp);
            v[width / 2]
        })
        .fold(0.0, f64::max)
}

fn closed_form_power(alpha: f64, r: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(1.0);
    }
    if r == 0.0 && alpha < 0.0 {
        return Err(Error::Domain(format!("|ξ|^α is singular at ξ = 0 for α = {alpha}")));
    }
    let p = r.powf(alpha);
    if !p.is_finite() {
        return Err(Error::Domain(format!("|ξ|^α overflows at |ξ| = {r}, α = {alpha}")));
    }
    Ok(p)
}

impl Symbol for MultiplierSpec {
    fn eval(&self, xi: f64) -> Result<Complex64> {
        eval(self, xi)
    }

    fn radial_domain(&self) -> (f64, f64) {
        match self {
            MultiplierSpec::ClosedForm { .. } => (0.0, f64::INFINITY),
            MultiplierSpec::Tabulated(t) => t.radial_range(),
        }
    }
}

/// `m(ξ)`; radial by construction so `eval(spec, −ξ) == eval(spec, ξ)`.
pub fn eval(spec: &MultiplierSpec, xi: f64) -> Result<Complex64> {
    if !xi.is_finite() {
        return Err(Error::Domain(format!("frequency {xi} is not finite")));
    }
    let r = xi.abs();
    match spec {
        MultiplierSpec::ClosedForm { alpha, beta } => Ok(cis_product(*beta, closed_form_power(*alpha, r)?)),
        MultiplierSpec::Tabulated(t) => Ok(cis_sum(t.phase_at(r)?, 0.0)),
    }
}

/// The symbol `ξ ↦ m(λξ)` of the conjugated operator `T_λ`.
pub fn dilate(spec: &MultiplierSpec, lambda: impl Into<Dilation>) -> Result<MultiplierSpec> {
    let lambda = lambda.into();
    lambda.validate()?;
    Ok(match spec {
        MultiplierSpec::ClosedForm { alpha, beta } => MultiplierSpec::ClosedForm {
            alpha: *alpha,
            beta: beta * lambda.pow(*alpha),
        },
        MultiplierSpec::Tabulated(t) => MultiplierSpec::Tabulated(t.shifted(lambda.ln())),
    })
}

/// Pointwise product `∏ m_j(ξ)^{p_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedSymbol {
    terms: Vec<(MultiplierSpec, i32)>,
    domain: (f64, f64),
}

impl CombinedSymbol {
    pub fn terms(&self) -> &[(MultiplierSpec, i32)] {
        &self.terms
    }

    /// The product as a single symbol when it reduces to one closed form.
    pub fn as_spec(&self) -> Option<MultiplierSpec> {
        match self.terms.as_slice() {
            [] => Some(MultiplierSpec::identity()),
            [(spec @ MultiplierSpec::ClosedForm { .. }, 1)] => Some(spec.clone()),
            _ => None,
        }
    }
}

impl Symbol for CombinedSymbol {
    fn eval(&self, xi: f64) -> Result<Complex64> {
        let r = xi.abs();
        if r < self.domain.0 || r > self.domain.1 {
            return Err(Error::Range(format!(
                "radius {r} outside the common range [{}, {}]",
                self.domain.0, self.domain.1
            )));
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for (spec, p) in &self.terms {
            let z = match spec {
                MultiplierSpec::ClosedForm { alpha, beta } => {
                    cis_product(*beta * *p as f64, closed_form_power(*alpha, r)?)
                }
                MultiplierSpec::Tabulated(t) => cis_sum(t.phase_at(r)? * *p as f64, 0.0),
            };
            acc *= z;
        }
        Ok(acc)
    }

    fn radial_domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// Product of integer powers of symbols. Closed forms sharing an exponent are
/// merged exactly into one coefficient.
pub fn combine(specs: &[(MultiplierSpec, i32)]) -> Result<CombinedSymbol> {
    let mut closed: Vec<(f64, f64)> = Vec::new();
    let mut tabulated: Vec<(MultiplierSpec, i32)> = Vec::new();
    let mut domain = (0.0f64, f64::INFINITY);
    for (spec, p) in specs {
        if *p == 0 {
            continue;
        }
        match spec {
            MultiplierSpec::ClosedForm { alpha, beta } => {
                let c = beta * *p as f64;
                match closed.iter_mut().find(|(a, _)| a.to_bits() == alpha.to_bits()) {
                    Some((_, b)) => *b += c,
                    None => closed.push((*alpha, c)),
                }
            }
            MultiplierSpec::Tabulated(t) => {
                let (lo, hi) = t.radial_range();
                domain = (domain.0.max(lo), domain.1.min(hi));
                tabulated.push((spec.clone(), *p));
            }
        }
    }
    if domain.0 > domain.1 {
        return Err(Error::Range(format!(
            "tabulated ranges do not overlap (common range would be [{}, {}])",
            domain.0, domain.1
        )));
    }
    let mut terms: Vec<(MultiplierSpec, i32)> = closed
        .into_iter()
        .filter(|&(_, b)| b != 0.0)
        .map(|(alpha, beta)| (MultiplierSpec::ClosedForm { alpha, beta }, 1))
        .collect();
    terms.extend(tabulated);
    Ok(CombinedSymbol { terms, domain })
}

/// Result of a band-restricted sup-distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupDistance {
    pub value: f64,
    /// Radius at which the supremum is attained.
    pub argmax: f64,
}

fn ensure_domain(symbol: &dyn Symbol, lo: f64, hi: f64) -> Result<()> {
    let (dlo, dhi) = symbol.radial_domain();
    let slack = 1e-12;
    if lo < dlo * (1.0 - slack) || hi > dhi * (1.0 + slack) {
        return Err(Error::Range(format!(
            "band [{lo}, {hi}] is not inside the symbol's radial range [{dlo}, {dhi}]"
        )));
    }
    Ok(())
}

/// `sup_{R⁻¹ ≤ r ≤ R} |m1(r) − m2(r)|`, which is the operator norm of
/// `T[m1] − T[m2]` restricted to band-limited inputs.
///
/// Evaluated on `samples` log-uniform radii, then the strongest local maxima
/// are refined by golden-section search to [`SUP_REFINE_TOL`].
pub fn band_sup_distance(
    m1: &dyn Symbol,
    m2: &dyn Symbol,
    band: &BandSpec,
    samples: usize,
) -> Result<SupDistance> {
    if samples < MIN_SUP_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "sup distance needs at least {MIN_SUP_SAMPLES} samples, got {samples}"
        )));
    }
    let (lo, hi) = (band.lower(), band.upper());
    ensure_domain(m1, lo, hi)?;
    ensure_domain(m2, lo, hi)?;
    let (s_lo, s_hi) = (lo.ln(), hi.ln());
    let h = (s_hi - s_lo) / (samples - 1) as f64;
    let radius = |s: f64| s.exp().clamp(lo, hi);
    let gap = |s: f64| -> Result<f64> {
        let r = radius(s);
        Ok((m1.eval(r)? - m2.eval(r)?).norm())
    };
    let dense = (0..samples)
        .map(|k| gap(s_lo + k as f64 * h))
        .collect::<Result<Vec<f64>>>()?;

    let mut peaks: Vec<usize> = (0..samples)
        .filter(|&k| {
            let left = if k == 0 { f64::NEG_INFINITY } else { dense[k - 1] };
            let right = if k + 1 == samples { f64::NEG_INFINITY } else { dense[k + 1] };
            dense[k] >= left && dense[k] >= right
        })
        .collect();
    peaks.sort_by(|&a, &b| dense[b].total_cmp(&dense[a]));
    peaks.truncate(8);

    let mut best = SupDistance { value: 0.0, argmax: lo };
    for &k in &peaks {
        if dense[k] > best.value {
            best = SupDistance { value: dense[k], argmax: radius(s_lo + k as f64 * h) };
        }
        let a = s_lo + k.saturating_sub(1) as f64 * h;
        let b = s_lo + (k + 1).min(samples - 1) as f64 * h;
        let (s_star, v) = golden_max(&gap, a, b)?;
        if v > best.value {
            best = SupDistance { value: v, argmax: radius(s_star) };
        }
    }
    Ok(best)
}

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > SUP_REFINE_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Modulus of continuity under dilation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub eps_grid: Vec<f64>,
    /// `ω(ε) = sup_{|ln λ| ≤ ε} sup_band |m̃(λr) − m̃(r)|`, non-decreasing.
    pub omega: Vec<f64>,
    pub threshold: f64,
    pub luc_flag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityOptions {
    /// Threshold is `factor · ε_min · slope bound`, floored at `floor`.
    pub factor: f64,
    pub floor: f64,
    pub samples: usize,
}

impl Default for ContinuityOptions {
    fn default() -> Self {
        Self { factor: 10.0, floor: 1e-6, samples: 4096 }
    }
}

pub fn continuity_modulus(
    spec: &MultiplierSpec,
    band: &BandSpec,
    eps_grid: &[f64],
) -> Result<ContinuityReport> {
    continuity_modulus_with(spec, band, eps_grid, ContinuityOptions::default())
}

pub fn continuity_modulus_with(
    spec: &MultiplierSpec,
    band: &BandSpec,
    eps_grid: &[f64],
    options: ContinuityOptions,
) -> Result<ContinuityReport> {
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::InvalidInput("eps grid must be non-empty and non-negative".into()));
    }
    let mut eps: Vec<f64> = eps_grid.to_vec();
    eps.sort_by(f64::total_cmp);
    let eps_max = *eps.last().unwrap_or(&0.0);
    let (lo, hi) = (band.lower(), band.upper());
    ensure_domain(spec, lo * (-eps_max).exp(), hi * eps_max.exp())?;

    let mut omega = Vec::with_capacity(eps.len());
    let mut running = 0.0f64;
    for &e in &eps {
        if e > 0.0 {
            for sign in [1.0, -1.0] {
                let moved = dilate(spec, (sign * e).exp())?;
                running = running.max(band_sup_distance(&moved, spec, band, options.samples)?.value);
            }
        }
        omega.push(running);
    }
    let (eps_min, omega_min) = eps
        .iter()
        .zip(&omega)
        .find(|(e, _)| **e > 0.0)
        .map(|(e, w)| (*e, *w))
        .unwrap_or((0.0, 0.0));
    let slope = spec.log_slope_bound(lo * (-eps_max).exp(), hi * eps_max.exp());
    let threshold = (options.factor * eps_min * slope).max(options.floor);
    Ok(ContinuityReport {
        eps_grid: eps,
        omega,
        threshold,
        luc_flag: omega_min <= threshold,
    })
}
