//! The end-to-end property suite behind `fracprop verify`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group_flow::{check_group_law, check_scaling, GroupSpec};
use crate::identification::identify;
use crate::multiplier::{band_sup_distance, dilate, Dilation, MultiplierSpec};
use crate::propagator::{apply, conjugated_apply, probe_operator_distance};
use crate::semistability::{canonical_pair, check_semistable, default_radius_grid, order_residual};
use crate::spectral::{
    inverse_transform, probe_rng, random_band_signal, random_packet_signal, BandSpec, SpatialGrid,
    DEFAULT_MARGIN,
};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    /// Halve grid sizes and trial counts; loosen tolerances tenfold.
    pub fast: bool,
    /// Replace the order-check dilation `2^{1/α}` by this factor. Exists to
    /// show that the suite notices a broken dilation.
    pub dilate_mutation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub fast: bool,
    /// Factor applied to every tolerance (10 in fast mode).
    pub tolerance_scale: f64,
    pub grid_n: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn failing(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn check(name: &'static str, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult { name, residual, tolerance, pass: residual.is_finite() && residual <= tolerance }
}

/// Smallest power-of-two `n ≥ n_min` and a window `x_max` for which the bands
/// `[lo, hi]` are resolvable, preferring `x_max` close to `target`.
fn fit_grid(n_min: usize, lo: f64, hi: f64, target: f64) -> Result<SpatialGrid> {
    let mut n = n_min;
    while n <= 1 << 16 {
        let x_lo = std::f64::consts::PI / lo * 1.01;
        let x_hi = (1.0 - DEFAULT_MARGIN) * n as f64 * std::f64::consts::PI / (2.0 * hi) * 0.99;
        if x_lo <= x_hi {
            return SpatialGrid::new(n, target.clamp(x_lo, x_hi));
        }
        n *= 2;
    }
    Err(Error::Config(format!("no grid of at most 65536 points resolves [{lo}, {hi}]")))
}

/// Runs every check for the group with symbol `e^{iβ|ξ|^α}`.
pub fn run_suite(alpha: f64, beta: f64, seed: u64, options: VerifyOptions) -> Result<VerifyReport> {
    let group = GroupSpec::new(alpha, beta)?;
    if group.is_trivial() {
        return Err(Error::Domain("the identity has no order; give α ≠ 0 and β ≠ 0".into()));
    }
    let scale = if options.fast { 10.0 } else { 1.0 };
    let n = if options.fast { 2048 } else { 4096 };
    let trials = |full: usize| if options.fast { full / 2 } else { full };
    let spec = MultiplierSpec::closed_form(alpha, beta);
    let pair = canonical_pair(alpha)?;
    let mut checks = Vec::new();

    // unitarity on L²_R
    let band = BandSpec::new(2.0)?;
    let grid = fit_grid(n, band.lower(), band.upper(), 256.0)?;
    let mut worst = 0.0f64;
    for k in 0..trials(100) as u64 {
        let f = inverse_transform(&random_band_signal(&band, &grid, seed.wrapping_add(k))?)?;
        let out = apply(&spec, &f, &band)?;
        worst = worst.max((out.norm() - f.norm()).abs() / f.norm());
    }
    checks.push(check("unitarity", worst, 1e-12 * scale));

    let rep = check_semistable(&spec, &pair, &default_radius_grid(), 1e-12)?;
    checks.push(check("semistability", rep.res2.max(rep.res3).max(rep.sym_res), 1e-12 * scale));

    let order_dilation = match options.dilate_mutation {
        Some(l) => Dilation::Factor(l),
        None => pair.a_dilation(),
    };
    checks.push(check("order_symbol", order_residual(&spec, order_dilation)?, 1e-12 * scale));

    // T² = T_a on packets, with T_a built by signal dilation
    let a = order_dilation.value();
    let narrow = BandSpec::new(1.5)?;
    let packet_grid = fit_grid(n, narrow.lower() * a.min(1.0), narrow.upper() * a.max(1.0), 512.0)?;
    let f = random_packet_signal(&narrow, &packet_grid, seed)?;
    let twice = apply(&spec, &apply(&spec, &f, &narrow)?, &narrow)?;
    let conj = conjugated_apply(&spec, a, &f, &narrow)?;
    checks.push(check("order_signal", twice.distance(&conj)? / f.norm(), 1e-7 * scale));

    let f = inverse_transform(&random_band_signal(&band, &grid, seed)?)?;
    let mut rng = probe_rng(seed, 1 << 32);
    let mut worst = 0.0f64;
    for _ in 0..trials(50) {
        let (t1, t2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        worst = worst.max(check_group_law(&group, t1, t2, &f, &band)?);
    }
    checks.push(check("group_law", worst, 1e-12 * scale));

    let mut worst = 0.0f64;
    for t in [0.25, 1.0, 8.0] {
        worst = worst.max(check_scaling(&group, t)?);
    }
    checks.push(check("scaling", worst, 1e-12 * scale));

    // m(λ·) against m with λ^α = 1 + π/|β|: the gap |e^{iπ sgn(β) r^α} − 1| peaks at 2 on r = 1
    let lambda = Dilation::root(1.0 + std::f64::consts::PI / beta.abs(), alpha);
    let m1 = dilate(&spec, lambda)?;
    let probe_grid = fit_grid(n, band.lower(), band.upper(), 1000.0)?;
    let exact = band_sup_distance(&m1, &spec, &band, 8192)?.value;
    let probed = probe_operator_distance(&m1, &spec, &band, &probe_grid, trials(16), seed)?;
    let gap = exact - probed;
    let mut distance = check("operator_distance", gap.max(0.0), 1e-3 * scale);
    distance.pass &= gap >= -1e-12 && (exact - 2.0).abs() <= 1e-12;
    checks.push(distance);

    let points = if options.fast { 2048 } else { 4096 };
    let table = spec.tabulate(-6.0, 6.0, points)?;
    let id = identify(&table, &pair, 1e-9)?;
    let rel = ((id.alpha - alpha) / alpha).abs().max(((id.beta - beta) / beta).abs());
    let mut ident = check("identification", rel, 1e-6 * scale);
    ident.pass &= id.n == 2 * id.m;
    checks.push(ident);

    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        alpha,
        beta,
        seed,
        fast: options.fast,
        tolerance_scale: scale,
        grid_n: n,
        checks,
        pass,
    })
}
