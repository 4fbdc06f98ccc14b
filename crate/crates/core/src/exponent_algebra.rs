//! When is `∏ e^{iβ_j r^{α_j}} ≡ 1` on `r > 0`?
//!
//! Exponents are grouped; the product is the identity exactly when every
//! nonzero-exponent group has vanishing coefficient sum and the zero-exponent
//! group sums to a multiple of 2π.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::cis_product;

/// Relative tolerance on vanishing coefficient sums.
pub const SUM_TOL: f64 = 1e-12;
/// Tolerance on `Σβ / 2π` being an integer for the zero-exponent group.
pub const TURN_TOL: f64 = 1e-12;
/// A witness at or above this violation is returned immediately.
pub const WITNESS_EARLY: f64 = 1e-6;
/// Oracle tolerance on `|∏ − 1|`.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTerm {
    pub alpha: f64,
    pub beta: f64,
}

impl PhaseTerm {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseLabel {
    SingleA,
    PairA,
    PairB,
    TripleA,
    TripleB,
    TripleC,
    General,
    None,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::SingleA => "single-a",
            CaseLabel::PairA => "pair-a",
            CaseLabel::PairB => "pair-b",
            CaseLabel::TripleA => "triple-a",
            CaseLabel::TripleB => "triple-b",
            CaseLabel::TripleC => "triple-c",
            CaseLabel::General => "general",
            CaseLabel::None => "none",
        }
    }
}

/// Terms sharing one exponent (up to the grouping tolerance).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentGroup {
    pub alpha: f64,
    pub beta_sum: f64,
    pub beta_abs_sum: f64,
    pub members: usize,
    pub zero_exponent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductVerdict {
    pub is_identity: bool,
    pub case_label: CaseLabel,
    /// Radius where the product differs from 1; present iff not the identity.
    pub witness: Option<f64>,
    pub witness_residual: Option<f64>,
    /// Two ungrouped exponents lie within `10·alpha_tol` of each other.
    pub near_collision: bool,
    pub groups: Vec<ExponentGroup>,
}

/// `∏ e^{iβ_j r^{α_j}}`.
pub fn product_at(terms: &[PhaseTerm], r: f64) -> Complex64 {
    terms
        .iter()
        .map(|t| if t.alpha == 0.0 { cis_product(t.beta, 1.0) } else { cis_product(t.beta, r.powf(t.alpha)) })
        .product()
}

fn group_terms(terms: &[PhaseTerm], alpha_tol: f64) -> (Vec<ExponentGroup>, bool) {
    let mut sorted: Vec<PhaseTerm> = terms.to_vec();
    sorted.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    let mut clusters: Vec<Vec<PhaseTerm>> = Vec::new();
    let mut near = false;
    for t in sorted {
        let gap = clusters.last().map(|c| t.alpha - c[c.len() - 1].alpha);
        match (clusters.last_mut(), gap) {
            (Some(c), Some(gap)) if gap <= alpha_tol => c.push(t),
            _ => {
                if gap.is_some_and(|g| g <= 10.0 * alpha_tol) {
                    near = true;
                }
                clusters.push(vec![t]);
            }
        }
    }
    let groups = clusters
        .into_iter()
        .map(|c| {
            let zero = c.iter().any(|t| t.alpha.abs() <= alpha_tol);
            let alpha = if zero { 0.0 } else { c.iter().map(|t| t.alpha).sum::<f64>() / c.len() as f64 };
            ExponentGroup {
                alpha,
                beta_sum: c.iter().map(|t| t.beta).sum(),
                beta_abs_sum: c.iter().map(|t| t.beta.abs()).sum(),
                members: c.len(),
                zero_exponent: zero,
            }
        })
        .collect();
    (groups, near)
}

fn group_cancels(group: &ExponentGroup) -> bool {
    if group.zero_exponent {
        let turns = group.beta_sum / TAU;
        (turns - turns.round()).abs() <= TURN_TOL
    } else {
        group.beta_sum.abs() <= SUM_TOL * group.beta_abs_sum
    }
}

/// Radius where the product visibly differs from 1: integer radii first, then
/// 4096 log-spaced radii on `[e⁻⁴, e⁴]`; the first violation above
/// [`WITNESS_EARLY`] wins, otherwise the largest one seen.
fn find_witness(terms: &[PhaseTerm]) -> (f64, f64) {
    let integers = (1..=8).map(f64::from);
    let logs = (0..4096).map(|k| (-4.0 + 8.0 * k as f64 / 4095.0).exp());
    let mut best = (1.0, 0.0);
    for r in integers.chain(logs) {
        let v = (product_at(terms, r) - 1.0).norm();
        if v >= WITNESS_EARLY {
            return (r, v);
        }
        if v > best.1 {
            best = (r, v);
        }
    }
    best
}

/// Decides whether the product of the given phase terms is identically 1 and
/// names the case of the structure lemmas for up to three terms.
///
/// `alpha_tol` is the caller's notion of exponent equality (0 means exact).
pub fn classify_product(terms: &[PhaseTerm], alpha_tol: f64) -> Result<ProductVerdict> {
    if !(alpha_tol.is_finite() && alpha_tol >= 0.0) {
        return Err(Error::InvalidInput(format!("alpha_tol must be finite and ≥ 0, got {alpha_tol}")));
    }
    if terms.is_empty() {
        return Err(Error::InvalidInput("no terms to classify".into()));
    }
    for (k, t) in terms.iter().enumerate() {
        if !(t.alpha.is_finite() && t.beta.is_finite()) {
            return Err(Error::InvalidInput(format!("term {k} is not finite")));
        }
        if t.beta == 0.0 {
            return Err(Error::Domain(format!("term {k} has β = 0")));
        }
    }
    let (groups, near_collision) = group_terms(terms, alpha_tol);
    let is_identity = groups.iter().all(group_cancels);

    let case_label = if !is_identity {
        CaseLabel::None
    } else {
        let zero = groups.iter().filter(|g| g.zero_exponent).count();
        match (terms.len(), groups.len(), zero) {
            (1, _, _) => CaseLabel::SingleA,
            (2, 1, 1) => CaseLabel::PairA,
            (2, 1, 0) => CaseLabel::PairB,
            (3, 1, 1) => CaseLabel::TripleA,
            (3, 1, 0) => CaseLabel::TripleB,
            (3, 2, 1) => CaseLabel::TripleC,
            _ => CaseLabel::General,
        }
    };
    let (witness, witness_residual) = if is_identity {
        (None, None)
    } else {
        let (r, v) = find_witness(terms);
        (Some(r), Some(v))
    };
    Ok(ProductVerdict { is_identity, case_label, witness, witness_residual, near_collision, groups })
}

/// Brute-force check that `|∏ − 1| ≤ 1e−9` at every radius of `r_grid`.
///
/// The grid must hold at least 256 radii spanning two decades.
pub fn sample_oracle(terms: &[PhaseTerm], r_grid: &[f64]) -> Result<bool> {
    let (lo, hi) = r_grid
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if r_grid.len() < 256 || r_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) || hi < 100.0 * lo {
        return Err(Error::InvalidInput(
            "oracle grid needs ≥ 256 positive radii spanning ≥ 2 decades".into(),
        ));
    }
    Ok(r_grid.iter().all(|&r| (product_at(terms, r) - 1.0).norm() <= ORACLE_TOL))
}
