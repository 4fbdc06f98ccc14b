use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::grid::{SampledSignal, SpatialGrid, Spectrum};
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized FFT in the given direction.
pub(crate) fn fft_in_place(buf: &mut [Complex64], direction: FftDirection) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(buf.len(), direction));
    fft.process(buf);
}

/// `(−1)^k` on FFT bins; the window starts at `−x_max`, so `e^{−iξ_k x_0} = (−1)^k`.
fn alternate_signs(buf: &mut [Complex64]) {
    for v in buf.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

/// `f̂(ξ_k) = (2π)^{−1/2} Σ_j f(x_j) e^{−iξ_k x_j} Δx`.
pub fn forward_transform(f: &SampledSignal) -> Result<Spectrum> {
    let grid = *f.grid();
    if f.values().iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidInput("non-finite signal sample".into()));
    }
    let mut buf = f.values().to_vec();
    fft_in_place(&mut buf, FftDirection::Forward);
    alternate_signs(&mut buf);
    let scale = grid.dx() / (2.0 * PI).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    Spectrum::new(grid, buf)
}

/// `f(x_j) = (2π)^{−1/2} Σ_k f̂(ξ_k) e^{iξ_k x_j} Δξ`, the exact inverse of [`forward_transform`].
pub fn inverse_transform(spectrum: &Spectrum) -> Result<SampledSignal> {
    let grid = *spectrum.grid();
    let mut buf = spectrum.values().to_vec();
    alternate_signs(&mut buf);
    fft_in_place(&mut buf, FftDirection::Inverse);
    let scale = grid.dxi() / (2.0 * PI).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    SampledSignal::new(grid, buf)
}

/// Riemann sum `Σ f(x_j)·conj(g(x_j))·Δx`.
pub fn inner_product(f: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
    f.grid().ensure_same(g.grid())?;
    let s: Complex64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b.conj()).sum();
    Ok(s * f.grid().dx())
}

/// Frequency-side counterpart `Σ F_k·conj(G_k)·Δξ`.
pub fn spectral_inner_product(f: &Spectrum, g: &Spectrum) -> Result<Complex64> {
    f.grid().ensure_same(g.grid())?;
    let s: Complex64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b.conj()).sum();
    Ok(s * f.grid().dxi())
}

/// Evaluates the trigonometric interpolant of a spectrum, i.e. the transform of
/// the windowed samples, at the scaled frequencies `λ·ξ_k` for every bin `k`.
///
/// Uses Bluestein's chirp-z factorisation so the cost is `O(n log n)`.
pub(crate) fn scaled_frequency_samples(f: &SampledSignal, lambda: f64) -> Vec<Complex64> {
    let grid: SpatialGrid = *f.grid();
    let n = grid.n();
    let half = (n / 2) as i64;
    // λ ξ_k x_j = −πλk + πλ·2kj/n. With k signed and 2kj = k² + j² − (k−j)²:
    //   S_k = e^{−iπλk²/n} Σ_j [f_j e^{−iπλj²/n}] e^{iπλ(k−j)²/n}.
    // q²/n is exact for power-of-two n, so the chirp phase is formed in one product.
    let chirp = |q: i64| crate::phase::cis_product(lambda, PI * ((q * q) as f64 / n as f64));
    let len = (3 * n).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    for (j, v) in f.values().iter().enumerate() {
        a[j] = v * chirp(j as i64).conj();
    }
    // b_m = chirp(m − offset), m = 0..=2n−2, covers every k − j.
    let offset = (n as i64 - 1) + half;
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    for (m, slot) in b.iter_mut().enumerate().take(2 * n - 1) {
        *slot = chirp(m as i64 - offset);
    }
    fft_in_place(&mut a, FftDirection::Forward);
    fft_in_place(&mut b, FftDirection::Forward);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft_in_place(&mut a, FftDirection::Inverse);
    let scale = grid.dx() / (2.0 * PI).sqrt() / len as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for k in -half..half {
        let conv = a[(k + offset) as usize];
        let pre = crate::phase::cis_product(lambda, PI * k as f64) * chirp(k).conj();
        let bin = if k >= 0 { k as usize } else { (k + n as i64) as usize };
        out[bin] = conv * pre * scale;
    }
    out
}
