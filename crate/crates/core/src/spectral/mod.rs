//! Uniform grids, the unitary discrete Fourier pair, band projection and
//! reproducible random probes.
//!
//! The real line is modelled by a periodic window `[-x_max, x_max)` sampled
//! at `n` points. Spectra are stored in FFT order: bin `k < n/2` holds
//! frequency `k·Δξ`, bin `k ≥ n/2` holds `(k − n)·Δξ`.

mod band;
mod grid;
pub(crate) mod probe;
pub(crate) mod transform;

pub use band::{band_project, BandSpec, DEFAULT_MARGIN};
pub use grid::{SampledSignal, SpatialGrid, Spectrum};
pub use probe::{random_band_signal, random_packet_signal, probe_rng};
pub use transform::{forward_transform, inner_product, inverse_transform, spectral_inner_product};
