//! Spectral computation with radial Fourier multipliers `e^{iβ|ξ|^α}` and
//! their tabulated generalisations: evolution, dilation structure,
//! semistability checks and recovery of `(α, β)` from sampled symbols.

pub mod error;
pub mod exponent_algebra;
pub mod group_flow;
pub mod identification;
pub mod io;
pub mod multiplier;
pub mod phase;
pub mod propagator;
pub mod semistability;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use exponent_algebra::{classify_product, sample_oracle, CaseLabel, PhaseTerm, ProductVerdict};
pub use group_flow::{check_group_law, check_scaling, member, recover_beta, GroupSpec};
pub use identification::{
    branch_integers, identify, identify_with, mollified_affine_fit, unwrap_phase, weighted_mollified_affine_fit,
    IdentificationResult, IdentifyOptions, PhaseTrace,
};
pub use multiplier::{
    band_sup_distance, combine, continuity_modulus, dilate, eval, CombinedSymbol, ContinuityReport, Dilation,
    MultiplierSpec, Symbol, TabulatedProfile,
};
pub use propagator::{apply, conjugated_apply, dilate_signal, probe_operator_distance, translate};
pub use semistability::{canonical_pair, check_order, check_semistable, SemistabilityReport, SemistablePair};
pub use spectral::{
    band_project, forward_transform, inverse_transform, random_band_signal, random_packet_signal, BandSpec,
    SampledSignal, SpatialGrid, Spectrum,
};
