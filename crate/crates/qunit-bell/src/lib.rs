//! Bell-inequality violations for bipartite spin-s singlet states measured
//! with parity-bit diagonal observables.
//!
//! A spin-s pair (an N-level system per side, N = 2s+1) in the rotationally
//! invariant singlet state is probed with +/-1-valued observables that are
//! diagonal in the quantization basis: each level m carries a parity bit
//! f_m, the observable is sum_m (-1)^{f_m} |m><m|, and the bit array packs
//! into an integer P. Both sides use the same P; their quantization axes
//! differ by an angle theta, which enters through the squared Wigner
//! d-matrix. The CHSH Bell function is evaluated in the planar detector
//! geometry where three of the four axis pairs share the angle theta and
//! the fourth opens 3*theta.
//!
//! The crate provides the building blocks ([`spin`], [`mask`],
//! [`mod@correlation`], [`bell`]) plus a sweep orchestrator and report
//! writer ([`mod@survey`]) behind the `qunit-bell` CLI.

pub mod bell;
pub mod correlation;
pub mod error;
pub mod mask;
pub mod spin;
pub mod survey;

pub use bell::{
    bell_max, bell_value, bell_value_general, classical_limit_scan, BellResult, ClassicalRecord,
    Geometry, MaskFamily, DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL, TSIRELSON_BOUND,
};
pub use correlation::{
    correlation, correlation_poly, distinct_correlations, fingerprint, CorrelationFingerprint,
    CorrelationGroups, CosPoly,
};
pub use error::{Error, Result};
pub use mask::{enumerate_independent, CanonicalMask, ParityMask};
pub use spin::{
    cg_coefficient, clear_cached_tables, unique_element_count, wigner_d, wigner_d_squared,
    RotationTable, SpinLabel, MAX_EVAL_DIMENSION, MAX_MASK_DIMENSION,
};
pub use survey::{
    emit, sample_survey, survey, Histogram, Provenance, ReportFormat, SampleSpec, SurveyMode,
    SurveyRecord, SurveyReport, SurveyTotals,
};
