use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// `exit_code` groups them the way the CLI reports them: bad arguments or
/// domain violations exit with 2, numerical-guard trips (dedup ambiguity,
/// polynomial residual breach) with 3, I/O failures with 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin `{0}`: expected a positive integer or half-integer like `3/2`")]
    InvalidSpin(String),

    #[error("{0}")]
    BadArguments(String),

    #[error("dimension N={n} out of range: {what} supports 2 <= N <= {max}")]
    DimensionOutOfRange {
        n: usize,
        max: usize,
        what: &'static str,
    },

    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("parity integer {p} out of range for dimension {n} (need 0 <= P < 2^{n})")]
    MaskOutOfRange { p: u64, n: usize },

    #[error(
        "mask P={p} is trivial (identity up to sign): no canonical form, constant correlation"
    )]
    TrivialMask { p: u64 },

    #[error("tensor rank {k} outside 1..={max}")]
    RankOutOfRange { k: u32, max: u32 },

    #[error("angular momentum arguments are not consistent half-integers: {0}")]
    HalfIntegerMismatch(String),

    #[error("projection |m|={two_m}/2 exceeds j={two_j}/2")]
    ProjectionOutOfRange { two_j: u32, two_m: i32 },

    #[error("triangle rule violated: j1={0}/2, j2={1}/2, j={2}/2")]
    TriangleViolation(u32, u32, u32),

    #[error("grid must have at least {min} points, got {got}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("unknown mask family `{0}` (known: near-identity, alternating, end-bits)")]
    UnknownFamily(String),

    #[error("exhaustive mode capped at two_s <= {cap} (got {two_s}); use sampling instead")]
    ExhaustiveCap { two_s: u32, cap: u32 },

    #[error(
        "correlation polynomial residual {residual:.3e} at theta={theta} exceeds 1e-6; \
         the correlation does not reduce to a degree-(N-1) polynomial in cos(theta)"
    )]
    ResidualGuard { theta: f64, residual: f64 },

    #[error(
        "fingerprint dedup is ambiguous: groups {p_a} and {p_b} are separated by only \
         {distance:.3e} (< 1e-4); counts would be tolerance-dependent"
    )]
    DedupAmbiguous { p_a: u64, p_b: u64, distance: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed report: {0}")]
    MalformedReport(String),
}

impl Error {
    /// CLI process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::ResidualGuard { .. } | Error::DedupAmbiguous { .. } => 3,
            Error::Io { .. } | Error::MalformedReport(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
