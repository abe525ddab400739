//! CHSH Bell function in the planar detector geometry, its global
//! maximization over the single opening angle, and the large-N scan of a
//! few named mask families.
//!
//! The planar arrangement puts three of the four axis pairs at the same
//! angle theta and the fourth at 3*theta, collapsing the CHSH combination
//! to B(theta) = |C(theta) - C(3 theta)| + 2 |C(theta)|. Local models obey
//! B <= 2; quantum mechanics caps it at 2*sqrt(2).

use serde::Serialize;

use crate::correlation::correlation;
use crate::error::{Error, Result};
use crate::mask::{CanonicalMask, ParityMask};
use crate::spin::{clear_cached_tables, SpinLabel};

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_REFINE_TOL: f64 = 1e-9;
const MIN_GRID_POINTS: usize = 64;

/// Quantum ceiling of the CHSH combination, 2*sqrt(2).
pub const TSIRELSON_BOUND: f64 = 2.8284271247461903;

/// Detector-axis arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// Three axis pairs at theta, the fourth at 3*theta.
    Planar,
}

/// B(theta) in the planar geometry.
pub fn bell_value(mask: &ParityMask, theta: f64) -> Result<f64> {
    let near = correlation(mask, theta)?;
    let far = correlation(mask, 3.0 * theta)?;
    Ok((near - far).abs() + 2.0 * near.abs())
}

/// CHSH combination with all four pair angles free:
/// |C(ab) - C(ab')| + |C(a'b) + C(a'b')|.
pub fn bell_value_general(mask: &ParityMask, angles: [f64; 4]) -> Result<f64> {
    let [ab, ab_prime, a_prime_b, a_prime_b_prime] = angles;
    let c_ab = correlation(mask, ab)?;
    let c_ab_prime = correlation(mask, ab_prime)?;
    let c_a_prime_b = correlation(mask, a_prime_b)?;
    let c_a_prime_b_prime = correlation(mask, a_prime_b_prime)?;
    Ok((c_ab - c_ab_prime).abs() + (c_a_prime_b + c_a_prime_b_prime).abs())
}

/// Outcome of maximizing B over theta for one mask.
#[derive(Debug, Clone, Serialize)]
pub struct BellResult {
    pub mask: CanonicalMask,
    pub theta_star: f64,
    pub b_max: f64,
    /// Strictly above the local bound 2. No tolerance band: borderline
    /// cases are reported through `margin` at full precision.
    pub violates: bool,
    pub margin: f64,
    pub geometry: Geometry,
}

/// Maximize B(theta) over (0, pi].
///
/// B is even and 2*pi-periodic in theta, so (0, pi] covers every geometry.
/// A uniform grid locates the best cell (dense enough that the |..| kinks
/// cannot hide a peak at the default setting) and golden-section search
/// refines the surrounding bracket down to `refine_tol` radians.
/// Deterministic for identical inputs.
pub fn bell_max(mask: &ParityMask, grid_points: usize, refine_tol: f64) -> Result<BellResult> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse {
            got: grid_points,
            min: MIN_GRID_POINTS,
        });
    }
    let canonical = mask.canonicalize()?;
    let eval = canonical.mask();
    let step = std::f64::consts::PI / grid_points as f64;

    let mut best_i = 1;
    let mut best_v = f64::NEG_INFINITY;
    for i in 1..=grid_points {
        let v = bell_value(&eval, i as f64 * step)?;
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }

    // golden-section refinement on the bracket around the best grid point
    let mut lo = (best_i as f64 - 1.0) * step;
    let mut hi = ((best_i + 1).min(grid_points)) as f64 * step;
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = bell_value(&eval, c)?;
    let mut fd = bell_value(&eval, d)?;
    while hi - lo > refine_tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = bell_value(&eval, c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = bell_value(&eval, d)?;
        }
    }
    let (theta_star, b_max) = if fc > fd { (c, fc) } else { (d, fd) };
    let (theta_star, b_max) = if best_v > b_max {
        (best_i as f64 * step, best_v)
    } else {
        (theta_star, b_max)
    };

    Ok(BellResult {
        mask: canonical,
        theta_star,
        b_max,
        violates: b_max > 2.0,
        margin: b_max - 2.0,
        geometry: Geometry::Planar,
    })
}

/// Mask families with a closed-form member at every dimension; used to
/// track how violations evolve as N grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskFamily {
    /// f_m = 1 - delta_{m,-s}, i.e. P = 2^N - 2. The observable closest to
    /// the identity; its violation decays like 1/N.
    NearIdentity,
    /// Bits set on every other level, top bit included (P = 101..01 or
    /// 1010..10 patterns depending on parity of N).
    Alternating,
    /// Only the two extremal levels m = +/-s flagged, P = 2^(N-1) + 1.
    EndBits,
}

impl MaskFamily {
    pub fn name(self) -> &'static str {
        match self {
            MaskFamily::NearIdentity => "near-identity",
            MaskFamily::Alternating => "alternating",
            MaskFamily::EndBits => "end-bits",
        }
    }

    /// The family member at this spin.
    pub fn mask_for(self, spin: SpinLabel) -> ParityMask {
        let n = spin.dimension();
        let p = match self {
            MaskFamily::NearIdentity => (1u64 << n) - 2,
            MaskFamily::Alternating => {
                let mut bits = 0u64;
                let mut i = n as i64 - 1;
                while i >= 0 {
                    bits |= 1u64 << i;
                    i -= 2;
                }
                bits
            }
            MaskFamily::EndBits => (1u64 << (n - 1)) | 1,
        };
        ParityMask::from_integer(spin, p).expect("family patterns are in range")
    }
}

impl std::str::FromStr for MaskFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "near-identity" => Ok(MaskFamily::NearIdentity),
            "alternating" => Ok(MaskFamily::Alternating),
            "end-bits" => Ok(MaskFamily::EndBits),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// One rung of a classical-limit scan.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalRecord {
    pub spin: SpinLabel,
    pub dimension: usize,
    pub p: u64,
    pub theta_star: f64,
    pub b_max: f64,
    pub violates: bool,
}

/// Evaluate one family across a ladder of spins.
pub fn classical_limit_scan(
    family: MaskFamily,
    spins: &[SpinLabel],
    grid_points: usize,
    refine_tol: f64,
) -> Result<Vec<ClassicalRecord>> {
    let mut out = Vec::with_capacity(spins.len());
    for &spin in spins {
        let mask = family.mask_for(spin);
        let result = bell_max(&mask, grid_points, refine_tol)?;
        out.push(ClassicalRecord {
            spin,
            dimension: spin.dimension(),
            p: mask.p(),
            theta_star: result.theta_star,
            b_max: result.b_max,
            violates: result.violates,
        });
        // large-N rungs leave a few thousand tables behind; drop them
        if spin.dimension() > 25 {
            clear_cached_tables(spin);
        }
    }
    Ok(out)
}
