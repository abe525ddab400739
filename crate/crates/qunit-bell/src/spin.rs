//! Spin bookkeeping and the SU(2) machinery everything else is built on:
//! exact half-integer spin labels, Wigner d-matrices for y-axis rotations,
//! and Clebsch-Gordan coefficients.
//!
//! The d-matrix is evaluated by eigendecomposition of the spin-y generator.
//! In the |s,m> basis the generator is similar (via the diagonal phase
//! i^row) to a real symmetric tridiagonal matrix with zero diagonal and
//! off-diagonal sqrt((r+1)(N-1-r))/2, whose spectrum is exactly
//! -s, -s+1, .., s. This stays numerically stable out to N = 50 where the
//! textbook factorial sum has long since cancelled itself to noise.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::sync::LazyLock;

use dashmap::DashMap;
use nalgebra::DMatrix;
use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest dimension for which parity masks fit a `u64` (enumeration cap).
pub const MAX_MASK_DIMENSION: usize = 63;
/// Largest dimension for which d-matrices are evaluated.
pub const MAX_EVAL_DIMENSION: usize = 50;

/// Exact half-integer spin, stored doubled so s = 3/2 is `two_s = 3`.
///
/// The dimension of the spin-s irrep is N = 2s + 1; labels are restricted
/// to N >= 2 (a one-dimensional "spin 0" carries no observable structure)
/// and N <= 63 so parity masks stay in a single machine word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinLabel {
    two_s: u32,
}

impl SpinLabel {
    pub fn from_two_s(two_s: u32) -> Result<Self> {
        if two_s == 0 || two_s as usize + 1 > MAX_MASK_DIMENSION {
            return Err(Error::DimensionOutOfRange {
                n: two_s as usize + 1,
                max: MAX_MASK_DIMENSION,
                what: "SpinLabel",
            });
        }
        Ok(SpinLabel { two_s })
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    /// N = 2s + 1.
    pub fn dimension(self) -> usize {
        self.two_s as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.two_s.is_multiple_of(2)
    }

    pub fn value(self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    /// Doubled projections 2m in ascending order: -2s, -2s+2, .., 2s.
    pub fn two_m_values(self) -> impl Iterator<Item = i32> {
        let two_s = self.two_s as i32;
        (-two_s..=two_s).step_by(2)
    }

    /// Row index (0-based, ascending m) of the projection 2m.
    pub fn row_of_two_m(self, two_m: i32) -> usize {
        debug_assert_eq!((two_m + self.two_s as i32) % 2, 0);
        ((two_m + self.two_s as i32) / 2) as usize
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_s.is_multiple_of(2) {
            write!(f, "{}", self.two_s / 2)
        } else {
            write!(f, "{}/2", self.two_s)
        }
    }
}

impl FromStr for SpinLabel {
    type Err = Error;

    /// Accepts `"2"` or a fraction like `"3/2"` (also `"4/2"`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpin(s.to_string());
        let two_s = match s.split_once('/') {
            None => {
                let v: u32 = s.trim().parse().map_err(|_| bad())?;
                v.checked_mul(2).ok_or_else(bad)?
            }
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim() {
                    "1" => num.checked_mul(2).ok_or_else(bad)?,
                    "2" => num,
                    _ => return Err(bad()),
                }
            }
        };
        SpinLabel::from_two_s(two_s).map_err(|_| bad())
    }
}

impl Serialize for SpinLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SpinLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse()
            .map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

/// Squared d-matrix elements |d^s_{m',n}(theta)|^2 for one (s, theta).
///
/// Row r holds m' = r - s (ascending), column c holds n = c - s.
#[derive(Debug, Clone)]
pub struct RotationTable {
    spin: SpinLabel,
    theta: f64,
    sq: DMatrix<f64>,
}

impl RotationTable {
    pub fn spin(&self) -> SpinLabel {
        self.spin
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn squared(&self) -> &DMatrix<f64> {
        &self.sq
    }

    /// |d^s_{m',n}|^2 by row/column index (ascending m).
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.sq[(row, col)]
    }

    /// |d^s_{m',n}|^2 by doubled projections.
    pub fn entry_by_two_m(&self, two_m_prime: i32, two_n: i32) -> f64 {
        self.sq[(
            self.spin.row_of_two_m(two_m_prime),
            self.spin.row_of_two_m(two_n),
        )]
    }
}

/// Eigendecomposition of the (phase-rotated) spin-y generator, reused for
/// every angle at a given spin.
struct SpinEigen {
    /// Exact spectrum -s, -s+1, .., s.
    lambdas: Vec<f64>,
    vectors: DMatrix<f64>,
}

static EIGEN_CACHE: LazyLock<DashMap<u32, Arc<SpinEigen>>> = LazyLock::new(DashMap::new);
static TABLE_CACHE: LazyLock<DashMap<(u32, u64), Arc<RotationTable>>> = LazyLock::new(DashMap::new);

/// Drop cached rotation tables for one spin. Sweeps over very large N call
/// this when a spin is finished so the per-angle tables do not pile up.
pub fn clear_cached_tables(spin: SpinLabel) {
    TABLE_CACHE.retain(|&(two_s, _), _| two_s != spin.two_s());
}

fn check_eval_dimension(spin: SpinLabel) -> Result<()> {
    let n = spin.dimension();
    if n > MAX_EVAL_DIMENSION {
        return Err(Error::DimensionOutOfRange {
            n,
            max: MAX_EVAL_DIMENSION,
            what: "d-matrix evaluation",
        });
    }
    Ok(())
}

fn spin_eigen(spin: SpinLabel) -> Arc<SpinEigen> {
    if let Some(e) = EIGEN_CACHE.get(&spin.two_s()) {
        return e.clone();
    }
    let n = spin.dimension();
    let mut gen = DMatrix::<f64>::zeros(n, n);
    for r in 0..n - 1 {
        let b = (((r + 1) * (n - 1 - r)) as f64).sqrt() / 2.0;
        gen[(r, r + 1)] = b;
        gen[(r + 1, r)] = b;
    }
    let eig = gen.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(src));
    }
    // the spectrum is known exactly; snap it
    let s = spin.value();
    let lambdas: Vec<f64> = (0..n).map(|k| k as f64 - s).collect();
    let entry = Arc::new(SpinEigen { lambdas, vectors });
    EIGEN_CACHE
        .entry(spin.two_s())
        .or_insert(entry)
        .value()
        .clone()
}

/// Cosine and sine parts V diag(cos theta*lambda) V^T, V diag(sin ..) V^T.
fn trig_parts(spin: SpinLabel, theta: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let eig = spin_eigen(spin);
    let n = spin.dimension();
    let mut wc = eig.vectors.clone();
    let mut ws = eig.vectors.clone();
    for k in 0..n {
        let (sin, cos) = (theta * eig.lambdas[k]).sin_cos();
        wc.column_mut(k).scale_mut(cos);
        ws.column_mut(k).scale_mut(sin);
    }
    let vt = eig.vectors.transpose();
    (wc * &vt, ws * vt)
}

/// Signed Wigner d-matrix d^s_{m',n}(theta), rows/columns ascending in m.
///
/// Convention check: d^1_{0,0} = cos(theta) and the two_s = 1 matrix is
/// [[cos(t/2), sin(t/2)], [-sin(t/2), cos(t/2)]] in ascending-m storage.
pub fn wigner_d(spin: SpinLabel, theta: f64) -> Result<DMatrix<f64>> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    check_eval_dimension(spin)?;
    let n = spin.dimension();
    if theta == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    let (cosm, sinm) = trig_parts(spin, theta);
    let mut d = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            // i^(c-r) phase routes each entry to one real trig part
            d[(r, c)] = match (c as i32 - r as i32).rem_euclid(4) {
                0 => cosm[(r, c)],
                1 => sinm[(r, c)],
                2 => -cosm[(r, c)],
                _ => -sinm[(r, c)],
            };
        }
    }
    Ok(d)
}

/// Squared-element table |d^s_{m',n}(theta)|^2, memoized per (two_s, theta).
///
/// Deterministic: identical inputs always return bitwise-identical tables,
/// also across threads racing on the cache.
pub fn wigner_d_squared(spin: SpinLabel, theta: f64) -> Result<Arc<RotationTable>> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteAngle(theta));
    }
    check_eval_dimension(spin)?;
    let key = (spin.two_s(), theta.to_bits());
    if let Some(t) = TABLE_CACHE.get(&key) {
        return Ok(t.clone());
    }
    let n = spin.dimension();
    let sq = if theta == 0.0 {
        DMatrix::identity(n, n)
    } else {
        let (cosm, sinm) = trig_parts(spin, theta);
        DMatrix::from_fn(n, n, |r, c| {
            let (a, b) = (cosm[(r, c)], sinm[(r, c)]);
            a * a + b * b
        })
    };
    let table = Arc::new(RotationTable { spin, theta, sq });
    Ok(TABLE_CACHE.entry(key).or_insert(table).value().clone())
}

/// Number of independent squared d-matrix elements.
///
/// Index pairs (m', n) fall into equivalence classes under the four-fold
/// symmetry |d_{m1,m2}| = |d_{-m1,-m2}| = |d_{m2,m1}|; one element per
/// class is redundant per sign-symmetric row pair because every row sums
/// to 1. The count is s(s+1) for integer s and (s+1/2)^2 for half-odd s.
pub fn unique_element_count(spin: SpinLabel) -> u64 {
    let two_s = spin.two_s() as i32;
    let mut seen = std::collections::HashSet::new();
    let mut orbits: u64 = 0;
    for two_mp in (-two_s..=two_s).step_by(2) {
        for two_n in (-two_s..=two_s).step_by(2) {
            let orbit_rep = [
                (two_mp, two_n),
                (-two_mp, -two_n),
                (two_n, two_mp),
                (-two_n, -two_mp),
            ]
            .into_iter()
            .min()
            .unwrap();
            if seen.insert(orbit_rep) {
                orbits += 1;
            }
        }
    }
    let row_constraints = (spin.dimension() as u64).div_ceil(2);
    orbits - row_constraints
}

fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Convert an exact nonnegative rational to f64 with ~1 ulp error even when
/// numerator/denominator individually overflow f64 range.
fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    debug_assert!(r.is_positive());
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let shift = den.bits() as i64 + 64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mut val = q.to_f64().expect("64-bit quotient");
    let mut e = -shift;
    while e > 1000 {
        val *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        val *= 2f64.powi(-1000);
        e += 1000;
    }
    val * 2f64.powi(e as i32)
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m> in the Condon-Shortley
/// convention. Arguments are doubled (two_j1 = 2*j1, ..) so half-integers
/// stay exact; the sum is evaluated in exact big-integer rationals and only
/// the final square root is floating point.
pub fn cg_coefficient(
    two_j1: u32,
    two_j2: u32,
    two_j: u32,
    two_m1: i32,
    two_m2: i32,
    two_m: i32,
) -> Result<f64> {
    for (two_jx, two_mx, name) in [
        (two_j1, two_m1, "m1 - j1"),
        (two_j2, two_m2, "m2 - j2"),
        (two_j, two_m, "m - j"),
    ] {
        if (two_jx as i64 + two_mx as i64) % 2 != 0 {
            return Err(Error::HalfIntegerMismatch(format!(
                "{name} must be an integer offset"
            )));
        }
        if two_mx.unsigned_abs() > two_jx {
            return Err(Error::ProjectionOutOfRange {
                two_j: two_jx,
                two_m: two_mx,
            });
        }
    }
    if !(two_j1 + two_j2 + two_j).is_multiple_of(2) {
        return Err(Error::HalfIntegerMismatch(
            "j1 + j2 + j must be an integer".to_string(),
        ));
    }
    if two_j1.abs_diff(two_j2) > two_j || two_j > two_j1 + two_j2 {
        return Err(Error::TriangleViolation(two_j1, two_j2, two_j));
    }
    if two_m1 + two_m2 != two_m {
        return Ok(0.0);
    }

    // everything below is in undoubled (integer) units
    let j1pj2mj = i64::from(two_j1 + two_j2 - two_j) / 2;
    let j1mj2pj = (i64::from(two_j1) - i64::from(two_j2) + i64::from(two_j)) / 2;
    let mj1pj2pj = (i64::from(two_j2) - i64::from(two_j1) + i64::from(two_j)) / 2;
    let j1pm1 = (i64::from(two_j1) + i64::from(two_m1)) / 2;
    let j1mm1 = (i64::from(two_j1) - i64::from(two_m1)) / 2;
    let j2pm2 = (i64::from(two_j2) + i64::from(two_m2)) / 2;
    let j2mm2 = (i64::from(two_j2) - i64::from(two_m2)) / 2;
    let jpm = (i64::from(two_j) + i64::from(two_m)) / 2;
    let jmm = (i64::from(two_j) - i64::from(two_m)) / 2;
    let jmj2pm1 = jpm - j2pm2; // j - j2 + m1
    let jmj1mm2 = jmm - j1mm1; // j - j1 - m2

    let k_min = 0.max(-jmj2pm1).max(-jmj1mm2);
    let k_max = j1pj2mj.min(j1mm1).min(j2pm2);
    if k_min > k_max {
        return Ok(0.0);
    }

    let mut series = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(j1pj2mj - k)
            * factorial(j1mm1 - k)
            * factorial(j2pm2 - k)
            * factorial(jmj2pm1 + k)
            * factorial(jmj1mm2 + k);
        let numer = if k % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        series += BigRational::new(numer, denom);
    }
    if series.is_zero() {
        return Ok(0.0);
    }

    let prefactor = BigRational::new(
        BigInt::from(two_j as i64 + 1)
            * factorial(j1pj2mj)
            * factorial(j1mj2pj)
            * factorial(mj1pj2pj)
            * factorial(j1pm1)
            * factorial(j1mm1)
            * factorial(j2pm2)
            * factorial(j2mm2)
            * factorial(jpm)
            * factorial(jmm),
        factorial((i64::from(two_j1) + i64::from(two_j2) + i64::from(two_j)) / 2 + 1),
    );
    let sign = if series.numer().sign() == Sign::Minus {
        -1.0
    } else {
        1.0
    };
    let square = prefactor * &series * &series;
    Ok(sign * big_ratio_to_f64(&square).sqrt())
}
