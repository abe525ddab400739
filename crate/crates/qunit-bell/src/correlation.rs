//! Two-sided correlation functions of parity-bit observables on the
//! spin-s singlet, and their classification into distinct functional forms.
//!
//! With both sides carrying the same mask and quantization axes separated
//! by theta, the expectation reduces to a signed quadratic form over the
//! squared d-matrix:
//!
//!   C(theta) = (1/N) sum_{m,n} (-1)^{f_m + f_n} |d^s_{-m,n}(theta)|^2
//!
//! C depends on the axes only through cos(theta) and is a polynomial in it
//! of degree at most N-1. Different masks can share one C; masks are
//! grouped by a fingerprint of correlation values at fixed probe angles.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{enumerate_independent, ParityMask};
use crate::spin::{wigner_d_squared, SpinLabel};

/// Componentwise tolerance for treating two fingerprints as one function.
const DEDUP_TOL: f64 = 1e-9;
/// Groups closer than this (max-norm) abort the run as ambiguous.
const DEDUP_GUARD: f64 = 1e-4;
/// Hard cap on the off-node interpolation residual.
const RESIDUAL_ABORT: f64 = 1e-6;
/// Exhaustive enumeration guard for dedup and surveys.
pub(crate) const EXHAUSTIVE_CAP_TWO_S: u32 = 28;

/// C(theta) for one mask (same mask on both sides).
pub fn correlation(mask: &ParityMask, theta: f64) -> Result<f64> {
    let table = wigner_d_squared(mask.spin(), theta)?;
    let n = mask.spin().dimension();
    let sq = table.squared();
    // row r of the table is m' = r - s; the state pairs m with -m, so the
    // sign weight on rows runs in reverse order
    let mut total = 0.0;
    for r in 0..n {
        let w = mask.sign_at_row(n - 1 - r);
        let mut row_sum = 0.0;
        for c in 0..n {
            row_sum += mask.sign_at_row(c) * sq[(r, c)];
        }
        total += w * row_sum;
    }
    Ok(total / n as f64)
}

/// C as a polynomial in x = cos(theta), coefficients c_0 .. c_{N-1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosPoly {
    pub spin: SpinLabel,
    pub coeffs: Vec<f64>,
}

impl CosPoly {
    /// Evaluate at x = cos(theta).
    pub fn eval_at_cos(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_at_cos(theta.cos())
    }
}

/// Monomial coefficients of the Chebyshev polynomials T_0 .. T_deg.
/// Exact integers; T_{k+1} = 2 x T_k - T_{k-1}.
fn chebyshev_rows(deg: usize) -> Vec<Vec<i128>> {
    let mut rows: Vec<Vec<i128>> = Vec::with_capacity(deg + 1);
    rows.push(vec![1]);
    if deg >= 1 {
        rows.push(vec![0, 1]);
    }
    for k in 2..=deg {
        let mut next = vec![0i128; k + 1];
        for (i, &c) in rows[k - 1].iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, &c) in rows[k - 2].iter().enumerate() {
            next[i] -= c;
        }
        rows.push(next);
    }
    rows
}

/// Interpolate the exact degree-(N-1) polynomial through the correlation
/// values at the N Chebyshev nodes x_j = cos(pi (j+1/2)/N).
///
/// The node system is inverted in the Chebyshev basis (a discrete cosine
/// transform, orthogonal and exactly conditioned) and converted to monomial
/// coefficients with exact integer Chebyshev expansions. The fit is then
/// checked at 3N off-node angles; a residual beyond 1e-6 means the
/// correlation is not the expected polynomial in cos(theta) and is an error.
pub fn correlation_poly(mask: &ParityMask) -> Result<CosPoly> {
    let spin = mask.spin();
    let n = spin.dimension();
    let nf = n as f64;
    let values: Vec<f64> = (0..n)
        .map(|j| correlation(mask, std::f64::consts::PI * (j as f64 + 0.5) / nf))
        .collect::<Result<_>>()?;

    // Chebyshev coefficients a_k via the DCT pair on these nodes
    let mut cheb = vec![0.0; n];
    for (k, a) in cheb.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, v) in values.iter().enumerate() {
            acc += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / nf).cos();
        }
        *a = acc * if k == 0 { 1.0 } else { 2.0 } / nf;
    }

    let rows = chebyshev_rows(n - 1);
    let mut coeffs = vec![0.0; n];
    for (k, row) in rows.iter().enumerate() {
        for (i, &t) in row.iter().enumerate() {
            if t != 0 {
                coeffs[i] += cheb[k] * t as f64;
            }
        }
    }
    let poly = CosPoly { spin, coeffs };

    // off-node consistency check
    let checks = 3 * n;
    for t in 0..checks {
        let theta = std::f64::consts::PI * (t as f64 + 1.0) / (checks as f64 + 1.0);
        let residual = (poly.eval(theta) - correlation(mask, theta)?).abs();
        if residual > RESIDUAL_ABORT {
            return Err(Error::ResidualGuard { theta, residual });
        }
    }
    Ok(poly)
}

/// Correlation values at N+2 fixed probe angles; the dedup key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationFingerprint {
    pub spin: SpinLabel,
    pub values: Vec<f64>,
}

impl CorrelationFingerprint {
    /// Largest componentwise deviation from `other`.
    pub fn distance(&self, other: &CorrelationFingerprint) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn matches(&self, other: &CorrelationFingerprint) -> bool {
        self.distance(other) <= DEDUP_TOL
    }
}

pub fn fingerprint(mask: &ParityMask) -> Result<CorrelationFingerprint> {
    let spin = mask.spin();
    let probes = spin.dimension() + 2;
    let values = (0..probes)
        .map(|j| {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / (probes as f64 + 1.0);
            correlation(mask, theta)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CorrelationFingerprint { spin, values })
}

/// Canonical masks partitioned by correlation function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationGroups {
    pub spin: SpinLabel,
    /// Each group lists its canonical P values ascending; groups are ordered
    /// by their first member.
    pub groups: Vec<Vec<u64>>,
    /// Smallest observed inter-group distance (max-norm on fingerprints).
    pub min_separation: f64,
}

impl CorrelationGroups {
    pub fn distinct_count(&self) -> usize {
        self.groups.len()
    }

    /// Group index containing the canonical mask P, if any.
    pub fn group_of(&self, p: u64) -> Option<usize> {
        self.groups.iter().position(|g| g.binary_search(&p).is_ok())
    }
}

/// Group every canonical mask of this spin by fingerprint equality.
///
/// Fingerprints are evaluated in parallel; the merge runs in ascending-P
/// order so the grouping is deterministic. Aborts if two distinct groups
/// approach within 1e-4 of each other, which would make the partition
/// depend on the tolerance.
pub fn distinct_correlations(spin: SpinLabel) -> Result<CorrelationGroups> {
    if spin.two_s() > EXHAUSTIVE_CAP_TWO_S {
        return Err(Error::ExhaustiveCap {
            two_s: spin.two_s(),
            cap: EXHAUSTIVE_CAP_TWO_S,
        });
    }
    let masks: Vec<ParityMask> = enumerate_independent(spin).map(|c| c.mask()).collect();
    let prints: Vec<CorrelationFingerprint> =
        masks.par_iter().map(fingerprint).collect::<Result<_>>()?;

    let mut reps: Vec<(usize, CorrelationFingerprint)> = Vec::new();
    let mut groups: Vec<Vec<u64>> = Vec::new();
    for (mask, print) in masks.iter().zip(&prints) {
        match reps.iter().find(|(_, rep)| rep.matches(print)) {
            Some(&(gid, _)) => groups[gid].push(mask.p()),
            None => {
                reps.push((groups.len(), print.clone()));
                groups.push(vec![mask.p()]);
            }
        }
    }

    let mut min_separation = f64::INFINITY;
    let mut closest = (0u64, 0u64);
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let d = reps[i].1.distance(&reps[j].1);
            if d < min_separation {
                min_separation = d;
                closest = (groups[i][0], groups[j][0]);
            }
        }
    }
    if min_separation < DEDUP_GUARD {
        return Err(Error::DedupAmbiguous {
            p_a: closest.0,
            p_b: closest.1,
            distance: min_separation,
        });
    }
    Ok(CorrelationGroups {
        spin,
        groups,
        min_separation,
    })
}
