//! Parity-bit observables.
//!
//! A mask assigns one bit f_m to every level m of a spin-s system; the
//! observable is the diagonal matrix with entries (-1)^{f_m}. Bit i of the
//! packed integer P stores f_m for m = i - s, so bit 0 belongs to m = -s
//! and the top bit (i = 2s) to m = +s. This ordering is what makes the
//! near-identity observable f_m = 1 - delta_{m,-s} come out as P = 2^N - 2
//! (6 for spin 1, 14 for spin 3/2) and is assumed throughout.
//!
//! Globally flipping every sign leaves every correlation unchanged, so P
//! and its bitwise complement describe the same physics. The canonical
//! representative of such a pair is the member whose m = +s bit is set;
//! nontrivial canonical masks are exactly P in [2^(N-1), 2^N - 2].

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spin::{cg_coefficient, SpinLabel};

/// A parity-bit mask over the N levels of one spin.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParityMask {
    spin: SpinLabel,
    bits: u64,
}

impl fmt::Debug for ParityMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParityMask(s={}, P={:#b})", self.spin, self.bits)
    }
}

impl Serialize for ParityMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ParityMask", 2)?;
        st.serialize_field("spin", &self.spin)?;
        st.serialize_field("p", &self.bits)?;
        st.end()
    }
}

impl ParityMask {
    /// Build a mask from its packed integer, 0 <= P < 2^N.
    pub fn from_integer(spin: SpinLabel, p: u64) -> Result<Self> {
        let n = spin.dimension();
        if p >= (1u64 << n) {
            return Err(Error::MaskOutOfRange { p, n });
        }
        Ok(ParityMask { spin, bits: p })
    }

    pub fn spin(self) -> SpinLabel {
        self.spin
    }

    pub fn p(self) -> u64 {
        self.bits
    }

    /// f_m for the level with doubled projection 2m.
    pub fn bit(self, two_m: i32) -> bool {
        (self.bits >> self.spin.row_of_two_m(two_m)) & 1 == 1
    }

    /// (-1)^{f_m} by row index (ascending m).
    pub fn sign_at_row(self, row: usize) -> f64 {
        if (self.bits >> row) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// Sign vector in ascending-m order.
    pub fn signs(self) -> Vec<f64> {
        (0..self.spin.dimension())
            .map(|r| self.sign_at_row(r))
            .collect()
    }

    pub fn complement(self) -> ParityMask {
        let n = self.spin.dimension();
        ParityMask {
            spin: self.spin,
            bits: self.bits ^ ((1u64 << n) - 1),
        }
    }

    /// All-zeros or all-ones: +/- identity, constant correlation.
    pub fn is_trivial(self) -> bool {
        let n = self.spin.dimension();
        self.bits == 0 || self.bits == (1u64 << n) - 1
    }

    /// Trace of the observable, sum_m (-1)^{f_m} = N - 2 popcount(P).
    pub fn identity_overlap(self) -> i64 {
        self.spin.dimension() as i64 - 2 * i64::from(self.bits.count_ones())
    }

    /// Overlap with the rank-k diagonal tensor moment, up to the
    /// mask-independent reduced matrix element:
    /// sum_m (-1)^{f_m} <s m; k 0 | s m>.
    ///
    /// Vanishes identically for constant masks; generically nonzero
    /// otherwise. Note the Clebsch-Gordan factor depends on m (each term in
    /// the trace carries its own projection).
    pub fn tensor_overlap(self, k: u32) -> Result<f64> {
        let two_s = self.spin.two_s();
        if k == 0 || 2 * k > 2 * two_s {
            return Err(Error::RankOutOfRange { k, max: two_s });
        }
        let mut total = 0.0;
        for two_m in self.spin.two_m_values() {
            let row = self.spin.row_of_two_m(two_m);
            total += self.sign_at_row(row) * cg_coefficient(two_s, 2 * k, two_s, two_m, 0, two_m)?;
        }
        Ok(total)
    }

    /// The member of {P, complement(P)} whose m = +s bit is set.
    pub fn canonicalize(self) -> Result<CanonicalMask> {
        if self.is_trivial() {
            return Err(Error::TrivialMask { p: self.bits });
        }
        let top = 1u64 << (self.spin.dimension() - 1);
        let mask = if self.bits & top != 0 {
            self
        } else {
            self.complement()
        };
        Ok(CanonicalMask(mask))
    }
}

/// A nontrivial mask in canonical form: top bit set, not all-ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalMask(ParityMask);

impl CanonicalMask {
    pub fn mask(self) -> ParityMask {
        self.0
    }

    pub fn spin(self) -> SpinLabel {
        self.0.spin
    }

    pub fn p(self) -> u64 {
        self.0.bits
    }
}

impl Serialize for CanonicalMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// All 2^(N-1) - 1 canonical masks, ascending by P.
pub fn enumerate_independent(spin: SpinLabel) -> impl Iterator<Item = CanonicalMask> {
    let n = spin.dimension();
    let lo = 1u64 << (n - 1);
    let hi = (1u64 << n) - 2;
    (lo..=hi).map(move |p| CanonicalMask(ParityMask { spin, bits: p }))
}
