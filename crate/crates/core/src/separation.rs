//! Report types shared by the torus and p-adic separation sweeps.

use serde::{Deserialize, Serialize};

use crate::sequence::SequenceSpec;

/// Which construction produced a separating character.
///
/// Levels are the indices `k` of `η_k = p^k` (torus) or `ζ_k = p^{-(k+1)}`
/// (p-adic). `first`/`second` are the two smallest nonzero digit positions
/// used by the pair constructions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum SeparatorOrigin {
    /// `m·η_k` or `m·ζ_k` aimed at a single digit position.
    DigitFilter { level: u32, multiplier: u64 },
    /// `m(η_{k1} ± η_{k2})` with `m <= ⌊p/4⌋`.
    PairSum {
        first: u32,
        second: u32,
        multiplier: u64,
        sign: i8,
    },
    /// `(p-1)(η_{k1} ± η_{k2})`, used when `k2 > k1 + 1`.
    PairPMinusOne { first: u32, second: u32, sign: i8 },
    /// `p = 7`, adjacent digits: `(7+ρ)η_{k1}` or `(7ρ+1)ζ_{k1+1}`.
    AdjacentSeven { first: u32, rho: i8 },
    /// Found by exhaustive scan.
    Scan,
}

impl SeparatorOrigin {
    /// Case label and multiplier, ignoring positions.
    pub fn shape(&self) -> (&'static str, u64) {
        match self {
            SeparatorOrigin::DigitFilter { multiplier, .. } => ("digit-filter", *multiplier),
            SeparatorOrigin::PairSum { multiplier, .. } => ("pair-sum", *multiplier),
            SeparatorOrigin::PairPMinusOne { .. } => ("pair-p-minus-one", 0),
            SeparatorOrigin::AdjacentSeven { rho, .. } => ("adjacent-seven", *rho as u64),
            SeparatorOrigin::Scan => ("scan", 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Separation<C> {
    Separated { certificate: C },
    /// No character in the searched range separates the point.
    UnseparatedUpTo { budget: u64 },
}

impl<C> Separation<C> {
    pub fn certificate(&self) -> Option<&C> {
        match self {
            Separation::Separated { certificate } => Some(certificate),
            Separation::UnseparatedUpTo { .. } => None,
        }
    }

    pub fn is_separated(&self) -> bool {
        self.certificate().is_some()
    }
}

/// Result of a full sweep that every eligible point is separated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport<C> {
    pub spec: SequenceSpec,
    pub depth: u32,
    pub budget: u64,
    pub points: u64,
    /// Points that are, or under some continuation of the prefix could be, in the set.
    pub members_skipped: u64,
    pub certificates: Vec<C>,
    pub unseparated: Vec<String>,
}

impl<C> VerificationReport<C> {
    pub fn passed(&self) -> bool {
        self.unseparated.is_empty()
    }

    pub fn separated(&self) -> u64 {
        self.certificates.len() as u64
    }
}

/// Evidence for qc-density: how many probed points a bounded search separates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport<C> {
    pub spec: SequenceSpec,
    pub depth: u32,
    pub budget: u64,
    pub probed: u64,
    pub separations: Vec<C>,
}

impl<C> ProbeReport<C> {
    /// Zero separations: consistent with the set being qc-dense (not a proof).
    pub fn consistent_with_density(&self) -> bool {
        self.separations.is_empty()
    }
}
