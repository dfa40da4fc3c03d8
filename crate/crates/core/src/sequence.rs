//! Increasing exponent sequences `a_0 < a_1 < …` paired with a prime `p`.
//!
//! The sets studied here are built from infinite sequences, but only a finite
//! prefix can be written down. In [`TailMode::Prefix`] the listed terms are the
//! beginning of some unknown strictly increasing continuation, so every later
//! term is known only to exceed the last listed one. In [`TailMode::Exact`] the
//! listed terms are the whole sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("sequence must be strictly increasing: a_{index} = {value} follows {previous}")]
    NotIncreasing { index: usize, value: u64, previous: u64 },
    #[error("cannot parse sequence spec {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// The listed terms start an infinite strictly increasing sequence.
    Prefix,
    /// The listed terms are all the terms.
    Exact,
}

/// What the spec says about whether some exponent occurs in the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermStatus {
    Listed,
    Absent,
    /// Beyond the listed prefix: some continuation contains it, another does not.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    p: u64,
    terms: Vec<u64>,
    mode: TailMode,
}

impl SequenceSpec {
    pub fn new(p: u64, terms: Vec<u64>, mode: TailMode) -> Result<Self, SequenceError> {
        if !is_prime(p) {
            return Err(SequenceError::NotPrime(p));
        }
        for (i, w) in terms.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(SequenceError::NotIncreasing {
                    index: i + 1,
                    value: w[1],
                    previous: w[0],
                });
            }
        }
        Ok(SequenceSpec { p, terms, mode })
    }

    pub fn prefix(p: u64, terms: Vec<u64>) -> Result<Self, SequenceError> {
        Self::new(p, terms, TailMode::Prefix)
    }

    /// The first `len` terms of `a_n = n`, as a prefix.
    pub fn naturals(p: u64, len: u64) -> Result<Self, SequenceError> {
        Self::new(p, (0..len).collect(), TailMode::Prefix)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn mode(&self) -> TailMode {
        self.mode
    }

    pub fn last(&self) -> Option<u64> {
        self.terms.last().copied()
    }

    pub fn status(&self, a: u64) -> TermStatus {
        if self.terms.binary_search(&a).is_ok() {
            return TermStatus::Listed;
        }
        match (self.mode, self.last()) {
            (TailMode::Exact, _) => TermStatus::Absent,
            (TailMode::Prefix, Some(last)) if a < last => TermStatus::Absent,
            (TailMode::Prefix, _) => TermStatus::Undetermined,
        }
    }

    /// Exponents `a <= bound` that are, or might be, terms of the sequence.
    pub fn possible_terms_through(&self, bound: u64) -> impl Iterator<Item = (u64, TermStatus)> + '_ {
        (0..=bound)
            .map(|a| (a, self.status(a)))
            .filter(|(_, s)| *s != TermStatus::Absent)
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}; a=", self.p)?;
        for (i, a) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        if self.mode == TailMode::Exact {
            f.write_str("; mode=exact")?;
        }
        Ok(())
    }
}

/// Parses `p=5; a=0,1,2,4` with an optional `; mode=exact|prefix`.
/// `a=0..4` is shorthand for `a=0,1,2,3,4`.
impl FromStr for SequenceSpec {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| SequenceError::Parse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let mut p = None;
        let mut terms = None;
        let mut mode = TailMode::Prefix;
        for part in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let value = value.trim();
            match key.trim() {
                "p" => p = Some(value.parse::<u64>().map_err(|_| err("bad prime"))?),
                "a" => terms = Some(parse_terms(value).ok_or_else(|| err("bad term list"))?),
                "mode" => {
                    mode = match value {
                        "prefix" => TailMode::Prefix,
                        "exact" => TailMode::Exact,
                        _ => return Err(err("mode must be prefix or exact")),
                    }
                }
                _ => return Err(err("unknown key")),
            }
        }
        let p = p.ok_or_else(|| err("missing p"))?;
        SequenceSpec::new(p, terms.unwrap_or_default(), mode)
    }
}

fn parse_terms(value: &str) -> Option<Vec<u64>> {
    if value.is_empty() {
        return Some(Vec::new());
    }
    if let Some((lo, hi)) = value.split_once("..") {
        let lo: u64 = lo.trim().parse().ok()?;
        let hi: u64 = hi.trim().parse().ok()?;
        return Some((lo..=hi).collect());
    }
    value
        .split(',')
        .map(|t| t.trim().parse::<u64>().ok())
        .collect()
}

impl Serialize for SequenceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SequenceSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
