//! The sets `K = {0} ∪ {±p^{-(a_n+1)}}` in the circle group and their polars.
//!
//! Characters of `T` are multiplications `x ↦ n·x`. For `n ≠ 0` the value at
//! `x_k = p^{-(a_k+1)}` lies in `T_+` automatically once `p^{a_k+1} >= 4|n|`,
//! so polar membership only ever depends on finitely many terms. When a spec
//! is a prefix, a character is reported to be in the polar only if it is in
//! the polar for every strictly increasing continuation; certificates built
//! from such characters therefore hold for the infinite set.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{big_pow, p_power_exponent, ratio_in_t_plus};
use crate::circle::{balanced_expand, CircleError, CirclePoint};
use crate::separation::{ProbeReport, Separation, SeparatorOrigin, VerificationReport};
use crate::sequence::{SequenceSpec, TermStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("prefix too short to decide: terms must be listed through a = {needed_through}")]
    PrefixTooShort { needed_through: u64 },
    #[error("multiplier {m} outside 1..={max}")]
    MultiplierOutOfRange { m: u64, max: u64 },
    #[error("{what} needs p >= 5, got {p}")]
    PrimeTooSmall { what: &'static str, p: u64 },
    #[error("density probes are for p = 2 or 3, got {0}")]
    NotProbePrime(u64),
    #[error("digit filter needs an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("{0} belongs to the set, nothing to separate")]
    Member(CirclePoint),
    #[error("{0} belongs to the set for some continuation of the prefix")]
    PossibleMember(CirclePoint),
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// The character `x ↦ n·x` of `T`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntCharacter(BigInt);

impl IntCharacter {
    pub fn new(n: impl Into<BigInt>) -> Self {
        IntCharacter(n.into())
    }

    /// `η_k = p^k`.
    pub fn eta(p: u64, k: u32) -> Self {
        IntCharacter(big_pow(p, k))
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }

    pub fn eval(&self, x: &CirclePoint) -> CirclePoint {
        x.int_scale(&self.0)
    }
}

impl fmt::Display for IntCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for IntCharacter {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(IntCharacter)
    }
}

impl Serialize for IntCharacter {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntCharacter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `±x_n = ±p^{-(a_n+1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPoint {
    pub index: usize,
    pub sign: i8,
    pub value: CirclePoint,
}

/// The listed points `±x_n` (0 is handled separately).
pub fn k_points(spec: &SequenceSpec) -> Vec<KPoint> {
    spec.terms()
        .iter()
        .enumerate()
        .flat_map(|(index, &a)| {
            let x = CirclePoint::new(BigInt::one(), big_pow(spec.p(), a as u32 + 1))
                .expect("positive denominator");
            let neg = -&x;
            [
                KPoint {
                    index,
                    sign: 1,
                    value: x,
                },
                KPoint {
                    index,
                    sign: -1,
                    value: neg,
                },
            ]
        })
        .collect()
}

/// Whether `x` is in `K`: definitely, only for some continuation, or not at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointStatus {
    Member,
    PossibleMember,
    NonMember,
}

pub fn membership(spec: &SequenceSpec, x: &CirclePoint) -> PointStatus {
    if x.is_zero() {
        return PointStatus::Member;
    }
    if !x.numerator().abs().is_one() {
        return PointStatus::NonMember;
    }
    match p_power_exponent(x.denominator(), spec.p()) {
        Some(e) if e >= 1 => match spec.status(e as u64 - 1) {
            TermStatus::Listed => PointStatus::Member,
            TermStatus::Undetermined => PointStatus::PossibleMember,
            TermStatus::Absent => PointStatus::NonMember,
        },
        _ => PointStatus::NonMember,
    }
}

/// Decides `n ∈ K^▷`, i.e. `n·x ∈ T_+` for every point of `K`.
///
/// Only terms with `p^{a+1} < 4|n|` are examined. In prefix mode a character
/// that passes every listed term but fails at some exponent a continuation
/// might add is undecidable and reported as [`TorusError::PrefixTooShort`].
pub fn char_in_polar(n: &IntCharacter, spec: &SequenceSpec) -> Result<bool, TorusError> {
    let n = n.value();
    if n.is_zero() {
        return Ok(true);
    }
    let reach: BigInt = n.abs() * 4u32;
    let p = spec.p();
    let mut den = BigInt::from(p);
    let mut a = 0u64;
    let mut undecided = None;
    while den < reach {
        match spec.status(a) {
            TermStatus::Absent => {}
            status => {
                if !ratio_in_t_plus(n, &den) {
                    if status == TermStatus::Listed {
                        return Ok(false);
                    }
                    undecided = Some(a);
                }
            }
        }
        den *= p;
        a += 1;
    }
    match undecided {
        Some(_) => Err(TorusError::PrefixTooShort {
            needed_through: a - 1,
        }),
        None => Ok(true),
    }
}

/// `J_{a,p,m} = {k : m·η_k ∈ K^▷}` in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyDescription {
    /// every `k`
    All,
    /// every `k` that is not a term of the sequence
    AllExceptTerms,
}

impl FamilyDescription {
    /// Whether level `k` belongs to the family, given the spec's knowledge of `k`.
    pub fn contains(self, spec: &SequenceSpec, k: u64) -> Option<bool> {
        match (self, spec.status(k)) {
            (FamilyDescription::All, _) => Some(true),
            (FamilyDescription::AllExceptTerms, TermStatus::Listed) => Some(false),
            (FamilyDescription::AllExceptTerms, TermStatus::Absent) => Some(true),
            (FamilyDescription::AllExceptTerms, TermStatus::Undetermined) => None,
        }
    }
}

/// `All` when `m/p ∈ T_+`, otherwise `AllExceptTerms`; needs `1 <= m <= p-1`.
pub fn polar_family(spec: &SequenceSpec, m: u64) -> Result<FamilyDescription, TorusError> {
    let p = spec.p();
    if m == 0 || m >= p {
        return Err(TorusError::MultiplierOutOfRange { m, max: p - 1 });
    }
    Ok(if 4 * m.min(p - m) <= p {
        FamilyDescription::All
    } else {
        FamilyDescription::AllExceptTerms
    })
}

/// Balanced digits `c_1..c_d` of a point with denominator `p^d`.
fn digits(spec: &SequenceSpec, x: &CirclePoint) -> Result<Vec<i64>, TorusError> {
    if spec.p() % 2 == 0 {
        return Err(TorusError::EvenPrime(spec.p()));
    }
    Ok(balanced_expand(x, spec.p())?.digits().to_vec())
}

/// Levels `k` (digit position `k+1`) where the expansion of `x` is not of the
/// form `Σ ε_n x_n` with `ε_n ∈ {-1, 0, 1}`.
fn filter_violations(spec: &SequenceSpec, digits: &[i64]) -> Vec<u32> {
    digits
        .iter()
        .enumerate()
        .filter(|(i, &c)| {
            c != 0 && (c.abs() > 1 || spec.status(*i as u64) == TermStatus::Absent)
        })
        .map(|(i, _)| i as u32)
        .collect()
}

/// Necessary condition for membership in the bipolar: balanced digits in
/// `{-1, 0, 1}`, nonzero only at positions `a_n + 1`.
pub fn digit_filter(spec: &SequenceSpec, x: &CirclePoint) -> Result<bool, TorusError> {
    let ds = digits(spec, x)?;
    Ok(filter_violations(spec, &ds).is_empty())
}

/// A polar character together with the construction that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusCandidate {
    pub character: IntCharacter,
    pub origin: SeparatorOrigin,
}

fn single_index_candidates(p: u64, levels: &[u32]) -> Vec<TorusCandidate> {
    levels
        .iter()
        .flat_map(|&k| {
            (1..p).map(move |m| TorusCandidate {
                character: IntCharacter(big_pow(p, k) * m),
                origin: SeparatorOrigin::DigitFilter {
                    level: k,
                    multiplier: m,
                },
            })
        })
        .collect()
}

fn pair_candidates(p: u64, digits: &[i64]) -> Vec<TorusCandidate> {
    let nonzero: Vec<u32> = digits
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| i as u32)
        .collect();
    let Some((&k1, rest)) = nonzero.split_first() else {
        return Vec::new();
    };
    let eta = |k: u32| big_pow(p, k);
    let mut out = Vec::new();
    for &k2 in rest {
        for sign in [1i8, -1] {
            let combo = eta(k1) + eta(k2) * sign;
            for m in 1..=p / 4 {
                out.push(TorusCandidate {
                    character: IntCharacter(&combo * m),
                    origin: SeparatorOrigin::PairSum {
                        first: k1,
                        second: k2,
                        multiplier: m,
                        sign,
                    },
                });
            }
        }
        if k2 > k1 + 1 {
            for sign in [1i8, -1] {
                out.push(TorusCandidate {
                    character: IntCharacter((eta(k1) + eta(k2) * sign) * (p - 1)),
                    origin: SeparatorOrigin::PairPMinusOne {
                        first: k1,
                        second: k2,
                        sign,
                    },
                });
            }
        }
        if p == 7 && k2 == k1 + 1 {
            let rho = (digits[k1 as usize] * digits[k2 as usize]).signum() as i8;
            out.push(TorusCandidate {
                character: IntCharacter(eta(k1) * (7 + rho as i64)),
                origin: SeparatorOrigin::AdjacentSeven { first: k1, rho },
            });
        }
    }
    out
}

/// Characters suggested by the quasi-convexity argument for `p >= 5`:
/// single-index multiples `m·p^k` at nonzero digit positions, and the pair
/// combinations built from the smallest nonzero position `k1` and each later
/// one `k2`. Only characters verified to lie in the polar are returned.
pub fn proof_guided_separators(
    spec: &SequenceSpec,
    x: &CirclePoint,
) -> Result<Vec<TorusCandidate>, TorusError> {
    let p = spec.p();
    if p < 5 {
        return Err(TorusError::PrimeTooSmall {
            what: "proof-guided separators",
            p,
        });
    }
    let ds = digits(spec, x)?;
    let levels: Vec<u32> = (0..ds.len() as u32).filter(|&k| ds[k as usize] != 0).collect();
    let mut candidates = single_index_candidates(p, &levels);
    candidates.extend(pair_candidates(p, &ds));
    Ok(candidates
        .into_iter()
        .filter(|c| char_in_polar(&c.character, spec) == Ok(true))
        .collect())
}

/// `character ∈ K^▷` and `character(point) = value ∉ T_+`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub point: CirclePoint,
    pub character: IntCharacter,
    pub value: CirclePoint,
    pub origin: SeparatorOrigin,
}

impl SeparationCertificate {
    /// Recomputes the value and the polar membership.
    pub fn verify(&self, spec: &SequenceSpec) -> bool {
        let value = self.character.eval(&self.point);
        value == self.value
            && !value.in_t_plus()
            && char_in_polar(&self.character, spec) == Ok(true)
    }
}

fn try_candidate(
    spec: &SequenceSpec,
    x: &CirclePoint,
    character: IntCharacter,
    origin: SeparatorOrigin,
) -> Option<SeparationCertificate> {
    let value = character.eval(x);
    if value.in_t_plus() || char_in_polar(&character, spec) != Ok(true) {
        return None;
    }
    Some(SeparationCertificate {
        point: x.clone(),
        character,
        value,
        origin,
    })
}

/// Finds `n ∈ K^▷` with `n·x ∉ T_+`: digit-filter characters first, then the
/// proof-guided candidates, then every `1 <= n <= budget`.
pub fn separate(
    spec: &SequenceSpec,
    x: &CirclePoint,
    budget: u64,
) -> Result<Separation<SeparationCertificate>, TorusError> {
    match membership(spec, x) {
        PointStatus::Member => return Err(TorusError::Member(x.clone())),
        PointStatus::PossibleMember => return Err(TorusError::PossibleMember(x.clone())),
        PointStatus::NonMember => {}
    }
    let p = spec.p();
    let p_power = p_power_exponent(x.denominator(), p).is_some();

    if p_power && p % 2 == 1 {
        let ds = digits(spec, x)?;
        for cand in single_index_candidates(p, &filter_violations(spec, &ds)) {
            if let Some(cert) = try_candidate(spec, x, cand.character, cand.origin) {
                return Ok(Separation::Separated { certificate: cert });
            }
        }
        if p >= 5 {
            for cand in proof_guided_separators(spec, x)? {
                if let Some(cert) = try_candidate(spec, x, cand.character, cand.origin) {
                    return Ok(Separation::Separated { certificate: cert });
                }
            }
        }
    }

    for n in 1..=budget {
        let character = IntCharacter(BigInt::from(n));
        if ratio_in_t_plus(&(x.numerator() * n), x.denominator()) {
            continue;
        }
        if let Some(cert) = try_candidate(spec, x, character, SeparatorOrigin::Scan) {
            return Ok(Separation::Separated { certificate: cert });
        }
    }
    Ok(Separation::UnseparatedUpTo { budget })
}

/// `4·p^{D+1}`, enough for every character the pair constructions use at depth `D`.
pub fn default_budget(p: u64, depth: u32) -> u64 {
    4 * p.pow(depth + 1)
}

/// The points `j / p^D`, `0 <= j < p^D`, in order of `j`.
fn grid(p: u64, depth: u32) -> Vec<CirclePoint> {
    let den = big_pow(p, depth);
    (0..p.pow(depth))
        .map(|j| CirclePoint::new(BigInt::from(j), den.clone()).expect("positive"))
        .collect()
}

/// Separates every point of denominator dividing `p^D` that is not in `K`.
pub fn verify_quasi_convex(
    spec: &SequenceSpec,
    depth: u32,
    budget: Option<u64>,
) -> Result<VerificationReport<SeparationCertificate>, TorusError> {
    let p = spec.p();
    if p < 5 {
        return Err(TorusError::PrimeTooSmall {
            what: "quasi-convexity sweeps",
            p,
        });
    }
    if depth == 0 {
        return Err(TorusError::ZeroDepth);
    }
    let budget = budget.unwrap_or_else(|| default_budget(p, depth));
    let points = grid(p, depth);
    let outcomes: Vec<Option<Result<Separation<SeparationCertificate>, TorusError>>> = points
        .par_iter()
        .map(|x| match membership(spec, x) {
            PointStatus::NonMember => Some(separate(spec, x, budget)),
            _ => None,
        })
        .collect();

    let mut report = VerificationReport {
        spec: spec.clone(),
        depth,
        budget,
        points: points.len() as u64,
        members_skipped: 0,
        certificates: Vec::new(),
        unseparated: Vec::new(),
    };
    for (x, outcome) in points.iter().zip(outcomes) {
        match outcome {
            None => report.members_skipped += 1,
            Some(result) => match result? {
                Separation::Separated { certificate } => report.certificates.push(certificate),
                Separation::UnseparatedUpTo { .. } => report.unseparated.push(x.to_string()),
            },
        }
    }
    Ok(report)
}

/// Bounded search for separators of non-members when `p ∈ {2, 3}`.
pub fn density_probe(
    spec: &SequenceSpec,
    depth: u32,
    budget: u64,
) -> Result<ProbeReport<SeparationCertificate>, TorusError> {
    let p = spec.p();
    if p != 2 && p != 3 {
        return Err(TorusError::NotProbePrime(p));
    }
    if depth == 0 {
        return Err(TorusError::ZeroDepth);
    }
    let targets: Vec<CirclePoint> = grid(p, depth)
        .into_iter()
        .filter(|x| membership(spec, x) == PointStatus::NonMember)
        .collect();
    let outcomes = targets
        .par_iter()
        .map(|x| separate(spec, x, budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProbeReport {
        spec: spec.clone(),
        depth,
        budget,
        probed: targets.len() as u64,
        separations: outcomes
            .into_iter()
            .filter_map(|s| match s {
                Separation::Separated { certificate } => Some(certificate),
                Separation::UnseparatedUpTo { .. } => None,
            })
            .collect(),
    })
}

/// `n mod p^D` determines `n·x` for points of denominator `p^D`.
pub fn reduce_character(n: &IntCharacter, p: u64, depth: u32) -> BigInt {
    n.value().mod_floor(&big_pow(p, depth))
}
