//! Truncated p-adic integers and the sets `L = {0} ∪ {±p^{a_n}}`.
//!
//! A point of `Z/p^N` stands for the coset `x + p^N·J_p`. Characters of `J_p`
//! are the Prüfer elements `c/p^{k+1}`, acting by `x ↦ c·x/p^{k+1} mod 1`; a
//! character of level `k < N` is constant on cosets, so a sweep at depth `N`
//! certifies exactly the cosets that avoid `L`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{balanced_digits_lsb, big_pow, is_prime, ratio_in_t_plus, unsigned_digits_lsb};
use crate::circle::CirclePoint;
use crate::separation::{ProbeReport, Separation, SeparatorOrigin, VerificationReport};
use crate::sequence::{SequenceSpec, TermStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("digit {digit} at position {position} out of range for p = {p}")]
    DigitOutOfRange { digit: i64, position: usize, p: u64 },
    #[error("character of level {level} needs depth > {level}, point has depth {depth}")]
    InsufficientDepth { level: u32, depth: u32 },
    #[error("primes differ: {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("prefix too short to decide: terms must be listed through a = {needed_through}")]
    PrefixTooShort { needed_through: u64 },
    #[error("{what} needs p >= 5, got {p}")]
    PrimeTooSmall { what: &'static str, p: u64 },
    #[error("density probes are for p = 2 or 3, got {0}")]
    NotProbePrime(u64),
    #[error("digit filter needs an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("the coset of {0} meets the set, nothing to separate")]
    Member(PadicTrunc),
    #[error("the coset of {0} meets the set for some continuation of the prefix")]
    PossibleMember(PadicTrunc),
    #[error("cannot parse {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// An element of `Z/p^N` as digits `c_0..c_{N-1}`, least significant first.
///
/// Digits are balanced (`|c_i| <= (p-1)/2`) for odd `p` and in `{0, 1}` for `p = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicTrunc {
    p: u64,
    digits: Vec<i64>,
}

impl PadicTrunc {
    pub fn new(p: u64, digits: Vec<i64>) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if digits.is_empty() {
            return Err(PadicError::ZeroDepth);
        }
        let (lo, hi) = digit_range(p);
        if let Some((position, &digit)) = digits
            .iter()
            .enumerate()
            .find(|(_, &d)| d < lo || d > hi)
        {
            return Err(PadicError::DigitOutOfRange { digit, position, p });
        }
        Ok(PadicTrunc { p, digits })
    }

    /// `n mod p^depth`.
    pub fn from_integer(p: u64, depth: u32, n: &BigInt) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if depth == 0 {
            return Err(PadicError::ZeroDepth);
        }
        let digits = if p == 2 {
            unsigned_digits_lsb(n, p, depth as usize)
        } else {
            balanced_digits_lsb(n, p, depth as usize)
        };
        Ok(PadicTrunc { p, digits })
    }

    pub fn from_i64(p: u64, depth: u32, n: i64) -> Result<Self, PadicError> {
        Self::from_integer(p, depth, &BigInt::from(n))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.digits.len() as u32
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// `Σ c_i p^i` as an integer (may be negative for balanced digits).
    pub fn value(&self) -> BigInt {
        let p = BigInt::from(self.p);
        self.digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * &p + d)
    }

    /// The value reduced into `[0, p^N)`.
    pub fn residue(&self) -> BigInt {
        self.value().mod_floor(&big_pow(self.p, self.depth()))
    }

    /// The same integer at a larger depth (zero digits appended).
    pub fn lift(&self, depth: u32) -> Self {
        let mut digits = self.digits.clone();
        if (depth as usize) > digits.len() {
            digits.resize(depth as usize, 0);
        }
        PadicTrunc { p: self.p, digits }
    }

    /// Reduction to `Z/p^depth`, `depth <= N`.
    pub fn truncate(&self, depth: u32) -> Result<Self, PadicError> {
        if depth == 0 {
            return Err(PadicError::ZeroDepth);
        }
        let mut digits = self.digits.clone();
        digits.truncate(depth as usize);
        Ok(PadicTrunc { p: self.p, digits })
    }

    pub fn add(&self, other: &Self) -> Result<Self, PadicError> {
        if self.p != other.p {
            return Err(PadicError::PrimeMismatch(self.p, other.p));
        }
        let depth = self.depth().min(other.depth());
        Self::from_integer(self.p, depth, &(self.value() + other.value()))
    }

    pub fn neg(&self) -> Self {
        Self::from_integer(self.p, self.depth(), &-self.value()).expect("valid input")
    }
}

fn digit_range(p: u64) -> (i64, i64) {
    if p == 2 {
        (0, 1)
    } else {
        let h = ((p - 1) / 2) as i64;
        (-h, h)
    }
}

impl fmt::Display for PadicTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={};N={};digits=", self.p, self.depth())?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// `p=5;N=4;digits=1,0,-1,0`; `value=` may replace `digits=`.
impl FromStr for PadicTrunc {
    type Err = PadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PadicError::Parse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let (mut p, mut depth, mut digits, mut value) = (None, None, None, None);
        for part in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, v) = part.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let v = v.trim();
            match key.trim() {
                "p" => p = Some(v.parse::<u64>().map_err(|_| err("bad prime"))?),
                "N" => depth = Some(v.parse::<u32>().map_err(|_| err("bad depth"))?),
                "digits" => {
                    digits = Some(
                        v.split(',')
                            .map(|d| d.trim().parse::<i64>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| err("bad digit list"))?,
                    )
                }
                "value" => value = Some(v.parse::<BigInt>().map_err(|_| err("bad value"))?),
                _ => return Err(err("unknown key")),
            }
        }
        let p = p.ok_or_else(|| err("missing p"))?;
        match (digits, value) {
            (Some(ds), None) => {
                if depth.is_some_and(|n| n as usize != ds.len()) {
                    return Err(err("N does not match the number of digits"));
                }
                PadicTrunc::new(p, ds)
            }
            (None, Some(v)) => {
                PadicTrunc::from_integer(p, depth.ok_or_else(|| err("missing N"))?, &v)
            }
            _ => Err(err("give exactly one of digits= or value=")),
        }
    }
}

impl Serialize for PadicTrunc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PadicTrunc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The character `c·ζ_k`, i.e. the Prüfer element `c/p^{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PruferCharacter {
    p: u64,
    c: BigInt,
    level: u32,
}

impl PruferCharacter {
    /// `c` is reduced modulo `p^{k+1}`.
    pub fn new(p: u64, c: impl Into<BigInt>, level: u32) -> Self {
        let c = c.into().mod_floor(&big_pow(p, level + 1));
        PruferCharacter { p, c, level }
    }

    /// `ζ_k = 1/p^{k+1}`.
    pub fn zeta(p: u64, level: u32) -> Self {
        Self::new(p, 1, level)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coefficient(&self) -> &BigInt {
        &self.c
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    /// The Prüfer element as a point of `T`.
    pub fn as_circle(&self) -> CirclePoint {
        CirclePoint::new(self.c.clone(), big_pow(self.p, self.level + 1)).expect("positive")
    }

    /// Re-expressed at a level `>= self.level`.
    pub fn at_level(&self, level: u32) -> Self {
        let level = level.max(self.level);
        Self::new(self.p, &self.c * big_pow(self.p, level - self.level), level)
    }

    pub fn add(&self, other: &Self) -> Self {
        let level = self.level.max(other.level);
        Self::new(
            self.p,
            self.at_level(level).c + other.at_level(level).c,
            level,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, m: &BigInt) -> Self {
        Self::new(self.p, &self.c * m, self.level)
    }

    /// `c·x/p^{k+1}` for an integer `x`.
    pub fn eval_integer(&self, x: &BigInt) -> CirclePoint {
        CirclePoint::new(&self.c * x, big_pow(self.p, self.level + 1)).expect("positive")
    }
}

impl fmt::Display for PruferCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.c, self.p, self.level + 1)
    }
}

/// Parses `c/p^(k+1)`, e.g. `8/7^2`; a bare `c/p` means level 0.
impl FromStr for PruferCharacter {
    type Err = PadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PadicError::Parse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let (c, rest) = s.trim().split_once('/').ok_or_else(|| err("expected c/p^e"))?;
        let c: BigInt = c.trim().parse().map_err(|_| err("bad coefficient"))?;
        let (p, e) = match rest.split_once('^') {
            Some((p, e)) => (p, e.trim().trim_start_matches('(').trim_end_matches(')')),
            None => (rest, "1"),
        };
        let p: u64 = p.trim().parse().map_err(|_| err("bad prime"))?;
        let e: u32 = e.parse().map_err(|_| err("bad exponent"))?;
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if e == 0 {
            return Err(err("exponent must be at least 1"));
        }
        Ok(PruferCharacter::new(p, c, e - 1))
    }
}

impl Serialize for PruferCharacter {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PruferCharacter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `χ(x)`; only the digits below `k+1` matter.
pub fn zeta_eval(chi: &PruferCharacter, x: &PadicTrunc) -> Result<CirclePoint, PadicError> {
    if chi.p != x.p {
        return Err(PadicError::PrimeMismatch(chi.p, x.p));
    }
    if chi.level >= x.depth() {
        return Err(PadicError::InsufficientDepth {
            level: chi.level,
            depth: x.depth(),
        });
    }
    Ok(chi.eval_integer(&x.value()))
}

/// `±y_n = ±p^{a_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPoint {
    pub index: usize,
    pub sign: i8,
    pub value: PadicTrunc,
}

/// The listed points `±p^{a_n}` in `Z/p^N`.
pub fn l_points(spec: &SequenceSpec, depth: u32) -> Result<Vec<LPoint>, PadicError> {
    let mut out = Vec::new();
    for (index, &a) in spec.terms().iter().enumerate() {
        let y = big_pow(spec.p(), a as u32);
        for sign in [1i8, -1] {
            out.push(LPoint {
                index,
                sign,
                value: PadicTrunc::from_integer(spec.p(), depth, &(&y * sign))?,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetStatus {
    Member,
    PossibleMember,
    NonMember,
}

/// Whether the coset `x + p^N·J_p` meets `L`.
pub fn coset_membership(spec: &SequenceSpec, x: &PadicTrunc) -> CosetStatus {
    let p = spec.p();
    let modulus = big_pow(p, x.depth());
    let r = x.residue();
    if r.is_zero() {
        return CosetStatus::Member;
    }
    let mut status = CosetStatus::NonMember;
    for e in 0..x.depth() {
        let y = big_pow(p, e);
        if r == y || r == &modulus - &y {
            match spec.status(e as u64) {
                TermStatus::Listed => return CosetStatus::Member,
                TermStatus::Undetermined => status = CosetStatus::PossibleMember,
                TermStatus::Absent => {}
            }
        }
    }
    status
}

/// Decides `χ ∈ L^▷`: `χ(±y_n) ∈ T_+` for every `n`. Terms `a > k` contribute 0.
pub fn char_in_polar(chi: &PruferCharacter, spec: &SequenceSpec) -> Result<bool, PadicError> {
    if chi.p != spec.p() {
        return Err(PadicError::PrimeMismatch(chi.p, spec.p()));
    }
    if chi.is_zero() {
        return Ok(true);
    }
    let den = big_pow(chi.p, chi.level + 1);
    let mut undecided = false;
    let mut num = chi.c.clone();
    for a in 0..=chi.level as u64 {
        match spec.status(a) {
            TermStatus::Absent => {}
            status => {
                if !ratio_in_t_plus(&num, &den) {
                    if status == TermStatus::Listed {
                        return Ok(false);
                    }
                    undecided = true;
                }
            }
        }
        num *= chi.p;
    }
    if undecided {
        Err(PadicError::PrefixTooShort {
            needed_through: chi.level as u64,
        })
    } else {
        Ok(true)
    }
}

fn odd_digits(spec: &SequenceSpec, x: &PadicTrunc) -> Result<Vec<i64>, PadicError> {
    if spec.p() % 2 == 0 {
        return Err(PadicError::EvenPrime(spec.p()));
    }
    if x.p != spec.p() {
        return Err(PadicError::PrimeMismatch(x.p, spec.p()));
    }
    Ok(x.digits.clone())
}

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

/// Balanced digits in `{-1, 0, 1}`, nonzero only at positions `a_n`.
pub fn digit_filter(spec: &SequenceSpec, x: &PadicTrunc) -> Result<bool, PadicError> {
    Ok(filter_violations(spec, &odd_digits(spec, x)?).is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicCandidate {
    pub character: PruferCharacter,
    pub origin: SeparatorOrigin,
}

fn single_index_candidates(p: u64, levels: &[u32]) -> Vec<PadicCandidate> {
    levels
        .iter()
        .flat_map(|&k| {
            (1..p).map(move |m| PadicCandidate {
                character: PruferCharacter::new(p, m, k),
                origin: SeparatorOrigin::DigitFilter {
                    level: k,
                    multiplier: m,
                },
            })
        })
        .collect()
}

fn pair_candidates(p: u64, digits: &[i64]) -> Vec<PadicCandidate> {
    let nonzero: Vec<u32> = digits
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| i as u32)
        .collect();
    let Some((&k1, rest)) = nonzero.split_first() else {
        return Vec::new();
    };
    let zeta = |k: u32| PruferCharacter::zeta(p, k);
    let mut out = Vec::new();
    for &k2 in rest {
        for sign in [1i8, -1] {
            let combo = zeta(k1).add(&zeta(k2).scale(&BigInt::from(sign)));
            for m in 1..=p / 4 {
                out.push(PadicCandidate {
                    character: combo.scale(&BigInt::from(m)),
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
            // ζ_{k-1} - ζ_k = (p-1)ζ_k, with ζ_{-1} = 0
            let step = |k: u32| zeta(k).scale(&BigInt::from(p - 1));
            for sign in [1i8, -1] {
                out.push(PadicCandidate {
                    character: step(k1).add(&step(k2).scale(&BigInt::from(sign))),
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
            out.push(PadicCandidate {
                character: PruferCharacter::new(p, 7 * rho as i64 + 1, k1 + 1),
                origin: SeparatorOrigin::AdjacentSeven { first: k1, rho },
            });
        }
    }
    out
}

/// Polar characters suggested by the quasi-convexity argument for `p >= 5`.
pub fn proof_guided_separators(
    spec: &SequenceSpec,
    x: &PadicTrunc,
) -> Result<Vec<PadicCandidate>, PadicError> {
    let p = spec.p();
    if p < 5 {
        return Err(PadicError::PrimeTooSmall {
            what: "proof-guided separators",
            p,
        });
    }
    let ds = odd_digits(spec, x)?;
    let levels: Vec<u32> = (0..ds.len() as u32).filter(|&k| ds[k as usize] != 0).collect();
    let mut candidates = single_index_candidates(p, &levels);
    candidates.extend(pair_candidates(p, &ds));
    Ok(candidates
        .into_iter()
        .filter(|c| c.character.level < x.depth())
        .filter(|c| char_in_polar(&c.character, spec) == Ok(true))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicCertificate {
    pub point: PadicTrunc,
    pub character: PruferCharacter,
    pub value: CirclePoint,
    pub origin: SeparatorOrigin,
}

impl PadicCertificate {
    pub fn verify(&self, spec: &SequenceSpec) -> bool {
        zeta_eval(&self.character, &self.point).is_ok_and(|v| v == self.value)
            && !self.value.in_t_plus()
            && char_in_polar(&self.character, spec) == Ok(true)
    }
}

fn try_candidate(
    spec: &SequenceSpec,
    x: &PadicTrunc,
    xv: &BigInt,
    character: PruferCharacter,
    origin: SeparatorOrigin,
) -> Option<PadicCertificate> {
    let value = character.eval_integer(xv);
    if value.in_t_plus() || char_in_polar(&character, spec) != Ok(true) {
        return None;
    }
    Some(PadicCertificate {
        point: x.clone(),
        character,
        value,
        origin,
    })
}

/// Finds `χ ∈ L^▷` of level `<= level_budget` with `χ(x) ∉ T_+`.
pub fn separate(
    spec: &SequenceSpec,
    x: &PadicTrunc,
    level_budget: u32,
) -> Result<Separation<PadicCertificate>, PadicError> {
    if x.p != spec.p() {
        return Err(PadicError::PrimeMismatch(x.p, spec.p()));
    }
    if level_budget >= x.depth() {
        return Err(PadicError::InsufficientDepth {
            level: level_budget,
            depth: x.depth(),
        });
    }
    match coset_membership(spec, x) {
        CosetStatus::Member => return Err(PadicError::Member(x.clone())),
        CosetStatus::PossibleMember => return Err(PadicError::PossibleMember(x.clone())),
        CosetStatus::NonMember => {}
    }
    let p = spec.p();
    let xv = x.value();
    let within = |c: &PadicCandidate| c.character.level <= level_budget;

    if p % 2 == 1 {
        let ds = odd_digits(spec, x)?;
        for cand in single_index_candidates(p, &filter_violations(spec, &ds))
            .into_iter()
            .filter(within)
        {
            if let Some(cert) = try_candidate(spec, x, &xv, cand.character, cand.origin) {
                return Ok(Separation::Separated { certificate: cert });
            }
        }
        if p >= 5 {
            for cand in proof_guided_separators(spec, x)?.into_iter().filter(within) {
                if let Some(cert) = try_candidate(spec, x, &xv, cand.character, cand.origin) {
                    return Ok(Separation::Separated { certificate: cert });
                }
            }
        }
    }

    for k in 0..=level_budget {
        if let Some(c) = scan_level(spec, &xv, k) {
            let character = PruferCharacter::new(p, c, k);
            if let Some(cert) = try_candidate(spec, x, &xv, character, SeparatorOrigin::Scan) {
                return Ok(Separation::Separated { certificate: cert });
            }
        }
    }
    Ok(Separation::UnseparatedUpTo {
        budget: level_budget as u64,
    })
}

fn near_t_plus(v: u128, den: u128) -> bool {
    v.min(den - v) * 4 <= den
}

/// First `c` coprime to `p` with `c/p^{k+1}` in the polar and `c·x/p^{k+1} ∉ T_+`.
/// Machine arithmetic while `p^{k+1}` is small, exact arithmetic beyond.
fn scan_level(spec: &SequenceSpec, xv: &BigInt, k: u32) -> Option<BigInt> {
    let p = spec.p();
    let den_big = big_pow(p, k + 1);
    let Some(den) = u64::try_from(&den_big).ok().filter(|&d| d < 1 << 60) else {
        let pb = BigInt::from(p);
        let mut c = BigInt::one();
        while c < den_big {
            if !c.is_multiple_of(&pb)
                && !ratio_in_t_plus(&(&c * xv), &den_big)
                && char_in_polar(&PruferCharacter::new(p, c.clone(), k), spec) == Ok(true)
            {
                return Some(c);
            }
            c += 1;
        }
        return None;
    };
    let den = den as u128;
    let xr = u128::try_from(xv.mod_floor(&den_big)).expect("below den");
    // terms that could make a character fail: listed ones and possible ones
    let checks: Vec<u128> = (0..=k as u64)
        .filter(|&a| spec.status(a) != TermStatus::Absent)
        .map(|a| (p as u128).pow(a as u32))
        .collect();
    (1..den as u64)
        .map(|c| c as u128)
        .filter(|c| c % p as u128 != 0)
        .find(|&c| {
            !near_t_plus(c * xr % den, den)
                && checks.iter().all(|&y| near_t_plus(c * y % den, den))
        })
        .map(BigInt::from)
}

fn grid(p: u64, depth: u32) -> Vec<PadicTrunc> {
    (0..p.pow(depth))
        .map(|j| PadicTrunc::from_integer(p, depth, &BigInt::from(j)).expect("valid"))
        .collect()
}

/// Separates every coset of `p^N·J_p` that avoids `L`, using characters of
/// level at most `min(level_budget, N-1)`.
pub fn verify_quasi_convex(
    spec: &SequenceSpec,
    depth: u32,
    level_budget: Option<u32>,
) -> Result<VerificationReport<PadicCertificate>, PadicError> {
    let p = spec.p();
    if p < 5 {
        return Err(PadicError::PrimeTooSmall {
            what: "quasi-convexity sweeps",
            p,
        });
    }
    if depth == 0 {
        return Err(PadicError::ZeroDepth);
    }
    let budget = level_budget.unwrap_or(depth - 1).min(depth - 1);
    let points = grid(p, depth);
    let outcomes: Vec<_> = points
        .par_iter()
        .map(|x| match coset_membership(spec, x) {
            CosetStatus::NonMember => Some(separate(spec, x, budget)),
            _ => None,
        })
        .collect();

    let mut report = VerificationReport {
        spec: spec.clone(),
        depth,
        budget: budget as u64,
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

/// For `p ∈ {2, 3}`: searches characters of level `<= level_budget` for every
/// coset of depth `N` avoiding `L`. Each coset is represented by its small
/// integer representative, lifted with zero digits when the budget needs
/// levels `>= N`.
pub fn density_probe(
    spec: &SequenceSpec,
    depth: u32,
    level_budget: u32,
) -> Result<ProbeReport<PadicCertificate>, PadicError> {
    let p = spec.p();
    if p != 2 && p != 3 {
        return Err(PadicError::NotProbePrime(p));
    }
    if depth == 0 {
        return Err(PadicError::ZeroDepth);
    }
    let lifted_depth = depth.max(level_budget + 1);
    let targets: Vec<PadicTrunc> = grid(p, depth)
        .into_iter()
        .filter(|x| coset_membership(spec, x) == CosetStatus::NonMember)
        .map(|x| x.lift(lifted_depth))
        .collect();
    let outcomes = targets
        .par_iter()
        .map(|x| separate(spec, x, level_budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProbeReport {
        spec: spec.clone(),
        depth,
        budget: level_budget as u64,
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

#[cfg(test)]
mod tests {
    use super::*;

    fn x(p: u64, depth: u32, n: i64) -> PadicTrunc {
        PadicTrunc::from_i64(p, depth, n).unwrap()
    }

    fn cp(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_ints(n, d).unwrap()
    }

    #[test]
    fn literals() {
        let t: PadicTrunc = "p=5;N=4;digits=1,0,-1,0".parse().unwrap();
        assert_eq!(t.value(), BigInt::from(1 - 25));
        assert_eq!(t.to_string(), "p=5;N=4;digits=1,0,-1,0");
        assert_eq!("p=5;N=4;value=-24".parse::<PadicTrunc>().unwrap(), t);
        assert!("p=5;N=3;digits=1,0,-1,0".parse::<PadicTrunc>().is_err());
        assert!(matches!(
            "p=5;N=1;digits=3".parse::<PadicTrunc>(),
            Err(PadicError::DigitOutOfRange { .. })
        ));
        let two = x(2, 4, -1);
        assert_eq!(two.digits(), &[1, 1, 1, 1]);

        let chi: PruferCharacter = "8/7^2".parse().unwrap();
        assert_eq!(chi.level(), 1);
        assert_eq!(chi.to_string(), "8/7^2");
        assert_eq!("8/7^(2)".parse::<PruferCharacter>().unwrap(), chi);
        assert_eq!("-1/5".parse::<PruferCharacter>().unwrap().to_string(), "4/5^1");
    }

    #[test]
    fn zeta_eval_examples() {
        let z0 = PruferCharacter::zeta(5, 0);
        assert_eq!(zeta_eval(&z0, &x(5, 3, 1)).unwrap(), cp(1, 5));
        assert_eq!(zeta_eval(&z0, &x(5, 3, 5)).unwrap(), CirclePoint::zero());
        let z1 = PruferCharacter::zeta(7, 1);
        assert_eq!(zeta_eval(&z1, &x(7, 2, 8)).unwrap(), cp(8, 49));
        assert!(matches!(
            zeta_eval(&PruferCharacter::zeta(5, 3), &x(5, 3, 1)),
            Err(PadicError::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn zeta_relations() {
        for p in [5u64, 7, 11] {
            for k in 1..4 {
                let lhs = PruferCharacter::zeta(p, k).scale(&BigInt::from(p - 1));
                let rhs = PruferCharacter::zeta(p, k - 1).sub(&PruferCharacter::zeta(p, k));
                assert_eq!(lhs.as_circle(), rhs.as_circle());
            }
            let step0 = PruferCharacter::zeta(p, 0).scale(&BigInt::from(p - 1));
            assert_eq!(step0.as_circle(), PruferCharacter::zeta(p, 0).scale(&BigInt::from(-1)).as_circle());
        }
    }

    #[test]
    fn l_points_examples() {
        let s = SequenceSpec::prefix(5, vec![0, 2]).unwrap();
        let ls = l_points(&s, 3).unwrap();
        let vals: Vec<BigInt> = ls.iter().map(|l| l.value.value()).collect();
        assert_eq!(vals, [1, -1, 25, -25].map(BigInt::from));
    }

    #[test]
    fn char_in_polar_examples() {
        let s = SequenceSpec::naturals(5, 8).unwrap();
        assert_eq!(char_in_polar(&PruferCharacter::zeta(5, 0), &s), Ok(true));
        assert_eq!(char_in_polar(&PruferCharacter::new(5, 2, 0), &s), Ok(false));
        // 2ζ_k is in the polar exactly when no term is <= k... with a_0 = 0 never
        let gap = SequenceSpec::prefix(5, vec![1, 3]).unwrap();
        assert_eq!(char_in_polar(&PruferCharacter::new(5, 2, 0), &gap), Ok(true));
        assert_eq!(char_in_polar(&PruferCharacter::new(5, 2, 1), &gap), Ok(false));
        assert_eq!(char_in_polar(&PruferCharacter::new(5, 2, 2), &gap), Ok(true));
        assert_eq!(
            char_in_polar(&PruferCharacter::new(5, 2, 4), &gap),
            Err(PadicError::PrefixTooShort { needed_through: 4 })
        );
    }

    #[test]
    fn digit_filter_examples() {
        let s = SequenceSpec::prefix(5, vec![0, 2]).unwrap();
        assert_eq!(digit_filter(&s, &x(5, 3, 1 - 25)), Ok(true));
        assert_eq!(digit_filter(&s, &x(5, 3, 2)), Ok(false));
        assert_eq!(digit_filter(&s, &x(5, 3, 0)), Ok(true));
        let s2 = SequenceSpec::naturals(2, 4).unwrap();
        assert_eq!(digit_filter(&s2, &x(2, 3, 1)), Err(PadicError::EvenPrime(2)));
    }

    #[test]
    fn proof_guided_examples() {
        let s = SequenceSpec::naturals(5, 6).unwrap();
        let c = proof_guided_separators(&s, &x(5, 3, 6)).unwrap();
        let target = PruferCharacter::zeta(5, 0).add(&PruferCharacter::zeta(5, 1));
        assert!(c.iter().any(|c| c.character == target));

        let s7 = SequenceSpec::naturals(7, 6).unwrap();
        for rho in [1i64, -1] {
            let c = proof_guided_separators(&s7, &x(7, 3, 1 + 7 * rho)).unwrap();
            let want = PruferCharacter::new(7, 7 * rho + 1, 1);
            assert!(c.iter().any(|c| c.character == want), "rho = {rho}");
        }

        let s11 = SequenceSpec::naturals(11, 6).unwrap();
        let c = proof_guided_separators(&s11, &x(11, 4, 1 + 1331)).unwrap();
        assert!(c
            .iter()
            .any(|c| matches!(c.origin, SeparatorOrigin::PairPMinusOne { .. })));
    }

    #[test]
    fn separate_examples() {
        let s = SequenceSpec::naturals(5, 6).unwrap();
        let sep = separate(&s, &x(5, 3, 2), 2).unwrap();
        let cert = sep.certificate().unwrap();
        // oracle: first witness in search order is ζ_0 with value 2/5
        assert_eq!(cert.character, PruferCharacter::zeta(5, 0));
        assert_eq!(cert.value, cp(2, 5));
        assert!(cert.verify(&s));

        let s7 = SequenceSpec::naturals(7, 6).unwrap();
        let cert = separate(&s7, &x(7, 3, 8), 2).unwrap().certificate().unwrap().clone();
        assert_eq!(cert.character, PruferCharacter::new(7, 8, 1));
        assert_eq!(cert.value, cp(15, 49));

        let s3 = SequenceSpec::naturals(3, 8).unwrap();
        assert_eq!(
            separate(&s3, &x(3, 3, 2).lift(7), 6).unwrap(),
            Separation::UnseparatedUpTo { budget: 6 }
        );
        assert!(matches!(separate(&s, &x(5, 3, -25), 2), Err(PadicError::Member(_))));
        assert!(matches!(
            separate(&s, &x(5, 3, 2), 3),
            Err(PadicError::InsufficientDepth { .. })
        ));
    }

    #[test]
    fn small_sweep() {
        let s = SequenceSpec::prefix(5, vec![0, 1, 2]).unwrap();
        let r = verify_quasi_convex(&s, 3, None).unwrap();
        assert!(r.passed());
        assert_eq!(r.members_skipped, 7);
        assert!(r.certificates.iter().all(|c| c.verify(&s)));
    }

    #[test]
    fn density_probe_examples() {
        for p in [2u64, 3] {
            let s = SequenceSpec::naturals(p, 10).unwrap();
            let r = density_probe(&s, 4, 8).unwrap();
            assert!(r.consistent_with_density(), "p = {p}");
            assert!(r.probed > 0);
        }
        let s5 = SequenceSpec::naturals(5, 4).unwrap();
        assert_eq!(density_probe(&s5, 2, 3).unwrap_err(), PadicError::NotProbePrime(5));
    }
}
