//! Exact arithmetic on the circle group `T = Q/Z`.
//!
//! Every [`CirclePoint`] is stored as a reduced fraction whose value lies in
//! the half-open interval `(-1/2, 1/2]`. Membership in the closed arcs
//! `T_m = [-1/(4m), 1/(4m)]` is decided by cross-multiplication, so no
//! floating point is involved anywhere.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{balanced_digits_lsb, big_pow, is_prime, p_power_exponent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircleError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("T_m level must be at least 1")]
    ZeroLevel,
    #[error("balanced digits need an odd prime, got {0}")]
    NotOddPrime(u64),
    #[error("denominator {den} is not a power of {p}")]
    NotPPower { den: BigInt, p: u64 },
    #[error("digit {digit} at position {position} exceeds (p-1)/2 for p = {p}")]
    DigitOutOfRange { digit: i64, position: usize, p: u64 },
    #[error("cannot parse circle point {0:?}")]
    Parse(String),
}

/// A point of `T = Q/Z` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CirclePoint {
    num: BigInt,
    den: BigInt,
}

impl CirclePoint {
    pub fn zero() -> Self {
        CirclePoint {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    /// Reduces `numerator / denominator` modulo 1 into `(-1/2, 1/2]`.
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self, CircleError> {
        if denominator.is_zero() {
            return Err(CircleError::ZeroDenominator);
        }
        let (num, den) = if denominator.is_negative() {
            (-numerator, -denominator)
        } else {
            (numerator, denominator)
        };
        Ok(Self::canonical(num, den))
    }

    pub fn from_ints(numerator: i64, denominator: i64) -> Result<Self, CircleError> {
        Self::new(BigInt::from(numerator), BigInt::from(denominator))
    }

    /// `den > 0` is assumed.
    fn canonical(num: BigInt, den: BigInt) -> Self {
        let mut r = num.mod_floor(&den);
        if &r * 2 > den {
            r -= &den;
        }
        let g = r.gcd(&den);
        if g.is_zero() || r.is_zero() {
            return Self::zero();
        }
        CirclePoint {
            num: r / &g,
            den: den / g,
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The canonical representative as an exact rational in `(-1/2, 1/2]`.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    /// `n · self` in `Q/Z`.
    pub fn int_scale(&self, n: &BigInt) -> Self {
        Self::canonical(&self.num * n, self.den.clone())
    }

    pub fn scale(&self, n: i64) -> Self {
        self.int_scale(&BigInt::from(n))
    }

    /// Closed-arc membership `|self| <= 1/(4m)`.
    pub fn in_tm(&self, level: TmLevel) -> bool {
        let lhs = self.num.abs() * 4u32 * level.0;
        lhs <= self.den
    }

    /// Membership in `T_+ = T_1`.
    pub fn in_t_plus(&self) -> bool {
        self.in_tm(TmLevel::PLUS)
    }
}

impl Default for CirclePoint {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &CirclePoint {
    type Output = CirclePoint;

    fn add(self, rhs: &CirclePoint) -> CirclePoint {
        let num = &self.num * &rhs.den + &rhs.num * &self.den;
        CirclePoint::canonical(num, &self.den * &rhs.den)
    }
}

impl Add for CirclePoint {
    type Output = CirclePoint;

    fn add(self, rhs: CirclePoint) -> CirclePoint {
        &self + &rhs
    }
}

impl Neg for &CirclePoint {
    type Output = CirclePoint;

    fn neg(self) -> CirclePoint {
        CirclePoint::canonical(-&self.num, self.den.clone())
    }
}

impl Neg for CirclePoint {
    type Output = CirclePoint;

    fn neg(self) -> CirclePoint {
        -&self
    }
}

impl Sub for &CirclePoint {
    type Output = CirclePoint;

    fn sub(self, rhs: &CirclePoint) -> CirclePoint {
        self + &(-rhs)
    }
}

/// Orders points by their canonical representative in `(-1/2, 1/2]`.
impl Ord for CirclePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for CirclePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CirclePoint {
    type Err = CircleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || CircleError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                CirclePoint::new(n, d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                CirclePoint::new(n, BigInt::one())
            }
        }
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CirclePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index `m >= 1` of the arc `T_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TmLevel(u32);

impl TmLevel {
    pub const PLUS: TmLevel = TmLevel(1);

    pub fn new(m: u32) -> Result<Self, CircleError> {
        if m == 0 {
            Err(CircleError::ZeroLevel)
        } else {
            Ok(TmLevel(m))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Canonical representative of `numerator / denominator` mod 1.
pub fn canonicalize(numerator: BigInt, denominator: BigInt) -> Result<CirclePoint, CircleError> {
    CirclePoint::new(numerator, denominator)
}

pub fn in_tm(a: &CirclePoint, level: TmLevel) -> bool {
    a.in_tm(level)
}

/// Where the digit indices of a [`BalancedExpansion`] start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexOrigin {
    /// Digits `c_1, c_2, ...` weighted by `p^-1, p^-2, ...` (a point of `T`).
    Fractional,
    /// Digits `c_0, c_1, ...` weighted by `p^0, p^1, ...` (a p-adic truncation).
    Integral,
}

/// Digits `c_i` with `|c_i| <= (p-1)/2` for an odd prime `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalancedExpansion {
    p: u64,
    origin: IndexOrigin,
    digits: Vec<i64>,
}

impl BalancedExpansion {
    pub fn new(p: u64, origin: IndexOrigin, digits: Vec<i64>) -> Result<Self, CircleError> {
        check_odd_prime(p)?;
        let half = ((p - 1) / 2) as i64;
        if let Some((i, &d)) = digits.iter().enumerate().find(|(_, d)| d.abs() > half) {
            let position = match origin {
                IndexOrigin::Fractional => i + 1,
                IndexOrigin::Integral => i,
            };
            return Err(CircleError::DigitOutOfRange {
                digit: d,
                position,
                p,
            });
        }
        Ok(BalancedExpansion { p, origin, digits })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn origin(&self) -> IndexOrigin {
        self.origin
    }

    /// Digits in index order (`c_1..c_d` or `c_0..c_{d-1}`).
    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    /// First digit `c_1` of a fractional expansion (0 when empty).
    pub fn leading(&self) -> i64 {
        self.digits.first().copied().unwrap_or(0)
    }

    /// Exact sum `Σ c_i p^{±i}` as a rational.
    pub fn value(&self) -> BigRational {
        let d = self.digits.len() as u32;
        match self.origin {
            IndexOrigin::Fractional => {
                // Σ c_i p^{d-i} / p^d
                let mut acc = BigInt::zero();
                for &c in &self.digits {
                    acc = acc * self.p + c;
                }
                BigRational::new(acc, big_pow(self.p, d))
            }
            IndexOrigin::Integral => {
                let mut acc = BigInt::zero();
                for &c in self.digits.iter().rev() {
                    acc = acc * self.p + c;
                }
                BigRational::from_integer(acc)
            }
        }
    }

    /// Value as a circle point (meaningful for fractional expansions).
    pub fn to_circle(&self) -> CirclePoint {
        let v = self.value();
        CirclePoint::new(v.numer().clone(), v.denom().clone()).expect("nonzero denominator")
    }
}

fn check_odd_prime(p: u64) -> Result<(), CircleError> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(CircleError::NotOddPrime(p))
    }
}

/// Balanced base-`p` expansion `c_1..c_d` of a point whose denominator is `p^d`.
pub fn balanced_expand(a: &CirclePoint, p: u64) -> Result<BalancedExpansion, CircleError> {
    check_odd_prime(p)?;
    let d = p_power_exponent(a.denominator(), p).ok_or_else(|| CircleError::NotPPower {
        den: a.denominator().clone(),
        p,
    })?;
    let mut digits = balanced_digits_lsb(a.numerator(), p, d as usize);
    digits.reverse();
    Ok(BalancedExpansion {
        p,
        origin: IndexOrigin::Fractional,
        digits,
    })
}

/// `1 / (2 p^k)`: bound on `|Σ_{i>k} c_i / p^i|` over balanced tails.
pub fn tail_bound(p: u64, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), big_pow(p, k) * 2)
}
