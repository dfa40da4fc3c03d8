//! Small integer helpers shared by the circle, torus and p-adic modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Trial-division primality test; the primes used here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// `r mod m` reduced into `[0, m)`.
pub fn mod_floor(r: &BigInt, m: &BigInt) -> BigInt {
    r.mod_floor(m)
}

/// `num / den mod 1 ∈ T_+` for `den > 0`, without reducing the fraction.
pub fn ratio_in_t_plus(num: &BigInt, den: &BigInt) -> bool {
    let r = num.mod_floor(den);
    let s = den - &r;
    let near = if r < s { r } else { s };
    near * 4u32 <= *den
}

/// Returns `Some(d)` when `n == p^d`.
pub fn p_power_exponent(n: &BigInt, p: u64) -> Option<u32> {
    if !n.is_positive() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut d = 0;
    while !n.is_one() {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return None;
        }
        n = q;
        d += 1;
    }
    Some(d)
}

/// Balanced base-`p` digits of `residue mod p^count`, least significant first.
///
/// Digits lie in `[-(p-1)/2, (p-1)/2]` and `Σ d_i p^i ≡ residue (mod p^count)`.
/// `p` must be odd.
pub fn balanced_digits_lsb(residue: &BigInt, p: u64, count: usize) -> Vec<i64> {
    debug_assert!(p % 2 == 1);
    let half = ((p - 1) / 2) as i64;
    let pb = BigInt::from(p);
    let mut r = residue.clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut d = i64::try_from(r.mod_floor(&pb)).expect("digit fits i64");
        if d > half {
            d -= p as i64;
        }
        out.push(d);
        r = (r - d) / &pb;
    }
    out
}

/// Unsigned base-`p` digits of `residue mod p^count`, least significant first.
pub fn unsigned_digits_lsb(residue: &BigInt, p: u64, count: usize) -> Vec<i64> {
    let pb = BigInt::from(p);
    let mut r = residue.mod_floor(&big_pow(p, count as u32));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (q, d) = r.div_rem(&pb);
        out.push(i64::try_from(d).expect("digit fits i64"));
        r = q;
    }
    out
}
