//! Verdicts on whether a described locally compact abelian group admits a
//! non-trivial quasi-convex null sequence.
//!
//! A group admits one exactly when neither `G[2]` nor `G[3]` is open. For
//! products of the standard building blocks openness of `G[q]` is decided
//! factor by factor:
//!
//! | factor `F^e`            | `e` finite          | `e` infinite          |
//! |-------------------------|---------------------|-----------------------|
//! | `Z`, `Z_m`, finite prod | open (discrete)     | open iff `qF = 0`     |
//! | `R`, `T`, `J_p`         | never               | never                 |
//!
//! A finite power of a discrete group is discrete, so every subgroup is open.
//! `R`, `T` and `J_p` have no open subgroup of exponent `q` (their `q`-torsion
//! is finite and they are not discrete). In an infinite product, a subgroup
//! that is open contains all but finitely many whole factors, so it can have
//! exponent `q` only when `F` itself does.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("J{0}: the p-adic integers need a prime")]
    NotPrime(u64),
    #[error("Z0 is not a cyclic group; use Z for the integers")]
    ZeroModulus,
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("{0}^{1} is not locally compact")]
    NotLocallyCompact(Base, Exponent),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Base {
    RealLine,
    Circle,
    DiscreteIntegers,
    CyclicMod(u64),
    PadicIntegers(u64),
    FiniteProduct(Vec<u64>),
}

impl Base {
    fn is_discrete(&self) -> bool {
        matches!(
            self,
            Base::DiscreteIntegers | Base::CyclicMod(_) | Base::FiniteProduct(_)
        )
    }

    fn is_finite(&self) -> bool {
        matches!(self, Base::CyclicMod(_) | Base::FiniteProduct(_))
    }

    fn is_compact(&self) -> bool {
        !matches!(self, Base::RealLine | Base::DiscreteIntegers)
    }

    /// `qF = 0`.
    fn killed_by(&self, q: u64) -> bool {
        match self {
            Base::CyclicMod(m) => q % m == 0,
            Base::FiniteProduct(ms) => ms.iter().all(|m| q % m == 0),
            _ => false,
        }
    }

    /// `qF` is finite.
    fn q_multiple_finite(&self) -> bool {
        // qT = T, qJ_p ≅ J_p, qR = R, qZ ≅ Z; cyclic pieces are finite
        self.is_finite()
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::RealLine => f.write_str("R"),
            Base::Circle => f.write_str("T"),
            Base::DiscreteIntegers => f.write_str("Z"),
            Base::CyclicMod(m) => write!(f, "Z{m}"),
            Base::PadicIntegers(p) => write!(f, "J{p}"),
            Base::FiniteProduct(ms) => {
                f.write_str("(")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str("x")?;
                    }
                    write!(f, "Z{m}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exponent {
    Finite(u64),
    /// countably infinite
    Omega,
    /// an arbitrary infinite cardinal
    Kappa,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        !matches!(self, Exponent::Finite(_))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(n) => write!(f, "{n}"),
            Exponent::Omega => f.write_str("w"),
            Exponent::Kappa => f.write_str("k"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub base: Base,
    pub exponent: Exponent,
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            Exponent::Finite(1) => write!(f, "{}", self.base),
            e => write!(f, "{}^{}", self.base, e),
        }
    }
}

/// A finite product of powers of `R`, `T`, `Z`, `Z_m`, `J_p` and finite
/// products of cyclic groups. No factors means the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub factors: Vec<Factor>,
}

impl GroupDescriptor {
    pub fn trivial() -> Self {
        GroupDescriptor { factors: Vec::new() }
    }

    pub fn is_compact(&self) -> bool {
        self.factors.iter().all(|f| f.base.is_compact())
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupDescriptor {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Recursive-descent parser over the non-whitespace characters, keeping the
/// original offsets for error messages.
struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |&(i, _)| i)
    }

    fn error(&self, message: impl Into<String>) -> ClassifyError {
        ClassifyError::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Option<Result<u64, ClassifyError>> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let text: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Some(text.parse().map_err(|_| ClassifyError::Syntax {
            position: self.chars[start].0,
            message: "number too large".into(),
        }))
    }

    fn modulus(&mut self) -> Result<Option<u64>, ClassifyError> {
        match self.number() {
            None => Ok(None),
            Some(Ok(0)) => Err(ClassifyError::ZeroModulus),
            Some(m) => m.map(Some),
        }
    }

    fn base(&mut self) -> Result<Base, ClassifyError> {
        match self.peek() {
            Some('R') => {
                self.pos += 1;
                Ok(Base::RealLine)
            }
            Some('T') => {
                self.pos += 1;
                Ok(Base::Circle)
            }
            Some('Z') => {
                self.pos += 1;
                Ok(match self.modulus()? {
                    Some(m) => Base::CyclicMod(m),
                    None => Base::DiscreteIntegers,
                })
            }
            Some('J') => {
                self.pos += 1;
                let p = self
                    .number()
                    .ok_or_else(|| self.error("expected a prime after J"))??;
                if !is_prime(p) {
                    return Err(ClassifyError::NotPrime(p));
                }
                Ok(Base::PadicIntegers(p))
            }
            Some('(') => {
                self.pos += 1;
                let mut moduli = Vec::new();
                loop {
                    if !self.eat('Z') {
                        return Err(self.error("expected Z<m> inside parentheses"));
                    }
                    moduli.push(
                        self.modulus()?
                            .ok_or_else(|| self.error("expected a modulus after Z"))?,
                    );
                    if self.eat(')') {
                        break;
                    }
                    if !self.eat('x') {
                        return Err(self.error("expected 'x' or ')'"));
                    }
                }
                Ok(Base::FiniteProduct(moduli))
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}, expected R, T, Z, Z<m>, J<p> or ("))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ClassifyError> {
        if !self.eat('^') {
            return Ok(Exponent::Finite(1));
        }
        if self.eat('w') {
            return Ok(Exponent::Omega);
        }
        if self.eat('k') {
            return Ok(Exponent::Kappa);
        }
        match self.number() {
            Some(Ok(0)) => Err(ClassifyError::ZeroExponent),
            Some(n) => n.map(Exponent::Finite),
            None => Err(self.error("expected digits, w or k after ^")),
        }
    }

    fn factor(&mut self) -> Result<Factor, ClassifyError> {
        let base = self.base()?;
        let exponent = self.exponent()?;
        if exponent.is_infinite() && !base.is_compact() {
            return Err(ClassifyError::NotLocallyCompact(base, exponent));
        }
        Ok(Factor { base, exponent })
    }
}

/// `descriptor := factor ("x" factor)* | "1"`,
/// `factor := base ("^" exponent)?`,
/// `base := "R" | "T" | "Z" | "Z" digits | "J" digits | "(" "Z" digits ("x" "Z" digits)* ")"`,
/// `exponent := digits | "w" | "k"`. Whitespace is ignored.
pub fn parse(text: &str) -> Result<GroupDescriptor, ClassifyError> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.iter().map(|&(_, c)| c).eq("1".chars()) {
        return Ok(GroupDescriptor::trivial());
    }
    let mut parser = Parser {
        chars,
        pos: 0,
        end: text.len(),
    };
    let mut factors = vec![parser.factor()?];
    while parser.eat('x') {
        factors.push(parser.factor()?);
    }
    if parser.peek().is_some() {
        return Err(parser.error("expected 'x' or end of input"));
    }
    Ok(GroupDescriptor { factors })
}

/// Whether `G[q]` is open in `G`, with the first factor that prevents it.
fn torsion_open_reason(d: &GroupDescriptor, q: u64) -> (bool, String) {
    for f in &d.factors {
        if f.exponent.is_infinite() {
            if !f.base.killed_by(q) {
                return (false, format!("{f} is an infinite power of a group that is not {q}-torsion"));
            }
        } else if !f.base.is_discrete() {
            return (false, format!("{f} has no open subgroup of exponent {q}"));
        }
    }
    let why = if d.factors.is_empty() {
        "the trivial group is its own open subgroup".to_string()
    } else {
        format!("every factor is discrete or an infinite power of a {q}-torsion group")
    };
    (true, why)
}

/// `G[q] = {g : qg = 0}` is open in `G`.
pub fn torsion_open(d: &GroupDescriptor, q: u64) -> bool {
    torsion_open_reason(d, q).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "ii-2")]
    Ii2,
    #[serde(rename = "ii-3")]
    Ii3,
    #[serde(rename = "iii")]
    Iii,
    #[serde(rename = "iv")]
    Iv,
    #[serde(rename = "v")]
    V,
    #[serde(rename = "catalog")]
    Catalog,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionId::Ii2 => "ii-2",
            ConditionId::Ii3 => "ii-3",
            ConditionId::Iii => "iii",
            ConditionId::Iv => "iv",
            ConditionId::V => "v",
            ConditionId::Catalog => "catalog",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub condition: ConditionId,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub admits: bool,
    pub justification: Vec<Justification>,
}

pub fn verdict(d: &GroupDescriptor) -> Verdict {
    let mut justification = Vec::new();
    let mut open = None;
    for (q, id) in [(2, ConditionId::Ii2), (3, ConditionId::Ii3)] {
        let (is_open, why) = torsion_open_reason(d, q);
        let state = if is_open { "open" } else { "not open" };
        justification.push(Justification {
            condition: id,
            reason: format!("G[{q}] is {state}: {why}"),
        });
        if is_open && open.is_none() {
            open = Some(q);
        }
    }
    if let Some(q) = open {
        justification.push(Justification {
            condition: ConditionId::Iii,
            reason: format!(
                "G[{q}] is an open subgroup of exponent {q}, so G has an open compact subgroup \
                 of the form Z{q}^k; no non-trivial quasi-convex null sequence exists"
            ),
        });
    }
    if let Some(entry) = catalog_citation(d) {
        justification.push(Justification {
            condition: ConditionId::Catalog,
            reason: entry.to_string(),
        });
    }
    Verdict {
        admits: open.is_none(),
        justification,
    }
}

/// Known results that cover the descriptor directly.
fn catalog_citation(d: &GroupDescriptor) -> Option<&'static str> {
    use Base::*;
    let fs = &d.factors;
    let single = |f: &Factor| f.exponent == Exponent::Finite(1);
    match fs.as_slice() {
        [] => Some("trivial group: it contains no infinite subset at all"),
        [f] if single(f) => match f.base {
            Circle | RealLine | PadicIntegers(2) | PadicIntegers(3) => Some(
                "T, R, J2 and J3 each admit a non-trivial quasi-convex null sequence, \
                 even though the natural sequences in J2 and J3 are qc-dense",
            ),
            PadicIntegers(_) => Some("for p >= 5 the set {0} ∪ {±p^n} is a quasi-convex null sequence in Jp"),
            _ => None,
        },
        [f] if f.exponent.is_infinite() => match &f.base {
            CyclicMod(2) | CyclicMod(3) => {
                Some("groups of exponent 2 or 3 admit no non-trivial quasi-convex null sequence")
            }
            CyclicMod(p) if *p > 3 && is_prime(*p) => {
                Some("Zp^w for a prime p > 3 admits a non-trivial quasi-convex null sequence")
            }
            CyclicMod(m) if *m >= 4 => Some(
                "products of cyclic groups of order at least 4 admit a non-trivial \
                 quasi-convex null sequence",
            ),
            FiniteProduct(ms) if ms.iter().all(|&m| m >= 4) => Some(
                "products of cyclic groups of order at least 4 admit a non-trivial \
                 quasi-convex null sequence",
            ),
            _ => None,
        },
        [a, b]
            if a.exponent.is_infinite()
                && b.exponent.is_infinite()
                && matches!(
                    (&a.base, &b.base),
                    (CyclicMod(2), CyclicMod(3)) | (CyclicMod(3), CyclicMod(2))
                ) =>
        {
            Some("Z2^w x Z3^w ≅ Z6^w, a product of cyclic groups of order 6")
        }
        _ if fs.iter().any(|f| f.exponent.is_infinite())
            && fs.iter().all(|f| {
                (f.exponent.is_infinite() && f.base == CyclicMod(2))
                    || (!f.exponent.is_infinite() && f.base.is_finite())
            }) =>
        {
            Some("Z2^k x F with F finite admits no non-trivial quasi-convex null sequence")
        }
        _ => None,
    }
}

/// Independent evaluation of the compact-group conditions, for cross-checking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    /// `2G` finite
    pub two_g_finite: bool,
    /// `3G` finite
    pub three_g_finite: bool,
    /// one of `2G`, `3G` is finite
    pub condition_v: bool,
    /// `G ≅ Z_q^κ × F` with `F` finite, for this `q`
    pub condition_iv: Option<u64>,
    /// both conditions say the opposite of `admits`
    pub agrees: bool,
}

fn q_multiple_finite(d: &GroupDescriptor, q: u64) -> bool {
    d.factors.iter().all(|f| {
        f.base.q_multiple_finite() && (!f.exponent.is_infinite() || f.base.killed_by(q))
    })
}

fn matches_iv(d: &GroupDescriptor, q: u64) -> bool {
    d.factors.iter().all(|f| {
        if f.exponent.is_infinite() {
            f.base.killed_by(q)
        } else {
            f.base.is_finite()
        }
    })
}

/// `None` unless the descriptor is compact.
pub fn compact_conditions(d: &GroupDescriptor) -> Option<CrossCheck> {
    if !d.is_compact() {
        return None;
    }
    let two_g_finite = q_multiple_finite(d, 2);
    let three_g_finite = q_multiple_finite(d, 3);
    let condition_v = two_g_finite || three_g_finite;
    let condition_iv = [2, 3].into_iter().find(|&q| matches_iv(d, q));
    let admits = verdict(d).admits;
    Some(CrossCheck {
        two_g_finite,
        three_g_finite,
        condition_v,
        condition_iv,
        agrees: condition_v != admits && condition_iv.is_some() != admits,
    })
}

/// Everything reported for one descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub input: String,
    pub descriptor: GroupDescriptor,
    pub admits: bool,
    pub justification: Vec<Justification>,
    pub cross_check: Option<CrossCheck>,
}

pub fn classify(text: &str) -> Result<Classification, ClassifyError> {
    let descriptor = parse(text)?;
    let Verdict {
        admits,
        justification,
    } = verdict(&descriptor);
    Ok(Classification {
        input: text.to_string(),
        cross_check: compact_conditions(&descriptor),
        descriptor,
        admits,
        justification,
    })
}

/// A group whose verdict is stated in the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub descriptor: &'static str,
    pub admits: bool,
}

pub const CATALOG: [CatalogEntry; 12] = [
    CatalogEntry { name: "circle", descriptor: "T", admits: true },
    CatalogEntry { name: "real line", descriptor: "R", admits: true },
    CatalogEntry { name: "2-adic integers", descriptor: "J2", admits: true },
    CatalogEntry { name: "3-adic integers", descriptor: "J3", admits: true },
    CatalogEntry { name: "5-adic integers", descriptor: "J5", admits: true },
    CatalogEntry { name: "countable power of Z2", descriptor: "Z2^w", admits: false },
    CatalogEntry { name: "countable power of Z3", descriptor: "Z3^w", admits: false },
    CatalogEntry { name: "countable power of Z5", descriptor: "Z5^w", admits: true },
    CatalogEntry { name: "Z2^w x Z3^w", descriptor: "Z2^w x Z3^w", admits: true },
    CatalogEntry { name: "Z2^k times a finite group", descriptor: "Z2^k x Z8 x (Z3xZ5)", admits: false },
    CatalogEntry { name: "product of cyclic groups of order >= 4", descriptor: "(Z4xZ5xZ6)^w", admits: true },
    CatalogEntry { name: "trivial group", descriptor: "1", admits: false },
];

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> GroupDescriptor {
        parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            d("Z2^w x Z8").factors,
            vec![
                Factor { base: Base::CyclicMod(2), exponent: Exponent::Omega },
                Factor { base: Base::CyclicMod(8), exponent: Exponent::Finite(1) },
            ]
        );
        assert_eq!(
            d("J5").factors,
            vec![Factor { base: Base::PadicIntegers(5), exponent: Exponent::Finite(1) }]
        );
        assert_eq!(
            d(" T ^ 2 x R").factors,
            vec![
                Factor { base: Base::Circle, exponent: Exponent::Finite(2) },
                Factor { base: Base::RealLine, exponent: Exponent::Finite(1) },
            ]
        );
        assert_eq!(d("1"), GroupDescriptor::trivial());
        assert_eq!(
            d("(Z4xZ6)^k").factors[0].base,
            Base::FiniteProduct(vec![4, 6])
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse("J6"), Err(ClassifyError::NotPrime(6)));
        assert_eq!(parse("Z0"), Err(ClassifyError::ZeroModulus));
        assert_eq!(parse("T^0"), Err(ClassifyError::ZeroExponent));
        assert!(matches!(parse("Z^w"), Err(ClassifyError::NotLocallyCompact(..))));
        assert!(matches!(parse("R^k"), Err(ClassifyError::NotLocallyCompact(..))));
        assert_eq!(
            parse("T x Q"),
            Err(ClassifyError::Syntax {
                position: 4,
                message: "unexpected 'Q', expected R, T, Z, Z<m>, J<p> or (".into()
            })
        );
        assert!(matches!(parse("T^"), Err(ClassifyError::Syntax { position: 2, .. })));
        assert!(matches!(parse("TT"), Err(ClassifyError::Syntax { position: 1, .. })));
        assert!(parse("").is_err());
    }

    #[test]
    fn round_trip() {
        for s in ["Z2^w x Z8", "T^2 x R", "1", "(Z4xZ6)^k x J7^3", "Z x Z12^1"] {
            let a = d(s);
            assert_eq!(d(&a.to_string()), a, "{s}");
        }
    }

    #[test]
    fn torsion_open_examples() {
        assert!(torsion_open(&d("Z2^w x Z8"), 2));
        assert!(!torsion_open(&d("J5"), 2));
        assert!(!torsion_open(&d("J5"), 3));
        assert!(torsion_open(&d("Z3^w"), 3));
        assert!(torsion_open(&d("Z"), 2));
        assert!(torsion_open(&d("1"), 3));
    }

    #[test]
    fn verdict_examples() {
        assert!(verdict(&d("J5")).admits);
        assert!(verdict(&d("Z2^w x Z3^w")).admits);
        assert!(!verdict(&d("Z3^k x Z5")).admits);
        assert!(!verdict(&d("Z")).admits);
        assert!(!verdict(&d("1")).admits);
    }

    #[test]
    fn compact_condition_examples() {
        let c = compact_conditions(&d("Z2^w x Z8")).unwrap();
        assert!(c.two_g_finite && c.condition_v && c.agrees);
        assert_eq!(c.condition_iv, Some(2));
        let c = compact_conditions(&d("T")).unwrap();
        assert!(!c.condition_v && c.agrees);
        let c = compact_conditions(&d("Z5^w")).unwrap();
        assert!(!c.two_g_finite && !c.three_g_finite && c.agrees);
        assert_eq!(compact_conditions(&d("R")), None);
        assert_eq!(compact_conditions(&d("Z x Z2")), None);
    }

    #[test]
    fn catalog_verdicts() {
        for entry in CATALOG {
            let v = verdict(&d(entry.descriptor));
            assert_eq!(v.admits, entry.admits, "{}", entry.name);
            assert!(
                v.justification.iter().any(|j| j.condition == ConditionId::Catalog),
                "{} has no catalog citation",
                entry.name
            );
        }
    }
}
