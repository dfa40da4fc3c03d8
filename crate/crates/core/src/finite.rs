//! Finite abelian groups `Z_{m_1} × … × Z_{m_r}` and brute-force duality.
//!
//! A finite product of cyclic groups is self-dual: the character with
//! coefficients `(a_1, …, a_r)` sends `(v_1, …, v_r)` to `Σ a_i v_i / m_i mod 1`.
//! Polars, prepolars and quasi-convex hulls are computed by enumerating the
//! whole dual, so everything here is meant for groups with a few thousand
//! elements at most.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::CirclePoint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteError {
    #[error("cyclic factor of order 0")]
    ZeroModulus,
    #[error("expected {expected} coordinates, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for Z_{modulus}")]
    CoordinateOutOfRange { value: u64, modulus: u64 },
    #[error("factor index {0} out of range (indices are 1-based)")]
    IndexOutOfRange(usize),
    #[error("certificate characters need distinct indices, got {0} twice")]
    SameIndex(usize),
    #[error("certificate characters need every m_i >= 4, found Z_{0}")]
    ModulusTooSmall(u64),
    #[error("matrix entry ({row}, {col}) = {entry} does not define a homomorphism Z_{from} -> Z_{to}")]
    IllDefinedHom {
        row: usize,
        col: usize,
        entry: i64,
        from: u64,
        to: u64,
    },
    #[error("homomorphism matrix must be {rows}x{cols}")]
    MatrixShape { rows: usize, cols: usize },
    #[error("embedding is not injective")]
    NotInjective,
    #[error("cannot parse {what} {text:?}")]
    Parse { what: &'static str, text: String },
}

/// Coordinates `(v_1, …, v_r)` with `0 <= v_i < m_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<u64>);

/// Coefficients `(a_1, …, a_r)` of a character, `0 <= a_i < m_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterVec(Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl CharacterVec {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

fn fmt_tuple(f: &mut fmt::Formatter<'_>, xs: &[u64]) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(f, &self.0)
    }
}

impl fmt::Display for CharacterVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(f, &self.0)
    }
}

pub type ElementSet = BTreeSet<GroupElement>;
pub type CharacterSet = BTreeSet<CharacterVec>;

/// Integer data for deciding `pairing ∈ T_+` without building fractions.
#[derive(Clone, Debug, PartialEq, Eq)]
struct FastPairing {
    lcm: u128,
    weights: Vec<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    moduli: Vec<u64>,
    fast: Option<FastPairing>,
}

impl FiniteGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self, FiniteError> {
        if moduli.contains(&0) {
            return Err(FiniteError::ZeroModulus);
        }
        let fast = fast_pairing(&moduli);
        Ok(FiniteGroup { moduli, fast })
    }

    pub fn trivial() -> Self {
        FiniteGroup::new(Vec::new()).expect("empty product")
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn zero_character(&self) -> CharacterVec {
        CharacterVec(vec![0; self.rank()])
    }

    /// Element from arbitrary integers, reduced into range.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, FiniteError> {
        self.reduce(coords).map(GroupElement)
    }

    pub fn character(&self, coeffs: &[i64]) -> Result<CharacterVec, FiniteError> {
        self.reduce(coeffs).map(CharacterVec)
    }

    fn reduce(&self, xs: &[i64]) -> Result<Vec<u64>, FiniteError> {
        self.check_len(xs.len())?;
        Ok(xs
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| x.rem_euclid(m as i64) as u64)
            .collect())
    }

    fn check_len(&self, got: usize) -> Result<(), FiniteError> {
        if got == self.rank() {
            Ok(())
        } else {
            Err(FiniteError::ShapeMismatch {
                expected: self.rank(),
                got,
            })
        }
    }

    fn check_coords(&self, xs: &[u64]) -> Result<(), FiniteError> {
        self.check_len(xs.len())?;
        for (&value, &modulus) in xs.iter().zip(&self.moduli) {
            if value >= modulus {
                return Err(FiniteError::CoordinateOutOfRange { value, modulus });
            }
        }
        Ok(())
    }

    pub fn check_element(&self, x: &GroupElement) -> Result<(), FiniteError> {
        self.check_coords(&x.0)
    }

    pub fn check_character(&self, chi: &CharacterVec) -> Result<(), FiniteError> {
        self.check_coords(&chi.0)
    }

    /// The generator `e_k` of the `k`-th factor, 1-based.
    pub fn basis(&self, k: usize) -> Result<GroupElement, FiniteError> {
        if k == 0 || k > self.rank() {
            return Err(FiniteError::IndexOutOfRange(k));
        }
        let mut v = vec![0; self.rank()];
        v[k - 1] = 1 % self.moduli[k - 1];
        Ok(GroupElement(v))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((a, b), m)| (a + b) % m)
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(a, m)| (m - a) % m)
                .collect(),
        )
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        Odometer::new(&self.moduli).map(GroupElement)
    }

    /// All characters in lexicographic coefficient order.
    pub fn characters(&self) -> impl Iterator<Item = CharacterVec> + '_ {
        Odometer::new(&self.moduli).map(CharacterVec)
    }

    /// `χ(x) = Σ a_i v_i / m_i mod 1`.
    pub fn pairing(&self, chi: &CharacterVec, x: &GroupElement) -> Result<CirclePoint, FiniteError> {
        self.check_character(chi)?;
        self.check_element(x)?;
        Ok(self.pairing_unchecked(chi, x))
    }

    fn pairing_unchecked(&self, chi: &CharacterVec, x: &GroupElement) -> CirclePoint {
        let mut acc = CirclePoint::zero();
        for ((a, v), m) in chi.0.iter().zip(&x.0).zip(&self.moduli) {
            let term = CirclePoint::new(BigInt::from(a * v), BigInt::from(*m))
                .expect("moduli are nonzero");
            acc = &acc + &term;
        }
        acc
    }

    /// `χ(x) ∈ T_+`, decided over the common denominator `lcm(m_i)`.
    pub(crate) fn pairs_into_t_plus(&self, chi: &CharacterVec, x: &GroupElement) -> bool {
        match &self.fast {
            Some(fast) => {
                let mut r: u128 = 0;
                for ((&a, &v), &w) in chi.0.iter().zip(&x.0).zip(&fast.weights) {
                    r = (r + (a as u128 * v as u128 % fast.lcm) * w) % fast.lcm;
                }
                4 * r.min(fast.lcm - r) <= fast.lcm
            }
            None => self.pairing_unchecked(chi, x).in_t_plus(),
        }
    }

    fn check_set<'a>(&self, set: impl IntoIterator<Item = &'a GroupElement>) -> Result<(), FiniteError> {
        set.into_iter().try_for_each(|x| self.check_element(x))
    }

    /// `E^▷`: characters sending every element of `E` into `T_+`.
    pub fn polar(&self, set: &ElementSet) -> Result<CharacterSet, FiniteError> {
        self.check_set(set)?;
        Ok(self
            .characters()
            .filter(|chi| set.iter().all(|x| self.pairs_into_t_plus(chi, x)))
            .collect())
    }

    /// `A^◁`: elements sent into `T_+` by every character of `A`.
    pub fn prepolar(&self, chars: &CharacterSet) -> Result<ElementSet, FiniteError> {
        chars.iter().try_for_each(|chi| self.check_character(chi))?;
        Ok(self
            .elements()
            .filter(|x| chars.iter().all(|chi| self.pairs_into_t_plus(chi, x)))
            .collect())
    }

    /// Quasi-convex hull `E^▷◁`.
    pub fn hull(&self, set: &ElementSet) -> Result<ElementSet, FiniteError> {
        let polar = self.polar(set)?;
        self.prepolar(&polar)
    }

    /// Decides `hull(E) = E`; the certificate separates every element of `G \ E`
    /// that some polar character excludes.
    pub fn is_quasi_convex(&self, set: &ElementSet) -> Result<(bool, HullCertificate), FiniteError> {
        let polar = self.polar(set)?;
        let mut excluded = BTreeMap::new();
        let mut all_separated = true;
        for x in self.elements().filter(|x| !set.contains(x)) {
            match polar.iter().find(|chi| !self.pairs_into_t_plus(chi, &x)) {
                Some(chi) => {
                    excluded.insert(x, chi.clone());
                }
                None => all_separated = false,
            }
        }
        Ok((all_separated, HullCertificate { excluded }))
    }

    /// `⟨S⟩` by closure under addition and negation.
    pub fn generated_subgroup(&self, set: &ElementSet) -> Result<ElementSet, FiniteError> {
        self.check_set(set)?;
        let mut group: ElementSet = BTreeSet::from([self.zero()]);
        let mut frontier: Vec<GroupElement> = vec![self.zero()];
        while let Some(x) = frontier.pop() {
            for s in set {
                for y in [self.add(&x, s), self.add(&x, &self.neg(s))] {
                    if group.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
        }
        Ok(group)
    }

    /// `{0} ∪ {±e_k}`; trivial factors contribute nothing.
    pub fn standard_null_set(&self) -> ElementSet {
        let mut s = BTreeSet::from([self.zero()]);
        for k in 1..=self.rank() {
            if self.moduli[k - 1] > 1 {
                let e = self.basis(k).expect("index in range");
                s.insert(self.neg(&e));
                s.insert(e);
            }
        }
        s
    }

    /// `l_{k1} χ_{k1} ± l_{k2} χ_{k2}` with `l_k = ⌊m_k / 4⌋` (1-based indices).
    ///
    /// The result is checked to lie in the polar of the standard null set.
    pub fn cyclic_certificate_characters(
        &self,
        k1: usize,
        k2: usize,
        sign: i8,
    ) -> Result<CharacterVec, FiniteError> {
        for k in [k1, k2] {
            if k == 0 || k > self.rank() {
                return Err(FiniteError::IndexOutOfRange(k));
            }
        }
        if k1 == k2 {
            return Err(FiniteError::SameIndex(k1));
        }
        if let Some(&m) = self.moduli.iter().find(|&&m| m < 4) {
            return Err(FiniteError::ModulusTooSmall(m));
        }
        let mut coeffs = vec![0i64; self.rank()];
        coeffs[k1 - 1] = (self.moduli[k1 - 1] / 4) as i64;
        coeffs[k2 - 1] = (self.moduli[k2 - 1] / 4) as i64 * if sign < 0 { -1 } else { 1 };
        let chi = self.character(&coeffs)?;
        let null = self.standard_null_set();
        assert!(
            null.iter().all(|x| self.pairs_into_t_plus(&chi, x)),
            "l_k combination left the polar of the null set"
        );
        Ok(chi)
    }

    /// Parses a set literal such as `(0,0),(1,0),(0,-1)`.
    pub fn parse_set(&self, text: &str) -> Result<ElementSet, FiniteError> {
        parse_tuples(text)?
            .iter()
            .map(|t| self.element(t))
            .collect()
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return f.write_str("1");
        }
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z{m}")?;
        }
        Ok(())
    }
}

/// Group literal `Z5xZ6xZ7`; `1` (or an empty string) is the trivial group.
impl FromStr for FiniteGroup {
    type Err = FiniteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "1" {
            return Ok(FiniteGroup::trivial());
        }
        let bad = || FiniteError::Parse {
            what: "group literal",
            text: s.to_string(),
        };
        let moduli = compact
            .split('x')
            .map(|f| {
                f.strip_prefix('Z')
                    .and_then(|d| d.parse::<u64>().ok())
                    .ok_or_else(bad)
            })
            .collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::new(moduli)
    }
}

fn fast_pairing(moduli: &[u64]) -> Option<FastPairing> {
    let mut lcm: u128 = 1;
    for &m in moduli {
        lcm = lcm.lcm(&(m as u128));
        if lcm > u64::MAX as u128 {
            return None;
        }
    }
    let weights = moduli.iter().map(|&m| lcm / m as u128).collect();
    Some(FastPairing { lcm, weights })
}

/// Parses `(a,b,…),(c,d,…)` into integer tuples.
pub fn parse_tuples(text: &str) -> Result<Vec<Vec<i64>>, FiniteError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || FiniteError::Parse {
        what: "set literal",
        text: text.to_string(),
    };
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let inner_start = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = inner_start.find(')').ok_or_else(bad)?;
        let inner = &inner_start[..close];
        let tuple = if inner.is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|v| v.parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?
        };
        out.push(tuple);
        rest = &inner_start[close + 1..];
        if let Some(r) = rest.strip_prefix(',') {
            if r.is_empty() {
                return Err(bad());
            }
            rest = r;
        } else if !rest.is_empty() {
            return Err(bad());
        }
    }
    Ok(out)
}

/// Mixed-radix counter over `[0, m_1) × … × [0, m_r)`.
struct Odometer {
    moduli: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl Odometer {
    fn new(moduli: &[u64]) -> Self {
        Odometer {
            moduli: moduli.to_vec(),
            next: Some(vec![0; moduli.len()]),
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried_out = true;
        for (d, &m) in succ.iter_mut().zip(&self.moduli).rev() {
            *d += 1;
            if *d < m {
                carried_out = false;
                break;
            }
            *d = 0;
        }
        if !carried_out {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Separating characters for the elements excluded from a hull.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HullCertificate {
    pub excluded: BTreeMap<GroupElement, CharacterVec>,
}

/// One serialized witness: `witness(element) = value ∉ T_+`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteCertificate {
    pub element: GroupElement,
    pub witness_character: CharacterVec,
    pub value: CirclePoint,
}

impl HullCertificate {
    pub fn len(&self) -> usize {
        self.excluded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excluded.is_empty()
    }

    pub fn records(&self, group: &FiniteGroup) -> Vec<FiniteCertificate> {
        self.excluded
            .iter()
            .map(|(x, chi)| FiniteCertificate {
                element: x.clone(),
                witness_character: chi.clone(),
                value: group.pairing_unchecked(chi, x),
            })
            .collect()
    }

    /// Every witness lies in `E^▷` and sends its element outside `T_+`.
    pub fn verify(&self, group: &FiniteGroup, set: &ElementSet) -> Result<bool, FiniteError> {
        for (x, chi) in &self.excluded {
            for e in set {
                if !group.pairing(chi, e)?.in_t_plus() {
                    return Ok(false);
                }
            }
            if group.pairing(chi, x)?.in_t_plus() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A homomorphism `Π Z_{m_i} → Π Z_{n_j}` given by an integer matrix
/// (`rows = rank(target)`, `cols = rank(source)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteGroup,
    target: FiniteGroup,
    matrix: Vec<Vec<i64>>,
}

impl Homomorphism {
    /// Rejects matrices where some column does not respect the source order:
    /// `m_i · M[j][i] ≡ 0 (mod n_j)` must hold for every entry.
    pub fn new(
        source: FiniteGroup,
        target: FiniteGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self, FiniteError> {
        let (rows, cols) = (target.rank(), source.rank());
        if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
            return Err(FiniteError::MatrixShape { rows, cols });
        }
        for (j, row) in matrix.iter().enumerate() {
            for (i, &entry) in row.iter().enumerate() {
                let (from, to) = (source.moduli[i], target.moduli[j]);
                if (from as i128 * entry as i128).rem_euclid(to as i128) != 0 {
                    return Err(FiniteError::IllDefinedHom {
                        row: j,
                        col: i,
                        entry,
                        from,
                        to,
                    });
                }
            }
        }
        Ok(Homomorphism {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(group: &FiniteGroup) -> Self {
        let r = group.rank();
        let matrix = (0..r)
            .map(|j| (0..r).map(|i| i64::from(i == j)).collect())
            .collect();
        Homomorphism::new(group.clone(), group.clone(), matrix).expect("identity is well defined")
    }

    pub fn zero(source: &FiniteGroup, target: &FiniteGroup) -> Self {
        let matrix = vec![vec![0; source.rank()]; target.rank()];
        Homomorphism::new(source.clone(), target.clone(), matrix).expect("zero map")
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement, FiniteError> {
        self.source.check_element(x)?;
        let coords: Vec<i64> = self
            .matrix
            .iter()
            .zip(&self.target.moduli)
            .map(|(row, &n)| {
                let s: i128 = row
                    .iter()
                    .zip(&x.0)
                    .map(|(&a, &v)| a as i128 * v as i128)
                    .sum();
                s.rem_euclid(n as i128) as i64
            })
            .collect();
        self.target.element(&coords)
    }

    pub fn apply_set(&self, set: &ElementSet) -> Result<ElementSet, FiniteError> {
        set.iter().map(|x| self.apply(x)).collect()
    }

    pub fn is_injective(&self) -> bool {
        let zero = self.target.zero();
        self.source
            .elements()
            .filter(|x| self.apply(x).map(|y| y == zero).unwrap_or(false))
            .count()
            == 1
    }
}

/// Image set `f(E)`.
pub fn apply_hom(hom: &Homomorphism, set: &ElementSet) -> Result<ElementSet, FiniteError> {
    hom.apply_set(set)
}

/// A subgroup `H ≤ G` kept both intrinsically (as its own product of cyclic
/// groups) and as an explicit element set through an injective embedding.
#[derive(Clone, Debug)]
pub struct Subgroup {
    embedding: Homomorphism,
    elements: ElementSet,
}

impl Subgroup {
    pub fn new(embedding: Homomorphism) -> Result<Self, FiniteError> {
        if !embedding.is_injective() {
            return Err(FiniteError::NotInjective);
        }
        let all: ElementSet = embedding.source.elements().collect();
        let elements = embedding.apply_set(&all)?;
        Ok(Subgroup {
            embedding,
            elements,
        })
    }

    pub fn intrinsic(&self) -> &FiniteGroup {
        &self.embedding.source
    }

    pub fn ambient(&self) -> &FiniteGroup {
        &self.embedding.target
    }

    pub fn embedding(&self) -> &Homomorphism {
        &self.embedding
    }

    /// The subgroup as a set of ambient elements.
    pub fn elements(&self) -> &ElementSet {
        &self.elements
    }

    /// Hull of `S ⊆ H` computed with the characters of `H`, pushed into `G`.
    pub fn intrinsic_hull(&self, set: &ElementSet) -> Result<ElementSet, FiniteError> {
        let h = self.intrinsic().hull(set)?;
        self.embedding.apply_set(&h)
    }

    /// Hull of `ι(S)` computed in `G`.
    pub fn ambient_hull(&self, set: &ElementSet) -> Result<ElementSet, FiniteError> {
        let image = self.embedding.apply_set(set)?;
        self.ambient().hull(&image)
    }
}
