//! Certificate files and their independent re-verification.
//!
//! The checker recomputes every pairing with plain rational arithmetic and
//! re-derives polar membership by evaluating the character on the listed set,
//! without going through the search code that produced the certificate.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::big_pow;
use crate::circle::CirclePoint;
use crate::finite::{FiniteCertificate, FiniteGroup, GroupElement};
use crate::padic::PadicCertificate;
use crate::sequence::{SequenceSpec, TermStatus};
use crate::torus::SeparationCertificate;

pub const SCHEMA: &str = "qchull.certificates/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateBundle {
    /// Each element is separated from `set` by its witness character.
    Finite {
        group: String,
        set: Vec<GroupElement>,
        certificates: Vec<FiniteCertificate>,
    },
    Torus {
        spec: SequenceSpec,
        certificates: Vec<SeparationCertificate>,
    },
    Padic {
        spec: SequenceSpec,
        certificates: Vec<PadicCertificate>,
    },
}

/// The on-disk form: a bundle list under a schema tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    pub bundles: Vec<CertificateBundle>,
}

impl CertificateFile {
    pub fn new(bundles: Vec<CertificateBundle>) -> Self {
        CertificateFile {
            schema: SCHEMA.to_string(),
            bundles,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checked: u64,
    pub discrepancies: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }

    fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.discrepancies.extend(other.discrepancies);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} certificates checked, {} discrepancies",
            self.checked,
            self.discrepancies.len()
        )
    }
}

/// `r mod 1` in `[0, 1)`.
fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// `|r mod 1|` to the nearest integer is at most `1/4`.
fn in_arc(r: &BigRational) -> bool {
    let f = frac(r);
    let d = if f > BigRational::new(BigInt::one(), BigInt::from(2)) {
        BigRational::one() - f
    } else {
        f
    };
    d * BigInt::from(4) <= BigRational::one()
}

fn same_point(r: &BigRational, claimed: &CirclePoint) -> bool {
    frac(r) == frac(&claimed.to_rational())
}

pub fn check_file(file: &CertificateFile) -> CheckReport {
    let mut report = CheckReport::default();
    if file.schema != SCHEMA {
        report
            .discrepancies
            .push(format!("unknown schema {:?}", file.schema));
    }
    for bundle in &file.bundles {
        report.merge(check_bundle(bundle));
    }
    report
}

pub fn check_bundle(bundle: &CertificateBundle) -> CheckReport {
    match bundle {
        CertificateBundle::Finite {
            group,
            set,
            certificates,
        } => check_finite(group, set, certificates),
        CertificateBundle::Torus { spec, certificates } => check_torus(spec, certificates),
        CertificateBundle::Padic { spec, certificates } => check_padic(spec, certificates),
    }
}

fn check_finite(group: &str, set: &[GroupElement], certs: &[FiniteCertificate]) -> CheckReport {
    let mut report = CheckReport::default();
    let moduli = match group.parse::<FiniteGroup>() {
        Ok(g) => g.moduli().to_vec(),
        Err(e) => {
            report.discrepancies.push(format!("bad group {group:?}: {e}"));
            return report;
        }
    };
    let pair = |chi: &[u64], x: &[u64]| -> Option<BigRational> {
        if chi.len() != moduli.len() || x.len() != moduli.len() {
            return None;
        }
        Some(
            moduli
                .iter()
                .zip(chi.iter().zip(x))
                .map(|(&m, (&c, &xi))| BigRational::new(BigInt::from(c) * xi, BigInt::from(m)))
                .sum(),
        )
    };
    for cert in certs {
        report.checked += 1;
        let chi = cert.witness_character.coeffs();
        let x = cert.element.coords();
        let label = format!("{} by {}", cert.element, cert.witness_character);
        let Some(value) = pair(chi, x) else {
            report.discrepancies.push(format!("{label}: rank mismatch"));
            continue;
        };
        if !same_point(&value, &cert.value) {
            report
                .discrepancies
                .push(format!("{label}: value is not {}", cert.value));
        }
        if in_arc(&value) {
            report.discrepancies.push(format!("{label}: value lies in T_+"));
        }
        if set.iter().any(|e| e.coords() == x) {
            report.discrepancies.push(format!("{label}: element belongs to the set"));
        }
        if let Some(e) = set
            .iter()
            .find(|e| !pair(chi, e.coords()).is_some_and(|v| in_arc(&v)))
        {
            report
                .discrepancies
                .push(format!("{label}: witness sends {e} outside T_+"));
        }
    }
    report
}

/// Exponents `a` a character must be tested on: listed terms, plus every
/// exponent beyond a prefix up to `bound` (a continuation may contain it).
fn relevant_terms(spec: &SequenceSpec, bound: u64) -> Vec<u64> {
    (0..=bound)
        .filter(|&a| spec.status(a) != TermStatus::Absent)
        .collect()
}

fn check_torus(spec: &SequenceSpec, certs: &[SeparationCertificate]) -> CheckReport {
    let mut report = CheckReport::default();
    let p = spec.p();
    for cert in certs {
        report.checked += 1;
        let n = cert.character.value();
        let label = format!("{} by {}", cert.point, n);
        let value = cert.point.to_rational() * n;
        if !same_point(&value, &cert.value) {
            report
                .discrepancies
                .push(format!("{label}: value is not {}", cert.value));
        }
        if in_arc(&value) {
            report.discrepancies.push(format!("{label}: value lies in T_+"));
        }
        // n·p^{-(a+1)} is in T_+ once p^{a+1} >= 4|n|; test everything below
        let mut bound = 0u64;
        while big_pow(p, bound as u32 + 1) < n.abs() * 4u32 {
            bound += 1;
        }
        for a in relevant_terms(spec, bound) {
            let x = BigRational::new(BigInt::one(), big_pow(p, a as u32 + 1));
            if !in_arc(&(x * n)) {
                report
                    .discrepancies
                    .push(format!("{label}: character leaves T_+ at a = {a}"));
                break;
            }
        }
        // one index past the bound, where the value must already be small
        let tail = BigRational::new(n.clone(), big_pow(p, bound as u32 + 1));
        if !n.is_zero() && !in_arc(&tail) {
            report
                .discrepancies
                .push(format!("{label}: tail estimate fails"));
        }
    }
    report
}

fn check_padic(spec: &SequenceSpec, certs: &[PadicCertificate]) -> CheckReport {
    let mut report = CheckReport::default();
    let p = spec.p();
    for cert in certs {
        report.checked += 1;
        let chi = &cert.character;
        let label = format!("{} by {}", cert.point, chi);
        if chi.p() != p || cert.point.p() != p {
            report.discrepancies.push(format!("{label}: prime mismatch"));
            continue;
        }
        let k = chi.level();
        if k >= cert.point.depth() {
            report
                .discrepancies
                .push(format!("{label}: level exceeds the truncation"));
            continue;
        }
        let den = big_pow(p, k + 1);
        let x: BigInt = cert
            .point
            .digits()
            .iter()
            .enumerate()
            .map(|(i, &d)| BigInt::from(d) * big_pow(p, i as u32))
            .sum();
        let value = BigRational::new(chi.coefficient() * x.mod_floor(&den), den.clone());
        if !same_point(&value, &cert.value) {
            report
                .discrepancies
                .push(format!("{label}: value is not {}", cert.value));
        }
        if in_arc(&value) {
            report.discrepancies.push(format!("{label}: value lies in T_+"));
        }
        for a in relevant_terms(spec, k as u64) {
            let y = BigRational::new(chi.coefficient() * big_pow(p, a as u32), den.clone());
            if !in_arc(&y) {
                report
                    .discrepancies
                    .push(format!("{label}: character leaves T_+ at a = {a}"));
                break;
            }
        }
    }
    report
}
