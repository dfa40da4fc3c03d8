//! Certificates are plain JSON and can be re-checked without trusting the
//! search that produced them.
//!
//!     cargo run --release --example certificate_check

use qchull::certificate::{check_file, CertificateBundle, CertificateFile};
use qchull::{padic, torus, FiniteGroup, SequenceSpec};

fn main() {
    let g: FiniteGroup = "Z4xZ4xZ9".parse().unwrap();
    let s = g.standard_null_set();
    let (_, hull_cert) = g.is_quasi_convex(&s).unwrap();

    let spec = SequenceSpec::naturals(5, 4).unwrap();
    let t = torus::verify_quasi_convex(&spec, 3, None).unwrap();
    let j = padic::verify_quasi_convex(&spec, 3, None).unwrap();

    let mut file = CertificateFile::new(vec![
        CertificateBundle::Finite {
            group: g.to_string(),
            set: s.iter().cloned().collect(),
            certificates: hull_cert.records(&g),
        },
        CertificateBundle::Torus { spec: spec.clone(), certificates: t.certificates },
        CertificateBundle::Padic { spec, certificates: j.certificates },
    ]);
    let json = serde_json::to_string(&file).unwrap();
    println!("{} bytes of certificates", json.len());
    println!("check: {}", check_file(&serde_json::from_str(&json).unwrap()));

    // corrupt one value
    if let CertificateBundle::Torus { certificates, .. } = &mut file.bundles[1] {
        certificates[0].value = certificates[0].value.scale(2);
    }
    let r = check_file(&file);
    println!("after tampering: {r}");
    for d in r.discrepancies {
        println!("  {d}");
    }
}
