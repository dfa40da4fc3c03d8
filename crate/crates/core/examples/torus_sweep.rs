//! Separating every point of denominator p^D from K = {0} ∪ {±p^-(a_n+1)}.
//!
//!     cargo run --release --example torus_sweep

use qchull::torus::{self, IntCharacter};
use qchull::{CirclePoint, SequenceSpec};

fn main() {
    let spec: SequenceSpec = "p=5; a=0..4".parse().unwrap();
    println!("1 in the polar: {:?}", torus::char_in_polar(&IntCharacter::new(1), &spec));
    println!("2 in the polar: {:?}", torus::char_in_polar(&IntCharacter::new(2), &spec));

    let x = CirclePoint::from_ints(6, 25).unwrap();
    let cert = torus::separate(&spec, &x, 1000).unwrap();
    println!("{x}: {:?}", cert.certificate().unwrap());

    for (p, a, depth) in [(5u64, vec![0, 1, 2, 3, 4], 5u32), (7, vec![0, 2, 4], 5), (11, vec![1, 3], 4)] {
        let spec = SequenceSpec::prefix(p, a).unwrap();
        let r = torus::verify_quasi_convex(&spec, depth, None).unwrap();
        println!(
            "{spec}, D={depth}: {} separated, {} unseparated",
            r.separated(),
            r.unseparated.len()
        );
    }
}
