//! The p-adic side: Prüfer characters ζ_k, L = {0} ∪ {±p^a_n}, and a full
//! sweep over Z/p^N.
//!
//!     cargo run --release --example padic_sweep

use qchull::padic::{self, zeta_eval};
use qchull::{PadicTrunc, PruferCharacter, SequenceSpec};

fn main() {
    let x: PadicTrunc = "p=7;N=3;digits=1,1,0".parse().unwrap();
    let chi: PruferCharacter = "1/7^2".parse().unwrap();
    println!("ζ_1({}) = {}", x.value(), zeta_eval(&chi, &x).unwrap());

    let spec = SequenceSpec::naturals(7, 6).unwrap();
    let sep = padic::separate(&spec, &x, 2).unwrap();
    let cert = sep.certificate().unwrap();
    println!("{} separated by {} with value {}", x, cert.character, cert.value);

    for (p, a, depth) in [(5u64, vec![0, 1, 2, 3, 4], 5u32), (7, vec![0, 1], 4), (13, vec![2, 3], 4)] {
        let spec = SequenceSpec::prefix(p, a).unwrap();
        let r = padic::verify_quasi_convex(&spec, depth, None).unwrap();
        println!(
            "{spec}, N={depth}: {} cosets skipped, {} separated, {} unseparated",
            r.members_skipped,
            r.separated(),
            r.unseparated.len()
        );
    }
}
