//! For p = 2 and 3 no character separates anything: evidence that the sets
//! are qc-dense. A bounded search can never prove this.
//!
//!     cargo run --release --example density_probes

use qchull::{padic, torus, SequenceSpec};

fn main() {
    for p in [2u64, 3] {
        let spec = SequenceSpec::naturals(p, 16).unwrap();
        let t = torus::density_probe(&spec, 3, 10_000).unwrap();
        let j = padic::density_probe(&spec, 3, 6).unwrap();
        println!(
            "p={p}: torus {} points, {} separated; p-adic {} cosets, {} separated",
            t.probed,
            t.separations.len(),
            j.probed,
            j.separations.len()
        );
    }
}
