//! Verdicts for locally compact abelian groups given as products of R, T, Z,
//! Z<m>, J<p> and finite products, with powers.
//!
//!     cargo run --example classify_groups -- "Z2^w x Z8" "J5"

use qchull::classify::{classify, CATALOG};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs: Vec<String> = if args.is_empty() {
        CATALOG.iter().map(|e| e.descriptor.to_string()).collect()
    } else {
        args
    };
    for text in inputs {
        match classify(&text) {
            Ok(c) => {
                println!("{:<22} admits: {}", c.descriptor.to_string(), c.admits);
                for j in &c.justification {
                    println!("    ({}) {}", j.condition, j.reason);
                }
                if let Some(x) = c.cross_check {
                    println!("    compact cross-check agrees: {}", x.agrees);
                }
            }
            Err(e) => println!("{text}: {e}"),
        }
    }
}
