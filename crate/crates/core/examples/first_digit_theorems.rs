//! Exhaustive checks of the leading-digit bounds, including the one failing
//! case at p = 7.
//!
//!     cargo run --release --example first_digit_theorems

use qchull::first_digit::{verify_first_digit_theorem, DigitVariant, ReportStatus};

fn main() {
    for p in [5u64, 7, 11, 13] {
        for v in DigitVariant::ALL {
            let r = verify_first_digit_theorem(p, 3, v).unwrap();
            let status = match r.status {
                ReportStatus::Pass => "pass".to_string(),
                ReportStatus::DocumentedException => {
                    format!("expected failure, {} counterexamples", r.counterexamples.len())
                }
                ReportStatus::Fail => format!("FAIL {:?}", &r.counterexamples[..1]),
            };
            println!(
                "p={p:<2} {:<7} |c1| <= {}  ({} of {} satisfy the hypothesis): {status}",
                v.as_str(),
                r.leading_digit_bound,
                r.hypothesis_satisfied,
                r.expansions_checked,
            );
        }
    }
}
