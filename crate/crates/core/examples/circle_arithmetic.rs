//! Exact arithmetic on T = Q/Z: canonical representatives, the arcs T_m and
//! balanced base-p expansions.
//!
//!     cargo run --example circle_arithmetic

use qchull::{balanced_expand, tail_bound, CirclePoint, TmLevel};

fn main() {
    let x: CirclePoint = "7/10".parse().unwrap();
    let y = CirclePoint::from_ints(-1, 3).unwrap();
    println!("7/10 is represented as {x}; {x} + {y} = {}", &x + &y);

    for m in 1..=3 {
        let level = TmLevel::new(m).unwrap();
        println!("1/8 in T_{m}: {}", CirclePoint::from_ints(1, 8).unwrap().in_tm(level));
    }

    // 11/49 = 2/7 - 3/49
    let z = CirclePoint::from_ints(11, 49).unwrap();
    let e = balanced_expand(&z, 7).unwrap();
    println!("{z} in balanced base 7: {:?} (value {})", e.digits(), e.value());

    // the tail after k digits is at most 1/(2 p^k)
    println!("tail bound p=5, k=3: {}", tail_bound(5, 3));
}
