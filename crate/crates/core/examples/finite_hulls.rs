//! Polars and quasi-convex hulls in finite products of cyclic groups.
//!
//!     cargo run --release --example finite_hulls

use qchull::{FiniteGroup, Homomorphism, Subgroup};

fn main() {
    let z5: FiniteGroup = "Z5".parse().unwrap();
    let e = z5.parse_set("(0),(1),(4)").unwrap();
    let polar = z5.polar(&e).unwrap();
    println!("Z5: polar of {{0, ±1}} has {} characters", polar.len());
    println!("Z5: {{0, ±1}} quasi-convex: {}", z5.is_quasi_convex(&e).unwrap().0);

    for group in ["Z5xZ6xZ7", "Z4xZ4xZ9", "Z3xZ3xZ3", "Z2xZ5"] {
        let g: FiniteGroup = group.parse().unwrap();
        let s = g.standard_null_set();
        let hull = g.hull(&s).unwrap();
        let span = g.generated_subgroup(&s).unwrap();
        println!(
            "{group:<9} |{{0, ±e_k}}| = {}  |hull| = {:>3}  |<S>| = {:>3}",
            s.len(),
            hull.len(),
            span.len()
        );
    }

    // a certificate: l_1 χ_1 + l_2 χ_2 with l_k = ⌊m_k / 4⌋
    let g: FiniteGroup = "Z5xZ6xZ7".parse().unwrap();
    let chi = g.cyclic_certificate_characters(1, 2, 1).unwrap();
    let x = g.element(&[1, 1, 0]).unwrap();
    println!("{chi} sends e_1 + e_2 to {}", g.pairing(&chi, &x).unwrap());

    // images of hulls stay inside hulls of images
    let z6: FiniteGroup = "Z6".parse().unwrap();
    let project = Homomorphism::new(g.clone(), z6.clone(), vec![vec![0, 1, 0]]).unwrap();
    let s = g.standard_null_set();
    let image_of_hull = project.apply_set(&g.hull(&s).unwrap()).unwrap();
    let hull_of_image = z6.hull(&project.apply_set(&s).unwrap()).unwrap();
    println!(
        "Z5xZ6xZ7 -> Z6: |f(Q(S))| = {}, |Q(f(S))| = {}, contained: {}",
        image_of_hull.len(),
        hull_of_image.len(),
        image_of_hull.is_subset(&hull_of_image)
    );

    // Z3 sits in Z9 as {0, 3, 6}; the hull does not depend on the ambient group
    let z3: FiniteGroup = "Z3".parse().unwrap();
    let z9: FiniteGroup = "Z9".parse().unwrap();
    let h = Subgroup::new(Homomorphism::new(z3.clone(), z9, vec![vec![3]]).unwrap()).unwrap();
    let s = z3.standard_null_set();
    println!(
        "Z3 < Z9: hull inside Z3 has {} elements, inside Z9 {}",
        h.intrinsic_hull(&s).unwrap().len(),
        h.ambient_hull(&s).unwrap().len()
    );
}
