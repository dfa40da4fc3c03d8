use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use qchull::classify::{self, Base, Exponent, Factor, GroupDescriptor};
use qchull::finite::FiniteGroup;
use qchull::padic::{self, CosetStatus, PadicTrunc, PruferCharacter};
use qchull::separation::Separation;
use qchull::torus::{self, FamilyDescription, IntCharacter};
use qchull::{balanced_expand, tail_bound, CirclePoint, SequenceSpec, TailMode, TmLevel};

const PRIMES: [u64; 4] = [5, 7, 11, 13];

fn big_pow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

fn in_arc(r: &BigRational) -> bool {
    let f = r - r.floor();
    let d = if &f * BigInt::from(2) > BigRational::from_integer(1.into()) {
        BigRational::from_integer(1.into()) - &f
    } else {
        f
    };
    d * BigInt::from(4) <= BigRational::from_integer(1.into())
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

/// A strictly increasing list of small exponents.
fn terms() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(0u64..10, 1..6).prop_map(|s| s.into_iter().collect())
}

fn spec() -> impl Strategy<Value = SequenceSpec> {
    (prime(), terms(), any::<bool>()).prop_map(|(p, t, exact)| {
        let mode = if exact { TailMode::Exact } else { TailMode::Prefix };
        SequenceSpec::new(p, t, mode).unwrap()
    })
}

/// `Σ m_i η_{k_i}` with distinct `k_i` and `|m_i| <= ⌊p/4⌋`.
fn lemma_instance(p: u64) -> impl Strategy<Value = Vec<(u32, i64)>> {
    let bound = (p / 4) as i64;
    prop::collection::btree_map(0u32..8, (-bound..=bound).prop_filter("nonzero", |m| *m != 0), 1..4)
        .prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn circle_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let x = CirclePoint::from_ints(n, d).unwrap();
        let back: CirclePoint = x.to_string().parse().unwrap();
        prop_assert_eq!(&back, &x);
        prop_assert!(x.to_rational() * BigInt::from(2) <= BigRational::from_integer(1.into()));
        prop_assert!(x.to_rational() * BigInt::from(2) > BigRational::from_integer((-1).into()));
    }

    #[test]
    fn tm_levels_are_nested(n in -500i64..500, d in 1i64..500, m in 1u32..6) {
        let x = CirclePoint::from_ints(n, d).unwrap();
        if x.in_tm(TmLevel::new(m + 1).unwrap()) {
            prop_assert!(x.in_tm(TmLevel::new(m).unwrap()));
        }
    }

    #[test]
    fn balanced_tail_is_bounded(p in prime(), depth in 1u32..7, seed in any::<u64>(), k in 0u32..7) {
        let den = big_pow(p, depth);
        let num = BigInt::from(seed) % &den;
        let x = CirclePoint::new(num, den).unwrap();
        let e = balanced_expand(&x, p).unwrap();
        prop_assert_eq!(e.to_circle(), x.clone());
        prop_assert!(e.digits().iter().all(|c| c.unsigned_abs() <= (p - 1) / 2));
        let k = k.min(e.digits().len() as u32);
        let head: BigRational = e.digits()[..k as usize]
            .iter()
            .enumerate()
            .map(|(i, &c)| BigRational::new(c.into(), big_pow(p, i as u32 + 1)))
            .sum();
        prop_assert!((e.value() - head).abs() <= tail_bound(p, k));
    }

    #[test]
    fn zeta_truncation_is_consistent(p in prime(), level in 0u32..6, extra in 0u32..4, n in any::<i64>()) {
        let x = PadicTrunc::from_i64(p, level + 1 + extra, n).unwrap();
        let chi = PruferCharacter::zeta(p, level);
        let v = padic::zeta_eval(&chi, &x).unwrap();
        let short = x.truncate(level + 1).unwrap();
        prop_assert_eq!(padic::zeta_eval(&chi, &short).unwrap(), v.clone());
        prop_assert_eq!(chi.eval_integer(&BigInt::from(n)), v);
    }

    #[test]
    fn torus_lemma_characters_are_polar(
        (s, inst) in spec().prop_flat_map(|s| { let p = s.p(); (Just(s), lemma_instance(p)) })
    ) {
        let p = s.p();
        let n: BigInt = inst.iter().map(|&(k, m)| BigInt::from(m) * big_pow(p, k)).sum();
        prop_assert!(torus::char_in_polar(&IntCharacter::new(n), &s).unwrap());
    }

    #[test]
    fn padic_lemma_characters_are_polar(
        (s, inst) in spec().prop_flat_map(|s| { let p = s.p(); (Just(s), lemma_instance(p)) })
    ) {
        let p = s.p();
        let mut chi = PruferCharacter::new(p, 0, 0);
        for &(k, m) in &inst {
            chi = chi.add(&PruferCharacter::zeta(p, k).scale(&BigInt::from(m)));
        }
        prop_assert!(padic::char_in_polar(&chi, &s).unwrap());
    }

    #[test]
    fn polar_family_matches_direct_test(s in spec(), m_seed in any::<u64>(), k in 0u32..9) {
        let p = s.p();
        let m = 1 + m_seed % (p - 1);
        let family = torus::polar_family(&s, m).unwrap();
        let direct = torus::char_in_polar(&IntCharacter::new(BigInt::from(m) * big_pow(p, k)), &s);
        match family.contains(&s, k as u64) {
            Some(expected) => prop_assert_eq!(direct.unwrap(), expected),
            None => prop_assert!(direct.is_err()),
        }
        if family == FamilyDescription::All {
            prop_assert!(4 * m.min(p - m) <= p);
        }
    }

    #[test]
    fn char_in_polar_agrees_with_evaluation(p in prime(), t in terms(), n in -100_000i64..100_000) {
        let s = SequenceSpec::new(p, t.clone(), TailMode::Exact).unwrap();
        let direct = t
            .iter()
            .all(|&a| in_arc(&BigRational::new(n.into(), big_pow(p, a as u32 + 1))));
        prop_assert_eq!(torus::char_in_polar(&IntCharacter::new(n), &s).unwrap(), direct);

        // a prefix verdict must hold for every continuation it does not rule out
        let s = SequenceSpec::prefix(p, t.clone()).unwrap();
        if let Ok(verdict) = torus::char_in_polar(&IntCharacter::new(n), &s) {
            let mut longer = t.clone();
            longer.push(t.last().unwrap() + 1);
            let exact = SequenceSpec::new(p, longer, TailMode::Exact).unwrap();
            prop_assert_eq!(torus::char_in_polar(&IntCharacter::new(n), &exact).unwrap(), verdict);
            let exact = SequenceSpec::new(p, t, TailMode::Exact).unwrap();
            prop_assert_eq!(torus::char_in_polar(&IntCharacter::new(n), &exact).unwrap(), verdict);
        }
    }

    #[test]
    // exponent 2 or exponent 3; mixing them fails already in Z2xZ3 = Z6
    fn low_exponent_groups_collapse(q in 2u64..=3, rank in 1usize..=4, mask in any::<u8>(), seed in any::<u64>()) {
        let moduli: Vec<u64> = (0..rank).map(|i| if mask >> i & 1 == 1 { q } else { 1 }).collect();
        let g = FiniteGroup::new(moduli).unwrap();
        let elements: Vec<_> = g.elements().collect();
        let mut s: std::collections::BTreeSet<_> = elements
            .iter()
            .enumerate()
            .filter(|(i, _)| seed >> (i % 64) & 1 == 1)
            .map(|(_, x)| x.clone())
            .collect();
        s.insert(g.zero());
        prop_assert_eq!(g.hull(&s).unwrap(), g.generated_subgroup(&s).unwrap());
    }
}

fn base() -> impl Strategy<Value = Base> {
    prop_oneof![
        Just(Base::RealLine),
        Just(Base::Circle),
        Just(Base::DiscreteIntegers),
        (2u64..13).prop_map(Base::CyclicMod),
        prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(Base::PadicIntegers),
        prop::collection::vec(2u64..9, 1..4).prop_map(Base::FiniteProduct),
    ]
}

fn factor() -> impl Strategy<Value = Factor> {
    (base(), 0u8..6).prop_map(|(base, e)| {
        let compact = !matches!(base, Base::RealLine | Base::DiscreteIntegers);
        let exponent = match e {
            4 if compact => Exponent::Omega,
            5 if compact => Exponent::Kappa,
            n => Exponent::Finite(u64::from(n % 3) + 1),
        };
        Factor { base, exponent }
    })
}

fn descriptor() -> impl Strategy<Value = GroupDescriptor> {
    prop::collection::vec(factor(), 0..4).prop_map(|factors| GroupDescriptor { factors })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn descriptors_round_trip(d in descriptor()) {
        let text = d.to_string();
        prop_assert_eq!(classify::parse(&text).unwrap(), d);
    }

    #[test]
    fn compact_verdicts_match_structure(d in descriptor()) {
        if let Some(x) = classify::compact_conditions(&d) {
            prop_assert!(x.agrees, "{}: {:?}", d, x);
        }
    }
}

/// Every residue mod `p^N` that no polar character of level `< N` separates
/// must pass the digit filter.
#[test]
fn bipolar_elements_pass_the_digit_filter() {
    for (p, terms) in [(5u64, vec![0u64, 1, 2, 3]), (5, vec![0, 2]), (7, vec![1, 2])] {
        let spec = SequenceSpec::new(p, terms, TailMode::Exact).unwrap();
        for depth in 1..=4u32 {
            let modulus = p.pow(depth) as i64;
            for n in 0..modulus {
                let x = PadicTrunc::from_i64(p, depth, n).unwrap();
                let survives = match padic::coset_membership(&spec, &x) {
                    CosetStatus::NonMember => matches!(
                        padic::separate(&spec, &x, depth - 1).unwrap(),
                        Separation::UnseparatedUpTo { .. }
                    ),
                    _ => true,
                };
                if survives {
                    assert!(padic::digit_filter(&spec, &x).unwrap(), "p={p} N={depth} x={n}");
                }
            }
        }
    }
}

/// The circle and the p-adic integers use the same separator construction for
/// mirrored digit patterns.
#[test]
fn separators_mirror_between_circle_and_padics() {
    let mut catalog: Vec<(u64, Vec<i64>)> = Vec::new();
    for p in [5u64, 7, 11] {
        let big = ((p - 1) / 2) as i64;
        catalog.push((p, vec![0, 1, 0, 1]));
        catalog.push((p, vec![1, 0, 0, -1]));
        catalog.push((p, vec![0, 1, -1]));
        catalog.push((p, vec![1, 0, 0, 0, 1]));
        catalog.push((p, vec![0, 0, big]));
        catalog.push((p, vec![-big, 0]));
    }
    catalog.push((13, vec![1, 1]));
    catalog.push((13, vec![0, 6, 0]));
    assert_eq!(catalog.len(), 20);

    for (p, digits) in catalog {
        let spec = SequenceSpec::naturals(p, 12).unwrap();
        let depth = digits.len() as u32;
        let num: BigInt = digits
            .iter()
            .enumerate()
            .map(|(i, &c)| BigInt::from(c) * big_pow(p, depth - 1 - i as u32))
            .sum();
        let point = CirclePoint::new(num, big_pow(p, depth)).unwrap();
        let t = torus::separate(&spec, &point, torus::default_budget(p, depth)).unwrap();
        let j = padic::separate(&spec, &PadicTrunc::new(p, digits.clone()).unwrap(), depth - 1).unwrap();
        let (t, j) = (t.certificate().unwrap(), j.certificate().unwrap());
        assert_eq!(t.origin.shape(), j.origin.shape(), "p={p} digits={digits:?}");
        assert!(!t.value.in_t_plus() && !j.value.in_t_plus());
    }
}
