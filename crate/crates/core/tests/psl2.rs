mod common;

use std::collections::HashMap;

use beauville::counting::ClassPartition;
use beauville::psl2::{Psl2Group, SubgroupClass, TraceTriple};
use beauville::Group;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SMALL_Q: [(u64, u32); 9] = [(5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (5, 2), (7, 2), (101, 1)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn macbeath_solution_has_the_requested_traces(which in 0..SMALL_Q.len(), a: u64, b: u64, c: u64) {
        let (p, e) = SMALL_Q[which];
        let g = Psl2Group::new(p, e).unwrap();
        let f = g.field();
        let t = TraceTriple { alpha: f.from_index(a % g.q()).unwrap(), beta: f.from_index(b % g.q()).unwrap(), gamma: f.from_index(c % g.q()).unwrap() };
        let (ma, mb, mc) = g.macbeath_solve(&t).unwrap();
        prop_assert_eq!(g.trace(&ma), t.alpha);
        prop_assert_eq!(g.trace(&mb), t.beta);
        prop_assert_eq!(g.trace(&mc), t.gamma);
        for m in [&ma, &mb, &mc] {
            prop_assert_eq!(g.det(m), f.one());
        }
        prop_assert_eq!(g.mat_mul(&g.mat_mul(&ma, &mb), &mc), g.mat_identity());
    }

    #[test]
    fn element_orders_divide_group_order(which in 0..SMALL_Q.len(), seed: u64) {
        let (p, e) = SMALL_Q[which];
        let g = Psl2Group::new(p, e).unwrap();
        let x = g.random_element(&mut ChaCha8Rng::seed_from_u64(seed));
        let k = g.element_order(&x);
        prop_assert_eq!(g.order() % k as u128, 0);
        prop_assert!(g.is_identity(&g.power(&x, k)));
        prop_assert!(g.order_from_trace(g.trace(&x.lift())).contains(&k));
    }

    #[test]
    fn generation_is_symmetric(which in 0..SMALL_Q.len(), seed: u64) {
        let (p, e) = SMALL_Q[which];
        let g = Psl2Group::new(p, e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng);
        let y = g.random_element(&mut rng);
        let gen = g.generates(&x, &y);
        prop_assert_eq!(gen, g.generates(&y, &x));
        prop_assert_eq!(gen, g.generates(&x, &g.multiply(&x, &y)));
        prop_assert_eq!(gen, g.generates(&g.inverse(&x), &y));
    }

    #[test]
    fn diagonal_outer_is_a_trace_preserving_automorphism(which in 0..SMALL_Q.len(), seed: u64) {
        let (p, e) = SMALL_Q[which];
        let g = Psl2Group::new(p, e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng);
        let y = g.random_element(&mut rng);
        let Some(ox) = g.diagonal_outer(&x) else { return Ok(()) };
        let oy = g.diagonal_outer(&y).unwrap();
        prop_assert_eq!(g.diagonal_outer(&g.multiply(&x, &y)).unwrap(), g.multiply(&ox, &oy));
        let (tx, tox) = (g.trace(&x.lift()), g.trace(&ox.lift()));
        prop_assert!(tx == tox || tx == g.field().neg(tox));
        prop_assert_eq!(g.element_order(&x), g.element_order(&ox));
    }

    #[test]
    fn element_text_round_trips(which in 0..SMALL_Q.len(), seed: u64) {
        let (p, e) = SMALL_Q[which];
        let g = Psl2Group::new(p, e).unwrap();
        let x = g.random_element(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(g.parse_element(&g.format_element(&x)).unwrap(), x);
    }
}

// Every pair up to conjugacy of the first entry: the structural verdict must
// coincide with a singular trace triple, and the classifier with closure.
#[test]
fn structural_iff_singular_for_small_q() {
    for (p, e) in [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1)] {
        let g = Psl2Group::new(p, e).unwrap();
        let elems = g.enumerate(1 << 20).unwrap();
        let part = ClassPartition::new(&g, 1 << 20).unwrap();
        for x in part.classes.iter().map(|c| &c.representative) {
            for y in &elems {
                let oracle = g.classify_by_closure(x, y, 1 << 20).unwrap();
                let singular = g.is_singular_triple(&g.trace_triple(x, y));
                assert_eq!(oracle == SubgroupClass::Structural, singular, "q={} x={} y={}", g.q(), g.format_element(x), g.format_element(y));
                assert_eq!(g.classify_subgroup(x, y), oracle, "q={} x={} y={}", g.q(), g.format_element(x), g.format_element(y));
            }
        }
    }
}

#[test]
fn classifier_agrees_with_closure_on_random_pairs() {
    for (p, e) in [(7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1), (5, 2), (3, 3)] {
        let g = Psl2Group::new(p, e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xc1a55 + g.q());
        for _ in 0..1000 {
            let x = g.random_element(&mut rng);
            let y = g.random_element(&mut rng);
            assert_eq!(Some(g.classify_subgroup(&x, &y)), g.classify_by_closure(&x, &y, 1 << 20), "q={}", g.q());
        }
    }
}

#[test]
fn fingerprints_match_conjugacy_for_small_q() {
    for (p, e) in [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1)] {
        let g = Psl2Group::new(p, e).unwrap();
        common::fingerprints_exact(&g, &g.enumerate(1 << 20).unwrap()).unwrap();
    }
}

#[test]
fn diagonal_outer_swaps_unipotent_classes() {
    for (p, e) in [(5, 1), (7, 1), (3, 2), (5, 2)] {
        let g = Psl2Group::new(p, e).unwrap();
        let u = g.find_element_of_order(p).unwrap();
        assert_ne!(g.fingerprint(&u), g.fingerprint(&g.diagonal_outer(&u).unwrap()), "q={}", g.q());
    }
    assert!(Psl2Group::new(2, 3).unwrap().diagonal_outer(&Psl2Group::new(2, 3).unwrap().identity()).is_none());
}

// Sampled class frequencies against exact class sizes.
#[test]
fn random_elements_are_uniform_across_classes() {
    let g = Psl2Group::new(101, 1).unwrap();
    let part = ClassPartition::new(&g, 1 << 20).unwrap();
    let n = 200_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for _ in 0..n {
        *counts.entry(part.class_of(&g, &g.random_element(&mut rng))).or_default() += 1;
    }
    let order = g.order() as f64;
    let chi2: f64 = part
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let expected = n as f64 * c.size as f64 / order;
            let seen = *counts.get(&i).unwrap_or(&0) as f64;
            (seen - expected).powi(2) / expected
        })
        .sum();
    // 99.9% quantile of chi-square with (classes - 1) degrees of freedom, via
    // the Wilson-Hilferty approximation
    let df = (part.len() - 1) as f64;
    let z = 3.090_232;
    let limit = df * (1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt()).powi(3);
    assert!(chi2 < limit, "chi2 {chi2} over {limit} with {df} df");
}
