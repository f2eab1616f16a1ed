mod common;

use beauville::beauville::{
    abelian_admits_structure, classify_triangle, exact_probability_exhaustive, search_exhaustive, sigma_prime_classes, verify, BeauvilleQuadruple,
    SearchConfig, SearchOutcome, TriangleClass,
};
use beauville::probability::{estimate_beauville_probability, EstimationConfig};
use beauville::psl2::Psl2Group;
use beauville::{AbelianGroup, Group, PermGroup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn found_quad<G: Group>(g: &G) -> BeauvilleQuadruple<G::Elem> {
    match search_exhaustive(g, &SearchConfig::default()).unwrap() {
        SearchOutcome::Found { quad, .. } => quad,
        other => panic!("{}: {other:?}", g.kind()),
    }
}

fn conjugated<G: Group>(g: &G, q: &BeauvilleQuadruple<G::Elem>, a: &G::Elem, b: &G::Elem) -> BeauvilleQuadruple<G::Elem> {
    BeauvilleQuadruple { x1: g.conjugate(&q.x1, a), y1: g.conjugate(&q.y1, a), x2: g.conjugate(&q.x2, b), y2: g.conjugate(&q.y2, b) }
}

fn random_quad<G: Group>(g: &G, rng: &mut ChaCha8Rng) -> BeauvilleQuadruple<G::Elem> {
    BeauvilleQuadruple { x1: g.random_element(rng), y1: g.random_element(rng), x2: g.random_element(rng), y2: g.random_element(rng) }
}

fn check_invariance<G: Group>(g: &G, seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (g.random_element(&mut rng), g.random_element(&mut rng));
    for q in [found_quad(g), random_quad(g, &mut rng)] {
        let v = verify(g, &q).unwrap().verdict;
        prop_assert_eq!(verify(g, &conjugated(g, &q, &a, &b)).unwrap().verdict, v);
        let swapped = BeauvilleQuadruple { x1: q.x2.clone(), y1: q.y2.clone(), x2: q.x1.clone(), y2: q.y1.clone() };
        prop_assert_eq!(verify(g, &swapped).unwrap().verdict, v);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn verdict_invariant_under_conjugation_and_swap(seed: u64) {
        check_invariance(&Psl2Group::new(7, 1).unwrap(), seed)?;
        check_invariance(&PermGroup::alternating(6).unwrap(), seed)?;
        check_invariance(&AbelianGroup::new(7).unwrap(), seed)?;
    }

    #[test]
    fn triangle_class_matches_float_sign(r in 2u64..50, s in 2u64..50, t in 2u64..50) {
        let c = classify_triangle(r, s, t).unwrap();
        let mu = 1.0 - (1.0 / r as f64 + 1.0 / s as f64 + 1.0 / t as f64);
        let expected = if mu.abs() < 1e-12 { TriangleClass::Euclidean } else if mu < 0.0 { TriangleClass::Spherical } else { TriangleClass::Hyperbolic };
        prop_assert_eq!(c.class, expected);
        prop_assert!((c.measure() - mu).abs() < 1e-12);
    }
}

#[test]
fn sigma_reduction_matches_full_sigma() {
    fn run<G: Group>(g: &G, seed: u64) {
        let elems = g.enumerate(1 << 20).unwrap();
        let brute = common::brute_classes(g, &elems);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let id = g.identity();
        for _ in 0..200 {
            let q = random_quad(g, &mut rng);
            let s1 = common::full_sigma(g, &elems, &brute, &q.x1, &q.y1);
            let s2 = common::full_sigma(g, &elems, &brute, &q.x2, &q.y2);
            let full = s1.intersection(&s2).all(|e| *e == id);
            let reduced = sigma_prime_classes(g, &q.x1, &q.y1).is_disjoint(&sigma_prime_classes(g, &q.x2, &q.y2));
            assert_eq!(full, reduced, "{}", g.kind());
        }
    }
    run(&PermGroup::alternating(5).unwrap(), 1);
    run(&PermGroup::alternating(6).unwrap(), 2);
    run(&Psl2Group::new(7, 1).unwrap(), 3);
    run(&Psl2Group::new(2, 3).unwrap(), 4);
    run(&AbelianGroup::new(5).unwrap(), 5);
}

#[test]
fn abelian_closed_form_matches_search() {
    for n in 2..=13 {
        let g = AbelianGroup::new(n).unwrap();
        let found = matches!(search_exhaustive(&g, &SearchConfig::default()).unwrap(), SearchOutcome::Found { .. });
        assert_eq!(abelian_admits_structure(n).unwrap(), found, "n={n}");
    }
}

#[test]
fn monte_carlo_brackets_exact_probability() {
    let g = AbelianGroup::new(5).unwrap();
    let exact = exact_probability_exhaustive(&g, 1 << 20, 1 << 40).unwrap().value();
    for n in [1_000, 10_000] {
        let [lo, hi] = estimate_beauville_probability(&g, &EstimationConfig { samples: n, ..EstimationConfig::default() }).wilson;
        assert!(lo <= exact && exact <= hi, "N={n}: {exact} not in [{lo}, {hi}]");
    }
}

#[test]
fn a5_has_no_structure() {
    let g = PermGroup::alternating(5).unwrap();
    assert!(matches!(search_exhaustive(&g, &SearchConfig::default()).unwrap(), SearchOutcome::Nonexistence { .. }));
}

// Types ((p,p,t1),(p,p,t2)) in PSL(2,p^2) over all divisors t1 of (q-1)/2 and
// t2 of (q+1)/2; only existence of some such structure is asserted.
#[test]
fn unipotent_types_in_square_order_fields() {
    use beauville::arith::divisors;
    use beauville::beauville::{search_macbeath, Strategy};
    for (p, e) in [(5u64, 2u32), (7, 2)] {
        let g = Psl2Group::new(p, e).unwrap();
        let q = g.q();
        let mut realised = Vec::new();
        for t1 in divisors((q - 1) / 2).into_iter().filter(|&t| t > 1) {
            for t2 in divisors((q + 1) / 2).into_iter().filter(|&t| t > 1) {
                let mut a = [p, p, t1];
                let mut b = [p, p, t2];
                a.sort_unstable();
                b.sort_unstable();
                let cfg = SearchConfig { strategy: Strategy::Macbeath, types: Some((a, b)), ..SearchConfig::default() };
                if let Ok(SearchOutcome::Found { report, .. }) = search_macbeath(&g, &cfg) {
                    assert!(report.verdict);
                    realised.push((t1, t2));
                }
            }
        }
        println!("PSL2({q}): ((p,p,t1),(p,p,t2)) realised for {realised:?}");
        assert!(!realised.is_empty(), "PSL2({q})");
    }
}

// Estimates for A_n, n <= 12, are reported; no limit is asserted.
#[test]
fn alternating_probability_trend_is_reported() {
    let mut rows = Vec::new();
    for n in 5..=12 {
        let g = PermGroup::alternating(n).unwrap();
        let r = estimate_beauville_probability(&g, &EstimationConfig { samples: 1_000, component_stats: false, ..EstimationConfig::default() });
        assert!((0.0..=1.0).contains(&r.estimate));
        if n == 5 {
            assert_eq!(r.successes, 0);
        }
        rows.push((n, r.estimate));
    }
    println!("P(A_n) estimates: {rows:?}");
}
