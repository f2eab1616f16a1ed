//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use beauville::Group;

/// Conjugacy classes by explicit orbits `{g^-1 a g}`; returns the class index
/// of every element.
pub fn brute_classes<G: Group>(g: &G, elems: &[G::Elem]) -> HashMap<G::Elem, usize> {
    let mut class_of: HashMap<G::Elem, usize> = HashMap::new();
    let mut next = 0;
    for a in elems {
        if class_of.contains_key(a) {
            continue;
        }
        for h in elems {
            class_of.entry(g.conjugate(a, h)).or_insert(next);
        }
        next += 1;
    }
    class_of
}

/// Checks that fingerprints induce exactly the brute conjugacy partition.
pub fn fingerprints_exact<G: Group>(g: &G, elems: &[G::Elem]) -> Result<(), String> {
    let brute = brute_classes(g, elems);
    let mut fp_to_class: HashMap<G::Class, usize> = HashMap::new();
    let mut class_to_fp: HashMap<usize, G::Class> = HashMap::new();
    for a in elems {
        let fp = g.fingerprint(a);
        let c = brute[a];
        if *fp_to_class.entry(fp.clone()).or_insert(c) != c {
            return Err(format!("{}: fingerprint shared by non-conjugate elements ({})", g.kind(), g.format_element(a)));
        }
        if *class_to_fp.entry(c).or_insert(fp.clone()) != fp {
            return Err(format!("{}: conjugate elements with different fingerprints ({})", g.kind(), g.format_element(a)));
        }
    }
    Ok(())
}

/// Σ(x, y, (xy)^-1) as an explicit element set.
pub fn full_sigma<G: Group>(g: &G, elems: &[G::Elem], brute: &HashMap<G::Elem, usize>, x: &G::Elem, y: &G::Elem) -> HashSet<G::Elem> {
    let z = g.inverse(&g.multiply(x, y));
    let mut classes = HashSet::new();
    for w in [x, y, &z] {
        let mut cur = g.identity();
        for _ in 0..g.element_order(w) {
            classes.insert(brute[&cur]);
            cur = g.multiply(&cur, w);
        }
    }
    elems.iter().filter(|e| classes.contains(&brute[*e])).cloned().collect()
}
