//! Unmixed Beauville structures: Σ-sets, the three-condition verifier,
//! triangle types, and structure / generating-triple searches.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::prime_divisors;
use crate::counting::ClassPartition;
use crate::group::{AbelianGroup, Group, GroupError};
use crate::par;
use crate::perm::{shape_representative, CycleShape, PermGroup, Permutation};
use crate::psl2::{Psl2Error, Psl2Group, SubgroupClass, TraceTriple};

pub const DEFAULT_SEARCH_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum BeauvilleError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Psl2(#[from] Psl2Error),
    #[error("triangle type entries must be at least 2, got ({0},{1},{2})")]
    BadTriangle(u64, u64, u64),
    #[error("type {0} is {1}: a finite group with a generating triple of this type admits no unmixed Beauville structure of it")]
    NotHyperbolic(String, TriangleClass),
    #[error("{group} has no element of order {order}")]
    Unrealizable { group: String, order: u64 },
    #[error("search needs {needed} iterations, above the cap {cap}")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("the {0} strategy is only available for PSL(2,q)")]
    StrategyUnsupported(&'static str),
    #[error("no generating triple of type ({0},{1},{2}) found after {3} attempts (inconclusive)")]
    Inconclusive(u64, u64, u64, u64),
    #[error("no generating triple of type ({0},{1},{2}) exists")]
    NoTriple(u64, u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleClass {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl fmt::Display for TriangleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangleClass::Spherical => "spherical",
            TriangleClass::Euclidean => "euclidean",
            TriangleClass::Hyperbolic => "hyperbolic",
        })
    }
}

/// `(r, s, t)` sorted ascending, with `mu = 1 - (1/r + 1/s + 1/t)` as an
/// exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleType {
    pub r: u64,
    pub s: u64,
    pub t: u64,
    pub class: TriangleClass,
    pub measure_numerator: i128,
    pub measure_denominator: u128,
}

impl TriangleType {
    pub fn measure(&self) -> f64 {
        self.measure_numerator as f64 / self.measure_denominator as f64
    }
}

pub fn classify_triangle(r: u64, s: u64, t: u64) -> Result<TriangleType, BeauvilleError> {
    if r < 2 || s < 2 || t < 2 {
        return Err(BeauvilleError::BadTriangle(r, s, t));
    }
    let mut v = [r, s, t];
    v.sort_unstable();
    let [r, s, t] = v;
    let den = r as i128 * s as i128 * t as i128;
    let num = den - (r as i128 * s as i128 + s as i128 * t as i128 + r as i128 * t as i128);
    let g = num.gcd(&den);
    let class = match num.signum() {
        -1 => TriangleClass::Spherical,
        0 => TriangleClass::Euclidean,
        _ => TriangleClass::Hyperbolic,
    };
    let (num, den) = if num == 0 { (0, 1) } else { (num / g, den / g) };
    Ok(TriangleType { r, s, t, class, measure_numerator: num, measure_denominator: den as u128 })
}

/// PSL(2, p^e) is a quotient of T(2,3,7) exactly when `e = 1` and
/// `p = 0, +-1 (mod 7)`, or `e = 3` and `p = +-2, +-3 (mod 7)`.
pub fn hurwitz_psl2(p: u64, e: u32) -> bool {
    match (e, p % 7) {
        (1, 0 | 1 | 6) => true,
        (3, 2..=5) => true,
        _ => false,
    }
}

/// `(x, y, z)` with `xyz = 1`; the type is always recomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingTriple<E> {
    pub x: E,
    pub y: E,
    pub z: E,
    pub orders: [u64; 3],
}

impl<E: Clone> GeneratingTriple<E> {
    pub fn new<G: Group<Elem = E>>(group: &G, x: &E, y: &E) -> Self {
        let z = group.inverse(&group.multiply(x, y));
        let orders = [group.element_order(x), group.element_order(y), group.element_order(&z)];
        GeneratingTriple { x: x.clone(), y: y.clone(), z, orders }
    }

    /// Orders sorted ascending.
    pub fn sorted_type(&self) -> [u64; 3] {
        let mut t = self.orders;
        t.sort_unstable();
        t
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeauvilleQuadruple<E> {
    pub x1: E,
    pub y1: E,
    pub x2: E,
    pub y2: E,
}

/// Classes of the prime-order elements among the powers of `x`, `y` and
/// `z = (xy)^-1`, tagged with the prime.
///
/// Every nontrivial element of Σ has a power of prime order, and Σ is closed
/// under powers and conjugation, so two Σ-sets meet only in the identity
/// exactly when these sets are disjoint.
pub type SigmaFingerprint<C> = BTreeSet<(u64, C)>;

pub fn sigma_prime_classes<G: Group>(group: &G, x: &G::Elem, y: &G::Elem) -> SigmaFingerprint<G::Class> {
    let z = group.inverse(&group.multiply(x, y));
    let mut out = BTreeSet::new();
    for w in [x, y, &z] {
        let m = group.element_order(w);
        for r in prime_divisors(m) {
            let h = group.power(w, m / r);
            let mut cur = h.clone();
            for _ in 1..r {
                out.insert((r, group.fingerprint(&cur)));
                cur = group.multiply(&cur, &h);
            }
        }
    }
    out
}

fn product_of_orders(orders: &[u64; 3]) -> u128 {
    orders.iter().map(|&o| o as u128).product()
}

/// Per-condition verdicts for a candidate quadruple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub group: String,
    pub quadruple: [String; 4],
    pub z: [String; 2],
    pub cond_i: bool,
    pub cond_ii: [bool; 2],
    pub cond_iii: bool,
    /// Condition iii decided by coprime order products alone.
    pub coprime_fast_path: bool,
    /// Generated subgroup for a pair that fails condition ii.
    pub subgroup_witness: [Option<String>; 2],
    /// Prime-order classes common to both Σ-sets.
    pub common_classes: Vec<String>,
    pub types: [[u64; 3]; 2],
    pub hyperbolic: [bool; 2],
    pub verdict: bool,
}

fn type_is_hyperbolic(t: &[u64; 3]) -> bool {
    classify_triangle(t[0], t[1], t[2]).map(|c| c.class == TriangleClass::Hyperbolic).unwrap_or(false)
}

pub fn verify<G: Group>(group: &G, quad: &BeauvilleQuadruple<G::Elem>) -> Result<VerificationReport, GroupError> {
    for e in [&quad.x1, &quad.y1, &quad.x2, &quad.y2] {
        if !group.contains(e) {
            return Err(GroupError::HandleMismatch(format!("{e:?}")));
        }
    }
    let t1 = GeneratingTriple::new(group, &quad.x1, &quad.y1);
    let t2 = GeneratingTriple::new(group, &quad.x2, &quad.y2);
    let cond_i = [&t1, &t2].iter().all(|t| group.is_identity(&group.multiply(&group.multiply(&t.x, &t.y), &t.z)));
    let gen = [group.generates(&t1.x, &t1.y), group.generates(&t2.x, &t2.y)];
    let witness = [
        (!gen[0]).then(|| group.subgroup_label(&t1.x, &t1.y)),
        (!gen[1]).then(|| group.subgroup_label(&t2.x, &t2.y)),
    ];
    let fast = product_of_orders(&t1.orders).gcd(&product_of_orders(&t2.orders)) == 1;
    let common: Vec<String> = if fast {
        Vec::new()
    } else {
        let s1 = sigma_prime_classes(group, &t1.x, &t1.y);
        let s2 = sigma_prime_classes(group, &t2.x, &t2.y);
        s1.intersection(&s2).map(|(_, c)| group.class_label(c)).collect()
    };
    let cond_iii = common.is_empty();
    let types = [t1.sorted_type(), t2.sorted_type()];
    Ok(VerificationReport {
        group: group.kind().to_string(),
        quadruple: [&quad.x1, &quad.y1, &quad.x2, &quad.y2].map(|e| group.format_element(e)),
        z: [group.format_element(&t1.z), group.format_element(&t2.z)],
        cond_i,
        cond_ii: gen,
        cond_iii,
        coprime_fast_path: fast,
        subgroup_witness: witness,
        common_classes: common,
        types,
        hyperbolic: [type_is_hyperbolic(&types[0]), type_is_hyperbolic(&types[1])],
        verdict: cond_i && gen[0] && gen[1] && cond_iii,
    })
}

/// Verdict only, with the cheap checks first.
pub fn is_beauville<G: Group>(group: &G, quad: &BeauvilleQuadruple<G::Elem>) -> bool {
    let o1 = [group.element_order(&quad.x1), group.element_order(&quad.y1), group.element_order(&group.multiply(&quad.x1, &quad.y1))];
    let o2 = [group.element_order(&quad.x2), group.element_order(&quad.y2), group.element_order(&group.multiply(&quad.x2, &quad.y2))];
    if !group.generates(&quad.x1, &quad.y1) || !group.generates(&quad.x2, &quad.y2) {
        return false;
    }
    if product_of_orders(&o1).gcd(&product_of_orders(&o2)) == 1 {
        return true;
    }
    sigma_prime_classes(group, &quad.x1, &quad.y1).is_disjoint(&sigma_prime_classes(group, &quad.x2, &quad.y2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Macbeath,
    Random,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Sorted target types for the two pairs.
    pub types: Option<([u64; 3], [u64; 3])>,
    pub cap: u64,
    pub enumeration_limit: u128,
    pub seed: u64,
    pub attempts: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Exhaustive,
            types: None,
            cap: DEFAULT_SEARCH_CAP,
            enumeration_limit: crate::counting::DEFAULT_ENUMERATION_LIMIT,
            seed: crate::DEFAULT_SEED,
            attempts: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome<E> {
    Found { quad: BeauvilleQuadruple<E>, report: VerificationReport },
    /// Exhaustive search over every generating pair up to conjugacy found no
    /// two pairs with disjoint Σ-sets: a proof that no structure (of the
    /// requested types) exists.
    Nonexistence { pairs_examined: u64, generating_signatures: usize },
    Inconclusive { attempts: u64 },
}

fn check_types(types: &Option<([u64; 3], [u64; 3])>) -> Result<(), BeauvilleError> {
    if let Some((a, b)) = types {
        for t in [a, b] {
            let c = classify_triangle(t[0], t[1], t[2])?;
            if c.class != TriangleClass::Hyperbolic {
                return Err(BeauvilleError::NotHyperbolic(format!("({},{},{})", t[0], t[1], t[2]), c.class));
            }
        }
    }
    Ok(())
}

/// Generating pairs collected by Σ signature (and type), first witness kept.
struct SignatureBook<G: Group> {
    entries: Vec<(SigmaFingerprint<G::Class>, [u64; 3], G::Elem, G::Elem)>,
    seen: HashMap<(SigmaFingerprint<G::Class>, [u64; 3]), usize>,
}

impl<G: Group> SignatureBook<G> {
    fn new() -> Self {
        SignatureBook { entries: Vec::new(), seen: HashMap::new() }
    }

    /// Returns the index if the signature is new.
    fn insert(&mut self, sig: SigmaFingerprint<G::Class>, ty: [u64; 3], x: G::Elem, y: G::Elem) -> Option<usize> {
        let key = (sig, ty);
        if self.seen.contains_key(&key) {
            return None;
        }
        let idx = self.entries.len();
        self.seen.insert(key.clone(), idx);
        self.entries.push((key.0, ty, x, y));
        Some(idx)
    }

    fn type_ok(ty: &[u64; 3], want: Option<&[u64; 3]>) -> bool {
        want.is_none_or(|w| w == ty)
    }

    /// First pair `(a, b)` (in insertion order) of compatible signatures.
    fn find_disjoint(&self, types: &Option<([u64; 3], [u64; 3])>) -> Option<(usize, usize)> {
        let (w1, w2) = match types {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        for (a, ea) in self.entries.iter().enumerate() {
            if !Self::type_ok(&ea.1, w1) {
                continue;
            }
            for (b, eb) in self.entries.iter().enumerate() {
                if Self::type_ok(&eb.1, w2) && ea.0.is_disjoint(&eb.0) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Pairs involving the entry `new` on either side.
    fn find_disjoint_with(&self, new: usize, types: &Option<([u64; 3], [u64; 3])>) -> Option<(usize, usize)> {
        let (w1, w2) = match types {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        let en = &self.entries[new];
        for (other, eo) in self.entries.iter().enumerate() {
            if !en.0.is_disjoint(&eo.0) {
                continue;
            }
            if Self::type_ok(&en.1, w1) && Self::type_ok(&eo.1, w2) {
                return Some((new, other));
            }
            if Self::type_ok(&eo.1, w1) && Self::type_ok(&en.1, w2) {
                return Some((other, new));
            }
        }
        None
    }

    fn quad(&self, a: usize, b: usize) -> BeauvilleQuadruple<G::Elem> {
        let (ea, eb) = (&self.entries[a], &self.entries[b]);
        BeauvilleQuadruple { x1: ea.2.clone(), y1: ea.3.clone(), x2: eb.2.clone(), y2: eb.3.clone() }
    }
}

fn found<G: Group>(group: &G, quad: BeauvilleQuadruple<G::Elem>) -> Result<SearchOutcome<G::Elem>, BeauvilleError> {
    let report = verify(group, &quad)?;
    assert!(report.verdict, "search produced a quadruple that fails verification");
    Ok(SearchOutcome::Found { quad, report })
}

/// Exhaustive search with `x` over class representatives and `y` over the
/// whole group. Both conditions are invariant under simultaneous
/// conjugation of a pair, so this sees every pair up to conjugacy.
pub fn search_exhaustive<G: Group>(group: &G, cfg: &SearchConfig) -> Result<SearchOutcome<G::Elem>, BeauvilleError> {
    check_types(&cfg.types)?;
    let part = ClassPartition::new(group, cfg.enumeration_limit)?;
    let needed = part.len() as u128 * group.order();
    if needed > cfg.cap as u128 {
        return Err(BeauvilleError::CapExceeded { needed, cap: cfg.cap });
    }
    let elems: Vec<G::Elem> = part.members.iter().flatten().cloned().collect();
    let wanted = |ty: &[u64; 3]| match &cfg.types {
        Some((a, b)) => ty == a || ty == b,
        None => true,
    };
    let mut book = SignatureBook::<G>::new();
    for class in &part.classes {
        let x = &class.representative;
        let hits = par::map(&elems, |y| {
            let t = GeneratingTriple::new(group, x, y);
            let ty = t.sorted_type();
            (wanted(&ty) && group.generates(x, y)).then(|| (sigma_prime_classes(group, x, y), ty))
        });
        let mut grew = false;
        for (y, hit) in elems.iter().zip(hits) {
            if let Some((sig, ty)) = hit {
                grew |= book.insert(sig, ty, x.clone(), y.clone()).is_some();
            }
        }
        // stop at the first class that completes a disjoint pair
        if grew {
            if let Some((a, b)) = book.find_disjoint(&cfg.types) {
                return found(group, book.quad(a, b));
            }
        }
    }
    match book.find_disjoint(&cfg.types) {
        Some((a, b)) => found(group, book.quad(a, b)),
        None => Ok(SearchOutcome::Nonexistence { pairs_examined: needed as u64, generating_signatures: book.entries.len() }),
    }
}

/// Seeded random search: uniform pairs, collected by Σ signature until two
/// compatible ones are disjoint.
pub fn search_random<G: Group>(group: &G, cfg: &SearchConfig) -> Result<SearchOutcome<G::Elem>, BeauvilleError> {
    check_types(&cfg.types)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut book = SignatureBook::<G>::new();
    let wanted = |ty: &[u64; 3]| match &cfg.types {
        Some((a, b)) => ty == a || ty == b,
        None => true,
    };
    for _ in 0..cfg.attempts {
        let x = group.random_element(&mut rng);
        let y = group.random_element(&mut rng);
        let ty = GeneratingTriple::new(group, &x, &y).sorted_type();
        if !wanted(&ty) || !group.generates(&x, &y) {
            continue;
        }
        if let Some(idx) = book.insert(sigma_prime_classes(group, &x, &y), ty, x, y) {
            if let Some((a, b)) = book.find_disjoint_with(idx, &cfg.types) {
                return found(group, book.quad(a, b));
            }
        }
    }
    Ok(SearchOutcome::Inconclusive { attempts: cfg.attempts })
}

/// PSL(2,q) pairs of type `ty` with lifts of prescribed traces, built with
/// Macbeath's construction; at most `limit` distinct Σ signatures.
fn macbeath_pairs(g: &Psl2Group, ty: [u64; 3], limit: usize) -> Result<Vec<(crate::psl2::ProjElement, crate::psl2::ProjElement)>, BeauvilleError> {
    let candidates: Vec<Vec<crate::FieldElement>> = ty.iter().map(|&k| g.traces_of_order(k)).collect();
    for (k, c) in ty.iter().zip(&candidates) {
        if c.is_empty() {
            return Err(BeauvilleError::Unrealizable { group: g.kind().to_string(), order: *k });
        }
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for &a in &candidates[0] {
        for &b in &candidates[1] {
            for &c in &candidates[2] {
                let t = TraceTriple { alpha: a, beta: b, gamma: c };
                if g.is_singular_triple(&t) {
                    continue;
                }
                let (ma, mb, _) = g.macbeath_solve(&t)?;
                let (x, y) = (g.project(&ma), g.project(&mb));
                let trip = GeneratingTriple::new(g, &x, &y);
                if trip.orders != ty || g.classify_subgroup(&x, &y) != SubgroupClass::Full {
                    continue;
                }
                // the traces fix the pair only up to PGL(2,q); the diagonal
                // image can land in different classes (unipotent ones, say)
                let outer = g.diagonal_outer(&x).zip(g.diagonal_outer(&y));
                for (x, y) in std::iter::once((x, y)).chain(outer) {
                    if seen.insert(sigma_prime_classes(g, &x, &y)) {
                        out.push((x, y));
                        if out.len() >= limit {
                            return Ok(out);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Default PSL(2,q) targets: `((q-1)/d)^3` against `((q+1)/d)^3`.
pub fn default_psl2_types(g: &Psl2Group) -> ([u64; 3], [u64; 3]) {
    let (a, b) = (g.split_order(), g.nonsplit_order());
    ([a; 3], [b; 3])
}

/// Macbeath-guided search in PSL(2,q): enumerate trace triples whose traces
/// have the requested orders, realise them with `macbeath_solve`, keep the
/// generating ones, and pair up disjoint Σ-sets.
pub fn search_macbeath(g: &Psl2Group, cfg: &SearchConfig) -> Result<SearchOutcome<crate::psl2::ProjElement>, BeauvilleError> {
    let types = cfg.types.unwrap_or_else(|| default_psl2_types(g));
    check_types(&Some(types))?;
    let (t1, t2) = types;
    let side1 = macbeath_pairs(g, t1, 64)?;
    let side2 = macbeath_pairs(g, t2, 64)?;
    for (x1, y1) in &side1 {
        let s1 = sigma_prime_classes(g, x1, y1);
        for (x2, y2) in &side2 {
            if s1.is_disjoint(&sigma_prime_classes(g, x2, y2)) {
                return found(g, BeauvilleQuadruple { x1: *x1, y1: *y1, x2: *x2, y2: *y2 });
            }
        }
    }
    Ok(SearchOutcome::Inconclusive { attempts: (side1.len() * side2.len()) as u64 })
}

/// A generating triple of exact orders `(r, s, t)` in PSL(2,q), via traces.
pub fn find_generating_triple_psl2(g: &Psl2Group, r: u64, s: u64, t: u64) -> Result<GeneratingTriple<crate::psl2::ProjElement>, BeauvilleError> {
    for k in [r, s, t] {
        if !g.element_orders().contains(&k) || k < 2 {
            return Err(BeauvilleError::Unrealizable { group: g.kind().to_string(), order: k });
        }
    }
    let pairs = macbeath_pairs(g, [r, s, t], 1)?;
    match pairs.first() {
        Some((x, y)) => Ok(GeneratingTriple::new(g, x, y)),
        None => Err(BeauvilleError::NoTriple(r, s, t)),
    }
}

/// Even shapes of degree `n` whose element order is `k`.
pub fn even_shapes_of_order(n: usize, k: u64, even_only: bool) -> Vec<CycleShape> {
    fn partitions(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            partitions(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut all);
    all.into_iter()
        .map(CycleShape::new)
        .filter(|s| s.order() == k && (!even_only || s.is_even()))
        .collect()
}

/// A generating triple in A_n or S_n: random conjugates of fixed shapes of
/// the requested orders (almost homogeneous shapes first), seeded.
pub fn find_generating_triple_perm(g: &PermGroup, r: u64, s: u64, t: u64, seed: u64, attempts: u64) -> Result<GeneratingTriple<Permutation>, BeauvilleError> {
    let n = g.degree();
    let mut shape_lists = Vec::new();
    for k in [r, s, t] {
        let mut shapes = even_shapes_of_order(n, k, g.is_alternating());
        if shapes.is_empty() {
            return Err(BeauvilleError::Unrealizable { group: g.kind().to_string(), order: k });
        }
        shapes.sort_by_key(|sh| (sh.almost_homogeneous().is_none(), sh.fixed_points()));
        shape_lists.push(shapes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = PermGroup::symmetric(n)?;
    for _ in 0..attempts {
        let sx = &shape_lists[0][rng.gen_range(0..shape_lists[0].len())];
        let sy = &shape_lists[1][rng.gen_range(0..shape_lists[1].len())];
        let cx = full.random_element(&mut rng);
        let cy = full.random_element(&mut rng);
        let x = full.conjugate(&shape_representative(sx), &cx);
        let y = full.conjugate(&shape_representative(sy), &cy);
        let trip = GeneratingTriple::new(g, &x, &y);
        if trip.orders == [r, s, t] && g.generates(&x, &y) {
            return Ok(trip);
        }
    }
    Err(BeauvilleError::Inconclusive(r, s, t, attempts))
}

/// Exhaustive generating-triple search for any enumerable group.
pub fn find_generating_triple_exhaustive<G: Group>(group: &G, r: u64, s: u64, t: u64, limit: u128) -> Result<GeneratingTriple<G::Elem>, BeauvilleError> {
    let elems = group.enumerate(limit)?;
    let orders: Vec<u64> = elems.iter().map(|e| group.element_order(e)).collect();
    for k in [r, s, t] {
        if !orders.contains(&k) {
            return Err(BeauvilleError::Unrealizable { group: group.kind().to_string(), order: k });
        }
    }
    for (x, &ox) in elems.iter().zip(&orders) {
        if ox != r {
            continue;
        }
        for (y, &oy) in elems.iter().zip(&orders) {
            if oy != s {
                continue;
            }
            let trip = GeneratingTriple::new(group, x, y);
            if trip.orders[2] == t && group.generates(x, y) {
                return Ok(trip);
            }
        }
    }
    Err(BeauvilleError::NoTriple(r, s, t))
}

/// An exact probability `numerator / denominator` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: u128,
    pub denominator: u128,
}

impl Rational {
    pub fn new(num: u128, den: u128) -> Self {
        let g = num.gcd(&den).max(1);
        Rational { numerator: num / g, denominator: den / g }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Exact probability that four uniform elements form an unmixed Beauville
/// structure: `sum over disjoint (S, T) of N_S N_T / |G|^4`, where `N_S`
/// counts generating pairs with Σ signature `S` (class representatives for
/// `x`, scaled by class size).
pub fn exact_probability_exhaustive<G: Group>(group: &G, limit: u128, cap: u64) -> Result<Rational, BeauvilleError> {
    let part = ClassPartition::new(group, limit)?;
    let n = group.order();
    let needed = part.len() as u128 * n;
    if needed > cap as u128 {
        return Err(BeauvilleError::CapExceeded { needed, cap });
    }
    let elems: Vec<G::Elem> = part.members.iter().flatten().cloned().collect();
    let mut counts: HashMap<SigmaFingerprint<G::Class>, u128> = HashMap::new();
    for class in &part.classes {
        let x = &class.representative;
        let sigs = par::map(&elems, |y| group.generates(x, y).then(|| sigma_prime_classes(group, x, y)));
        for sig in sigs.into_iter().flatten() {
            *counts.entry(sig).or_default() += class.size;
        }
    }
    let entries: Vec<(&SigmaFingerprint<G::Class>, &u128)> = counts.iter().collect();
    let mut good: u128 = 0;
    for (s, ns) in &entries {
        for (t, nt) in &entries {
            if s.is_disjoint(t) {
                good += *ns * *nt;
            }
        }
    }
    Ok(Rational::new(good, n.pow(4)))
}

/// Decide existence in Z/n x Z/n exhaustively.
pub fn abelian_admits_structure(n: u64) -> Result<bool, BeauvilleError> {
    let g = AbelianGroup::new(n)?;
    Ok(matches!(search_exhaustive(&g, &SearchConfig::default())?, SearchOutcome::Found { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_examples() {
        let t = classify_triangle(7, 2, 3).unwrap();
        assert_eq!((t.r, t.s, t.t), (2, 3, 7));
        assert_eq!(t.class, TriangleClass::Hyperbolic);
        assert_eq!((t.measure_numerator, t.measure_denominator), (1, 42));
        assert_eq!(classify_triangle(2, 3, 6).unwrap().class, TriangleClass::Euclidean);
        assert_eq!(classify_triangle(2, 3, 5).unwrap().class, TriangleClass::Spherical);
        assert!(classify_triangle(1, 3, 5).is_err());
    }

    #[test]
    fn hurwitz_examples() {
        assert!(hurwitz_psl2(7, 1));
        assert!(hurwitz_psl2(13, 1));
        assert!(hurwitz_psl2(2, 3));
        assert!(!hurwitz_psl2(5, 1));
    }

    #[test]
    fn sigma_examples() {
        let ab = AbelianGroup::new(5).unwrap();
        assert!(sigma_prime_classes(&ab, &ab.identity(), &ab.identity()).is_empty());
        let s = sigma_prime_classes(&ab, &ab.elem(1, 0), &ab.elem(0, 1));
        // multiples of (1,0), (0,1), (4,4): 3 lines of 4 nonzero points
        assert_eq!(s.len(), 12);
    }

    #[test]
    fn abelian_five_has_structure() {
        let ab = AbelianGroup::new(5).unwrap();
        match search_exhaustive(&ab, &SearchConfig::default()).unwrap() {
            SearchOutcome::Found { report, .. } => assert!(report.verdict),
            other => panic!("expected a structure, got {other:?}"),
        }
        let id = ab.identity();
        let r = verify(&ab, &BeauvilleQuadruple { x1: id, y1: id, x2: ab.elem(1, 0), y2: ab.elem(0, 1) }).unwrap();
        assert!(!r.cond_ii[0]);
        assert!(!r.verdict);
    }

    #[test]
    fn non_hyperbolic_targets_rejected() {
        let g = Psl2Group::new(7, 1).unwrap();
        let cfg = SearchConfig { strategy: Strategy::Macbeath, types: Some(([2, 3, 5], [3, 3, 4])), ..SearchConfig::default() };
        assert!(matches!(search_macbeath(&g, &cfg), Err(BeauvilleError::NotHyperbolic(..))));
    }

    #[test]
    fn generating_triples() {
        let g = Psl2Group::new(7, 1).unwrap();
        let t = find_generating_triple_psl2(&g, 2, 3, 7).unwrap();
        assert_eq!(t.orders, [2, 3, 7]);
        let a5 = PermGroup::alternating(5).unwrap();
        assert!(matches!(find_generating_triple_perm(&a5, 2, 3, 7, 1, 100), Err(BeauvilleError::Unrealizable { order: 7, .. })));
        let t = find_generating_triple_perm(&a5, 2, 3, 5, 1, 10_000).unwrap();
        assert_eq!(t.orders, [2, 3, 5]);
        let g13 = Psl2Group::new(13, 1).unwrap();
        assert_eq!(find_generating_triple_psl2(&g13, 6, 6, 6).unwrap().orders, [6, 6, 6]);
    }
}
