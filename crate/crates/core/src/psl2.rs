//! PSL(2,q) as projective 2x2 matrices over GF(q).
//!
//! Elements are stored as a canonical SL(2,q) lift: of the two lifts `A` and
//! `-A`, the one whose first nonzero entry (scan order a, b, c, d) has the
//! smaller field index. Element orders depend only on the trace of a lift
//! (away from traces +-2), so they are tabulated per trace for small fields.
//!
//! Subgroup classification follows Dickson's list: a pair is decided from the
//! trace triple `(tr x, tr y, tr xy)` of its lifts plus a bounded closure for
//! the three small exceptional groups.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, prime_divisors};
use crate::field::{Field, FieldElement};
use crate::group::{closure, Group, GroupError, GroupKind};

const ORDER_TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Psl2Error {
    #[error("PSL(2,{q}) has no element of order {k}: orders are 1, p = {p}, and divisors of {split} or {nonsplit}")]
    UnrealizableOrder { k: u64, q: u64, p: u64, split: u64, nonsplit: u64 },
    #[error("no SL(2,q) solution found for trace triple ({0}); this contradicts Macbeath's existence theorem")]
    MacbeathExhausted(String),
}

/// A matrix of SL(2,q): `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat2 {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl Mat2 {
    fn entries(&self) -> [FieldElement; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// An element of PSL(2,q), held as its canonical lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjElement(Mat2);

impl ProjElement {
    pub fn lift(&self) -> Mat2 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceTriple {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub gamma: FieldElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitType {
    Identity,
    Split,
    NonSplit,
    Unipotent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubfieldKind {
    Psl,
    Pgl,
}

/// The Dickson class of the subgroup generated by a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupClass {
    /// Inside a Borel subgroup, or cyclic.
    Structural,
    Dihedral,
    A4,
    S4,
    A5,
    /// PSL(2, p^degree) or PGL(2, p^degree) for a proper subfield.
    Subfield { degree: u32, kind: SubfieldKind },
    Full,
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupClass::Structural => write!(f, "structural (Borel or cyclic)"),
            SubgroupClass::Dihedral => write!(f, "dihedral"),
            SubgroupClass::A4 => write!(f, "A4"),
            SubgroupClass::S4 => write!(f, "S4"),
            SubgroupClass::A5 => write!(f, "A5"),
            SubgroupClass::Subfield { degree, kind: SubfieldKind::Psl } => write!(f, "subfield PSL(2,p^{degree})"),
            SubgroupClass::Subfield { degree, kind: SubfieldKind::Pgl } => write!(f, "subfield PGL(2,p^{degree})"),
            SubgroupClass::Full => write!(f, "whole group"),
        }
    }
}

/// Conjugacy class label in PSL(2,q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Psl2Class {
    Identity,
    /// Trace-2 lift `I + N`; the flag is whether the Jordan parameter is a square.
    Unipotent { square: bool },
    /// Non-unipotent, non-identity; `trace` is the smaller of `{t, -t}`.
    Semisimple { trace: FieldElement },
}

#[derive(Clone, Debug)]
pub struct Psl2Group {
    field: Field,
    /// gcd(2, q - 1)
    d: u64,
    order: u128,
    order_by_trace: Option<Vec<u32>>,
    primes_q_minus_1: Vec<u64>,
    primes_q_plus_1: Vec<u64>,
    two: FieldElement,
    minus_two: FieldElement,
    non_square: Option<FieldElement>,
}

impl Psl2Group {
    pub fn new(p: u64, e: u32) -> Result<Self, GroupError> {
        let field = Field::new(p, e)?;
        let q = field.q();
        if q < 4 {
            return Err(GroupError::InvalidParameters(format!("psl2 requires q >= 4, got {q}")));
        }
        if q > 1 << 21 {
            return Err(GroupError::InvalidParameters(format!("psl2:{q} exceeds the supported field size 2^21")));
        }
        let d = if p == 2 { 1 } else { 2 };
        let order = q as u128 * (q as u128 * q as u128 - 1) / d as u128;
        let non_square = if p == 2 { None } else { field.elements().find(|&a| !field.is_square(a)) };
        let mut g = Psl2Group {
            non_square,
            two: field.from_int(2),
            minus_two: field.from_int(-2),
            field,
            d,
            order,
            order_by_trace: None,
            primes_q_minus_1: prime_divisors(q - 1),
            primes_q_plus_1: prime_divisors(q + 1),
        };
        if q <= ORDER_TABLE_LIMIT {
            let table = g.field.elements().map(|t| g.order_of_trace_uncached(t) as u32).collect();
            g.order_by_trace = Some(table);
        }
        Ok(g)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.field.q()
    }
    pub fn p(&self) -> u64 {
        self.field.p()
    }
    /// gcd(2, q - 1)
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn split_order(&self) -> u64 {
        (self.q() - 1) / self.d
    }
    pub fn nonsplit_order(&self) -> u64 {
        (self.q() + 1) / self.d
    }

    // ---- SL(2,q) matrix arithmetic ----

    pub fn mat(&self, a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn mat_identity(&self) -> Mat2 {
        let (o, z) = (self.field.one(), self.field.zero());
        Mat2 { a: o, b: z, c: z, d: o }
    }

    #[inline]
    pub fn mat_mul(&self, x: &Mat2, y: &Mat2) -> Mat2 {
        let f = &self.field;
        Mat2 {
            a: f.add(f.mul(x.a, y.a), f.mul(x.b, y.c)),
            b: f.add(f.mul(x.a, y.b), f.mul(x.b, y.d)),
            c: f.add(f.mul(x.c, y.a), f.mul(x.d, y.c)),
            d: f.add(f.mul(x.c, y.b), f.mul(x.d, y.d)),
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn mat_inv(&self, x: &Mat2) -> Mat2 {
        let f = &self.field;
        Mat2 { a: x.d, b: f.neg(x.b), c: f.neg(x.c), d: x.a }
    }

    pub fn mat_neg(&self, x: &Mat2) -> Mat2 {
        let f = &self.field;
        Mat2 { a: f.neg(x.a), b: f.neg(x.b), c: f.neg(x.c), d: f.neg(x.d) }
    }

    pub fn mat_pow(&self, x: &Mat2, mut k: u64) -> Mat2 {
        let mut acc = self.mat_identity();
        let mut base = *x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            base = self.mat_mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn det(&self, x: &Mat2) -> FieldElement {
        let f = &self.field;
        f.sub(f.mul(x.a, x.d), f.mul(x.b, x.c))
    }

    pub fn trace(&self, x: &Mat2) -> FieldElement {
        self.field.add(x.a, x.d)
    }

    fn is_scalar_pm_one(&self, x: &Mat2) -> bool {
        let f = &self.field;
        x.b == f.zero() && x.c == f.zero() && x.a == x.d && (x.a == f.one() || x.a == f.neg(f.one()))
    }

    /// Companion matrix `[[0,-1],[1,t]]`, of trace `t` and determinant 1.
    pub fn companion(&self, t: FieldElement) -> Mat2 {
        let f = &self.field;
        Mat2 { a: f.zero(), b: f.neg(f.one()), c: f.one(), d: t }
    }

    pub fn project(&self, x: &Mat2) -> ProjElement {
        let f = &self.field;
        if f.p() == 2 {
            return ProjElement(*x);
        }
        let lead = x.entries().into_iter().find(|v| v.index() != 0).expect("invertible matrix");
        if f.neg(lead) < lead {
            ProjElement(self.mat_neg(x))
        } else {
            ProjElement(*x)
        }
    }

    /// Projective image of a matrix with nonzero square determinant, rescaled
    /// into SL(2,q). `None` if the determinant is zero or a non-square.
    pub fn from_gl(&self, x: &Mat2) -> Option<ProjElement> {
        let f = &self.field;
        let det = self.det(x);
        if det == f.zero() {
            return None;
        }
        let s = f.inv(f.sqrt(det)?).ok()?;
        Some(self.project(&Mat2 { a: f.mul(s, x.a), b: f.mul(s, x.b), c: f.mul(s, x.c), d: f.mul(s, x.d) }))
    }

    // ---- orders and element types ----

    /// True when `t = +-2`, i.e. the element is the identity or unipotent.
    pub fn is_parabolic_trace(&self, t: FieldElement) -> bool {
        t == self.two || t == self.minus_two
    }

    /// Whether `x^2 - t x + 1` splits over GF(q) (t != +-2).
    fn trace_is_split(&self, t: FieldElement) -> bool {
        let f = &self.field;
        !f.solve_quadratic(f.one(), f.neg(t), f.one()).expect("monic").is_empty()
    }

    fn order_of_trace_uncached(&self, t: FieldElement) -> u64 {
        if self.is_parabolic_trace(t) {
            return 0;
        }
        let m = self.companion(t);
        let (n, primes) = if self.trace_is_split(t) {
            (self.q() - 1, &self.primes_q_minus_1)
        } else {
            (self.q() + 1, &self.primes_q_plus_1)
        };
        let mut k = n;
        for &r in primes {
            while k % r == 0 && self.is_scalar_pm_one(&self.mat_pow(&m, k / r)) {
                k /= r;
            }
        }
        k
    }

    /// Order in PSL(2,q) of any lift with trace `t`, for `t != +-2`.
    pub fn order_of_trace(&self, t: FieldElement) -> u64 {
        match &self.order_by_trace {
            Some(table) => table[t.index() as usize] as u64,
            None => self.order_of_trace_uncached(t),
        }
    }

    /// All element orders of PSL(2,q) images of SL(2,q) matrices of trace `t`.
    pub fn order_from_trace(&self, t: FieldElement) -> BTreeSet<u64> {
        if self.is_parabolic_trace(t) {
            BTreeSet::from([1, self.p()])
        } else {
            BTreeSet::from([self.order_of_trace(t)])
        }
    }

    /// Every trace whose elements have order exactly `k`, ascending.
    pub fn traces_of_order(&self, k: u64) -> Vec<FieldElement> {
        let f = &self.field;
        if k == self.p() {
            let mut v = vec![self.two, self.minus_two];
            v.sort();
            v.dedup();
            return v;
        }
        if k == 1 {
            return Vec::new();
        }
        if !self.split_order().is_multiple_of(k) && !self.nonsplit_order().is_multiple_of(k) {
            return Vec::new();
        }
        f.elements().filter(|&t| !self.is_parabolic_trace(t) && self.order_of_trace(t) == k).collect()
    }

    /// The set of element orders occurring in the group.
    pub fn element_orders(&self) -> BTreeSet<u64> {
        let mut s: BTreeSet<u64> = divisors(self.split_order()).into_iter().collect();
        s.extend(divisors(self.nonsplit_order()));
        s.insert(self.p());
        s
    }

    pub fn find_element_of_order(&self, k: u64) -> Result<ProjElement, Psl2Error> {
        let f = &self.field;
        if k == 1 {
            return Ok(self.identity());
        }
        if k == self.p() {
            return Ok(self.project(&self.mat(f.one(), f.one(), f.zero(), f.one())));
        }
        match self.traces_of_order(k).first() {
            Some(&t) => Ok(self.project(&self.companion(t))),
            None => Err(Psl2Error::UnrealizableOrder {
                k,
                q: self.q(),
                p: self.p(),
                split: self.split_order(),
                nonsplit: self.nonsplit_order(),
            }),
        }
    }

    /// Image of `x` under conjugation by `diag(nu, 1)` with `nu` a non-square:
    /// the outer automorphism from PGL(2,q). It preserves traces and swaps
    /// the two unipotent classes. `None` in characteristic 2, where PGL = PSL.
    pub fn diagonal_outer(&self, x: &ProjElement) -> Option<ProjElement> {
        let f = &self.field;
        let nu = self.non_square?;
        let m = x.lift();
        let b = f.div(m.b, nu).expect("nu is nonzero");
        Some(self.project(&self.mat(m.a, b, f.mul(m.c, nu), m.d)))
    }

    pub fn split_type(&self, x: &ProjElement) -> SplitType {
        let t = self.trace(&x.0);
        if self.is_parabolic_trace(t) {
            return if self.is_identity(x) { SplitType::Identity } else { SplitType::Unipotent };
        }
        let k = self.order_of_trace(t);
        if self.split_order().is_multiple_of(k) {
            SplitType::Split
        } else {
            SplitType::NonSplit
        }
    }

    // ---- trace triples ----

    pub fn trace_triple(&self, x: &ProjElement, y: &ProjElement) -> TraceTriple {
        let xy = self.mat_mul(&x.0, &y.0);
        TraceTriple { alpha: self.trace(&x.0), beta: self.trace(&y.0), gamma: self.trace(&xy) }
    }

    /// `a^2 + b^2 + c^2 - abc - 4 = 0`.
    pub fn is_singular_triple(&self, t: &TraceTriple) -> bool {
        let f = &self.field;
        let sq = |v| f.mul(v, v);
        let s = f.add(f.add(sq(t.alpha), sq(t.beta)), sq(t.gamma));
        let s = f.sub(s, f.mul(f.mul(t.alpha, t.beta), t.gamma));
        f.sub(s, f.from_int(4)) == f.zero()
    }

    /// Matrices `A, B, C` in SL(2,q) with traces `alpha, beta, gamma` and `ABC = I`.
    ///
    /// `A` is fixed in companion form; `tr B = beta` and `tr AB = gamma` are
    /// linear in the entries of `B`, leaving one free parameter `b1` and a
    /// quadratic determinant condition for `b3`, swept over `b1` until it has
    /// a root. Rotations of the triple cover the case where every solution
    /// has a scalar first matrix.
    pub fn macbeath_solve(&self, t: &TraceTriple) -> Result<(Mat2, Mat2, Mat2), Psl2Error> {
        let rotations = [
            (t.alpha, t.beta, t.gamma, 0usize),
            (t.beta, t.gamma, t.alpha, 1),
            (t.gamma, t.alpha, t.beta, 2),
        ];
        for (a, b, c, shift) in rotations {
            if let Some((m1, m2, m3)) = self.macbeath_companion(a, b, c) {
                // (m1, m2, m3) solves the rotated triple; rotate back
                return Ok(match shift {
                    0 => (m1, m2, m3),
                    1 => (m3, m1, m2),
                    _ => (m2, m3, m1),
                });
            }
        }
        // every solution has scalar first matrix: A = (alpha/2) I
        let f = &self.field;
        if self.is_parabolic_trace(t.alpha) && f.p() != 2 {
            let s = f.div(t.alpha, self.two).unwrap();
            let a = self.mat(s, f.zero(), f.zero(), s);
            let b = self.companion(t.beta);
            let c = self.mat_inv(&self.mat_mul(&a, &b));
            if self.trace(&c) == t.gamma {
                return Ok((a, b, c));
            }
        }
        Err(Psl2Error::MacbeathExhausted(format!(
            "{},{},{}",
            f.format_element(t.alpha),
            f.format_element(t.beta),
            f.format_element(t.gamma)
        )))
    }

    fn macbeath_companion(&self, alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> Option<(Mat2, Mat2, Mat2)> {
        let f = &self.field;
        let a = self.companion(alpha);
        // AB = [[-b3, -b4], [b1 + alpha b3, b2 + alpha b4]], so
        // b4 = beta - b1, b2 = gamma + b3 - alpha b4 and det B = 1 becomes
        // b3^2 + (gamma - alpha beta + alpha b1) b3 + (1 - beta b1 + b1^2) = 0.
        for b1 in f.elements() {
            let lin = f.add(f.sub(gamma, f.mul(alpha, beta)), f.mul(alpha, b1));
            let cst = f.add(f.sub(f.one(), f.mul(beta, b1)), f.mul(b1, b1));
            let roots = f.solve_quadratic(f.one(), lin, cst).expect("monic");
            if let Some(&b3) = roots.first() {
                let b4 = f.sub(beta, b1);
                let b2 = f.sub(f.add(gamma, b3), f.mul(alpha, b4));
                let b = self.mat(b1, b2, b3, b4);
                let c = self.mat_inv(&self.mat_mul(&a, &b));
                return Some((a, b, c));
            }
        }
        None
    }

    // ---- subgroup classification ----

    /// The Dickson class of `<x, y>`.
    pub fn classify_subgroup(&self, x: &ProjElement, y: &ProjElement) -> SubgroupClass {
        let f = &self.field;
        let t = self.trace_triple(x, y);
        if self.is_singular_triple(&t) {
            return SubgroupClass::Structural;
        }
        let zeros = [t.alpha, t.beta, t.gamma].iter().filter(|v| v.index() == 0).count();
        if zeros >= 2 {
            return SubgroupClass::Dihedral;
        }
        let xy = self.multiply(x, y);
        if [x, y, &xy].iter().all(|g| self.element_order(g) <= 5) {
            if let Some(h) = closure(self, &[*x, *y], 60) {
                match h.len() as u128 {
                    n if n == self.order => return SubgroupClass::Full,
                    12 => return SubgroupClass::A4,
                    24 => return SubgroupClass::S4,
                    60 => return SubgroupClass::A5,
                    // non-singular pairs with two non-involutions span no other small group
                    n => unreachable!("non-singular pair generating a group of order {n}"),
                }
            }
        }
        let sq = |v| f.mul(v, v);
        let lcm = |vals: &[FieldElement]| vals.iter().fold(1u32, |acc, &v| acc.lcm(&f.subfield_degree(v)));
        let projective_degree = lcm(&[sq(t.alpha), sq(t.beta), sq(t.gamma), f.mul(f.mul(t.alpha, t.beta), t.gamma)]);
        if projective_degree < f.e() {
            let kind = if lcm(&[t.alpha, t.beta, t.gamma]) == projective_degree { SubfieldKind::Psl } else { SubfieldKind::Pgl };
            return SubgroupClass::Subfield { degree: projective_degree, kind };
        }
        SubgroupClass::Full
    }

    fn fixes_projective_point(&self, m: &Mat2, u: FieldElement, v: FieldElement) -> bool {
        let f = &self.field;
        let mu = f.add(f.mul(m.a, u), f.mul(m.b, v));
        let mv = f.add(f.mul(m.c, u), f.mul(m.d, v));
        f.sub(f.mul(mu, v), f.mul(mv, u)) == f.zero()
    }

    /// Order of PSL(2, p^k) and PGL(2, p^k).
    fn subfield_orders(&self, k: u32) -> (u128, u128) {
        let q1 = (self.p() as u128).pow(k);
        let pgl = q1 * (q1 * q1 - 1);
        let psl = if self.p() == 2 { pgl } else { pgl / 2 };
        (psl, pgl)
    }

    /// Independent classification from the explicit closure `<x, y>`
    /// (at most `cap` elements); `None` above the cap.
    pub fn classify_by_closure(&self, x: &ProjElement, y: &ProjElement, cap: usize) -> Option<SubgroupClass> {
        let f = &self.field;
        let h = closure(self, &[*x, *y], cap)?;
        let n = h.len() as u128;
        if n == self.order {
            return Some(SubgroupClass::Full);
        }
        let mut points = vec![(f.one(), f.zero())];
        points.extend(f.elements().map(|t| (t, f.one())));
        let borel = points.iter().any(|&(u, v)| self.fixes_projective_point(&x.0, u, v) && self.fixes_projective_point(&y.0, u, v));
        let orders: Vec<(ProjElement, u64)> = h.iter().map(|g| (*g, self.element_order(g))).collect();
        if borel || orders.iter().any(|&(_, k)| k as u128 == n) {
            return Some(SubgroupClass::Structural);
        }
        if n.is_multiple_of(2) {
            for &(c, k) in &orders {
                if k as u128 == n / 2 {
                    let rot = closure(self, &[c], cap)?;
                    if orders.iter().all(|(g, o)| rot.contains(g) || *o == 2) {
                        return Some(SubgroupClass::Dihedral);
                    }
                }
            }
        }
        match n {
            12 => return Some(SubgroupClass::A4),
            24 => return Some(SubgroupClass::S4),
            60 => return Some(SubgroupClass::A5),
            _ => {}
        }
        for k in divisors(f.e() as u64) {
            let k = k as u32;
            if k == f.e() {
                break;
            }
            let (psl, pgl) = self.subfield_orders(k);
            if n == psl {
                return Some(SubgroupClass::Subfield { degree: k, kind: SubfieldKind::Psl });
            }
            if n == pgl {
                return Some(SubgroupClass::Subfield { degree: k, kind: SubfieldKind::Pgl });
            }
        }
        None
    }
}

impl Group for Psl2Group {
    type Elem = ProjElement;
    type Class = Psl2Class;

    fn kind(&self) -> GroupKind {
        GroupKind::Psl2 { p: self.p(), e: self.field.e() }
    }
    fn order(&self) -> u128 {
        self.order
    }
    fn identity(&self) -> ProjElement {
        ProjElement(self.mat_identity())
    }
    #[inline]
    fn multiply(&self, a: &ProjElement, b: &ProjElement) -> ProjElement {
        self.project(&self.mat_mul(&a.0, &b.0))
    }
    fn inverse(&self, a: &ProjElement) -> ProjElement {
        self.project(&self.mat_inv(&a.0))
    }
    fn power(&self, a: &ProjElement, k: u64) -> ProjElement {
        self.project(&self.mat_pow(&a.0, k))
    }
    fn element_order(&self, a: &ProjElement) -> u64 {
        let t = self.trace(&a.0);
        if self.is_parabolic_trace(t) {
            if self.is_identity(a) {
                1
            } else {
                self.p()
            }
        } else {
            self.order_of_trace(t)
        }
    }
    fn generates(&self, x: &ProjElement, y: &ProjElement) -> bool {
        self.classify_subgroup(x, y) == SubgroupClass::Full
    }
    fn subgroup_label(&self, x: &ProjElement, y: &ProjElement) -> String {
        self.classify_subgroup(x, y).to_string()
    }

    fn fingerprint(&self, a: &ProjElement) -> Psl2Class {
        let f = &self.field;
        let t = self.trace(&a.0);
        if !self.is_parabolic_trace(t) {
            return Psl2Class::Semisimple { trace: t.min(f.neg(t)) };
        }
        if self.is_identity(a) {
            return Psl2Class::Identity;
        }
        if f.p() == 2 {
            return Psl2Class::Unipotent { square: true };
        }
        let u = if t == self.two { a.0 } else { self.mat_neg(&a.0) };
        // N = U - I; its nonzero off-diagonal entry carries the square class
        let param = if u.b != f.zero() { u.b } else { f.neg(u.c) };
        Psl2Class::Unipotent { square: f.is_square(param) }
    }

    fn class_label(&self, c: &Psl2Class) -> String {
        match c {
            Psl2Class::Identity => "1".into(),
            Psl2Class::Unipotent { square: true } => format!("{}a", self.p()),
            Psl2Class::Unipotent { square: false } => format!("{}b", self.p()),
            Psl2Class::Semisimple { trace } => {
                format!("{}[tr={}]", self.order_of_trace(*trace), self.field.format_element(*trace))
            }
        }
    }

    /// Uniform on SL(2,q): a uniform nonzero first row, then one of the `q`
    /// completions to determinant one. Each PSL fibre has the same size, so
    /// the projection is uniform too.
    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ProjElement {
        let f = &self.field;
        let q = self.q();
        let (a, b) = loop {
            let a = rng.gen_range(0..q);
            let b = rng.gen_range(0..q);
            if a != 0 || b != 0 {
                break (FieldElement(a), FieldElement(b));
            }
        };
        let s = FieldElement(rng.gen_range(0..q));
        let m = if a != f.zero() {
            // c free, d = (1 + b c) / a
            let d = f.div(f.add(f.one(), f.mul(b, s)), a).unwrap();
            self.mat(a, b, s, d)
        } else {
            // d free, c = -1 / b
            let c = f.neg(f.inv(b).unwrap());
            self.mat(a, b, c, s)
        };
        self.project(&m)
    }

    fn enumerate(&self, limit: u128) -> Result<Vec<ProjElement>, GroupError> {
        if self.order > limit {
            return Err(GroupError::TooLarge { order: self.order, limit });
        }
        let f = &self.field;
        let mut out = Vec::with_capacity(self.order as usize);
        for a in f.elements() {
            for b in f.elements() {
                if a == f.zero() && b == f.zero() {
                    continue;
                }
                for s in f.elements() {
                    let m = if a != f.zero() {
                        self.mat(a, b, s, f.div(f.add(f.one(), f.mul(b, s)), a).unwrap())
                    } else {
                        self.mat(a, b, f.neg(f.inv(b).unwrap()), s)
                    };
                    let pm = self.project(&m);
                    if pm.0 == m {
                        out.push(pm);
                    }
                }
            }
        }
        Ok(out)
    }

    fn contains(&self, a: &ProjElement) -> bool {
        let q = self.q();
        a.0.entries().iter().all(|v| v.index() < q) && self.det(&a.0) == self.field.one() && self.project(&a.0) == *a
    }

    /// `[[a,b],[c,d]]`; either lift is accepted, as is any matrix whose
    /// determinant is a nonzero square.
    fn parse_element(&self, s: &str) -> Result<ProjElement, GroupError> {
        let bad = |reason: &str| GroupError::BadElement { input: s.to_string(), reason: reason.to_string() };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|t| t.strip_suffix("]]"))
            .ok_or_else(|| bad("expected [[a,b],[c,d]]"))?;
        let (r1, r2) = inner.split_once("],[").ok_or_else(|| bad("expected two rows"))?;
        let entry = |t: &str| self.field.parse_element(t).map_err(|e| bad(&e.to_string()));
        let row = |r: &str| -> Result<(FieldElement, FieldElement), GroupError> {
            let (x, y) = r.split_once(',').ok_or_else(|| bad("expected two entries per row"))?;
            Ok((entry(x)?, entry(y)?))
        };
        let (a, b) = row(r1)?;
        let (c, d) = row(r2)?;
        self.from_gl(&self.mat(a, b, c, d))
            .ok_or_else(|| bad("determinant must be a nonzero square"))
    }

    fn format_element(&self, a: &ProjElement) -> String {
        let f = &self.field;
        let m = a.0;
        format!(
            "[[{},{}],[{},{}]]",
            f.format_element(m.a),
            f.format_element(m.b),
            f.format_element(m.c),
            f.format_element(m.d)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::closure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn g(p: u64, e: u32) -> Psl2Group {
        Psl2Group::new(p, e).unwrap()
    }

    fn brute_order(grp: &Psl2Group, x: &ProjElement) -> u64 {
        let mut k = 1;
        let mut cur = *x;
        while !grp.is_identity(&cur) {
            cur = grp.multiply(&cur, x);
            k += 1;
        }
        k
    }

    #[test]
    fn orders_and_enumeration() {
        let grp = g(7, 1);
        let all = grp.enumerate(1 << 20).unwrap();
        assert_eq!(all.len(), 168);
        let f = grp.field();
        let u = grp.project(&grp.mat(f.one(), f.one(), f.zero(), f.one()));
        assert_eq!(grp.element_order(&u), 7);
        assert_eq!(grp.split_type(&u), SplitType::Unipotent);
        assert!(grp.order_from_trace(grp.trace(&u.lift())).contains(&7));
        let mut census: HashMap<u64, usize> = HashMap::new();
        for x in &all {
            assert_eq!(grp.element_order(x), brute_order(&grp, x));
            *census.entry(grp.element_order(x)).or_default() += 1;
        }
        // 1 + 21 + 56 + 42 + 48
        assert_eq!(census[&1], 1);
        assert_eq!(census[&2], 21);
        assert_eq!(census[&3], 56);
        assert_eq!(census[&4], 42);
        assert_eq!(census[&7], 48);
        let x3 = grp.find_element_of_order(3).unwrap();
        assert_eq!(grp.element_order(&x3), 3);
        assert_eq!(grp.split_type(&x3), SplitType::Split);
        let x4 = grp.find_element_of_order(4).unwrap();
        assert_eq!(grp.element_order(&x4), 4);
        assert_eq!(grp.split_type(&x4), SplitType::NonSplit);
        assert!(grp.find_element_of_order(5).is_err());
        let u11 = g(11, 1).find_element_of_order(11).unwrap();
        assert_eq!(g(11, 1).split_type(&u11), SplitType::Unipotent);
    }

    #[test]
    fn enumeration_counts_match_order_formula() {
        for (p, e) in [(2, 2), (5, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)] {
            let grp = g(p, e);
            let all = grp.enumerate(1 << 20).unwrap();
            assert_eq!(all.len() as u128, grp.order());
            let distinct: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            for x in all.iter().step_by(7) {
                assert!(grp.contains(x));
                assert_eq!(grp.element_order(x), brute_order(&grp, x), "psl2:{p}^{e}");
            }
        }
        assert!(matches!(g(13, 1).enumerate(100), Err(GroupError::TooLarge { .. })));
    }

    #[test]
    fn singular_triple_examples() {
        let grp = g(7, 1);
        let f = grp.field();
        let t = |a, b, c| TraceTriple { alpha: f.from_int(a), beta: f.from_int(b), gamma: f.from_int(c) };
        assert!(grp.is_singular_triple(&t(2, 2, 2)));
        assert!(!grp.is_singular_triple(&t(0, 0, 0)));
        assert!(!grp.is_singular_triple(&t(3, 3, 3)));
    }

    #[test]
    fn macbeath_examples() {
        for (p, e, trip) in [(7u64, 1u32, (2i64, 2i64, 2i64)), (5, 1, (0, 0, 0)), (7, 1, (2, 3, 3)), (7, 1, (-2, 3, -3))] {
            let grp = g(p, e);
            let f = grp.field();
            let t = TraceTriple { alpha: f.from_int(trip.0), beta: f.from_int(trip.1), gamma: f.from_int(trip.2) };
            let (a, b, c) = grp.macbeath_solve(&t).unwrap();
            assert_eq!(grp.mat_mul(&grp.mat_mul(&a, &b), &c), grp.mat_identity());
            assert_eq!((grp.trace(&a), grp.trace(&b), grp.trace(&c)), (t.alpha, t.beta, t.gamma));
            for m in [a, b, c] {
                assert_eq!(grp.det(&m), f.one());
            }
        }
    }

    #[test]
    fn macbeath_on_sl2_5_matches_brute_existence() {
        // brute force: every trace triple over GF(5) is realised in SL(2,5)
        let grp = g(5, 1);
        let f = grp.field();
        let sl2: Vec<Mat2> = grp.enumerate(1 << 20).unwrap().iter().flat_map(|x| [x.lift(), grp.mat_neg(&x.lift())]).collect();
        assert_eq!(sl2.len(), 120);
        for alpha in f.elements() {
            for beta in f.elements() {
                for gamma in f.elements() {
                    let t = TraceTriple { alpha, beta, gamma };
                    let brute = sl2.iter().filter(|a| grp.trace(a) == alpha).any(|a| {
                        sl2.iter().filter(|b| grp.trace(b) == beta).any(|b| grp.trace(&grp.mat_mul(a, b)) == gamma)
                    });
                    assert!(brute);
                    let (a, b, c) = grp.macbeath_solve(&t).unwrap();
                    assert_eq!(grp.mat_mul(&grp.mat_mul(&a, &b), &c), grp.mat_identity());
                    assert_eq!((grp.trace(&a), grp.trace(&b), grp.trace(&c)), (alpha, beta, gamma));
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let grp = g(7, 1);
        let x = grp.find_element_of_order(4).unwrap();
        assert_eq!(grp.classify_subgroup(&x, &x), SubgroupClass::Structural);

        let grp13 = g(13, 1);
        let traces = grp13.traces_of_order(6);
        let mut found = false;
        'outer: for &a in &traces {
            for &b in &traces {
                for &c in &traces {
                    let t = TraceTriple { alpha: a, beta: b, gamma: c };
                    if grp13.is_singular_triple(&t) {
                        continue;
                    }
                    let (ma, mb, _) = grp13.macbeath_solve(&t).unwrap();
                    let (x, y) = (grp13.project(&ma), grp13.project(&mb));
                    assert_eq!(grp13.classify_subgroup(&x, &y), SubgroupClass::Full);
                    found = true;
                    break 'outer;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn subfield_pair_in_psl2_49() {
        let grp = g(7, 2);
        let f = grp.field();
        // traces from GF(7), non-singular
        let t = TraceTriple { alpha: f.from_int(3), beta: f.from_int(3), gamma: f.from_int(3) };
        assert!(!grp.is_singular_triple(&t));
        let (a, b, _) = grp.macbeath_solve(&t).unwrap();
        let (x, y) = (grp.project(&a), grp.project(&b));
        let class = grp.classify_subgroup(&x, &y);
        assert!(matches!(class, SubgroupClass::Subfield { degree: 1, .. }));
        let size = closure(&grp, &[x, y], 1 << 20).unwrap().len();
        assert!(size == 168 || size == 336, "size {size}");
        assert_eq!(grp.classify_by_closure(&x, &y, 1 << 20), Some(class));
    }

    #[test]
    fn fingerprint_examples() {
        let grp = g(7, 1);
        let all = grp.enumerate(1000).unwrap();
        let classes: std::collections::BTreeSet<_> = all.iter().map(|x| grp.fingerprint(x)).collect();
        assert_eq!(classes.len(), 6);
        let order7: std::collections::BTreeSet<_> =
            all.iter().filter(|x| grp.element_order(x) == 7).map(|x| grp.fingerprint(x)).collect();
        assert_eq!(order7.len(), 2);
        assert_eq!(grp.fingerprint(&grp.identity()), Psl2Class::Identity);
    }

    #[test]
    fn split_fraction_near_half_at_101() {
        let grp = g(101, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut split = 0;
        let mut unip = 0;
        for _ in 0..n {
            match grp.split_type(&grp.random_element(&mut rng)) {
                SplitType::Split => split += 1,
                SplitType::Unipotent => unip += 1,
                _ => {}
            }
        }
        let frac = split as f64 / n as f64;
        assert!((0.45..=0.55).contains(&frac), "split fraction {frac}");
        assert!((unip as f64 / n as f64) <= 2.0 / 101.0 + 0.005);
    }

    #[test]
    fn parse_format_round_trip() {
        let grp = g(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = grp.random_element(&mut rng);
            assert_eq!(grp.parse_element(&grp.format_element(&x)).unwrap(), x);
            let neg = grp.mat_neg(&x.lift());
            let f = grp.field();
            let s = format!(
                "[[{},{}],[{},{}]]",
                f.format_element(neg.a),
                f.format_element(neg.b),
                f.format_element(neg.c),
                f.format_element(neg.d)
            );
            assert_eq!(grp.parse_element(&s).unwrap(), x);
        }
        let g7 = g(7, 1);
        assert!(g7.parse_element("[[1,0],[0,3]]").is_err());
        assert!(g7.parse_element("[[1,1],[0,1]").is_err());
        // det 2 = 3^2 mod 7: rescaled
        assert!(g7.parse_element("[[2,0],[0,1]]").is_ok());
    }
}
