//! Alternating and symmetric groups as permutation groups.
//!
//! Permutations act on the right: points are stored 0-based, printed 1-based,
//! and `a * b` means "apply `a`, then `b`".

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::factorial;
use crate::group::{Group, GroupError, GroupKind};

/// Largest degree whose factorial still fits the `u128` group order.
pub const MAX_DEGREE: usize = 34;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("infeasible shape: {0}")]
    Infeasible(String),
    #[error("no six distinct even almost homogeneous classes for n = {n}; smallest feasible degree is {smallest}")]
    SixClassesInfeasible { n: usize, smallest: usize },
    #[error("cannot parse cycle shape {0:?}")]
    BadShape(String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Permutation {
    img: Vec<u16>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { img: (0..n as u16).collect() }
    }

    /// From a 0-based image array; `None` unless it is a bijection of `0..n`.
    pub fn from_images(img: Vec<u16>) -> Option<Self> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &i in &img {
            if i as usize >= n || std::mem::replace(&mut seen[i as usize], true) {
                return None;
            }
        }
        Some(Permutation { img })
    }

    /// From 1-based disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Option<Self> {
        let mut img: Vec<u16> = (0..n as u16).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (i, &pt) in c.iter().enumerate() {
                if pt == 0 || pt > n || std::mem::replace(&mut used[pt - 1], true) {
                    return None;
                }
                img[pt - 1] = (c[(i + 1) % c.len()] - 1) as u16;
            }
        }
        Some(Permutation { img })
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, pt: usize) -> usize {
        self.img[pt] as usize
    }

    pub fn images(&self) -> &[u16] {
        &self.img
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { img: self.img.iter().map(|&i| other.img[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut img = vec![0u16; self.img.len()];
        for (i, &j) in self.img.iter().enumerate() {
            img[j as usize] = i as u16;
        }
        Permutation { img }
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    /// All cycles (fixed points included), each starting at its smallest
    /// point, ordered by that point. 0-based.
    pub fn all_cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    pub fn cycle_shape(&self) -> CycleShape {
        CycleShape::new(self.all_cycles().iter().map(Vec::len).collect())
    }

    pub fn is_even(&self) -> bool {
        self.all_cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> u64 {
        self.all_cycles().iter().fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    pub fn fixed_points(&self) -> usize {
        self.img.iter().enumerate().filter(|&(i, &j)| i == j as usize).count()
    }

    /// Parse 1-based cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
    pub fn parse(n: usize, s: &str) -> Result<Permutation, String> {
        let s = s.trim();
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or("expected '('")?;
            let end = body.find(')').ok_or("unclosed cycle")?;
            let pts = body[..end]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| format!("bad point {t:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            if !pts.is_empty() {
                cycles.push(pts);
            }
            rest = body[end + 1..].trim_start();
        }
        Permutation::from_cycles(n, &cycles).ok_or_else(|| format!("points must be distinct and within 1..{n}"))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.all_cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// Multiset of cycle lengths (fixed points included), sorted descending.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct CycleShape {
    pub lengths: Vec<usize>,
}

impl CycleShape {
    pub fn new(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleShape { lengths }
    }

    pub fn degree(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn fixed_points(&self) -> usize {
        self.lengths.iter().filter(|&&l| l == 1).count()
    }

    pub fn is_even(&self) -> bool {
        self.lengths.iter().map(|l| l - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> u64 {
        self.lengths.iter().fold(1u64, |acc, &l| acc.lcm(&(l as u64)))
    }

    /// `(m, k, f)` when the shape is `m^k, 1^f` with `m >= 2`, `k >= 1`.
    pub fn almost_homogeneous(&self) -> Option<(usize, usize, usize)> {
        let f = self.fixed_points();
        let moved: Vec<usize> = self.lengths.iter().copied().filter(|&l| l > 1).collect();
        let m = *moved.first()?;
        moved.iter().all(|&l| l == m).then_some((m, moved.len(), f))
    }

    /// Whether the S_n class of this shape splits into two A_n classes.
    pub fn splits_in_alternating(&self) -> bool {
        self.lengths.iter().all(|l| l % 2 == 1) && self.lengths.windows(2).all(|w| w[0] != w[1])
    }

    /// Number of permutations of this shape in S_n.
    pub fn class_size(&self) -> u128 {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for &l in &self.lengths {
            *counts.entry(l).or_default() += 1;
        }
        let centraliser: u128 = counts.iter().map(|(&l, &c)| (l as u128).pow(c as u32) * factorial(c)).product();
        factorial(self.degree() as u64) / centraliser
    }

    pub fn parse(s: &str) -> Result<CycleShape, PermError> {
        let bad = || PermError::BadShape(s.to_string());
        let mut lengths = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (l, k) = match part.split_once('^') {
                Some((l, k)) => (l.trim().parse::<usize>().map_err(|_| bad())?, k.trim().parse::<usize>().map_err(|_| bad())?),
                None => (part.parse::<usize>().map_err(|_| bad())?, 1),
            };
            if l == 0 {
                return Err(bad());
            }
            lengths.extend(std::iter::repeat_n(l, k));
        }
        if lengths.is_empty() {
            return Err(bad());
        }
        Ok(CycleShape::new(lengths))
    }
}

impl fmt::Display for CycleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.lengths.len() {
            let l = self.lengths[i];
            let k = self.lengths[i..].iter().take_while(|&&x| x == l).count();
            parts.push(format!("{l}^{k}"));
            i += k;
        }
        write!(f, "{}", parts.join(","))
    }
}

/// Conjugacy label in A_n or S_n: the cycle shape, plus for split A_n classes
/// the parity of the canonical conjugator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PermClass {
    pub shape: CycleShape,
    pub split: Option<bool>,
}

/// The canonical permutation of `shape`: cycles laid out left to right on
/// `1..n` in the shape's (descending) order.
pub fn shape_representative(shape: &CycleShape) -> Permutation {
    let mut cycles = Vec::new();
    let mut next = 1;
    for &l in &shape.lengths {
        cycles.push((next..next + l).collect::<Vec<_>>());
        next += l;
    }
    Permutation::from_cycles(shape.degree(), &cycles).expect("disjoint layout")
}

/// A_n class label of an even permutation.
pub fn alternating_class(x: &Permutation) -> PermClass {
    let shape = x.cycle_shape();
    if !shape.splits_in_alternating() {
        return PermClass { shape, split: None };
    }
    // distinct lengths: order the cycles by length, descending, and map them
    // onto the canonical layout; the parity of that relabelling is invariant
    // under A_n conjugation because the centraliser lies in A_n.
    let mut cycles = x.all_cycles();
    cycles.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let relabel: Vec<u16> = cycles.concat().into_iter().map(|p| p as u16).collect();
    let sigma = Permutation::from_images(relabel).expect("bijection");
    PermClass { shape, split: Some(sigma.is_even()) }
}

/// Base and strong generating set from deterministic Schreier-Sims.
#[derive(Clone, Debug)]
pub struct Bsgs {
    n: usize,
    base: Vec<usize>,
    /// `gens[i]` generates the stabiliser of `base[..i]`.
    gens: Vec<Vec<Permutation>>,
    /// `trans[i][pt]` maps `base[i]` to `pt`.
    trans: Vec<Vec<Option<Permutation>>>,
}

impl Bsgs {
    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.trans.iter().map(|t| t.iter().filter(|u| u.is_some()).count()).collect()
    }

    pub fn order(&self) -> u128 {
        self.orbit_lengths().iter().map(|&l| l as u128).product()
    }

    fn orbit_transversal(&self, level: usize) -> Vec<Option<Permutation>> {
        let mut t: Vec<Option<Permutation>> = vec![None; self.n];
        let b = self.base[level];
        t[b] = Some(Permutation::identity(self.n));
        let mut queue = vec![b];
        while let Some(pt) = queue.pop() {
            let u = t[pt].clone().unwrap();
            for s in &self.gens[level] {
                let img = s.apply(pt);
                if t[img].is_none() {
                    t[img] = Some(u.then(s));
                    queue.push(img);
                }
            }
        }
        t
    }

    /// Strip `g` through the chain from `level`; returns the residue and the
    /// level at which it dropped out (`base.len()` if it passed every level).
    fn sift(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for level in from..self.base.len() {
            let img = g.apply(self.base[level]);
            match &self.trans[level][img] {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, level),
            }
        }
        (g, self.base.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        let (r, level) = self.sift(g.clone(), 0);
        level == self.base.len() && r.is_identity()
    }

    pub fn schreier_sims(n: usize, generators: &[Permutation]) -> Bsgs {
        let gens: Vec<Permutation> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut bs = Bsgs { n, base: Vec::new(), gens: Vec::new(), trans: Vec::new() };
        if gens.is_empty() {
            return bs;
        }
        for g in &gens {
            if bs.base.iter().all(|&b| g.apply(b) == b) {
                let moved = (0..n).find(|&i| g.apply(i) != i).unwrap();
                bs.base.push(moved);
            }
        }
        for i in 0..bs.base.len() {
            let level: Vec<Permutation> = gens.iter().filter(|g| bs.base[..i].iter().all(|&b| g.apply(b) == b)).cloned().collect();
            bs.gens.push(level);
        }
        for i in 0..bs.base.len() {
            let t = bs.orbit_transversal(i);
            bs.trans.push(t);
        }
        let mut i = bs.base.len() as isize - 1;
        'levels: while i >= 0 {
            let lvl = i as usize;
            let orbit: Vec<usize> = (0..n).filter(|&p| bs.trans[lvl][p].is_some()).collect();
            let level_gens = bs.gens[lvl].clone();
            for &pt in &orbit {
                for s in &level_gens {
                    let u = bs.trans[lvl][pt].as_ref().unwrap();
                    let v = bs.trans[lvl][s.apply(pt)].as_ref().unwrap();
                    let schreier = u.then(s).then(&v.inverse());
                    let (h, j) = bs.sift(schreier, lvl + 1);
                    if j < bs.base.len() || !h.is_identity() {
                        if j == bs.base.len() {
                            let moved = (0..n).find(|&p| h.apply(p) != p).unwrap();
                            bs.base.push(moved);
                            bs.gens.push(Vec::new());
                            bs.trans.push(Vec::new());
                        }
                        for l in lvl + 1..=j {
                            bs.gens[l].push(h.clone());
                            bs.trans[l] = bs.orbit_transversal(l);
                        }
                        i = j as isize;
                        continue 'levels;
                    }
                }
            }
            i -= 1;
        }
        bs
    }
}

fn is_transitive(n: usize, gens: &[&Permutation]) -> bool {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = g.apply(p);
            if !seen[q] {
                seen[q] = true;
                count += 1;
                stack.push(q);
            }
        }
    }
    count == n
}

/// Permutation of shape `m^k, 1^f` on `n = mk + f` points, cycles laid out
/// left to right, required to be even.
pub fn construct_almost_homogeneous(n: usize, m: usize, f: usize) -> Result<Permutation, PermError> {
    if m < 2 {
        return Err(PermError::Infeasible(format!("cycle length {m} must be at least 2")));
    }
    if f >= n || !(n - f).is_multiple_of(m) {
        return Err(PermError::Infeasible(format!("{n} - {f} fixed points is not a positive multiple of {m}")));
    }
    let k = (n - f) / m;
    if (m - 1) * k % 2 == 1 {
        return Err(PermError::Infeasible(format!("shape {m}^{k},1^{f} is odd: (m-1)k = {} is odd", (m - 1) * k)));
    }
    let mut lengths = vec![m; k];
    lengths.extend(std::iter::repeat_n(1, f));
    Ok(shape_representative(&CycleShape::new(lengths)))
}

fn six_classes_at(n: usize, orders: &[usize; 6]) -> Option<[CycleShape; 6]> {
    let mut used: Vec<usize> = Vec::new();
    let mut shapes = Vec::new();
    for &o in orders {
        if o < 2 {
            return None;
        }
        let mut f = n % o;
        loop {
            if f >= n {
                return None;
            }
            let k = (n - f) / o;
            if ((o - 1) * k).is_multiple_of(2) && !used.contains(&f) {
                break;
            }
            f += o;
        }
        used.push(f);
        let mut lengths = vec![o; (n - f) / o];
        lengths.extend(std::iter::repeat_n(1, f));
        shapes.push(CycleShape::new(lengths));
    }
    shapes.try_into().ok()
}

/// Six even almost homogeneous shapes in A_n with the requested element
/// orders and pairwise distinct numbers of fixed points.
///
/// For each order `o` in turn the smallest `f >= 0` with `f = n (mod o)` is
/// taken and raised in steps of `o` until the shape is even and `f` differs
/// from every earlier choice.
pub fn select_six_classes(n: usize, orders: [usize; 6]) -> Result<[CycleShape; 6], PermError> {
    if let Some(s) = six_classes_at(n, &orders) {
        return Ok(s);
    }
    let bound = n + 2 * orders.iter().fold(1usize, |a, &o| a.lcm(&o.max(1))) + 64 * orders.iter().max().unwrap();
    let smallest = (n + 1..=bound)
        .find(|&m| six_classes_at(m, &orders).is_some())
        .ok_or_else(|| PermError::Infeasible(format!("orders {orders:?} admit no even almost homogeneous shapes")))?;
    Err(PermError::SixClassesInfeasible { n, smallest })
}

/// A_n or S_n.
#[derive(Clone, Debug)]
pub struct PermGroup {
    n: usize,
    alternating: bool,
    order: u128,
}

impl PermGroup {
    pub fn alternating(n: usize) -> Result<Self, GroupError> {
        Self::new(n, true)
    }

    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        Self::new(n, false)
    }

    fn new(n: usize, alternating: bool) -> Result<Self, GroupError> {
        if !(3..=MAX_DEGREE).contains(&n) {
            return Err(GroupError::InvalidParameters(format!("degree must lie in 3..={MAX_DEGREE}, got {n}")));
        }
        let order = if alternating { factorial(n as u64) / 2 } else { factorial(n as u64) };
        Ok(PermGroup { n, alternating, order })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn is_alternating(&self) -> bool {
        self.alternating
    }

    /// Order of the subgroup generated by `gens`.
    pub fn subgroup_order(&self, gens: &[Permutation]) -> u128 {
        Bsgs::schreier_sims(self.n, gens).order()
    }
}

impl Group for PermGroup {
    type Elem = Permutation;
    type Class = PermClass;

    fn kind(&self) -> GroupKind {
        if self.alternating {
            GroupKind::Alternating { n: self.n }
        } else {
            GroupKind::Symmetric { n: self.n }
        }
    }
    fn order(&self) -> u128 {
        self.order
    }
    fn identity(&self) -> Permutation {
        Permutation::identity(self.n)
    }
    fn multiply(&self, a: &Permutation, b: &Permutation) -> Permutation {
        a.then(b)
    }
    fn inverse(&self, a: &Permutation) -> Permutation {
        a.inverse()
    }
    fn element_order(&self, a: &Permutation) -> u64 {
        a.order()
    }
    fn is_identity(&self, a: &Permutation) -> bool {
        a.is_identity()
    }

    fn generates(&self, x: &Permutation, y: &Permutation) -> bool {
        if !is_transitive(self.n, &[x, y]) {
            return false;
        }
        if !self.alternating && x.is_even() && y.is_even() {
            return false;
        }
        self.subgroup_order(&[x.clone(), y.clone()]) == self.order
    }

    fn subgroup_label(&self, x: &Permutation, y: &Permutation) -> String {
        let order = self.subgroup_order(&[x.clone(), y.clone()]);
        if order == self.order {
            "whole group".into()
        } else if !is_transitive(self.n, &[x, y]) {
            format!("intransitive subgroup of order {order}")
        } else {
            format!("transitive subgroup of order {order}")
        }
    }

    fn fingerprint(&self, a: &Permutation) -> PermClass {
        if self.alternating {
            alternating_class(a)
        } else {
            PermClass { shape: a.cycle_shape(), split: None }
        }
    }

    fn class_label(&self, c: &PermClass) -> String {
        match c.split {
            None => c.shape.to_string(),
            Some(true) => format!("{}+", c.shape),
            Some(false) => format!("{}-", c.shape),
        }
    }

    /// Uniform on S_n by shuffling; for A_n odd draws are multiplied by the
    /// transposition (1 2), a bijection between the two cosets.
    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut img: Vec<u16> = (0..self.n as u16).collect();
        img.shuffle(rng);
        let mut p = Permutation { img };
        if self.alternating && !p.is_even() {
            p.img.swap(0, 1);
        }
        p
    }

    fn enumerate(&self, limit: u128) -> Result<Vec<Permutation>, GroupError> {
        if self.order > limit {
            return Err(GroupError::TooLarge { order: self.order, limit });
        }
        let mut out = Vec::with_capacity(self.order as usize);
        let mut img: Vec<u16> = (0..self.n as u16).collect();
        // lexicographic successor
        loop {
            let p = Permutation { img: img.clone() };
            if !self.alternating || p.is_even() {
                out.push(p);
            }
            let Some(i) = (0..self.n - 1).rev().find(|&i| img[i] < img[i + 1]) else { break };
            let j = (i + 1..self.n).rev().find(|&j| img[j] > img[i]).unwrap();
            img.swap(i, j);
            img[i + 1..].reverse();
        }
        Ok(out)
    }

    fn contains(&self, a: &Permutation) -> bool {
        a.degree() == self.n && (!self.alternating || a.is_even())
    }

    fn parse_element(&self, s: &str) -> Result<Permutation, GroupError> {
        let p = Permutation::parse(self.n, s).map_err(|reason| GroupError::BadElement { input: s.to_string(), reason })?;
        if self.alternating && !p.is_even() {
            return Err(GroupError::BadElement { input: s.to_string(), reason: format!("odd permutation is not in A{}", self.n) });
        }
        Ok(p)
    }

    fn format_element(&self, a: &Permutation) -> String {
        a.to_string()
    }
}
