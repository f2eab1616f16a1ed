//! The uniform group contract shared by every realization, and the abelian
//! realization Z/n x Z/n.

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{parse_prime_power, FieldError, Residue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unknown group descriptor {0:?} (expected psl2:p^e, alt:n, sym:n or ab:n)")]
    UnknownGroup(String),
    #[error("invalid group parameters: {0}")]
    InvalidParameters(String),
    #[error("cannot parse element {input:?}: {reason}")]
    BadElement { input: String, reason: String },
    #[error("element {0} does not belong to this group")]
    HandleMismatch(String),
    #[error("group has {order} elements, above the enumeration limit {limit}")]
    TooLarge { order: u128, limit: u128 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Which concrete group a handle stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupKind {
    Psl2 { p: u64, e: u32 },
    Alternating { n: usize },
    Symmetric { n: usize },
    Abelian { n: u64 },
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupKind::Psl2 { p, e: 1 } => write!(f, "psl2:{p}"),
            GroupKind::Psl2 { p, e } => write!(f, "psl2:{p}^{e}"),
            GroupKind::Alternating { n } => write!(f, "alt:{n}"),
            GroupKind::Symmetric { n } => write!(f, "sym:{n}"),
            GroupKind::Abelian { n } => write!(f, "ab:{n}"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || GroupError::UnknownGroup(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(unknown)?;
        let int = |a: &str| a.trim().parse::<u64>().map_err(|_| unknown());
        match kind.trim() {
            "psl2" => {
                let (p, e) = parse_prime_power(arg).map_err(|_| unknown())?;
                Ok(GroupKind::Psl2 { p, e })
            }
            "alt" => Ok(GroupKind::Alternating { n: int(arg)? as usize }),
            "sym" => Ok(GroupKind::Symmetric { n: int(arg)? as usize }),
            "ab" => Ok(GroupKind::Abelian { n: int(arg)? }),
            _ => Err(unknown()),
        }
    }
}

/// The operations every concrete finite group realization provides.
///
/// Multiplication is infallible: values of `Self::Elem` are only produced by
/// the group itself or by [`Group::parse_element`], which validates membership.
pub trait Group: Send + Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Send + Sync;
    /// Conjugacy class label: equal iff the elements are conjugate in the group.
    type Class: Clone + Eq + Ord + Hash + Debug + Send + Sync;

    fn kind(&self) -> GroupKind;
    fn order(&self) -> u128;

    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn element_order(&self, a: &Self::Elem) -> u64;

    fn power(&self, a: &Self::Elem, mut k: u64) -> Self::Elem {
        let mut acc = self.identity();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            k >>= 1;
        }
        acc
    }

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// `g^-1 a g`.
    fn conjugate(&self, a: &Self::Elem, g: &Self::Elem) -> Self::Elem {
        self.multiply(&self.multiply(&self.inverse(g), a), g)
    }

    /// Whether `x` and `y` generate the whole group.
    fn generates(&self, x: &Self::Elem, y: &Self::Elem) -> bool;

    /// Short description of the subgroup generated by `x` and `y`, used as the
    /// witness when generation fails.
    fn subgroup_label(&self, x: &Self::Elem, y: &Self::Elem) -> String {
        if self.generates(x, y) {
            "whole group".into()
        } else {
            "proper subgroup".into()
        }
    }

    fn fingerprint(&self, a: &Self::Elem) -> Self::Class;
    fn class_label(&self, c: &Self::Class) -> String;

    /// Exactly uniform sample.
    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// Every element exactly once; refused above `limit` elements.
    fn enumerate(&self, limit: u128) -> Result<Vec<Self::Elem>, GroupError>;

    fn contains(&self, a: &Self::Elem) -> bool;
    fn parse_element(&self, s: &str) -> Result<Self::Elem, GroupError>;
    fn format_element(&self, a: &Self::Elem) -> String;
}

/// Breadth-first closure of `gens` under right multiplication; `None` once the
/// closure would exceed `cap` elements.
pub fn closure<G: Group>(group: &G, gens: &[G::Elem], cap: usize) -> Option<HashSet<G::Elem>> {
    let mut seen = HashSet::new();
    let id = group.identity();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(a) = queue.pop_front() {
        for g in gens {
            let b = group.multiply(&a, g);
            if seen.insert(b.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(b);
            }
        }
    }
    Some(seen)
}

/// Z/n x Z/n.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    n: u64,
}

/// An element of Z/n x Z/n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbelianPair(pub u64, pub u64);

impl AbelianPair {
    pub fn residues(self, n: u64) -> (Residue, Residue) {
        (Residue { n, value: self.0 }, Residue { n, value: self.1 })
    }
}

impl AbelianGroup {
    pub fn new(n: u64) -> Result<Self, GroupError> {
        if n < 2 {
            return Err(GroupError::InvalidParameters(format!("ab:{n} requires n >= 2")));
        }
        if n > u32::MAX as u64 {
            return Err(GroupError::InvalidParameters(format!("ab:{n} is too large")));
        }
        Ok(AbelianGroup { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn elem(&self, a: i64, b: i64) -> AbelianPair {
        let n = self.n as i64;
        AbelianPair(a.rem_euclid(n) as u64, b.rem_euclid(n) as u64)
    }
}

impl Group for AbelianGroup {
    type Elem = AbelianPair;
    type Class = AbelianPair;

    fn kind(&self) -> GroupKind {
        GroupKind::Abelian { n: self.n }
    }
    fn order(&self) -> u128 {
        (self.n as u128).pow(2)
    }
    fn identity(&self) -> AbelianPair {
        AbelianPair(0, 0)
    }
    fn multiply(&self, a: &AbelianPair, b: &AbelianPair) -> AbelianPair {
        AbelianPair((a.0 + b.0) % self.n, (a.1 + b.1) % self.n)
    }
    fn inverse(&self, a: &AbelianPair) -> AbelianPair {
        AbelianPair((self.n - a.0) % self.n, (self.n - a.1) % self.n)
    }
    fn element_order(&self, a: &AbelianPair) -> u64 {
        let n = self.n;
        (n / a.0.gcd(&n)).lcm(&(n / a.1.gcd(&n)))
    }
    fn power(&self, a: &AbelianPair, k: u64) -> AbelianPair {
        let n = self.n as u128;
        let k = k as u128;
        AbelianPair((a.0 as u128 * k % n) as u64, (a.1 as u128 * k % n) as u64)
    }

    /// `(a, b)` and `(c, d)` generate iff `ad - bc` is a unit mod n.
    fn generates(&self, x: &AbelianPair, y: &AbelianPair) -> bool {
        let n = self.n as i128;
        let det = (x.0 as i128 * y.1 as i128 - x.1 as i128 * y.0 as i128).rem_euclid(n);
        (det as u64).gcd(&self.n) == 1
    }

    fn subgroup_label(&self, x: &AbelianPair, y: &AbelianPair) -> String {
        let n = self.n as i128;
        let det = (x.0 as i128 * y.1 as i128 - x.1 as i128 * y.0 as i128).rem_euclid(n) as u64;
        format!("determinant {det} shares factor {} with {}", det.gcd(&self.n), self.n)
    }

    fn fingerprint(&self, a: &AbelianPair) -> AbelianPair {
        *a
    }
    fn class_label(&self, c: &AbelianPair) -> String {
        self.format_element(c)
    }
    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AbelianPair {
        AbelianPair(rng.gen_range(0..self.n), rng.gen_range(0..self.n))
    }
    fn enumerate(&self, limit: u128) -> Result<Vec<AbelianPair>, GroupError> {
        if self.order() > limit {
            return Err(GroupError::TooLarge { order: self.order(), limit });
        }
        Ok((0..self.n).flat_map(|a| (0..self.n).map(move |b| AbelianPair(a, b))).collect())
    }
    fn contains(&self, a: &AbelianPair) -> bool {
        a.0 < self.n && a.1 < self.n
    }
    /// `(a,b)`, with integers reduced mod n.
    fn parse_element(&self, s: &str) -> Result<AbelianPair, GroupError> {
        let bad = |reason: &str| GroupError::BadElement { input: s.to_string(), reason: reason.to_string() };
        let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(|| bad("expected (a,b)"))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| bad("expected (a,b)"))?;
        let a = a.trim().parse::<i64>().map_err(|_| bad("non-integer entry"))?;
        let b = b.trim().parse::<i64>().map_err(|_| bad("non-integer entry"))?;
        Ok(self.elem(a, b))
    }
    fn format_element(&self, a: &AbelianPair) -> String {
        format!("({},{})", a.0, a.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn descriptor_round_trip() {
        for s in ["psl2:7", "psl2:2^3", "alt:5", "sym:6", "ab:5"] {
            assert_eq!(s.parse::<GroupKind>().unwrap().to_string(), s);
        }
        assert!("gl2:7".parse::<GroupKind>().is_err());
        assert!("alt:x".parse::<GroupKind>().is_err());
    }

    #[test]
    fn abelian_examples() {
        let g = AbelianGroup::new(5).unwrap();
        assert_eq!(g.element_order(&AbelianPair(1, 0)), 5);
        assert!(g.generates(&AbelianPair(1, 0), &AbelianPair(0, 1)));
        assert!(!g.generates(&AbelianPair(1, 0), &AbelianPair(2, 0)));
        assert_eq!(g.enumerate(1000).unwrap().len(), 25);
        assert!(matches!(g.enumerate(10), Err(GroupError::TooLarge { .. })));
        assert!(AbelianGroup::new(1).is_err());
        assert_eq!(g.parse_element("(7,-1)").unwrap(), AbelianPair(2, 4));
    }

    #[test]
    fn abelian_generation_matches_closure() {
        for n in 2..=10u64 {
            let g = AbelianGroup::new(n).unwrap();
            let all = g.enumerate(1000).unwrap();
            for x in &all {
                for y in &all {
                    let size = closure(&g, &[*x, *y], 1000).unwrap().len() as u128;
                    assert_eq!(g.generates(x, y), size == g.order(), "n={n} x={x:?} y={y:?}");
                }
            }
        }
    }

    #[test]
    fn abelian_orders_divide_group_order() {
        let g = AbelianGroup::new(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let a = g.random_element(&mut rng);
            let k = g.element_order(&a);
            assert_eq!(g.order() % k as u128, 0);
            assert!(g.is_identity(&g.power(&a, k)));
        }
    }
}
