//! Conjugacy classes, class multiplication coefficients, the Frobenius
//! counting formula and character tables (Dixon-Schneider over GF(P)).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, mul_mod, pow_mod, prime_divisors};
use crate::group::{Group, GroupError};
use crate::par;

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000;
pub const DEFAULT_TABLE_LIMIT: u128 = 10_000;
pub const MAX_TABLE_CLASSES: usize = 60;
pub const TABLE_TOLERANCE: f64 = 1e-8;
pub const INTEGER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CountingError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{classes} classes exceed the character table limit of {MAX_TABLE_CLASSES}")]
    TooManyClasses { classes: usize },
    #[error("class index {0} out of range")]
    BadClassIndex(usize),
    #[error("character sum {value} is not within {INTEGER_TOLERANCE} of a non-negative integer")]
    NonIntegral { value: String },
    #[error("character table computation failed: {0}")]
    Table(String),
    #[error("character table document: {0}")]
    Document(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct ClassData<G: Group> {
    pub fingerprint: G::Class,
    pub label: String,
    pub size: u128,
    pub representative: G::Elem,
    pub element_order: u64,
}

/// The partition of an enumerable group into conjugacy classes.
pub struct ClassPartition<G: Group> {
    pub classes: Vec<ClassData<G>>,
    pub members: Vec<Vec<G::Elem>>,
    index: HashMap<G::Class, usize>,
}

impl<G: Group> ClassPartition<G> {
    /// Classes ordered by element order, then size, then fingerprint.
    pub fn new(group: &G, limit: u128) -> Result<Self, GroupError> {
        let elems = group.enumerate(limit)?;
        let prints = par::map(&elems, |x| group.fingerprint(x));
        let mut buckets: HashMap<G::Class, Vec<G::Elem>> = HashMap::new();
        for (x, fp) in elems.into_iter().zip(prints) {
            buckets.entry(fp).or_default().push(x);
        }
        let mut entries: Vec<(u64, usize, G::Class, Vec<G::Elem>)> = buckets
            .into_iter()
            .map(|(fp, mut xs)| {
                xs.sort();
                (group.element_order(&xs[0]), xs.len(), fp, xs)
            })
            .collect();
        entries.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
        let mut classes = Vec::new();
        let mut members = Vec::new();
        let mut index = HashMap::new();
        for (i, (order, size, fp, xs)) in entries.into_iter().enumerate() {
            index.insert(fp.clone(), i);
            classes.push(ClassData {
                label: group.class_label(&fp),
                fingerprint: fp,
                size: size as u128,
                representative: xs[0].clone(),
                element_order: order,
            });
            members.push(xs);
        }
        Ok(ClassPartition { classes, members, index })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, group: &G, x: &G::Elem) -> usize {
        self.index[&group.fingerprint(x)]
    }

    pub fn index_of(&self, fp: &G::Class) -> Option<usize> {
        self.index.get(fp).copied()
    }

    /// `inverse[i]` is the class of the inverses of class `i`.
    pub fn inverse_classes(&self, group: &G) -> Vec<usize> {
        self.classes.iter().map(|c| self.class_of(group, &group.inverse(&c.representative))).collect()
    }

    /// `power_map[i][j]` is the class of `g_i^j` for `0 <= j < |g_i|`.
    pub fn power_maps(&self, group: &G) -> Vec<Vec<usize>> {
        self.classes
            .iter()
            .map(|c| {
                let mut out = Vec::with_capacity(c.element_order as usize);
                let mut cur = group.identity();
                for _ in 0..c.element_order {
                    out.push(self.class_of(group, &cur));
                    cur = group.multiply(&cur, &c.representative);
                }
                out
            })
            .collect()
    }

    /// Class multiplication coefficients: `a[i][j][k]` is the number of
    /// `(x, y)` in `C_i x C_j` with `xy = g_k` for the fixed representative `g_k`.
    pub fn class_coefficients(&self, group: &G) -> Vec<Vec<Vec<u64>>> {
        let r = self.len();
        let per_k: Vec<Vec<Vec<u64>>> = par::map(&self.classes, |ck| {
            let mut a = vec![vec![0u64; r]; r];
            for (i, xs) in self.members.iter().enumerate() {
                for x in xs {
                    let y = group.multiply(&group.inverse(x), &ck.representative);
                    a[i][self.class_of(group, &y)] += 1;
                }
            }
            a
        });
        let mut out = vec![vec![vec![0u64; r]; r]; r];
        for (k, a) in per_k.into_iter().enumerate() {
            for i in 0..r {
                for j in 0..r {
                    out[i][j][k] = a[i][j];
                }
            }
        }
        out
    }
}

pub fn conjugacy_classes<G: Group>(group: &G, limit: u128) -> Result<Vec<ClassData<G>>, GroupError> {
    Ok(ClassPartition::new(group, limit)?.classes)
}

/// `#{(x, y, z) in X x Y x Z : xyz = 1}` by fixing a representative of `X`,
/// running over `Y`, and scaling by `|X|`.
pub fn frobenius_count_brute<G: Group>(group: &G, part: &ClassPartition<G>, x: usize, y: usize, z: usize) -> Result<u128, CountingError> {
    for i in [x, y, z] {
        if i >= part.len() {
            return Err(CountingError::BadClassIndex(i));
        }
    }
    let rep = &part.classes[x].representative;
    let zfp = &part.classes[z].fingerprint;
    let hits = part.members[y]
        .iter()
        .filter(|b| group.fingerprint(&group.inverse(&group.multiply(rep, b))) == *zfp)
        .count() as u128;
    Ok(hits * part.classes[x].size)
}

/// Irreducible complex characters of a small group.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    pub group: String,
    pub class_labels: Vec<String>,
    pub class_sizes: Vec<u128>,
    pub class_orders: Vec<u64>,
    /// `values[chi][class]`; row 0 is the trivial character.
    pub values: Vec<Vec<Complex64>>,
    pub tolerance: f64,
}

impl CharacterTable {
    pub fn group_order(&self) -> u128 {
        self.class_sizes.iter().sum()
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.values.iter().map(|row| row[0].re.round() as u64).collect()
    }

    /// Largest deviation from row orthonormality `<chi_i, chi_j> = delta_ij`.
    pub fn row_orthogonality_error(&self) -> f64 {
        let n = self.group_order() as f64;
        let mut worst: f64 = 0.0;
        for (a, ra) in self.values.iter().enumerate() {
            for (b, rb) in self.values.iter().enumerate() {
                let s: Complex64 = ra.iter().zip(rb).zip(&self.class_sizes).map(|((u, v), &h)| u * v.conj() * h as f64).sum::<Complex64>() / n;
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Largest deviation from column orthogonality
    /// `sum_chi chi(g_i) conj(chi(g_j)) = delta_ij |G| / |C_i|`.
    pub fn column_orthogonality_error(&self) -> f64 {
        let n = self.group_order() as f64;
        let r = self.class_sizes.len();
        let mut worst: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                let s: Complex64 = self.values.iter().map(|row| row[i] * row[j].conj()).sum();
                let target = if i == j { n / self.class_sizes[i] as f64 } else { 0.0 };
                worst = worst.max((s - target).norm() / (n / self.class_sizes[i] as f64));
            }
        }
        worst
    }

    /// Eq. (1): `|X||Y||Z| / |G| * sum_chi chi(x) chi(y) chi(z) / chi(1)`,
    /// rounded to the nearest integer when within tolerance.
    pub fn frobenius_count(&self, x: usize, y: usize, z: usize) -> Result<u128, CountingError> {
        let r = self.class_sizes.len();
        for i in [x, y, z] {
            if i >= r {
                return Err(CountingError::BadClassIndex(i));
            }
        }
        let sum: Complex64 = self.values.iter().map(|row| row[x] * row[y] * row[z] / row[0].re).sum();
        let scale = self.class_sizes[x] as f64 * self.class_sizes[y] as f64 * self.class_sizes[z] as f64 / self.group_order() as f64;
        let value = sum * scale;
        let nearest = value.re.round();
        if (value - nearest).norm() > INTEGER_TOLERANCE || nearest < 0.0 {
            return Err(CountingError::NonIntegral { value: format!("{value}") });
        }
        Ok(nearest as u128)
    }

    pub fn to_json(&self) -> String {
        let doc = TableDocument {
            format: "beauville-character-table".into(),
            version: 1,
            group: self.group.clone(),
            tolerance: self.tolerance.to_string(),
            classes: self
                .class_labels
                .iter()
                .zip(&self.class_sizes)
                .zip(&self.class_orders)
                .map(|((label, &size), &order)| ClassEntry { fingerprint: label.clone(), size: size.to_string(), order })
                .collect(),
            values: self.values.iter().map(|row| row.iter().map(|c| [c.re.to_string(), c.im.to_string()]).collect()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self, CountingError> {
        let bad = |e: String| CountingError::Document(e);
        let doc: TableDocument = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        if doc.format != "beauville-character-table" {
            return Err(bad(format!("unexpected format {:?}", doc.format)));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(format!("bad number {t:?}")));
        let values = doc
            .values
            .iter()
            .map(|row| row.iter().map(|[re, im]| Ok(Complex64::new(num(re)?, num(im)?))).collect::<Result<Vec<_>, CountingError>>())
            .collect::<Result<Vec<_>, _>>()?;
        let r = doc.classes.len();
        if values.len() != r || values.iter().any(|row| row.len() != r) {
            return Err(bad("value matrix is not square over the class list".into()));
        }
        Ok(CharacterTable {
            group: doc.group,
            class_labels: doc.classes.iter().map(|c| c.fingerprint.clone()).collect(),
            class_sizes: doc.classes.iter().map(|c| c.size.parse::<u128>().map_err(|_| bad(format!("bad size {:?}", c.size)))).collect::<Result<_, _>>()?,
            class_orders: doc.classes.iter().map(|c| c.order).collect(),
            values,
            tolerance: num(&doc.tolerance)?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CountingError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CountingError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    fingerprint: String,
    size: String,
    order: u64,
}

#[derive(Serialize, Deserialize)]
struct TableDocument {
    format: String,
    version: u32,
    group: String,
    tolerance: String,
    classes: Vec<ClassEntry>,
    /// `[real, imaginary]` decimal strings, shortest round-trip form.
    values: Vec<Vec<[String; 2]>>,
}

/// `sum_chi chi(1)^(-s)`.
pub fn witten_zeta(degrees: &[u64], s: f64) -> f64 {
    degrees.iter().map(|&d| (d as f64).powf(-s)).sum()
}

// ---- modular linear algebra for Dixon-Schneider ----

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Reduced row echelon basis of the null space of `m` (rows x cols) mod `p`.
fn null_space(mut m: Vec<Vec<u64>>, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&r| m[r][col] != 0) else { continue };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col], p);
        for v in m[row].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        for r in 0..rows {
            if r != row && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..cols {
                    let sub = mul_mod(factor, m[row][c], p);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f]) % p;
            }
            v
        })
        .collect()
}

/// Bring a basis into reduced row echelon form; returns pivots.
fn echelon(mut basis: Vec<Vec<u64>>, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let cols = basis.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..basis.len()).find(|&r| basis[r][col] != 0) else { continue };
        basis.swap(row, pr);
        let inv = inv_mod(basis[row][col], p);
        for v in basis[row].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        for r in 0..basis.len() {
            if r != row && basis[r][col] != 0 {
                let factor = basis[r][col];
                for c in 0..cols {
                    let sub = mul_mod(factor, basis[row][c], p);
                    basis[r][c] = (basis[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    basis.truncate(row);
    (basis, pivots)
}

type Poly = Vec<u64>; // little-endian coefficients mod p

fn poly_trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(a: &Poly, m: &Poly, p: u64) -> Poly {
    poly_divmod(a, m, p).1
}

fn poly_mul_mod(a: &Poly, b: &Poly, m: &Poly, p: u64) -> Poly {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_pow_mod(base: &Poly, mut e: u64, m: &Poly, p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &b, m, p);
        }
        b = poly_mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let (mut a, mut b) = (poly_trim(a.clone()), poly_trim(b.clone()));
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    let inv = inv_mod(*a.last().unwrap(), p);
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

/// Distinct roots in GF(p) of `f` (p odd prime), ascending.
fn poly_roots(f: &Poly, p: u64) -> Vec<u64> {
    let f = poly_trim(f.clone());
    if f.len() <= 1 {
        return Vec::new();
    }
    // g = gcd(f, x^p - x) collects the distinct linear factors
    let xp = poly_pow_mod(&vec![0, 1], p, &f, p);
    let mut xp_minus_x = xp.clone();
    xp_minus_x.resize(xp_minus_x.len().max(2), 0);
    xp_minus_x[1] = (xp_minus_x[1] + p - 1) % p;
    let g = poly_gcd(&f, &poly_trim(xp_minus_x), p);
    let mut roots = Vec::new();
    let mut stack = vec![g];
    while let Some(h) = stack.pop() {
        match h.len() - 1 {
            0 => {}
            1 => roots.push((p - h[0]) % p),
            _ => {
                // split with gcd(h, (x + a)^((p-1)/2) - 1) for a = 0, 1, 2, ...
                for a in 0..p {
                    let mut s = poly_pow_mod(&vec![a, 1], (p - 1) / 2, &h, p);
                    s[0] = (s[0] + p - 1) % p;
                    let d = poly_gcd(&h, &poly_trim(s), p);
                    let deg = d.len() - 1;
                    if deg > 0 && deg < h.len() - 1 {
                        let (q, _) = poly_divmod(&h, &d, p);
                        stack.push(d);
                        stack.push(q);
                        break;
                    }
                }
            }
        }
    }
    roots.sort_unstable();
    roots
}

fn poly_divmod(a: &Poly, m: &Poly, p: u64) -> (Poly, Poly) {
    let m = poly_trim(m.clone());
    let mut r = poly_trim(a.clone());
    let dm = m.len() - 1;
    if r.len() <= dm {
        return (vec![0], r);
    }
    let lead_inv = inv_mod(m[dm], p);
    let mut q = vec![0u64; r.len() - dm];
    for shift in (0..q.len()).rev() {
        let coef = mul_mod(r[shift + dm], lead_inv, p);
        q[shift] = coef;
        for (i, &c) in m.iter().enumerate() {
            let sub = mul_mod(coef, c, p);
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
    }
    r.truncate(dm.max(1));
    (poly_trim(q), poly_trim(r))
}

/// Characteristic polynomial `det(xI - a)` via Hessenberg reduction.
fn charpoly(a: &[Vec<u64>], p: u64) -> Poly {
    let n = a.len();
    let mut h: Vec<Vec<u64>> = a.to_vec();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = inv_mod(h[j + 1][j], p);
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let u = mul_mod(h[i][j], inv, p);
            for c in 0..n {
                let sub = mul_mod(u, h[j + 1][c], p);
                h[i][c] = (h[i][c] + p - sub) % p;
            }
            for row in h.iter_mut() {
                let add = mul_mod(u, row[i], p);
                row[j + 1] = (row[j + 1] + add) % p;
            }
        }
    }
    // p_k(x) = (x - h_kk) p_{k-1} - sum_i h_ik * prod h_{m,m-1} * p_{i-1}
    let mut polys: Vec<Poly> = vec![vec![1]];
    for k in 0..n {
        let prev = &polys[k];
        let mut next = vec![0u64; k + 2];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = (next[i] + p - mul_mod(h[k][k], c, p)) % p;
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h[i + 1][i], p);
            let coef = mul_mod(prod, h[i][k], p);
            for (t, &c) in polys[i].iter().enumerate() {
                next[t] = (next[t] + p - mul_mod(coef, c, p)) % p;
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn primitive_root(p: u64) -> u64 {
    let primes = prime_divisors(p - 1);
    (2..p).find(|&g| primes.iter().all(|&r| pow_mod(g, (p - 1) / r, p) != 1)).expect("prime modulus")
}

/// Character table by simultaneous diagonalisation of the class matrices
/// over GF(P), `P = 1 (mod exponent)`, `P > 2|G|`, followed by lifting
/// each value from its eigenvalue multiplicities on `<g>`.
pub fn character_table<G: Group>(group: &G, limit: u128) -> Result<CharacterTable, CountingError> {
    let part = ClassPartition::new(group, limit)?;
    let r = part.len();
    if r > MAX_TABLE_CLASSES {
        return Err(CountingError::TooManyClasses { classes: r });
    }
    let n = group.order();
    let exponent = part.classes.iter().fold(1u64, |acc, c| acc.lcm(&c.element_order));
    let mut prime = exponent * ((2 * n as u64) / exponent + 1) + 1;
    while !is_prime(prime) {
        prime += exponent;
    }
    let p = prime;
    let coeffs = part.class_coefficients(group);
    let sizes: Vec<u64> = part.classes.iter().map(|c| c.size as u64).collect();
    let inverse = part.inverse_classes(group);
    let powers = part.power_maps(group);

    // refine the whole space into common eigenspaces of M_j, (M_j)_{ik} = a_ijk
    let identity: Vec<Vec<u64>> = (0..r).map(|i| (0..r).map(|k| u64::from(i == k)).collect()).collect();
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![identity];
    for j in 1..r {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut refined = Vec::new();
        for space in spaces {
            if space.len() == 1 {
                refined.push(space);
                continue;
            }
            let (basis, pivots) = echelon(space, p);
            let d = basis.len();
            // restriction R with M_j b_c = sum_t R[t][c] b_t
            let mut restr = vec![vec![0u64; d]; d];
            for (c, b) in basis.iter().enumerate() {
                let image: Vec<u64> = (0..r)
                    .map(|i| (0..r).fold(0u64, |acc, k| (acc + mul_mod(coeffs[i][j][k] % p, b[k], p)) % p))
                    .collect();
                // basis is in reduced echelon form, so coordinates sit on the pivots
                for (t, &pc) in pivots.iter().enumerate() {
                    restr[t][c] = image[pc];
                }
            }
            let roots = poly_roots(&charpoly(&restr, p), p);
            for lambda in roots {
                let shifted: Vec<Vec<u64>> = (0..d)
                    .map(|t| (0..d).map(|c| if t == c { (restr[t][c] + p - lambda) % p } else { restr[t][c] }).collect())
                    .collect();
                let kernel = null_space(shifted, d, p);
                let sub: Vec<Vec<u64>> = kernel
                    .iter()
                    .map(|kv| {
                        (0..r).map(|i| kv.iter().zip(&basis).fold(0u64, |acc, (&coef, b)| (acc + mul_mod(coef, b[i], p)) % p)).collect()
                    })
                    .collect();
                refined.push(sub);
            }
        }
        spaces = refined;
    }
    if spaces.len() != r || spaces.iter().any(|s| s.len() != 1) {
        return Err(CountingError::Table(format!("eigenspaces did not separate into {r} lines (got {})", spaces.len())));
    }

    let omega_e = pow_mod(primitive_root(p), (p - 1) / exponent, p);
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    let mut degrees = Vec::with_capacity(r);
    for space in &spaces {
        let v = &space[0];
        if v[0] == 0 {
            return Err(CountingError::Table("eigenvector vanishes on the identity class".into()));
        }
        let scale = inv_mod(v[0], p);
        let w: Vec<u64> = v.iter().map(|&x| mul_mod(x, scale, p)).collect();
        let s = (0..r).fold(0u64, |acc, i| (acc + mul_mod(mul_mod(w[i], w[inverse[i]], p), inv_mod(sizes[i] % p, p), p)) % p);
        let d2 = mul_mod((n % p as u128) as u64, inv_mod(s, p), p);
        let d = (d2 as f64).sqrt().round() as u64;
        if d == 0 || d * d != d2 {
            return Err(CountingError::Table(format!("degree square {d2} is not a perfect square")));
        }
        let chi_mod: Vec<u64> = (0..r).map(|i| mul_mod(mul_mod(w[i], d, p), inv_mod(sizes[i] % p, p), p)).collect();
        let mut row = Vec::with_capacity(r);
        for (i, class) in part.classes.iter().enumerate() {
            let o = class.element_order;
            let zeta = pow_mod(omega_e, exponent / o, p);
            let o_inv = inv_mod(o % p, p);
            let mut value = Complex64::new(0.0, 0.0);
            for l in 0..o {
                let m = (0..o).fold(0u64, |acc, j| {
                    let twist = pow_mod(zeta, (o - (j * l) % o) % o, p);
                    (acc + mul_mod(chi_mod[powers[i][j as usize]], twist, p)) % p
                });
                let m = mul_mod(m, o_inv, p);
                if m > d {
                    return Err(CountingError::Table(format!("eigenvalue multiplicity {m} exceeds degree {d}")));
                }
                value += Complex64::from_polar(m as f64, 2.0 * PI * l as f64 / o as f64);
            }
            row.push(value);
        }
        rows.push(row);
        degrees.push(d);
    }
    let mut order: Vec<usize> = (0..r).collect();
    let trivial = |row: &Vec<Complex64>| row.iter().all(|c| (c - 1.0).norm() < 1e-9);
    order.sort_by_key(|&i| (!trivial(&rows[i]), degrees[i]));
    let values = order.iter().map(|&i| rows[i].clone()).collect();
    Ok(CharacterTable {
        group: group.kind().to_string(),
        class_labels: part.classes.iter().map(|c| c.label.clone()).collect(),
        class_sizes: part.classes.iter().map(|c| c.size).collect(),
        class_orders: part.classes.iter().map(|c| c.element_order).collect(),
        values,
        tolerance: TABLE_TOLERANCE,
    })
}

/// Load the table for `group` from `dir` (as written by a previous call) or
/// compute and store it there.
pub fn cached_character_table<G: Group>(group: &G, limit: u128, dir: Option<&Path>) -> Result<CharacterTable, CountingError> {
    let Some(dir) = dir else {
        return character_table(group, limit);
    };
    let path = cache_path(dir, &group.kind().to_string());
    if path.exists() {
        if let Ok(t) = CharacterTable::load(&path) {
            if t.group == group.kind().to_string() {
                return Ok(t);
            }
        }
    }
    let table = character_table(group, limit)?;
    std::fs::create_dir_all(dir)?;
    table.save(&path)?;
    Ok(table)
}

pub fn cache_path(dir: &Path, descriptor: &str) -> PathBuf {
    let name: String = descriptor.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    dir.join(format!("{name}.chartable.json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;
    use crate::perm::PermGroup;
    use crate::psl2::Psl2Group;

    #[test]
    fn class_examples() {
        let a5 = PermGroup::alternating(5).unwrap();
        let mut sizes: Vec<u128> = conjugacy_classes(&a5, 1000).unwrap().iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 12, 12, 15, 20]);
        assert_eq!(conjugacy_classes(&AbelianGroup::new(5).unwrap(), 1000).unwrap().len(), 25);
        let g7 = conjugacy_classes(&Psl2Group::new(7, 1).unwrap(), 1000).unwrap();
        assert_eq!(g7.len(), 6);
        assert_eq!(g7.iter().map(|c| c.size).sum::<u128>(), 168);
    }

    #[test]
    fn polynomial_roots() {
        let p = 101;
        // (x-3)(x-5)(x-5)(x-7)
        let mut f: Poly = vec![1];
        for r in [3u64, 5, 5, 7] {
            let mut g = vec![0u64; f.len() + 1];
            for (i, &c) in f.iter().enumerate() {
                g[i + 1] = (g[i + 1] + c) % p;
                g[i] = (g[i] + p - mul_mod(r, c, p)) % p;
            }
            f = g;
        }
        assert_eq!(poly_roots(&f, p), vec![3, 5, 7]);
        let a = vec![vec![2, 1, 0], vec![0, 2, 0], vec![0, 0, 9]];
        let cp = charpoly(&a, p);
        assert_eq!(poly_roots(&cp, p), vec![2, 9]);
    }

    #[test]
    fn a5_table() {
        let a5 = PermGroup::alternating(5).unwrap();
        let t = character_table(&a5, 1000).unwrap();
        let mut d = t.degrees();
        d.sort();
        assert_eq!(d, vec![1, 3, 3, 4, 5]);
        assert!(t.row_orthogonality_error() < 1e-8);
        assert!(t.column_orthogonality_error() < 1e-8);
        assert!((witten_zeta(&d, 2.0) - (1.0 + 2.0 / 9.0 + 1.0 / 16.0 + 1.0 / 25.0)).abs() < 1e-12);
        let back = CharacterTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}
