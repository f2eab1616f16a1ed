//! Exact arithmetic in finite fields GF(p^e) and residue rings Z/n.
//!
//! Elements are stored as a single integer index `c0 + c1*p + ... + c(e-1)*p^(e-1)`
//! where `c0 + c1*t + ... + c(e-1)*t^(e-1)` is the reduced polynomial
//! representative modulo the field's defining polynomial. The index encoding is
//! canonical, so equality, ordering and hashing of [`FieldElement`] are the
//! coefficient-wise ones. Fields with `q <= 2^20` additionally carry log/exp
//! tables so that multiplication in the hot loops is two lookups.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, is_prime, mul_mod, pow_mod, prime_divisors};

const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field exponent must be at least 1")]
    ZeroExponent,
    #[error("field order {p}^{e} does not fit in 63 bits")]
    TooLarge { p: u64, e: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("leading coefficient of a quadratic must be nonzero")]
    DegenerateQuadratic,
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

/// The prime, the exponent and the monic defining polynomial of GF(p^e).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    /// `e + 1` coefficients, constant term first, leading coefficient 1.
    pub modulus: Vec<u64>,
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.e)
        }
    }
}

/// Parses `p^e`, or a bare prime power `q`.
pub fn parse_prime_power(s: &str) -> Result<(u64, u32), FieldError> {
    let err = || FieldError::Parse { what: "prime power", input: s.to_string() };
    let s = s.trim();
    let (p, e) = match s.split_once('^') {
        Some((p, e)) => (p.trim().parse::<u64>().map_err(|_| err())?, e.trim().parse::<u32>().map_err(|_| err())?),
        None => {
            let q = s.parse::<u64>().map_err(|_| err())?;
            crate::arith::prime_power(q).unwrap_or((q, 1))
        }
    };
    Ok((p, e))
}

/// An element of GF(p^e), meaningful only together with its [`Field`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    /// Integer index of the element (base-p digits are the coefficients).
    pub fn index(self) -> u64 {
        self.0
    }
}

/// A residue modulo `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Residue {
    pub n: u64,
    pub value: u64,
}

impl Residue {
    pub fn new(n: u64, value: i64) -> Self {
        Residue { n, value: value.rem_euclid(n as i64) as u64 }
    }
    pub fn add(self, other: Residue) -> Residue {
        debug_assert_eq!(self.n, other.n);
        Residue { n: self.n, value: (self.value + other.value) % self.n }
    }
    pub fn neg(self) -> Residue {
        Residue { n: self.n, value: (self.n - self.value) % self.n }
    }
    pub fn mul(self, other: Residue) -> Residue {
        Residue { n: self.n, value: mul_mod(self.value, other.value, self.n) }
    }
}

#[derive(Debug)]
struct Tables {
    /// `exp[i] = g^i` for `0 <= i < 2(q-1)`.
    exp: Vec<u64>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow(u64),
    Inv,
}

/// A concrete finite field GF(p^e).
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    q: u64,
    tables: Option<Arc<Tables>>,
    /// A fixed non-square, for Tonelli-Shanks when `p` is odd.
    non_square: Option<FieldElement>,
}

// ---- polynomial helpers over F_p (coefficient vectors, constant first) ----

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = pow_mod(m[dm], p - 2, p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &mi) in m.iter().enumerate() {
            r[k + i] = (r[k + i] + p - mul_mod(c, mi, p)) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(ai, bj, p)) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_pow_mod(base: &[u64], mut exp: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mul_mod(&acc, &b, m, p);
        }
        b = poly_mul_mod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(&mut out);
    out
}

/// Rabin's irreducibility test for a monic polynomial of degree `e`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = (f.len() - 1) as u32;
    if e == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let frob = |k: u32| poly_pow_mod(&x, (p as u128).pow(k), f, p);
    if !poly_sub(&frob(e), &x, p).is_empty() {
        return false;
    }
    for r in prime_divisors(e as u64) {
        let g = poly_gcd(f, &poly_sub(&frob(e / r as u32), &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree `e`
/// over F_p (coefficients below the leading one compared as a base-p integer
/// with the constant term least significant).
pub fn find_irreducible(p: u64, e: u32) -> Result<Vec<u64>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if e == 0 {
        return Err(FieldError::ZeroExponent);
    }
    if (p as u128).pow(e) > (1u128 << 63) {
        return Err(FieldError::TooLarge { p, e });
    }
    let q = p.pow(e);
    for idx in 0..q {
        let mut f = Vec::with_capacity(e as usize + 1);
        let mut rest = idx;
        for _ in 0..e {
            f.push(rest % p);
            rest /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

impl Field {
    pub fn new(p: u64, e: u32) -> Result<Field, FieldError> {
        let modulus = find_irreducible(p, e)?;
        let spec = FieldSpec { p, e, modulus };
        let q = spec.q();
        let mut field = Field { spec, q, tables: None, non_square: None };
        if q <= TABLE_LIMIT {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        if p != 2 {
            field.non_square = (2..q).map(FieldElement).find(|&a| !field.is_square(a));
        }
        Ok(field)
    }

    /// Parses `p` or `p^e` and builds the field.
    pub fn parse(s: &str) -> Result<Field, FieldError> {
        let (p, e) = parse_prime_power(s)?;
        Field::new(p, e)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q;
        let n = q - 1;
        let primes = prime_divisors(n);
        let g = (1..q)
            .map(FieldElement)
            .find(|&g| primes.iter().all(|&r| self.pow_slow(g, n / r) != self.one()))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(2 * n as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = self.one();
        for i in 0..n {
            exp.push(cur.0);
            log[cur.0 as usize] = i as u32;
            cur = self.mul_slow(cur, g);
        }
        for i in 0..n as usize {
            exp.push(exp[i]);
        }
        Tables { exp, log }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn p(&self) -> u64 {
        self.spec.p
    }
    pub fn e(&self) -> u32 {
        self.spec.e
    }
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }
    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Image of an integer under Z -> F_p -> GF(q).
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.spec.p as i64) as u64)
    }

    /// Element from an index in `0..q`; `None` if out of range.
    pub fn from_index(&self, idx: u64) -> Option<FieldElement> {
        (idx < self.q).then_some(FieldElement(idx))
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        let p = self.spec.p;
        let reduced = poly_rem(&coeffs.iter().map(|c| c % p).collect::<Vec<_>>(), &self.spec.modulus, p);
        FieldElement(reduced.iter().rev().fold(0u64, |acc, &c| acc * p + c))
    }

    /// Length-`e` coefficient vector, constant term first.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let p = self.spec.p;
        let mut rest = a.0;
        (0..self.spec.e)
            .map(|_| {
                let c = rest % p;
                rest /= p;
                c
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.e == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u64, 1u64);
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if p == 2 || a.0 == 0 {
            return a;
        }
        if self.spec.e == 1 {
            return FieldElement(p - a.0);
        }
        let (mut x, mut out, mut place) = (a.0, 0u64, 1u64);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            place = place.wrapping_mul(p);
            x /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    fn mul_slow(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.spec.e == 1 {
            return FieldElement(mul_mod(a.0, b.0, self.spec.p));
        }
        let prod = poly_mul_mod(&self.coeffs(a), &self.coeffs(b), &self.spec.modulus, self.spec.p);
        self.from_coeffs(&prod)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        match &self.tables {
            Some(t) => FieldElement(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize]),
            None => self.mul_slow(a, b),
        }
    }

    fn pow_slow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: FieldElement, exp: u64) -> FieldElement {
        if exp == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return self.zero();
        }
        match &self.tables {
            Some(t) => {
                let l = (t.log[a.0 as usize] as u128 * exp as u128 % (self.q - 1) as u128) as usize;
                FieldElement(t.exp[l])
            }
            None => self.pow_slow(a, exp),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u64;
                FieldElement(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
            }
            None => self.pow_slow(a, self.q - 2),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn arith(&self, op: FieldOp, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Sub => Ok(self.sub(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Div => self.div(a, b),
            FieldOp::Pow(k) => Ok(self.pow(a, k)),
            FieldOp::Inv => self.inv(a),
        }
    }

    /// The Frobenius map `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.spec.p)
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        if a.0 == 0 || self.spec.p == 2 {
            return true;
        }
        match &self.tables {
            Some(t) => t.log[a.0 as usize] % 2 == 0,
            None => self.pow(a, (self.q - 1) / 2) == self.one(),
        }
    }

    /// A square root of `a`, if one exists.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return Some(a);
        }
        if self.spec.p == 2 {
            return Some(self.pow(a, self.q / 2));
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize];
            return (l % 2 == 0).then(|| FieldElement(t.exp[(l / 2) as usize]));
        }
        if !self.is_square(a) {
            return None;
        }
        // Tonelli-Shanks
        let mut s = 0;
        let mut odd = self.q - 1;
        while odd.is_multiple_of(2) {
            odd /= 2;
            s += 1;
        }
        let z = self.non_square.expect("odd characteristic field has a non-square");
        let mut m = s;
        let mut c = self.pow(z, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while t != self.one() {
            let mut i = 0;
            let mut t2 = t;
            while t2 != self.one() {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// Absolute trace GF(q) -> F_p.
    pub fn abs_trace(&self, a: FieldElement) -> u64 {
        let mut acc = self.zero();
        let mut cur = a;
        for _ in 0..self.spec.e {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur);
        }
        acc.0
    }

    /// Smallest `d | e` with `a` in the subfield GF(p^d).
    pub fn subfield_degree(&self, a: FieldElement) -> u32 {
        let e = self.spec.e;
        for d in divisors(e as u64) {
            let mut cur = a;
            for _ in 0..d {
                cur = self.frobenius(cur);
            }
            if cur == a {
                return d as u32;
            }
        }
        e
    }

    /// All roots in GF(q) of `a x^2 + b x + c`, ascending by index.
    pub fn solve_quadratic(&self, a: FieldElement, b: FieldElement, c: FieldElement) -> Result<Vec<FieldElement>, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DegenerateQuadratic);
        }
        let b = self.div(b, a)?;
        let c = self.div(c, a)?;
        let mut roots = if self.spec.p == 2 {
            self.monic_quadratic_char2(b, c)
        } else {
            let disc = self.sub(self.mul(b, b), self.mul(self.from_int(4), c));
            match self.sqrt(disc) {
                None => Vec::new(),
                Some(r) => {
                    let half = self.inv(self.from_int(2))?;
                    let nb = self.neg(b);
                    vec![self.mul(self.add(nb, r), half), self.mul(self.sub(nb, r), half)]
                }
            }
        };
        roots.sort_unstable();
        roots.dedup();
        Ok(roots)
    }

    /// Roots of `x^2 + b x + c` in characteristic 2, through the substitution
    /// `x = b y`, which turns the equation into `y^2 + y = c / b^2`.
    fn monic_quadratic_char2(&self, b: FieldElement, c: FieldElement) -> Vec<FieldElement> {
        if b.0 == 0 {
            return vec![self.sqrt(c).expect("squaring is bijective in characteristic 2")];
        }
        let delta = self.mul(c, self.inv(self.mul(b, b)).unwrap());
        if self.abs_trace(delta) != 0 {
            return Vec::new();
        }
        let y = self.solve_artin_schreier(delta);
        vec![self.mul(b, y), self.mul(b, self.add(y, self.one()))]
    }

    /// Solves `y^2 + y = delta` (trace of `delta` zero) by linear algebra over F_2:
    /// the map `y -> y^2 + y` is F_2-linear on the coefficient bits.
    fn solve_artin_schreier(&self, delta: FieldElement) -> FieldElement {
        let e = self.spec.e;
        // pivots keyed by leading bit: (image vector, preimage combination)
        let mut pivots: Vec<Option<(u64, u64)>> = vec![None; e as usize];
        for i in 0..e {
            let basis = FieldElement(1 << i);
            let mut v = self.add(self.mul(basis, basis), basis).0;
            let mut combo = 1u64 << i;
            while v != 0 {
                let lead = 63 - v.leading_zeros() as usize;
                match pivots[lead] {
                    Some((pv, pc)) => {
                        v ^= pv;
                        combo ^= pc;
                    }
                    None => {
                        pivots[lead] = Some((v, combo));
                        break;
                    }
                }
            }
        }
        let mut target = delta.0;
        let mut y = 0u64;
        while target != 0 {
            let lead = 63 - target.leading_zeros() as usize;
            let (pv, pc) = pivots[lead].expect("trace-zero elements lie in the image");
            target ^= pv;
            y ^= pc;
        }
        FieldElement(y)
    }

    /// Parses `c0+c1*t+...+ck*t^k`; prime fields also accept bare (possibly
    /// negative) integers.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let err = || FieldError::Parse { what: "field element", input: s.to_string() };
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let p = self.spec.p as i64;
        let mut coeffs = vec![0u64; self.spec.e as usize];
        for term in s.split('+') {
            let (neg, term) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term),
            };
            let (coef, power) = if let Some(pos) = term.find('t') {
                let (c, rest) = term.split_at(pos);
                let c = c.strip_suffix('*').unwrap_or(c);
                let coef = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| err())? };
                let power = match rest.strip_prefix("t^") {
                    Some(k) => k.parse::<usize>().map_err(|_| err())?,
                    None if rest == "t" => 1,
                    None => return Err(err()),
                };
                (coef, power)
            } else {
                (term.parse::<i64>().map_err(|_| err())?, 0)
            };
            if power >= coeffs.len() {
                return Err(err());
            }
            let coef = if neg { -coef } else { coef };
            coeffs[power] = ((coeffs[power] as i64 + coef).rem_euclid(p)) as u64;
        }
        Ok(self.from_coeffs(&coeffs))
    }

    pub fn format_element(&self, a: FieldElement) -> String {
        if self.spec.e == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}
