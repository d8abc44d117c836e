//! Finite-field tower `F_q ⊂ F_{q^2} ⊂ F_{q^k}`.
//!
//! The top field `F_{p^m}` (`m = e0 * k`) is built from the lexicographically
//! first primitive polynomial over `F_p`; elements are stored as integers whose
//! base-`p` digits are the coordinates in the power basis of the root `x`.
//! Intermediate levels are the fixed fields of `x ↦ x^{q^j}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite-field element, encoded by its base-`p` coordinates.
pub type Fe = u32;

const ADD_TABLE_LIMIT: u32 = 1024;

/// The prime field arithmetic plus log/antilog tables for `F_{p^m}`.
#[derive(Debug, Clone)]
pub struct GaloisField {
    p: u32,
    m: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
    neg_table: Vec<u32>,
}

impl GaloisField {
    pub fn new(p: u32, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        let size = p
            .checked_pow(m)
            .filter(|s| *s <= 1 << 20)
            .ok_or_else(|| Error::InvalidParameter(format!("field {p}^{m} too large")))?;
        let modulus = first_primitive(p, m);
        let mut exp = vec![0u32; 2 * (size as usize - 1)];
        let mut log = vec![0u32; size as usize];
        let mut cur = vec![0u32; m as usize];
        cur[0] = 1;
        for i in 0..(size - 1) as usize {
            let code = encode(&cur, p);
            exp[i] = code;
            exp[i + size as usize - 1] = code;
            log[code as usize] = i as u32;
            mul_by_x(&mut cur, &modulus, p);
        }
        let neg_table = (0..size)
            .map(|x| {
                let d = decode(x, p, m);
                encode(&d.iter().map(|c| (p - c) % p).collect::<Vec<_>>(), p)
            })
            .collect();
        let mut f = GaloisField {
            p,
            m,
            size,
            modulus,
            exp,
            log,
            add_table: None,
            neg_table,
        };
        if p != 2 && size <= ADD_TABLE_LIMIT {
            let mut t = vec![0u32; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = f.add_slow(a, b);
                }
            }
            f.add_table = Some(t);
        }
        Ok(f)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.m
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    /// Monic modulus, coefficients from constant term upwards (leading 1 omitted).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn add_slow(&self, a: Fe, b: Fe) -> Fe {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            a ^ b
        } else if let Some(t) = &self.add_table {
            t[(a * self.size + b) as usize]
        } else {
            self.add_slow(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg_table[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Discrete log of a nonzero element with respect to the root `x`.
    #[inline]
    pub fn log(&self, a: Fe) -> u32 {
        self.log[a as usize]
    }

    #[inline]
    pub fn exp(&self, i: u64) -> Fe {
        self.exp[(i % (self.size as u64 - 1)) as usize]
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a == 0 {
            None
        } else {
            let n = self.size - 1;
            Some(self.exp[((n - self.log[a as usize]) % n) as usize])
        }
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.size - 1) as u64;
        self.exp(self.log[a as usize] as u64 * (e % n) % n)
    }

    pub fn from_int(&self, k: i64) -> Fe {
        k.rem_euclid(self.p as i64) as Fe
    }

    pub fn coords(&self, a: Fe) -> Vec<u32> {
        decode(a, self.p, self.m)
    }

    pub fn from_coords(&self, c: &[u32]) -> Result<Fe> {
        if c.len() > self.m as usize || c.iter().any(|d| *d >= self.p) {
            return Err(Error::Parse(format!(
                "coordinate vector {c:?} invalid for F{}",
                self.size
            )));
        }
        Ok(encode(c, self.p))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.size
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, d| acc * p + d)
}

fn decode(mut a: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

/// Multiply the residue `cur` by `x` modulo the monic polynomial `x^m + Σ modulus_i x^i`.
fn mul_by_x(cur: &mut [u32], modulus: &[u32], p: u32) {
    let m = cur.len();
    let top = cur[m - 1];
    for i in (1..m).rev() {
        cur[i] = cur[i - 1];
    }
    cur[0] = 0;
    for i in 0..m {
        cur[i] = (cur[i] + (p - modulus[i]) * top) % p;
    }
}

fn first_primitive(p: u32, m: u32) -> Vec<u32> {
    let order = p.pow(m) - 1;
    for code in 0..p.pow(m) {
        let modulus = decode(code, p, m);
        if modulus[0] == 0 {
            continue;
        }
        let mut cur = vec![0u32; m as usize];
        cur[0] = 1;
        let mut period = 0;
        for i in 1..=order {
            mul_by_x(&mut cur, &modulus, p);
            if cur[0] == 1 && cur[1..].iter().all(|d| *d == 0) {
                period = i;
                break;
            }
        }
        if period == order {
            return modulus;
        }
    }
    unreachable!("a primitive polynomial exists for every finite field")
}

/// The tower `F_q ⊂ F_{q^2} ⊂ ... ⊂ F_{q^k}` with a fixed `ω ∈ F_{q^2} − F_q`.
#[derive(Debug, Clone)]
pub struct FieldTower {
    field: GaloisField,
    e0: u32,
    q: u64,
    k: u32,
    omega: Fe,
    fq_basis: Vec<Fe>,
    dual_basis: Vec<Fe>,
    levels: Vec<Level>,
}

/// One intermediate field `F_{q^j}`, given by a generator and its minimal
/// polynomial over `F_q` (monic, coefficients constant term first).
#[derive(Debug, Clone, serde::Serialize)]
pub struct Level {
    pub degree: u32,
    pub generator: Fe,
    pub min_poly: Vec<Fe>,
}

impl FieldTower {
    /// Tower over `F_q` (q a prime power) whose top level is `F_{q^k}`; `k` must be even.
    pub fn new(q: u64, k: u32) -> Result<Self> {
        let (p, e0) = prime_power(q)
            .ok_or_else(|| Error::InvalidParameter(format!("q = {q} is not a prime power")))?;
        if k == 0 || k % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "tower degree k = {k} must be a positive multiple of 2"
            )));
        }
        let field = GaloisField::new(p, e0 * k)?;
        let mut t = FieldTower {
            field,
            e0,
            q,
            k,
            omega: 0,
            fq_basis: vec![],
            dual_basis: vec![],
            levels: vec![],
        };
        t.omega = t
            .field
            .elements()
            .find(|x| t.in_subfield(*x, 2) && !t.in_subfield(*x, 1))
            .expect("F_{q^2} - F_q is nonempty");
        let alpha = t.field.exp(1);
        t.fq_basis = (0..k).map(|i| t.field.pow(alpha, i as u64)).collect();
        t.dual_basis = t.compute_dual_basis();
        let top = t.field.size() as u64 - 1;
        t.levels = (1..=k)
            .filter(|j| k % j == 0)
            .map(|j| {
                let generator = t.field.pow(alpha, top / (q.pow(j) - 1));
                let mut poly = vec![1u32];
                for i in 0..j {
                    let root = t.frobenius(generator, i);
                    poly = poly_mul_linear(&t.field, &poly, root);
                }
                Level {
                    degree: j,
                    generator,
                    min_poly: poly,
                }
            })
            .collect();
        Ok(t)
    }

    /// Smallest tower over `F_q` containing the leading coefficients of both
    /// periods: `F_{q^2}` in characteristic 2, `F_{q^4}` otherwise.
    pub fn default_for(q: u64) -> Result<Self> {
        let k = if q % 2 == 0 { 2 } else { 4 };
        Self::new(q, k)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn p(&self) -> u32 {
        self.field.p()
    }
    pub fn e0(&self) -> u32 {
        self.e0
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn omega(&self) -> Fe {
        self.omega
    }
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `x^{q^j}`.
    pub fn frobenius(&self, x: Fe, j: u32) -> Fe {
        if x == 0 || j == 0 {
            return x;
        }
        let n = self.field.size() as u64 - 1;
        let e = mod_pow(self.q % n, j as u64, n);
        self.field.exp(self.field.log(x) as u64 * e % n)
    }

    /// `x^{q^{-j}}`, the inverse of [`frobenius`](Self::frobenius).
    pub fn frobenius_inv(&self, x: Fe, j: u32) -> Fe {
        let k = self.k;
        self.frobenius(x, (k - j % k) % k)
    }

    /// Whether `x` lies in `F_{q^level}`. `level` must divide `k`.
    pub fn in_subfield(&self, x: Fe, level: u32) -> bool {
        level > 0 && self.k % level == 0 && self.frobenius(x, level) == x
    }

    /// `Tr_{F_{q^k}/F_q}(x)`.
    pub fn trace(&self, x: Fe) -> Fe {
        (0..self.k).fold(0, |acc, j| self.field.add(acc, self.frobenius(x, j)))
    }

    /// An `F_q`-basis `1, x, ..., x^{k-1}` of the top field.
    pub fn fq_basis(&self) -> &[Fe] {
        &self.fq_basis
    }

    /// Coordinates of `x` over `F_q` in [`fq_basis`](Self::fq_basis); each is an `F_q` element.
    pub fn fq_coords(&self, x: Fe) -> Vec<Fe> {
        self.dual_basis
            .iter()
            .map(|d| self.trace(self.field.mul(x, *d)))
            .collect()
    }

    fn compute_dual_basis(&self) -> Vec<Fe> {
        let f = &self.field;
        let k = self.k as usize;
        // Gram matrix of the trace form, inverted over F_q by Gauss-Jordan.
        let mut a: Vec<Vec<Fe>> = (0..k)
            .map(|i| {
                let mut row: Vec<Fe> = (0..k)
                    .map(|j| self.trace(f.mul(self.fq_basis[i], self.fq_basis[j])))
                    .collect();
                row.extend((0..k).map(|j| if i == j { 1 } else { 0 }));
                row
            })
            .collect();
        for col in 0..k {
            let piv = (col..k).find(|r| a[*r][col] != 0).expect("trace form is nondegenerate");
            a.swap(col, piv);
            let inv = f.inv(a[col][col]).unwrap();
            for x in a[col].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for r in 0..k {
                if r != col && a[r][col] != 0 {
                    let factor = a[r][col];
                    for c in 0..2 * k {
                        let v = f.mul(factor, a[col][c]);
                        a[r][c] = f.sub(a[r][c], v);
                    }
                }
            }
        }
        (0..k)
            .map(|i| {
                (0..k).fold(0, |acc, j| f.add(acc, f.mul(a[i][k + j], self.fq_basis[j])))
            })
            .collect()
    }

    /// Name of the top field, e.g. `F4`.
    pub fn name(&self) -> String {
        format!("F{}", self.field.size())
    }

    pub fn format_element(&self, x: Fe) -> String {
        format!("{}:{}", self.name(), format_coords(&self.field.coords(x)))
    }

    pub fn parse_element(&self, s: &str) -> Result<Fe> {
        let (name, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `F<n>:[..]`, got `{s}`")))?;
        if name != self.name() {
            return Err(Error::Parse(format!(
                "element of {name} given, tower top is {}",
                self.name()
            )));
        }
        self.field.from_coords(&parse_coords(rest)?)
    }
}

pub(crate) fn format_coords(c: &[u32]) -> String {
    let inner: Vec<String> = c.iter().map(|d| d.to_string()).collect();
    format!("[{}]", inner.join(","))
}

pub(crate) fn parse_coords(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected `[c0,c1,...]`, got `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(vec![]);
    }
    inner
        .split(',')
        .map(|d| u32::from_str(d.trim()).map_err(|e| Error::Parse(format!("`{d}`: {e}"))))
        .collect()
}

fn poly_mul_linear(f: &GaloisField, poly: &[Fe], root: Fe) -> Vec<Fe> {
    // (Σ c_i X^i)(X − root)
    let mut out = vec![0u32; poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i + 1] = f.add(out[i + 1], *c);
        out[i] = f.sub(out[i], f.mul(*c, root));
    }
    out
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// `q = p^e0` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 || q > u32::MAX as u64 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = q;
    let mut e = 0;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p as u32, e))
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{} ⊃ F{} (q = {}, k = {})", self.field.size(), self.q, self.q, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_uses_x2_x_1() {
        let t = FieldTower::new(2, 2).unwrap();
        assert_eq!(t.field().modulus(), &[1, 1]);
        assert_eq!(t.omega(), 2);
        let w = t.omega();
        let f = t.field();
        // ω² + ω + 1 = 0
        assert_eq!(f.add(f.add(f.mul(w, w), w), 1), 0);
    }

    #[test]
    fn frobenius_examples() {
        for q in [2u64, 3, 4] {
            let t = FieldTower::default_for(q).unwrap();
            let w = t.omega();
            for x in t.field().elements() {
                assert_eq!(t.frobenius(x, 0), x);
            }
            assert_eq!(t.frobenius(w, 2), w);
            assert_ne!(t.frobenius(w, 1), w);
        }
    }

    #[test]
    fn subfield_membership() {
        for q in [2u64, 3] {
            let t = FieldTower::default_for(q).unwrap();
            let f = t.field();
            let w = t.omega();
            assert!(!t.in_subfield(w, 1));
            assert!(t.in_subfield(1, 1));
            assert!(t.in_subfield(f.add(w, t.frobenius(w, 1)), 1));
            // brute force: the trace lands in F_q for every element of F_{q^2}
            let fq2: Vec<Fe> = f.elements().filter(|x| t.in_subfield(*x, 2)).collect();
            assert_eq!(fq2.len() as u64, q * q);
            for x in fq2 {
                let tr = f.add(x, t.frobenius(x, 1));
                assert!(f.elements().filter(|y| f.pow(*y, q) == *y).any(|y| y == tr));
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_fq() {
        for q in [2u64, 3, 4] {
            let t = FieldTower::default_for(q).unwrap();
            let fixed = t
                .field()
                .elements()
                .filter(|x| t.frobenius(*x, 1) == *x)
                .count();
            assert_eq!(fixed as u64, q);
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism() {
        let t = FieldTower::new(3, 4).unwrap();
        let f = t.field();
        for x in (0..f.size()).step_by(7) {
            for y in (0..f.size()).step_by(5) {
                for j in 0..4 {
                    assert_eq!(
                        t.frobenius(f.mul(x, y), j),
                        f.mul(t.frobenius(x, j), t.frobenius(y, j))
                    );
                    assert_eq!(
                        t.frobenius(f.add(x, y), j),
                        f.add(t.frobenius(x, j), t.frobenius(y, j))
                    );
                }
                assert_eq!(t.frobenius_inv(t.frobenius(x, 3), 3), x);
            }
        }
    }

    #[test]
    fn fq_coordinates_reconstruct() {
        for q in [2u64, 3, 4] {
            let t = FieldTower::default_for(q).unwrap();
            let f = t.field();
            for x in f.elements() {
                let c = t.fq_coords(x);
                assert!(c.iter().all(|ci| t.in_subfield(*ci, 1)));
                let back = c
                    .iter()
                    .zip(t.fq_basis())
                    .fold(0, |acc, (ci, b)| f.add(acc, f.mul(*ci, *b)));
                assert_eq!(back, x);
            }
        }
    }

    #[test]
    fn level_polynomials_vanish_on_generators() {
        let t = FieldTower::new(3, 4).unwrap();
        let f = t.field();
        for lvl in t.levels() {
            assert_eq!(lvl.min_poly.len() as u32, lvl.degree + 1);
            let val = lvl
                .min_poly
                .iter()
                .rev()
                .fold(0, |acc, c| f.add(f.mul(acc, lvl.generator), *c));
            assert_eq!(val, 0);
            assert!(lvl.min_poly.iter().all(|c| t.in_subfield(*c, 1)));
        }
    }

    #[test]
    fn element_text_round_trip() {
        let t = FieldTower::new(2, 2).unwrap();
        assert_eq!(t.format_element(3), "F4:[1,1]");
        assert_eq!(t.parse_element("F4:[1,1]").unwrap(), 3);
        for x in t.field().elements() {
            assert_eq!(t.parse_element(&t.format_element(x)).unwrap(), x);
        }
        assert!(t.parse_element("F8:[1]").is_err());
        assert!(t.parse_element("F4:[2]").is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldTower::new(6, 2).is_err());
        assert!(FieldTower::new(2, 3).is_err());
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(12), None);
    }
}
