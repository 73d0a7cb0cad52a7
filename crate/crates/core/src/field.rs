//! Explicit finite fields `F_{p^k}` in a polynomial basis.
//!
//! Elements are coefficient vectors over `F_p` modulo a fixed monic
//! irreducible polynomial, chosen as the first one in a deterministic search
//! order. This gives an implementation of field arithmetic that is
//! independent of the exponent bookkeeping used for tori, and it carries the
//! additive structure needed by the positive-level spaces.

use std::collections::HashMap;

use crate::arith::{factorize, mod_pow};
use crate::modp::inv_mod;

/// Largest field order for which discrete logarithms are attempted.
pub const DLOG_FIELD_CAP: u64 = 1 << 40;

pub type Poly = Vec<u64>;

fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mod(a: &Poly, m: &Poly, p: u64) -> Poly {
    let mut r = a.clone();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let f = r[r.len() - 1] * lead_inv % p;
        for (i, c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - f * c % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mul(a: &Poly, b: &Poly, p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

fn poly_gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut a = a.clone();
    let mut b = b.clone();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_mod(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &Poly, mut exp: u128, m: &Poly, p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = poly_mod(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mod(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_mod(&poly_mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

/// Rabin's irreducibility test for a monic polynomial of degree `k`.
pub fn is_irreducible(f: &Poly, p: u64) -> bool {
    let k = f.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    // x^{p^i} mod f by repeated p-th powers
    let frob = |g: &Poly| poly_powmod(g, p as u128, f, p);
    let mut powers = vec![poly_mod(&x, f, p)];
    for _ in 0..k {
        let next = frob(powers.last().unwrap());
        powers.push(next);
    }
    if powers[k] != poly_mod(&x, f, p) {
        return false;
    }
    for (r, _) in factorize(k as u64) {
        let i = k / r as usize;
        let mut g = powers[i].clone();
        g.resize(g.len().max(2), 0);
        g[1] = (g[1] + p - 1) % p;
        trim(&mut g);
        if poly_gcd(f, &g, p).len() != 1 {
            return false;
        }
    }
    true
}

/// The finite field `F_{p^k}`.
#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u64,
    k: usize,
    modulus: Poly,
}

/// A field element as its `k` coefficients in the power basis.
pub type Elem = Vec<u64>;

impl GaloisField {
    pub fn new(p: u64, k: usize) -> Self {
        assert!(k >= 1);
        // first monic irreducible in lexicographic order of (c_0, …, c_{k-1})
        let count = p.checked_pow(k as u32).expect("field too large");
        for idx in 0..count {
            let mut f: Poly = (0..k).map(|i| idx / p.pow(i as u32) % p).collect();
            f.push(1);
            if (k == 1 || f[0] != 0) && is_irreducible(&f, p) {
                return GaloisField { p, k, modulus: f };
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.k]
    }

    pub fn one(&self) -> Elem {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> Elem {
        let mut e = self.zero();
        e[0] = c % self.p;
        e
    }

    /// The basis monomial `t^i`.
    pub fn monomial(&self, i: usize) -> Elem {
        self.normalize(&{
            let mut v = vec![0; i + 1];
            v[i] = 1;
            v
        })
    }

    fn normalize(&self, a: &Poly) -> Elem {
        let mut r = poly_mod(a, &self.modulus, self.p);
        r.resize(self.k, 0);
        r
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn scale(&self, a: &Elem, c: u64) -> Elem {
        let c = c % self.p;
        a.iter().map(|x| x * c % self.p).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.normalize(&poly_mul(a, b, self.p))
    }

    pub fn pow(&self, a: &Elem, exp: u128) -> Elem {
        let mut r = poly_powmod(a, exp, &self.modulus, self.p);
        r.resize(self.k, 0);
        r
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        assert!(!self.is_zero(a), "inverse of zero");
        self.pow(a, (self.order() - 2) as u128)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Integer encoding `Σ c_i p^i`, used for hashing and enumeration.
    pub fn encode(&self, a: &Elem) -> u64 {
        a.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn decode(&self, mut n: u64) -> Elem {
        (0..self.k)
            .map(|_| {
                let c = n % self.p;
                n /= self.p;
                c
            })
            .collect()
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: &Elem) -> u64 {
        let n = self.order() - 1;
        let mut ord = n;
        for (r, _) in factorize(n) {
            while ord % r == 0 && self.pow(a, (ord / r) as u128) == self.one() {
                ord /= r;
            }
        }
        ord
    }

    /// First primitive element in encoding order.
    pub fn primitive_element(&self) -> Elem {
        let n = self.order() - 1;
        (1..self.order())
            .map(|i| self.decode(i))
            .find(|a| self.element_order(a) == n)
            .expect("multiplicative group is cyclic")
    }

    /// `a^{(|F|-1)/2} = 1`, for odd characteristic.
    pub fn is_square(&self, a: &Elem) -> bool {
        assert!(self.p % 2 == 1, "quadratic test needs odd characteristic");
        self.pow(a, ((self.order() - 1) / 2) as u128) == self.one()
    }

    /// Baby-step giant-step discrete logarithm of `h` to the base `g`, where
    /// `g` has order `n`. Returns `None` if `h ∉ ⟨g⟩`.
    pub fn discrete_log(&self, g: &Elem, h: &Elem, n: u64) -> Option<u64> {
        assert!(self.order() <= DLOG_FIELD_CAP, "field exceeds discrete log cap");
        let m = (n as f64).sqrt().ceil() as u64 + 1;
        let mut table = HashMap::with_capacity(m as usize);
        let mut cur = self.one();
        for j in 0..m {
            table.entry(self.encode(&cur)).or_insert(j);
            cur = self.mul(&cur, g);
        }
        let giant = self.inv(&self.pow(g, m as u128));
        let mut gamma = h.clone();
        for i in 0..=m {
            if let Some(&j) = table.get(&self.encode(&gamma)) {
                let x = (i * m + j) % n;
                if self.pow(g, x as u128) == *h {
                    return Some(x);
                }
            }
            gamma = self.mul(&gamma, &giant);
        }
        None
    }

    /// The `p^e`-power map (Frobenius over `F_{p^e}`).
    pub fn frobenius(&self, a: &Elem, e: u32) -> Elem {
        self.pow(a, (self.p as u128).pow(e))
    }
}

/// Legendre-type value `(a / p)` for an odd prime, by Euler's criterion.
pub fn euler_criterion(a: u64, p: u64) -> i8 {
    match mod_pow(a % p, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_of_nine() {
        let f = GaloisField::new(3, 2);
        assert_eq!(f.order(), 9);
        let g = f.primitive_element();
        assert_eq!(f.element_order(&g), 8);
        let all: std::collections::HashSet<u64> = (0..8).map(|i| f.encode(&f.pow(&g, i))).collect();
        assert_eq!(all.len(), 8);
        // Frobenius fixes exactly F_3
        let fixed = (0..9).map(|i| f.decode(i)).filter(|a| f.frobenius(a, 1) == *a).count();
        assert_eq!(fixed, 3);
    }

    #[test]
    fn discrete_log_recovers_exponent() {
        let f = GaloisField::new(5, 3);
        let g = f.primitive_element();
        let n = f.order() - 1;
        for x in [0u64, 1, 7, 63, 123] {
            let h = f.pow(&g, x as u128);
            assert_eq!(f.discrete_log(&g, &h, n), Some(x));
        }
    }

    #[test]
    fn squares_are_half_the_group() {
        let f = GaloisField::new(7, 2);
        let squares = (1..f.order()).filter(|&i| f.is_square(&f.decode(i))).count() as u64;
        assert_eq!(squares, (f.order() - 1) / 2);
    }

    #[test]
    fn irreducibility_small_cases() {
        // x^2 + 1 is irreducible over F_3 but not over F_5
        assert!(is_irreducible(&vec![1, 0, 1], 3));
        assert!(!is_irreducible(&vec![1, 0, 1], 5));
        // x^2 + x + 1 over F_2
        assert!(is_irreducible(&vec![1, 1, 1], 2));
        assert_eq!(euler_criterion(2, 7), 1);
        assert_eq!(euler_criterion(3, 7), -1);
    }
}
