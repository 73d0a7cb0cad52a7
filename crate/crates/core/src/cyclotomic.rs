//! Exact sums of `N`-th roots of unity.
//!
//! A value `Σ c_e ζ_N^e` is kept as a sparse exponent histogram. Equality is
//! decided on the canonical representative modulo the cyclotomic polynomial
//! `Φ_N`, so two different histograms describing the same complex number
//! compare equal.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

/// `Σ c_e ζ_N^e` with `0 ≤ e < N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloSum {
    n: u64,
    terms: BTreeMap<u64, i64>,
}

fn cache() -> &'static Mutex<HashMap<u64, Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of `Φ_n`, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    if let Some(p) = cache().lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in crate::arith::divisors(n) {
        if d < n {
            num = exact_div(&num, &cyclotomic_polynomial(d));
        }
    }
    cache().lock().expect("cache lock").insert(n, num.clone());
    num
}

/// Division by a monic polynomial that is known to be exact.
fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let (quot, rem) = div_rem(a, b);
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn div_rem(a: &[i64], b: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let db = b.len() - 1;
    assert_eq!(b[db], 1, "divisor must be monic");
    let mut r = a.to_vec();
    if r.len() <= db {
        return (vec![0], r);
    }
    let mut q = vec![0i64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i - db + j] -= c * bj;
        }
    }
    r.truncate(db);
    (q, r)
}

impl CycloSum {
    pub fn zero(n: u64) -> CycloSum {
        CycloSum { n, terms: BTreeMap::new() }
    }

    pub fn integer(n: u64, k: i64) -> CycloSum {
        let mut s = Self::zero(n);
        s.add_term(0, k);
        s
    }

    /// `ζ_N^e`.
    pub fn root(n: u64, e: u64) -> CycloSum {
        let mut s = Self::zero(n);
        s.add_term(e, 1);
        s
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<u64, i64> {
        &self.terms
    }

    pub fn add_term(&mut self, e: u64, c: i64) {
        let e = e % self.n;
        let v = self.terms.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &CycloSum) -> CycloSum {
        assert_eq!(self.n, other.n);
        let mut s = self.clone();
        for (&e, &c) in &other.terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn neg(&self) -> CycloSum {
        CycloSum { n: self.n, terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect() }
    }

    pub fn scale(&self, k: i64) -> CycloSum {
        let mut s = Self::zero(self.n);
        if k != 0 {
            for (&e, &c) in &self.terms {
                s.add_term(e, c * k);
            }
        }
        s
    }

    pub fn mul(&self, other: &CycloSum) -> CycloSum {
        assert_eq!(self.n, other.n);
        let mut s = Self::zero(self.n);
        for (&e, &c) in &self.terms {
            for (&f, &d) in &other.terms {
                s.add_term(e + f, c * d);
            }
        }
        s
    }

    /// Complex conjugate.
    pub fn conj(&self) -> CycloSum {
        let mut s = Self::zero(self.n);
        for (&e, &c) in &self.terms {
            s.add_term(self.n - e, c);
        }
        s
    }

    /// Multiplication by `ζ_N^e`.
    pub fn shift(&self, e: u64) -> CycloSum {
        let mut s = Self::zero(self.n);
        for (&f, &c) in &self.terms {
            s.add_term(e + f, c);
        }
        s
    }

    /// Coefficients of the remainder modulo `Φ_N`, trailing zeros trimmed.
    pub fn canonical(&self) -> Vec<i64> {
        let mut poly = vec![0i64; self.n as usize];
        for (&e, &c) in &self.terms {
            poly[e as usize] += c;
        }
        let (_, mut r) = div_rem(&poly, &cyclotomic_polynomial(self.n));
        while r.last() == Some(&0) {
            r.pop();
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.canonical().is_empty()
    }

    pub fn equals(&self, other: &CycloSum) -> bool {
        self.add(&other.neg()).is_zero()
    }

    /// The value as an integer, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        match self.canonical().as_slice() {
            [] => Some(0),
            [c] => Some(*c),
            _ => None,
        }
    }

    /// Numerical value, for display and fast rejection only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.n as f64;
        self.terms.iter().fold((0.0, 0.0), |(re, im), (&e, &c)| {
            let t = std::f64::consts::TAU * e as f64 / n;
            (re + c as f64 * t.cos(), im + c as f64 * t.sin())
        })
    }

    /// `e:c` pairs joined by `;`.
    pub fn to_term_string(&self) -> String {
        self.terms.iter().map(|(e, c)| format!("{e}:{c}")).collect::<Vec<_>>().join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(15).len() - 1, 8);
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for n in [2u64, 6, 9, 12, 30] {
            let mut s = CycloSum::zero(n);
            for e in 0..n {
                s.add_term(e, 1);
            }
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn relations_are_recognised() {
        // ζ_6 + ζ_6^5 = 1
        let mut a = CycloSum::root(6, 1);
        a.add_term(5, 1);
        assert_eq!(a.as_integer(), Some(1));
        // ζ_4^2 = -1
        assert!(CycloSum::root(4, 2).equals(&CycloSum::integer(4, -1)));
        assert!(!CycloSum::root(8, 1).equals(&CycloSum::root(8, 3)));
    }

    #[test]
    fn norm_is_real() {
        let mut a = CycloSum::root(8, 1);
        a.add_term(3, 1);
        let n = a.mul(&a.conj());
        assert_eq!(n.as_integer(), Some(2));
    }
}
