//! Points of an unramified torus over a finite field.
//!
//! The torus given by a root datum and a twist `w` has `F_q`-points
//! `{a ∈ X_* ⊗ μ_Q : q·w_* a = a}` with `Q = q^m - 1`, `m` the order of `w`.
//! Exponent vectors `a ∈ (Z/Q)^rank` are solved through a Smith normal form
//! of `q·w_* - I`, which also yields a cyclic decomposition `⊕ Z/d_i`.
//! Internally an element is its coordinate vector in that decomposition.

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm, prime_power};
use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, IntMatrix};
use crate::root_datum::{classify_orbits, RootDatum, RootOrbitReport, WeylTwist};

pub const DEFAULT_STREAM_CAP: u128 = 100_000_000;
pub const DEFAULT_MATERIAL_CAP: u128 = 1_000_000;

/// Streaming cap, overridable through `VREGLAB_CAP`.
pub fn stream_cap() -> u128 {
    std::env::var("VREGLAB_CAP").ok().and_then(|s| s.trim().parse().ok()).filter(|&c| c > 0).unwrap_or(DEFAULT_STREAM_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusElement {
    /// Coordinates in the cyclic decomposition.
    pub coords: Vec<u64>,
    /// Exponent vector in `(Z/Q)^rank`.
    pub exponents: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct TwistedTorus {
    datum: RootDatum,
    twist: WeylTwist,
    q: u64,
    p: u64,
    modulus: u64,
    frob: IntMatrix,
    factors: Vec<u64>,
    generators: Vec<Vec<u64>>,
    // (smith index, factor) pairs used to recover coordinates
    smith_diag: Vec<u64>,
    v_inv: Vec<Vec<i128>>,
    root_values: Vec<Vec<u64>>,
    orbits: RootOrbitReport,
    order: u64,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

impl TwistedTorus {
    pub fn new(datum: RootDatum, twist: WeylTwist, q: u64) -> Result<TwistedTorus> {
        let (p, _) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let m = twist.order();
        let qm = u32::try_from(m)
            .ok()
            .and_then(|m| q.checked_pow(m))
            .filter(|&x| x < 1 << 62)
            .ok_or(Error::ModulusOverflow { q, order: m })?;
        let modulus = qm - 1;
        let w = twist.cocharacter_matrix();
        let frob = w.scale(q as i64).sub(&IntMatrix::identity(datum.rank()));
        let det = frob.det().unsigned_abs();
        let snf = smith_normal_form(&frob);
        let snf_order: u128 = snf.diagonal.iter().map(|&d| gcd(d.unsigned_abs(), modulus as u128)).product();
        if snf_order != det {
            return Err(Error::Structural(format!("point count mismatch: det {det}, smith {snf_order}")));
        }
        let order = u64::try_from(det).map_err(|_| Error::CapExceeded { size: det, cap: u64::MAX as u128 })?;
        let rank = datum.rank();
        let smith_diag: Vec<u64> = snf.diagonal.iter().map(|&d| gcd(d.unsigned_abs(), modulus as u128) as u64).collect();
        let mut factors = Vec::new();
        let mut generators = Vec::new();
        for (j, &d) in smith_diag.iter().enumerate() {
            if d == 1 {
                continue;
            }
            let step = modulus / d;
            let g: Vec<u64> = (0..rank).map(|i| mulmod(snf.v[i][j].rem_euclid(modulus as i128) as u64, step, modulus)).collect();
            factors.push(d);
            generators.push(g);
        }
        let root_values = datum
            .roots()
            .iter()
            .map(|alpha| generators.iter().map(|g| pair_mod(alpha, g, modulus)).collect())
            .collect();
        let orbits = classify_orbits(&datum, &twist);
        let torus = TwistedTorus {
            datum,
            twist,
            q,
            p,
            modulus,
            frob,
            factors,
            generators,
            smith_diag,
            v_inv: snf.v_inv,
            root_values,
            orbits,
            order,
        };
        for g in &torus.generators {
            debug_assert!(torus.is_fixed(g));
        }
        Ok(torus)
    }

    pub fn from_names(family: &str, twist: &str, q: u64) -> Result<TwistedTorus> {
        let datum = RootDatum::builtin(family)?;
        let twist = crate::root_datum::TwistSpec::parse(twist)?.resolve(&datum)?;
        Self::new(datum, twist, q)
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn twist(&self) -> &WeylTwist {
        &self.twist
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn orbit_report(&self) -> &RootOrbitReport {
        &self.orbits
    }

    /// Orders of the cyclic factors, each dividing the next.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Exponent of the group, `lcm` of the factors.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |a, &d| lcm(a, d))
    }

    /// `|S(F_q)| = |det(q w_* - I)|`, checked against the Smith form count.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// The generator exponent vectors of the cyclic factors.
    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// Whether an exponent vector satisfies `(q w_* - I) a ≡ 0 (mod Q)`.
    pub fn is_fixed(&self, a: &[u64]) -> bool {
        let q = self.modulus as i128;
        (0..self.datum.rank()).all(|i| {
            let s: i128 = (0..self.datum.rank()).map(|j| self.frob[(i, j)] as i128 * a[j] as i128).sum();
            s.rem_euclid(q) == 0
        })
    }

    pub fn split_rank(&self) -> usize {
        let w = self.twist.cocharacter_matrix();
        self.datum.rank() - w.sub(&IntMatrix::identity(self.datum.rank())).rank()
    }

    pub fn identity(&self) -> Vec<u64> {
        vec![0; self.factors.len()]
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.factors).map(|((x, y), d)| (x + y) % d).collect()
    }

    pub fn inv(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.factors).map(|(x, d)| (d - x) % d).collect()
    }

    pub fn pow(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter().zip(&self.factors).map(|(x, &d)| mulmod(*x, k % d, d)).collect()
    }

    pub fn exponents(&self, coords: &[u64]) -> Vec<u64> {
        let mut a = vec![0u64; self.datum.rank()];
        for (k, g) in coords.iter().zip(&self.generators) {
            for (x, y) in a.iter_mut().zip(g) {
                *x = (*x + mulmod(*k, *y, self.modulus)) % self.modulus;
            }
        }
        a
    }

    pub fn element(&self, coords: Vec<u64>) -> TorusElement {
        let exponents = self.exponents(&coords);
        TorusElement { coords, exponents }
    }

    /// Coordinates of a fixed exponent vector, `None` if it is not fixed.
    pub fn coords_of(&self, a: &[u64]) -> Option<Vec<u64>> {
        if a.len() != self.datum.rank() || !self.is_fixed(a) {
            return None;
        }
        let q = self.modulus as i128;
        let mut coords = Vec::with_capacity(self.factors.len());
        for (j, &d) in self.smith_diag.iter().enumerate() {
            let b = self.v_inv[j].iter().zip(a).fold(0i128, |acc, (x, &y)| (acc + x.rem_euclid(q) * y as i128 % q) % q);
            let step = (self.modulus / d) as i128;
            if b % step != 0 {
                return None;
            }
            if d > 1 {
                coords.push((b / step) as u64 % d);
            }
        }
        Some(coords)
    }

    /// `α(γ)` as a residue mod `Q`.
    pub fn root_value(&self, root: usize, coords: &[u64]) -> u64 {
        self.root_values[root]
            .iter()
            .zip(coords)
            .fold(0u64, |acc, (r, k)| (acc + mulmod(*r, *k, self.modulus)) % self.modulus)
    }

    /// Residues `⟨α, g_i⟩` of root `α` on the generators.
    pub fn root_residues(&self, root: usize) -> &[u64] {
        &self.root_values[root]
    }

    /// Position of an element in the enumeration order.
    pub fn linear_index(&self, coords: &[u64]) -> u64 {
        coords.iter().zip(&self.factors).rev().fold(0u64, |acc, (k, d)| acc * d + k)
    }

    pub fn from_linear_index(&self, mut n: u64) -> Vec<u64> {
        self.factors
            .iter()
            .map(|d| {
                let k = n % d;
                n /= d;
                k
            })
            .collect()
    }

    fn check_cap(&self, cap: u128) -> Result<()> {
        if self.order as u128 > cap {
            return Err(Error::CapExceeded { size: self.order as u128, cap });
        }
        Ok(())
    }

    /// Streams every element once, in linear index order.
    pub fn iter(&self) -> Result<Elements<'_>> {
        self.check_cap(stream_cap())?;
        Ok(Elements { torus: self, next: Some(self.identity()) })
    }

    pub fn elements(&self) -> Result<Vec<TorusElement>> {
        self.check_cap(DEFAULT_MATERIAL_CAP)?;
        Ok(self.iter()?.collect())
    }

    /// Coordinates of every element, linear index order.
    pub fn all_coords(&self) -> Result<Vec<Vec<u64>>> {
        self.check_cap(DEFAULT_MATERIAL_CAP)?;
        Ok((0..self.order).map(|n| self.from_linear_index(n)).collect())
    }

    /// Resolves and validates a root subset.
    pub fn subset(&self, subset: &RootSubset) -> Result<VregTest> {
        let n = self.datum.num_roots();
        let member: Vec<bool> = match subset {
            RootSubset::Full => vec![true; n],
            RootSubset::Empty => vec![false; n],
            RootSubset::Custom(idx) => {
                let mut m = vec![false; n];
                for &i in idx {
                    *m.get_mut(i).ok_or_else(|| Error::InvalidDatum(format!("root index {i} out of range")))? = true;
                }
                m
            }
        };
        if (0..n).any(|i| member[i] != member[self.datum.negative(i)]) || !self.orbits.is_stable(&member) {
            return Err(Error::SubsetNotStable);
        }
        // α(γ) = 1 iff (wα)(γ) = α(γ)^q = 1 iff (-α)(γ) = 1
        let reps = self.orbits.representatives_in(&member).into_iter().map(|o| self.orbits.orbits[o].roots[0]).collect();
        Ok(VregTest { member, reps })
    }

    pub fn is_vreg(&self, test: &VregTest, coords: &[u64]) -> bool {
        test.reps.iter().all(|&r| self.root_value(r, coords) != 0)
    }

    /// Number of non very regular elements, by streaming enumeration.
    pub fn count_nvreg(&self, test: &VregTest) -> Result<u64> {
        self.check_cap(stream_cap())?;
        if test.reps.is_empty() {
            return Ok(0);
        }
        let q = self.modulus;
        let rows: Vec<&[u64]> = test.reps.iter().map(|&r| self.root_values[r].as_slice()).collect();
        let nf = self.factors.len();
        let mut vals = vec![0u64; rows.len()];
        let mut k = vec![0u64; nf];
        let mut nvreg = 0u64;
        for _ in 0..self.order {
            if vals.contains(&0) {
                nvreg += 1;
            }
            // odometer step; a wrap of factor i adds d_i·r_i ≡ 0, i.e. one more r_i
            for i in 0..nf {
                for (v, row) in vals.iter_mut().zip(&rows) {
                    *v += row[i];
                    if *v >= q {
                        *v -= q;
                    }
                }
                k[i] += 1;
                if k[i] < self.factors[i] {
                    break;
                }
                k[i] = 0;
            }
        }
        Ok(nvreg)
    }

    pub fn vreg_locus(&self, subset: &RootSubset) -> Result<Vec<TorusElement>> {
        let test = self.subset(subset)?;
        self.check_cap(DEFAULT_MATERIAL_CAP)?;
        Ok(self.iter()?.filter(|e| self.is_vreg(&test, &e.coords)).collect())
    }

    pub fn density_report(&self, subset: &RootSubset) -> Result<DensityReport> {
        let test = self.subset(subset)?;
        Ok(DensityReport::new(self.order, self.count_nvreg(&test)?))
    }

    /// For every `s`, a pair of very regular `t_1, t_2` with `s = t_1 t_2`.
    pub fn product_decomposition_check(&self, subset: &RootSubset) -> Result<ProductCheck> {
        let test = self.subset(subset)?;
        let coords = self.all_coords()?;
        let flags: Vec<bool> = coords.iter().map(|c| self.is_vreg(&test, c)).collect();
        let nvreg = flags.iter().filter(|f| !**f).count() as u64;
        let report = DensityReport::new(self.order, nvreg);
        if !report.star_holds {
            return Err(Error::StarFails { total: self.order, nvreg });
        }
        let vreg: Vec<usize> = (0..coords.len()).filter(|&i| flags[i]).collect();
        let mut witnesses = Vec::with_capacity(coords.len());
        for s in &coords {
            let found = vreg.iter().find_map(|&t| {
                let t2 = self.mul(s, &self.inv(&coords[t]));
                flags[self.linear_index(&t2) as usize].then(|| (coords[t].clone(), t2))
            });
            match found {
                Some((t1, t2)) => witnesses.push((s.clone(), t1, t2)),
                None => return Ok(ProductCheck { witnesses, failure: Some(s.clone()) }),
            }
        }
        Ok(ProductCheck { witnesses, failure: None })
    }

    /// Elements on which every root is trivial.
    pub fn root_kernel(&self) -> Result<Vec<Vec<u64>>> {
        let all: Vec<usize> = (0..self.datum.num_roots()).collect();
        Ok(self.all_coords()?.into_iter().filter(|c| all.iter().all(|&r| self.root_value(r, c) == 0)).collect())
    }

    /// The action `γ ↦ v·γ` of a matrix `v` on `X^*` commuting with the twist.
    pub fn action(&self, v: &IntMatrix) -> Result<TorusAction> {
        if v.mul(self.twist.matrix()) != self.twist.matrix().mul(v) {
            return Err(Error::InvalidGroup("element does not commute with the twist".into()));
        }
        let vstar = v.inverse_unimodular().ok_or(Error::NotTransportable(v.det()))?.transpose();
        let images = self
            .generators
            .iter()
            .map(|g| {
                let img: Vec<u64> = (0..g.len())
                    .map(|i| {
                        (0..g.len())
                            .map(|j| vstar[(i, j)] as i128 * g[j] as i128)
                            .sum::<i128>()
                            .rem_euclid(self.modulus as i128) as u64
                    })
                    .collect();
                self.coords_of(&img).ok_or_else(|| Error::Structural("action leaves the fixed points".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusAction { images, factors: self.factors.clone() })
    }
}

fn pair_mod(alpha: &[i64], a: &[u64], q: u64) -> u64 {
    alpha
        .iter()
        .zip(a)
        .map(|(&x, &y)| (x as i128 * y as i128).rem_euclid(q as i128))
        .fold(0u128, |acc, v| (acc + v as u128) % q as u128) as u64
}

/// Linear action of an automorphism on coordinates.
#[derive(Clone, Debug)]
pub struct TorusAction {
    images: Vec<Vec<u64>>,
    factors: Vec<u64>,
}

impl TorusAction {
    pub fn apply(&self, coords: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.factors.len()];
        for (k, img) in coords.iter().zip(&self.images) {
            for ((o, x), d) in out.iter_mut().zip(img).zip(&self.factors) {
                *o = (*o + mulmod(*k, *x, *d)) % d;
            }
        }
        out
    }

    /// Images of the generators.
    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }
}

pub struct Elements<'a> {
    torus: &'a TwistedTorus,
    next: Option<Vec<u64>>,
}

impl Iterator for Elements<'_> {
    type Item = TorusElement;

    fn next(&mut self) -> Option<TorusElement> {
        let cur = self.next.take()?;
        let mut k = cur.clone();
        let mut done = true;
        for (x, d) in k.iter_mut().zip(&self.torus.factors) {
            *x += 1;
            if *x < *d {
                done = false;
                break;
            }
            *x = 0;
        }
        if !done {
            self.next = Some(k);
        }
        Some(self.torus.element(cur))
    }
}

/// Roots whose values must be nontrivial for very regularity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootSubset {
    Full,
    Empty,
    Custom(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SubsetJson {
    Indices(Vec<usize>),
    Vectors(Vec<Vec<i64>>),
    Wrapped { roots: Vec<Vec<i64>> },
}

impl RootSubset {
    /// A JSON list of root indices, a list of root vectors, or `{"roots": [...]}`.
    pub fn from_json_str(datum: &RootDatum, s: &str) -> Result<RootSubset> {
        let vectors = match serde_json::from_str::<SubsetJson>(s)? {
            SubsetJson::Indices(idx) => return Ok(RootSubset::Custom(idx)),
            SubsetJson::Vectors(v) | SubsetJson::Wrapped { roots: v } => v,
        };
        vectors
            .iter()
            .map(|r| datum.root_index(r).ok_or_else(|| Error::InvalidDatum(format!("{r:?} is not a root"))))
            .collect::<Result<Vec<_>>>()
            .map(RootSubset::Custom)
    }
}

/// A validated root subset and its orbit representatives.
#[derive(Clone, Debug)]
pub struct VregTest {
    member: Vec<bool>,
    reps: Vec<usize>,
}

impl VregTest {
    pub fn member(&self) -> &[bool] {
        &self.member
    }

    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub total: u64,
    pub nvreg: u64,
    /// Reduced `total / nvreg`; `ratio_den = 0` encodes an infinite ratio.
    pub ratio_num: u64,
    pub ratio_den: u64,
    pub star_holds: bool,
}

impl DensityReport {
    pub fn new(total: u64, nvreg: u64) -> DensityReport {
        let (ratio_num, ratio_den) = if nvreg == 0 {
            (1, 0)
        } else {
            let g = gcd(total as u128, nvreg as u128) as u64;
            (total / g, nvreg / g)
        };
        DensityReport { total, nvreg, ratio_num, ratio_den, star_holds: exceeds(total, nvreg, 2) }
    }

    /// `total > t · nvreg`.
    pub fn exceeds(&self, t: u64) -> bool {
        exceeds(self.total, self.nvreg, t)
    }
}

fn exceeds(total: u64, nvreg: u64, t: u64) -> bool {
    total as u128 > t as u128 * nvreg as u128
}

#[derive(Clone, Debug)]
pub struct ProductCheck {
    /// `(s, t_1, t_2)` with `s = t_1 t_2`, in coordinates.
    pub witnesses: Vec<(Vec<u64>, Vec<u64>, Vec<u64>)>,
    pub failure: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinQRow {
    pub q: u64,
    pub report: Option<DensityReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinQReport {
    pub rows: Vec<MinQRow>,
    pub min_passing: Option<u64>,
}

/// Per-`q` verdicts for (★), each by exact enumeration.
pub fn min_q_star(datum: &RootDatum, twist: &WeylTwist, qs: &[u64], subset: &RootSubset) -> Result<MinQReport> {
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        if prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q));
        }
        let res = TwistedTorus::new(datum.clone(), twist.clone(), q).and_then(|t| t.density_report(subset));
        rows.push(match res {
            Ok(r) => MinQRow { q, report: Some(r), error: None },
            Err(e @ (Error::CapExceeded { .. } | Error::ModulusOverflow { .. })) => {
                MinQRow { q, report: None, error: Some(e.to_string()) }
            }
            Err(e) => return Err(e),
        });
    }
    let min_passing = rows.iter().filter(|r| r.report.as_ref().is_some_and(|d| d.star_holds)).map(|r| r.q).min();
    Ok(MinQReport { rows, min_passing })
}
