//! Characters of the torus at finite level and their Howe data.
//!
//! A character of `S_{0:r+}` is a character of the finite torus together with
//! one linear functional per positive integer level. Every level quotient is
//! modelled by the same additive space
//! `V = (X_* ⊗ k_E)^{w∘σ}`, where `k_E = F_{q^m}` splits the twist and `σ` is
//! the `q`-power map; all linear algebra is over `F_p`, so `dim V = e·rank`
//! when `q = p^e`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::finite_torus::{TorusAction, TwistedTorus};
use crate::linalg::IntMatrix;
use crate::modp::{kernel, Coordinates};
use crate::root_datum::{ActingGroup, Family};

/// The level space `V` with its `F_p` basis and the norm-trace images of the coroots.
#[derive(Clone, Debug)]
pub struct LevelSpace {
    p: u64,
    rank: usize,
    field_degree: usize,
    basis: Vec<Vec<u64>>,
    coords: Coordinates,
    // per root, a spanning set of W_α in V-coordinates
    root_images: Vec<Vec<Vec<u64>>>,
    frob: Vec<Vec<u64>>,
}

fn mat_vec(m: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    m.iter().map(|row| row.iter().zip(v).fold(0u64, |acc, (a, b)| (acc + a * b) % p)).collect()
}

impl LevelSpace {
    pub fn new(torus: &TwistedTorus) -> Result<LevelSpace> {
        let p = torus.characteristic();
        let q = torus.q();
        let e = crate::arith::prime_power(q).expect("torus q is a prime power").1 as usize;
        let m = torus.twist().order();
        let k = e * m;
        let field = GaloisField::new(p, k);
        let rank = torus.datum().rank();
        let n = rank * k;
        // q-power map on k_E in the power basis: column c is (t^c)^q
        let qpow: Vec<Elem> = (0..k).map(|c| field.pow(&field.monomial(c), q as u128)).collect();
        let w = torus.twist().cocharacter_matrix();
        let mut frob = vec![vec![0u64; n]; n];
        for i in 0..rank {
            for j in 0..rank {
                let wij = (w[(i, j)] as i128).rem_euclid(p as i128) as u64;
                if wij == 0 {
                    continue;
                }
                for (c, img) in qpow.iter().enumerate() {
                    for (c2, &x) in img.iter().enumerate() {
                        frob[i * k + c2][j * k + c] = (frob[i * k + c2][j * k + c] + wij * x) % p;
                    }
                }
            }
        }
        let mut fix = frob.clone();
        for (i, row) in fix.iter_mut().enumerate() {
            row[i] = (row[i] + p - 1) % p;
        }
        let basis = kernel(&fix, n, p);
        if basis.len() != e * rank {
            return Err(Error::Structural(format!("level space has dimension {} over F_p, expected {}", basis.len(), e * rank)));
        }
        let coords = Coordinates::new(&basis, p);
        let mut space = LevelSpace { p, rank, field_degree: k, basis, coords, root_images: Vec::new(), frob };
        space.root_images = torus
            .datum()
            .coroots()
            .iter()
            .map(|cor| {
                (0..k)
                    .map(|c| {
                        let mut y = vec![0u64; n];
                        for (i, &a) in cor.iter().enumerate() {
                            y[i * k + c] = (a as i128).rem_euclid(p as i128) as u64;
                        }
                        let tr = space.trace(&y, m);
                        space.coords.solve(&tr).ok_or_else(|| Error::Structural("trace leaves the level space".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(space)
    }

    fn trace(&self, y: &[u64], m: usize) -> Vec<u64> {
        let mut acc = y.to_vec();
        let mut cur = y.to_vec();
        for _ in 1..m {
            cur = mat_vec(&self.frob, &cur, self.p);
            for (a, b) in acc.iter_mut().zip(&cur) {
                *a = (*a + b) % self.p;
            }
        }
        acc
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Dimension over `F_p`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis of `V` inside `X_* ⊗ k_E`, coordinates ordered by (cocharacter, power basis).
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.dim() as u32)
    }

    /// Spanning vectors of the norm-trace image of `α^∨ ⊗ k_E`.
    pub fn root_image(&self, root: usize) -> &[Vec<u64>] {
        &self.root_images[root]
    }

    pub fn vanishes_on_root(&self, f: &[u64], root: usize) -> bool {
        self.root_images[root].iter().all(|w| dot(f, w, self.p) == 0)
    }

    /// Functionals vanishing on the images of all the given roots.
    pub fn annihilator(&self, roots: &[usize]) -> Vec<Vec<u64>> {
        let rows: Vec<Vec<u64>> = roots.iter().flat_map(|&r| self.root_images[r].iter().cloned()).collect();
        if rows.is_empty() {
            return (0..self.dim()).map(|i| (0..self.dim()).map(|j| (i == j) as u64).collect()).collect();
        }
        kernel(&rows, self.dim(), self.p)
    }

    /// Matrix (columns = images of basis vectors, in `V`-coordinates) of
    /// `v_* ⊗ 1` for `v` commuting with the twist.
    pub fn action_matrix(&self, v: &IntMatrix) -> Result<Vec<Vec<u64>>> {
        let vstar = v.inverse_unimodular().ok_or(Error::NotTransportable(v.det()))?.transpose();
        let k = self.field_degree;
        let p = self.p;
        let mut cols = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let mut img = vec![0u64; b.len()];
            for i in 0..self.rank {
                for j in 0..self.rank {
                    let vij = (vstar[(i, j)] as i128).rem_euclid(p as i128) as u64;
                    for c in 0..k {
                        img[i * k + c] = (img[i * k + c] + vij * b[j * k + c]) % p;
                    }
                }
            }
            cols.push(self.coords.solve(&img).ok_or_else(|| Error::InvalidGroup("element does not preserve the level space".into()))?);
        }
        Ok(cols)
    }

    /// `f ∘ v` given the action matrix of `v`.
    pub fn pull_back(&self, f: &[u64], action: &[Vec<u64>]) -> Vec<u64> {
        action.iter().map(|col| dot(f, col, self.p)).collect()
    }
}

type Elem = crate::field::Elem;

pub(crate) fn dot(a: &[u64], b: &[u64], p: u64) -> u64 {
    a.iter().zip(b).fold(0u64, |acc, (x, y)| (acc + x * y) % p)
}

/// A character of `S_{0:r+}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FilteredCharacter {
    pub depth: usize,
    /// Exponents against the cyclic factors: `θ_0(g_i) = exp(2πi·χ_i/d_i)`.
    pub depth_zero: Vec<u64>,
    /// `levels[m-1]` is the functional at level `m`, in `V`-coordinates.
    pub levels: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    #[serde(default)]
    depth: Option<usize>,
    #[serde(default)]
    depth_zero: Vec<u64>,
    #[serde(default)]
    levels: Vec<LevelJson>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    m: usize,
    functional: Vec<u64>,
}

impl FilteredCharacter {
    /// Validates shapes and reduces entries. The top level must be nonzero
    /// unless every level is zero (a trivial character of nominal depth).
    pub fn new(torus: &TwistedTorus, space: &LevelSpace, depth_zero: Vec<u64>, levels: Vec<Vec<u64>>) -> Result<FilteredCharacter> {
        if depth_zero.len() != torus.factors().len() {
            return Err(Error::InvalidCharacter(format!(
                "depth-zero part has {} entries, torus has {} cyclic factors",
                depth_zero.len(),
                torus.factors().len()
            )));
        }
        if levels.iter().any(|f| f.len() != space.dim()) {
            return Err(Error::InvalidCharacter(format!("functionals must have {} entries", space.dim())));
        }
        let p = space.characteristic();
        let depth_zero = depth_zero.iter().zip(torus.factors()).map(|(x, d)| x % d).collect();
        let levels: Vec<Vec<u64>> = levels.into_iter().map(|f| f.into_iter().map(|x| x % p).collect()).collect();
        let nonzero = |f: &Vec<u64>| f.iter().any(|&x| x != 0);
        if levels.iter().any(nonzero) && !levels.last().is_some_and(nonzero) {
            return Err(Error::InvalidCharacter("functional at the top level is zero".into()));
        }
        Ok(FilteredCharacter { depth: levels.len(), depth_zero, levels })
    }

    pub fn trivial(torus: &TwistedTorus, space: &LevelSpace, depth: usize) -> FilteredCharacter {
        FilteredCharacter { depth, depth_zero: torus.identity(), levels: vec![vec![0; space.dim()]; depth] }
    }

    /// Parses `{"depth_zero": [...], "levels": [{"m": 1, "functional": [...]}]}`;
    /// missing levels are zero.
    pub fn from_json_str(torus: &TwistedTorus, space: &LevelSpace, s: &str) -> Result<FilteredCharacter> {
        let j: CharacterJson = serde_json::from_str(s)?;
        let depth = j.depth.unwrap_or(0).max(j.levels.iter().map(|l| l.m).max().unwrap_or(0));
        let mut levels = vec![vec![0; space.dim()]; depth];
        for l in j.levels {
            if l.m == 0 {
                return Err(Error::InvalidCharacter("levels start at m = 1".into()));
            }
            levels[l.m - 1] = l.functional;
        }
        let dz = if j.depth_zero.is_empty() { torus.identity() } else { j.depth_zero };
        Self::new(torus, space, dz, levels)
    }

    pub fn to_json_string(&self) -> String {
        let j = CharacterJson {
            depth: Some(self.depth),
            depth_zero: self.depth_zero.clone(),
            levels: self.levels.iter().enumerate().map(|(i, f)| LevelJson { m: i + 1, functional: f.clone() }).collect(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    pub fn level(&self, m: usize) -> Result<&[u64]> {
        if m == 0 || m > self.depth {
            return Err(Error::LevelOutOfRange { level: m, depth: self.depth });
        }
        Ok(&self.levels[m - 1])
    }

    /// Replaces the depth-zero part by its product with another depth-zero character.
    pub fn twist_depth_zero(&self, torus: &TwistedTorus, tau: &[u64]) -> FilteredCharacter {
        let mut out = self.clone();
        out.depth_zero = torus.mul(&self.depth_zero, tau);
        out
    }
}

/// `θ|_{Nr(α^∨(E_m))} ≡ 1` at level `m`.
pub fn level_condition(space: &LevelSpace, theta: &FilteredCharacter, root: usize, m: usize) -> Result<bool> {
    Ok(space.vanishes_on_root(theta.level(m)?, root))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoweData {
    pub depth: usize,
    /// `r_0 < … < r_{d-1}`: levels `t` with `R_t ⊊ R_{t+}`.
    pub jumps: Vec<usize>,
    /// `R_{r_i}`, sorted root indices.
    pub subsystems: Vec<Vec<usize>>,
    /// `R_{0+}`.
    pub r_zero_plus: Vec<usize>,
    /// `n_0 | … | n_d = n` for a `GL(n)` elliptic twist.
    pub levi_signature: Option<Vec<usize>>,
}

impl HoweData {
    pub fn d(&self) -> usize {
        self.jumps.len()
    }

    pub fn is_toral(&self) -> bool {
        self.r_zero_plus.is_empty()
    }

    pub fn is_zero_toral(&self) -> bool {
        self.is_toral() && self.d() == 1
    }

    /// Roots of `G^i` for `0 ≤ i ≤ d`, where `G^d = G`.
    pub fn levi_roots(&self, i: usize, num_roots: usize) -> Vec<usize> {
        if i < self.subsystems.len() {
            self.subsystems[i].clone()
        } else {
            (0..num_roots).collect()
        }
    }

    /// Howe data assembled from explicit subsystems (validated as for computed data).
    pub fn from_parts(torus: &TwistedTorus, depth: usize, jumps: Vec<usize>, subsystems: Vec<Vec<usize>>) -> Result<HoweData> {
        if jumps.len() != subsystems.len() || jumps.windows(2).any(|w| w[0] >= w[1]) || jumps.last().is_some_and(|&r| r > depth) {
            return Err(Error::Structural("jumps must increase and end at or below the depth".into()));
        }
        let n = torus.datum().num_roots();
        let mut chain = subsystems.clone();
        chain.push((0..n).collect());
        for w in chain.windows(2) {
            let a: BTreeSet<_> = w[0].iter().collect();
            let b: BTreeSet<_> = w[1].iter().collect();
            if !(a.is_subset(&b) && a.len() < b.len()) {
                return Err(Error::Structural("subsystems must increase strictly".into()));
            }
        }
        for s in &subsystems {
            validate_subsystem(torus, s)?;
        }
        let r_zero_plus = subsystems.first().cloned().unwrap_or_else(|| (0..n).collect());
        let levi_signature = gl_signature(torus, &subsystems)?;
        Ok(HoweData { depth, jumps, subsystems, r_zero_plus, levi_signature })
    }
}

fn validate_subsystem(torus: &TwistedTorus, subset: &[usize]) -> Result<()> {
    let datum = torus.datum();
    let perm = torus.twist().root_permutation();
    if !datum.is_closed_subsystem(subset, Some(perm)) {
        return Err(Error::Structural(format!("root set {subset:?} is not a twist-stable closed subsystem")));
    }
    Ok(())
}

/// For `GL(n)` with an `n`-cycle twist, positions of the coordinates along the cycle.
pub fn gl_cycle_positions(torus: &TwistedTorus) -> Option<Vec<usize>> {
    let Some(Family::GL(n)) = torus.datum().family() else {
        return None;
    };
    let m = torus.twist().matrix();
    let mut image = vec![usize::MAX; n];
    for i in 0..n {
        image[i] = (0..n).find(|&j| m[(j, i)] == 1)?;
    }
    let mut pos = vec![usize::MAX; n];
    let mut cur = 0;
    for k in 0..n {
        if pos[cur] != usize::MAX {
            return None;
        }
        pos[cur] = k;
        cur = image[cur];
    }
    (cur == 0).then_some(pos)
}

/// Roots `e_a - e_b` with `pos(a) ≡ pos(b) mod n/n_i`: the twisted Levi of
/// `GL(n)` of type `GL(n_i)` over the degree `n/n_i` extension.
pub fn gl_levi_roots(torus: &TwistedTorus, n_i: usize) -> Option<Vec<usize>> {
    let pos = gl_cycle_positions(torus)?;
    let n = pos.len();
    if n_i == 0 || n % n_i != 0 {
        return None;
    }
    let step = n / n_i;
    Some(
        torus
            .datum()
            .roots()
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                let a = r.iter().position(|&x| x == 1).expect("GL root");
                let b = r.iter().position(|&x| x == -1).expect("GL root");
                (pos[a] + n - pos[b]) % step == 0
            })
            .map(|(i, _)| i)
            .collect(),
    )
}

fn gl_signature(torus: &TwistedTorus, subsystems: &[Vec<usize>]) -> Result<Option<Vec<usize>>> {
    let Some(pos) = gl_cycle_positions(torus) else {
        return Ok(None);
    };
    let n = pos.len();
    let mut sig = Vec::with_capacity(subsystems.len() + 1);
    for s in subsystems {
        let n_i = s.len() / n + 1;
        let expected = gl_levi_roots(torus, n_i);
        if s.len() % n != 0 || expected.as_deref() != Some(s.as_slice()) {
            return Err(Error::Structural(format!("subsystem {s:?} is not a GL twisted Levi for the cycle")));
        }
        sig.push(n_i);
    }
    sig.push(n);
    Ok(Some(sig))
}

/// `R_t` for every level and the resulting jump data.
pub fn howe_jumps(torus: &TwistedTorus, space: &LevelSpace, theta: &FilteredCharacter) -> Result<HoweData> {
    let n = torus.datum().num_roots();
    let r = theta.depth;
    // r_sets[t] = R_t for t = 1..=r+1, with R_{r+1} = R_{r+} = all roots
    let mut r_sets: Vec<Vec<usize>> = vec![Vec::new(); r + 2];
    r_sets[r + 1] = (0..n).collect();
    for t in (1..=r).rev() {
        let f = &theta.levels[t - 1];
        r_sets[t] = r_sets[t + 1].iter().copied().filter(|&a| space.vanishes_on_root(f, a)).collect();
    }
    let member = |s: &[usize]| {
        let mut m = vec![false; n];
        for &i in s {
            m[i] = true;
        }
        m
    };
    for s in r_sets.iter().skip(1) {
        if !torus.orbit_report().is_stable(&member(s)) {
            return Err(Error::Structural(format!("R_t = {s:?} is not twist-stable")));
        }
        validate_subsystem(torus, s)?;
    }
    let mut jumps = Vec::new();
    let mut subsystems = Vec::new();
    for t in 1..=r {
        if r_sets[t].len() < r_sets[t + 1].len() {
            jumps.push(t);
            subsystems.push(r_sets[t].clone());
        }
    }
    let r_zero_plus = if r == 0 { (0..n).collect() } else { r_sets[1].clone() };
    let levi_signature = gl_signature(torus, &subsystems)?;
    Ok(HoweData { depth: r, jumps, subsystems, r_zero_plus, levi_signature })
}

pub fn is_toral(torus: &TwistedTorus, space: &LevelSpace, theta: &FilteredCharacter) -> Result<bool> {
    Ok(howe_jumps(torus, space, theta)?.is_toral())
}

pub fn is_zero_toral(torus: &TwistedTorus, space: &LevelSpace, theta: &FilteredCharacter) -> Result<bool> {
    Ok(howe_jumps(torus, space, theta)?.is_zero_toral())
}

/// Precomputed actions of a group on the torus and on the level space.
#[derive(Clone, Debug)]
pub struct GroupActions {
    pub torus: Vec<TorusAction>,
    pub level: Vec<Vec<Vec<u64>>>,
}

impl GroupActions {
    pub fn new(torus: &TwistedTorus, space: &LevelSpace, group: &ActingGroup) -> Result<GroupActions> {
        let t = group.elements().iter().map(|v| torus.action(v)).collect::<Result<Vec<_>>>()?;
        let l = group.elements().iter().map(|v| space.action_matrix(v)).collect::<Result<Vec<_>>>()?;
        Ok(GroupActions { torus: t, level: l })
    }

    pub fn len(&self) -> usize {
        self.torus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.torus.is_empty()
    }
}

/// `θ^v` with `θ^v(γ) = θ(v·γ)`.
pub fn conjugate_character(torus: &TwistedTorus, space: &LevelSpace, actions: &GroupActions, v: usize, theta: &FilteredCharacter) -> FilteredCharacter {
    let e = torus.exponent();
    let factors = torus.factors();
    let value = |coords: &[u64]| -> u64 {
        coords
            .iter()
            .zip(&theta.depth_zero)
            .zip(factors)
            .fold(0u64, |acc, ((k, c), d)| (acc + (k * c % d) * (e / d)) % e)
    };
    let depth_zero = actions.torus[v].images().iter().zip(factors).map(|(img, d)| value(img) / (e / d)).collect();
    let levels = theta.levels.iter().map(|f| space.pull_back(f, &actions.level[v])).collect();
    FilteredCharacter { depth: theta.depth, depth_zero, levels }
}

/// Indices of group elements fixing `θ`; with `positive_only`, only the
/// positive levels are compared.
pub fn stabilizer_in_weyl(
    torus: &TwistedTorus,
    space: &LevelSpace,
    actions: &GroupActions,
    theta: &FilteredCharacter,
    positive_only: bool,
) -> Vec<usize> {
    (0..actions.len())
        .filter(|&v| {
            let c = conjugate_character(torus, space, actions, v, theta);
            c.levels == theta.levels && (positive_only || c.depth_zero == theta.depth_zero)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{centralizer, WeylGroup};

    fn setup(family: &str, q: u64) -> (TwistedTorus, LevelSpace) {
        let t = TwistedTorus::from_names(family, "coxeter", q).unwrap();
        let s = LevelSpace::new(&t).unwrap();
        (t, s)
    }

    #[test]
    fn level_space_dimension() {
        for (fam, q, dim) in [("GL(2)", 3, 2), ("GL(3)", 2, 3), ("G2", 3, 2), ("GL(2)", 4, 4), ("SL(2)", 2, 1)] {
            let (_, s) = setup(fam, q);
            assert_eq!(s.dim(), dim, "{fam} q={q}");
        }
    }

    #[test]
    fn gl2_only_norm_line_vanishes() {
        let (t, s) = setup("GL(2)", 3);
        let root = 0;
        let vanishing: Vec<Vec<u64>> =
            (0..9u64).map(|i| vec![i % 3, i / 3]).filter(|f| s.vanishes_on_root(f, root)).collect();
        assert_eq!(vanishing.len(), 3);
        let ann = s.annihilator(&[root]);
        assert_eq!(ann.len(), 1);
        let theta = FilteredCharacter::new(&t, &s, t.identity(), vec![ann[0].clone()]).unwrap();
        assert!(level_condition(&s, &theta, root, 1).unwrap());
        assert!(level_condition(&s, &theta, root, 2).is_err());
    }

    #[test]
    fn trivial_character_is_not_toral() {
        let (t, s) = setup("GL(3)", 3);
        let theta = FilteredCharacter::trivial(&t, &s, 2);
        let h = howe_jumps(&t, &s, &theta).unwrap();
        assert!(h.jumps.is_empty());
        assert!(!h.is_toral());
        assert_eq!(h.levi_signature, Some(vec![3]));
    }

    #[test]
    fn gl2_generic_is_zero_toral_with_trivial_stabilizer() {
        let (t, s) = setup("GL(2)", 3);
        let theta = FilteredCharacter::new(&t, &s, vec![1], vec![vec![1, 0]]).unwrap();
        let theta = if s.vanishes_on_root(&theta.levels[0], 0) {
            FilteredCharacter::new(&t, &s, vec![1], vec![vec![0, 1]]).unwrap()
        } else {
            theta
        };
        let h = howe_jumps(&t, &s, &theta).unwrap();
        assert!(h.is_zero_toral());
        assert_eq!(h.levi_signature, Some(vec![1, 2]));
        let w = WeylGroup::new(t.datum()).unwrap();
        let c = centralizer(&w, t.twist().matrix());
        let acts = GroupActions::new(&t, &s, &c).unwrap();
        assert_eq!(stabilizer_in_weyl(&t, &s, &acts, &theta, true), vec![0]);
    }

    #[test]
    fn sl2_even_characteristic_full_stabilizer() {
        let (t, s) = setup("SL(2)", 4);
        let w = WeylGroup::new(t.datum()).unwrap();
        let c = centralizer(&w, t.twist().matrix());
        assert_eq!(c.order(), 2);
        let acts = GroupActions::new(&t, &s, &c).unwrap();
        let theta = FilteredCharacter::new(&t, &s, t.identity(), vec![vec![1; s.dim()]]).unwrap();
        assert_eq!(stabilizer_in_weyl(&t, &s, &acts, &theta, true).len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let (t, s) = setup("GL(2)", 3);
        let theta = FilteredCharacter::new(&t, &s, vec![3], vec![vec![0, 0], vec![1, 2]]).unwrap();
        let back = FilteredCharacter::from_json_str(&t, &s, &theta.to_json_string()).unwrap();
        assert_eq!(back, theta);
        assert!(FilteredCharacter::new(&t, &s, vec![0], vec![vec![1, 0], vec![0, 0]]).is_err());
    }
}
