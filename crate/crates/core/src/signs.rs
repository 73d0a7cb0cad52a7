//! Quadratic signs attached to root orbits.
//!
//! At a point `x` of the apartment the root `α` has filtration jumps at
//! `-⟨α, x⟩ + Z`, so `α ∈ R_{x,r/2}` exactly when `r/2 + ⟨α, x⟩ ∈ Z`. On a
//! torus element `γ` the sign `ε_α(γ)` is the quadratic character of
//! `α(γ)`: in `F_{q^d}^×` for an asymmetric orbit of degree `d`, and in the
//! norm-one group of order `q^{d/2} + 1` for a symmetric one. Both are read
//! off from the parity of the exponent of `α(γ)` against a generator.

use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::character_lab::HoweData;
use crate::error::{Error, Result};
use crate::finite_torus::TwistedTorus;
use crate::root_datum::RootKind;

pub type Q64 = Ratio<i64>;

/// A rational point in the apartment, recorded through `⟨α, x⟩` per root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingPoint {
    coords: Option<Vec<Q64>>,
    values: Vec<Q64>,
    label: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointJson {
    Coords { coords: Vec<String> },
    Values { root_values: Vec<String> },
}

fn parse_rational(s: &str) -> Result<Q64> {
    Q64::from_str(s.trim()).map_err(|_| Error::InvalidPoint(format!("bad rational `{s}`")))
}

impl BuildingPoint {
    pub fn from_coords(torus: &TwistedTorus, coords: Vec<Q64>) -> Result<BuildingPoint> {
        let datum = torus.datum();
        if coords.len() != datum.rank() {
            return Err(Error::InvalidPoint(format!("expected {} coordinates", datum.rank())));
        }
        let values = datum
            .roots()
            .iter()
            .map(|a| a.iter().zip(&coords).map(|(&x, c)| c * x).fold(Q64::from_integer(0), |s, t| s + t))
            .collect();
        Self::from_root_values(torus, values, "custom").map(|mut p| {
            p.coords = Some(coords);
            p
        })
    }

    /// A table of `⟨α, x⟩`; it must be compatible with negation and the twist.
    pub fn from_root_values(torus: &TwistedTorus, values: Vec<Q64>, label: &str) -> Result<BuildingPoint> {
        let datum = torus.datum();
        if values.len() != datum.num_roots() {
            return Err(Error::InvalidPoint(format!("expected {} root values", datum.num_roots())));
        }
        let perm = torus.twist().root_permutation();
        for i in 0..values.len() {
            if values[datum.negative(i)] != -values[i] {
                return Err(Error::InvalidPoint("root values are not odd under negation".into()));
            }
            if values[perm[i]] != values[i] {
                return Err(Error::InvalidPoint("point is not fixed by the twist".into()));
            }
        }
        Ok(BuildingPoint { coords: None, values, label: label.to_string() })
    }

    /// The origin: `⟨α, x⟩ = 0` for every root.
    pub fn hyperspecial(torus: &TwistedTorus) -> BuildingPoint {
        BuildingPoint {
            coords: Some(vec![Q64::from_integer(0); torus.datum().rank()]),
            values: vec![Q64::from_integer(0); torus.datum().num_roots()],
            label: "hyperspecial".to_string(),
        }
    }

    /// The vertex attached to the twisted torus. For an unramified torus
    /// whose twist has no fixed vector on the derived cocharacters this is
    /// the unique fixed vertex, which is the origin of the standard apartment.
    pub fn coxeter_vertex(torus: &TwistedTorus) -> BuildingPoint {
        let mut p = Self::hyperspecial(torus);
        p.label = "coxeter_vertex".to_string();
        p
    }

    pub fn preset(torus: &TwistedTorus, name: &str) -> Result<BuildingPoint> {
        match name {
            "hyperspecial" | "origin" => Ok(Self::hyperspecial(torus)),
            "coxeter_vertex" => Ok(Self::coxeter_vertex(torus)),
            _ => Err(Error::InvalidPoint(format!("unknown preset `{name}`"))),
        }
    }

    /// `{"coords": ["1/2", ...]}` or `{"root_values": [...]}`.
    pub fn from_json_str(torus: &TwistedTorus, s: &str) -> Result<BuildingPoint> {
        match serde_json::from_str::<PointJson>(s)? {
            PointJson::Coords { coords } => Self::from_coords(torus, coords.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?),
            PointJson::Values { root_values } => {
                Self::from_root_values(torus, root_values.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?, "custom")
            }
        }
    }

    pub fn root_value(&self, root: usize) -> Q64 {
        self.values[root]
    }

    pub fn coords(&self) -> Option<&[Q64]> {
        self.coords.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `R_{x,r/2} = {α : r/2 + ⟨α, x⟩ ∈ Z}`.
pub fn level_root_set(torus: &TwistedTorus, x: &BuildingPoint, r: Q64) -> Result<Vec<usize>> {
    if r <= Q64::from_integer(0) {
        return Err(Error::InvalidPoint(format!("level r = {r} must be positive")));
    }
    let half = r / 2;
    Ok((0..torus.datum().num_roots()).filter(|&a| (half + x.root_value(a)).is_integer()).collect())
}

fn require_odd(torus: &TwistedTorus) -> Result<()> {
    if torus.q() % 2 == 0 {
        return Err(Error::EvenCharacteristic(torus.q()));
    }
    Ok(())
}

/// `Q / N` where `α(γ)` lies in `μ_N` for the orbit: `N = q^d - 1` for an
/// asymmetric orbit of degree `d`, `N = q^{d/2} + 1` for a symmetric one.
pub fn orbit_step(torus: &TwistedTorus, orbit: usize) -> u64 {
    let o = &torus.orbit_report().orbits[orbit];
    let q = torus.q() as u128;
    let n = match o.kind {
        RootKind::Asymmetric => q.pow(o.degree_alpha as u32) - 1,
        RootKind::SymmetricUnramified => q.pow(o.degree_pm as u32) + 1,
    };
    (torus.modulus() as u128 / n) as u64
}

/// `ε_α(γ)` for the orbit containing root index `orbit`'s representative.
pub fn epsilon_alpha(torus: &TwistedTorus, orbit: usize, coords: &[u64]) -> Result<i8> {
    require_odd(torus)?;
    let rep = torus.orbit_report().orbits[orbit].roots[0];
    let c = torus.root_value(rep, coords);
    if c == 0 {
        return Err(Error::OutsideVregDomain);
    }
    Ok(exponent_sign(torus, orbit, c))
}

fn exponent_sign(torus: &TwistedTorus, orbit: usize, c: u64) -> i8 {
    let step = orbit_step(torus, orbit);
    assert_eq!(c % step, 0, "α(γ) outside the expected cyclic subgroup");
    if (c / step) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn member(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in set {
        m[i] = true;
    }
    m
}

/// Orbit representatives (one per `Γ×{±1}`-orbit) of a stable root set.
pub fn orbit_representatives(torus: &TwistedTorus, roots: &[usize]) -> Result<Vec<usize>> {
    let m = member(torus.datum().num_roots(), roots);
    let report = torus.orbit_report();
    if !report.is_stable(&m) || roots.iter().any(|&a| !m[torus.datum().negative(a)]) {
        return Err(Error::SubsetNotStable);
    }
    Ok(report.representatives_in(&m))
}

/// `∏ ε_α(γ)` over orbit representatives of a root set; errors if some
/// `α(γ) = 1`.
pub fn epsilon_product(torus: &TwistedTorus, roots: &[usize], coords: &[u64]) -> Result<i8> {
    let mut s = 1;
    for o in orbit_representatives(torus, roots)? {
        s *= epsilon_alpha(torus, o, coords)?;
    }
    Ok(s)
}

/// `ε^ram(G, S, r, γ) = ε^sym · ε_{sym,ur}` over `R_{x,r/2}`; the
/// symmetric ramified factor is empty for an unramified torus.
pub fn epsilon_ram(torus: &TwistedTorus, x: &BuildingPoint, r: Q64, coords: &[u64]) -> Result<i8> {
    require_odd(torus)?;
    epsilon_product(torus, &level_root_set(torus, x, r)?, coords)
}

/// Roots of `R^{G^{i+1}}_{x,r_i/2} \ R^{G^i}_{x,r_i/2}` for each jump `i`.
pub fn relative_level_sets(torus: &TwistedTorus, howe: &HoweData, x: &BuildingPoint) -> Result<Vec<Vec<usize>>> {
    let n = torus.datum().num_roots();
    (0..howe.d())
        .map(|i| {
            let level = member(n, &level_root_set(torus, x, Q64::from_integer(howe.jumps[i] as i64))?);
            let inner = member(n, &howe.levi_roots(i, n));
            let outer = howe.levi_roots(i + 1, n);
            Ok(outer.into_iter().filter(|&a| level[a] && !inner[a]).collect())
        })
        .collect()
}

/// `ε^ram[θ](γ)` straight from the definition: the product over jumps of
/// the relative signs. Errors outside the very regular domain.
pub fn epsilon_ram_at(torus: &TwistedTorus, howe: &HoweData, x: &BuildingPoint, coords: &[u64]) -> Result<i8> {
    require_odd(torus)?;
    let mut s = 1;
    for set in relative_level_sets(torus, howe, x)? {
        s *= epsilon_product(torus, &set, coords)?;
    }
    Ok(s)
}

/// A character of order dividing 2: `γ ↦ (-1)^{Σ bits_i k_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignCharacter {
    pub bits: Vec<u8>,
}

impl SignCharacter {
    pub fn trivial(torus: &TwistedTorus) -> SignCharacter {
        SignCharacter { bits: vec![0; torus.factors().len()] }
    }

    pub fn value(&self, coords: &[u64]) -> i8 {
        let s: u64 = self.bits.iter().zip(coords).map(|(&b, &k)| b as u64 * (k & 1)).sum();
        if s % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn mul(&self, other: &SignCharacter) -> SignCharacter {
        SignCharacter { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// As a depth-zero character: exponents against the cyclic factors.
    pub fn as_exponents(&self, torus: &TwistedTorus) -> Vec<u64> {
        self.bits.iter().zip(torus.factors()).map(|(&b, d)| b as u64 * (d / 2)).collect()
    }

    /// The product of the orbit signs over a stable root set, as a character.
    /// Where `α(γ) = 1` the factor is taken to be `+1`.
    pub fn from_roots(torus: &TwistedTorus, roots: &[usize]) -> Result<SignCharacter> {
        require_odd(torus)?;
        let mut bits = vec![0u8; torus.factors().len()];
        for o in orbit_representatives(torus, roots)? {
            let step = orbit_step(torus, o);
            let rep = torus.orbit_report().orbits[o].roots[0];
            for (i, &r) in torus.root_residues(rep).iter().enumerate() {
                if r % step != 0 {
                    return Err(Error::Structural("root value outside its orbit field".into()));
                }
                bits[i] ^= ((r / step) % 2) as u8;
            }
        }
        for (b, d) in bits.iter().zip(torus.factors()) {
            if *b == 1 && d % 2 == 1 {
                return Err(Error::Structural("sign is not a character of the torus".into()));
            }
        }
        Ok(SignCharacter { bits })
    }
}

/// `ε^ram[θ]` as a character of the torus.
pub fn epsilon_ram_character(torus: &TwistedTorus, howe: &HoweData, x: &BuildingPoint) -> Result<SignCharacter> {
    let mut chi = SignCharacter::trivial(torus);
    for set in relative_level_sets(torus, howe, x)? {
        chi = chi.mul(&SignCharacter::from_roots(torus, &set)?);
    }
    Ok(chi)
}

/// `ẽ = (-1)^{|Γ \ R_{x,r/2}|}` on very regular `γ`.
pub fn e_tilde(torus: &TwistedTorus, x: &BuildingPoint, r: Q64, coords: &[u64]) -> Result<i8> {
    let n = torus.datum().num_roots();
    if (0..n).any(|a| torus.root_value(a, coords) == 0) {
        return Err(Error::OutsideVregDomain);
    }
    let set = level_root_set(torus, x, r)?;
    let count = torus.orbit_report().counts_in(&member(n, &set)).orbits;
    Ok(if count % 2 == 0 { 1 } else { -1 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    /// `r(S, φ) = Σ_i |Γ \ (R^{G^{i+1}}_{x,r_i/2} \ R^{G^i}_{x,r_i/2})|`.
    pub r_s_phi: usize,
    pub parity: u8,
    /// `Σ (n_{i+1} - n_i)(r_i - 1) mod 2`, for `GL(n)` signatures.
    pub gl_closed: Option<u8>,
    /// `(r_d + 1) n_d - n_0 (r_0 + 1) + Σ_{i≥1} n_i (r_{i-1} - r_i) mod 2`.
    pub gl_rearranged: Option<u8>,
}

impl ParityReport {
    pub fn consistent(&self) -> bool {
        self.gl_closed.is_none_or(|c| c == self.parity) && self.gl_rearranged.is_none_or(|c| c == self.parity)
    }
}

pub fn depth_parity(torus: &TwistedTorus, howe: &HoweData, x: &BuildingPoint) -> Result<ParityReport> {
    let n = torus.datum().num_roots();
    let report = torus.orbit_report();
    let r_s_phi = relative_level_sets(torus, howe, x)?.iter().map(|s| report.counts_in(&member(n, s)).orbits).sum::<usize>();
    let (gl_closed, gl_rearranged) = match &howe.levi_signature {
        Some(sig) => (Some(gl::parity_closed(sig, &howe.jumps)), Some(gl::parity_rearranged(sig, &howe.jumps, howe.depth))),
        None => (None, None),
    };
    Ok(ParityReport { r_s_phi, parity: (r_s_phi % 2) as u8, gl_closed, gl_rearranged })
}

/// Closed forms for `GL(n)` with an elliptic (Coxeter) twist at the origin.
pub mod gl {
    fn sign(e: i64) -> i8 {
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// `∏ (-1)^{(⌊n_{i+1}/2⌋ - ⌊n_i/2⌋)(r_i - 1)}` at a generator.
    pub fn epsilon_floor_form(sig: &[usize], jumps: &[usize]) -> i8 {
        jumps
            .iter()
            .enumerate()
            .map(|(i, &r)| sign(((sig[i + 1] / 2) as i64 - (sig[i] / 2) as i64) * (r as i64 - 1)))
            .product()
    }

    /// `∏ (-1)^{([n_{i+1} even] - [n_i even])(r_i - 1)}` at a generator:
    /// only the symmetric orbit can contribute a nontrivial sign.
    pub fn epsilon_parity_form(sig: &[usize], jumps: &[usize]) -> i8 {
        jumps
            .iter()
            .enumerate()
            .map(|(i, &r)| sign(((sig[i + 1] % 2 == 0) as i64 - (sig[i] % 2 == 0) as i64) * (r as i64 - 1)))
            .product()
    }

    pub fn parity_closed(sig: &[usize], jumps: &[usize]) -> u8 {
        let s: i64 = jumps.iter().enumerate().map(|(i, &r)| (sig[i + 1] as i64 - sig[i] as i64) * (r as i64 - 1)).sum();
        s.rem_euclid(2) as u8
    }

    pub fn parity_rearranged(sig: &[usize], jumps: &[usize], depth: usize) -> u8 {
        let d = jumps.len();
        if d == 0 {
            return 0;
        }
        let n = |i: usize| sig[i] as i64;
        let r = |i: usize| if i < d { jumps[i] as i64 } else { depth as i64 };
        let s = (r(d) + 1) * n(d) - n(0) * (r(0) + 1) + (1..=d).map(|i| n(i) * (r(i - 1) - r(i))).sum::<i64>();
        s.rem_euclid(2) as u8
    }

    /// `|Γ \ R_{x,r/2}|` at the origin.
    pub fn orbit_count(n: usize, r: usize) -> usize {
        if r % 2 == 0 {
            n - 1
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character_lab::gl_levi_roots;

    fn gl(n: usize, q: u64) -> TwistedTorus {
        TwistedTorus::from_names(&format!("GL({n})"), "coxeter", q).unwrap()
    }

    #[test]
    fn level_sets_at_origin() {
        let t = gl(4, 3);
        let x = BuildingPoint::hyperspecial(&t);
        assert_eq!(level_root_set(&t, &x, Q64::from_integer(2)).unwrap().len(), 12);
        assert!(level_root_set(&t, &x, Q64::from_integer(3)).unwrap().is_empty());
        assert!(level_root_set(&t, &x, Q64::from_integer(0)).is_err());
    }

    #[test]
    fn half_integral_point_picks_odd_levels() {
        let t = TwistedTorus::from_names("GL(2)", "identity", 3).unwrap();
        let half = Q64::new(1, 2);
        let x = BuildingPoint::from_coords(&t, vec![half, Q64::from_integer(0)]).unwrap();
        let a = t.datum().root_index(&[1, -1]).unwrap();
        let set = level_root_set(&t, &x, Q64::from_integer(1)).unwrap();
        assert!(set.contains(&a));
    }

    #[test]
    fn gl2_symmetric_sign_on_generator() {
        // γ a generator of F_9^×: α(γ) = γ^{±2}, an odd power of a generator of μ_4
        let t = gl(2, 3);
        let o = t.orbit_report();
        assert_eq!(o.orbits.len(), 1);
        let g = vec![1];
        assert_eq!(epsilon_alpha(&t, 0, &g).unwrap(), -1);
        assert_eq!(epsilon_alpha(&t, 0, &[2]).unwrap(), 1);
        assert!(matches!(epsilon_alpha(&t, 0, &[0]), Err(Error::OutsideVregDomain)));
    }

    #[test]
    fn even_characteristic_rejected() {
        let t = gl(2, 4);
        assert!(matches!(epsilon_alpha(&t, 0, &[1]), Err(Error::EvenCharacteristic(4))));
    }

    #[test]
    fn gl3_zero_toral_even_depth_is_trivial() {
        let t = gl(3, 5);
        let x = BuildingPoint::hyperspecial(&t);
        let howe = HoweData::from_parts(&t, 2, vec![2], vec![gl_levi_roots(&t, 1).unwrap()]).unwrap();
        let chi = epsilon_ram_character(&t, &howe, &x).unwrap();
        assert!(chi.is_trivial());
        assert_eq!(epsilon_ram_at(&t, &howe, &x, &[1]).unwrap(), 1);
        assert_eq!(gl::epsilon_floor_form(&[1, 3], &[2]), -1);
        assert_eq!(gl::epsilon_parity_form(&[1, 3], &[2]), 1);
    }

    #[test]
    fn parity_forms_agree_for_zero_toral() {
        let t = gl(4, 3);
        let x = BuildingPoint::hyperspecial(&t);
        for r in 1..=4 {
            let howe = HoweData::from_parts(&t, r, vec![r], vec![vec![]]).unwrap();
            let rep = depth_parity(&t, &howe, &x).unwrap();
            assert_eq!(rep.parity as usize, (3 * (r - 1)) % 2);
            assert!(rep.consistent());
        }
    }

    #[test]
    fn e_tilde_gl() {
        let t = gl(3, 5);
        let x = BuildingPoint::hyperspecial(&t);
        assert_eq!(e_tilde(&t, &x, Q64::from_integer(2), &[1]).unwrap(), 1);
        assert_eq!(e_tilde(&t, &x, Q64::from_integer(1), &[1]).unwrap(), 1);
        let t = gl(4, 3);
        assert_eq!(e_tilde(&t, &BuildingPoint::hyperspecial(&t), Q64::from_integer(2), &[1]).unwrap(), -1);
    }
}
