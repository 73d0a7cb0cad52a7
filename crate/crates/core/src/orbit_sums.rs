//! Weyl orbit sums of characters on the finite model
//! `S_{0:r+} = S(F_q) × V^r`, predicted character tables and the
//! uniqueness sweep for orbit sums on the very regular locus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::lcm;
use crate::character_lab::{conjugate_character, dot, howe_jumps, FilteredCharacter, GroupActions, LevelSpace};
use crate::cyclotomic::CycloSum;
use crate::error::{Error, Result};
use crate::finite_torus::{RootSubset, TwistedTorus, VregTest, DEFAULT_MATERIAL_CAP};
use crate::root_datum::{centralizer, ActingGroup, WeylGroup};
use crate::signs::{depth_parity, epsilon_ram_character, BuildingPoint, SignCharacter};

/// An element of the finite model: a torus point and one vector per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModelElement {
    pub coords: Vec<u64>,
    pub levels: Vec<Vec<u64>>,
}

/// The finite model at a fixed depth together with an acting group.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    torus: TwistedTorus,
    space: LevelSpace,
    group: ActingGroup,
    actions: GroupActions,
    depth: usize,
    order: u64,
}

impl FiniteModel {
    pub fn new(torus: TwistedTorus, space: LevelSpace, group: ActingGroup, depth: usize) -> Result<FiniteModel> {
        let actions = GroupActions::new(&torus, &space, &group)?;
        let order = lcm(lcm(torus.exponent(), space.characteristic()), 2);
        Ok(FiniteModel { torus, space, group, actions, depth, order })
    }

    /// The model with the full centralizer of the twist in `W`.
    pub fn with_centralizer(torus: TwistedTorus, depth: usize) -> Result<FiniteModel> {
        let space = LevelSpace::new(&torus)?;
        let weyl = WeylGroup::new(torus.datum())?;
        let group = centralizer(&weyl, torus.twist().matrix());
        Self::new(torus, space, group, depth)
    }

    pub fn torus(&self) -> &TwistedTorus {
        &self.torus
    }

    pub fn space(&self) -> &LevelSpace {
        &self.space
    }

    pub fn group(&self) -> &ActingGroup {
        &self.group
    }

    pub fn actions(&self) -> &GroupActions {
        &self.actions
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Order `N` of the roots of unity in which values are written.
    pub fn root_order(&self) -> u64 {
        self.order
    }

    /// `|S(F_q)| · |V|^r`.
    pub fn size(&self) -> u128 {
        self.torus.order() as u128 * (self.space.size() as u128).pow(self.depth as u32)
    }

    fn level_vectors(&self) -> Vec<Vec<u64>> {
        let p = self.space.characteristic();
        let dim = self.space.dim();
        (0..self.space.size())
            .map(|mut n| {
                (0..dim)
                    .map(|_| {
                        let c = n % p;
                        n /= p;
                        c
                    })
                    .collect()
            })
            .collect()
    }

    /// Every element, in a fixed order: torus coordinates outermost.
    pub fn elements(&self) -> Result<Vec<ModelElement>> {
        self.elements_over(self.torus.all_coords()?)
    }

    fn elements_over(&self, torus_part: Vec<Vec<u64>>) -> Result<Vec<ModelElement>> {
        let size = torus_part.len() as u128 * (self.space.size() as u128).pow(self.depth as u32);
        if size > DEFAULT_MATERIAL_CAP {
            return Err(Error::CapExceeded { size, cap: DEFAULT_MATERIAL_CAP });
        }
        let vecs = self.level_vectors();
        let mut tails: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
        for _ in 0..self.depth {
            tails = tails.into_iter().flat_map(|t| vecs.iter().map(move |v| [t.clone(), vec![v.clone()]].concat())).collect();
        }
        Ok(torus_part
            .into_iter()
            .flat_map(|c| tails.iter().map(move |t| ModelElement { coords: c.clone(), levels: t.clone() }))
            .collect())
    }

    /// Elements whose torus part is very regular for the full root set.
    pub fn vreg_elements(&self) -> Result<Vec<ModelElement>> {
        let test = self.torus.subset(&RootSubset::Full)?;
        let vreg = self.torus.all_coords()?.into_iter().filter(|c| self.torus.is_vreg(&test, c)).collect();
        self.elements_over(vreg)
    }

    /// Every character at the model depth (levels may vanish).
    pub fn characters(&self) -> Result<Vec<FilteredCharacter>> {
        let count = self.torus.order() as u128 * (self.space.size() as u128).pow(self.depth as u32);
        if count > DEFAULT_MATERIAL_CAP {
            return Err(Error::CapExceeded { size: count, cap: DEFAULT_MATERIAL_CAP });
        }
        let vecs = self.level_vectors();
        let mut out = Vec::with_capacity(count as usize);
        for chi in self.torus.all_coords()? {
            let mut levels: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
            for _ in 0..self.depth {
                levels = levels.into_iter().flat_map(|t| vecs.iter().map(move |v| [t.clone(), vec![v.clone()]].concat())).collect();
            }
            for l in levels {
                out.push(FilteredCharacter { depth: self.depth, depth_zero: chi.clone(), levels: l });
            }
        }
        Ok(out)
    }

    /// `θ(γ)` as an exponent of `ζ_N`.
    pub fn exponent(&self, theta: &FilteredCharacter, el: &ModelElement) -> u64 {
        let n = self.order;
        let e = self.torus.exponent();
        let p = self.space.characteristic();
        let mut acc = 0u64;
        for ((k, c), d) in el.coords.iter().zip(&theta.depth_zero).zip(self.torus.factors()) {
            acc = (acc + (k * c % d) * (e / d)) % e;
        }
        let mut total = acc * (n / e);
        for (f, y) in theta.levels.iter().zip(&el.levels) {
            total += dot(f, y, p) * (n / p);
        }
        total % n
    }

    /// `θ^v` for every group element, in group order.
    pub fn conjugates(&self, theta: &FilteredCharacter) -> Vec<FilteredCharacter> {
        (0..self.actions.len()).map(|v| conjugate_character(&self.torus, &self.space, &self.actions, v, theta)).collect()
    }

    /// `v·γ`.
    pub fn act(&self, v: usize, el: &ModelElement) -> ModelElement {
        let m = &self.actions.level[v];
        let p = self.space.characteristic();
        let levels = el
            .levels
            .iter()
            .map(|y| {
                let mut out = vec![0u64; y.len()];
                for (yj, col) in y.iter().zip(m) {
                    for (o, c) in out.iter_mut().zip(col) {
                        *o = (*o + yj * c) % p;
                    }
                }
                out
            })
            .collect();
        ModelElement { coords: self.actions.torus[v].apply(&el.coords), levels }
    }

    /// `Σ_v θ(v·γ)`.
    pub fn orbit_sum(&self, theta: &FilteredCharacter, el: &ModelElement) -> CycloSum {
        self.orbit_sum_with(&self.conjugates(theta), el)
    }

    fn orbit_sum_with(&self, conjugates: &[FilteredCharacter], el: &ModelElement) -> CycloSum {
        let mut s = CycloSum::zero(self.order);
        for c in conjugates {
            s.add_term(self.exponent(c, el), 1);
        }
        s
    }

    /// `#{v : θ^v = θ'}`.
    pub fn coincidences(&self, theta: &FilteredCharacter, other: &FilteredCharacter) -> usize {
        self.conjugates(theta).iter().filter(|c| *c == other).count()
    }

    /// Group elements fixing the positive levels of `θ`.
    pub fn positive_stabilizer(&self, theta: &FilteredCharacter) -> usize {
        self.conjugates(theta).iter().filter(|c| c.levels == theta.levels).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    /// `Σ_γ A(γ) \overline{B(γ)}` over the whole model.
    pub raw: i64,
    /// `raw / (|model| · |group|)` when exact.
    pub normalized: Option<i64>,
    pub coincidences: usize,
}

/// `⟨Σ_v θ^v, Σ_v θ'^v⟩ / |group|` over the full model, from an exponent
/// histogram; compared with the direct coincidence count.
pub fn orbit_sum_orthogonality(model: &FiniteModel, theta: &FilteredCharacter, other: &FilteredCharacter) -> Result<OrthogonalityReport> {
    let n = model.root_order();
    let a = model.conjugates(theta);
    let b = model.conjugates(other);
    let mut hist = vec![0i64; n as usize];
    for el in model.elements()? {
        let ea: Vec<u64> = a.iter().map(|c| model.exponent(c, &el)).collect();
        let eb: Vec<u64> = b.iter().map(|c| model.exponent(c, &el)).collect();
        for x in &ea {
            for y in &eb {
                hist[((x + n - y) % n) as usize] += 1;
            }
        }
    }
    let mut s = CycloSum::zero(n);
    for (e, &c) in hist.iter().enumerate() {
        s.add_term(e as u64, c);
    }
    let raw = s.as_integer().ok_or_else(|| Error::Structural("inner product is not an integer".into()))?;
    let denom = model.size() as i64 * model.group().order() as i64;
    let normalized = (raw % denom == 0).then_some(raw / denom);
    Ok(OrthogonalityReport { raw, normalized, coincidences: model.coincidences(theta, other) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HenniartMode {
    Exhaustive,
    Random { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub theta: FilteredCharacter,
    pub theta_prime: FilteredCharacter,
    /// `c = 1` for the first nonzero sample.
    pub c_is_one: bool,
    pub conjugate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HenniartReport {
    pub characters: usize,
    pub admissible: usize,
    pub pairs_tested: u64,
    pub equalities: u64,
    pub counterexamples: Vec<PairRecord>,
    pub degenerate: Vec<PairRecord>,
}

struct Profile {
    theta: FilteredCharacter,
    conjugates: Vec<FilteredCharacter>,
    numeric: Vec<(f64, f64)>,
}

const TOL: f64 = 1e-7;

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn small(a: (f64, f64)) -> bool {
    a.0.abs() < TOL && a.1.abs() < TOL
}

/// Checks that orbit sums agreeing up to a constant on the very regular
/// locus force `c = 1` and conjugate characters. Only characters with
/// trivial stabilizer on the positive levels are used.
pub fn henniart_test(model: &FiniteModel, mode: HenniartMode) -> Result<HenniartReport> {
    let torus = model.torus();
    let density = torus.density_report(&RootSubset::Full)?;
    if !density.star_holds {
        return Err(Error::StarFails { total: density.total, nvreg: density.nvreg });
    }
    let domain = model.vreg_elements()?;
    let all = model.characters()?;
    let characters = all.len();
    let profile = |theta: FilteredCharacter| -> Option<Profile> {
        let conjugates = model.conjugates(&theta);
        if conjugates.iter().filter(|c| c.levels == theta.levels).count() != 1 {
            return None;
        }
        let numeric = domain.iter().map(|el| model.orbit_sum_with(&conjugates, el).to_complex()).collect();
        Some(Profile { theta, conjugates, numeric })
    };
    let profiles: Vec<Profile> = all.into_iter().filter_map(profile).collect();
    let admissible = profiles.len();
    let mut report = HenniartReport { characters, admissible, pairs_tested: 0, equalities: 0, counterexamples: Vec::new(), degenerate: Vec::new() };
    if admissible == 0 {
        return Ok(report);
    }
    let mut check = |a: &Profile, b: &Profile| {
        report.pairs_tested += 1;
        let Some(i0) = (0..domain.len()).find(|&i| !small(a.numeric[i]) || !small(b.numeric[i])) else {
            report.degenerate.push(PairRecord { theta: a.theta.clone(), theta_prime: b.theta.clone(), c_is_one: false, conjugate: false });
            return;
        };
        let (a0, b0) = (a.numeric[i0], b.numeric[i0]);
        if small(a0) || small(b0) {
            return;
        }
        // A(γ) B(γ_0) = A(γ_0) B(γ) for every γ
        let proportional = (0..domain.len()).all(|i| {
            let l = cmul(a.numeric[i], b0);
            let r = cmul(a0, b.numeric[i]);
            small((l.0 - r.0, l.1 - r.1))
        });
        if !proportional {
            return;
        }
        let sa0 = model.orbit_sum_with(&a.conjugates, &domain[i0]);
        let sb0 = model.orbit_sum_with(&b.conjugates, &domain[i0]);
        let exact = domain.iter().all(|el| {
            let sa = model.orbit_sum_with(&a.conjugates, el);
            let sb = model.orbit_sum_with(&b.conjugates, el);
            sa.mul(&sb0).equals(&sb.mul(&sa0))
        });
        if !exact {
            return;
        }
        report.equalities += 1;
        let c_is_one = sa0.equals(&sb0);
        let conjugate = a.conjugates.contains(&b.theta);
        if !(c_is_one && conjugate) {
            report.counterexamples.push(PairRecord { theta: a.theta.clone(), theta_prime: b.theta.clone(), c_is_one, conjugate });
        }
    };
    match mode {
        HenniartMode::Exhaustive => {
            for a in &profiles {
                for b in &profiles {
                    check(a, b);
                }
            }
        }
        HenniartMode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let a = &profiles[rng.gen_range(0..admissible)];
                // half the trials pair θ with one of its conjugates
                let b = if rng.gen_bool(0.5) {
                    let c = &a.conjugates[rng.gen_range(0..a.conjugates.len())];
                    profiles.iter().find(|p| p.theta == *c).unwrap_or(a)
                } else {
                    &profiles[rng.gen_range(0..admissible)]
                };
                check(a, b);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictedRow {
    pub coords: Vec<u64>,
    pub exponents: Vec<u64>,
    pub value: CycloSum,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictedCharacterTable {
    /// `(-1)^{r(G^0_x) - r(S) + r(S,φ)}`.
    pub sign: i8,
    pub r_s_phi: usize,
    pub split_rank_difference: usize,
    pub epsilon: SignCharacter,
    pub phi: FilteredCharacter,
    pub star_holds: bool,
    pub rows: Vec<PredictedRow>,
}

/// Rows `sign · Σ_v ε^ram[φ](v·γ) φ(v·γ)` over the very regular torus points,
/// lifted with zero positive-level components.
pub fn predicted_table(model: &FiniteModel, theta: &FilteredCharacter, x: &BuildingPoint) -> Result<PredictedCharacterTable> {
    let torus = model.torus();
    let howe = howe_jumps(torus, model.space(), theta)?;
    let depth_zero = theta.depth == 0;
    if !depth_zero && !howe.is_toral() {
        return Err(Error::NotToral);
    }
    let eps = epsilon_ram_character(torus, &howe, x)?;
    let eps_exp = eps.as_exponents(torus);
    let phi = theta.twist_depth_zero(torus, &eps_exp);
    // ε^ram[φ] φ = θ, with ε^ram[φ] computed afresh from φ
    let howe_phi = howe_jumps(torus, model.space(), &phi)?;
    let eps_phi = epsilon_ram_character(torus, &howe_phi, x)?;
    if phi.twist_depth_zero(torus, &eps_phi.as_exponents(torus)) != *theta {
        return Err(Error::Structural("ε^ram[φ]·φ differs from θ".into()));
    }
    let parity = depth_parity(torus, &howe_phi, x)?;
    // depth zero: the reductive quotient at the origin is split of full rank
    let split_rank_difference = if depth_zero { torus.datum().rank() - torus.split_rank() } else { 0 };
    let total = split_rank_difference + parity.r_s_phi;
    let sign = if total % 2 == 0 { 1 } else { -1 };
    let star_holds = torus.density_report(&RootSubset::Full)?.star_holds;
    let test: VregTest = torus.subset(&RootSubset::Full)?;
    let conj = model.conjugates(&phi);
    let half = model.root_order() / 2;
    let zero_levels = vec![vec![0u64; model.space().dim()]; theta.depth.min(model.depth())];
    let mut rows = Vec::new();
    for coords in torus.all_coords()? {
        if !torus.is_vreg(&test, &coords) {
            continue;
        }
        let el = ModelElement { coords: coords.clone(), levels: zero_levels.clone() };
        let mut value = CycloSum::zero(model.root_order());
        for (v, c) in conj.iter().enumerate() {
            let moved = model.actions().torus[v].apply(&coords);
            let shift = if eps.value(&moved) < 0 { half } else { 0 };
            value.add_term(model.exponent(c, &el) + shift, 1);
        }
        if sign < 0 {
            value = value.neg();
        }
        rows.push(PredictedRow { exponents: torus.exponents(&coords), coords, value });
    }
    Ok(PredictedCharacterTable { sign, r_s_phi: parity.r_s_phi, split_rank_difference, epsilon: eps, phi, star_holds, rows })
}

/// Random characters at the model depth, reproducible from the seed.
pub fn random_character(model: &FiniteModel, rng: &mut impl Rng) -> FilteredCharacter {
    let depth_zero = model.torus().factors().iter().map(|&d| rng.gen_range(0..d)).collect();
    let p = model.space().characteristic();
    let levels = (0..model.depth()).map(|_| (0..model.space().dim()).map(|_| rng.gen_range(0..p)).collect()).collect();
    FilteredCharacter { depth: model.depth(), depth_zero, levels }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl_model(n: usize, q: u64, depth: usize) -> FiniteModel {
        let t = TwistedTorus::from_names(&format!("GL({n})"), "coxeter", q).unwrap();
        FiniteModel::with_centralizer(t, depth).unwrap()
    }

    #[test]
    fn trivial_character_sums_to_group_order() {
        let m = gl_model(2, 3, 1);
        let theta = FilteredCharacter::trivial(m.torus(), m.space(), 1);
        for el in m.elements().unwrap() {
            assert_eq!(m.orbit_sum(&theta, &el).as_integer(), Some(2));
        }
    }

    #[test]
    fn gl2_orbit_sum_is_theta_plus_frobenius() {
        let m = gl_model(2, 3, 0);
        let theta = FilteredCharacter { depth: 0, depth_zero: vec![1], levels: vec![] };
        let el = ModelElement { coords: vec![1], levels: vec![] };
        let s = m.orbit_sum(&theta, &el);
        // ζ_8 + ζ_8^3 in the order-8 roots of unity
        let mut expected = CycloSum::zero(m.root_order());
        let k = m.root_order() / 8;
        expected.add_term(k, 1);
        expected.add_term(3 * k, 1);
        assert!(s.equals(&expected));
    }

    #[test]
    fn counts_of_characters() {
        let m = gl_model(2, 3, 1);
        assert_eq!(m.characters().unwrap().len(), 72);
        let admissible = m.characters().unwrap().iter().filter(|t| m.positive_stabilizer(t) == 1).count();
        assert_eq!(admissible, 48);
    }

    #[test]
    fn orthogonality_self_pairing() {
        let m = gl_model(2, 3, 1);
        let theta = FilteredCharacter { depth: 1, depth_zero: vec![3], levels: vec![vec![1, 0]] };
        let theta = if m.positive_stabilizer(&theta) == 1 { theta } else { FilteredCharacter { levels: vec![vec![0, 1]], ..theta } };
        let r = orbit_sum_orthogonality(&m, &theta, &theta).unwrap();
        assert_eq!(r.normalized, Some(1));
        assert_eq!(r.coincidences, 1);
    }

    #[test]
    fn henniart_refuses_without_star() {
        let t = TwistedTorus::from_names("G2", "coxeter", 2).unwrap();
        let m = FiniteModel::with_centralizer(t, 0).unwrap();
        assert!(matches!(henniart_test(&m, HenniartMode::Exhaustive), Err(Error::StarFails { .. })));
    }
}
