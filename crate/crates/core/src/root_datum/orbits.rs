use serde::Serialize;

use super::{RootDatum, WeylTwist};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    Asymmetric,
    SymmetricUnramified,
}

/// One orbit of the twist on the roots.
#[derive(Clone, Debug, Serialize)]
pub struct RootOrbit {
    /// `α, wα, w²α, …` starting from the smallest root index.
    pub roots: Vec<usize>,
    pub kind: RootKind,
    /// Size of the orbit of `α`.
    pub degree_alpha: usize,
    /// Size of the orbit of `±α` under the twist, i.e. the degree of the
    /// field of definition of the pair.
    pub degree_pm: usize,
    /// For asymmetric orbits, the index of the orbit containing `-α`.
    pub partner: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootOrbitReport {
    pub orbits: Vec<RootOrbit>,
    /// Orbits of the twist together with `±1`, as sorted root index lists.
    pub paired_orbits: Vec<Vec<usize>>,
    /// `orbit_of[i]` is the orbit containing root `i`.
    pub orbit_of: Vec<usize>,
}

/// Orbit counts restricted to a set of roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OrbitCounts {
    pub orbits: usize,
    pub asymmetric_pairs: usize,
    pub symmetric_unramified: usize,
    /// Always zero for an unramified twist.
    pub symmetric_ramified: usize,
}

pub fn classify_orbits(datum: &RootDatum, twist: &WeylTwist) -> RootOrbitReport {
    let perm = twist.root_permutation();
    let n = datum.num_roots();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits: Vec<RootOrbit> = Vec::new();
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut roots = vec![start];
        orbit_of[start] = id;
        let mut cur = perm[start];
        while cur != start {
            orbit_of[cur] = id;
            roots.push(cur);
            cur = perm[cur];
        }
        let neg = datum.negative(start);
        let symmetric = roots.contains(&neg);
        let d = roots.len();
        let (kind, degree_pm) = if symmetric { (RootKind::SymmetricUnramified, d / 2) } else { (RootKind::Asymmetric, d) };
        orbits.push(RootOrbit { roots, kind, degree_alpha: d, degree_pm, partner: id });
    }
    for i in 0..orbits.len() {
        orbits[i].partner = orbit_of[datum.negative(orbits[i].roots[0])];
    }
    let mut paired_orbits: Vec<Vec<usize>> = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        if o.partner < i {
            continue;
        }
        let mut all = o.roots.clone();
        if o.partner != i {
            all.extend(&orbits[o.partner].roots);
        }
        all.sort_unstable();
        paired_orbits.push(all);
    }
    RootOrbitReport { orbits, paired_orbits, orbit_of }
}

impl RootOrbitReport {
    pub fn counts(&self) -> OrbitCounts {
        self.counts_in(&vec![true; self.orbit_of.len()])
    }

    /// Counts of orbits contained in `member` (a stable root set).
    pub fn counts_in(&self, member: &[bool]) -> OrbitCounts {
        let mut c = OrbitCounts::default();
        for (i, o) in self.orbits.iter().enumerate() {
            if !member[o.roots[0]] {
                continue;
            }
            c.orbits += 1;
            match o.kind {
                RootKind::SymmetricUnramified => c.symmetric_unramified += 1,
                RootKind::Asymmetric if o.partner > i => c.asymmetric_pairs += 1,
                RootKind::Asymmetric => {}
            }
        }
        c
    }

    /// Orbit indices representing each `(twist × ±1)`-orbit inside `member`:
    /// every symmetric orbit, and the first of each asymmetric pair.
    pub fn representatives_in(&self, member: &[bool]) -> Vec<usize> {
        (0..self.orbits.len())
            .filter(|&i| member[self.orbits[i].roots[0]] && self.orbits[i].partner >= i)
            .collect()
    }

    /// Whether a root set is a union of orbits.
    pub fn is_stable(&self, member: &[bool]) -> bool {
        self.orbits.iter().all(|o| o.roots.iter().all(|&r| member[r] == member[o.roots[0]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_coxeter_counts() {
        for n in 2..=10 {
            let d = RootDatum::builtin(&format!("GL({n})")).unwrap();
            let w = WeylTwist::coxeter(&d).unwrap();
            let c = classify_orbits(&d, &w).counts();
            assert_eq!(c.orbits, n - 1);
            assert_eq!(c.asymmetric_pairs, (n - 1) / 2);
            assert_eq!(c.symmetric_unramified, (n % 2 == 0) as usize);
            assert_eq!(c.symmetric_ramified, 0);
        }
    }

    #[test]
    fn split_twist_is_all_asymmetric_singletons() {
        let d = RootDatum::builtin("Sp(4)").unwrap();
        let r = classify_orbits(&d, &WeylTwist::identity(&d));
        assert_eq!(r.orbits.len(), 8);
        assert_eq!(r.counts().asymmetric_pairs, 4);
        assert!(r.orbits.iter().all(|o| o.kind == RootKind::Asymmetric && o.degree_alpha == 1));
    }

    #[test]
    fn g2_coxeter_orbits() {
        let d = RootDatum::builtin("G2").unwrap();
        let r = classify_orbits(&d, &WeylTwist::coxeter(&d).unwrap());
        // the Coxeter element has order 6 and −1 = c^3, so both orbits are symmetric
        assert_eq!(r.orbits.len(), 2);
        assert!(r.orbits.iter().all(|o| o.kind == RootKind::SymmetricUnramified && o.degree_pm == 3));
    }
}
