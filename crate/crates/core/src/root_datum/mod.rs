//! Root data, Weyl groups, Frobenius twists and Galois orbits of roots.
//!
//! A root datum is stored concretely: characters and cocharacters are integer
//! vectors paired by the dot product, and every root carries its coroot.

mod orbits;
mod twist;
mod weyl;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

pub use orbits::{classify_orbits, OrbitCounts, RootKind, RootOrbit, RootOrbitReport};
pub use twist::{TwistSpec, WeylTwist};
pub use weyl::{centralizer, ActingGroup, WeylGroup, WEYL_CAP};

const ROOT_CAP: usize = 10_000;

pub fn pairing(chi: &[i64], lambda: &[i64]) -> i64 {
    chi.iter().zip(lambda).map(|(a, b)| a * b).sum()
}

/// The split families with built-in data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `GL(n)`
    GL(usize),
    /// `SL(n)`
    SL(usize),
    /// `Sp(2n)`, parameter `n`
    Sp(usize),
    /// `SO(2n+1)`, parameter `n`
    SOOdd(usize),
    /// `SO(2n)`, parameter `n`
    SOEven(usize),
    G2,
}

impl Family {
    /// Parses names such as `GL(4)`, `GL4`, `Sp(4)`, `SO(7)`, `G2`.
    pub fn parse(name: &str) -> Result<Family> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_uppercase();
        if compact == "G2" || compact == "G(2)" {
            return Ok(Family::G2);
        }
        let split = compact.find(|c: char| c.is_ascii_digit() || c == '(' || c == '-').unwrap_or(compact.len());
        let (head, tail) = compact.split_at(split);
        let digits = tail.trim_start_matches('(').trim_end_matches(')');
        let k: i64 = digits.parse().map_err(|_| Error::UnknownFamily(name.to_string()))?;
        let bad = |fam: &str| Error::InvalidRank { family: fam.to_string(), rank: k };
        match head {
            "GL" if k >= 1 => Ok(Family::GL(k as usize)),
            "SL" if k >= 2 => Ok(Family::SL(k as usize)),
            "SP" if k >= 2 && k % 2 == 0 => Ok(Family::Sp(k as usize / 2)),
            "SO" if k >= 3 && k % 2 == 1 => Ok(Family::SOOdd(k as usize / 2)),
            "SO" if k >= 4 && k % 2 == 0 => Ok(Family::SOEven(k as usize / 2)),
            "GL" | "SL" | "SP" | "SO" => Err(bad(head)),
            _ => Err(Error::UnknownFamily(name.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Family::GL(n) => format!("GL({n})"),
            Family::SL(n) => format!("SL({n})"),
            Family::Sp(n) => format!("Sp({})", 2 * n),
            Family::SOOdd(n) => format!("SO({})", 2 * n + 1),
            Family::SOEven(n) => format!("SO({})", 2 * n),
            Family::G2 => "G2".to_string(),
        }
    }
}

/// Root datum JSON: `{"rank", "roots", "coroots", "simple"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootDatumJson {
    pub rank: usize,
    pub roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<i64>>,
    pub simple: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    name: String,
    rank: usize,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    simple: Vec<usize>,
    index: HashMap<Vec<i64>, usize>,
    negative: Vec<usize>,
    family: Option<Family>,
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|j| (i == j) as i64).collect()
}

fn diff(n: usize, i: usize, j: usize) -> Vec<i64> {
    (0..n).map(|k| (k == i) as i64 - (k == j) as i64).collect()
}

fn reflect_character(chi: &[i64], root: &[i64], coroot: &[i64]) -> Vec<i64> {
    let c = pairing(chi, coroot);
    chi.iter().zip(root).map(|(x, a)| x - c * a).collect()
}

impl RootDatum {
    /// Standard root datum of a split group.
    pub fn build(family: Family) -> Result<RootDatum> {
        let (rank, simple_roots, simple_coroots): (usize, Vec<Vec<i64>>, Vec<Vec<i64>>) = match family {
            Family::GL(n) => {
                let s: Vec<_> = (0..n.saturating_sub(1)).map(|i| diff(n, i, i + 1)).collect();
                (n, s.clone(), s)
            }
            Family::SL(n) => {
                // X^* = Z^n / Z(1,…,1) with basis the images of e_1 … e_{n-1};
                // dual basis of X_* is e_i - e_n
                let r = n - 1;
                let image = |i: usize| -> Vec<i64> {
                    if i < r {
                        unit(r, i)
                    } else {
                        vec![-1; r]
                    }
                };
                let roots: Vec<_> =
                    (0..r).map(|i| image(i).iter().zip(image(i + 1)).map(|(a, b)| a - b).collect()).collect();
                let coroot = |i: usize| -> Vec<i64> {
                    // e_i - e_{i+1} in the basis f_k = e_k - e_n
                    let mut v = vec![0; r];
                    v[i] += 1;
                    if i + 1 < r {
                        v[i + 1] -= 1;
                    }
                    v
                };
                (r, roots, (0..r).map(coroot).collect())
            }
            Family::Sp(n) => {
                let mut roots: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                let mut coroots = roots.clone();
                roots.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
                coroots.push(unit(n, n - 1));
                (n, roots, coroots)
            }
            Family::SOOdd(n) => {
                let mut roots: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                let mut coroots = roots.clone();
                roots.push(unit(n, n - 1));
                coroots.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
                (n, roots, coroots)
            }
            Family::SOEven(n) => {
                let mut roots: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
                let mut last = vec![0; n];
                last[n - 2] = 1;
                last[n - 1] = 1;
                roots.push(last);
                (n, roots.clone(), roots)
            }
            Family::G2 => {
                // basis: short simple root a, long simple root b
                (2, vec![vec![1, 0], vec![0, 1]], vec![vec![2, -3], vec![-1, 2]])
            }
        };
        let mut datum = Self::from_simple(&family.name(), rank, &simple_roots, &simple_coroots)?;
        datum.family = Some(family);
        Ok(datum)
    }

    pub fn builtin(name: &str) -> Result<RootDatum> {
        Self::build(Family::parse(name)?)
    }

    /// Closes simple roots and coroots under the simple reflections.
    pub fn from_simple(name: &str, rank: usize, simple_roots: &[Vec<i64>], simple_coroots: &[Vec<i64>]) -> Result<RootDatum> {
        if simple_roots.len() != simple_coroots.len() {
            return Err(Error::InvalidDatum("simple roots and coroots differ in number".into()));
        }
        let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let mut queue = VecDeque::new();
        for (a, c) in simple_roots.iter().zip(simple_coroots) {
            for s in [1, -1] {
                let a: Vec<i64> = a.iter().map(|x| s * x).collect();
                let c: Vec<i64> = c.iter().map(|x| s * x).collect();
                if !seen.contains_key(&a) {
                    seen.insert(a.clone(), c.clone());
                    queue.push_back((a, c));
                }
            }
        }
        while let Some((a, c)) = queue.pop_front() {
            for (sa, sc) in simple_roots.iter().zip(simple_coroots) {
                let b = reflect_character(&a, sa, sc);
                let bc = reflect_character(&c, sc, sa);
                if !seen.contains_key(&b) {
                    if seen.len() >= ROOT_CAP {
                        return Err(Error::InvalidDatum("root closure does not terminate".into()));
                    }
                    seen.insert(b.clone(), bc.clone());
                    queue.push_back((b, bc));
                }
            }
        }
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = seen.into_iter().collect();
        pairs.sort();
        let (roots, coroots): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let idx: HashMap<Vec<i64>, usize> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let simple = simple_roots.iter().map(|a| idx[a]).collect();
        Self::new(name, rank, roots, coroots, simple)
    }

    /// Validates and assembles a root datum from explicit lists.
    pub fn new(name: &str, rank: usize, roots: Vec<Vec<i64>>, coroots: Vec<Vec<i64>>, simple: Vec<usize>) -> Result<RootDatum> {
        if rank == 0 {
            return Err(Error::InvalidRank { family: name.to_string(), rank: 0 });
        }
        if roots.len() != coroots.len() {
            return Err(Error::InvalidDatum("roots and coroots differ in number".into()));
        }
        if roots.iter().chain(&coroots).any(|v| v.len() != rank) {
            return Err(Error::InvalidDatum("vector length differs from rank".into()));
        }
        if roots.iter().any(|r| r.iter().all(|&x| x == 0)) {
            return Err(Error::InvalidDatum("zero root".into()));
        }
        let mut index = HashMap::new();
        for (i, r) in roots.iter().enumerate() {
            if index.insert(r.clone(), i).is_some() {
                return Err(Error::InvalidDatum(format!("duplicate root {r:?}")));
            }
        }
        for (i, (a, c)) in roots.iter().zip(&coroots).enumerate() {
            if pairing(a, c) != 2 {
                return Err(Error::InvalidDatum(format!("<root {i}, coroot {i}> != 2")));
            }
        }
        let mut negative = Vec::with_capacity(roots.len());
        for (i, r) in roots.iter().enumerate() {
            let neg: Vec<i64> = r.iter().map(|x| -x).collect();
            match index.get(&neg) {
                Some(&j) if coroots[j].iter().zip(&coroots[i]).all(|(x, y)| *x == -*y) => negative.push(j),
                _ => return Err(Error::InvalidDatum(format!("root {i} has no matching negative"))),
            }
        }
        for (i, (a, c)) in roots.iter().zip(&coroots).enumerate() {
            for (b, bc) in roots.iter().zip(&coroots) {
                let img = reflect_character(b, a, c);
                let cimg = reflect_character(bc, c, a);
                match index.get(&img) {
                    Some(&j) if coroots[j] == cimg => {}
                    _ => return Err(Error::InvalidDatum(format!("reflection in root {i} does not permute the roots"))),
                }
            }
        }
        if simple.iter().any(|&s| s >= roots.len()) {
            return Err(Error::InvalidDatum("simple root index out of range".into()));
        }
        Ok(RootDatum { name: name.to_string(), rank, roots, coroots, simple, index, negative, family: None })
    }

    pub fn from_json(json: &RootDatumJson) -> Result<RootDatum> {
        let name = json.name.clone().unwrap_or_else(|| "custom".to_string());
        Self::new(&name, json.rank, json.roots.clone(), json.coroots.clone(), json.simple.clone())
    }

    pub fn from_json_str(s: &str) -> Result<RootDatum> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> RootDatumJson {
        RootDatumJson {
            rank: self.rank,
            roots: self.roots.clone(),
            coroots: self.coroots.clone(),
            simple: self.simple.clone(),
            name: Some(self.name.clone()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn simple(&self) -> &[usize] {
        &self.simple
    }

    pub fn root_index(&self, root: &[i64]) -> Option<usize> {
        self.index.get(root).copied()
    }

    pub fn negative(&self, i: usize) -> usize {
        self.negative[i]
    }

    /// Simple reflections acting on `X^*` (column vectors).
    pub fn weyl_generators(&self) -> Vec<IntMatrix> {
        self.simple.iter().map(|&s| self.reflection(s)).collect()
    }

    /// `s_α(χ) = χ - ⟨χ, α^∨⟩ α` as a matrix on `X^*`.
    pub fn reflection(&self, i: usize) -> IntMatrix {
        let n = self.rank;
        let (a, c) = (&self.roots[i], &self.coroots[i]);
        let mut m = IntMatrix::identity(n);
        for r in 0..n {
            for col in 0..n {
                m[(r, col)] -= a[r] * c[col];
            }
        }
        m
    }

    /// The permutation of root indices induced by a matrix on `X^*`, if any.
    pub fn root_permutation(&self, m: &IntMatrix) -> Option<Vec<usize>> {
        self.roots.iter().map(|r| self.root_index(&m.apply(r))).collect()
    }

    /// Whether a set of root indices is closed under negation, under sums that
    /// are roots, and under a root permutation.
    pub fn is_closed_subsystem(&self, subset: &[usize], perm: Option<&[usize]>) -> bool {
        let set: std::collections::HashSet<usize> = subset.iter().copied().collect();
        for &a in subset {
            if !set.contains(&self.negative[a]) {
                return false;
            }
            if let Some(p) = perm {
                if !set.contains(&p[a]) {
                    return false;
                }
            }
            for &b in subset {
                let s: Vec<i64> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
                if let Some(c) = self.root_index(&s) {
                    if !set.contains(&c) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_roots() {
        let d = RootDatum::builtin("GL(2)").unwrap();
        assert_eq!(d.rank(), 2);
        let mut roots = d.roots().to_vec();
        roots.sort();
        assert_eq!(roots, vec![vec![-1, 1], vec![1, -1]]);
    }

    #[test]
    fn gl4_roots_are_differences() {
        let d = RootDatum::builtin("GL(4)").unwrap();
        assert_eq!(d.num_roots(), 12);
        for r in d.roots() {
            assert_eq!(r.iter().sum::<i64>(), 0);
            assert_eq!(r.iter().filter(|&&x| x != 0).count(), 2);
        }
    }

    #[test]
    fn family_root_counts() {
        let cases = [("G2", 12), ("SL(3)", 6), ("Sp(4)", 8), ("SO(5)", 8), ("SO(6)", 12), ("SO(7)", 18), ("Sp(6)", 18), ("SO(8)", 24)];
        for (name, count) in cases {
            assert_eq!(RootDatum::builtin(name).unwrap().num_roots(), count, "{name}");
        }
    }

    #[test]
    fn family_errors() {
        assert!(matches!(Family::parse("E8"), Err(Error::UnknownFamily(_))));
        assert!(matches!(Family::parse("GL(0)"), Err(Error::InvalidRank { .. })));
        assert!(matches!(Family::parse("Sp(3)"), Err(Error::InvalidRank { .. })));
        assert_eq!(Family::parse("gl4").unwrap(), Family::GL(4));
        assert_eq!(Family::parse("SO(7)").unwrap(), Family::SOOdd(3));
    }

    #[test]
    fn json_round_trip() {
        let d = RootDatum::builtin("G2").unwrap();
        let text = serde_json::to_string(&d.to_json()).unwrap();
        let e = RootDatum::from_json_str(&text).unwrap();
        assert_eq!(e.roots(), d.roots());
        assert_eq!(e.coroots(), d.coroots());
    }

    #[test]
    fn json_rejects_bad_pairing() {
        let bad = r#"{"rank": 1, "roots": [[1], [-1]], "coroots": [[1], [-1]], "simple": [0]}"#;
        assert!(matches!(RootDatum::from_json_str(bad), Err(Error::InvalidDatum(_))));
    }
}
