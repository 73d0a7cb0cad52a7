use std::collections::{HashMap, VecDeque};

use super::RootDatum;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Hard cap on enumerated Weyl group elements.
pub const WEYL_CAP: usize = 1_000_000;

/// The Weyl group as an explicit set of matrices on `X^*`.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<IntMatrix>,
    index: HashMap<IntMatrix, usize>,
    inverse: Vec<usize>,
    words: Vec<Vec<usize>>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl WeylGroup {
    pub fn new(datum: &RootDatum) -> Result<WeylGroup> {
        Self::with_cap(datum, WEYL_CAP)
    }

    /// Closure of the simple reflections, breadth first from the identity.
    pub fn with_cap(datum: &RootDatum, cap: usize) -> Result<WeylGroup> {
        let gens = datum.weyl_generators();
        let id = IntMatrix::identity(datum.rank());
        let mut elements = vec![id.clone()];
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for (s, gen) in gens.iter().enumerate() {
                let h = elements[g].mul(gen);
                if index.contains_key(&h) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::WeylTooLarge(cap));
                }
                let k = elements.len();
                index.insert(h.clone(), k);
                let mut w = words[g].clone();
                w.push(s);
                words.push(w);
                parent.push(Some((g, s)));
                elements.push(h);
                queue.push_back(k);
            }
        }
        // (g s)^{-1} = s g^{-1}, resolved in breadth-first order
        let mut inverse = vec![0usize; elements.len()];
        for k in 1..elements.len() {
            let (g, s) = parent[k].expect("non-identity element has a parent");
            let m = gens[s].mul(&elements[inverse[g]]);
            inverse[k] = index[&m];
        }
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut classes = Vec::new();
        for start in 0..elements.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = vec![start];
            class_of[start] = c;
            let mut q = VecDeque::from([start]);
            while let Some(x) = q.pop_front() {
                for gen in &gens {
                    let y = index[&gen.mul(&elements[x]).mul(gen)];
                    if class_of[y] == usize::MAX {
                        class_of[y] = c;
                        members.push(y);
                        q.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        Ok(WeylGroup { elements, index, inverse, words, classes, class_of })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &IntMatrix {
        &self.elements[i]
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.index.contains_key(m)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.elements[b])]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// A word in the simple reflections (0-based) representing element `i`.
    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    /// Conjugacy classes, ordered by their first element in enumeration order.
    pub fn conjugacy_classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }
}

/// A finite group of matrices on `X^*`, identity first.
#[derive(Clone, Debug)]
pub struct ActingGroup {
    elements: Vec<IntMatrix>,
}

impl ActingGroup {
    /// Validates closure under products and that the identity is present.
    pub fn new(mut elements: Vec<IntMatrix>) -> Result<ActingGroup> {
        let n = elements.first().map(IntMatrix::rows).ok_or_else(|| Error::InvalidGroup("empty group".into()))?;
        let id = IntMatrix::identity(n);
        let pos = elements.iter().position(|m| *m == id).ok_or_else(|| Error::InvalidGroup("identity missing".into()))?;
        elements.swap(0, pos);
        let set: std::collections::HashSet<&IntMatrix> = elements.iter().collect();
        if set.len() != elements.len() {
            return Err(Error::InvalidGroup("repeated element".into()));
        }
        for a in &elements {
            for b in &elements {
                if !set.contains(&a.mul(b)) {
                    return Err(Error::InvalidGroup("not closed under multiplication".into()));
                }
            }
        }
        Ok(ActingGroup { elements })
    }

    pub fn trivial(rank: usize) -> ActingGroup {
        ActingGroup { elements: vec![IntMatrix::identity(rank)] }
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Keeps the members of `self` selected by `indices`; must form a subgroup.
    pub fn subgroup(&self, indices: &[usize]) -> Result<ActingGroup> {
        let picked = indices
            .iter()
            .map(|&i| self.elements.get(i).cloned().ok_or_else(|| Error::InvalidGroup(format!("index {i} out of range"))))
            .collect::<Result<Vec<_>>>()?;
        ActingGroup::new(picked)
    }
}

/// `{v ∈ W : v w = w v}` for a twist matrix `w` on `X^*`. The twist need not
/// lie in `W`; the centralizer is always taken inside `W`.
pub fn centralizer(weyl: &WeylGroup, twist: &IntMatrix) -> ActingGroup {
    let elements = weyl.elements().iter().filter(|v| v.mul(twist) == twist.mul(v)).cloned().collect();
    ActingGroup { elements }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        for (name, order) in [("GL(2)", 2), ("GL(4)", 24), ("G2", 12), ("Sp(4)", 8), ("SO(7)", 48), ("SO(8)", 192)] {
            let d = RootDatum::builtin(name).unwrap();
            assert_eq!(WeylGroup::new(&d).unwrap().order(), order, "{name}");
        }
    }

    #[test]
    fn g2_classes() {
        let w = WeylGroup::new(&RootDatum::builtin("G2").unwrap()).unwrap();
        assert_eq!(w.conjugacy_classes().len(), 6);
        assert_eq!(w.conjugacy_classes()[0], vec![0]);
    }

    #[test]
    fn s4_classes_and_inverses() {
        let w = WeylGroup::new(&RootDatum::builtin("GL(4)").unwrap()).unwrap();
        assert_eq!(w.conjugacy_classes().len(), 5);
        for i in 0..w.order() {
            assert_eq!(w.mul(i, w.inverse(i)), 0);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let d = RootDatum::builtin("GL(6)").unwrap();
        assert!(matches!(WeylGroup::with_cap(&d, 100), Err(Error::WeylTooLarge(100))));
    }

    #[test]
    fn acting_group_validation() {
        let d = RootDatum::builtin("GL(3)").unwrap();
        let s = d.reflection(d.simple()[0]);
        assert!(ActingGroup::new(vec![IntMatrix::identity(3), s.clone()]).is_ok());
        let t = d.reflection(d.simple()[1]);
        assert!(matches!(ActingGroup::new(vec![IntMatrix::identity(3), s, t]), Err(Error::InvalidGroup(_))));
    }
}
