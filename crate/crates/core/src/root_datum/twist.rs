use serde::{Deserialize, Serialize};

use super::{Family, RootDatum, WeylGroup};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

const ORDER_BOUND: usize = 100_000;

/// A finite-order automorphism of `X^*` permuting the roots; the Frobenius
/// acts on characters as `q` times this matrix.
#[derive(Clone, Debug)]
pub struct WeylTwist {
    matrix: IntMatrix,
    cochar: IntMatrix,
    order: usize,
    root_perm: Vec<usize>,
    label: String,
    word: Option<Vec<usize>>,
}

impl WeylTwist {
    pub fn from_matrix(datum: &RootDatum, matrix: IntMatrix, label: &str) -> Result<WeylTwist> {
        if matrix.rows() != datum.rank() || matrix.cols() != datum.rank() {
            return Err(Error::InvalidTwist(format!("matrix is not {0}x{0}", datum.rank())));
        }
        let det = matrix.det();
        // transport to cocharacters: ⟨Mχ, M_* λ⟩ = ⟨χ, λ⟩
        let cochar = matrix.inverse_unimodular().ok_or(Error::NotTransportable(det))?.transpose();
        let order = matrix.order(ORDER_BOUND).ok_or_else(|| Error::InvalidTwist("matrix has infinite order".into()))?;
        let root_perm = datum
            .root_permutation(&matrix)
            .ok_or_else(|| Error::InvalidTwist("matrix does not permute the roots".into()))?;
        for (i, &j) in root_perm.iter().enumerate() {
            if cochar.apply(&datum.coroots()[i]) != datum.coroots()[j] {
                return Err(Error::InvalidTwist("matrix does not permute the coroots compatibly".into()));
            }
        }
        Ok(WeylTwist { matrix, cochar, order, root_perm, label: label.to_string(), word: None })
    }

    pub fn identity(datum: &RootDatum) -> WeylTwist {
        Self::from_matrix(datum, IntMatrix::identity(datum.rank()), "identity").expect("identity is a twist")
    }

    /// Product of simple reflections `s_{w_0} s_{w_1} …`, indices 0-based.
    pub fn from_word(datum: &RootDatum, word: &[usize]) -> Result<WeylTwist> {
        let gens = datum.weyl_generators();
        let mut m = IntMatrix::identity(datum.rank());
        for &s in word {
            let g = gens.get(s).ok_or_else(|| Error::InvalidTwist(format!("no simple reflection {}", s + 1)))?;
            m = m.mul(g);
        }
        let label = if word.is_empty() {
            "identity".to_string()
        } else {
            format!("w:{}", word.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(","))
        };
        let mut t = Self::from_matrix(datum, m, &label)?;
        t.word = Some(word.to_vec());
        Ok(t)
    }

    /// The product of all simple reflections in their stored order.
    pub fn coxeter(datum: &RootDatum) -> Result<WeylTwist> {
        let word: Vec<usize> = (0..datum.simple().len()).collect();
        let mut t = Self::from_word(datum, &word)?;
        t.label = "coxeter".to_string();
        Ok(t)
    }

    /// Permutation `i ↦ perm[i]` of the coordinates (0-based); `GL(n)` only.
    pub fn from_permutation(datum: &RootDatum, perm: &[usize]) -> Result<WeylTwist> {
        let n = datum.rank();
        if !matches!(datum.family(), Some(Family::GL(_))) {
            return Err(Error::InvalidTwist("permutation twists need a GL(n) datum".into()));
        }
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::InvalidTwist(format!("{perm:?} is not a permutation of {n} points")));
        }
        let mut m = IntMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m[(j, i)] = 1;
        }
        let label = format!("perm:{}", perm.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(","));
        Self::from_matrix(datum, m, &label)
    }

    /// Representative (first enumerated element) of conjugacy class `k`.
    pub fn from_class(datum: &RootDatum, weyl: &WeylGroup, k: usize) -> Result<WeylTwist> {
        let class = weyl
            .conjugacy_classes()
            .get(k)
            .ok_or_else(|| Error::InvalidTwist(format!("class {k} out of range ({} classes)", weyl.conjugacy_classes().len())))?;
        let rep = class[0];
        let mut t = Self::from_matrix(datum, weyl.element(rep).clone(), &format!("class:{k}"))?;
        t.word = Some(weyl.word(rep).to_vec());
        Ok(t)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// The induced action on `X_*`.
    pub fn cocharacter_matrix(&self) -> &IntMatrix {
        &self.cochar
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn root_permutation(&self) -> &[usize] {
        &self.root_perm
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn word(&self) -> Option<&[usize]> {
        self.word.as_deref()
    }

    /// `v w v^{-1}` for `v` in `W`.
    pub fn conjugate(&self, datum: &RootDatum, v: &IntMatrix) -> Result<WeylTwist> {
        let vinv = v.inverse_unimodular().ok_or(Error::NotTransportable(v.det()))?;
        Self::from_matrix(datum, v.mul(&self.matrix).mul(&vinv), &format!("{}^v", self.label))
    }
}

/// Textual twist specifications accepted by the front end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistSpec {
    Identity,
    Coxeter,
    /// 1-based simple reflection indices.
    Word(Vec<usize>),
    /// 1-based one-line permutation.
    Perm(Vec<usize>),
    /// 0-based conjugacy class index.
    Class(usize),
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&x| x >= 1)
                .ok_or_else(|| Error::InvalidTwist(format!("bad index `{t}`")))
        })
        .collect()
}

impl TwistSpec {
    /// `coxeter`, `identity` (or `id`, `split`), `w:1,2,1`, `perm:2,3,1`, `class:K`.
    pub fn parse(s: &str) -> Result<TwistSpec> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "coxeter" => return Ok(TwistSpec::Coxeter),
            "identity" | "id" | "split" => return Ok(TwistSpec::Identity),
            _ => {}
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| Error::InvalidTwist(format!("cannot parse `{s}`")))?;
        match kind.trim() {
            "w" | "word" => Ok(TwistSpec::Word(parse_list(rest)?)),
            "perm" | "p" => Ok(TwistSpec::Perm(parse_list(rest)?)),
            "class" | "c" => rest
                .trim()
                .parse()
                .map(TwistSpec::Class)
                .map_err(|_| Error::InvalidTwist(format!("bad class index `{rest}`"))),
            _ => Err(Error::InvalidTwist(format!("unknown twist kind `{kind}`"))),
        }
    }

    pub fn resolve(&self, datum: &RootDatum) -> Result<WeylTwist> {
        match self {
            TwistSpec::Identity => Ok(WeylTwist::identity(datum)),
            TwistSpec::Coxeter => WeylTwist::coxeter(datum),
            TwistSpec::Word(w) => WeylTwist::from_word(datum, &w.iter().map(|s| s - 1).collect::<Vec<_>>()),
            TwistSpec::Perm(p) => WeylTwist::from_permutation(datum, &p.iter().map(|j| j - 1).collect::<Vec<_>>()),
            TwistSpec::Class(k) => WeylTwist::from_class(datum, &WeylGroup::new(datum)?, *k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_coxeter_is_an_n_cycle() {
        for n in 2..=6 {
            let d = RootDatum::builtin(&format!("GL({n})")).unwrap();
            let w = WeylTwist::coxeter(&d).unwrap();
            assert_eq!(w.order(), n);
            assert_eq!(w.matrix().det().abs(), 1);
        }
    }

    #[test]
    fn g2_coxeter_has_order_six() {
        let d = RootDatum::builtin("G2").unwrap();
        assert_eq!(WeylTwist::coxeter(&d).unwrap().order(), 6);
    }

    #[test]
    fn permutation_and_word_agree() {
        let d = RootDatum::builtin("GL(3)").unwrap();
        let a = WeylTwist::from_word(&d, &[0]).unwrap();
        let b = WeylTwist::from_permutation(&d, &[1, 0, 2]).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn cocharacter_action_preserves_pairing() {
        let d = RootDatum::builtin("G2").unwrap();
        let w = WeylTwist::coxeter(&d).unwrap();
        for (a, c) in d.roots().iter().zip(d.coroots()) {
            let wa = w.matrix().apply(a);
            let wc = w.cocharacter_matrix().apply(c);
            assert_eq!(super::super::pairing(&wa, &wc), 2);
        }
    }

    #[test]
    fn twist_string_parsing() {
        assert_eq!(TwistSpec::parse("coxeter").unwrap(), TwistSpec::Coxeter);
        assert_eq!(TwistSpec::parse("w:1,2,1").unwrap(), TwistSpec::Word(vec![1, 2, 1]));
        assert_eq!(TwistSpec::parse("perm:2,3,1").unwrap(), TwistSpec::Perm(vec![2, 3, 1]));
        assert_eq!(TwistSpec::parse("class:3").unwrap(), TwistSpec::Class(3));
        assert!(TwistSpec::parse("w:0").is_err());
        assert!(TwistSpec::parse("banana").is_err());
    }

    #[test]
    fn non_root_permuting_matrix_rejected() {
        let d = RootDatum::builtin("GL(2)").unwrap();
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert!(WeylTwist::from_matrix(&d, m, "shear").is_err());
    }
}
