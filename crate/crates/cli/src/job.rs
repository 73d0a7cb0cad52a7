use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vreglab::arith::is_prime_power;
use vreglab::finite_torus::RootSubset;
use vreglab::root_datum::{centralizer, ActingGroup, RootDatum, TwistSpec, WeylGroup, WeylTwist};
use vreglab::linalg::IntMatrix;

#[derive(Parser, Debug, Clone)]
#[command(name = "vreglab", version, about = "Finite invariants of unramified tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub job: JobArgs,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Order, cyclic factors, split rank and root orbits.
    TorusInfo,
    /// Density of the non-very-regular locus over twists and q.
    ScanStar,
    /// Howe jumps of a character given with --character.
    Howe,
    /// Values of the sign character on the very regular locus.
    Epsilon,
    /// Uniqueness of Weyl orbit sums on the very regular locus.
    Henniart,
    /// Predicted character values on the very regular locus.
    Predict,
    /// Run the acceptance criteria.
    Acceptance,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exhaustive,
    Random,
}

#[derive(clap::Args, Debug, Clone)]
pub struct JobArgs {
    /// Built-in root datum, e.g. GL(3), Sp(4), G2; repeatable.
    #[arg(long, global = true)]
    pub family: Vec<String>,
    /// Root datum from a JSON file instead of a built-in family.
    #[arg(long, global = true)]
    pub datum_json: Option<PathBuf>,
    /// coxeter, identity, w:1,2, perm:2,3,1, class:K or all; repeatable.
    #[arg(long, global = true)]
    pub twist: Vec<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub q: Vec<u64>,
    /// Inclusive range such as 2..13; non prime powers are skipped.
    #[arg(long, global = true)]
    pub q_range: Option<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub depth: Vec<usize>,
    /// full, empty, or a JSON file of roots.
    #[arg(long, global = true, default_value = "full")]
    pub subset: String,
    /// centralizer, or a JSON file with matrices or centralizer indices.
    #[arg(long, global = true, default_value = "centralizer")]
    pub group: String,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Enumeration cap; also read from VREGLAB_CAP.
    #[arg(long, global = true)]
    pub cap: Option<u128>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Ratio threshold for scan-star: a number or 2n (twice the rank).
    #[arg(long, global = true)]
    pub threshold: Option<String>,
    /// Character JSON file.
    #[arg(long, global = true)]
    pub character: Option<PathBuf>,
    /// Building point: hyperspecial, coxeter, or a JSON file.
    #[arg(long, global = true, default_value = "hyperspecial")]
    pub point: String,
}

/// One parameter cell of a scan.
#[derive(Clone, Debug)]
pub struct Cell {
    pub family: String,
    pub datum: RootDatum,
    pub twist: WeylTwist,
    pub q: u64,
    pub depth: usize,
}

impl JobArgs {
    pub fn validate(&self) -> Result<()> {
        if self.cap == Some(0) {
            bail!("--cap must be positive");
        }
        if self.jobs == Some(0) {
            bail!("--jobs must be positive");
        }
        for &q in &self.q {
            if !is_prime_power(q) {
                bail!("q = {q} is not a prime power");
            }
        }
        Ok(())
    }

    pub fn datums(&self) -> Result<Vec<(String, RootDatum)>> {
        if let Some(path) = &self.datum_json {
            let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let d = RootDatum::from_json_str(&s)?;
            return Ok(vec![(d.name().to_string(), d)]);
        }
        let names = if self.family.is_empty() { vec!["GL(2)".to_string()] } else { self.family.clone() };
        names
            .iter()
            .flat_map(|n| expand_family(n))
            .map(|n| Ok((n.clone(), RootDatum::builtin(&n)?)))
            .collect()
    }

    pub fn twists(&self, datum: &RootDatum) -> Result<Vec<WeylTwist>> {
        let specs = if self.twist.is_empty() { vec!["coxeter".to_string()] } else { self.twist.clone() };
        let mut out = Vec::new();
        for s in specs {
            if s == "all" {
                let weyl = WeylGroup::new(datum)?;
                for k in 0..weyl.conjugacy_classes().len() {
                    out.push(WeylTwist::from_class(datum, &weyl, k)?);
                }
            } else {
                out.push(TwistSpec::parse(&s)?.resolve(datum)?);
            }
        }
        Ok(out)
    }

    pub fn qs(&self) -> Result<Vec<u64>> {
        let mut qs = self.q.clone();
        if let Some(r) = &self.q_range {
            let (a, b) = r.split_once("..").or_else(|| r.split_once('-')).ok_or_else(|| anyhow!("bad --q-range {r}"))?;
            let a: u64 = a.trim().parse()?;
            let b: u64 = b.trim().trim_start_matches('=').parse()?;
            qs.extend((a..=b).filter(|&q| is_prime_power(q)));
        }
        if qs.is_empty() {
            qs.push(3);
        }
        qs.sort_unstable();
        qs.dedup();
        Ok(qs)
    }

    pub fn depths(&self) -> Vec<usize> {
        if self.depth.is_empty() {
            vec![1]
        } else {
            self.depth.clone()
        }
    }

    /// Every (datum, twist, q, depth) cell, in key order.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut cells = Vec::new();
        for (family, datum) in self.datums()? {
            for twist in self.twists(&datum)? {
                for &q in &self.qs()? {
                    for &depth in &self.depths() {
                        cells.push(Cell { family: family.clone(), datum: datum.clone(), twist: twist.clone(), q, depth });
                    }
                }
            }
        }
        cells.sort_by(|a, b| (&a.family, a.twist.label(), a.q, a.depth).cmp(&(&b.family, b.twist.label(), b.q, b.depth)));
        Ok(cells)
    }

    pub fn subset(&self, datum: &RootDatum) -> Result<RootSubset> {
        Ok(match self.subset.as_str() {
            "full" => RootSubset::Full,
            "empty" => RootSubset::Empty,
            path => RootSubset::from_json_str(datum, &std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?)?,
        })
    }

    pub fn acting_group(&self, datum: &RootDatum, twist: &WeylTwist) -> Result<ActingGroup> {
        let weyl = WeylGroup::new(datum)?;
        let c = centralizer(&weyl, twist.matrix());
        if self.group == "centralizer" {
            return Ok(c);
        }
        let s = std::fs::read_to_string(&self.group).with_context(|| format!("reading {}", self.group))?;
        if let Ok(indices) = serde_json::from_str::<Vec<usize>>(&s) {
            return Ok(c.subgroup(&indices)?);
        }
        let mats: Vec<Vec<Vec<i64>>> = serde_json::from_str(&s).context("group JSON must be indices or matrices")?;
        let mats = mats.iter().map(|m| IntMatrix::from_rows(m)).collect::<Vec<_>>();
        for m in &mats {
            if !c.elements().contains(m) {
                bail!("group element does not centralize the twist in W");
            }
        }
        Ok(ActingGroup::new(mats)?)
    }

    pub fn threshold(&self, rank: usize) -> Result<Option<u64>> {
        match self.threshold.as_deref() {
            None => Ok(None),
            Some("2n") => Ok(Some(2 * rank as u64)),
            Some(t) => Ok(Some(t.parse().with_context(|| format!("bad --threshold {t}"))?)),
        }
    }
}

/// `GL(2..8)` expands to `GL(2)`, …, `GL(8)`.
fn expand_family(name: &str) -> Vec<String> {
    if let Some((head, rest)) = name.split_once('(') {
        if let Some((a, b)) = rest.trim_end_matches(')').split_once("..") {
            if let (Ok(a), Ok(b)) = (a.parse::<usize>(), b.parse::<usize>()) {
                return (a..=b).map(|n| format!("{head}({n})")).collect();
            }
        }
    }
    vec![name.to_string()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_ranges_expand() {
        assert_eq!(expand_family("GL(2..4)"), vec!["GL(2)", "GL(3)", "GL(4)"]);
        assert_eq!(expand_family("G2"), vec!["G2"]);
    }

    #[test]
    fn q_range_skips_non_prime_powers() {
        let cli = Cli::parse_from(["vreglab", "scan-star", "--q-range", "2..13"]);
        assert_eq!(cli.job.qs().unwrap(), vec![2, 3, 4, 5, 7, 8, 9, 11, 13]);
    }

    #[test]
    fn rejects_bad_q() {
        let cli = Cli::parse_from(["vreglab", "torus-info", "--q", "6"]);
        assert!(cli.job.validate().is_err());
    }
}
