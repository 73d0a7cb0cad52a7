use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use vreglab::character_lab::{howe_jumps, FilteredCharacter, HoweData, LevelSpace};
use vreglab::finite_torus::TwistedTorus;
use vreglab::orbit_sums::{henniart_test, predicted_table, FiniteModel, HenniartMode, HenniartReport};
use vreglab::signs::{epsilon_ram_at, epsilon_ram_character, gl, BuildingPoint};

use crate::acceptance;
use crate::job::{Cell, Cli, Command, Format, JobArgs, Mode};
use crate::output::{join, render};

/// Rendered output plus whether the run falsified anything.
#[derive(Debug, Default)]
pub struct Outcome {
    pub output: Vec<u8>,
    pub failed: bool,
    pub messages: Vec<String>,
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let job = &cli.job;
    job.validate()?;
    if let Some(cap) = job.cap {
        std::env::set_var("VREGLAB_CAP", cap.to_string());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = job.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build()?;
    pool.install(|| match cli.command {
        Command::TorusInfo => torus_info(job),
        Command::ScanStar => scan_star(job),
        Command::Howe => howe(job),
        Command::Epsilon => epsilon(job),
        Command::Henniart => henniart(job),
        Command::Predict => predict(job),
        Command::Acceptance => run_acceptance(),
    })
}

fn torus(cell: &Cell) -> vreglab::Result<TwistedTorus> {
    TwistedTorus::new(cell.datum.clone(), cell.twist.clone(), cell.q)
}

fn first_cell(job: &JobArgs) -> Result<Cell> {
    job.cells()?.into_iter().next().ok_or_else(|| anyhow!("no parameter cell"))
}

fn read_character(job: &JobArgs, t: &TwistedTorus, space: &LevelSpace) -> Result<FilteredCharacter> {
    let path = job.character.as_ref().ok_or_else(|| anyhow!("--character is required"))?;
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FilteredCharacter::from_json_str(t, space, &s)?)
}

fn read_point(job: &JobArgs, t: &TwistedTorus) -> Result<BuildingPoint> {
    match BuildingPoint::preset(t, &job.point) {
        Ok(x) => Ok(x),
        Err(_) => {
            let s = std::fs::read_to_string(&job.point).with_context(|| format!("reading point {}", job.point))?;
            Ok(BuildingPoint::from_json_str(t, &s)?)
        }
    }
}

#[derive(Serialize)]
struct TorusInfoRow {
    family: String,
    twist: String,
    q: u64,
    order: String,
    factors: String,
    split_rank: String,
    orbits: String,
    asymmetric_pairs: String,
    symmetric_unramified: String,
    symmetric_ramified: String,
    error: String,
}

fn torus_info(job: &JobArgs) -> Result<Outcome> {
    let mut cells = job.cells()?;
    cells.dedup_by(|a, b| a.family == b.family && a.twist.label() == b.twist.label() && a.q == b.q);
    let rows: Vec<TorusInfoRow> = cells
        .par_iter()
        .map(|c| {
            let mut row = TorusInfoRow {
                family: c.family.clone(),
                twist: c.twist.label().to_string(),
                q: c.q,
                order: String::new(),
                factors: String::new(),
                split_rank: String::new(),
                orbits: String::new(),
                asymmetric_pairs: String::new(),
                symmetric_unramified: String::new(),
                symmetric_ramified: String::new(),
                error: String::new(),
            };
            match torus(c) {
                Ok(t) => {
                    let counts = t.orbit_report().counts();
                    row.order = t.order().to_string();
                    row.factors = join(t.factors());
                    row.split_rank = t.split_rank().to_string();
                    row.orbits = counts.orbits.to_string();
                    row.asymmetric_pairs = counts.asymmetric_pairs.to_string();
                    row.symmetric_unramified = counts.symmetric_unramified.to_string();
                    row.symmetric_ramified = counts.symmetric_ramified.to_string();
                }
                Err(e) => row.error = e.to_string(),
            }
            row
        })
        .collect();
    let failed = rows.iter().any(|r| !r.error.is_empty());
    Ok(Outcome { output: render(&rows, job.format)?, failed, messages: Vec::new() })
}

#[derive(Serialize, Clone)]
pub struct StarRow {
    pub family: String,
    pub twist: String,
    pub q: u64,
    pub total: String,
    pub nvreg: String,
    pub ratio_num: String,
    pub ratio_den: String,
    pub star: String,
    pub threshold: String,
    pub exceeds_threshold: String,
    pub min_passing_q: String,
    pub error: String,
}

pub fn scan_star_rows(job: &JobArgs) -> Result<Vec<StarRow>> {
    let mut cells = job.cells()?;
    cells.dedup_by(|a, b| a.family == b.family && a.twist.label() == b.twist.label() && a.q == b.q);
    let mut rows: Vec<StarRow> = cells
        .par_iter()
        .map(|c| -> Result<StarRow> {
            let threshold = job.threshold(c.datum.rank())?;
            let mut row = StarRow {
                family: c.family.clone(),
                twist: c.twist.label().to_string(),
                q: c.q,
                total: String::new(),
                nvreg: String::new(),
                ratio_num: String::new(),
                ratio_den: String::new(),
                star: String::new(),
                threshold: threshold.map(|t| t.to_string()).unwrap_or_default(),
                exceeds_threshold: String::new(),
                min_passing_q: String::new(),
                error: String::new(),
            };
            let report = torus(c).and_then(|t| {
                let subset = job.subset(&c.datum).map_err(|e| vreglab::Error::Structural(e.to_string()))?;
                t.density_report(&subset)
            });
            match report {
                Ok(d) => {
                    row.total = d.total.to_string();
                    row.nvreg = d.nvreg.to_string();
                    row.ratio_num = d.ratio_num.to_string();
                    row.ratio_den = d.ratio_den.to_string();
                    row.star = d.star_holds.to_string();
                    if let Some(t) = threshold {
                        row.exceeds_threshold = d.exceeds(t).to_string();
                    }
                }
                Err(e) => row.error = e.to_string(),
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut min_q: BTreeMap<(String, String), u64> = BTreeMap::new();
    for r in &rows {
        if r.star == "true" {
            let e = min_q.entry((r.family.clone(), r.twist.clone())).or_insert(r.q);
            *e = (*e).min(r.q);
        }
    }
    for r in &mut rows {
        if let Some(q) = min_q.get(&(r.family.clone(), r.twist.clone())) {
            r.min_passing_q = q.to_string();
        }
    }
    Ok(rows)
}

fn scan_star(job: &JobArgs) -> Result<Outcome> {
    let rows = scan_star_rows(job)?;
    Ok(Outcome { output: render(&rows, job.format)?, failed: false, messages: Vec::new() })
}

#[derive(Serialize)]
struct HoweOut {
    depth: usize,
    jumps: Vec<usize>,
    subsystems: Vec<Vec<usize>>,
    r_zero_plus: Vec<usize>,
    levi_signature: Option<Vec<usize>>,
    toral: bool,
    zero_toral: bool,
}

#[derive(Serialize)]
struct HoweRow {
    depth: usize,
    jumps: String,
    levi_signature: String,
    r_zero_plus: String,
    toral: bool,
    zero_toral: bool,
}

fn howe(job: &JobArgs) -> Result<Outcome> {
    let cell = first_cell(job)?;
    let t = torus(&cell)?;
    let space = LevelSpace::new(&t)?;
    let theta = read_character(job, &t, &space)?;
    let h: HoweData = howe_jumps(&t, &space, &theta)?;
    let output = match job.format {
        Format::Json => {
            let out = HoweOut {
                toral: h.is_toral(),
                zero_toral: h.is_zero_toral(),
                depth: h.depth,
                jumps: h.jumps,
                subsystems: h.subsystems,
                r_zero_plus: h.r_zero_plus,
                levi_signature: h.levi_signature,
            };
            let mut v = serde_json::to_vec_pretty(&out)?;
            v.push(b'\n');
            v
        }
        Format::Csv => render(
            &[HoweRow {
                depth: h.depth,
                jumps: join(&h.jumps),
                levi_signature: h.levi_signature.as_deref().map(join).unwrap_or_default(),
                r_zero_plus: join(&h.r_zero_plus),
                toral: h.is_toral(),
                zero_toral: h.is_zero_toral(),
            }],
            Format::Csv,
        )?,
    };
    Ok(Outcome { output, failed: false, messages: Vec::new() })
}

#[derive(Serialize)]
struct EpsilonRow {
    coords: String,
    exponents: String,
    epsilon: i8,
    character: i8,
    floor_form: String,
    parity_form: String,
}

fn epsilon(job: &JobArgs) -> Result<Outcome> {
    let cell = first_cell(job)?;
    let t = torus(&cell)?;
    let space = LevelSpace::new(&t)?;
    let theta = read_character(job, &t, &space)?;
    let x = read_point(job, &t)?;
    let h = howe_jumps(&t, &space, &theta)?;
    let chi = epsilon_ram_character(&t, &h, &x)?;
    let closed = match (&h.levi_signature, t.factors().len()) {
        (Some(sig), 1) => Some((gl::epsilon_floor_form(sig, &h.jumps), gl::epsilon_parity_form(sig, &h.jumps))),
        _ => None,
    };
    let test = t.subset(&vreglab::finite_torus::RootSubset::Full)?;
    let mut rows = Vec::new();
    let mut failed = false;
    for g in t.all_coords()? {
        if !t.is_vreg(&test, &g) {
            continue;
        }
        let e = epsilon_ram_at(&t, &h, &x, &g)?;
        let c = chi.value(&g);
        failed |= e != c;
        let power = |s: i8| if s < 0 && g[0] % 2 == 1 { -1 } else { 1 };
        rows.push(EpsilonRow {
            exponents: join(&t.exponents(&g)),
            coords: join(&g),
            epsilon: e,
            character: c,
            floor_form: closed.map(|(f, _)| power(f).to_string()).unwrap_or_default(),
            parity_form: closed.map(|(_, p)| power(p).to_string()).unwrap_or_default(),
        });
    }
    Ok(Outcome { output: render(&rows, job.format)?, failed, messages: Vec::new() })
}

#[derive(Serialize)]
struct HenniartRow {
    family: String,
    twist: String,
    q: u64,
    depth: usize,
    characters: String,
    admissible: String,
    pairs_tested: String,
    equalities: String,
    counterexamples: String,
    degenerate: String,
    error: String,
}

#[derive(Serialize)]
struct HenniartJson {
    family: String,
    twist: String,
    q: u64,
    depth: usize,
    report: Option<HenniartReport>,
    error: Option<String>,
}

fn henniart(job: &JobArgs) -> Result<Outcome> {
    let cells = job.cells()?;
    let mode = match job.mode {
        Mode::Exhaustive => HenniartMode::Exhaustive,
        Mode::Random => HenniartMode::Random { trials: job.trials, seed: job.seed },
    };
    let results: Vec<(Cell, Result<HenniartReport>)> = cells
        .par_iter()
        .map(|c| {
            let r = (|| -> Result<HenniartReport> {
                let t = torus(c)?;
                let space = LevelSpace::new(&t)?;
                let group = job.acting_group(&c.datum, &c.twist)?;
                let model = FiniteModel::new(t, space, group, c.depth)?;
                Ok(henniart_test(&model, mode)?)
            })();
            (c.clone(), r)
        })
        .collect();
    let failed = results.iter().any(|(_, r)| r.as_ref().map_or(true, |r| !r.counterexamples.is_empty() || !r.degenerate.is_empty()));
    let output = match job.format {
        Format::Json => {
            let out: Vec<HenniartJson> = results
                .into_iter()
                .map(|(c, r)| HenniartJson {
                    family: c.family,
                    twist: c.twist.label().to_string(),
                    q: c.q,
                    depth: c.depth,
                    error: r.as_ref().err().map(|e| e.to_string()),
                    report: r.ok(),
                })
                .collect();
            render(&out, Format::Json)?
        }
        Format::Csv => {
            let rows: Vec<HenniartRow> = results
                .into_iter()
                .map(|(c, r)| {
                    let s = |f: &dyn Fn(&HenniartReport) -> String| r.as_ref().map(f).unwrap_or_default();
                    HenniartRow {
                        family: c.family.clone(),
                        twist: c.twist.label().to_string(),
                        q: c.q,
                        depth: c.depth,
                        characters: s(&|r| r.characters.to_string()),
                        admissible: s(&|r| r.admissible.to_string()),
                        pairs_tested: s(&|r| r.pairs_tested.to_string()),
                        equalities: s(&|r| r.equalities.to_string()),
                        counterexamples: s(&|r| r.counterexamples.len().to_string()),
                        degenerate: s(&|r| r.degenerate.len().to_string()),
                        error: r.as_ref().err().map(|e| e.to_string()).unwrap_or_default(),
                    }
                })
                .collect();
            render(&rows, Format::Csv)?
        }
    };
    Ok(Outcome { output, failed, messages: Vec::new() })
}

#[derive(Serialize)]
struct PredictRow {
    coords: String,
    exponents: String,
    sign: i8,
    root_order: u64,
    value: String,
}

fn predict(job: &JobArgs) -> Result<Outcome> {
    let cell = first_cell(job)?;
    let t = torus(&cell)?;
    let space = LevelSpace::new(&t)?;
    let theta = read_character(job, &t, &space)?;
    let x = read_point(job, &t)?;
    let group = job.acting_group(&cell.datum, &cell.twist)?;
    let model = FiniteModel::new(t, space, group, theta.depth)?;
    let table = predicted_table(&model, &theta, &x)?;
    let mut messages = Vec::new();
    if !table.star_holds {
        messages.push("warning: the density inequality fails for this torus".to_string());
    }
    let output = match job.format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&table)?;
            v.push(b'\n');
            v
        }
        Format::Csv => {
            let rows: Vec<PredictRow> = table
                .rows
                .iter()
                .map(|r| PredictRow {
                    coords: join(&r.coords),
                    exponents: join(&r.exponents),
                    sign: table.sign,
                    root_order: model.root_order(),
                    value: r.value.to_term_string(),
                })
                .collect();
            render(&rows, Format::Csv)?
        }
    };
    Ok(Outcome { output, failed: false, messages })
}

fn run_acceptance() -> Result<Outcome> {
    let results = acceptance::run_all();
    let mut out = String::new();
    for r in &results {
        out.push_str(&r.line());
        out.push('\n');
    }
    if results.is_empty() {
        bail!("no criteria ran");
    }
    Ok(Outcome { output: out.into_bytes(), failed: results.iter().any(|r| !r.passed), messages: Vec::new() })
}
