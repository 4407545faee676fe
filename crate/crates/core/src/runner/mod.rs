//! Configuration-driven sweeps over family parameters and rewiring radii.

mod config;
mod report;

use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{ExperimentConfig, FamilySpec};
pub use report::{ratio_string, write_csv, write_json, ReportRow, COLUMNS};

use crate::error::{Error, Result};
use crate::farber::gamma_sum;
use crate::group::{FamilyTag, GroupInstance};
use crate::groupoid::{abelian_rank_lower_bound, correction_set, label_rewiring, rank_upper_bound};
use crate::homology::{
    abelianized_matrix, ln_big, rewired_complex, schreier_presentation, smith_normal_form,
    within_hadamard, SnfResult,
};
use crate::rewire::{build_rewiring, Distortion};
use crate::schreier::build_schreier;

#[derive(Clone, Debug)]
struct Task {
    family: usize,
    tag: FamilyTag,
    group: GroupInstance,
    size: u64,
    r: usize,
}

/// Torsion audit of one row: `ln trs / N` against the bound carried by the
/// rewired presentation, `(m / N) ln(4 b d_L^4)` with `m` its generator
/// count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionAudit {
    pub params: String,
    #[serde(rename = "R")]
    pub r: usize,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug)]
struct CellData {
    density: BigRational,
    dl: u64,
    degenerate: bool,
    audit: Option<TorsionAudit>,
}

#[derive(Clone, Debug)]
struct CellOutcome {
    row: ReportRow,
    data: Option<CellData>,
    invariant_failed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusSummary {
    #[serde(rename = "R")]
    pub r: usize,
    pub rows: usize,
    pub non_degenerate_rows: usize,
    /// Largest density over the non-degenerate rows.
    pub limsup_density: Option<String>,
    pub limsup_density_decimal: Option<f64>,
    /// Largest measured distortion over the same rows.
    pub d_r: Option<u64>,
    /// `(limsup density - 1) * ln d_r`.
    pub epsilon_ln_d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySummary {
    pub family: String,
    pub per_r: Vec<RadiusSummary>,
    /// Minimum over R of the limsup density.
    pub cc_estimate: Option<String>,
    pub cc_estimate_decimal: Option<f64>,
    /// The estimate restricted to the radii up to each scheduled R.
    pub cc_by_max_r: Vec<(usize, Option<String>)>,
    pub torsion_audit: Vec<TorsionAudit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub failed_rows: usize,
    pub invariant_violations: usize,
    pub families: Vec<FamilySummary>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl RunOutcome {
    /// Process exit status: 0 when every row succeeded, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed_rows == 0 {
            0
        } else {
            1
        }
    }
}

fn params_string(tag: FamilyTag, group: &GroupInstance, size: u64) -> String {
    match tag {
        FamilyTag::Torus => format!("k={} n={size}", group.rank()),
        FamilyTag::Heisenberg => format!("n={size}"),
        FamilyTag::Sl3zPrincipal | FamilyTag::Sl3zProjective => format!("p={size}"),
    }
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn invariant(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

/// `trs <= base^exp`, deciding by bit length when possible.
fn at_most_power(trs: &BigInt, base: u64, exp: u64) -> bool {
    let floor_log2 = 63 - base.max(1).leading_zeros() as u64;
    if trs.bits() <= floor_log2.saturating_mul(exp) {
        return true;
    }
    *trs <= BigInt::from(base).pow(exp as u32)
}

fn homology_route(m: &crate::homology::SparseIntegerMatrix, route: &str) -> Result<SnfResult> {
    let snf = smith_normal_form(m);
    invariant(within_hadamard(m, &snf.trs), || {
        format!(
            "{route} route: torsion {} exceeds the Hadamard bound",
            snf.trs
        )
    })?;
    Ok(snf)
}

fn run_task(task: &Task, cfg: &ExperimentConfig) -> CellOutcome {
    let start = Instant::now();
    let group = &task.group;
    let mut row = ReportRow {
        family: task.tag.as_str().to_string(),
        params: params_string(task.tag, group, task.size),
        r: task.r,
        ..Default::default()
    };
    let mut data = None;
    let result = fill_row(task, cfg, &mut row, &mut data);
    if cfg.record_timings {
        row.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    let invariant_failed = matches!(result, Err(Error::Invariant(_)));
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    CellOutcome {
        row,
        data,
        invariant_failed,
    }
}

fn fill_row(
    task: &Task,
    cfg: &ExperimentConfig,
    row: &mut ReportRow,
    data: &mut Option<CellData>,
) -> Result<()> {
    let group = &task.group;
    let quotient = group.quotient(task.size)?;
    let graph = build_schreier(quotient.action());
    drop(quotient);
    let n = graph.vertex_count();
    let k = graph.generator_count();
    let b = group.max_relator_len() as u64;
    row.index = n;
    row.edges_g = graph.edge_count();

    let rewiring = build_rewiring(&graph, group, task.r)?;
    let dl = match rewiring.distortion {
        Distortion::Finite(d) => Some(d),
        Distortion::Unbounded => None,
    };
    row.edges_h = Some(rewiring.edges.len());
    row.density = Some(ratio_string(&rewiring.density));
    row.density_decimal = Some(format!("{:.6}", to_f64(&rewiring.density)));
    row.dl_measured = Some(dl.map_or_else(|| "unbounded".to_string(), |d| d.to_string()));
    row.dl_budget = Some(rewiring.budget.to_string());
    row.bad_fraction = Some(ratio_string(&rewiring.bad_fraction()));
    row.degenerate = Some(rewiring.degenerate);
    rewiring.check_invariants()?;
    let dl = dl.expect("checked finite");

    let labeling = label_rewiring(&graph, &rewiring.edges)?;
    let correction = correction_set(&graph, &labeling, group)?;
    row.correction_size = Some(correction.len());
    if task.tag == FamilyTag::Torus {
        invariant(correction.is_empty(), || {
            "torus correction set is not empty".into()
        })?;
    }
    let longest_witness = correction
        .entries
        .iter()
        .map(|e| e.witness.len())
        .max()
        .unwrap_or(0);
    invariant(longest_witness as u64 <= dl * dl + 1, || {
        format!("correction witness of length {longest_witness} exceeds d_L^2 + 1")
    })?;

    let gamma = match cfg.gamma_d {
        Some(d) => {
            let g = gamma_sum(&graph, group, d)?;
            row.gamma_d = Some(ratio_string(&g.gamma));
            if d as u64 >= dl {
                invariant(correction.measure() <= g.gamma, || {
                    "correction measure exceeds the fixed-point sum".into()
                })?;
            }
            Some(g.gamma)
        }
        None => None,
    };
    let upper = rank_upper_bound(rewiring.edges.len(), n, &correction, gamma.as_ref());
    row.rank_upper = Some(ratio_string(&upper.measured));

    let mut cell = CellData {
        density: rewiring.density.clone(),
        dl,
        degenerate: rewiring.degenerate,
        audit: None,
    };

    if cfg.homology {
        let presentation = rewired_complex(&graph, group, &rewiring.edges, &labeling, &correction)?;
        let disc_bound = 4 * b * dl.max(1).pow(4);
        invariant(presentation.max_boundary_len() as u64 <= disc_bound, || {
            format!(
                "rewired relator of length {} exceeds 4 b d_L^4 = {disc_bound}",
                presentation.max_boundary_len()
            )
        })?;
        let generators = presentation.generator_count();
        let matrix = abelianized_matrix(&presentation);
        drop(presentation);
        let snf = homology_route(&matrix, "rewired")?;
        drop(matrix);

        if cfg.two_route {
            let schreier = schreier_presentation(&graph, group, 0)?;
            invariant(schreier.max_boundary_len() as u64 <= b, || {
                "Schreier relator longer than the group relators".into()
            })?;
            let matrix = abelianized_matrix(&schreier);
            drop(schreier);
            let other = homology_route(&matrix, "Schreier")?;
            invariant(snf.same_group(&other), || {
                format!(
                    "routes disagree: rewired {} vs Schreier {}",
                    snf.describe(),
                    other.describe()
                )
            })?;
        }

        let lower = abelian_rank_lower_bound(&snf);
        row.rank_lower_ab = Some(lower);
        row.betti = Some(snf.betti);
        row.trs = Some(snf.trs.to_string());
        let measured = ln_big(&snf.trs) / n as f64;
        row.log_trs_over_index = Some(format!("{measured:e}"));

        invariant(ratio(lower, n) - ratio(1, n) <= upper.measured, || {
            format!("abelian lower bound {lower} above the rank upper bound")
        })?;
        invariant(at_most_power(&snf.trs, b, (k * n) as u64), || {
            "ln trs / index exceeds d ln b".into()
        })?;
        let disc = 4 * b * dl.max(1).pow(4);
        let holds = at_most_power(&snf.trs, disc, generators as u64);
        cell.audit = Some(TorsionAudit {
            params: row.params.clone(),
            r: task.r,
            measured,
            bound: generators as f64 / n as f64 * (disc as f64).ln(),
            holds,
        });
        invariant(holds, || "torsion exceeds the rewired-complex bound".into())?;
    }
    *data = Some(cell);
    Ok(())
}

fn summarize(cfg: &ExperimentConfig, tasks: &[Task], outcomes: &[CellOutcome]) -> Summary {
    let mut families = Vec::new();
    for (fi, spec) in cfg.families.iter().enumerate() {
        let mut radii: Vec<usize> = cfg.r_schedule.clone();
        radii.sort_unstable();
        radii.dedup();
        let mut per_r = Vec::new();
        for &r in &radii {
            let cells: Vec<&CellOutcome> = tasks
                .iter()
                .zip(outcomes)
                .filter(|(t, _)| t.family == fi && t.r == r)
                .map(|(_, o)| o)
                .collect();
            let good: Vec<&CellData> = cells
                .iter()
                .filter_map(|o| o.data.as_ref())
                .filter(|d| !d.degenerate)
                .collect();
            let sup = good.iter().map(|d| d.density.clone()).max();
            let d_r = good.iter().map(|d| d.dl).max();
            let eps_ln_d = match (&sup, d_r) {
                (Some(s), Some(d)) => Some(to_f64(&(s - BigRational::one())) * (d as f64).ln()),
                _ => None,
            };
            per_r.push(RadiusSummary {
                r,
                rows: cells.len(),
                non_degenerate_rows: good.len(),
                limsup_density_decimal: sup.as_ref().map(to_f64),
                limsup_density: sup.as_ref().map(ratio_string),
                d_r,
                epsilon_ln_d: eps_ln_d,
            });
        }
        let mut best: Option<BigRational> = None;
        let mut cc_by_max_r = Vec::new();
        for (rs, &r) in per_r.iter().zip(&radii) {
            if let Some(s) = &rs.limsup_density {
                let q: BigRational = s.parse().expect("ratio string");
                if best.as_ref().is_none_or(|b| q < *b) {
                    best = Some(q);
                }
            }
            cc_by_max_r.push((r, best.as_ref().map(ratio_string)));
        }
        let torsion_audit = tasks
            .iter()
            .zip(outcomes)
            .filter(|(t, _)| t.family == fi)
            .filter_map(|(_, o)| o.data.as_ref().and_then(|d| d.audit.clone()))
            .collect();
        families.push(FamilySummary {
            family: spec.family.clone(),
            per_r,
            cc_estimate: best.as_ref().map(ratio_string),
            cc_estimate_decimal: best.as_ref().map(to_f64),
            cc_by_max_r,
            torsion_audit,
        });
    }
    Summary {
        rows: outcomes.len(),
        failed_rows: outcomes.iter().filter(|o| o.row.error.is_some()).count(),
        invariant_violations: outcomes.iter().filter(|o| o.invariant_failed).count(),
        families,
    }
}

/// Runs every `(family, size, R)` cell on a pool of `cfg.workers` threads.
/// Rows come back ordered by family (config order), size and R.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut radii = cfg.r_schedule.clone();
    radii.sort_unstable();
    radii.dedup();
    let mut tasks = Vec::new();
    for (fi, spec) in cfg.families.iter().enumerate() {
        let (tag, group) = spec.instantiate()?;
        let mut sizes = spec.sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        for &size in &sizes {
            for &r in &radii {
                tasks.push(Task {
                    family: fi,
                    tag,
                    group: group.clone(),
                    size,
                    r,
                });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes: Vec<CellOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .with_max_len(1)
            .map(|t| run_task(t, cfg))
            .collect()
    });
    let summary = summarize(cfg, &tasks, &outcomes);
    Ok(RunOutcome {
        rows: outcomes.into_iter().map(|o| o.row).collect(),
        summary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

/// Writes `report.csv` and/or `report.json`, plus `summary.json`, into
/// `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path, format: OutputFormat) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let f = std::fs::File::create(dir.join("report.csv"))?;
        write_csv(&outcome.rows, std::io::BufWriter::new(f))?;
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let f = std::fs::File::create(dir.join("report.json"))?;
        write_json(&outcome.rows, std::io::BufWriter::new(f))?;
    }
    let f = std::fs::File::create(dir.join("summary.json"))?;
    let mut w = std::io::BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, &outcome.summary).map_err(|e| Error::Io(e.to_string()))?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}
