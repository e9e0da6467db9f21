//! Machine-readable output: CSV/JSON tradeoff tables and the JSON
//! verification report. Exact values are serialized as "p/q" strings
//! (plain integers when the denominator is 1); decimal columns are a
//! convenience approximation only.

use std::path::Path;

use coded_caching::converse::{OptimalityReport, StructureCheck};
use coded_caching::{Exact, Scalar};
use serde::Serialize;

pub fn rat(v: &Exact) -> String {
    v.to_string()
}

pub fn dec(v: &Exact) -> f64 {
    v.to_f64()
}

#[derive(Serialize)]
pub struct TradeoffRow {
    pub memory: String,
    pub man_load: String,
    pub cut_set: String,
    /// Absent when N < K (no converse in that regime).
    pub lower_bound: Option<String>,
    pub lp_oracle: Option<String>,
    pub memory_dec: f64,
    pub man_load_dec: f64,
    pub cut_set_dec: f64,
    pub lower_bound_dec: Option<f64>,
    pub lp_oracle_dec: Option<f64>,
}

#[derive(Serialize)]
pub struct TradeoffReport {
    pub n: usize,
    pub k: usize,
    pub grid: usize,
    pub rows: Vec<TradeoffRow>,
}

const CSV_HEADER: [&str; 10] = [
    "M",
    "man_load",
    "cut_set",
    "lower_bound",
    "lp_oracle",
    "M_dec",
    "man_load_dec",
    "cut_set_dec",
    "lower_bound_dec",
    "lp_oracle_dec",
];

fn dec_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_csv(path: &Path, report: &TradeoffReport) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.memory.clone(),
            r.man_load.clone(),
            r.cut_set.clone(),
            r.lower_bound.clone().unwrap_or_default(),
            r.lp_oracle.clone().unwrap_or_default(),
            format!("{:.6}", r.memory_dec),
            format!("{:.6}", r.man_load_dec),
            format!("{:.6}", r.cut_set_dec),
            dec_cell(r.lower_bound_dec),
            dec_cell(r.lp_oracle_dec),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct VerifyGridRow {
    pub memory: String,
    pub man_load: String,
    pub lower_bound: String,
    pub lp_oracle: String,
    pub pass: bool,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PermutationSweep {
    Checked {
        pairs: u64,
        acyclic_ok: bool,
        levels_ok: bool,
    },
    SkippedGuard {
        pairs: u64,
    },
}

#[derive(Serialize)]
pub struct AggregateReport {
    pub closed_form: Vec<String>,
    pub brute_force: Option<Vec<String>>,
    pub matches: Option<bool>,
}

#[derive(Serialize)]
pub struct ResidualRow {
    pub q: usize,
    pub matches_closed_form: bool,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub k: usize,
    pub passed: bool,
    pub grid: Vec<VerifyGridRow>,
    pub permutation_sets: PermutationSweep,
    pub aggregate: AggregateReport,
    pub residuals: Vec<ResidualRow>,
}

pub fn verify_report(r: &OptimalityReport<Exact>) -> VerifyReport {
    VerifyReport {
        n: r.n_files,
        k: r.k_users,
        passed: r.passed(),
        grid: r
            .grid
            .iter()
            .map(|g| VerifyGridRow {
                memory: rat(&g.memory),
                man_load: rat(&g.achievable),
                lower_bound: rat(&g.lower),
                lp_oracle: rat(&g.lp),
                pass: g.pass(),
            })
            .collect(),
        permutation_sets: match &r.structure {
            StructureCheck::Checked {
                pairs,
                acyclic_ok,
                levels_ok,
            } => PermutationSweep::Checked {
                pairs: *pairs,
                acyclic_ok: *acyclic_ok,
                levels_ok: *levels_ok,
            },
            StructureCheck::SkippedGuard { pairs } => PermutationSweep::SkippedGuard {
                pairs: u64::try_from(*pairs).unwrap_or(u64::MAX),
            },
        },
        aggregate: AggregateReport {
            closed_form: r.aggregate.closed_form.iter().map(rat).collect(),
            brute_force: r
                .aggregate
                .brute_force
                .as_ref()
                .map(|v| v.iter().map(rat).collect()),
            matches: r.aggregate.matches(),
        },
        residuals: r
            .residuals
            .iter()
            .map(|c| ResidualRow {
                q: c.q,
                matches_closed_form: c.matches_closed_form,
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct SimUser {
    pub user: usize,
    pub ok: bool,
    pub missing: Vec<String>,
}

#[derive(Serialize)]
pub struct SimRun {
    pub demands: Vec<usize>,
    pub transmissions: usize,
    pub load: String,
    pub load_dec: f64,
    pub all_ok: bool,
    pub users: Vec<SimUser>,
}

#[derive(Serialize)]
pub struct SimReport {
    pub scheme: String,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub memory: String,
    pub runs: Vec<SimRun>,
    pub all_ok: bool,
}
