//! Snappability table over several fixtures.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use snapkit::analysis;
use snapkit::model::{Configuration, StrainModel};

use crate::cli::{prepare, Common};
use crate::error::CliResult;

/// Fixtures compared when no files are given.
pub const DEFAULT_FIXTURES: [&str; 3] = [
    "fixtures/ex1_plate_gl.json",
    "fixtures/ex1_bars_gl.json",
    "fixtures/ex1_bars_ce.json",
];

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub name: String,
    pub strain_model: &'static str,
    pub solver: &'static str,
    pub tracked_paths: Option<usize>,
    pub finite_solutions: Option<usize>,
    pub quotient_size: usize,
    pub snappability: Option<f64>,
    pub polished_start: bool,
    pub witness: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareJson {
    pub seed: u64,
    pub rows: Vec<CompareRow>,
}

pub fn compare_files(inputs: &[PathBuf], common: &Common) -> CliResult<CompareJson> {
    let mut variants = Vec::with_capacity(inputs.len());
    let mut polished = Vec::with_capacity(inputs.len());
    for path in inputs {
        let (fw, cfg) = common.load(path)?;
        let (cfg, start) = prepare(&fw, &cfg, common.seed)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        polished.push(start.polished);
        variants.push((name, fw, cfg));
    }
    let rows = analysis::compare_variants(&variants, &common.options())?;
    Ok(CompareJson {
        seed: common.seed,
        rows: rows
            .into_iter()
            .zip(&variants)
            .zip(polished)
            .map(|((row, (_, fw, _)), polished_start)| CompareRow {
                strain_model: match fw.strain_model() {
                    StrainModel::GreenLagrange => "gl",
                    StrainModel::CauchyEngineering => "ce",
                },
                solver: row.solver.name(),
                tracked_paths: row.tracked_paths,
                finite_solutions: row.finite_solutions,
                quotient_size: row.quotient_size,
                snappability: row.value,
                polished_start,
                witness: row.witness.as_ref().map(Configuration::rows),
                name: row.name,
            })
            .collect(),
    })
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

/// Fixed-width text table.
pub fn render_text(table: &CompareJson) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22} {:<5} {:<9} {:>6} {:>8} {:>4} {:>14}",
        "variant", "model", "solver", "paths", "finite", "#R", "snappability"
    );
    for r in &table.rows {
        let value = r.snappability.map_or_else(|| "infinity".into(), |v| format!("{v:.5e}"));
        let _ = writeln!(
            out,
            "{:<22} {:<5} {:<9} {:>6} {:>8} {:>4} {:>14}",
            r.name,
            r.strain_model,
            r.solver,
            opt(r.tracked_paths),
            opt(r.finite_solutions),
            r.quotient_size,
            value
        );
    }
    for r in &table.rows {
        if let Some(w) = &r.witness {
            let pts: Vec<String> = w.iter().map(|p| format!("({})", p.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>().join(", "))).collect();
            let _ = writeln!(out, "{} witness: {}", r.name, pts.join(" "));
        }
    }
    out.pop();
    out
}
