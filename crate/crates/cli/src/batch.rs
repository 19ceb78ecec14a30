//! JSON-lines corpus → TSV summary, one row per non-blank input line, in
//! input order.

use coamoeba_core::homology::{analyze_model, CX_CONDITION};
use coamoeba_core::model::{normalize, PolynomialSpec};
use coamoeba_core::Error;
use rayon::prelude::*;

pub const COLUMNS: [&str; 10] = [
    "id",
    "n",
    "D",
    "I00",
    "rank_1_plus_c",
    "components",
    "defect",
    "galois_maximal_coamoeba",
    "galois_maximal_CX",
    "error",
];

pub struct BatchTable {
    pub tsv: String,
    pub rows: usize,
    pub failures: usize,
    pub internal_failures: usize,
}

fn clean(text: &str) -> String {
    text.replace(['\t', '\n', '\r'], " ")
}

fn row(line_no: usize, line: &str) -> (Vec<String>, Option<Error>) {
    let fallback = format!("line-{line_no}");
    let spec = match PolynomialSpec::from_json(line) {
        Ok(s) => s,
        Err(e) => return (error_row(fallback, &e), Some(e)),
    };
    let id = spec.id.clone().unwrap_or(fallback);
    let report = match normalize(&spec).and_then(|m| analyze_model(&m)) {
        Ok(r) => r,
        Err(e) => return (error_row(id, &e), Some(e)),
    };
    let d: Vec<String> = report.snf.d.iter().map(ToString::to_string).collect();
    (
        vec![
            clean(&id),
            report.model.n.to_string(),
            d.join(","),
            report.partition.i00.len().to_string(),
            report.rank_closed.to_string(),
            report.real_part.component_count.to_string(),
            report.defect.to_string(),
            report.galois_maximal_coamoeba.to_string(),
            format!("{} ({CX_CONDITION})", report.galois_maximal_cx.value),
            String::new(),
        ],
        None,
    )
}

fn error_row(id: String, e: &Error) -> Vec<String> {
    let mut cells = vec![String::new(); COLUMNS.len()];
    cells[0] = clean(&id);
    cells[COLUMNS.len() - 1] = clean(&e.to_string());
    cells
}

pub fn run(text: &str) -> BatchTable {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let results: Vec<(Vec<String>, Option<Error>)> = lines.par_iter().map(|&(i, l)| row(i, l)).collect();
    let mut tsv = COLUMNS.join("\t");
    tsv.push('\n');
    let (mut failures, mut internal_failures) = (0, 0);
    for (cells, err) in &results {
        if let Some(e) = err {
            failures += 1;
            if e.is_internal() {
                internal_failures += 1;
            }
        }
        tsv.push_str(&cells.join("\t"));
        tsv.push('\n');
    }
    BatchTable {
        tsv,
        rows: results.len(),
        failures,
        internal_failures,
    }
}
