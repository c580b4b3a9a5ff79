use serde::{Deserialize, Serialize};

use super::bench::RunReport;
use crate::corpus::Gold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    TextTable,
    Csv,
}

/// Published full-scale results (percent) for bert-base-cased on SNLI, kept
/// for side-by-side display. The POS+Syn F1(Ent.) figure is given as 91.7
/// in the configuration comparison and 91.1 in the comparison with other
/// models; the former is stored here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub config: &'static str,
    pub accuracy: f64,
    pub f1_contradiction: f64,
    pub f1_entailment: f64,
    pub f1_neutral: f64,
}

const fn reference(config: &'static str, a: f64, c: f64, e: f64, n: f64) -> ReferenceRow {
    ReferenceRow {
        config,
        accuracy: a,
        f1_contradiction: c,
        f1_entailment: e,
        f1_neutral: n,
    }
}

pub const REFERENCE_ROWS: [ReferenceRow; 8] = [
    reference("No additional pretraining", 88.6, 91.6, 89.7, 84.5),
    reference("POS", 90.0, 92.4, 90.9, 86.7),
    reference("PP", 89.5, 92.1, 90.4, 85.9),
    reference("POS+PP", 90.2, 92.8, 91.1, 86.5),
    reference("Syn", 89.9, 92.3, 90.8, 86.6),
    reference("POS+Syn", 90.4, 93.2, 91.7, 86.7),
    reference("PP+Syn", 89.9, 92.6, 90.6, 86.3),
    reference("POS+PP+Syn", 89.9, 92.5, 90.7, 86.4),
];

pub const CSV_HEADER: [&str; 6] = [
    "config",
    "seed",
    "accuracy",
    "f1_contradiction",
    "f1_entailment",
    "f1_neutral",
];

fn pct(x: f64) -> String {
    format!("{:.1}", x * 100.0)
}

pub fn render_report(r: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::TextTable => render_text(r),
        ReportFormat::Csv => render_csv(r),
    }
}

fn render_text(r: &RunReport) -> String {
    let header = ["Config", "Acc.", "F1(Cont.)", "F1(Ent.)", "F1(Neut.)"];
    let mut body: Vec<[String; 5]> = Vec::new();
    for row in &r.rows {
        let cells = match (&row.mean, &row.std) {
            (Some(m), Some(s)) => {
                let cell = |mean: f64, std: f64| format!("{} ± {}", pct(mean), pct(std));
                [
                    row.config_name.clone(),
                    cell(m.accuracy, s.accuracy),
                    cell(m.f1_contradiction, s.f1_contradiction),
                    cell(m.f1_entailment, s.f1_entailment),
                    cell(m.f1_neutral, s.f1_neutral),
                ]
            }
            _ => [
                row.config_name.clone(),
                "failed".into(),
                "-".into(),
                "-".into(),
                "-".into(),
            ],
        };
        body.push(cells);
    }
    let widths: Vec<usize> = (0..5)
        .map(|c| {
            body.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| -> String {
        let mut s = String::new();
        for (c, cell) in cells.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(&header.map(String::from));
    out.push('\n');
    for cells in &body {
        out.push_str(&line(cells));
        out.push('\n');
    }
    let mut notes = Vec::new();
    for row in &r.rows {
        let ok = row.seeds.len() - row.failures().count();
        notes.push(format!(
            "{}: {:?}, {ok}/{} seeds",
            row.config_name,
            row.combine,
            row.seeds.len()
        ));
        for f in row.failures() {
            notes.push(format!(
                "  seed {} failed: {}",
                f.seed,
                f.error.as_deref().unwrap_or("unknown error")
            ));
        }
    }
    out.push('\n');
    out.push_str("Percentages, mean ± sample std over seeds.\n");
    for n in notes {
        out.push_str(&n);
        out.push('\n');
    }
    out
}

fn render_csv(r: &RunReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in &r.rows {
        for s in &row.seeds {
            if let Some(m) = &s.metrics {
                w.write_record([
                    row.config_name.clone(),
                    s.seed.to_string(),
                    m.accuracy.to_string(),
                    m.f1_of(Gold::Contradiction).to_string(),
                    m.f1_of(Gold::Entailment).to_string(),
                    m.f1_of(Gold::Neutral).to_string(),
                ])
                .expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 input")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub config: String,
    pub seed: u64,
    pub accuracy: f64,
    pub f1_contradiction: f64,
    pub f1_entailment: f64,
    pub f1_neutral: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(format!("unexpected header {headers:?}"));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| e.to_string()))
        .collect()
}
