use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{CorpusError, Gold, NliPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

/// Bookkeeping for one corpus load; `kept + skipped.len() == total_lines`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub total_lines: usize,
    pub kept: usize,
    pub skipped: Vec<SkippedLine>,
}

#[derive(Deserialize)]
struct JsonRecord {
    gold_label: Option<String>,
    sentence1: Option<String>,
    sentence2: Option<String>,
    #[serde(rename = "pairID")]
    pair_id: Option<String>,
    id: Option<String>,
}

pub fn load_nli_corpus(
    path: &Path,
    format: CorpusFormat,
) -> Result<(Vec<NliPair>, LoadReport), CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_nli_corpus(&text, format).map_err(|e| match e {
        CorpusError::NoValidPairs(_) => CorpusError::NoValidPairs(path.display().to_string()),
        other => other,
    })
}

/// Parses an in-memory corpus. Lines whose gold label is not one of the three
/// classes (including SNLI's `-` for "no annotator majority") are skipped.
pub fn parse_nli_corpus(
    text: &str,
    format: CorpusFormat,
) -> Result<(Vec<NliPair>, LoadReport), CorpusError> {
    let mut pairs = Vec::new();
    let mut report = LoadReport::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        report.total_lines += 1;
        let parsed = if format == CorpusFormat::Tsv && line_no == 1 {
            Err("header row".to_string())
        } else {
            match format {
                CorpusFormat::Jsonl => parse_json_line(line, line_no),
                CorpusFormat::Tsv => parse_tsv_line(line, line_no),
            }
        };
        match parsed {
            Ok(pair) => {
                report.kept += 1;
                pairs.push(pair);
            }
            Err(reason) => report.skipped.push(SkippedLine {
                line: line_no,
                reason,
            }),
        }
    }
    for s in &report.skipped {
        if s.reason != "header row" {
            log::debug!("skipped corpus line {}: {}", s.line, s.reason);
        }
    }
    if pairs.is_empty() {
        return Err(CorpusError::NoValidPairs("input".into()));
    }
    Ok((pairs, report))
}

fn make_pair(id: String, gold: &str, premise: &str, hypothesis: &str) -> Result<NliPair, String> {
    let gold: Gold = gold.parse()?;
    let premise = premise.trim();
    let hypothesis = hypothesis.trim();
    if premise.is_empty() || hypothesis.is_empty() {
        return Err("empty premise or hypothesis".into());
    }
    Ok(NliPair {
        id,
        premise: premise.to_string(),
        hypothesis: hypothesis.to_string(),
        gold,
    })
}

fn parse_json_line(line: &str, line_no: usize) -> Result<NliPair, String> {
    if line.trim().is_empty() {
        return Err("blank line".into());
    }
    let rec: JsonRecord = serde_json::from_str(line).map_err(|e| format!("malformed JSON: {e}"))?;
    let gold = rec.gold_label.ok_or("missing gold_label")?;
    let premise = rec.sentence1.ok_or("missing sentence1")?;
    let hypothesis = rec.sentence2.ok_or("missing sentence2")?;
    let id = rec
        .pair_id
        .or(rec.id)
        .unwrap_or_else(|| format!("line{line_no}"));
    make_pair(id, &gold, &premise, &hypothesis)
}

fn parse_tsv_line(line: &str, line_no: usize) -> Result<NliPair, String> {
    if line.trim().is_empty() {
        return Err("blank line".into());
    }
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 3 {
        return Err(format!(
            "expected 3 tab-separated columns, found {}",
            cols.len()
        ));
    }
    make_pair(format!("line{line_no}"), cols[0], cols[1], cols[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_line_maps_fields() {
        let text = r#"{"gold_label":"contradiction","sentence1":"A","sentence2":"B"}"#;
        let (pairs, report) = parse_nli_corpus(text, CorpusFormat::Jsonl).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].gold, Gold::Contradiction);
        assert_eq!(pairs[0].premise, "A");
        assert_eq!(pairs[0].hypothesis, "B");
        assert_eq!(report.kept, 1);
    }

    #[test]
    fn no_majority_label_is_skipped_and_counted() {
        let text = concat!(
            r#"{"gold_label":"-","sentence1":"A man sleeps.","sentence2":"A man rests.","pairID":"1"}"#,
            "\n",
            r#"{"gold_label":"neutral","sentence1":"A man sleeps.","sentence2":"A man dreams.","pairID":"2","annotator_labels":["neutral"]}"#,
            "\n",
            "{not json\n",
            "\n",
        );
        let (pairs, report) = parse_nli_corpus(text, CorpusFormat::Jsonl).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].id, "2");
        assert_eq!(report.total_lines, 4);
        assert_eq!(
            report.skipped.iter().map(|s| s.line).collect::<Vec<_>>(),
            vec![1, 3, 4]
        );
        assert_eq!(report.kept + report.skipped.len(), report.total_lines);
    }

    #[test]
    fn empty_input_is_fatal() {
        let err = parse_nli_corpus("", CorpusFormat::Jsonl).unwrap_err();
        assert!(err.to_string().contains("no valid pairs"));
        let err = parse_nli_corpus("gold\tpremise\thypothesis\n", CorpusFormat::Tsv).unwrap_err();
        assert!(matches!(err, CorpusError::NoValidPairs(_)));
    }

    #[test]
    fn tsv_with_header() {
        let text = "gold\tpremise\thypothesis\nentailment\tA dog runs .\tA dog moves .\n-\tx\ty\nneutral\tonly two\n";
        let (pairs, report) = parse_nli_corpus(text, CorpusFormat::Tsv).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].gold, Gold::Entailment);
        assert_eq!(report.skipped.len(), 3);
        assert_eq!(report.skipped[0].reason, "header row");
    }

    #[test]
    fn whitespace_only_sentences_are_rejected() {
        let text = r#"{"gold_label":"neutral","sentence1":"   ","sentence2":"B"}"#;
        assert!(parse_nli_corpus(text, CorpusFormat::Jsonl).is_err());
    }
}
