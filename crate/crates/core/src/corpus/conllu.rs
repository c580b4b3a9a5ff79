//! CoNLL-U reader and a minimal debug writer.
//!
//! Only FORM, LEMMA, UPOS and HEAD are retained. Multiword-token ranges
//! (`3-4`) and empty nodes (`5.1`) are skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{AnnotatedSentence, CorpusError, Upos, Word};

pub fn load_conllu(path: &Path) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_conllu(&text)
}

struct Block {
    sentence: usize,
    first_line: usize,
    current: AnnotatedSentence,
}

impl Block {
    fn err(&self, line: usize, violation: impl Into<String>) -> CorpusError {
        CorpusError::Conllu {
            sentence: self.sentence,
            line,
            violation: violation.into(),
        }
    }

    fn finish(self) -> Result<AnnotatedSentence, CorpusError> {
        if let Err(v) = self.current.validate() {
            return Err(self.err(self.first_line, v));
        }
        Ok(self.current)
    }
}

pub fn parse_conllu(text: &str) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut out = Vec::new();
    let mut block: Option<Block> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(b) = block.take() {
                out.push(b.finish()?);
            }
            continue;
        }
        let b = block.get_or_insert_with(|| Block {
            sentence: out.len() + 1,
            first_line: line_no,
            current: AnnotatedSentence::default(),
        });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "sent_id" => b.current.sent_id = Some(value.trim().to_string()),
                    "text" => b.current.text = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(b.err(
                line_no,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        if let Some(k) = cols.iter().position(|c| c.is_empty()) {
            return Err(b.err(line_no, format!("empty field in column {}", k + 1)));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let id: usize = id
            .parse()
            .map_err(|_| b.err(line_no, format!("non-integer ID {id:?}")))?;
        if id != b.current.words.len() + 1 {
            return Err(b.err(line_no, format!("word ID {id} out of sequence")));
        }
        let upos: Upos = cols[3].parse().map_err(|e: String| b.err(line_no, e))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| b.err(line_no, format!("non-integer HEAD {:?}", cols[6])))?;
        let lemma = match cols[2] {
            "_" => None,
            l => Some(l.to_string()),
        };
        b.current.words.push(Word {
            form: cols[1].to_string(),
            upos,
            head,
            lemma,
        });
    }
    if let Some(b) = block.take() {
        out.push(b.finish()?);
    }
    Ok(out)
}

/// Writes sentences back out as CoNLL-U. Columns not tracked here are `_`.
pub fn write_conllu(sentences: &[AnnotatedSentence]) -> String {
    let mut s = String::new();
    for sent in sentences {
        if let Some(id) = &sent.sent_id {
            let _ = writeln!(s, "# sent_id = {id}");
        }
        if let Some(text) = &sent.text {
            let _ = writeln!(s, "# text = {text}");
        }
        for (i, w) in sent.words.iter().enumerate() {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t_\t_\t_",
                i + 1,
                w.form,
                w.lemma.as_deref().unwrap_or("_"),
                w.upos,
                w.head
            );
        }
        s.push('\n');
    }
    s
}
