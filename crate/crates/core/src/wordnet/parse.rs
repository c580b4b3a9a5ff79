//! WNDB file parsing: `index.<pos>`, `data.<pos>`, `<pos>.exc`.
//!
//! Lines starting with two spaces are the license header and are ignored.
//! Data lines are keyed by the offset written in their first field; the
//! physical byte position in the file is not consulted.

use std::fs;
use std::path::Path;

use super::{WnPos, WordnetError, WordnetIndex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLine {
    pub file: String,
    pub line: usize,
    pub reason: String,
}

/// A parsed `index.<pos>` line: lemma, category, and synset offsets.
pub fn parse_index_line(line: &str, expected: WnPos) -> Result<(String, Vec<u32>), String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 6 {
        return Err(format!("truncated index line ({} fields)", toks.len()));
    }
    let lemma = toks[0].to_lowercase();
    match toks[1].chars().next().and_then(WnPos::from_letter) {
        Some(p) if p == expected && toks[1].len() == 1 => {}
        _ => return Err(format!("pos field {:?} does not match file", toks[1])),
    }
    let synset_cnt: usize = toks[2]
        .parse()
        .map_err(|_| format!("bad synset_cnt {:?}", toks[2]))?;
    let p_cnt: usize = toks[3]
        .parse()
        .map_err(|_| format!("bad p_cnt {:?}", toks[3]))?;
    let expected_len = 4 + p_cnt + 2 + synset_cnt;
    if toks.len() != expected_len {
        return Err(format!(
            "expected {expected_len} fields for {synset_cnt} synsets and {p_cnt} pointers, found {}",
            toks.len()
        ));
    }
    for t in &toks[4 + p_cnt..6 + p_cnt] {
        t.parse::<u32>()
            .map_err(|_| format!("bad sense count {t:?}"))?;
    }
    if synset_cnt == 0 {
        return Err("index entry lists no synsets".into());
    }
    let offsets = toks[6 + p_cnt..]
        .iter()
        .map(|t| parse_offset(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((lemma, offsets))
}

/// A parsed `data.<pos>` line: offset and the synset's lemmas in order.
/// Adjective position markers such as `(p)` are stripped.
pub fn parse_data_line(line: &str, expected: WnPos) -> Result<(u32, Vec<String>), String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 4 {
        return Err(format!("truncated data line ({} fields)", toks.len()));
    }
    let offset = parse_offset(toks[0])?;
    if toks[1].len() != 2 || toks[1].parse::<u8>().is_err() {
        return Err(format!("bad lex_filenum {:?}", toks[1]));
    }
    match toks[2].chars().next().and_then(WnPos::from_letter) {
        Some(p) if p == expected && toks[2].len() == 1 => {}
        _ => return Err(format!("ss_type {:?} does not match file", toks[2])),
    }
    let w_cnt =
        usize::from_str_radix(toks[3], 16).map_err(|_| format!("bad w_cnt {:?}", toks[3]))?;
    if w_cnt == 0 {
        return Err("synset lists no words".into());
    }
    if toks.len() < 4 + 2 * w_cnt {
        return Err(format!("truncated word list: expected {w_cnt} words"));
    }
    let lemmas = (0..w_cnt)
        .map(|i| {
            let w = toks[4 + 2 * i];
            match w.find('(') {
                Some(p) if w.ends_with(')') => w[..p].to_string(),
                _ => w.to_string(),
            }
        })
        .collect();
    Ok((offset, lemmas))
}

fn parse_offset(t: &str) -> Result<u32, String> {
    if t.len() != 8 || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad synset offset {t:?}"));
    }
    t.parse().map_err(|_| format!("bad synset offset {t:?}"))
}

fn read(path: &Path) -> Result<String, WordnetError> {
    let bytes = fs::read(path).map_err(|source| WordnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    // The WNDB files are Latin-1 in places; map bytes to chars one-to-one.
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => e.into_bytes().into_iter().map(char::from).collect(),
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with("  ") && !l.trim().is_empty())
}

/// Loads a WNDB directory. `data.<pos>` files are read only when `with_data`
/// is set; display names need them.
pub fn load_wordnet(dir: &Path, with_data: bool) -> Result<WordnetIndex, WordnetError> {
    let missing: Vec<String> = WnPos::ALL
        .iter()
        .map(|p| format!("index.{}", p.file_stem()))
        .filter(|f| !dir.join(f).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(WordnetError::MissingIndex {
            dir: dir.to_path_buf(),
            missing: missing.join(", "),
        });
    }

    let mut idx = WordnetIndex::default();
    for pos in WnPos::ALL {
        let name = format!("index.{}", pos.file_stem());
        let text = read(&dir.join(&name))?;
        for (line_no, line) in content_lines(&text) {
            match parse_index_line(line, pos) {
                Ok((lemma, offsets)) => {
                    idx.entries.insert((lemma, pos), offsets);
                }
                Err(reason) => idx.malformed.push(MalformedLine {
                    file: name.clone(),
                    line: line_no,
                    reason,
                }),
            }
        }

        let exc_name = format!("{}.exc", pos.file_stem());
        let exc_path = dir.join(&exc_name);
        if exc_path.is_file() {
            let text = read(&exc_path)?;
            for (line_no, line) in content_lines(&text) {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() < 2 {
                    idx.malformed.push(MalformedLine {
                        file: exc_name.clone(),
                        line: line_no,
                        reason: "exception line without a base form".into(),
                    });
                    continue;
                }
                idx.exceptions
                    .entry((toks[0].to_lowercase(), pos))
                    .or_default()
                    .extend(toks[1..].iter().map(|t| t.to_lowercase()));
            }
        } else {
            log::warn!(
                "{} not found; no exception list for {}",
                exc_path.display(),
                pos.file_stem()
            );
        }

        if with_data {
            let data_name = format!("data.{}", pos.file_stem());
            let path = dir.join(&data_name);
            if !path.is_file() {
                return Err(WordnetError::MissingData(path));
            }
            let text = read(&path)?;
            for (line_no, line) in content_lines(&text) {
                match parse_data_line(line, pos) {
                    Ok((offset, lemmas)) => {
                        if idx.data_lemmas.insert((pos, offset), lemmas).is_some() {
                            idx.malformed.push(MalformedLine {
                                file: data_name.clone(),
                                line: line_no,
                                reason: format!("duplicate offset {offset:08}"),
                            });
                        }
                    }
                    Err(reason) => idx.malformed.push(MalformedLine {
                        file: data_name.clone(),
                        line: line_no,
                        reason,
                    }),
                }
            }
        }
    }

    if with_data {
        let mut keys: Vec<_> = idx.entries.iter().collect();
        keys.sort();
        for ((lemma, pos), offsets) in keys {
            if let Some(&offset) = offsets
                .iter()
                .find(|&&o| !idx.data_lemmas.contains_key(&(*pos, o)))
            {
                return Err(WordnetError::DanglingOffset {
                    lemma: lemma.clone(),
                    pos: *pos,
                    offset,
                });
            }
        }
    }
    if !idx.malformed.is_empty() {
        log::warn!("skipped {} malformed WordNet lines", idx.malformed.len());
    }
    Ok(idx)
}
