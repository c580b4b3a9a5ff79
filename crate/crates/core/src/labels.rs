//! Objectives, their label spaces, and the annotated-dataset file.
//!
//! The dataset file is line-delimited JSON: a header line carrying the label
//! vocabularies, then one record per pair with word lists and parallel label
//! arrays.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedPair, AnnotatedSentence, Gold, NliPair, Upos, Word};
use crate::tokenizer::IGNORE_LABEL;
use crate::wordnet::SynsetLabel;

/// A training objective. The first three are token-level heads; `Nli` is the
/// sentence-pair head read at the `[CLS]` position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "POS")]
    Pos,
    #[serde(rename = "PP")]
    Parent,
    #[serde(rename = "SYN")]
    Synset,
    #[serde(rename = "NLI")]
    Nli,
}

impl Objective {
    pub const TOKEN: [Objective; 3] = [Objective::Pos, Objective::Parent, Objective::Synset];

    pub fn is_token(self) -> bool {
        self != Objective::Nli
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Pos => "POS",
            Objective::Parent => "PP",
            Objective::Synset => "SYN",
            Objective::Nli => "NLI",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "POS" => Ok(Objective::Pos),
            "PP" | "PARENT" => Ok(Objective::Parent),
            "SYN" | "SYNSET" => Ok(Objective::Synset),
            "NLI" => Ok(Objective::Nli),
            other => Err(format!("unknown objective {other:?}")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LabelsError {
    #[error("failed to access {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// Class inventories for the token objectives.
///
/// Parent prediction uses the CoNLL-U head value as the class: 0 is ROOT and
/// `j` is the j-th word (1-based) of the word's own sentence, so the space has
/// `max_words + 1` classes. Synset class 0 is `no_syn`; the rest are sorted by
/// `(pos, offset)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    pub synsets: Vec<SynsetLabel>,
    pub max_words: usize,
}

impl LabelSpace {
    pub fn build(pairs: &[AnnotatedPair]) -> LabelSpace {
        let mut keys = BTreeSet::new();
        let mut max_words = 1;
        for p in pairs {
            for l in p.premise_syn.iter().chain(&p.hypothesis_syn) {
                if *l != SynsetLabel::NoSyn {
                    keys.insert(l.clone());
                }
            }
            max_words = max_words
                .max(p.premise_ann.len())
                .max(p.hypothesis_ann.len());
        }
        let mut synsets = vec![SynsetLabel::NoSyn];
        synsets.extend(keys);
        LabelSpace { synsets, max_words }
    }

    pub fn num_classes(&self, objective: Objective) -> usize {
        match objective {
            Objective::Pos => Upos::ALL.len(),
            Objective::Parent => self.max_words + 1,
            Objective::Synset => self.synsets.len(),
            Objective::Nli => Gold::ALL.len(),
        }
    }

    pub fn synset_class(&self, label: &SynsetLabel) -> Option<usize> {
        self.synsets.binary_search(label).ok()
    }

    /// Per-word class ids for one sentence; unknown labels become
    /// [`IGNORE_LABEL`].
    pub fn word_labels(
        &self,
        sentence: &AnnotatedSentence,
        synsets: &[SynsetLabel],
        objective: Objective,
    ) -> Vec<i32> {
        match objective {
            Objective::Pos => sentence
                .words
                .iter()
                .map(|w| w.upos.index() as i32)
                .collect(),
            Objective::Parent => sentence
                .words
                .iter()
                .map(|w| {
                    if w.head <= self.max_words {
                        w.head as i32
                    } else {
                        IGNORE_LABEL
                    }
                })
                .collect(),
            Objective::Synset => synsets
                .iter()
                .map(|l| self.synset_class(l).map_or(IGNORE_LABEL, |c| c as i32))
                .collect(),
            Objective::Nli => Vec::new(),
        }
    }

    /// Word labels for the premise words followed by the hypothesis words.
    pub fn pair_word_labels(&self, pair: &AnnotatedPair, objective: Objective) -> Vec<i32> {
        let mut v = self.word_labels(&pair.premise_ann, &pair.premise_syn, objective);
        v.extend(self.word_labels(&pair.hypothesis_ann, &pair.hypothesis_syn, objective));
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        })
    }
}

/// Annotated pairs of all splits plus the label space they were encoded with.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub space: LabelSpace,
    pub pairs: Vec<(Split, AnnotatedPair)>,
}

impl LabeledDataset {
    pub fn new(pairs: Vec<(Split, AnnotatedPair)>) -> Self {
        let all: Vec<AnnotatedPair> = pairs.iter().map(|(_, p)| p.clone()).collect();
        LabeledDataset {
            space: LabelSpace::build(&all),
            pairs,
        }
    }

    /// Splits in corpus order: the first `train` fraction (rounded), then
    /// `dev`, the rest test.
    pub fn from_ordered(pairs: Vec<AnnotatedPair>, train: f64, dev: f64) -> Self {
        let n = pairs.len();
        let n_train = (n as f64 * train).round() as usize;
        let n_dev = (n as f64 * dev).round() as usize;
        let split = |i: usize| {
            if i < n_train {
                Split::Train
            } else if i < n_train + n_dev {
                Split::Dev
            } else {
                Split::Test
            }
        };
        LabeledDataset::new(
            pairs
                .into_iter()
                .enumerate()
                .map(|(i, p)| (split(i), p))
                .collect(),
        )
    }

    pub fn split(&self, split: Split) -> Vec<AnnotatedPair> {
        self.pairs
            .iter()
            .filter(|(s, _)| *s == split)
            .map(|(_, p)| p.clone())
            .collect()
    }

    pub fn to_ldj(&self) -> String {
        let header = Header {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            upos: Upos::ALL.iter().map(|u| u.as_str().to_string()).collect(),
            synsets: self.space.synsets.clone(),
            max_words: self.space.max_words,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for (split, p) in &self.pairs {
            let rec = Record {
                id: p.pair.id.clone(),
                split: *split,
                gold: p.pair.gold,
                premise: SideRecord::new(
                    &p.pair.premise,
                    &p.premise_ann,
                    &p.premise_syn,
                    &self.space,
                ),
                hypothesis: SideRecord::new(
                    &p.pair.hypothesis,
                    &p.hypothesis_ann,
                    &p.hypothesis_syn,
                    &self.space,
                ),
            };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse_ldj(text: &str) -> Result<LabeledDataset, LabelsError> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(LabelsError::Format {
            line: 1,
            reason: "empty file".into(),
        })?;
        let header: Header = serde_json::from_str(first).map_err(|e| LabelsError::Format {
            line: 1,
            reason: e.to_string(),
        })?;
        if header.format != FORMAT_TAG || header.version != FORMAT_VERSION {
            return Err(LabelsError::Format {
                line: 1,
                reason: format!("unsupported format {} v{}", header.format, header.version),
            });
        }
        let upos_names: Vec<String> = Upos::ALL.iter().map(|u| u.as_str().to_string()).collect();
        if header.upos != upos_names {
            return Err(LabelsError::Format {
                line: 1,
                reason: "UPOS inventory differs".into(),
            });
        }
        let space = LabelSpace {
            synsets: header.synsets,
            max_words: header.max_words,
        };
        let mut pairs = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let err = |reason: String| LabelsError::Format {
                line: i + 1,
                reason,
            };
            let rec: Record = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
            let (pa, ps) = rec.premise.to_sentence(&space).map_err(err)?;
            let (ha, hs) = rec.hypothesis.to_sentence(&space).map_err(err)?;
            pairs.push((
                rec.split,
                AnnotatedPair {
                    pair: NliPair {
                        id: rec.id,
                        premise: rec.premise.text,
                        hypothesis: rec.hypothesis.text,
                        gold: rec.gold,
                    },
                    premise_ann: pa,
                    hypothesis_ann: ha,
                    premise_syn: ps,
                    hypothesis_syn: hs,
                },
            ));
        }
        Ok(LabeledDataset { space, pairs })
    }

    pub fn save(&self, path: &Path) -> Result<(), LabelsError> {
        fs::write(path, self.to_ldj()).map_err(|e| LabelsError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<LabeledDataset, LabelsError> {
        let text = fs::read_to_string(path).map_err(|e| LabelsError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        LabeledDataset::parse_ldj(&text)
    }
}

const FORMAT_TAG: &str = "lingpt-labels";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    upos: Vec<String>,
    synsets: Vec<SynsetLabel>,
    max_words: usize,
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    split: Split,
    gold: Gold,
    premise: SideRecord,
    hypothesis: SideRecord,
}

#[derive(Serialize, Deserialize)]
struct SideRecord {
    text: String,
    words: Vec<String>,
    upos: Vec<usize>,
    head: Vec<usize>,
    synset: Vec<usize>,
}

impl SideRecord {
    fn new(text: &str, ann: &AnnotatedSentence, syn: &[SynsetLabel], space: &LabelSpace) -> Self {
        SideRecord {
            text: text.to_string(),
            words: ann.words.iter().map(|w| w.form.clone()).collect(),
            upos: ann.words.iter().map(|w| w.upos.index()).collect(),
            head: ann.words.iter().map(|w| w.head).collect(),
            synset: syn
                .iter()
                .map(|l| {
                    space
                        .synset_class(l)
                        .expect("label space covers every pair")
                })
                .collect(),
        }
    }

    fn to_sentence(
        &self,
        space: &LabelSpace,
    ) -> Result<(AnnotatedSentence, Vec<SynsetLabel>), String> {
        let n = self.words.len();
        if self.upos.len() != n || self.head.len() != n || self.synset.len() != n {
            return Err("label arrays differ in length from the word list".into());
        }
        let words = (0..n)
            .map(|i| {
                Ok(Word {
                    form: self.words[i].clone(),
                    upos: Upos::from_index(self.upos[i])
                        .ok_or(format!("bad UPOS id {}", self.upos[i]))?,
                    head: self.head[i],
                    lemma: None,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let sentence = AnnotatedSentence::new(words);
        sentence.validate()?;
        let syn = self
            .synset
            .iter()
            .map(|&c| {
                space
                    .synsets
                    .get(c)
                    .cloned()
                    .ok_or(format!("bad synset id {c}"))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok((sentence, syn))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::{SynsetKey, WnPos};

    fn pair() -> AnnotatedPair {
        let lady = SynsetLabel::Key(SynsetKey {
            pos: WnPos::Noun,
            offset: 10243137,
            display: Some("lady.n.01".into()),
        });
        let w = |f: &str, u, h| Word {
            form: f.into(),
            upos: u,
            head: h,
            lemma: None,
        };
        AnnotatedPair {
            pair: NliPair {
                id: "p1".into(),
                premise: "The lady sits .".into(),
                hypothesis: "She sits".into(),
                gold: Gold::Entailment,
            },
            premise_ann: AnnotatedSentence::new(vec![
                w("The", Upos::DET, 2),
                w("lady", Upos::NOUN, 3),
                w("sits", Upos::VERB, 0),
                w(".", Upos::PUNCT, 3),
            ]),
            hypothesis_ann: AnnotatedSentence::new(vec![
                w("She", Upos::PRON, 2),
                w("sits", Upos::VERB, 0),
            ]),
            premise_syn: vec![
                SynsetLabel::NoSyn,
                lady,
                SynsetLabel::NoSyn,
                SynsetLabel::NoSyn,
            ],
            hypothesis_syn: vec![SynsetLabel::NoSyn, SynsetLabel::NoSyn],
        }
    }

    #[test]
    fn label_space_classes() {
        let ds = LabeledDataset::new(vec![(Split::Train, pair())]);
        assert_eq!(ds.space.num_classes(Objective::Pos), 17);
        assert_eq!(ds.space.num_classes(Objective::Parent), 5);
        assert_eq!(ds.space.num_classes(Objective::Synset), 2);
        let p = &ds.pairs[0].1;
        assert_eq!(
            ds.space.pair_word_labels(p, Objective::Parent),
            vec![2, 3, 0, 3, 2, 0]
        );
        assert_eq!(
            ds.space.pair_word_labels(p, Objective::Synset),
            vec![0, 1, 0, 0, 0, 0]
        );
        assert_eq!(
            ds.space.pair_word_labels(p, Objective::Pos)[..2],
            [Upos::DET.index() as i32, Upos::NOUN.index() as i32]
        );
    }

    #[test]
    fn ldj_round_trip() {
        let ds = LabeledDataset::new(vec![(Split::Train, pair()), (Split::Test, pair())]);
        let text = ds.to_ldj();
        let back = LabeledDataset::parse_ldj(&text).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.to_ldj(), text);
        assert_eq!(back.split(Split::Test).len(), 1);
        assert_eq!(back.space.synsets[1].name(), "lady.n.01");
    }

    #[test]
    fn ldj_rejects_inconsistent_records() {
        let ds = LabeledDataset::new(vec![(Split::Train, pair())]);
        let text = ds
            .to_ldj()
            .replace("\"head\":[2,3,0,3]", "\"head\":[2,1,0,3]");
        let err = LabeledDataset::parse_ldj(&text).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(LabeledDataset::parse_ldj("").is_err());
    }

    #[test]
    fn objective_names() {
        for o in [
            Objective::Pos,
            Objective::Parent,
            Objective::Synset,
            Objective::Nli,
        ] {
            assert_eq!(o.as_str().parse::<Objective>().unwrap(), o);
        }
        assert_eq!("Syn".parse::<Objective>().unwrap(), Objective::Synset);
    }
}
