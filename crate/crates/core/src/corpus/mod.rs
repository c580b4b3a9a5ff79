//! NLI sentence pairs and their word-level linguistic annotation.
//!
//! Raw pairs come from JSONL or TSV files. Part-of-speech tags and dependency
//! heads come from CoNLL-U files produced by an external tagger/parser; the
//! FORM column of those files is the canonical word segmentation.

mod conllu;
mod merge;
mod nli;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::wordnet::SynsetLabel;

pub use conllu::{load_conllu, parse_conllu, write_conllu};
pub use merge::{merge_annotations, MergeReport};
pub use nli::{load_nli_corpus, parse_nli_corpus, CorpusFormat, LoadReport, SkippedLine};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no valid pairs in {0}")]
    NoValidPairs(String),
    #[error("sentence {sentence} (line {line}): {violation}")]
    Conllu {
        sentence: usize,
        line: usize,
        violation: String,
    },
    #[error("annotation count mismatch: {pairs} pairs but {annotations} {side} annotations")]
    CountMismatch {
        pairs: usize,
        annotations: usize,
        side: &'static str,
    },
}

/// Three-way NLI gold label. The discriminant is the class index used by the
/// classifier head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gold {
    Entailment = 0,
    Contradiction = 1,
    Neutral = 2,
}

impl Gold {
    pub const ALL: [Gold; 3] = [Gold::Entailment, Gold::Contradiction, Gold::Neutral];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Gold> {
        Gold::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gold::Entailment => "entailment",
            Gold::Contradiction => "contradiction",
            Gold::Neutral => "neutral",
        }
    }
}

impl FromStr for Gold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "entailment" => Ok(Gold::Entailment),
            "contradiction" => Ok(Gold::Contradiction),
            "neutral" => Ok(Gold::Neutral),
            other => Err(format!("not a gold label: {other:?}")),
        }
    }
}

impl fmt::Display for Gold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliPair {
    pub id: String,
    pub premise: String,
    pub hypothesis: String,
    pub gold: Gold,
}

/// Universal POS tags (CoNLL-U column 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Upos {
    ADJ,
    ADP,
    ADV,
    AUX,
    CCONJ,
    DET,
    INTJ,
    NOUN,
    NUM,
    PART,
    PRON,
    PROPN,
    PUNCT,
    SCONJ,
    SYM,
    VERB,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::ADJ,
        Upos::ADP,
        Upos::ADV,
        Upos::AUX,
        Upos::CCONJ,
        Upos::DET,
        Upos::INTJ,
        Upos::NOUN,
        Upos::NUM,
        Upos::PART,
        Upos::PRON,
        Upos::PROPN,
        Upos::PUNCT,
        Upos::SCONJ,
        Upos::SYM,
        Upos::VERB,
        Upos::X,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Upos> {
        Upos::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::ADJ => "ADJ",
            Upos::ADP => "ADP",
            Upos::ADV => "ADV",
            Upos::AUX => "AUX",
            Upos::CCONJ => "CCONJ",
            Upos::DET => "DET",
            Upos::INTJ => "INTJ",
            Upos::NOUN => "NOUN",
            Upos::NUM => "NUM",
            Upos::PART => "PART",
            Upos::PRON => "PRON",
            Upos::PROPN => "PROPN",
            Upos::PUNCT => "PUNCT",
            Upos::SCONJ => "SCONJ",
            Upos::SYM => "SYM",
            Upos::VERB => "VERB",
            Upos::X => "X",
        }
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .iter()
            .copied()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| format!("unknown UPOS tag {s:?}"))
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub form: String,
    pub upos: Upos,
    /// 1-based index of the parent word, 0 for the root.
    pub head: usize,
    pub lemma: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub sent_id: Option<String>,
    pub text: Option<String>,
    pub words: Vec<Word>,
}

impl AnnotatedSentence {
    pub fn new(words: Vec<Word>) -> Self {
        AnnotatedSentence {
            sent_id: None,
            text: None,
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(|w| w.form.as_str())
    }

    /// Checks the single-root, in-range, acyclic head structure.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.words.len();
        if n == 0 {
            return Err("empty sentence".into());
        }
        for (i, w) in self.words.iter().enumerate() {
            if w.head > n {
                return Err(format!(
                    "head out of range: word {} has head {} (sentence length {n})",
                    i + 1,
                    w.head
                ));
            }
            if w.head == i + 1 {
                return Err(format!("self-loop: word {} is its own head", i + 1));
            }
        }
        for start in 0..n {
            let mut cur = start + 1;
            let mut steps = 0;
            while cur != 0 {
                cur = self.words[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err("cyclic head graph".into());
                }
            }
        }
        match self.words.iter().filter(|w| w.head == 0).count() {
            0 => Err("zero roots".into()),
            1 => Ok(()),
            r => Err(format!("multiple roots ({r})")),
        }
    }

    /// 1-based index of the root word.
    pub fn root(&self) -> Option<usize> {
        self.words.iter().position(|w| w.head == 0).map(|i| i + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedPair {
    pub pair: NliPair,
    pub premise_ann: AnnotatedSentence,
    pub hypothesis_ann: AnnotatedSentence,
    pub premise_syn: Vec<SynsetLabel>,
    pub hypothesis_syn: Vec<SynsetLabel>,
}

impl AnnotatedPair {
    pub fn is_consistent(&self) -> bool {
        self.premise_syn.len() == self.premise_ann.len()
            && self.hypothesis_syn.len() == self.hypothesis_ann.len()
    }
}
