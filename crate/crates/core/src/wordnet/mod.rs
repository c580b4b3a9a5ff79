//! WordNet (WNDB format) index, morphological base-form lookup, and the
//! first-sense synset labeler.

mod morphy;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::Upos;

pub use morphy::morphy;
pub use parse::{load_wordnet, parse_data_line, parse_index_line, MalformedLine};

#[derive(Debug, thiserror::Error)]
pub enum WordnetError {
    #[error("missing index files in {dir}: {missing}")]
    MissingIndex { dir: PathBuf, missing: String },
    #[error("missing data file {0}")]
    MissingData(PathBuf),
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("index entry {lemma:?} ({pos}) lists offset {offset:08} with no data record")]
    DanglingOffset {
        lemma: String,
        pos: WnPos,
        offset: u32,
    },
}

/// WordNet syntactic category. Satellite adjectives are folded into `Adj`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WnPos {
    #[serde(rename = "n")]
    Noun,
    #[serde(rename = "v")]
    Verb,
    #[serde(rename = "a")]
    Adj,
    #[serde(rename = "r")]
    Adv,
}

impl WnPos {
    pub const ALL: [WnPos; 4] = [WnPos::Noun, WnPos::Verb, WnPos::Adj, WnPos::Adv];

    pub fn letter(self) -> char {
        match self {
            WnPos::Noun => 'n',
            WnPos::Verb => 'v',
            WnPos::Adj => 'a',
            WnPos::Adv => 'r',
        }
    }

    pub fn from_letter(c: char) -> Option<WnPos> {
        match c {
            'n' => Some(WnPos::Noun),
            'v' => Some(WnPos::Verb),
            'a' | 's' => Some(WnPos::Adj),
            'r' => Some(WnPos::Adv),
            _ => None,
        }
    }

    /// File-name stem used by the WNDB distribution.
    pub fn file_stem(self) -> &'static str {
        match self {
            WnPos::Noun => "noun",
            WnPos::Verb => "verb",
            WnPos::Adj => "adj",
            WnPos::Adv => "adv",
        }
    }

    /// Lookup category for a UPOS tag, or `None` for closed-class tags.
    pub fn from_upos(upos: Upos) -> Option<WnPos> {
        match upos {
            Upos::NOUN | Upos::PROPN => Some(WnPos::Noun),
            Upos::VERB | Upos::AUX => Some(WnPos::Verb),
            Upos::ADJ => Some(WnPos::Adj),
            Upos::ADV => Some(WnPos::Adv),
            _ => None,
        }
    }
}

impl fmt::Display for WnPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A synset, identified by `(pos, offset)`. The display name (`lady.n.01`)
/// is carried along when data files were loaded but takes no part in
/// equality, hashing or ordering.
#[derive(Debug, Clone)]
pub struct SynsetKey {
    pub pos: WnPos,
    pub offset: u32,
    pub display: Option<String>,
}

impl SynsetKey {
    pub fn new(pos: WnPos, offset: u32) -> Self {
        SynsetKey {
            pos,
            offset,
            display: None,
        }
    }

    /// Stable identifier, e.g. `n:10243137`.
    pub fn id(&self) -> String {
        format!("{}:{:08}", self.pos, self.offset)
    }

    /// Display name in dot form when known, otherwise the stable identifier.
    pub fn name(&self) -> String {
        self.display.clone().unwrap_or_else(|| self.id())
    }

    /// Underscore serialization of the display name (`weed_v_01`).
    pub fn underscore_name(&self) -> Option<String> {
        self.display.as_ref().map(|d| d.replace('.', "_"))
    }
}

impl PartialEq for SynsetKey {
    fn eq(&self, other: &Self) -> bool {
        self.pos == other.pos && self.offset == other.offset
    }
}

impl Eq for SynsetKey {}

impl Hash for SynsetKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.pos.hash(state);
        self.offset.hash(state);
    }
}

impl PartialOrd for SynsetKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SynsetKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.pos, self.offset).cmp(&(other.pos, other.offset))
    }
}

/// Target of the synset objective: a synset, or the shared `no_syn` class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SynsetLabel {
    NoSyn,
    Key(SynsetKey),
}

impl SynsetLabel {
    /// `no_syn`, the dot-form display name, or the stable id.
    pub fn name(&self) -> String {
        match self {
            SynsetLabel::NoSyn => "no_syn".into(),
            SynsetLabel::Key(k) => k.name(),
        }
    }

    /// Serialized identity: `no_syn` or `n:10243137`.
    pub fn id(&self) -> String {
        match self {
            SynsetLabel::NoSyn => "no_syn".into(),
            SynsetLabel::Key(k) => k.id(),
        }
    }
}

impl fmt::Display for SynsetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SynsetLabel {
    type Err = String;

    /// Parses the identity form produced by [`SynsetLabel::id`], optionally
    /// followed by `=display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "no_syn" {
            return Ok(SynsetLabel::NoSyn);
        }
        let (id, display) = match s.split_once('=') {
            Some((id, d)) => (id, Some(d.to_string())),
            None => (s, None),
        };
        let (pos, off) = id
            .split_once(':')
            .ok_or_else(|| format!("bad synset id {s:?}"))?;
        let mut chars = pos.chars();
        let pos = match (chars.next(), chars.next()) {
            (Some(c), None) => WnPos::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| format!("bad synset pos in {s:?}"))?;
        let offset = off
            .parse()
            .map_err(|_| format!("bad synset offset in {s:?}"))?;
        Ok(SynsetLabel::Key(SynsetKey {
            pos,
            offset,
            display,
        }))
    }
}

impl Serialize for SynsetLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SynsetLabel::Key(SynsetKey {
                display: Some(d), ..
            }) => s.serialize_str(&format!("{}={d}", self.id())),
            _ => s.serialize_str(&self.id()),
        }
    }
}

impl<'de> Deserialize<'de> for SynsetLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// In-memory WordNet lookup tables. Immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct WordnetIndex {
    /// (lemma, pos) → synset offsets, most frequent sense first.
    pub entries: HashMap<(String, WnPos), Vec<u32>>,
    /// (inflected form, pos) → base lemmas from the `.exc` files.
    pub exceptions: HashMap<(String, WnPos), Vec<String>>,
    /// (pos, offset) → lemmas of the synset in data-file order.
    pub data_lemmas: HashMap<(WnPos, u32), Vec<String>>,
    /// Lines skipped during loading.
    pub malformed: Vec<MalformedLine>,
}

impl WordnetIndex {
    pub fn contains(&self, lemma: &str, pos: WnPos) -> bool {
        self.entries.contains_key(&(lemma.to_string(), pos))
    }

    pub fn offsets(&self, lemma: &str, pos: WnPos) -> Option<&[u32]> {
        self.entries
            .get(&(lemma.to_string(), pos))
            .map(Vec::as_slice)
    }

    pub fn has_data(&self) -> bool {
        !self.data_lemmas.is_empty()
    }

    /// Display name: the synset's first lemma, its pos letter, and the
    /// 1-based position of this offset in that lemma's own index entry.
    pub fn display_name(&self, pos: WnPos, offset: u32) -> Option<String> {
        let first = self
            .data_lemmas
            .get(&(pos, offset))?
            .first()?
            .to_lowercase();
        let sense = self
            .offsets(&first, pos)?
            .iter()
            .position(|&o| o == offset)?
            + 1;
        Some(format!("{first}.{}.{sense:02}", pos.letter()))
    }

    pub fn key(&self, pos: WnPos, offset: u32) -> SynsetKey {
        SynsetKey {
            pos,
            offset,
            display: self.display_name(pos, offset),
        }
    }
}

/// The first (most frequent) synset of `lemma`, or `NoSyn`.
pub fn first_synset(lemma: &str, pos: WnPos, idx: &WordnetIndex) -> SynsetLabel {
    match idx.offsets(lemma, pos).and_then(|o| o.first()) {
        Some(&offset) => SynsetLabel::Key(idx.key(pos, offset)),
        None => SynsetLabel::NoSyn,
    }
}

/// Synset label for a surface word, adverbs included.
pub fn synset_label_for_word(form: &str, upos: Upos, idx: &WordnetIndex) -> SynsetLabel {
    synset_label_for_word_with(form, upos, idx, true)
}

/// Closed-class words get `NoSyn`. Open-class words are lowercased, reduced to
/// candidate base forms, and labeled with the first synset of the first
/// candidate that has one.
pub fn synset_label_for_word_with(
    form: &str,
    upos: Upos,
    idx: &WordnetIndex,
    include_adverbs: bool,
) -> SynsetLabel {
    let Some(pos) = WnPos::from_upos(upos) else {
        return SynsetLabel::NoSyn;
    };
    if pos == WnPos::Adv && !include_adverbs {
        return SynsetLabel::NoSyn;
    }
    let form = form.to_lowercase().replace(' ', "_");
    if form.is_empty() {
        return SynsetLabel::NoSyn;
    }
    morphy(&form, pos, idx)
        .iter()
        .map(|lemma| first_synset(lemma, pos, idx))
        .find(|l| *l != SynsetLabel::NoSyn)
        .unwrap_or(SynsetLabel::NoSyn)
}
