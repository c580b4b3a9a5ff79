use std::collections::BTreeMap;

use super::vocab::{tokenize_word_ids, Vocab, CLS, PAD, SEP};
use super::{TokenizerError, IGNORE_LABEL};
use crate::corpus::AnnotatedPair;
use crate::labels::{LabelSpace, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub max_len: usize,
    /// Supervise only the first subtoken of each word.
    pub first_subtoken_only: bool,
}

impl EncodeOptions {
    pub fn new(max_len: usize) -> Self {
        EncodeOptions {
            max_len,
            first_subtoken_only: false,
        }
    }
}

/// One premise–hypothesis pair laid out as
/// `[CLS] premise [SEP] hypothesis [SEP] [PAD]...`, padded to `max_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSequence {
    pub ids: Vec<u32>,
    pub segments: Vec<u8>,
    /// Index into the premise-then-hypothesis word list; `None` on specials.
    pub word_of_token: Vec<Option<usize>>,
    pub labels: BTreeMap<Objective, Vec<i32>>,
    pub loss_mask: Vec<bool>,
    pub nli_gold: u8,
    /// Number of non-PAD positions.
    pub content_len: usize,
    /// Whole words removed by truncation.
    pub truncated_words: usize,
}

impl EncodedSequence {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Copies word labels onto subword positions; specials get [`IGNORE_LABEL`].
pub fn project_labels(
    word_labels: &[i32],
    word_of_token: &[Option<usize>],
) -> Result<Vec<i32>, TokenizerError> {
    word_of_token
        .iter()
        .map(|w| match *w {
            None => Ok(IGNORE_LABEL),
            Some(i) => word_labels
                .get(i)
                .copied()
                .ok_or(TokenizerError::LabelIndex {
                    index: i,
                    len: word_labels.len(),
                }),
        })
        .collect()
}

/// Encodes one annotated pair. Token objectives in `objectives` get label
/// rows; `Objective::Nli` is always carried through `nli_gold`.
///
/// Over-long pairs lose whole words from the end of the longer side (the
/// hypothesis on ties) until everything fits.
pub fn encode_pair(
    p: &AnnotatedPair,
    v: &Vocab,
    space: &LabelSpace,
    objectives: &[Objective],
    opts: EncodeOptions,
) -> Result<EncodedSequence, TokenizerError> {
    if opts.max_len < 8 {
        return Err(TokenizerError::MaxLenTooSmall(opts.max_len));
    }
    let pieces = |words: &mut dyn Iterator<Item = &str>| -> Vec<Vec<u32>> {
        words.map(|w| tokenize_word_ids(w, v)).collect()
    };
    let mut prem = pieces(&mut p.premise_ann.forms());
    let mut hyp = pieces(&mut p.hypothesis_ann.forms());
    let n_prem_words = prem.len();

    let budget = opts.max_len - 3;
    let count = |side: &[Vec<u32>]| side.iter().map(Vec::len).sum::<usize>();
    let (mut prem_len, mut hyp_len) = (count(&prem), count(&hyp));
    let mut truncated_words = 0;
    while prem_len + hyp_len > budget {
        let side = if hyp_len >= prem_len {
            &mut hyp
        } else {
            &mut prem
        };
        let Some(dropped) = side.pop() else { break };
        if hyp_len >= prem_len {
            hyp_len -= dropped.len();
        } else {
            prem_len -= dropped.len();
        }
        truncated_words += 1;
    }
    if prem_len + hyp_len == 0 || prem_len + hyp_len > budget {
        return Err(TokenizerError::EmptyEncoding(p.pair.id.clone()));
    }

    let mut ids = Vec::with_capacity(opts.max_len);
    let mut segments = Vec::with_capacity(opts.max_len);
    let mut word_of_token = Vec::with_capacity(opts.max_len);
    let mut first_piece = Vec::with_capacity(opts.max_len);
    let mut push = |id: u32, seg: u8, word: Option<usize>, first: bool| {
        ids.push(id);
        segments.push(seg);
        word_of_token.push(word);
        first_piece.push(first);
    };
    push(CLS, 0, None, false);
    for (wi, toks) in prem.iter().enumerate() {
        for (k, &t) in toks.iter().enumerate() {
            push(t, 0, Some(wi), k == 0);
        }
    }
    push(SEP, 0, None, false);
    for (wi, toks) in hyp.iter().enumerate() {
        for (k, &t) in toks.iter().enumerate() {
            push(t, 1, Some(n_prem_words + wi), k == 0);
        }
    }
    push(SEP, 1, None, false);
    let content_len = prem_len + hyp_len + 3;
    for _ in content_len..opts.max_len {
        push(PAD, 0, None, false);
    }
    let loss_mask: Vec<bool> = word_of_token.iter().map(Option::is_some).collect();

    let mut labels = BTreeMap::new();
    for &obj in objectives.iter().filter(|o| o.is_token()) {
        let word_labels = space.pair_word_labels(p, obj);
        let mut row = project_labels(&word_labels, &word_of_token)?;
        if opts.first_subtoken_only {
            for (l, &first) in row.iter_mut().zip(&first_piece) {
                if !first {
                    *l = IGNORE_LABEL;
                }
            }
        }
        labels.insert(obj, row);
    }

    Ok(EncodedSequence {
        ids,
        segments,
        word_of_token,
        labels,
        loss_mask,
        nli_gold: p.pair.gold.index() as u8,
        content_len,
        truncated_words,
    })
}

/// [`encode_pair`] over a slice, stopping at the first error.
pub fn encode_pairs(
    pairs: &[AnnotatedPair],
    v: &Vocab,
    space: &LabelSpace,
    objectives: &[Objective],
    opts: EncodeOptions,
) -> Result<Vec<EncodedSequence>, TokenizerError> {
    pairs
        .iter()
        .map(|p| encode_pair(p, v, space, objectives, opts))
        .collect()
}
