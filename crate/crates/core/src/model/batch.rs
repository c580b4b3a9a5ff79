use std::collections::BTreeMap;

use ndarray::Array2;

use super::ModelError;
use crate::labels::Objective;
use crate::tokenizer::{EncodedSequence, PAD};

/// Rectangular stack of encoded sequences, cut to the longest content length
/// in the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub ids: Array2<u32>,
    pub segments: Array2<u8>,
    /// True exactly on non-PAD positions. Attention reads this, not `ids`.
    pub attention_mask: Array2<bool>,
    pub labels: BTreeMap<Objective, Array2<i32>>,
    pub loss_mask: Array2<bool>,
    pub nli_gold: Vec<u8>,
}

impl Batch {
    pub fn from_sequences(seqs: &[&EncodedSequence]) -> Result<Batch, ModelError> {
        let len = seqs
            .iter()
            .map(|s| s.content_len)
            .max()
            .ok_or(ModelError::EmptyBatch)?;
        Self::with_len(seqs, len)
    }

    /// Stack with an explicit sequence length (≥ every content length).
    pub fn with_len(seqs: &[&EncodedSequence], len: usize) -> Result<Batch, ModelError> {
        if seqs.is_empty() {
            return Err(ModelError::EmptyBatch);
        }
        let b = seqs.len();
        let objectives: Vec<Objective> = seqs[0].labels.keys().copied().collect();
        let mut ids = Array2::from_elem((b, len), PAD);
        let mut segments = Array2::zeros((b, len));
        let mut loss_mask = Array2::from_elem((b, len), false);
        let mut labels: BTreeMap<Objective, Array2<i32>> = objectives
            .iter()
            .map(|&o| {
                (
                    o,
                    Array2::from_elem((b, len), crate::tokenizer::IGNORE_LABEL),
                )
            })
            .collect();
        for (r, s) in seqs.iter().enumerate() {
            if s.content_len > len {
                return Err(ModelError::Shape(format!(
                    "sequence {r} has {} content tokens, batch length is {len}",
                    s.content_len
                )));
            }
            let n = len.min(s.ids.len());
            for t in 0..n {
                ids[[r, t]] = s.ids[t];
                segments[[r, t]] = s.segments[t];
                loss_mask[[r, t]] = s.loss_mask[t];
            }
            for o in &objectives {
                let row = s.labels.get(o).ok_or_else(|| {
                    ModelError::Shape(format!("sequence {r} lacks labels for {o}"))
                })?;
                let dst = labels.get_mut(o).expect("inserted above");
                for t in 0..n {
                    dst[[r, t]] = row[t];
                }
            }
        }
        let attention_mask = ids.mapv(|id| id != PAD);
        Ok(Batch {
            ids,
            segments,
            attention_mask,
            labels,
            loss_mask,
            nli_gold: seqs.iter().map(|s| s.nli_gold).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.ids.nrows()
    }

    pub fn seq_len(&self) -> usize {
        self.ids.ncols()
    }
}
