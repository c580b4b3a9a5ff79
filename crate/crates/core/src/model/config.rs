use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::labels::Objective;

/// Number of segment ids (premise = 0, hypothesis = 1).
pub const SEGMENTS: usize = 2;

/// Classes of the NLI head.
pub const NLI_CLASSES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub layers: usize,
    pub heads: usize,
    pub hidden: usize,
    pub ff_mult: usize,
    pub vocab_size: usize,
    pub max_len: usize,
    pub dropout: f64,
    /// Token objective → number of classes. The NLI head is always present.
    pub head_dims: BTreeMap<Objective, usize>,
    pub seed: u64,
}

impl ModelConfig {
    /// CPU-trainable default: 2 layers, 4 heads, hidden 64.
    pub fn desk(vocab_size: usize, head_dims: BTreeMap<Objective, usize>) -> Self {
        ModelConfig {
            layers: 2,
            heads: 4,
            hidden: 64,
            ff_mult: 4,
            vocab_size,
            max_len: 64,
            dropout: 0.1,
            head_dims,
            seed: 0,
        }
    }

    /// bert-base dimensions (12 layers, 12 heads, hidden 768). Recorded for
    /// reference; far too large to train here.
    pub fn base_scale(vocab_size: usize, head_dims: BTreeMap<Objective, usize>) -> Self {
        ModelConfig {
            layers: 12,
            heads: 12,
            hidden: 768,
            ff_mult: 4,
            vocab_size,
            max_len: 512,
            dropout: 0.1,
            head_dims,
            seed: 0,
        }
    }

    pub fn head_dim(&self) -> usize {
        self.hidden / self.heads
    }

    pub fn ff_dim(&self) -> usize {
        self.hidden * self.ff_mult
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad =
            |field: &'static str, reason: String| Err(ModelError::InvalidConfig { field, reason });
        if self.layers == 0 {
            return bad("layers", "must be at least 1".into());
        }
        if self.heads == 0 {
            return bad("heads", "must be at least 1".into());
        }
        if self.hidden == 0 || !self.hidden.is_multiple_of(self.heads) {
            return bad(
                "hidden",
                format!(
                    "{} is not a positive multiple of heads ({})",
                    self.hidden, self.heads
                ),
            );
        }
        if self.ff_mult == 0 {
            return bad("ff_mult", "must be at least 1".into());
        }
        if self.vocab_size < 5 {
            return bad(
                "vocab_size",
                format!(
                    "{} leaves no room beside the special tokens",
                    self.vocab_size
                ),
            );
        }
        if self.max_len < 8 {
            return bad("max_len", format!("{} is below 8", self.max_len));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout", format!("{} is outside [0, 1)", self.dropout));
        }
        for (obj, &c) in &self.head_dims {
            if !obj.is_token() {
                return bad("head_dims", format!("{obj} is not a token objective"));
            }
            if c < 2 {
                return bad(
                    "head_dims",
                    format!("{obj} needs at least 2 classes, got {c}"),
                );
            }
        }
        Ok(())
    }

    /// Closed-form parameter count.
    pub fn param_count(&self) -> usize {
        let h = self.hidden;
        let f = self.ff_dim();
        let embeddings = (self.vocab_size + self.max_len + SEGMENTS) * h + 2 * h;
        let per_layer = 4 * h * h + 3 * h + (h * f + f) + (f * h + h) + 2 * 2 * h;
        let heads: usize = self.head_dims.values().map(|&c| h * c + c).sum();
        embeddings + self.layers * per_layer + heads + h * NLI_CLASSES + NLI_CLASSES
    }
}
