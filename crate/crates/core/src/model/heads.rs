use std::collections::BTreeMap;

use ndarray::{s, Array2, Array3, Axis};
use rand_chacha::ChaCha8Rng;

use super::batch::Batch;
use super::encoder::Tape;
use super::loss::{loss, LossKind};
use super::ops;
use super::weights::Weights;
use super::{Model, ModelError};
use crate::labels::Objective;

impl Model {
    /// Per-position logits of a token head, `[batch, L, classes]`.
    pub fn token_logits(
        &self,
        hidden: &Array3<f64>,
        objective: Objective,
    ) -> Result<Array3<f64>, ModelError> {
        let head = self
            .weights
            .token_heads
            .get(&objective)
            .ok_or(ModelError::UnknownObjective(objective))?;
        let (b, l, h) = hidden.dim();
        let flat = hidden
            .view()
            .into_shape_with_order((b * l, h))
            .map_err(|e| ModelError::Shape(e.to_string()))?;
        let out = ops::linear(&flat, head);
        let c = out.ncols();
        Ok(out.into_shape_with_order((b, l, c)).expect("row-major"))
    }

    /// NLI logits from position 0 only, `[batch, 3]`.
    pub fn nli_logits(&self, hidden: &Array3<f64>) -> Array2<f64> {
        let cls = hidden.index_axis(Axis(1), 0);
        ops::linear(&cls, &self.weights.nli_head)
    }

    /// Sum over `objectives` of each objective's mean loss on `b`, with the
    /// gradient for every parameter. Dropout is active iff `rng` is given.
    pub fn loss_and_grads(
        &self,
        b: &Batch,
        objectives: &[Objective],
        kind: LossKind,
        rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(BTreeMap<Objective, f64>, Weights), ModelError> {
        let mut tape = Tape::new();
        let hidden = self.forward_recorded(b, rng, &mut tape)?;
        let (rows, len, h) = hidden.dim();
        let flat = hidden
            .view()
            .into_shape_with_order((rows * len, h))
            .expect("row-major");
        let mut d_hidden = Array3::<f64>::zeros((rows, len, h));
        let mut head_grads = self.weights.zeros_like();
        let mut losses = BTreeMap::new();
        let mask: Vec<bool> = b.loss_mask.iter().copied().collect();

        for &obj in objectives {
            if obj == Objective::Nli {
                let cls = hidden.index_axis(Axis(1), 0);
                let logits = ops::linear(&cls, &self.weights.nli_head);
                let labels: Vec<i32> = b.nli_gold.iter().map(|&g| g as i32).collect();
                let (l, dz) = loss(&logits.view(), &labels, &vec![true; rows], kind)?;
                let d_cls = ops::linear_backward(
                    &cls,
                    &dz.view(),
                    &self.weights.nli_head,
                    &mut head_grads.nli_head,
                );
                let mut slot = d_hidden.slice_mut(s![.., 0, ..]);
                slot += &d_cls;
                losses.insert(obj, l);
            } else {
                let head = self
                    .weights
                    .token_heads
                    .get(&obj)
                    .ok_or(ModelError::UnknownObjective(obj))?;
                let labels = b.labels.get(&obj).ok_or(ModelError::MissingLabels(obj))?;
                let labels: Vec<i32> = labels.iter().copied().collect();
                let logits = ops::linear(&flat, head);
                let (l, dz) = loss(&logits.view(), &labels, &mask, kind)?;
                let gh = head_grads
                    .token_heads
                    .get_mut(&obj)
                    .expect("same structure");
                let d = ops::linear_backward(&flat, &dz.view(), head, gh);
                d_hidden += &d.into_shape_with_order((rows, len, h)).expect("row-major");
                losses.insert(obj, l);
            }
        }
        let mut grads = self.backward(&mut tape, &d_hidden)?;
        for (obj, lin) in head_grads.token_heads {
            grads.token_heads.insert(obj, lin);
        }
        grads.nli_head = head_grads.nli_head;
        Ok((losses, grads))
    }

    /// Forward-only loss matching [`Model::loss_and_grads`].
    pub fn loss_value(
        &self,
        b: &Batch,
        objectives: &[Objective],
        kind: LossKind,
    ) -> Result<f64, ModelError> {
        let hidden = self.forward(b, None)?;
        let mask: Vec<bool> = b.loss_mask.iter().copied().collect();
        let mut total = 0.0;
        for &obj in objectives {
            if obj == Objective::Nli {
                let logits = self.nli_logits(&hidden);
                let labels: Vec<i32> = b.nli_gold.iter().map(|&g| g as i32).collect();
                total += loss(&logits.view(), &labels, &vec![true; b.rows()], kind)?.0;
            } else {
                let logits = self.token_logits(&hidden, obj)?;
                let (rows, len, c) = logits.dim();
                let flat = logits
                    .into_shape_with_order((rows * len, c))
                    .expect("row-major");
                let labels = b.labels.get(&obj).ok_or(ModelError::MissingLabels(obj))?;
                let labels: Vec<i32> = labels.iter().copied().collect();
                total += loss(&flat.view(), &labels, &mask, kind)?.0;
            }
        }
        Ok(total)
    }
}
