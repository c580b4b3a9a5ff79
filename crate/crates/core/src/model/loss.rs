use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::ops::{sigmoid, softplus, CompensatedSum};
use super::ModelError;
use crate::tokenizer::IGNORE_LABEL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// One-vs-all binary cross-entropy against one-hot targets.
    #[default]
    BceOnehot,
    SoftmaxCe,
}

impl std::str::FromStr for LossKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bce_onehot" => Ok(LossKind::BceOnehot),
            "softmax_ce" => Ok(LossKind::SoftmaxCe),
            other => Err(format!("unknown loss kind '{other}'")),
        }
    }
}

/// Mean loss over the rows of `logits` (`N × C`) whose mask is set and whose
/// label is not `IGNORE_LABEL`, plus `dL/dlogits`. Excluded rows get zero
/// gradient.
pub fn loss(
    logits: &ArrayView2<f64>,
    labels: &[i32],
    mask: &[bool],
    kind: LossKind,
) -> Result<(f64, Array2<f64>), ModelError> {
    let (n, c) = logits.dim();
    if labels.len() != n || mask.len() != n {
        return Err(ModelError::Shape(format!(
            "{n} logit rows, {} labels, {} mask entries",
            labels.len(),
            mask.len()
        )));
    }
    let active: Vec<usize> = (0..n)
        .filter(|&i| mask[i] && labels[i] != IGNORE_LABEL)
        .collect();
    if active.is_empty() {
        return Err(ModelError::AllMasked);
    }
    let scale = 1.0 / active.len() as f64;
    let mut grad = Array2::zeros((n, c));
    let mut total = CompensatedSum::default();
    for &i in &active {
        let y = labels[i];
        if y < 0 || y as usize >= c {
            return Err(ModelError::LabelOutOfRange {
                label: y,
                classes: c,
            });
        }
        let y = y as usize;
        let z = logits.row(i);
        match kind {
            LossKind::BceOnehot => {
                for (j, &zj) in z.iter().enumerate() {
                    let t = if j == y { 1.0 } else { 0.0 };
                    // softplus(z) - z == softplus(-z), without the cancellation
                    total.add(if j == y { softplus(-zj) } else { softplus(zj) });
                    grad[[i, j]] = (sigmoid(zj) - t) * scale;
                }
            }
            LossKind::SoftmaxCe => {
                let max = z.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
                let sum: f64 = z.iter().map(|&v| (v - max).exp()).sum();
                let lse = max + sum.ln();
                total.add(lse - z[y]);
                for (j, &zj) in z.iter().enumerate() {
                    let t = if j == y { 1.0 } else { 0.0 };
                    grad[[i, j]] = ((zj - lse).exp() - t) * scale;
                }
            }
        }
    }
    Ok((total.value() * scale, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn uniform_softmax_is_ln_c() {
        let z = Array2::zeros((2, 5));
        let (l, _) = loss(&z.view(), &[1, 4], &[true, true], LossKind::SoftmaxCe).unwrap();
        assert!((l - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn confident_one_hot_goes_to_zero() {
        let z = array![[60.0, -60.0, -60.0]];
        for kind in [LossKind::BceOnehot, LossKind::SoftmaxCe] {
            let (l, _) = loss(&z.view(), &[0], &[true], kind).unwrap();
            assert!(l < 1e-20, "{kind:?} {l}");
        }
    }

    #[test]
    fn masked_rows_are_excluded() {
        let z = array![[1.0, 2.0], [100.0, -100.0]];
        let (a, g) = loss(&z.view(), &[0, 1], &[true, false], LossKind::SoftmaxCe).unwrap();
        let (b, _) = loss(
            &z.slice(ndarray::s![0..1, ..]),
            &[0],
            &[true],
            LossKind::SoftmaxCe,
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(g.row(1).iter().all(|&v| v == 0.0));
        let (c, _) = loss(
            &z.view(),
            &[0, IGNORE_LABEL],
            &[true, true],
            LossKind::SoftmaxCe,
        )
        .unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn all_masked_is_an_error() {
        let z = Array2::zeros((2, 3));
        assert!(matches!(
            loss(&z.view(), &[0, 1], &[false, false], LossKind::BceOnehot),
            Err(ModelError::AllMasked)
        ));
    }

    #[test]
    fn label_out_of_range() {
        let z = Array2::zeros((1, 3));
        assert!(loss(&z.view(), &[3], &[true], LossKind::BceOnehot).is_err());
    }
}
