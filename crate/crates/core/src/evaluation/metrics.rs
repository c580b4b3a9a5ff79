use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::Gold;

/// `confusion[gold][pred]`, classes in `Gold::index` order.
pub type Confusion = [[u64; 3]; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// Indexed by `Gold::index`.
    pub f1: [f64; 3],
    pub support: [u64; 3],
    pub confusion: Confusion,
}

impl Metrics {
    pub fn from_predictions(gold: &[Gold], pred: &[Gold]) -> Result<Metrics, EvalError> {
        if gold.is_empty() {
            return Err(EvalError::EmptyTestSet);
        }
        if gold.len() != pred.len() {
            return Err(EvalError::LengthMismatch {
                gold: gold.len(),
                pred: pred.len(),
            });
        }
        let mut confusion = [[0u64; 3]; 3];
        for (g, p) in gold.iter().zip(pred) {
            confusion[g.index()][p.index()] += 1;
        }
        Ok(Metrics::from_confusion(confusion))
    }

    pub fn from_confusion(confusion: Confusion) -> Metrics {
        let total: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..3).map(|i| confusion[i][i]).sum();
        let support = [0, 1, 2].map(|i| confusion[i].iter().sum());
        Metrics {
            accuracy: if total == 0 {
                0.0
            } else {
                correct as f64 / total as f64
            },
            f1: Gold::ALL.map(|g| f1_per_class(&confusion, g)),
            support,
            confusion,
        }
    }

    pub fn f1_of(&self, class: Gold) -> f64 {
        self.f1[class.index()]
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..3).map(|i| self.confusion[i][i]).sum()
    }
}

/// Harmonic mean of precision and recall for `class`; 0 whenever a ratio
/// would divide by zero.
pub fn f1_per_class(confusion: &Confusion, class: Gold) -> f64 {
    let c = class.index();
    let tp = confusion[c][c];
    let fp: u64 = (0..3).filter(|&g| g != c).map(|g| confusion[g][c]).sum();
    let fn_: u64 = (0..3).filter(|&p| p != c).map(|p| confusion[c][p]).sum();
    if tp + fp == 0 || tp + fn_ == 0 {
        return 0.0;
    }
    let p = tp as f64 / (tp + fp) as f64;
    let r = tp as f64 / (tp + fn_) as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conf_for(tp: u64, fp: u64, fn_: u64) -> Confusion {
        // Class 0 with the given counts; errors land on class 1.
        let mut c = [[0; 3]; 3];
        c[0][0] = tp;
        c[1][0] = fp;
        c[0][1] = fn_;
        c
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1_per_class(&conf_for(5, 0, 0), Gold::Entailment), 1.0);
        assert_eq!(f1_per_class(&conf_for(0, 4, 0), Gold::Entailment), 0.0);
        assert_eq!(f1_per_class(&conf_for(0, 0, 0), Gold::Entailment), 0.0);
        let f = f1_per_class(&conf_for(3, 1, 2), Gold::Entailment);
        assert!((f - 2.0 * 0.45 / 1.35).abs() < 1e-15);
    }

    #[test]
    fn single_class_predictor_on_balanced_set() {
        let gold: Vec<Gold> = Gold::ALL
            .iter()
            .flat_map(|&g| std::iter::repeat_n(g, 4))
            .collect();
        let pred = vec![Gold::Neutral; gold.len()];
        let m = Metrics::from_predictions(&gold, &pred).unwrap();
        assert!((m.accuracy - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.f1_of(Gold::Neutral), 0.5);
        assert_eq!(m.f1_of(Gold::Entailment), 0.0);
        assert_eq!(m.f1_of(Gold::Contradiction), 0.0);
        assert_eq!(m.support, [4, 4, 4]);
    }

    #[test]
    fn perfect_predictions() {
        let gold = [Gold::Entailment, Gold::Neutral, Gold::Contradiction];
        let m = Metrics::from_predictions(&gold, &gold).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.f1, [1.0; 3]);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(
            Metrics::from_predictions(&[], &[]),
            Err(EvalError::EmptyTestSet)
        ));
    }
}
