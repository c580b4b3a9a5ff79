use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::labels::Objective;
use crate::model::LossKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub objective: Objective,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    /// Each phase runs to completion, in order, with a fresh optimizer.
    #[default]
    Sequential,
    /// One phase minimising the unweighted sum of every listed objective's
    /// loss, for the largest epoch count listed.
    JointSum,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub phases: Vec<Phase>,
    #[serde(default)]
    pub combine: CombineMode,
}

impl Schedule {
    /// Sequential phases of `epochs` each, in the given order.
    pub fn sequential(objectives: &[Objective], epochs: usize) -> Self {
        Schedule {
            phases: objectives
                .iter()
                .map(|&objective| Phase { objective, epochs })
                .collect(),
            combine: CombineMode::Sequential,
        }
    }

    pub fn joint(objectives: &[Objective], epochs: usize) -> Self {
        Schedule {
            combine: CombineMode::JointSum,
            ..Self::sequential(objectives, epochs)
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        for p in &self.phases {
            if p.epochs == 0 {
                return Err(TrainError::InvalidConfig {
                    field: "schedule.epochs",
                    reason: format!("phase {} has zero epochs", p.objective),
                });
            }
            if !p.objective.is_token() {
                return Err(TrainError::InvalidConfig {
                    field: "schedule.phases",
                    reason: "NLI is trained by fine-tuning, not as a pre-training phase".into(),
                });
            }
        }
        if self.combine == CombineMode::JointSum {
            let mut seen = std::collections::BTreeSet::new();
            if let Some(p) = self.phases.iter().find(|p| !seen.insert(p.objective)) {
                return Err(TrainError::InvalidConfig {
                    field: "schedule.phases",
                    reason: format!("{} listed twice in a joint schedule", p.objective),
                });
            }
        }
        Ok(())
    }

    /// Training units actually run: one per phase when sequential, a single
    /// combined unit when joint.
    pub fn units(&self) -> Vec<(Vec<Objective>, usize)> {
        match self.combine {
            CombineMode::Sequential => self
                .phases
                .iter()
                .map(|p| (vec![p.objective], p.epochs))
                .collect(),
            CombineMode::JointSum if self.phases.is_empty() => Vec::new(),
            CombineMode::JointSum => vec![(
                self.phases.iter().map(|p| p.objective).collect(),
                self.phases.iter().map(|p| p.epochs).max().unwrap_or(0),
            )],
        }
    }

    pub fn objectives(&self) -> Vec<Objective> {
        let mut v: Vec<Objective> = self.phases.iter().map(|p| p.objective).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSchedule {
    #[default]
    Constant,
    /// Linear decay from the base rate to zero over each phase.
    Linear,
}

impl LrSchedule {
    pub fn rate(self, base: f64, step: usize, total: usize) -> f64 {
        match self {
            LrSchedule::Constant => base,
            LrSchedule::Linear => base * (1.0 - step as f64 / total.max(1) as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub batch_size: usize,
    pub loss: LossKind,
    pub lr_schedule: LrSchedule,
    /// Fine-tuning stops after this many epochs without a dev improvement.
    pub patience: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            batch_size: 32,
            loss: LossKind::BceOnehot,
            lr_schedule: LrSchedule::Constant,
            patience: 3,
        }
    }
}

impl TrainOptions {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig {
                field: "batch_size",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}
