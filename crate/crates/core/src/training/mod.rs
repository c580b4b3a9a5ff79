//! AdamW, pre-training schedules over the token objectives, and NLI
//! fine-tuning with best-dev checkpoint selection.

mod log;
mod optim;
mod run;
mod schedule;

pub use self::log::{config_hash, EpochRecord, LogEvent, LogHeader, StepRecord, TrainLog};
pub use optim::{adamw_step, AdamW, OptimizerConfig};
pub use run::{finetune, pretrain};
pub use schedule::{CombineMode, LrSchedule, Phase, Schedule, TrainOptions};

use crate::labels::Objective;
use crate::model::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("invalid training config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("model has no head for objective {0}")]
    MissingHead(Objective),
    #[error("sequence {sequence} has no labels for objective {objective}")]
    MissingLabels {
        objective: Objective,
        sequence: usize,
    },
    #[error("no training data for {0}")]
    EmptyData(&'static str),
    #[error("non-finite gradient")]
    NonFiniteGradient,
    #[error(transparent)]
    Model(#[from] ModelError),
}
