//! Small post-LN transformer encoder with position-shared token heads and a
//! [CLS] head for NLI. Everything is f64 with hand-written backward passes.

mod batch;
mod checkpoint;
mod config;
mod encoder;
mod gradcheck;
mod heads;
mod loss;
pub mod ops;
mod weights;

pub use batch::Batch;
pub use checkpoint::{FORMAT_VERSION, MAGIC};
pub use config::{ModelConfig, NLI_CLASSES, SEGMENTS};
pub use encoder::Tape;
pub use gradcheck::{grad_check, grad_check_fn, rel_err, GradCheckReport, TensorCheck};
pub use loss::{loss, LossKind};
pub use weights::{EncoderLayer, LayerNorm, Linear, TensorMut, TensorRef, Weights, INIT_STD};

use crate::labels::Objective;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("input out of range: {0}")]
    InputOutOfRange(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("backward called without a recorded forward pass")]
    NoForward,
    #[error("every position is masked out of the loss")]
    AllMasked,
    #[error("label {label} outside {classes} classes")]
    LabelOutOfRange { label: i32, classes: usize },
    #[error("no head registered for objective {0}")]
    UnknownObjective(Objective),
    #[error("batch carries no labels for objective {0}")]
    MissingLabels(Objective),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub config: ModelConfig,
    pub weights: Weights,
}

pub fn init_model(cfg: &ModelConfig) -> Result<Model, ModelError> {
    cfg.validate()?;
    Ok(Model {
        config: cfg.clone(),
        weights: Weights::init(cfg),
    })
}

impl Model {
    pub fn param_count(&self) -> usize {
        self.weights.param_count()
    }
}
