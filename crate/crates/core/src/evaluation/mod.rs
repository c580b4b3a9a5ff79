//! NLI metrics, the configuration benchmark matrix, and report rendering.

mod bench;
mod metrics;
mod report;

pub use bench::{
    benchmark_matrix, BenchConfig, BenchData, BenchSetup, ReportRow, RunReport, SeedOutcome,
    Summary,
};
pub use metrics::{f1_per_class, Confusion, Metrics};
pub use report::{parse_csv, render_report, CsvRow, ReferenceRow, ReportFormat, REFERENCE_ROWS};

use crate::corpus::Gold;
use crate::model::{Batch, Model, ModelError};
use crate::tokenizer::EncodedSequence;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("empty test set")]
    EmptyTestSet,
    #[error("{gold} gold labels but {pred} predictions")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("benchmark needs at least one configuration")]
    NoConfigs,
    #[error("benchmark needs at least one seed")]
    NoSeeds,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Argmax of the NLI logits (lowest class index on ties), dropout off.
pub fn predict(
    model: &Model,
    seqs: &[EncodedSequence],
    batch_size: usize,
) -> Result<Vec<u8>, ModelError> {
    let mut out = Vec::with_capacity(seqs.len());
    for chunk in seqs.chunks(batch_size.max(1)) {
        let refs: Vec<&EncodedSequence> = chunk.iter().collect();
        let batch = Batch::from_sequences(&refs)?;
        let hidden = model.forward(&batch, None)?;
        for row in model.nli_logits(&hidden).rows() {
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            out.push(best as u8);
        }
    }
    Ok(out)
}

pub fn evaluate(
    model: &Model,
    testset: &[EncodedSequence],
    batch_size: usize,
) -> Result<Metrics, EvalError> {
    if testset.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let pred = predict(model, testset, batch_size)?;
    let to_gold = |i: u8| Gold::from_index(i as usize).expect("class index below 3");
    let gold: Vec<Gold> = testset.iter().map(|s| to_gold(s.nli_gold)).collect();
    let pred: Vec<Gold> = pred.into_iter().map(to_gold).collect();
    Metrics::from_predictions(&gold, &pred)
}
