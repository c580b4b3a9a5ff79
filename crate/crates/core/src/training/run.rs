use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::log::{EpochRecord, LogEvent, StepRecord, TrainLog};
use super::optim::{AdamW, OptimizerConfig};
use super::schedule::{Schedule, TrainOptions};
use super::TrainError;
use crate::evaluation::predict;
use crate::labels::Objective;
use crate::model::{Batch, Model};
use crate::tokenizer::EncodedSequence;

// Independent ChaCha streams so shuffling and dropout never share draws.
const PRETRAIN_SHUFFLE: u64 = 1;
const PRETRAIN_DROPOUT: u64 = 2;
const FINETUNE_SHUFFLE: u64 = 3;
const FINETUNE_DROPOUT: u64 = 4;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn objective_name(objectives: &[Objective]) -> String {
    objectives
        .iter()
        .map(|o| o.to_string())
        .collect::<Vec<_>>()
        .join("+")
}

fn is_active(name: &str, objectives: &[Objective]) -> bool {
    if name.starts_with("embeddings.") || name.starts_with("layer") {
        return true;
    }
    objectives.iter().any(|o| {
        name.strip_prefix("head.")
            .and_then(|rest| rest.strip_prefix(o.as_str()))
            .is_some_and(|rest| rest.starts_with('.'))
    })
}

struct Epoch {
    mean_loss: f64,
}

/// Runs one pass over `data` in a shuffled order, stepping `optim` per batch.
#[allow(clippy::too_many_arguments)]
fn run_epoch(
    model: &mut Model,
    data: &[EncodedSequence],
    objectives: &[Objective],
    optim: &mut AdamW,
    options: &TrainOptions,
    shuffle: &mut ChaCha8Rng,
    dropout: &mut ChaCha8Rng,
    phase: usize,
    unit_step: &mut usize,
    unit_total: usize,
    log: &mut TrainLog,
) -> Result<Epoch, TrainError> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(shuffle);
    let name = objective_name(objectives);
    let mut sum = 0.0;
    let mut count = 0usize;
    for chunk in order.chunks(options.batch_size) {
        let seqs: Vec<&EncodedSequence> = chunk.iter().map(|&i| &data[i]).collect();
        let batch = Batch::from_sequences(&seqs)?;
        let (losses, grads) =
            model.loss_and_grads(&batch, objectives, options.loss, Some(dropout))?;
        let loss: f64 = losses.values().sum();
        let lr = options
            .lr_schedule
            .rate(optim.config.lr, *unit_step, unit_total);
        *unit_step += 1;
        let step = log.next_step();
        match optim.step(&mut model.weights, &grads, lr, |n| is_active(n, objectives)) {
            Ok(()) if loss.is_finite() => {
                sum += loss;
                count += 1;
                log.events.push(LogEvent::Step(StepRecord {
                    step,
                    phase,
                    objective: name.clone(),
                    loss,
                }));
            }
            Ok(()) | Err(TrainError::NonFiniteGradient) => {
                log::warn!("step {step}: non-finite loss or gradient, update skipped");
                log.events.push(LogEvent::SkippedStep {
                    step,
                    phase,
                    reason: "non-finite loss or gradient".into(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Epoch {
        mean_loss: if count == 0 {
            f64::NAN
        } else {
            sum / count as f64
        },
    })
}

fn check_objectives(
    model: &Model,
    data: &[EncodedSequence],
    objectives: &[Objective],
) -> Result<(), TrainError> {
    for &o in objectives {
        if o.is_token() && !model.weights.token_heads.contains_key(&o) {
            return Err(TrainError::MissingHead(o));
        }
        if o.is_token() {
            if let Some(i) = data.iter().position(|s| !s.labels.contains_key(&o)) {
                return Err(TrainError::MissingLabels {
                    objective: o,
                    sequence: i,
                });
            }
        }
    }
    Ok(())
}

/// Auxiliary-objective pre-training. The NLI head and heads of objectives
/// outside the running phase are left bit-identical.
pub fn pretrain(
    model: &Model,
    data: &[EncodedSequence],
    schedule: &Schedule,
    opt: &OptimizerConfig,
    options: &TrainOptions,
    seed: u64,
) -> Result<(Model, TrainLog), TrainError> {
    schedule.validate()?;
    opt.validate()?;
    options.validate()?;
    let config = serde_json::json!({
        "stage": "pretrain",
        "model": model.config,
        "schedule": schedule,
        "optimizer": opt,
        "options": options,
    });
    let mut log = TrainLog::new(seed, config);
    let mut model = model.clone();
    if schedule.phases.is_empty() {
        return Ok((model, log));
    }
    check_objectives(&model, data, &schedule.objectives())?;
    if data.is_empty() {
        return Err(TrainError::EmptyData("pre-training"));
    }
    let start = Instant::now();
    let mut shuffle = stream(seed, PRETRAIN_SHUFFLE);
    let mut dropout = stream(seed, PRETRAIN_DROPOUT);
    let per_epoch = data.len().div_ceil(options.batch_size);
    for (phase, (objectives, epochs)) in schedule.units().into_iter().enumerate() {
        log::info!(
            "pre-training phase {phase}: {} for {epochs} epochs",
            objective_name(&objectives)
        );
        let mut optim = AdamW::new(*opt, &model.weights);
        let mut unit_step = 0;
        for epoch in 0..epochs {
            let e = run_epoch(
                &mut model,
                data,
                &objectives,
                &mut optim,
                options,
                &mut shuffle,
                &mut dropout,
                phase,
                &mut unit_step,
                epochs * per_epoch,
                &mut log,
            )?;
            log::info!("  epoch {epoch}: mean loss {:.5}", e.mean_loss);
            log.events.push(LogEvent::Epoch(EpochRecord {
                phase,
                objective: objective_name(&objectives),
                epoch,
                mean_loss: e.mean_loss,
                dev_accuracy: None,
            }));
        }
    }
    log.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((model, log))
}

/// NLI fine-tuning of the whole network at the [CLS] head. Returns the
/// checkpoint with the best dev accuracy (earliest on ties); with an empty
/// dev set, the final one.
pub fn finetune(
    model: &Model,
    train: &[EncodedSequence],
    dev: &[EncodedSequence],
    opt: &OptimizerConfig,
    epochs: usize,
    options: &TrainOptions,
    seed: u64,
) -> Result<(Model, TrainLog), TrainError> {
    if epochs == 0 {
        return Err(TrainError::InvalidConfig {
            field: "finetune.epochs",
            reason: "must be at least 1".into(),
        });
    }
    opt.validate()?;
    options.validate()?;
    if train.is_empty() {
        return Err(TrainError::EmptyData("fine-tuning"));
    }
    let config = serde_json::json!({
        "stage": "finetune",
        "model": model.config,
        "optimizer": opt,
        "epochs": epochs,
        "options": options,
    });
    let mut log = TrainLog::new(seed, config);
    let start = Instant::now();
    let mut model = model.clone();
    let mut shuffle = stream(seed, FINETUNE_SHUFFLE);
    let mut dropout = stream(seed, FINETUNE_DROPOUT);
    let mut optim = AdamW::new(*opt, &model.weights);
    let objectives = [Objective::Nli];
    let total = epochs * train.len().div_ceil(options.batch_size);
    let mut unit_step = 0;
    let mut best: Option<(f64, Model)> = None;
    let mut since_best = 0;
    for epoch in 0..epochs {
        let e = run_epoch(
            &mut model,
            train,
            &objectives,
            &mut optim,
            options,
            &mut shuffle,
            &mut dropout,
            0,
            &mut unit_step,
            total,
            &mut log,
        )?;
        let dev_accuracy = if dev.is_empty() {
            None
        } else {
            let preds = predict(&model, dev, options.batch_size)?;
            let correct = preds
                .iter()
                .zip(dev)
                .filter(|(p, s)| **p == s.nli_gold)
                .count();
            Some(correct as f64 / dev.len() as f64)
        };
        log::info!(
            "  epoch {epoch}: mean loss {:.5}, dev accuracy {:?}",
            e.mean_loss,
            dev_accuracy
        );
        log.events.push(LogEvent::Epoch(EpochRecord {
            phase: 0,
            objective: Objective::Nli.to_string(),
            epoch,
            mean_loss: e.mean_loss,
            dev_accuracy,
        }));
        if let Some(acc) = dev_accuracy {
            if best.as_ref().is_none_or(|(b, _)| acc > *b) {
                log.events.push(LogEvent::BestCheckpoint {
                    epoch,
                    dev_accuracy: acc,
                });
                best = Some((acc, model.clone()));
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= options.patience {
                    log.events.push(LogEvent::EarlyStop { epoch });
                    break;
                }
            }
        }
    }
    log.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((best.map(|(_, m)| m).unwrap_or(model), log))
}
