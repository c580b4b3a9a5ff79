use serde::{Deserialize, Serialize};

use super::metrics::Metrics;
use super::{evaluate, EvalError};
use crate::corpus::Gold;
use crate::labels::Objective;
use crate::model::{init_model, ModelConfig};
use crate::tokenizer::EncodedSequence;
use crate::training::{finetune, pretrain, CombineMode, OptimizerConfig, Schedule, TrainOptions};

pub const BASELINE_NAME: &str = "No additional pretraining";

/// A named pre-training configuration; an empty schedule is the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub name: String,
    pub schedule: Schedule,
}

impl BenchConfig {
    pub fn baseline() -> Self {
        BenchConfig {
            name: BASELINE_NAME.into(),
            schedule: Schedule::default(),
        }
    }

    /// Parses names such as `POS+Syn` or `baseline`; objectives run in the
    /// listed order.
    pub fn parse(name: &str, epochs: usize, combine: CombineMode) -> Result<Self, String> {
        let trimmed = name.trim();
        if ["baseline", "none", BASELINE_NAME]
            .iter()
            .any(|b| b.eq_ignore_ascii_case(trimmed))
        {
            return Ok(Self::baseline());
        }
        let objectives = trimmed
            .split('+')
            .map(|part| match part.trim().to_ascii_uppercase().as_str() {
                "POS" => Ok(Objective::Pos),
                "PP" => Ok(Objective::Parent),
                "SYN" => Ok(Objective::Synset),
                other => Err(format!(
                    "unknown objective '{other}' in configuration '{name}'"
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let schedule = match combine {
            CombineMode::Sequential => Schedule::sequential(&objectives, epochs),
            CombineMode::JointSum => Schedule::joint(&objectives, epochs),
        };
        Ok(BenchConfig {
            name: trimmed.to_string(),
            schedule,
        })
    }

    /// Baseline plus every non-empty combination of POS, PP and Syn.
    pub fn standard_matrix(epochs: usize, combine: CombineMode) -> Vec<BenchConfig> {
        [
            "baseline",
            "POS",
            "PP",
            "POS+PP",
            "Syn",
            "POS+Syn",
            "PP+Syn",
            "POS+PP+Syn",
        ]
        .iter()
        .map(|n| Self::parse(n, epochs, combine).expect("known names"))
        .collect()
    }
}

pub struct BenchData<'a> {
    pub train: &'a [EncodedSequence],
    pub dev: &'a [EncodedSequence],
    pub test: &'a [EncodedSequence],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSetup {
    /// `seed` is overridden per run.
    pub model: ModelConfig,
    pub pretrain_opt: OptimizerConfig,
    pub finetune_opt: OptimizerConfig,
    pub finetune_epochs: usize,
    pub options: TrainOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: f64,
    pub f1_contradiction: f64,
    pub f1_entailment: f64,
    pub f1_neutral: f64,
}

impl Summary {
    fn of(m: &Metrics) -> Summary {
        Summary {
            accuracy: m.accuracy,
            f1_contradiction: m.f1_of(Gold::Contradiction),
            f1_entailment: m.f1_of(Gold::Entailment),
            f1_neutral: m.f1_of(Gold::Neutral),
        }
    }

    fn fields(&self) -> [f64; 4] {
        [
            self.accuracy,
            self.f1_contradiction,
            self.f1_entailment,
            self.f1_neutral,
        ]
    }

    fn from_fields(f: [f64; 4]) -> Summary {
        Summary {
            accuracy: f[0],
            f1_contradiction: f[1],
            f1_entailment: f[2],
            f1_neutral: f[3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub metrics: Option<Metrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub config_name: String,
    pub combine: CombineMode,
    pub seeds: Vec<SeedOutcome>,
    /// Mean and sample standard deviation over successful seeds.
    pub mean: Option<Summary>,
    pub std: Option<Summary>,
}

impl ReportRow {
    pub fn new(config_name: String, combine: CombineMode, seeds: Vec<SeedOutcome>) -> Self {
        let ok: Vec<Summary> = seeds
            .iter()
            .filter_map(|s| s.metrics.as_ref())
            .map(Summary::of)
            .collect();
        let (mean, std) = if ok.is_empty() {
            (None, None)
        } else {
            let n = ok.len() as f64;
            let mut mean = [0.0; 4];
            for s in &ok {
                for (m, v) in mean.iter_mut().zip(s.fields()) {
                    *m += v / n;
                }
            }
            let mut var = [0.0; 4];
            if ok.len() > 1 {
                for s in &ok {
                    for ((acc, v), m) in var.iter_mut().zip(s.fields()).zip(mean) {
                        *acc += (v - m).powi(2) / (n - 1.0);
                    }
                }
            }
            (
                Some(Summary::from_fields(mean)),
                Some(Summary::from_fields(var.map(f64::sqrt))),
            )
        };
        ReportRow {
            config_name,
            combine,
            seeds,
            mean,
            std,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &SeedOutcome> {
        self.seeds.iter().filter(|s| s.metrics.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.config_name == name)
    }
}

fn run_one(
    config: &BenchConfig,
    data: &BenchData<'_>,
    setup: &BenchSetup,
    seed: u64,
) -> Result<Metrics, Box<dyn std::error::Error>> {
    let cfg = ModelConfig {
        seed,
        ..setup.model.clone()
    };
    let model = init_model(&cfg)?;
    let (model, _) = pretrain(
        &model,
        data.train,
        &config.schedule,
        &setup.pretrain_opt,
        &setup.options,
        seed,
    )?;
    let (model, _) = finetune(
        &model,
        data.train,
        data.dev,
        &setup.finetune_opt,
        setup.finetune_epochs,
        &setup.options,
        seed,
    )?;
    Ok(evaluate(&model, data.test, setup.options.batch_size)?)
}

/// Pre-train, fine-tune and evaluate every (configuration, seed) pair.
/// A baseline row is prepended when absent; single-run failures are
/// recorded in their row and do not stop the matrix.
pub fn benchmark_matrix(
    configs: &[BenchConfig],
    data: &BenchData<'_>,
    setup: &BenchSetup,
    seeds: &[u64],
) -> Result<RunReport, EvalError> {
    if configs.is_empty() {
        return Err(EvalError::NoConfigs);
    }
    if seeds.is_empty() {
        return Err(EvalError::NoSeeds);
    }
    if data.test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let mut configs = configs.to_vec();
    if !configs.iter().any(|c| c.schedule.phases.is_empty()) {
        configs.insert(0, BenchConfig::baseline());
    }
    let mut rows = Vec::with_capacity(configs.len());
    for config in &configs {
        let mut outcomes = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            log::info!("bench: {} seed {seed}", config.name);
            let outcome = match run_one(config, data, setup, seed) {
                Ok(m) => SeedOutcome {
                    seed,
                    metrics: Some(m),
                    error: None,
                },
                Err(e) => {
                    log::warn!("bench: {} seed {seed} failed: {e}", config.name);
                    SeedOutcome {
                        seed,
                        metrics: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            outcomes.push(outcome);
        }
        rows.push(ReportRow::new(
            config.name.clone(),
            config.schedule.combine,
            outcomes,
        ));
    }
    Ok(RunReport { rows })
}
