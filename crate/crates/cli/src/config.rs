use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lingpt_core::corpus::CorpusFormat;
use lingpt_core::labels::Objective;
use lingpt_core::model::{LossKind, ModelConfig};
use lingpt_core::training::{CombineMode, LrSchedule, OptimizerConfig, TrainOptions};
use serde::{Deserialize, Serialize};

/// Everything a pipeline run needs, read from one TOML file. Relative paths
/// are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Run directory; `--out` overrides it.
    pub out: PathBuf,
    pub data: Option<DataConfig>,
    pub vocab: VocabConfig,
    pub model: ModelSection,
    pub train: TrainSection,
    pub pretrain: PretrainSection,
    pub finetune: FinetuneSection,
    pub bench: BenchSection,
    pub gradcheck: GradcheckSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            out: PathBuf::from("run"),
            data: None,
            vocab: VocabConfig::default(),
            model: ModelSection::default(),
            train: TrainSection::default(),
            pretrain: PretrainSection::default(),
            finetune: FinetuneSection::default(),
            bench: BenchSection::default(),
            gradcheck: GradcheckSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub corpus: PathBuf,
    #[serde(default = "default_format")]
    pub format: CorpusFormat,
    pub premise_conllu: PathBuf,
    pub hypothesis_conllu: PathBuf,
    pub wordnet: PathBuf,
    #[serde(default = "yes")]
    pub include_adverbs: bool,
    #[serde(default = "default_train_frac")]
    pub train_frac: f64,
    #[serde(default = "default_dev_frac")]
    pub dev_frac: f64,
    /// Keep only the first N merged pairs.
    #[serde(default)]
    pub limit: Option<usize>,
}

fn default_format() -> CorpusFormat {
    CorpusFormat::Jsonl
}
fn yes() -> bool {
    true
}
fn default_train_frac() -> f64 {
    0.8
}
fn default_dev_frac() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VocabConfig {
    pub size: usize,
    pub min_freq: u64,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            size: 2000,
            min_freq: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Tiny,
    Desk,
    Base,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub preset: Preset,
    pub layers: Option<usize>,
    pub heads: Option<usize>,
    pub hidden: Option<usize>,
    pub ff_mult: Option<usize>,
    pub max_len: Option<usize>,
    pub dropout: Option<f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            preset: Preset::Desk,
            layers: None,
            heads: None,
            hidden: None,
            ff_mult: None,
            max_len: None,
            dropout: None,
        }
    }
}

impl ModelSection {
    pub fn build(
        &self,
        vocab_size: usize,
        head_dims: BTreeMap<Objective, usize>,
        seed: u64,
    ) -> ModelConfig {
        let mut c = match self.preset {
            Preset::Tiny => ModelConfig {
                layers: 1,
                heads: 2,
                hidden: 16,
                max_len: 32,
                dropout: 0.0,
                ..ModelConfig::desk(vocab_size, head_dims)
            },
            Preset::Desk => ModelConfig::desk(vocab_size, head_dims),
            Preset::Base => ModelConfig::base_scale(vocab_size, head_dims),
        };
        c.layers = self.layers.unwrap_or(c.layers);
        c.heads = self.heads.unwrap_or(c.heads);
        c.hidden = self.hidden.unwrap_or(c.hidden);
        c.ff_mult = self.ff_mult.unwrap_or(c.ff_mult);
        c.max_len = self.max_len.unwrap_or(c.max_len);
        c.dropout = self.dropout.unwrap_or(c.dropout);
        c.seed = seed;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub batch_size: usize,
    pub loss: LossKind,
    pub lr_schedule: LrSchedule,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainOptions::default();
        TrainSection {
            batch_size: d.batch_size,
            loss: d.loss,
            lr_schedule: d.lr_schedule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PretrainSection {
    /// Objective names in phase order, e.g. `["POS", "SYN"]`.
    pub objectives: Vec<String>,
    pub epochs: usize,
    pub combine: CombineMode,
    pub lr: Option<f64>,
    pub weight_decay: Option<f64>,
}

impl Default for PretrainSection {
    fn default() -> Self {
        PretrainSection {
            objectives: vec!["POS".into(), "SYN".into()],
            epochs: 1,
            combine: CombineMode::Sequential,
            lr: None,
            weight_decay: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FinetuneSection {
    pub epochs: usize,
    pub patience: usize,
    pub lr: Option<f64>,
    pub weight_decay: Option<f64>,
}

impl Default for FinetuneSection {
    fn default() -> Self {
        FinetuneSection {
            epochs: 3,
            patience: TrainOptions::default().patience,
            lr: None,
            weight_decay: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    /// Configuration names such as `baseline`, `POS`, `POS+Syn`; empty means
    /// all eight.
    pub configs: Vec<String>,
    pub seeds: Vec<u64>,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            configs: vec!["baseline".into(), "POS+Syn".into()],
            seeds: vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GradcheckSection {
    pub seeds: Vec<u64>,
    pub eps: f64,
    pub tol: f64,
    /// Uniform noise added to the initial weights before checking.
    pub spread: f64,
}

impl Default for GradcheckSection {
    fn default() -> Self {
        GradcheckSection {
            seeds: vec![1, 2, 3],
            eps: 1e-4,
            tol: 1e-4,
            spread: 0.2,
        }
    }
}

impl RunConfig {
    /// Reads and validates `path`, resolving relative paths against its
    /// directory and applying the command-line overrides.
    pub fn load(path: &Path, seed: Option<u64>, out: Option<&Path>) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.out);
        if let Some(d) = cfg.data.as_mut() {
            resolve(&mut d.corpus);
            resolve(&mut d.premise_conllu);
            resolve(&mut d.hypothesis_conllu);
            resolve(&mut d.wordnet);
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if let Some(o) = out {
            cfg.out = o.to_path_buf();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if let Some(d) = &self.data {
            if !(0.0..=1.0).contains(&d.train_frac)
                || !(0.0..=1.0).contains(&d.dev_frac)
                || d.train_frac + d.dev_frac > 1.0
            {
                bail!("data.train_frac and data.dev_frac must be fractions summing to at most 1");
            }
        }
        self.pretrain_objectives()?;
        self.train_options().validate()?;
        self.pretrain_optimizer().validate()?;
        self.finetune_optimizer().validate()?;
        if self.finetune.epochs == 0 {
            bail!("finetune.epochs must be at least 1");
        }
        if self.gradcheck.seeds.is_empty() || self.gradcheck.eps <= 0.0 || self.gradcheck.tol <= 0.0
        {
            bail!("gradcheck needs at least one seed and positive eps and tol");
        }
        Ok(())
    }

    pub fn data(&self) -> anyhow::Result<&DataConfig> {
        self.data
            .as_ref()
            .context("this command needs a [data] section")
    }

    pub fn pretrain_objectives(&self) -> anyhow::Result<Vec<Objective>> {
        let objs = self
            .pretrain
            .objectives
            .iter()
            .map(|s| s.parse::<Objective>().map_err(anyhow::Error::msg))
            .collect::<anyhow::Result<Vec<_>>>()?;
        if objs.contains(&Objective::Nli) {
            bail!("pretrain.objectives may only name POS, PP and SYN");
        }
        Ok(objs)
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            batch_size: self.train.batch_size,
            loss: self.train.loss,
            lr_schedule: self.train.lr_schedule,
            patience: self.finetune.patience,
        }
    }

    pub fn pretrain_optimizer(&self) -> OptimizerConfig {
        let d = OptimizerConfig::desk_pretrain();
        OptimizerConfig {
            lr: self.pretrain.lr.unwrap_or(d.lr),
            weight_decay: self.pretrain.weight_decay.unwrap_or(d.weight_decay),
            ..d
        }
    }

    pub fn finetune_optimizer(&self) -> OptimizerConfig {
        let d = OptimizerConfig::desk_finetune();
        OptimizerConfig {
            lr: self.finetune.lr.unwrap_or(d.lr),
            weight_decay: self.finetune.weight_decay.unwrap_or(d.weight_decay),
            ..d
        }
    }

    /// Hash of every setting except the run directory, so that all stages
    /// of one pipeline print the same value.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        lingpt_core::training::config_hash(&c)
    }
}
