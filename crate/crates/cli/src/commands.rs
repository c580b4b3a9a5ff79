use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use lingpt_core::corpus::{load_conllu, load_nli_corpus, merge_annotations, AnnotatedPair};
use lingpt_core::evaluation::{
    benchmark_matrix, evaluate, render_report, BenchConfig, BenchData, BenchSetup, ReportFormat,
    ReportRow, RunReport, SeedOutcome,
};
use lingpt_core::labels::{LabeledDataset, Objective, Split};
use lingpt_core::model::{grad_check, init_model, Batch, Model};
use lingpt_core::synth;
use lingpt_core::tokenizer::{build_vocab, encode_pairs, EncodeOptions, EncodedSequence, Vocab};
use lingpt_core::training::{finetune, pretrain, Schedule, TrainLog};
use lingpt_core::wordnet::{load_wordnet, WordnetIndex};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DataConfig, RunConfig};
use crate::Failure;

pub const VOCAB: &str = "vocab.txt";
pub const LABELS: &str = "labels.ldj";
pub const CKPT_PRETRAIN: &str = "ckpt.pretrain";
pub const CKPT_FINETUNE: &str = "ckpt.finetune";

type Outcome = Result<(), Failure>;

trait Classify<T> {
    /// Bad configuration or unusable inputs: exit code 2.
    fn config(self) -> Result<T, Failure>;
    /// Failure while running: exit code 1.
    fn run(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }
    fn run(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Run(e.into()))
    }
}

/// Creates the run directory, writes the canonical config echo and prints
/// the config hash.
fn start(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("creating run directory {}", cfg.out.display()))
        .config()?;
    let echo = serde_json::to_string_pretty(cfg).expect("serializable config") + "\n";
    write(&cfg.out.join("config.echo"), echo.as_bytes())?;
    println!("config hash: {}", cfg.hash());
    Ok(cfg.out.clone())
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .run()
}

fn require(dir: &Path, name: &str, produced_by: &str) -> Result<PathBuf, Failure> {
    let p = dir.join(name);
    if !p.exists() {
        return Err(Failure::Config(anyhow::anyhow!(
            "{} not found; run `lingpt {produced_by}` first",
            p.display()
        )));
    }
    Ok(p)
}

/// Raw pairs joined with their CoNLL-U annotations, in corpus order.
fn merged_pairs(d: &DataConfig, wordnet: &WordnetIndex) -> anyhow::Result<Vec<AnnotatedPair>> {
    let (pairs, load) = load_nli_corpus(&d.corpus, d.format)?;
    println!(
        "corpus: {} pairs kept, {} lines skipped",
        load.kept,
        load.skipped.len()
    );
    let prem = load_conllu(&d.premise_conllu)?;
    let hyp = load_conllu(&d.hypothesis_conllu)?;
    let (mut merged, report) = merge_annotations(&pairs, &prem, &hyp, wordnet, d.include_adverbs)?;
    if !report.dropped.is_empty() {
        println!("merge: {} pairs dropped", report.dropped.len());
        let mut reasons: BTreeMap<&str, usize> = BTreeMap::new();
        for (_, r) in &report.dropped {
            *reasons.entry(r.as_str()).or_default() += 1;
        }
        for (r, n) in reasons {
            println!("  {r}: {n}");
        }
    }
    if let Some(limit) = d.limit {
        merged.truncate(limit);
    }
    if merged.is_empty() {
        bail!("no annotated pairs left after merging");
    }
    Ok(merged)
}

pub fn build_vocab_cmd(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let d = cfg.data().config()?;
    // Word segmentation only; synset labels are not needed here.
    let merged = merged_pairs(d, &WordnetIndex::default()).config()?;
    let dataset = LabeledDataset::from_ordered(merged, d.train_frac, d.dev_frac);
    let train = dataset.split(Split::Train);
    let words: Vec<&str> = train
        .iter()
        .flat_map(|p| p.premise_ann.forms().chain(p.hypothesis_ann.forms()))
        .collect();
    let vocab = build_vocab(words.iter().copied(), cfg.vocab.size, cfg.vocab.min_freq).run()?;
    let continuation = vocab
        .tokens()
        .iter()
        .filter(|t| t.starts_with("##"))
        .count();
    write(&dir.join(VOCAB), vocab.to_file_string().as_bytes())?;
    println!(
        "vocab: {} entries ({continuation} continuation pieces) from {} training words",
        vocab.len(),
        words.len()
    );
    Ok(())
}

pub fn annotate(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let d = cfg.data().config()?;
    let wordnet = load_wordnet(&d.wordnet, true).config()?;
    if !wordnet.malformed.is_empty() {
        println!(
            "wordnet: {} malformed lines skipped",
            wordnet.malformed.len()
        );
    }
    let merged = merged_pairs(d, &wordnet).config()?;
    let dataset = LabeledDataset::from_ordered(merged, d.train_frac, d.dev_frac);
    write(&dir.join(LABELS), dataset.to_ldj().as_bytes())?;
    let count = |s| dataset.pairs.iter().filter(|(x, _)| *x == s).count();
    println!(
        "labels: {} train / {} dev / {} test pairs",
        count(Split::Train),
        count(Split::Dev),
        count(Split::Test)
    );
    for obj in Objective::TOKEN {
        println!("  {obj}: {} classes", dataset.space.num_classes(obj));
    }
    Ok(())
}

struct Prepared {
    dataset: LabeledDataset,
    train: Vec<EncodedSequence>,
    dev: Vec<EncodedSequence>,
    test: Vec<EncodedSequence>,
    vocab: Vocab,
}

fn prepare(dir: &Path, max_len: usize) -> Result<Prepared, Failure> {
    let vocab = Vocab::load(&require(dir, VOCAB, "build-vocab")?).config()?;
    let dataset = LabeledDataset::load(&require(dir, LABELS, "annotate")?).config()?;
    let opts = EncodeOptions::new(max_len);
    let enc = |s| {
        encode_pairs(
            &dataset.split(s),
            &vocab,
            &dataset.space,
            &Objective::TOKEN,
            opts,
        )
    };
    let (train, dev, test) = (
        enc(Split::Train).run()?,
        enc(Split::Dev).run()?,
        enc(Split::Test).run()?,
    );
    let truncated: usize = train.iter().map(|s| s.truncated_words).sum();
    if truncated > 0 {
        log::warn!("{truncated} training words truncated at max_len {max_len}");
    }
    Ok(Prepared {
        dataset,
        train,
        dev,
        test,
        vocab,
    })
}

fn head_dims(dataset: &LabeledDataset) -> BTreeMap<Objective, usize> {
    Objective::TOKEN
        .iter()
        .map(|&o| (o, dataset.space.num_classes(o)))
        .collect()
}

fn schedule(cfg: &RunConfig) -> Result<Schedule, Failure> {
    let objs = cfg.pretrain_objectives().config()?;
    Ok(match cfg.pretrain.combine {
        lingpt_core::training::CombineMode::Sequential => {
            Schedule::sequential(&objs, cfg.pretrain.epochs)
        }
        lingpt_core::training::CombineMode::JointSum => Schedule::joint(&objs, cfg.pretrain.epochs),
    })
}

fn save_log(dir: &Path, stage: &str, log: &TrainLog) -> Outcome {
    write(
        &dir.join(format!("trainlog.{stage}.ldj")),
        log.to_ldj().as_bytes(),
    )?;
    write(
        &dir.join(format!("timing.{stage}.json")),
        log.timing_json().as_bytes(),
    )
}

pub fn pretrain_cmd(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let probe = cfg.model.build(0, BTreeMap::new(), cfg.seed);
    let p = prepare(&dir, probe.max_len)?;
    let mc = cfg
        .model
        .build(p.vocab.len(), head_dims(&p.dataset), cfg.seed);
    let model = init_model(&mc).config()?;
    let schedule = schedule(cfg)?;
    println!("model: {} parameters", model.param_count());
    let (model, log) = pretrain(
        &model,
        &p.train,
        &schedule,
        &cfg.pretrain_optimizer(),
        &cfg.train_options(),
        cfg.seed,
    )
    .run()?;
    model.save(&dir.join(CKPT_PRETRAIN)).run()?;
    save_log(&dir, "pretrain", &log)?;
    for e in log.epochs() {
        println!(
            "  phase {} {} epoch {}: mean loss {:.4}",
            e.phase, e.objective, e.epoch, e.mean_loss
        );
    }
    Ok(())
}

pub fn finetune_cmd(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let model = Model::load(&require(&dir, CKPT_PRETRAIN, "pretrain")?).config()?;
    let p = prepare(&dir, model.config.max_len)?;
    let (best, log) = finetune(
        &model,
        &p.train,
        &p.dev,
        &cfg.finetune_optimizer(),
        cfg.finetune.epochs,
        &cfg.train_options(),
        cfg.seed,
    )
    .run()?;
    best.save(&dir.join(CKPT_FINETUNE)).run()?;
    save_log(&dir, "finetune", &log)?;
    for e in log.epochs() {
        let dev = e
            .dev_accuracy
            .map_or("-".to_string(), |a| format!("{a:.4}"));
        println!(
            "  epoch {}: mean loss {:.4}, dev accuracy {dev}",
            e.epoch, e.mean_loss
        );
    }
    Ok(())
}

pub fn evaluate_cmd(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let model = Model::load(&require(&dir, CKPT_FINETUNE, "finetune")?).config()?;
    let p = prepare(&dir, model.config.max_len)?;
    let metrics = evaluate(&model, &p.test, cfg.train.batch_size).run()?;
    let report = RunReport {
        rows: vec![ReportRow::new(
            "finetuned".into(),
            cfg.pretrain.combine,
            vec![SeedOutcome {
                seed: cfg.seed,
                metrics: Some(metrics.clone()),
                error: None,
            }],
        )],
    };
    let text = render_report(&report, ReportFormat::TextTable);
    write(&dir.join("eval.txt"), text.as_bytes())?;
    write(
        &dir.join("eval.csv"),
        render_report(&report, ReportFormat::Csv).as_bytes(),
    )?;
    let json = serde_json::to_string_pretty(&metrics).expect("serializable metrics") + "\n";
    write(&dir.join("eval.json"), json.as_bytes())?;
    print!("{text}");
    Ok(())
}

/// A random batch for the tiny model: two rows of different lengths with
/// PAD tails, labels drawn for every objective.
fn gradcheck_batch(vocab: usize, heads: &BTreeMap<Objective, usize>, seed: u64) -> Batch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, len) = (2, 10);
    let lengths = [len, 7];
    let mut ids = Array2::<u32>::zeros((rows, len));
    let mut segments = Array2::<u8>::zeros((rows, len));
    let mut loss_mask = Array2::from_elem((rows, len), false);
    for (r, &l) in lengths.iter().enumerate() {
        for t in 0..l {
            ids[[r, t]] = rng.gen_range(4..vocab as u32);
            segments[[r, t]] = u8::from(t >= l / 2);
            loss_mask[[r, t]] = t > 0 && t + 1 < l;
        }
    }
    let attention_mask = ids.mapv(|i| i != 0);
    let labels = heads
        .iter()
        .map(|(&o, &c)| {
            (
                o,
                Array2::from_shape_fn((rows, len), |_| rng.gen_range(0..c as i32)),
            )
        })
        .collect();
    let nli_gold = (0..rows).map(|_| rng.gen_range(0..3)).collect();
    Batch {
        ids,
        segments,
        attention_mask,
        labels,
        loss_mask,
        nli_gold,
    }
}

pub fn gradcheck_cmd(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let g = &cfg.gradcheck;
    let heads = BTreeMap::from([
        (Objective::Pos, 17),
        (Objective::Parent, 11),
        (Objective::Synset, 6),
    ]);
    let objectives = [
        Objective::Pos,
        Objective::Parent,
        Objective::Synset,
        Objective::Nli,
    ];
    let vocab = 30;
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for &seed in &g.seeds {
        let mc = cfg.model.build(vocab, heads.clone(), seed);
        let mut model = init_model(&mc).config()?;
        model.weights.perturb(seed, g.spread);
        let batch = gradcheck_batch(vocab, &heads, seed);
        let r = grad_check(&model, &batch, &objectives, cfg.train.loss, g.eps, g.tol).run()?;
        for t in &r.tensors {
            lines.push(format!("seed {seed} {:<28} {:.3e}", t.name, t.max_rel_err));
        }
        let top = r
            .tensors
            .iter()
            .max_by(|a, b| a.max_rel_err.total_cmp(&b.max_rel_err))
            .map(|t| t.name.as_str())
            .unwrap_or("-");
        println!("seed {seed}: max rel err {:.3e} ({top})", r.max_rel_err());
        worst = worst.max(r.max_rel_err());
    }
    let verdict = if worst < g.tol { "ok" } else { "FAILED" };
    let summary = format!(
        "max rel err {worst:.3e} (tol {:.0e}, eps {:.0e}): {verdict}",
        g.tol, g.eps
    );
    lines.push(summary.clone());
    write(
        &dir.join("gradcheck.txt"),
        (lines.join("\n") + "\n").as_bytes(),
    )?;
    println!("{summary}");
    if worst < g.tol {
        Ok(())
    } else {
        Err(Failure::Run(anyhow::anyhow!(
            "gradient check exceeded tolerance"
        )))
    }
}

pub fn bench_cmd(cfg: &RunConfig) -> Outcome {
    let dir = start(cfg)?;
    let probe = cfg.model.build(0, BTreeMap::new(), cfg.seed);
    let p = prepare(&dir, probe.max_len)?;
    let configs = if cfg.bench.configs.is_empty() {
        BenchConfig::standard_matrix(cfg.pretrain.epochs, cfg.pretrain.combine)
    } else {
        cfg.bench
            .configs
            .iter()
            .map(|n| {
                BenchConfig::parse(n, cfg.pretrain.epochs, cfg.pretrain.combine)
                    .map_err(anyhow::Error::msg)
            })
            .collect::<anyhow::Result<_>>()
            .config()?
    };
    let setup = BenchSetup {
        model: cfg
            .model
            .build(p.vocab.len(), head_dims(&p.dataset), cfg.seed),
        pretrain_opt: cfg.pretrain_optimizer(),
        finetune_opt: cfg.finetune_optimizer(),
        finetune_epochs: cfg.finetune.epochs,
        options: cfg.train_options(),
    };
    let data = BenchData {
        train: &p.train,
        dev: &p.dev,
        test: &p.test,
    };
    let report = benchmark_matrix(&configs, &data, &setup, &cfg.bench.seeds).config()?;
    let text = render_report(&report, ReportFormat::TextTable);
    write(&dir.join("report.txt"), text.as_bytes())?;
    write(
        &dir.join("report.csv"),
        render_report(&report, ReportFormat::Csv).as_bytes(),
    )?;
    let json = serde_json::to_string_pretty(&report).expect("serializable report") + "\n";
    write(&dir.join("report.json"), json.as_bytes())?;
    print!("{text}");
    if report.rows.iter().all(|r| r.mean.is_none()) {
        return Err(Failure::Run(anyhow::anyhow!("every benchmark run failed")));
    }
    Ok(())
}

/// Writes a generated corpus with CoNLL-U annotations to `out`.
pub fn synth_cmd(n: usize, seed: u64, out: &Path) -> Outcome {
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .config()?;
    let pairs = synth::generate(n, seed, "s");
    let (prem, hyp) = synth::to_conllu(&pairs);
    write(&out.join("pairs.jsonl"), synth::to_jsonl(&pairs).as_bytes())?;
    write(&out.join("premise.conllu"), prem.as_bytes())?;
    write(&out.join("hypothesis.conllu"), hyp.as_bytes())?;
    println!("wrote {n} pairs to {}", out.display());
    Ok(())
}
