#![allow(dead_code)]

use std::path::PathBuf;

use lingpt_core::labels::{LabeledDataset, Objective, Split};
use lingpt_core::synth;
use lingpt_core::tokenizer::{build_vocab, encode_pairs, EncodeOptions, EncodedSequence, Vocab};
use lingpt_core::wordnet::{load_wordnet, WordnetIndex};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn wordnet() -> WordnetIndex {
    load_wordnet(&fixture("wordnet"), true).expect("fixture wordnet loads")
}

pub struct Encoded {
    pub dataset: LabeledDataset,
    pub vocab: Vocab,
    pub train: Vec<EncodedSequence>,
    pub dev: Vec<EncodedSequence>,
    pub test: Vec<EncodedSequence>,
}

/// Synthetic grammar pairs, labelled against the fixture WordNet, with a
/// vocabulary built from the training words.
pub fn synth_encoded(n: usize, seed: u64, vocab_size: usize, max_len: usize) -> Encoded {
    let pairs = synth::generate(n, seed, "g");
    let dataset = synth::labeled_dataset(&pairs, &wordnet(), 0.7, 0.15).expect("merge");
    let train_pairs = dataset.split(Split::Train);
    let words: Vec<&str> = train_pairs
        .iter()
        .flat_map(|p| p.premise_ann.forms().chain(p.hypothesis_ann.forms()))
        .collect();
    let vocab = build_vocab(words, vocab_size, 2).expect("vocab");
    let opts = EncodeOptions::new(max_len);
    let enc = |s: Split| {
        encode_pairs(
            &dataset.split(s),
            &vocab,
            &dataset.space,
            &Objective::TOKEN,
            opts,
        )
        .expect("encode")
    };
    Encoded {
        train: enc(Split::Train),
        dev: enc(Split::Dev),
        test: enc(Split::Test),
        vocab,
        dataset,
    }
}
