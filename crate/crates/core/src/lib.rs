//! Multi-objective transformer pre-training for natural language inference.
//!
//! Token-level auxiliary objectives (part-of-speech tagging, dependency
//! parent prediction, and first-sense WordNet synset prediction) are trained
//! on the same sentence pairs later used for NLI fine-tuning. The crate covers
//! the whole pipeline: corpus and annotation ingestion, WordNet lookup,
//! subword tokenization with label projection, a small transformer encoder
//! with hand-written backpropagation, AdamW training schedules, and
//! evaluation reports.

pub mod corpus;
pub mod evaluation;
pub mod labels;
pub mod model;
pub mod synth;
pub mod tokenizer;
pub mod training;
pub mod wordnet;
