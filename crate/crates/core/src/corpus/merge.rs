use std::collections::HashMap;

use super::{AnnotatedPair, AnnotatedSentence, CorpusError, NliPair};
use crate::wordnet::{synset_label_for_word_with, SynsetLabel, WordnetIndex};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeReport {
    pub kept: usize,
    /// (pair id, reason) for every dropped pair.
    pub dropped: Vec<(String, String)>,
}

/// Joins raw pairs with their premise/hypothesis annotations and fills in
/// synset labels.
///
/// When every annotation carries a `sent_id`, sentences are matched to pairs
/// by id and pairs without an annotation are dropped. Otherwise the lists must
/// be index-aligned and of equal length.
///
/// A pair is also dropped when the annotation's word forms do not spell out
/// the raw sentence (ignoring whitespace).
pub fn merge_annotations(
    pairs: &[NliPair],
    premise_anns: &[AnnotatedSentence],
    hypothesis_anns: &[AnnotatedSentence],
    wordnet: &WordnetIndex,
    include_adverbs: bool,
) -> Result<(Vec<AnnotatedPair>, MergeReport), CorpusError> {
    let by_id = |anns: &[AnnotatedSentence]| -> Option<HashMap<String, usize>> {
        if anns.is_empty() || anns.iter().any(|a| a.sent_id.is_none()) {
            return None;
        }
        Some(
            anns.iter()
                .enumerate()
                .map(|(i, a)| (a.sent_id.clone().unwrap_or_default(), i))
                .collect(),
        )
    };
    let premise_ids = by_id(premise_anns);
    let hypothesis_ids = by_id(hypothesis_anns);
    let keyed = premise_ids.is_some() && hypothesis_ids.is_some();
    if !keyed {
        if premise_anns.len() != pairs.len() {
            return Err(CorpusError::CountMismatch {
                pairs: pairs.len(),
                annotations: premise_anns.len(),
                side: "premise",
            });
        }
        if hypothesis_anns.len() != pairs.len() {
            return Err(CorpusError::CountMismatch {
                pairs: pairs.len(),
                annotations: hypothesis_anns.len(),
                side: "hypothesis",
            });
        }
    }

    let label = |s: &AnnotatedSentence| -> Vec<SynsetLabel> {
        s.words
            .iter()
            .map(|w| synset_label_for_word_with(&w.form, w.upos, wordnet, include_adverbs))
            .collect()
    };

    let mut out = Vec::with_capacity(pairs.len());
    let mut report = MergeReport::default();
    for (i, pair) in pairs.iter().enumerate() {
        let (p, h) = match (&premise_ids, &hypothesis_ids) {
            (Some(pi), Some(hi)) if keyed => match (pi.get(&pair.id), hi.get(&pair.id)) {
                (Some(&a), Some(&b)) => (&premise_anns[a], &hypothesis_anns[b]),
                _ => {
                    log::warn!("pair {}: missing annotation, dropped", pair.id);
                    report
                        .dropped
                        .push((pair.id.clone(), "missing annotation".into()));
                    continue;
                }
            },
            _ => (&premise_anns[i], &hypothesis_anns[i]),
        };
        let mismatch = if !spells(&pair.premise, p) {
            Some("premise")
        } else if !spells(&pair.hypothesis, h) {
            Some("hypothesis")
        } else {
            None
        };
        if let Some(side) = mismatch {
            log::warn!(
                "pair {}: {side} words do not match the raw sentence, dropped",
                pair.id
            );
            report
                .dropped
                .push((pair.id.clone(), format!("{side} word mismatch")));
            continue;
        }
        out.push(AnnotatedPair {
            pair: pair.clone(),
            premise_ann: p.clone(),
            hypothesis_ann: h.clone(),
            premise_syn: label(p),
            hypothesis_syn: label(h),
        });
    }
    report.kept = out.len();
    Ok((out, report))
}

fn spells(raw: &str, ann: &AnnotatedSentence) -> bool {
    let mut raw_chars = raw.chars().filter(|c| !c.is_whitespace());
    for c in ann
        .forms()
        .flat_map(str::chars)
        .filter(|c| !c.is_whitespace())
    {
        if raw_chars.next() != Some(c) {
            return false;
        }
    }
    raw_chars.next().is_none()
}
