//! WordNet's detachment rules plus exception lists.

use super::{WnPos, WordnetIndex};

const NOUN_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ses", "s"),
    ("ves", "f"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];

const VERB_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
];

const ADJ_RULES: &[(&str, &str)] = &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")];

fn rules(pos: WnPos) -> &'static [(&'static str, &'static str)] {
    match pos {
        WnPos::Noun => NOUN_RULES,
        WnPos::Verb => VERB_RULES,
        WnPos::Adj => ADJ_RULES,
        WnPos::Adv => &[],
    }
}

/// Candidate base lemmas of a lowercased `form`, all of which exist in the
/// index: exception-list bases, then detachment-rule results, then the form
/// itself. Duplicates keep their first position.
pub fn morphy(form: &str, pos: WnPos, idx: &WordnetIndex) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |cand: String| {
        if idx.contains(&cand, pos) && !out.contains(&cand) {
            out.push(cand);
        }
    };
    if let Some(bases) = idx.exceptions.get(&(form.to_string(), pos)) {
        for b in bases {
            push(b.clone());
        }
    }
    for (suffix, ending) in rules(pos) {
        if let Some(stem) = form.strip_suffix(suffix) {
            if !stem.is_empty() {
                push(format!("{stem}{ending}"));
            }
        }
    }
    push(form.to_string());
    out
}
