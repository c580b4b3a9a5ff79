mod common;

use lingpt_core::corpus::{AnnotatedPair, AnnotatedSentence, Gold, NliPair, Upos, Word};
use lingpt_core::labels::{LabelSpace, Objective};
use lingpt_core::tokenizer::{
    build_vocab, encode_pair, tokenize_word, EncodeOptions, Vocab, IGNORE_LABEL,
};
use lingpt_core::wordnet::synset_label_for_word;
use proptest::prelude::*;

fn vocab() -> Vocab {
    let words =
        "the lady is weeding her garden a person on horse jumps over broken airplane".split(' ');
    let corpus: Vec<&str> = words.cycle().take(200).collect();
    build_vocab(corpus, 40, 2).unwrap()
}

fn sentence(forms: &[String]) -> AnnotatedSentence {
    AnnotatedSentence::new(
        forms
            .iter()
            .enumerate()
            .map(|(i, f)| Word {
                form: f.clone(),
                upos: Upos::ALL[(f.len() + i) % 17],
                head: usize::from(i > 0),
                lemma: None,
            })
            .collect(),
    )
}

fn annotated(prem: &[String], hyp: &[String]) -> AnnotatedPair {
    let wn = common::wordnet();
    let p = sentence(prem);
    let h = sentence(hyp);
    let syn = |s: &AnnotatedSentence| {
        s.words
            .iter()
            .map(|w| synset_label_for_word(&w.form, w.upos, &wn))
            .collect()
    };
    AnnotatedPair {
        pair: NliPair {
            id: "p".into(),
            premise: prem.join(" "),
            hypothesis: hyp.join(" "),
            gold: Gold::Entailment,
        },
        premise_syn: syn(&p),
        hypothesis_syn: syn(&h),
        premise_ann: p,
        hypothesis_ann: h,
    }
}

#[test]
fn detokenized_pieces_spell_the_word() {
    let v = vocab();
    for w in ["weeding", "airplane", "gardens", "zebra", "Lady"] {
        let pieces = tokenize_word(w, &v);
        if pieces == ["[UNK]"] {
            continue;
        }
        let joined: String = pieces.iter().map(|p| p.trim_start_matches("##")).collect();
        assert_eq!(joined, w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_subtoken_carries_its_words_labels(
        prem in prop::collection::vec("[a-z]{1,12}", 1..10),
        hyp in prop::collection::vec("[a-z]{1,12}", 1..10),
        max_len in 8usize..48,
    ) {
        let v = vocab();
        let pair = annotated(&prem, &hyp);
        let space = LabelSpace::build(std::slice::from_ref(&pair));
        let Ok(e) = encode_pair(&pair, &v, &space, &Objective::TOKEN, EncodeOptions::new(max_len)) else {
            return Ok(());
        };
        prop_assert_eq!(e.len(), max_len);
        for obj in Objective::TOKEN {
            let words = space.pair_word_labels(&pair, obj);
            for (t, w) in e.word_of_token.iter().enumerate() {
                match w {
                    Some(w) => prop_assert_eq!(e.labels[&obj][t], words[*w]),
                    None => prop_assert_eq!(e.labels[&obj][t], IGNORE_LABEL),
                }
            }
        }
        // Truncation removes whole words only.
        let kept: std::collections::BTreeSet<usize> = e.word_of_token.iter().flatten().copied().collect();
        for w in &kept {
            let pieces = e.word_of_token.iter().filter(|x| **x == Some(*w)).count();
            let form = if *w < prem.len() { &prem[*w] } else { &hyp[*w - prem.len()] };
            prop_assert_eq!(pieces, tokenize_word(form, &v).len());
        }
        prop_assert_eq!(kept.len() + e.truncated_words, prem.len() + hyp.len());
    }
}
