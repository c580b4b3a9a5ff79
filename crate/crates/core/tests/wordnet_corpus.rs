mod common;

use lingpt_core::corpus::{parse_conllu, parse_nli_corpus, write_conllu, CorpusFormat, Gold, Upos};
use lingpt_core::wordnet::{
    first_synset, morphy, synset_label_for_word, synset_label_for_word_with, SynsetLabel, WnPos,
};

#[test]
fn lady_senses_in_index_order() {
    let wn = common::wordnet();
    assert_eq!(
        wn.offsets("lady", WnPos::Noun),
        Some(&[10243137, 9_989_290, 10242791][..])
    );
    assert_eq!(first_synset("lady", WnPos::Noun, &wn).name(), "lady.n.01");
    // The second sense's synset is listed under "dame" first.
    assert_eq!(
        wn.display_name(WnPos::Noun, 9989290).as_deref(),
        Some("dame.n.02")
    );
}

#[test]
fn inflected_forms_reach_their_lemmas() {
    let wn = common::wordnet();
    assert_eq!(
        synset_label_for_word("is", Upos::AUX, &wn).name(),
        "be.v.01"
    );
    assert_eq!(
        synset_label_for_word("horses", Upos::NOUN, &wn).name(),
        "horse.n.01"
    );
    assert_eq!(
        synset_label_for_word("weeding", Upos::VERB, &wn).name(),
        "weed.v.01"
    );
    assert_eq!(
        synset_label_for_word("Men", Upos::NOUN, &wn).name(),
        "man.n.01"
    );
    assert!(morphy("horses", WnPos::Noun, &wn).contains(&"horse".to_string()));
}

#[test]
fn closed_class_and_unknown_words_get_no_syn() {
    let wn = common::wordnet();
    for (w, u) in [
        ("the", Upos::DET),
        ("her", Upos::PRON),
        (".", Upos::PUNCT),
        ("on", Upos::ADP),
    ] {
        assert_eq!(synset_label_for_word(w, u, &wn), SynsetLabel::NoSyn, "{w}");
    }
    assert_eq!(
        synset_label_for_word("glorp", Upos::NOUN, &wn),
        SynsetLabel::NoSyn
    );
}

#[test]
fn adverbs_can_be_excluded() {
    let wn = common::wordnet();
    let adv = wn
        .entries
        .keys()
        .find(|(_, p)| *p == WnPos::Adv)
        .map(|(l, _)| l.clone())
        .unwrap();
    assert_ne!(
        synset_label_for_word_with(&adv, Upos::ADV, &wn, true),
        SynsetLabel::NoSyn
    );
    assert_eq!(
        synset_label_for_word_with(&adv, Upos::ADV, &wn, false),
        SynsetLabel::NoSyn
    );
}

#[test]
fn conllu_round_trip_keeps_forms_tags_heads() {
    let text = std::fs::read_to_string(common::fixture("worked/premise.conllu")).unwrap();
    let a = parse_conllu(&text).unwrap();
    let b = parse_conllu(&write_conllu(&a)).unwrap();
    assert_eq!(a.len(), 2);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.sent_id, y.sent_id);
        let key = |s: &lingpt_core::corpus::AnnotatedSentence| {
            s.words
                .iter()
                .map(|w| (w.form.clone(), w.upos, w.head))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(x), key(y));
    }
}

#[test]
fn snli_style_lines_skip_unlabeled_and_garbage() {
    let text = [
        r#"{"gold_label":"neutral","sentence1":"A b.","sentence2":"C d.","pairID":"1"}"#,
        r#"{"gold_label":"-","sentence1":"A b.","sentence2":"C d.","pairID":"2"}"#,
        "not json",
        r#"{"gold_label":"contradiction","sentence1":"E f.","sentence2":"G h.","pairID":"3"}"#,
    ]
    .join("\n");
    let (pairs, report) = parse_nli_corpus(&text, CorpusFormat::Jsonl).unwrap();
    assert_eq!(
        pairs.iter().map(|p| p.gold).collect::<Vec<_>>(),
        [Gold::Neutral, Gold::Contradiction]
    );
    assert_eq!(report.kept + report.skipped.len(), report.total_lines);
    assert_eq!(
        report.skipped.iter().map(|s| s.line).collect::<Vec<_>>(),
        [2, 3]
    );
}
