//! Generator for a small synthetic NLI grammar with gold CoNLL-U annotation.
//!
//! Premises follow `DET [ADJ] NOUN AUX VERB DET [ADJ] NOUN [ADP DET NOUN] .`
//! Hypotheses keep the premise clause and optionally drop its modifiers;
//! the label is then fixed by one edit:
//!
//! * entailment: no further change,
//! * contradiction: `not` after the auxiliary,
//! * neutral: an added purpose phrase `for DET NOUN`.
//!
//! The vocabulary stays inside the bundled WordNet fixture so every content
//! word resolves to a synset.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{merge_annotations, AnnotatedSentence, CorpusError, Gold, NliPair, Upos, Word};
use crate::labels::LabeledDataset;
use crate::wordnet::WordnetIndex;

const VERBS: [(&str, &str); 14] = [
    ("riding", "ride"),
    ("walking", "walk"),
    ("holding", "hold"),
    ("carrying", "carry"),
    ("watching", "watch"),
    ("painting", "paint"),
    ("pushing", "push"),
    ("pulling", "pull"),
    ("kicking", "kick"),
    ("throwing", "throw"),
    ("climbing", "climb"),
    ("weeding", "weed"),
    ("cleaning", "clean"),
    ("fixing", "fix"),
];

/// (singular, plural) subject nouns; `None` when the plural is left out.
const SUBJECTS: [(&str, Option<&str>); 10] = [
    ("man", Some("men")),
    ("woman", Some("women")),
    ("boy", Some("boys")),
    ("girl", Some("girls")),
    ("child", Some("children")),
    ("lady", Some("ladies")),
    ("person", None),
    ("player", Some("players")),
    ("worker", Some("workers")),
    ("dog", Some("dogs")),
];

const OBJECTS: [&str; 14] = [
    "horse", "ball", "bicycle", "box", "fence", "garden", "car", "boat", "kite", "wall", "rope",
    "cart", "sign", "tree",
];
const SUBJECT_ADJS: [&str; 5] = ["young", "old", "tall", "small", "happy"];
const OBJECT_ADJS: [&str; 6] = ["red", "blue", "big", "little", "small", "old"];
const PLACES: [&str; 9] = [
    "park", "street", "beach", "field", "river", "city", "yard", "market", "lake",
];
const PREPS: [&str; 4] = ["in", "near", "at", "by"];
const PURPOSES: [&str; 6] = ["friend", "contest", "prize", "festival", "charity", "class"];

#[derive(Debug, Clone, PartialEq)]
struct NounPhrase {
    det: &'static str,
    adj: Option<&'static str>,
    noun: &'static str,
    lemma: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
struct Clause {
    subject: NounPhrase,
    plural: bool,
    negated: bool,
    verb: (&'static str, &'static str),
    object: NounPhrase,
    purpose: Option<NounPhrase>,
    place: Option<(&'static str, NounPhrase)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Head {
    Root,
    Verb,
    Subject,
    Object,
    Purpose,
    Place,
}

/// Form, tag, lemma, own role and the role it attaches to.
type Slot = (String, Upos, Option<String>, Head, Option<Head>);

impl Clause {
    fn words(&self) -> Vec<Word> {
        let mut slots: Vec<Slot> = Vec::new();
        let np =
            |slots: &mut Vec<_>, np: &NounPhrase, role: Head, attach: Head, plural_det: bool| {
                let det_upos = if plural_det { Upos::NUM } else { Upos::DET };
                slots.push((
                    np.det.to_string(),
                    det_upos,
                    Some(np.det.to_lowercase()),
                    role,
                    None,
                ));
                if let Some(a) = np.adj {
                    slots.push((a.to_string(), Upos::ADJ, Some(a.to_string()), role, None));
                }
                slots.push((
                    np.noun.to_string(),
                    Upos::NOUN,
                    Some(np.lemma.to_string()),
                    attach,
                    Some(role),
                ));
            };
        np(
            &mut slots,
            &self.subject,
            Head::Subject,
            Head::Verb,
            self.plural,
        );
        let aux = if self.plural { "are" } else { "is" };
        slots.push((aux.into(), Upos::AUX, Some("be".into()), Head::Verb, None));
        if self.negated {
            slots.push((
                "not".into(),
                Upos::PART,
                Some("not".into()),
                Head::Verb,
                None,
            ));
        }
        slots.push((
            self.verb.0.into(),
            Upos::VERB,
            Some(self.verb.1.into()),
            Head::Root,
            Some(Head::Verb),
        ));
        np(&mut slots, &self.object, Head::Object, Head::Verb, false);
        if let Some(p) = &self.purpose {
            slots.push((
                "for".into(),
                Upos::ADP,
                Some("for".into()),
                Head::Purpose,
                None,
            ));
            np(&mut slots, p, Head::Purpose, Head::Verb, false);
        }
        if let Some((prep, p)) = &self.place {
            slots.push((
                prep.to_string(),
                Upos::ADP,
                Some(prep.to_string()),
                Head::Place,
                None,
            ));
            np(&mut slots, p, Head::Place, Head::Verb, false);
        }
        slots.push((".".into(), Upos::PUNCT, Some(".".into()), Head::Verb, None));

        let position = |role: Head| {
            slots
                .iter()
                .position(|s| s.4 == Some(role))
                .expect("role present")
                + 1
        };
        let mut words: Vec<Word> = slots
            .iter()
            .map(|(form, upos, lemma, head, _)| Word {
                form: form.clone(),
                upos: *upos,
                head: if *head == Head::Root {
                    0
                } else {
                    position(*head)
                },
                lemma: lemma.clone(),
            })
            .collect();
        let first = &mut words[0].form;
        *first = capitalize(first);
        words
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn sentence(words: Vec<Word>, id: &str) -> AnnotatedSentence {
    let mut text = String::new();
    for w in &words {
        if !text.is_empty() && w.upos != Upos::PUNCT {
            text.push(' ');
        }
        text.push_str(&w.form);
    }
    AnnotatedSentence {
        sent_id: Some(id.to_string()),
        text: Some(text),
        words,
    }
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    *items.choose(rng).expect("non-empty list")
}

fn object_phrase(
    rng: &mut ChaCha8Rng,
    adjs: &[&'static str],
    nouns: &[&'static str],
    adj_p: f64,
) -> NounPhrase {
    let noun = pick(rng, nouns);
    NounPhrase {
        det: if rng.gen_bool(0.5) { "the" } else { "a" },
        adj: rng.gen_bool(adj_p).then(|| pick(rng, adjs)),
        noun,
        lemma: noun,
    }
}

fn premise(rng: &mut ChaCha8Rng) -> Clause {
    let (sg, pl) = pick(rng, &SUBJECTS);
    let plural = pl.is_some() && rng.gen_bool(0.3);
    let subject = NounPhrase {
        det: if plural {
            "two"
        } else if rng.gen_bool(0.5) {
            "the"
        } else {
            "a"
        },
        adj: rng.gen_bool(0.5).then(|| pick(rng, &SUBJECT_ADJS)),
        noun: if plural { pl.expect("checked") } else { sg },
        lemma: sg,
    };
    Clause {
        subject,
        plural,
        negated: false,
        verb: pick(rng, &VERBS),
        object: object_phrase(rng, &OBJECT_ADJS, &OBJECTS, 0.5),
        purpose: None,
        place: rng
            .gen_bool(0.6)
            .then(|| (pick(rng, &PREPS), object_phrase(rng, &[], &PLACES, 0.0))),
    }
}

fn hypothesis(rng: &mut ChaCha8Rng, p: &Clause, gold: Gold) -> Clause {
    let mut h = p.clone();
    if rng.gen_bool(0.5) {
        h.subject.adj = None;
    }
    if rng.gen_bool(0.5) {
        h.object.adj = None;
    }
    if rng.gen_bool(0.5) {
        h.place = None;
    }
    match gold {
        Gold::Entailment => {}
        Gold::Contradiction => h.negated = true,
        Gold::Neutral => h.purpose = Some(object_phrase(rng, &[], &PURPOSES, 0.0)),
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthPair {
    pub pair: NliPair,
    pub premise: AnnotatedSentence,
    pub hypothesis: AnnotatedSentence,
}

/// `n` pairs with labels cycling entailment, contradiction, neutral, so
/// classes are balanced to within one. Pair ids are `{prefix}{index}`.
pub fn generate(n: usize, seed: u64, prefix: &str) -> Vec<SynthPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let gold = Gold::ALL[i % 3];
            let id = format!("{prefix}{i}");
            let p = premise(&mut rng);
            let h = hypothesis(&mut rng, &p, gold);
            let premise = sentence(p.words(), &id);
            let hypothesis = sentence(h.words(), &id);
            SynthPair {
                pair: NliPair {
                    id,
                    premise: premise.text.clone().unwrap_or_default(),
                    hypothesis: hypothesis.text.clone().unwrap_or_default(),
                    gold,
                },
                premise,
                hypothesis,
            }
        })
        .collect()
}

/// The pairs as a JSONL corpus in the SNLI field layout.
pub fn to_jsonl(pairs: &[SynthPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        let line = serde_json::json!({
            "pairID": p.pair.id,
            "gold_label": p.pair.gold.as_str(),
            "sentence1": p.pair.premise,
            "sentence2": p.pair.hypothesis,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// Premise and hypothesis annotations as two CoNLL-U documents.
pub fn to_conllu(pairs: &[SynthPair]) -> (String, String) {
    let prem: Vec<AnnotatedSentence> = pairs.iter().map(|p| p.premise.clone()).collect();
    let hyp: Vec<AnnotatedSentence> = pairs.iter().map(|p| p.hypothesis.clone()).collect();
    (
        crate::corpus::write_conllu(&prem),
        crate::corpus::write_conllu(&hyp),
    )
}

/// Merges generated pairs with WordNet labels and splits them in order
/// (see [`LabeledDataset::from_ordered`]).
pub fn labeled_dataset(
    pairs: &[SynthPair],
    wordnet: &WordnetIndex,
    train: f64,
    dev: f64,
) -> Result<LabeledDataset, CorpusError> {
    let raw: Vec<NliPair> = pairs.iter().map(|p| p.pair.clone()).collect();
    let prem: Vec<AnnotatedSentence> = pairs.iter().map(|p| p.premise.clone()).collect();
    let hyp: Vec<AnnotatedSentence> = pairs.iter().map(|p| p.hypothesis.clone()).collect();
    let (merged, _) = merge_annotations(&raw, &prem, &hyp, wordnet, true)?;
    Ok(LabeledDataset::from_ordered(merged, train, dev))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentences_are_valid_trees() {
        for p in generate(300, 1, "s") {
            p.premise.validate().unwrap();
            p.hypothesis.validate().unwrap();
            assert_eq!(
                p.premise.words[p.premise.root().unwrap() - 1].upos,
                Upos::VERB
            );
        }
    }

    #[test]
    fn labels_follow_the_edit() {
        for p in generate(90, 2, "s") {
            let has = |w: &str| p.hypothesis.forms().any(|f| f == w);
            match p.pair.gold {
                Gold::Entailment => assert!(!has("not") && !has("for")),
                Gold::Contradiction => assert!(has("not") && !has("for")),
                Gold::Neutral => assert!(!has("not") && has("for")),
            }
        }
    }

    #[test]
    fn deterministic_and_balanced() {
        assert_eq!(generate(30, 5, "x"), generate(30, 5, "x"));
        assert_ne!(generate(30, 5, "x"), generate(30, 6, "x"));
        let g = generate(31, 5, "x");
        let count = |c: Gold| g.iter().filter(|p| p.pair.gold == c).count();
        assert_eq!(
            (
                count(Gold::Entailment),
                count(Gold::Contradiction),
                count(Gold::Neutral)
            ),
            (11, 10, 10)
        );
    }

    #[test]
    fn worked_heads() {
        let c = Clause {
            subject: NounPhrase {
                det: "the",
                adj: Some("young"),
                noun: "man",
                lemma: "man",
            },
            plural: false,
            negated: true,
            verb: ("riding", "ride"),
            object: NounPhrase {
                det: "a",
                adj: None,
                noun: "horse",
                lemma: "horse",
            },
            purpose: None,
            place: Some((
                "in",
                NounPhrase {
                    det: "the",
                    adj: None,
                    noun: "park",
                    lemma: "park",
                },
            )),
        };
        let s = sentence(c.words(), "t");
        assert_eq!(
            s.text.as_deref(),
            Some("The young man is not riding a horse in the park.")
        );
        let heads: Vec<usize> = s.words.iter().map(|w| w.head).collect();
        assert_eq!(heads, vec![3, 3, 6, 6, 6, 0, 8, 6, 11, 11, 6, 6]);
    }
}
