use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::TokenizerError;

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
pub const CLS: u32 = 2;
pub const SEP: u32 = 3;
pub const SPECIAL_TOKENS: [&str; 4] = ["[PAD]", "[UNK]", "[CLS]", "[SEP]"];
pub const CONTINUATION_PREFIX: &str = "##";

/// Words longer than this (in chars) map straight to `[UNK]`.
const MAX_WORD_CHARS: usize = 100;

/// Case-sensitive subword vocabulary. Ids 0..4 are the special tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    /// Specials followed by `tokens` in order; duplicates are ignored.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v = Vocab {
            tokens: Vec::new(),
            ids: HashMap::new(),
        };
        for s in SPECIAL_TOKENS {
            v.push(s.to_string());
        }
        for t in tokens {
            v.push(t.into());
        }
        v
    }

    fn push(&mut self, token: String) -> bool {
        if self.ids.contains_key(&token) {
            return false;
        }
        self.ids.insert(token.clone(), self.tokens.len() as u32);
        self.tokens.push(token);
        true
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    /// One token per line; line number is the id.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        for t in &self.tokens {
            s.push_str(t);
            s.push('\n');
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), TokenizerError> {
        fs::write(path, self.to_file_string()).map_err(|e| TokenizerError::VocabFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn parse(text: &str) -> Result<Vocab, String> {
        let tokens: Vec<&str> = text.lines().collect();
        if tokens.len() < SPECIAL_TOKENS.len() || tokens[..4] != SPECIAL_TOKENS {
            return Err("file does not start with the special tokens".into());
        }
        let v = Vocab::from_tokens(tokens[4..].iter().copied());
        if v.len() != tokens.len() {
            return Err("duplicate tokens".into());
        }
        Ok(v)
    }

    pub fn load(path: &Path) -> Result<Vocab, TokenizerError> {
        let err = |reason: String| TokenizerError::VocabFile {
            path: path.to_path_buf(),
            reason,
        };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        Vocab::parse(&text).map_err(err)
    }
}

fn first_symbol(c: char) -> String {
    c.to_string()
}

fn continuation_symbol(c: char) -> String {
    format!("{CONTINUATION_PREFIX}{c}")
}

fn merged(a: &str, b: &str) -> String {
    format!("{a}{}", b.strip_prefix(CONTINUATION_PREFIX).unwrap_or(b))
}

/// Induces a subword vocabulary.
///
/// Every word starts as its characters (non-initial ones carrying `##`).
/// The alphabet is added first; then adjacent pairs are merged one at a time,
/// picking the pair with the highest `count(ab) / (count(a) * count(b))`
/// (ties: lexicographically smallest pair), until `target_size` is reached or
/// no pair occurs at least `min_freq` times. If the alphabet alone exceeds the
/// target, its most frequent symbols are kept.
pub fn build_vocab<'a, I>(
    corpus: I,
    target_size: usize,
    min_freq: u64,
) -> Result<Vocab, TokenizerError>
where
    I: IntoIterator<Item = &'a str>,
{
    if target_size < SPECIAL_TOKENS.len() + 1 {
        return Err(TokenizerError::TargetTooSmall(target_size));
    }
    let mut word_freq: HashMap<&str, u64> = HashMap::new();
    for w in corpus {
        if w.is_empty() || w.chars().any(char::is_whitespace) {
            continue;
        }
        *word_freq.entry(w).or_default() += 1;
    }
    if word_freq.is_empty() {
        return Err(TokenizerError::EmptyCorpus);
    }
    let mut words: Vec<(Vec<String>, u64)> = {
        let mut sorted: Vec<_> = word_freq.into_iter().collect();
        sorted.sort_unstable();
        sorted
            .into_iter()
            .map(|(w, f)| {
                let syms = w
                    .chars()
                    .enumerate()
                    .map(|(i, c)| {
                        if i == 0 {
                            first_symbol(c)
                        } else {
                            continuation_symbol(c)
                        }
                    })
                    .collect();
                (syms, f)
            })
            .collect()
    };

    let capacity = target_size - SPECIAL_TOKENS.len();
    let mut alphabet: Vec<(String, u64)> = symbol_counts(&words).into_iter().collect();
    alphabet.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    alphabet.truncate(capacity);
    alphabet.sort();
    let mut vocab = Vocab::from_tokens(alphabet.into_iter().map(|(s, _)| s));

    while vocab.len() < target_size {
        let sym_counts = symbol_counts(&words);
        let mut pair_counts: HashMap<(&str, &str), u64> = HashMap::new();
        for (syms, f) in &words {
            for w in syms.windows(2) {
                *pair_counts
                    .entry((w[0].as_str(), w[1].as_str()))
                    .or_default() += f;
            }
        }
        let mut best: Option<((&str, &str), u64, u128)> = None;
        for (&pair, &count) in &pair_counts {
            if count < min_freq.max(1) {
                continue;
            }
            let denom = u128::from(sym_counts[pair.0]) * u128::from(sym_counts[pair.1]);
            let better = match best {
                None => true,
                Some((bp, bc, bd)) => {
                    // count/denom > bc/bd, exactly.
                    let lhs = u128::from(count) * bd;
                    let rhs = u128::from(bc) * denom;
                    lhs > rhs || (lhs == rhs && pair < bp)
                }
            };
            if better {
                best = Some((pair, count, denom));
            }
        }
        let Some(((a, b), _, _)) = best else { break };
        let (a, b) = (a.to_string(), b.to_string());
        let new_sym = merged(&a, &b);
        for (syms, _) in &mut words {
            let mut i = 0;
            while i + 1 < syms.len() {
                if syms[i] == a && syms[i + 1] == b {
                    syms[i] = new_sym.clone();
                    syms.remove(i + 1);
                }
                i += 1;
            }
        }
        if !vocab.push(new_sym) {
            // Same string reachable by two different merges; nothing new.
            continue;
        }
    }
    Ok(vocab)
}

fn symbol_counts(words: &[(Vec<String>, u64)]) -> HashMap<String, u64> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for (syms, f) in words {
        for s in syms {
            *counts.entry(s.clone()).or_default() += f;
        }
    }
    counts
}

/// Greedy longest-match segmentation. Non-initial pieces carry `##`. A word
/// with any unmatched position becomes a single `[UNK]`.
pub fn tokenize_word(word: &str, v: &Vocab) -> Vec<String> {
    tokenize_word_ids(word, v)
        .into_iter()
        .map(|id| {
            v.token(id)
                .unwrap_or(SPECIAL_TOKENS[UNK as usize])
                .to_string()
        })
        .collect()
}

pub(crate) fn tokenize_word_ids(word: &str, v: &Vocab) -> Vec<u32> {
    let chars: Vec<char> = word.chars().collect();
    if chars.is_empty() || chars.len() > MAX_WORD_CHARS {
        return vec![UNK];
    }
    let mut out = Vec::new();
    let mut start = 0;
    let mut piece = String::new();
    while start < chars.len() {
        let mut found = None;
        for end in (start + 1..=chars.len()).rev() {
            piece.clear();
            if start > 0 {
                piece.push_str(CONTINUATION_PREFIX);
            }
            piece.extend(&chars[start..end]);
            if let Some(id) = v.id(&piece) {
                found = Some((id, end));
                break;
            }
        }
        match found {
            Some((id, end)) => {
                out.push(id);
                start = end;
            }
            None => return vec![UNK],
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn repeated_word_merges_into_prefixes() {
        // Alphabet {a, ##a}; scores 1/3 for (a, ##a) vs 2/9 for (##a, ##a)
        // give "aa", then (aa, ##a) at 1/2 beats (##a, ##a) at 1/4.
        let corpus = ["aaaa"; 5];
        let v = build_vocab(corpus.iter().copied(), 8, 1).unwrap();
        assert_eq!(v.tokens()[4..], ["##a", "a", "aa", "aaa"]);
        assert!(v.contains("a") && v.contains("aa"));
    }

    #[test]
    fn size_floor_and_errors() {
        let v = build_vocab(["hello", "world"], 5, 1).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(&v.tokens()[..4], SPECIAL_TOKENS);
        assert!(matches!(
            build_vocab(["x"], 4, 1),
            Err(TokenizerError::TargetTooSmall(4))
        ));
        assert!(matches!(
            build_vocab(Vec::<&str>::new(), 10, 1),
            Err(TokenizerError::EmptyCorpus)
        ));
    }

    #[test]
    fn min_freq_stops_merging() {
        let v = build_vocab(["ab", "cd"], 100, 2).unwrap();
        assert_eq!(v.len(), 4 + 4);
    }

    #[test]
    fn vocab_is_order_independent() {
        let a = build_vocab(["the", "cat", "sat", "on", "the", "mat"], 30, 1).unwrap();
        let b = build_vocab(["mat", "the", "on", "sat", "cat", "the"], 30, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn greedy_longest_match() {
        let v = Vocab::from_tokens(["we", "wee", "##d", "##ed", "##ing", "lady", "w", "##e"]);
        assert_eq!(tokenize_word("lady", &v), vec!["lady"]);
        // Longest match at each step, even when a shorter first piece would
        // have given a nicer split.
        assert_eq!(tokenize_word("weeding", &v), vec!["wee", "##d", "##ing"]);
        let v = Vocab::from_tokens(["we", "##ed", "##ing"]);
        assert_eq!(tokenize_word("weeding", &v), vec!["we", "##ed", "##ing"]);
        assert_eq!(tokenize_word("ßß", &v), vec!["[UNK]"]);
        assert_eq!(tokenize_word("wex", &v), vec!["[UNK]"]);
    }

    #[test]
    fn file_round_trip_is_bit_exact() {
        let v = build_vocab(["alpha", "beta", "alphabet"], 20, 1).unwrap();
        let text = v.to_file_string();
        let back = Vocab::parse(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.to_file_string(), text);
        assert!(Vocab::parse("a\nb\n").is_err());
        assert!(Vocab::parse("[PAD]\n[UNK]\n[CLS]\n[SEP]\nx\nx\n").is_err());
    }

    proptest! {
        #[test]
        fn pieces_reconstruct_the_word(words in proptest::collection::vec("[a-zA-Z]{1,9}", 1..30), probe in "[a-zA-Z]{1,12}") {
            let v = build_vocab(words.iter().map(String::as_str), 60, 1).unwrap();
            let pieces = tokenize_word(&probe, &v);
            if pieces != ["[UNK]"] {
                let joined: String = pieces
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if i == 0 { p.as_str() } else { p.strip_prefix(CONTINUATION_PREFIX).unwrap() })
                    .collect();
                prop_assert_eq!(joined, probe);
            }
        }
    }
}
