//! Seeded synthetic collections.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::TaggedTokens;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SMALL_TAGS: [&str; 6] = ["NOUN", "VERB", "ADJ", "DET", "PREP", "PUNCT"];
const SMALL_WORDS: [&str; 12] = [
    "cat", "Cat", "dog", "ran", "the", "a", "red", "on", "sat", "fast", "mat", "it",
];

/// Up to `max_docs` documents of up to `max_len` tokens over a tiny vocabulary,
/// so that repeats inside one window are common. Includes mixed case and
/// punctuation-only tokens.
pub fn random_tagged_corpus(
    rng: &mut ChaCha8Rng,
    max_docs: usize,
    max_len: usize,
) -> Vec<(String, TaggedTokens)> {
    let num_docs = rng.random_range(0..=max_docs);
    (0..num_docs)
        .map(|d| {
            let len = rng.random_range(0..=max_len);
            let tokens = (0..len)
                .map(|_| {
                    let tag = SMALL_TAGS[rng.random_range(0..SMALL_TAGS.len())];
                    let word = if tag == "PUNCT" {
                        [",", ".", "--"][rng.random_range(0..3)].to_string()
                    } else {
                        SMALL_WORDS[rng.random_range(0..SMALL_WORDS.len())].to_string()
                    };
                    (word, tag.to_string())
                })
                .collect();
            (format!("D{d}"), tokens)
        })
        .collect()
}

/// Renders documents in the tagged-corpus format.
pub fn to_tagged_text(docs: &[(String, TaggedTokens)]) -> String {
    let mut out = String::new();
    for (docno, tokens) in docs {
        writeln!(out, "#DOC {docno}").unwrap();
        for (s, t) in tokens {
            writeln!(out, "{s}\t{t}").unwrap();
        }
    }
    out
}

fn pseudo_words(rng: &mut ChaCha8Rng, count: usize, taken: &mut Vec<String>) -> Vec<String> {
    const ONSETS: [&str; 14] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
    ];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    const CODAS: [&str; 6] = ["", "n", "r", "l", "s", "k"];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            w.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
            w.push_str(CODAS[rng.random_range(0..CODAS.len())]);
        }
        if !taken.contains(&w) {
            taken.push(w.clone());
            out.push(w);
        }
    }
    out
}

/// A collection of random tagged documents with random short queries.
#[derive(Debug, Clone)]
pub struct RandomCollection {
    pub docs: Vec<(String, TaggedTokens)>,
    pub queries: Vec<(String, Vec<String>)>,
}

const OPEN_TAGS: [&str; 4] = ["NOUN", "VERB", "ADJ", "ADV"];
const CLOSED: [(&str, &str); 8] = [
    ("the", "DET"),
    ("a", "DET"),
    ("of", "PREP"),
    ("in", "PREP"),
    ("and", "CONJ"),
    ("it", "PRON"),
    ("will", "MODAL"),
    (",", "PUNCT"),
];

/// `num_docs` documents of 5 to 60 tokens drawn from a skewed vocabulary, and
/// `num_queries` queries of 1 to 4 terms drawn from the same vocabulary.
pub fn random_collection(seed: u64, num_docs: usize, num_queries: usize) -> RandomCollection {
    let mut rng = rng(seed);
    let mut taken = Vec::new();
    let vocab: Vec<(String, &str)> = pseudo_words(&mut rng, 300, &mut taken)
        .into_iter()
        .map(|w| {
            let tag = OPEN_TAGS[rng.random_range(0..OPEN_TAGS.len())];
            (w, tag)
        })
        .collect();
    // skewed draw: square of a uniform index favours the head of the list
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        ((u * u) * vocab.len() as f64) as usize
    };
    let docs = (0..num_docs)
        .map(|d| {
            let len = rng.random_range(5..=60);
            let tokens = (0..len)
                .map(|_| {
                    if rng.random_bool(0.35) {
                        let (w, t) = CLOSED[rng.random_range(0..CLOSED.len())];
                        (w.to_string(), t.to_string())
                    } else {
                        let (w, t) = &vocab[draw(&mut rng)];
                        (w.clone(), t.to_string())
                    }
                })
                .collect();
            (format!("doc{d:04}"), tokens)
        })
        .collect();
    let queries = (0..num_queries)
        .map(|q| {
            let len = rng.random_range(1..=4);
            let terms = (0..len).map(|_| vocab[draw(&mut rng)].0.clone()).collect();
            (format!("{}", 100 + q), terms)
        })
        .collect();
    RandomCollection { docs, queries }
}

/// A collection with planted relevance, topics and judgments.
#[derive(Debug, Clone)]
pub struct PlantedCollection {
    pub docs: Vec<(String, TaggedTokens)>,
    /// `(qid, title)`.
    pub topics: Vec<(String, String)>,
    /// `(qid, docno, grade)`.
    pub qrels: Vec<(String, String, i32)>,
}

impl PlantedCollection {
    pub fn tagged_text(&self) -> String {
        to_tagged_text(&self.docs)
    }

    pub fn topics_text(&self) -> String {
        self.topics
            .iter()
            .map(|(q, t)| format!("{q}\t{t}\n"))
            .collect()
    }

    pub fn qrels_text(&self) -> String {
        self.qrels
            .iter()
            .map(|(q, d, r)| format!("{q} 0 {d} {r}\n"))
            .collect()
    }
}

const TEMPLATES: [&[&str]; 5] = [
    &["DET", "ADJ", "NOUN", "VERB", "PREP", "DET", "NOUN", "PUNCT"],
    &["PRON", "VERB", "DET", "NOUN", "ADV", "PUNCT"],
    &[
        "DET", "NOUN", "VERB", "PREP", "DET", "ADJ", "NOUN", "CONJ", "PRON", "VERB", "PUNCT",
    ],
    &["DET", "NOUN", "MODAL", "VERB", "ADV", "PUNCT"],
    &[
        "ADV", "PUNCT", "PRON", "VERB", "PREP", "DET", "NOUN", "PUNCT",
    ],
];
// Slot of the anchoring template where topical nouns go.
const TOPIC_SLOT: usize = 2;

struct Lexicon {
    by_tag: Vec<(&'static str, Vec<String>)>,
}

impl Lexicon {
    fn new(rng: &mut ChaCha8Rng, taken: &mut Vec<String>) -> Self {
        let fixed = |words: &[&str]| words.iter().map(|w| w.to_string()).collect::<Vec<_>>();
        Self {
            by_tag: vec![
                ("NOUN", pseudo_words(rng, 150, taken)),
                ("VERB", pseudo_words(rng, 60, taken)),
                ("ADJ", pseudo_words(rng, 40, taken)),
                ("ADV", pseudo_words(rng, 20, taken)),
                ("DET", fixed(&["the", "a", "this", "that", "every"])),
                ("PREP", fixed(&["in", "on", "with", "under", "near", "of"])),
                ("PRON", fixed(&["he", "she", "they", "it", "we"])),
                ("CONJ", fixed(&["and", "but", "or"])),
                ("MODAL", fixed(&["will", "can", "may", "must"])),
                ("PUNCT", fixed(&[".", ",", ";"])),
            ],
        }
    }

    fn word(&self, rng: &mut ChaCha8Rng, tag: &str) -> String {
        let words = &self
            .by_tag
            .iter()
            .find(|(t, _)| *t == tag)
            .expect("known tag")
            .1;
        words[rng.random_range(0..words.len())].clone()
    }
}

fn sentence(rng: &mut ChaCha8Rng, lex: &Lexicon, template: &[&str]) -> TaggedTokens {
    template
        .iter()
        .map(|t| (lex.word(rng, t), t.to_string()))
        .collect()
}

/// Sentences until at least `len` tokens; half of them in the topical frame.
fn filler(rng: &mut ChaCha8Rng, lex: &Lexicon, len: usize) -> TaggedTokens {
    let mut out = Vec::new();
    while out.len() < len {
        let t = if rng.random_bool(0.5) {
            TEMPLATES[0]
        } else {
            TEMPLATES[rng.random_range(1..TEMPLATES.len())]
        };
        out.extend(sentence(rng, lex, t));
    }
    out
}

/// Inserts a sentence whose topical slot carries `word`, at a sentence boundary.
fn plant_topical(rng: &mut ChaCha8Rng, lex: &Lexicon, doc: &mut TaggedTokens, word: &str) {
    let mut s = sentence(rng, lex, TEMPLATES[0]);
    s[TOPIC_SLOT].0 = word.to_string();
    let boundaries: Vec<usize> = std::iter::once(0)
        .chain(
            doc.iter()
                .enumerate()
                .filter(|(_, (_, t))| t == "PUNCT")
                .map(|(i, _)| i + 1),
        )
        .collect();
    let at = boundaries[rng.random_range(0..boundaries.len())];
    doc.splice(at..at, s);
}

/// Overwrites a random non-punctuation token with `word`, keeping the slot's tag.
fn plant_anywhere(rng: &mut ChaCha8Rng, doc: &mut TaggedTokens, word: &str) {
    loop {
        let i = rng.random_range(0..doc.len());
        if doc[i].1 != "PUNCT" {
            doc[i].0 = word.to_string();
            return;
        }
    }
}

/// 500 documents and 25 two-term queries `"<topic> <noise>"`.
///
/// Per query: six relevant documents use the topical noun two or three times,
/// always in one fixed syntactic frame; six non-relevant documents repeat the noise word
/// three or four times in arbitrary syntactic positions; three long non-relevant
/// documents contain both words once. The remaining 125 documents are filler.
/// The topical noun has few POS contexts and the noise word many, so POS weights
/// separate them while the baseline favours the repeated noise word. Half of all
/// filler sentences use the topical frame, so its n-grams are also the most frequent.
pub fn planted_collection(seed: u64) -> PlantedCollection {
    const QUERIES: usize = 25;
    const FILLER_DOCS: usize = 125;
    let mut rng = rng(seed);
    let mut taken = Vec::new();
    let lex = Lexicon::new(&mut rng, &mut taken);
    let topic_words = pseudo_words(&mut rng, QUERIES, &mut taken);
    let noise_words = pseudo_words(&mut rng, QUERIES, &mut taken);

    let mut docs: Vec<(TaggedTokens, Option<(usize, bool)>)> = Vec::new();
    for q in 0..QUERIES {
        for _ in 0..6 {
            let len = rng.random_range(30..=60);
            let mut d = filler(&mut rng, &lex, len);
            for _ in 0..rng.random_range(2..=3) {
                plant_topical(&mut rng, &lex, &mut d, &topic_words[q]);
            }
            docs.push((d, Some((q, true))));
        }
        for _ in 0..6 {
            let len = rng.random_range(30..=60);
            let mut d = filler(&mut rng, &lex, len);
            for _ in 0..rng.random_range(3..=4) {
                plant_anywhere(&mut rng, &mut d, &noise_words[q]);
            }
            docs.push((d, Some((q, false))));
        }
        for _ in 0..3 {
            let len = rng.random_range(350..=500);
            let mut d = filler(&mut rng, &lex, len);
            plant_topical(&mut rng, &lex, &mut d, &topic_words[q]);
            plant_anywhere(&mut rng, &mut d, &noise_words[q]);
            docs.push((d, Some((q, false))));
        }
    }
    for _ in 0..FILLER_DOCS {
        let len = rng.random_range(30..=120);
        docs.push((filler(&mut rng, &lex, len), None));
    }
    docs.shuffle(&mut rng);

    let mut out_docs = Vec::with_capacity(docs.len());
    let mut qrels = Vec::new();
    for (i, (tokens, label)) in docs.into_iter().enumerate() {
        let docno = format!("SYN-{i:04}");
        if let Some((q, relevant)) = label {
            qrels.push((format!("{}", 301 + q), docno.clone(), i32::from(relevant)));
        }
        out_docs.push((docno, tokens));
    }
    qrels.sort();
    let topics = (0..QUERIES)
        .map(|q| {
            (
                format!("{}", 301 + q),
                format!("{} {}", topic_words[q], noise_words[q]),
            )
        })
        .collect();
    PlantedCollection {
        docs: out_docs,
        topics,
        qrels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = planted_collection(7);
        let b = planted_collection(7);
        assert_eq!(a.tagged_text(), b.tagged_text());
        assert_eq!(a.docs.len(), 500);
        assert_eq!(a.topics.len(), 25);
        assert_eq!(a.qrels.iter().filter(|q| q.2 == 1).count(), 150);
        let r = random_collection(3, 200, 20);
        assert_eq!(r.docs.len(), 200);
        assert_eq!(r.queries.len(), 20);
    }
}
