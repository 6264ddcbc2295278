//! Deterministic synthetic data: a two-language lexicon with a one-to-one
//! word mapping, a topical bitext, a target-language test collection with
//! planted relevance, and sentence-aligned document pairs with injected
//! merges for alignment experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::Qrels;
use crate::textprep::Sentence;

const SOURCE_SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "nu", "pe", "ri", "sa", "to", "vu", "ze", "ba", "do", "fi", "gu", "he", "ji",
];
const TARGET_SYLLABLES: &[&str] = &[
    "qo", "wy", "xe", "ry", "ty", "yo", "ul", "io", "op", "as", "dy", "fo", "gy", "hu", "jy", "ke",
];

/// Index-aligned word lists: `source[i]` translates as `target[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub source: Vec<String>,
    pub target: Vec<String>,
}

fn spell(mut i: usize, syllables: &[&str]) -> String {
    // two to four syllables; distinct indices give distinct words
    let base = syllables.len();
    let mut word = String::new();
    let mut n = 0;
    loop {
        word.push_str(syllables[i % base]);
        i /= base;
        n += 1;
        if i == 0 && n >= 2 {
            break;
        }
        if i == 0 {
            i = 0;
        }
    }
    word
}

impl Lexicon {
    pub fn new(size: usize) -> Self {
        Lexicon {
            source: (0..size).map(|i| spell(i + 17, SOURCE_SYLLABLES)).collect(),
            target: (0..size).map(|i| spell(i + 17, TARGET_SYLLABLES)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub vocabulary: usize,
    pub sentence_pairs: usize,
    pub documents: usize,
    pub topics: usize,
    /// Words reserved for each topic; the rest are general vocabulary.
    pub words_per_topic: usize,
    pub query_terms: usize,
    pub sentence_len: (usize, usize),
    pub document_len: (usize, usize),
    /// Share of a sentence's words drawn from its topic.
    pub sentence_topicality: f64,
    /// Share of a document's words drawn from its topic.
    pub document_topicality: f64,
    /// Share of a document's words drawn from other topics.
    pub document_noise: f64,
    /// Probability of dropping, and separately of inserting, a target word.
    pub translation_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 20020601,
            vocabulary: 500,
            sentence_pairs: 2000,
            documents: 100,
            topics: 20,
            words_per_topic: 15,
            query_terms: 4,
            sentence_len: (4, 12),
            document_len: (60, 120),
            sentence_topicality: 0.6,
            document_topicality: 0.25,
            document_noise: 0.08,
            translation_noise: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthTopic {
    pub id: String,
    pub source_terms: Vec<String>,
    /// Exact translations of `source_terms`.
    pub target_terms: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub lexicon: Lexicon,
    /// Tokenized (source, target) sentence pairs.
    pub bitext: Vec<(Vec<String>, Vec<String>)>,
    /// Target-language documents.
    pub documents: Vec<(String, Vec<String>)>,
    pub topics: Vec<SynthTopic>,
    pub qrels: Qrels,
}

struct Sampler {
    topics: usize,
    per_topic: usize,
    general: Vec<usize>,
    /// Cumulative Zipf weights over `general`.
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(vocab: usize, topics: usize, per_topic: usize) -> Self {
        let general: Vec<usize> = (topics * per_topic..vocab).collect();
        let mut acc = 0.0;
        let cumulative = (0..general.len())
            .map(|r| {
                acc += 1.0 / (r as f64 + 1.0);
                acc
            })
            .collect();
        Sampler {
            topics,
            per_topic,
            general,
            cumulative,
        }
    }

    fn topical(&self, rng: &mut ChaCha8Rng, topic: usize) -> usize {
        topic * self.per_topic + rng.gen_range(0..self.per_topic)
    }

    fn general(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().expect("general vocabulary is non-empty");
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c < x);
        self.general[i.min(self.general.len() - 1)]
    }

    fn other_topic(&self, rng: &mut ChaCha8Rng, topic: usize) -> usize {
        let mut t = rng.gen_range(0..self.topics - 1);
        if t >= topic {
            t += 1;
        }
        self.topical(rng, t)
    }
}

/// Generates the corpus. Equal configurations give identical output.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    assert!(config.topics >= 2, "need at least two topics");
    assert!(
        config.topics * config.words_per_topic < config.vocabulary,
        "no general vocabulary left"
    );
    assert!(config.query_terms <= config.words_per_topic);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lexicon = Lexicon::new(config.vocabulary);
    let sampler = Sampler::new(config.vocabulary, config.topics, config.words_per_topic);

    let mut bitext = Vec::with_capacity(config.sentence_pairs);
    for _ in 0..config.sentence_pairs {
        let topic = rng.gen_range(0..config.topics);
        let len = rng.gen_range(config.sentence_len.0..=config.sentence_len.1);
        let ids: Vec<usize> = (0..len)
            .map(|_| {
                if rng.gen_bool(config.sentence_topicality) {
                    sampler.topical(&mut rng, topic)
                } else {
                    sampler.general(&mut rng)
                }
            })
            .collect();
        let source: Vec<String> = ids.iter().map(|&i| lexicon.source[i].clone()).collect();
        let mut target: Vec<String> = Vec::with_capacity(len + 1);
        for &i in &ids {
            if !rng.gen_bool(config.translation_noise) {
                target.push(lexicon.target[i].clone());
            }
        }
        if rng.gen_bool(config.translation_noise) {
            target.push(lexicon.target[sampler.general(&mut rng)].clone());
        }
        if target.is_empty() {
            target.push(lexicon.target[ids[0]].clone());
        }
        target.shuffle(&mut rng);
        bitext.push((source, target));
    }

    let mut documents = Vec::with_capacity(config.documents);
    let mut qrels = Qrels::default();
    for d in 0..config.documents {
        let topic = d % config.topics;
        let id = format!("D{d:04}");
        let len = rng.gen_range(config.document_len.0..=config.document_len.1);
        let words: Vec<String> = (0..len)
            .map(|_| {
                let x: f64 = rng.gen();
                let i = if x < config.document_topicality {
                    sampler.topical(&mut rng, topic)
                } else if x < config.document_topicality + config.document_noise {
                    sampler.other_topic(&mut rng, topic)
                } else {
                    sampler.general(&mut rng)
                };
                lexicon.target[i].clone()
            })
            .collect();
        qrels.add(&format!("T{:02}", topic + 1), &id);
        documents.push((id, words));
    }

    let topics = (0..config.topics)
        .map(|k| {
            let mut ids: Vec<usize> = (0..config.words_per_topic)
                .map(|j| k * config.words_per_topic + j)
                .collect();
            ids.shuffle(&mut rng);
            ids.truncate(config.query_terms);
            SynthTopic {
                id: format!("T{:02}", k + 1),
                source_terms: ids.iter().map(|&i| lexicon.source[i].clone()).collect(),
                target_terms: ids.iter().map(|&i| lexicon.target[i].clone()).collect(),
            }
        })
        .collect();

    SynthCorpus {
        lexicon,
        bitext,
        documents,
        topics,
        qrels,
    }
}

/// A document pair for alignment experiments.
#[derive(Debug, Clone)]
pub struct AlignedDoc {
    pub source: Vec<Sentence>,
    pub target: Vec<Sentence>,
    /// Ground-truth 1-1 couples as (source index, target index).
    pub one_to_one: Vec<(usize, usize)>,
}

/// Document pairs whose sentences translate one-to-one, except that with
/// probability `merge_rate` a sentence is merged with its successor on one
/// side (alternating sides), producing a 2-1 or 1-2 couple.
pub fn generate_aligned_docs(seed: u64, documents: usize, merge_rate: f64) -> Vec<AlignedDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lexicon = Lexicon::new(400);
    let mut out = Vec::with_capacity(documents);
    let mut merge_target = false;
    for _ in 0..documents {
        let n = rng.gen_range(8..=20);
        let pairs: Vec<(String, String)> = (0..n)
            .map(|_| {
                let len = rng.gen_range(3..=25);
                let ids: Vec<usize> = (0..len).map(|_| rng.gen_range(0..lexicon.len())).collect();
                let s: Vec<&str> = ids.iter().map(|&i| lexicon.source[i].as_str()).collect();
                let t: Vec<&str> = ids.iter().map(|&i| lexicon.target[i].as_str()).collect();
                (format!("{}.", s.join(" ")), format!("{}.", t.join(" ")))
            })
            .collect();
        let mut doc = AlignedDoc {
            source: Vec::new(),
            target: Vec::new(),
            one_to_one: Vec::new(),
        };
        let mut i = 0;
        while i < pairs.len() {
            if i + 1 < pairs.len() && rng.gen_bool(merge_rate) {
                let (a, b) = (&pairs[i], &pairs[i + 1]);
                if merge_target {
                    doc.source.push(Sentence::new(a.0.clone()));
                    doc.source.push(Sentence::new(b.0.clone()));
                    doc.target.push(Sentence::new(format!("{} {}", a.1, b.1)));
                } else {
                    doc.source.push(Sentence::new(format!("{} {}", a.0, b.0)));
                    doc.target.push(Sentence::new(a.1.clone()));
                    doc.target.push(Sentence::new(b.1.clone()));
                }
                merge_target = !merge_target;
                i += 2;
                continue;
            }
            doc.one_to_one.push((doc.source.len(), doc.target.len()));
            doc.source.push(Sentence::new(pairs[i].0.clone()));
            doc.target.push(Sentence::new(pairs[i].1.clone()));
            i += 1;
        }
        out.push(doc);
    }
    out
}
