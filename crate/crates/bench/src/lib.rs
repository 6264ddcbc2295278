//! Shared inputs for the pipeline benchmarks.

use webclir::retrieval::{build_index, Index};
use webclir::synth::{self, SynthConfig, SynthCorpus};
use webclir::tm::{self, Direction, QueryModel, TrainConfig, TranslationModel};

pub struct Workload {
    pub corpus: SynthCorpus,
    pub forward: TranslationModel,
    pub reverse: TranslationModel,
    pub index: Index,
    pub queries: Vec<(String, QueryModel)>,
}

pub fn corpus() -> SynthCorpus {
    synth::generate(&SynthConfig::default())
}

/// The default synthetic corpus with both translation directions trained
/// and pruned at 0.1.
pub fn workload() -> Workload {
    let corpus = corpus();
    let config = TrainConfig::default();
    let swapped: Vec<_> = corpus.bitext.iter().map(|(s, t)| (t.clone(), s.clone())).collect();
    let forward = tm::train(&corpus.bitext, Direction::new("en", "fr"), &config).expect("synthetic bitext trains");
    let reverse = tm::train(&swapped, Direction::new("fr", "en"), &config).expect("synthetic bitext trains");
    let index = build_index(corpus.documents.iter().map(|(id, w)| (id.clone(), w.clone()))).expect("non-empty");
    let queries = corpus
        .topics
        .iter()
        .map(|t| (t.id.clone(), QueryModel::from_terms("en", &t.source_terms)))
        .collect();
    Workload {
        forward: tm::prune_threshold(&forward.model, 0.1),
        reverse: tm::prune_threshold(&reverse.model, 0.1),
        corpus,
        index,
        queries,
    }
}
