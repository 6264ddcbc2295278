//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fail.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::time::Instant;

use webclir::aligner::{self, align, total_score, AlignParams, Pattern};
use webclir::config::RunConfig;
use webclir::eval::{self, evaluate, friedman, mean_ap, per_topic_ap, sign_test, translation_stats, Qrels, TopicSet};
use webclir::miner::{mine, LanguageIdModel, MinerConfig};
use webclir::retrieval::{
    build_index, combine, naive_query, read_run, score_dt, score_mono, score_naive, score_qt, write_run, Index, Method,
    RankedRun, Ranking, RetrievalParams, Searcher,
};
use webclir::synth::{self, SynthConfig, SynthCorpus};
use webclir::textprep::Sentence;
use webclir::tm::{
    self, derive_variant, project_query, prune_noise, prune_threshold, prune_topn, train, Direction, OovPolicy,
    QueryModel, TrainConfig, TranslationModel, Variant,
};

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_owned).collect()
}

fn corpus(pairs: &[(&str, &str)]) -> Vec<(Vec<String>, Vec<String>)> {
    pairs.iter().map(|(a, b)| (words(a), words(b))).collect()
}

// ---------------------------------------------------------------------------
// EM reference: enumerates every alignment vector explicitly

struct Reference {
    probs: BTreeMap<(String, String), f64>,
    counts: BTreeMap<(String, String), f64>,
    trace: Vec<f64>,
}

fn alignments(l: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..l).map(move |i| {
                    let mut b = a.clone();
                    b.push(i);
                    b
                })
            })
            .collect();
    }
    out
}

fn reference_em(pairs: &[(Vec<String>, Vec<String>)], iterations: usize) -> Reference {
    let mut probs: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut cooc: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (s, t) in pairs {
        for a in s {
            let row = cooc.entry(a.clone()).or_default();
            for b in t {
                if !row.contains(b) {
                    row.push(b.clone());
                }
            }
        }
    }
    for (a, row) in &cooc {
        for b in row {
            probs.insert((a.clone(), b.clone()), 1.0 / row.len() as f64);
        }
    }
    let estep = |probs: &BTreeMap<(String, String), f64>| {
        let mut counts: BTreeMap<(String, String), f64> = BTreeMap::new();
        let mut ll = 0.0;
        for (s, t) in pairs {
            let all = alignments(s.len(), t.len());
            let weight: Vec<f64> = all
                .iter()
                .map(|a| {
                    a.iter()
                        .enumerate()
                        .map(|(j, &i)| probs[&(s[i].clone(), t[j].clone())])
                        .product()
                })
                .collect();
            let z: f64 = weight.iter().sum();
            ll += (z / (s.len() as f64).powi(t.len() as i32)).ln();
            for (a, w) in all.iter().zip(&weight) {
                for (j, &i) in a.iter().enumerate() {
                    *counts.entry((s[i].clone(), t[j].clone())).or_insert(0.0) += w / z;
                }
            }
        }
        (ll, counts)
    };
    let mut trace = Vec::new();
    let mut counts = BTreeMap::new();
    for _ in 0..iterations {
        let (ll, c) = estep(&probs);
        trace.push(ll);
        let mut totals: BTreeMap<String, f64> = BTreeMap::new();
        for ((a, _), v) in &c {
            *totals.entry(a.clone()).or_insert(0.0) += v;
        }
        for ((a, b), p) in probs.iter_mut() {
            *p = c.get(&(a.clone(), b.clone())).copied().unwrap_or(0.0) / totals[a];
        }
        counts = c;
    }
    trace.push(estep(&probs).0);
    Reference { probs, counts, trace }
}

fn em_fixtures() -> Vec<Vec<(Vec<String>, Vec<String>)>> {
    vec![
        corpus(&[("a b", "x y"), ("a", "x")]),
        corpus(&[
            ("the house", "la maison"),
            ("the book", "le livre"),
            ("a book", "un livre"),
        ]),
        corpus(&[("a a b", "x y y"), ("b c", "y z"), ("c", "z")]),
        corpus(&[("a b c d", "w x"), ("a c", "w"), ("b d e", "x y z q"), ("e", "q y")]),
        corpus(&[
            ("p q r", "u v w"),
            ("q r s", "v w t"),
            ("p s", "u t"),
            ("r", "w"),
            ("p q", "u v"),
        ]),
        corpus(&[("k l m n o", "f g h i j"), ("k", "f g"), ("m o", "h j j")]),
    ]
}

fn em_config(iterations: usize) -> TrainConfig {
    TrainConfig {
        iterations,
        ..TrainConfig::default()
    }
}

fn check_em_oracle() -> Outcome {
    let start = Instant::now();
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    let fixtures = em_fixtures();
    for (n, pairs) in fixtures.iter().enumerate() {
        for iterations in [1, 3, 10] {
            let out = train(pairs, Direction::new("src", "tgt"), &em_config(iterations)).map_err(|e| e.to_string())?;
            let reference = reference_em(pairs, iterations);
            ensure(out.model.num_entries() == reference.probs.len(), || {
                format!(
                    "fixture {n}: {} entries, reference has {}",
                    out.model.num_entries(),
                    reference.probs.len()
                )
            })?;
            for ((a, b), p) in &reference.probs {
                worst = worst.max((out.model.prob(a, b) - p).abs());
                worst = worst.max((out.counts.get(a, b) - reference.counts[&(a.clone(), b.clone())]).abs());
                compared += 2;
            }
            ensure(out.log_likelihood.len() == reference.trace.len(), || {
                format!("fixture {n}: trace length")
            })?;
            for (x, y) in out.log_likelihood.iter().zip(&reference.trace) {
                worst = worst.max((x - y).abs());
                compared += 1;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    let out = train(&fixtures[0], Direction::new("src", "tgt"), &em_config(40)).map_err(|e| e.to_string())?;
    let pxa = out.model.prob("a", "x");
    ensure(pxa >= 1.0 - 1e-6, || format!("P(x|a) = {pxa} after 40 iterations"))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, || format!("took {elapsed:.3}s"))?;
    Ok(format!(
        "{} corpora, {compared} values, max deviation {worst:.1e}; P(x|a)={pxa:.9}",
        fixtures.len()
    ))
}

// ---------------------------------------------------------------------------
// synthetic pipeline shared by the retrieval checks

struct Pipeline {
    corpus: SynthCorpus,
    forward: tm::TrainOutput,
    reverse: tm::TrainOutput,
    index: Index,
    source_queries: Vec<(String, QueryModel)>,
    target_queries: Vec<(String, QueryModel)>,
}

fn build_pipeline(config: &RunConfig) -> Result<Pipeline, String> {
    let corpus = synth::generate(&SynthConfig::default());
    let train_config = config.train_config().map_err(|e| e.to_string())?;
    let swapped: Vec<(Vec<String>, Vec<String>)> = corpus.bitext.iter().map(|(s, t)| (t.clone(), s.clone())).collect();
    let forward = train(&corpus.bitext, Direction::new("en", "fr"), &train_config).map_err(|e| e.to_string())?;
    let reverse = train(&swapped, Direction::new("fr", "en"), &train_config).map_err(|e| e.to_string())?;
    let index =
        build_index(corpus.documents.iter().map(|(id, w)| (id.clone(), w.clone()))).map_err(|e| e.to_string())?;
    let source_queries = corpus
        .topics
        .iter()
        .map(|t| (t.id.clone(), QueryModel::from_terms("en", &t.source_terms)))
        .collect();
    let target_queries = corpus
        .topics
        .iter()
        .map(|t| (t.id.clone(), QueryModel::from_terms("fr", &t.target_terms)))
        .collect();
    Ok(Pipeline {
        corpus,
        forward,
        reverse,
        index,
        source_queries,
        target_queries,
    })
}

fn pruned(p: &Pipeline, config: &RunConfig) -> Result<(TranslationModel, TranslationModel), String> {
    let theta: f64 = config.get("prune_threshold").map_err(|e| e.to_string())?;
    Ok((
        prune_threshold(&p.forward.model, theta),
        prune_threshold(&p.reverse.model, theta),
    ))
}

/// Global top-N sized to keep the same number of entries per source word
/// as a large bilingual model keeps under its 100K-entry budget.
fn topn_budget(p: &Pipeline) -> usize {
    5 * p.forward.model.num_sources()
}

fn map_of(run: &RankedRun, qrels: &Qrels) -> Result<f64, String> {
    mean_ap(run, qrels, eval::DEFAULT_CUTOFF, TopicSet::Retrieved).map_err(|e| e.to_string())
}

fn check_normalization(p: &Pipeline) -> Outcome {
    let mut models: Vec<(String, TranslationModel)> = Vec::new();
    let mut monotone = 0;
    let mut fixtures = em_fixtures();
    fixtures.push(p.corpus.bitext.clone());
    for (n, pairs) in fixtures.iter().enumerate() {
        let out = train(pairs, Direction::new("src", "tgt"), &em_config(12)).map_err(|e| e.to_string())?;
        for w in out.log_likelihood.windows(2) {
            ensure(w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0), || {
                format!("fixture {n}: log-likelihood fell from {} to {}", w[0], w[1])
            })?;
        }
        monotone += 1;
        models.push((format!("train#{n}"), out.model.clone()));
        models.push((format!("threshold#{n}"), prune_threshold(&out.model, 0.1)));
        models.push((format!("topn#{n}"), prune_topn(&out.model, 7, &out.counts)));
        models.push((format!("noise#{n}"), prune_noise(&out.model, 0.05, true)));
    }
    models.push(("reverse".into(), p.reverse.model.clone()));
    models.push((
        "reverse-topn".into(),
        prune_topn(&p.reverse.model, 1000, &p.reverse.counts),
    ));
    let mut worst: f64 = 0.0;
    for (name, m) in &models {
        let dev = m.max_row_deviation();
        ensure(dev <= 1e-9, || format!("{name}: row sum off by {dev:e}"))?;
        worst = worst.max(dev);
    }
    Ok(format!(
        "{} models row-normalized (max deviation {worst:.1e}); log-likelihood non-decreasing on {monotone} corpora",
        models.len()
    ))
}

fn scores(r: &Ranking) -> HashMap<&str, f64> {
    r.docs.iter().map(|d| (d.doc.as_str(), d.score)).collect()
}

fn same_scores(a: &Ranking, b: &Ranking, what: &str) -> Result<f64, String> {
    let (sa, sb) = (scores(a), scores(b));
    ensure(sa.len() == sb.len(), || {
        format!("{what}: {} vs {} documents", sa.len(), sb.len())
    })?;
    let mut worst: f64 = 0.0;
    for (doc, x) in &sa {
        let y = sb.get(doc).ok_or_else(|| format!("{what}: {doc} missing"))?;
        worst = worst.max((x - y).abs());
    }
    ensure(worst <= 1e-12, || format!("{what}: max deviation {worst:e}"))?;
    Ok(worst)
}

fn check_identities(p: &Pipeline) -> Outcome {
    let params = RetrievalParams::default();
    let vocab: Vec<&str> = p.index.vocabulary();
    let identity_fwd = TranslationModel::identity(Direction::new("fr", "fr"), vocab.iter().copied());
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (_, q) in &p.target_queries {
        let mono = score_mono(q, &p.index, &params);
        worst = worst.max(same_scores(
            &mono,
            &score_qt(q, &identity_fwd, &p.index, &params),
            "QT/identity",
        )?);
        worst = worst.max(same_scores(
            &mono,
            &score_dt(q, &identity_fwd, &p.index, &params),
            "DT/identity",
        )?);
        checked += 2;
    }

    // one translation per term: NAIVE and QT-BM coincide
    let best = derive_variant(&p.forward.model, Variant::BestMatch);
    for (_, q) in &p.source_queries {
        let naive = score_naive(q, &best, &p.index, &params);
        let bm = score_qt(q, &best, &p.index, &params);
        worst = worst.max(same_scores(&naive, &bm, "NAIVE/QT-BM")?);
        checked += 1;
    }

    // a document whose model equals the collection model scores zero
    let flat = build_index([("d1", words("a b b c")), ("d2", words("c b a b"))]).map_err(|e| e.to_string())?;
    let q = QueryModel::from_terms("fr", &words("a b c"));
    for d in score_mono(&q, &flat, &params).docs {
        ensure(d.score.abs() <= 1e-12, || {
            format!("flat document {} scores {}", d.doc, d.score)
        })?;
        checked += 1;
    }
    Ok(format!("{checked} rankings compared, max deviation {worst:.1e}"))
}

fn check_table5() -> Outcome {
    let model = TranslationModel::from_entries(
        Direction::new("en", "fr"),
        [("drug", "drogue", 0.55), ("drug", "médicament", 0.45)],
    );
    let row = |m: &TranslationModel| -> Vec<(String, f64)> {
        m.translations("drug")
            .iter()
            .map(|t| (t.target.clone(), t.prob))
            .collect()
    };
    let expect = |name: &str, got: Vec<(String, f64)>, want: &[(&str, f64)]| -> Result<(), String> {
        let ok = got.len() == want.len()
            && got
                .iter()
                .zip(want)
                .all(|((t, p), (wt, wp))| t == wt && (p - wp).abs() < 1e-12);
        ensure(ok, || format!("{name}: got {got:?}"))
    };
    expect(
        "QT-BM",
        row(&derive_variant(&model, Variant::BestMatch)),
        &[("drogue", 1.0)],
    )?;
    expect(
        "QT-EQ",
        row(&derive_variant(&model, Variant::Equal)),
        &[("drogue", 0.5), ("médicament", 0.5)],
    )?;
    expect(
        "SYN",
        row(&derive_variant(&model, Variant::Synonym)),
        &[("drogue", 1.0), ("médicament", 1.0)],
    )?;
    let query = QueryModel::from_terms("en", &["drug"]);
    let naive = naive_query(&query, &model, OovPolicy::PassThrough);
    let bag: Vec<(String, f64)> = naive.raw_counts().iter().map(|(t, c)| (t.clone(), *c)).collect();
    expect("NAIVE", bag, &[("drogue", 1.0), ("médicament", 1.0)])?;
    let qt = project_query(&query, &model, OovPolicy::PassThrough);
    let dist: Vec<(String, f64)> = qt.distribution().iter().map(|(t, p)| (t.clone(), *p)).collect();
    expect("QT", dist, &[("drogue", 0.55), ("médicament", 0.45)])?;
    Ok("QT-BM, QT-EQ, SYN, NAIVE and QT rows reproduced".into())
}

struct ClirRuns {
    mono: RankedRun,
    qt: RankedRun,
    dt: RankedRun,
    combined: RankedRun,
}

fn clir_runs(p: &Pipeline, config: &RunConfig) -> Result<ClirRuns, String> {
    let params = config.retrieval_params().map_err(|e| e.to_string())?;
    let alpha: f64 = config.get("combine_alpha").map_err(|e| e.to_string())?;
    let (fwd, rev) = pruned(p, config)?;
    let s = Searcher::new(&p.index, params.clone())
        .map_err(|e| e.to_string())?
        .with_forward(&fwd)
        .with_reverse(&rev);
    let run = |m: Method, tag: &str, q: &[(String, QueryModel)]| s.run(m, tag, q).map_err(|e| e.to_string());
    let mono = run(Method::Mono, "mono", &p.target_queries)?;
    let qt = run(Method::Qt, "qt", &p.source_queries)?;
    let dt = run(Method::Dt, "dt", &p.source_queries)?;
    let combined = combine(&qt, &dt, alpha, params.top_k, "qt+dt").map_err(|e| e.to_string())?;
    Ok(ClirRuns { mono, qt, dt, combined })
}

fn check_end_to_end(config: &RunConfig) -> Outcome {
    let start = Instant::now();
    let p = build_pipeline(config)?;
    let runs = clir_runs(&p, config)?;
    let qrels = &p.corpus.qrels;
    let (mono, qt, dt, comb) = (
        map_of(&runs.mono, qrels)?,
        map_of(&runs.qt, qrels)?,
        map_of(&runs.dt, qrels)?,
        map_of(&runs.combined, qrels)?,
    );
    let elapsed = start.elapsed().as_secs_f64();
    let detail = format!("MAP mono={mono:.4} qt={qt:.4} dt={dt:.4} qt+dt={comb:.4}");
    ensure((qt - mono).abs() <= 0.02, || {
        format!("QT not within 0.02 of mono: {detail}")
    })?;
    ensure(comb >= qt.min(dt), || format!("combination below both runs: {detail}"))?;
    ensure(elapsed < 30.0, || format!("took {elapsed:.2}s: {detail}"))?;
    Ok(detail)
}

fn check_pruning(p: &Pipeline, config: &RunConfig) -> Outcome {
    let (theta_model, _) = pruned(p, config)?;
    let n = topn_budget(p);
    let topn = prune_topn(&p.forward.model, n, &p.forward.counts);
    let queries: Vec<QueryModel> = p.source_queries.iter().map(|(_, q)| q.clone()).collect();
    let stats_theta = translation_stats(&queries, &theta_model);
    let stats_topn = translation_stats(&queries, &topn);
    let params = config.retrieval_params().map_err(|e| e.to_string())?;
    let s = Searcher::new(&p.index, params)
        .map_err(|e| e.to_string())?
        .with_forward(&topn);
    let qt = s.run(Method::Qt, "qt", &p.source_queries).map_err(|e| e.to_string())?;
    let bm = s
        .run(Method::QtBm, "qt-bm", &p.source_queries)
        .map_err(|e| e.to_string())?;
    let (map_qt, map_bm) = (map_of(&qt, &p.corpus.qrels)?, map_of(&bm, &p.corpus.qrels)?);
    let detail = format!(
        "avg translations top-{n}={:.2} vs theta={:.2}; MAP qt={map_qt:.4} qt-bm={map_bm:.4}",
        stats_topn.avg_translations, stats_theta.avg_translations
    );
    ensure(stats_topn.avg_translations > stats_theta.avg_translations, || {
        detail.clone()
    })?;
    ensure(map_qt >= map_bm, || detail.clone())?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// evaluation

/// Per-topic AP and MAP computed by trec_eval on the fixture files.
type TrecReference = (usize, f64, &'static [(&'static str, f64)]);

const TREC_EVAL: &[TrecReference] = &[
    (
        1,
        0.5039915487489213,
        &[
            ("101", 0.2460380305968541),
            ("102", 0.43354287289771165),
            ("103", 0.6475032731617106),
            ("104", 0.6623951261246344),
            ("105", 0.0),
            ("106", 0.5384615384615384),
            ("107", 1.0),
        ],
    ),
    (
        2,
        0.38204743373042027,
        &[
            ("201", 0.0029069767441860465),
            ("202", 0.013888888888888888),
            ("203", 1.0),
            ("204", 0.5113938692886061),
        ],
    ),
    (
        3,
        0.2548284731104077,
        &[
            ("302", 0.0),
            ("303", 0.5),
            ("304", 0.0),
            ("305", 0.75),
            ("306", 0.0),
            ("307", 0.05705782312925169),
            ("308", 0.47674148864360205),
        ],
    ),
    (
        4,
        0.3151685457343839,
        &[("402", 0.14814814814814814), ("403", 0.4821889433206197)],
    ),
    (
        5,
        0.17925777979197124,
        &[
            ("502", 0.1263024331989849),
            ("503", 0.19545454545454544),
            ("504", 0.007692307692307693),
            ("505", 0.36639814428568873),
            ("506", 0.37969924812030076),
            ("507", 0.0),
        ],
    ),
];

fn fixture(name: &str) -> Result<String, String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/eval")
        .join(name);
    std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
}

fn check_eval_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for &(n, map, per_topic) in TREC_EVAL {
        let qrels = Qrels::parse(&fixture(&format!("qrels{n}.txt"))?).map_err(|e| e.to_string())?;
        let run = read_run(&fixture(&format!("run{n}.txt"))?).map_err(|e| e.to_string())?;
        let aps = per_topic_ap(&run, &qrels, eval::DEFAULT_CUTOFF, TopicSet::Retrieved).map_err(|e| e.to_string())?;
        ensure(aps.len() == per_topic.len(), || {
            format!("fixture {n}: {} topics scored", aps.len())
        })?;
        for (topic, want) in per_topic {
            let got = aps
                .get(*topic)
                .copied()
                .ok_or_else(|| format!("fixture {n}: topic {topic} missing"))?;
            worst = worst.max((got - want).abs());
        }
        worst = worst.max((map_of(&run, &qrels)? - map).abs());
    }
    ensure(worst <= 1e-6, || format!("MAP deviation {worst:e}"))?;

    // Friedman/Iman-Davenport: reference values from scipy on the same matrix
    let matrix = vec![
        vec![0.30, 0.25, 0.10],
        vec![0.45, 0.40, 0.20],
        vec![0.20, 0.25, 0.15],
        vec![0.60, 0.50, 0.50],
    ];
    let f = friedman(&matrix).map_err(|e| e.to_string())?;
    let dev = [
        (f.chi_square - 5.733333333333333).abs(),
        (f.statistic - 7.588235294117647).abs(),
        (f.p_value - 0.022745370370370367).abs(),
    ];
    ensure(dev.iter().all(|d| *d <= 1e-6), || {
        format!("Friedman deviations {dev:?}")
    })?;

    // exact binomial: 2 * C(9,0..2) / 2^9 two-sided, and 2 / 2^10
    let a: Vec<f64> = (0..10).map(|i| 1.0 + i as f64).collect();
    let b: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let p10 = sign_test(&a, &b).map_err(|e| e.to_string())?;
    let c = [0.5, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.1];
    let d = [0.6, 0.2, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.1];
    let p9 = sign_test(&c, &d).map_err(|e| e.to_string())?;
    let want9 = 2.0 * (1.0 + 9.0 + 36.0) / 512.0;
    ensure((p10 - 2.0 / 1024.0).abs() < 1e-15 && (p9 - want9).abs() < 1e-15, || {
        format!("sign test {p10} / {p9}")
    })?;
    Ok(format!(
        "{} trec_eval fixtures (max deviation {worst:.1e}); Friedman chi2={:.4} F={:.4} p={:.6}; sign test exact",
        TREC_EVAL.len(),
        f.chi_square,
        f.statistic,
        f.p_value
    ))
}

// ---------------------------------------------------------------------------
// aligner

fn brute_force_best(a: &[Sentence], b: &[Sentence], params: &AlignParams) -> f64 {
    let ratio = aligner::length_ratio(a, b);
    // couple scores are looked up, the sequences themselves are all walked
    let mut table = vec![vec![[f64::NAN; 6]; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for (k, pattern) in Pattern::ALL.into_iter().enumerate() {
                let (di, dj) = pattern.sizes();
                if i + di <= a.len() && j + dj <= b.len() {
                    let sa: Vec<&Sentence> = a[i..i + di].iter().collect();
                    let sb: Vec<&Sentence> = b[j..j + dj].iter().collect();
                    cell[k] = aligner::couple_score(&sa, &sb, pattern, ratio, params);
                }
            }
        }
    }
    fn go(table: &[Vec<[f64; 6]>], i: usize, j: usize, acc: f64, out: &mut f64) {
        if i + 1 == table.len() && j + 1 == table[0].len() {
            *out = out.max(acc);
            return;
        }
        for (k, pattern) in Pattern::ALL.into_iter().enumerate() {
            let score = table[i][j][k];
            if !score.is_nan() {
                let (di, dj) = pattern.sizes();
                go(table, i + di, j + dj, acc + score, out);
            }
        }
    }
    let mut out = f64::NEG_INFINITY;
    go(&table, 0, 0, 0.0, &mut out);
    out
}

fn check_aligner() -> Outcome {
    let params = AlignParams::default();
    let docs = synth::generate_aligned_docs(11, 60, 0.1);
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    for d in &docs {
        let a: Vec<Sentence> = d.source.iter().take(6).cloned().collect();
        let b: Vec<Sentence> = d.target.iter().take(6).cloned().collect();
        let dp = total_score(&align(&a, &b, &params));
        let brute = brute_force_best(&a, &b, &params);
        worst = worst.max((dp - brute).abs() / brute.abs().max(1.0));
        compared += 1;
    }
    // uneven and tiny shapes up to eight sentences
    for (k, d) in docs.iter().enumerate().take(20) {
        let a: Vec<Sentence> = d.source.iter().take(1 + k % 8).cloned().collect();
        let b: Vec<Sentence> = d.target.iter().skip(k % 3).take(8 - k % 5).cloned().collect();
        let dp = total_score(&align(&a, &b, &params));
        let brute = brute_force_best(&a, &b, &params);
        worst = worst.max((dp - brute).abs() / brute.abs().max(1.0));
        compared += 1;
    }
    ensure(worst <= 1e-9, || format!("DP differs from enumeration by {worst:e}"))?;

    let docs = synth::generate_aligned_docs(2002, 200, 0.05);
    let (mut found, mut total) = (0usize, 0usize);
    for d in &docs {
        let couples = align(&d.source, &d.target, &params);
        let got: std::collections::HashSet<(usize, usize)> = couples
            .iter()
            .filter(|c| c.pattern == Pattern::OneOne)
            .map(|c| (c.source.start, c.target.start))
            .collect();
        total += d.one_to_one.len();
        found += d.one_to_one.iter().filter(|c| got.contains(c)).count();
    }
    let recall = found as f64 / total as f64;
    ensure(recall >= 0.95, || format!("1-1 recall {recall:.4}"))?;
    Ok(format!(
        "{compared} pairs match enumeration (max rel. deviation {worst:.1e}); 1-1 recall {recall:.4} ({found}/{total})"
    ))
}

// ---------------------------------------------------------------------------
// miner

const EN: &[&str] = &[
    "The regional council approved a plan to improve rail links between the northern towns and the coast. \
     Work on the first section will begin next spring and should be finished within three years. \
     Residents were invited to comment on the proposed stations during a public meeting held last week.",
    "Our museum opens every day except Monday. Guided tours of the permanent collection start at ten in the \
     morning and at three in the afternoon. Children under twelve visit for free when accompanied by an adult, \
     and groups should book their visit at least two weeks in advance.",
    "The university library has extended its opening hours during the examination period. Students can now \
     borrow up to ten books at a time and reserve a study room online. Please remember that food and drinks \
     are not allowed in the reading rooms and that silence must be respected.",
    "This annual report describes the main activities of the association during the past year, including \
     the training courses offered to volunteers, the new partnerships with local schools and the financial \
     situation, which remained stable thanks to the support of our members and sponsors.",
    "The weather service expects heavy rain over the western mountains on Thursday, followed by strong winds \
     near the coast. Drivers are advised to avoid the high roads and to check the latest traffic information \
     before leaving home. Conditions should improve slowly during the weekend.",
];

const FR: &[&str] = &[
    "Le conseil régional a approuvé un projet destiné à améliorer les liaisons ferroviaires entre les villes \
     du nord et la côte. Les travaux du premier tronçon commenceront au printemps prochain et devraient être \
     terminés dans trois ans. Les habitants ont été invités à donner leur avis sur les gares proposées.",
    "Notre musée est ouvert tous les jours sauf le lundi. Les visites guidées de la collection permanente \
     commencent à dix heures le matin et à quinze heures l'après-midi. Les enfants de moins de douze ans \
     entrent gratuitement avec un adulte, et les groupes doivent réserver deux semaines à l'avance.",
    "La bibliothèque de l'université a prolongé ses heures d'ouverture pendant la période des examens. Les \
     étudiants peuvent désormais emprunter jusqu'à dix livres à la fois et réserver une salle de travail en \
     ligne. Nous rappelons que la nourriture et les boissons sont interdites dans les salles de lecture.",
    "Ce rapport annuel décrit les principales activités de l'association au cours de l'année écoulée, \
     notamment les formations proposées aux bénévoles, les nouveaux partenariats avec les écoles de la région \
     et la situation financière, restée stable grâce au soutien de nos membres et de nos mécènes.",
];

fn page(title: &str, paragraphs: &[&str]) -> String {
    let mut html = format!("<html><head><title>{title}</title></head><body><h1>{title}</h1>");
    for p in paragraphs {
        html.push_str(&format!("<p>{p}</p>"));
    }
    html.push_str("<ul><li><a href=\"index.html\">Home</a></li></ul></body></html>");
    html
}

fn write(root: &Path, rel: &str, text: &str) -> Result<(), String> {
    let path = root.join(rel);
    std::fs::create_dir_all(path.parent().expect("relative path has a parent")).map_err(|e| e.to_string())?;
    std::fs::write(&path, text).map_err(|e| e.to_string())
}

fn build_site(root: &Path) -> Result<Vec<(String, String)>, String> {
    // true pairs
    write(root, "news/rail.html", &page("Rail", &[EN[0]]))?;
    write(root, "news/rail_f.html", &page("Rail", &[FR[0]]))?;
    write(root, "en/museum.html", &page("Museum", &[EN[1]]))?;
    write(root, "fr/museum.html", &page("Musée", &[FR[1]]))?;
    write(root, "english/library/hours.html", &page("Library", &[EN[2]]))?;
    write(root, "french/library/hours.html", &page("Bibliothèque", &[FR[2]]))?;
    // near miss on length: the French side is a stub
    write(root, "report_en.html", &page("Report", &[EN[3], EN[4]]))?;
    write(root, "report_fr.html", &page("Rapport", &[FR[3]]))?;
    // near miss on structure: same text, very different markup
    let mut flat = String::from("<html><body>");
    for sentence in FR[0].split(". ") {
        flat.push_str(&format!("<table><tr><td><b>{sentence}.</b></td></tr></table><br>"));
    }
    flat.push_str("</body></html>");
    write(root, "en/rail-archive.html", &page("Rail", &[EN[0]]))?;
    write(root, "fr/rail-archive.html", &flat)?;
    // wrong language: the "French" page is English
    write(root, "weather-en.html", &page("Weather", &[EN[4]]))?;
    write(root, "weather-fr.html", &page("Météo", &[EN[4]]))?;
    // unpaired pages
    write(root, "index.html", &page("Home", &[EN[1]]))?;
    write(root, "img/logo.html", "<html></html>")?;
    Ok(vec![
        ("en/museum.html".into(), "fr/museum.html".into()),
        ("english/library/hours.html".into(), "french/library/hours.html".into()),
        ("news/rail.html".into(), "news/rail_f.html".into()),
    ])
}

fn check_miner() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let truth = build_site(dir.path())?;
    let models: Vec<LanguageIdModel> = ["en", "fr", "it"]
        .iter()
        .map(|l| LanguageIdModel::bundled(l).ok_or_else(|| format!("no bundled model for {l}")))
        .collect::<Result<_, _>>()?;
    let config = MinerConfig::new("en", "fr");
    let (candidates, report) = mine(dir.path(), &config, &models).map_err(|e| e.to_string())?;
    let mut accepted: Vec<(String, String)> = candidates
        .iter()
        .filter(|c| c.verdict.is_accepted())
        .map(|c| (c.source_profile.path.clone(), c.target_profile.path.clone()))
        .collect();
    accepted.sort();
    let tp = accepted.iter().filter(|p| truth.contains(p)).count();
    let precision = if accepted.is_empty() {
        0.0
    } else {
        tp as f64 / accepted.len() as f64
    };
    let recall = tp as f64 / truth.len() as f64;
    let rejected: Vec<String> = report
        .rejections
        .iter()
        .map(|(r, n)| format!("{}={n}", r.code()))
        .collect();
    let detail = format!(
        "{} candidates, accepted {:?}; precision={precision:.2} recall={recall:.2}; rejected {}",
        report.candidates,
        accepted.len(),
        rejected.join(",")
    );
    ensure(precision == 1.0 && recall == 1.0, || {
        format!("{detail}; accepted {accepted:?}")
    })?;
    Ok(detail)
}

// ---------------------------------------------------------------------------
// determinism

fn pipeline_artifacts() -> Result<Vec<String>, String> {
    let config = RunConfig::default();
    let header = config.header();
    let p = build_pipeline(&config)?;
    let (fwd, rev) = pruned(&p, &config)?;
    let runs = clir_runs(&p, &config)?;
    let mut out = vec![
        tm::write_model(&p.forward.model, &header),
        tm::write_model(&fwd, &header),
        tm::write_model(&rev, &header),
        tm::write_counts(&p.forward.counts),
    ];
    let all = [runs.mono, runs.qt, runs.dt, runs.combined];
    for r in &all {
        out.push(write_run(r, &header));
    }
    let report = evaluate(
        &all,
        &p.corpus.qrels,
        eval::DEFAULT_CUTOFF,
        TopicSet::Retrieved,
        Some(0.05),
    )
    .map_err(|e| e.to_string())?;
    out.push(report.render());
    let docs = synth::generate_aligned_docs(5, 20, 0.05);
    for d in &docs {
        out.push(aligner::write_alignment(
            &align(&d.source, &d.target, &AlignParams::default()),
            &d.source,
            &d.target,
        ));
    }
    Ok(out)
}

fn check_determinism() -> Outcome {
    let a = pipeline_artifacts()?;
    let b = pipeline_artifacts()?;
    ensure(a.len() == b.len(), || "artifact count differs".into())?;
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        ensure(x == y, || format!("artifact {i} differs between runs"))?;
    }
    let bytes: usize = a.iter().map(String::len).sum();
    Ok(format!(
        "{} artifacts ({bytes} bytes) byte-identical across two runs",
        a.len()
    ))
}

fn main() {
    let config = RunConfig::default();
    let pipeline = build_pipeline(&config);
    let with_pipeline = |f: &dyn Fn(&Pipeline) -> Outcome| match &pipeline {
        Ok(p) => f(p),
        Err(e) => Err(format!("pipeline failed: {e}")),
    };
    let checks: Vec<(&str, Check)> = vec![
        ("em-oracle", Box::new(check_em_oracle)),
        ("normalization", Box::new(|| with_pipeline(&check_normalization))),
        ("reduction-identities", Box::new(|| with_pipeline(&check_identities))),
        ("table5-replay", Box::new(check_table5)),
        ("end-to-end-clir", Box::new(|| check_end_to_end(&config))),
        (
            "directional-pruning",
            Box::new(|| with_pipeline(&|p| check_pruning(p, &config))),
        ),
        ("eval-oracle", Box::new(check_eval_oracle)),
        ("aligner-oracle", Box::new(check_aligner)),
        ("miner-fixture", Box::new(check_miner)),
        ("determinism", Box::new(check_determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
