use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use webclir::aligner::{align, extract_training_pairs, write_alignment, write_pairs};
use webclir::config::RunConfig;
use webclir::eval::{evaluate, translation_stats, Qrels, TopicSet};
use webclir::miner::{self, mine, LanguageIdModel};
use webclir::retrieval::{
    build_index, combine, parse_topics, read_index, read_run, write_index, write_run, Method, Searcher,
};
use webclir::textprep::{
    default_abbreviations, extract_text, read_corpus, segment_document, write_corpus, CorpusDoc, Sentence,
};
use webclir::tm::{
    self, prune_noise, prune_threshold, prune_topn, read_counts, read_marginals, read_model, train, Direction,
    QueryModel,
};

use crate::{read_text, usage, write_text, Cli, Command, PruneMethod};

fn header_lines(config: &RunConfig) -> String {
    config.header().iter().map(|(k, v)| format!("#{k}={v}\n")).collect()
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn set(config: &mut RunConfig, key: &str, value: Option<impl ToString>) -> Result<()> {
    if let Some(v) = value {
        config.set(key, &v.to_string())?;
    }
    Ok(())
}

fn set_direction(config: &mut RunConfig, direction: Option<&str>) -> Result<()> {
    if let Some(d) = direction {
        let d = Direction::parse(d).ok_or_else(|| anyhow!("bad direction {d:?}, expected e.g. en-fr"))?;
        config.set("source_lang", &d.source)?;
        config.set("target_lang", &d.target)?;
    }
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `a<TAB>b` lines, skipping `#` header lines.
fn read_tab_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| anyhow!("{}:{}: expected two tab-separated fields", path.display(), n + 1))?;
        out.push((a.to_owned(), b.to_owned()));
    }
    Ok(out)
}

pub(crate) fn run(cli: Cli) -> Result<()> {
    let mut config = RunConfig::resolve(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::Mine {
            site,
            out,
            report,
            direction,
            langid,
        } => {
            set_direction(&mut config, direction.as_deref())?;
            let mut models: Vec<LanguageIdModel> = ["en", "fr", "it"]
                .iter()
                .filter_map(|l| LanguageIdModel::bundled(l))
                .collect();
            for path in &langid {
                let m = LanguageIdModel::from_tsv(&read_text(path)?)
                    .with_context(|| format!("bad language model {}", path.display()))?;
                models.retain(|x| x.language != m.language);
                models.push(m);
            }
            let mc = config.miner_config()?;
            let (candidates, rep) = mine(&site, &mc, &models)?;
            let header = header_lines(&config);
            write_text(&out, &format!("{header}{}", miner::write_pairs(&candidates)))?;
            emit(report.as_deref(), &format!("{header}{}", rep.render()))
        }
        Command::Extract {
            site,
            pairs,
            source_out,
            target_out,
        } => {
            let pairs = read_tab_pairs(&pairs)?;
            let languages = [
                config.raw("source_lang").to_owned(),
                config.raw("target_lang").to_owned(),
            ];
            let mut sides: [Vec<CorpusDoc>; 2] = [Vec::new(), Vec::new()];
            for (a, b) in &pairs {
                for (k, rel) in [a, b].into_iter().enumerate() {
                    let path = site.join(rel);
                    let bytes = std::fs::read(&path).with_context(|| format!("cannot read {}", path.display()))?;
                    let abbreviations = default_abbreviations(&languages[k]);
                    let sentences = segment_document(rel, &extract_text(&bytes), &abbreviations);
                    sides[k].push(CorpusDoc {
                        id: rel.clone(),
                        sentences: sentences.into_iter().map(|s| s.text).collect(),
                    });
                }
            }
            let header = header_lines(&config);
            write_text(&source_out, &format!("{header}{}", write_corpus(&sides[0])))?;
            write_text(&target_out, &format!("{header}{}", write_corpus(&sides[1])))
        }
        Command::Align {
            source,
            target,
            out,
            alignment,
        } => {
            let params = config.align_params()?;
            let a = read_corpus(&read_text(&source)?)?;
            let b = read_corpus(&read_text(&target)?)?;
            if a.len() != b.len() {
                bail!(
                    "{} has {} documents but {} has {}",
                    source.display(),
                    a.len(),
                    target.display(),
                    b.len()
                );
            }
            let header = header_lines(&config);
            let mut pairs_out = header.clone();
            let mut full = header;
            for (da, db) in a.iter().zip(&b) {
                let sa: Vec<Sentence> = da.sentences.iter().map(Sentence::new).collect();
                let sb: Vec<Sentence> = db.sentences.iter().map(Sentence::new).collect();
                let couples = align(&sa, &sb, &params);
                pairs_out.push_str(&write_pairs(&extract_training_pairs(&couples, &sa, &sb)));
                let _ = writeln!(full, "#doc {}\t{}", da.id, db.id);
                full.push_str(&write_alignment(&couples, &sa, &sb));
            }
            write_text(&out, &pairs_out)?;
            if let Some(path) = alignment {
                write_text(&path, &full)?;
            }
            Ok(())
        }
        Command::Train {
            pairs,
            direction,
            iterations,
            out,
        } => {
            set_direction(&mut config, direction.as_deref())?;
            set(&mut config, "iterations", iterations)?;
            let train_config = config.train_config()?;
            let dir = Direction::new(config.raw("source_lang"), config.raw("target_lang"));
            let (sa, ta) = (config.analyzer(&dir.source)?, config.analyzer(&dir.target)?);
            let analyzed: Vec<(Vec<String>, Vec<String>)> = read_tab_pairs(&pairs)?
                .iter()
                .map(|(s, t)| (sa.analyze(s).terms, ta.analyze(t).terms))
                .collect();
            let output = train(&analyzed, dir, &train_config)?;
            for (i, ll) in output.log_likelihood.iter().enumerate() {
                println!("iteration={i} log_likelihood={ll:.6}");
            }
            let mut header = config.header();
            let trace: Vec<String> = output.log_likelihood.iter().map(|v| format!("{v:.6}")).collect();
            header.push(("log_likelihood".into(), trace.join(",")));
            header.push(("pairs_used".into(), output.pairs_used.to_string()));
            let extra = header_lines(&config);
            write_text(&out, &tm::write_model(&output.model, &header))?;
            write_text(
                &sibling(&out, "counts"),
                &format!("{extra}{}", tm::write_counts(&output.counts)),
            )?;
            write_text(
                &sibling(&out, "marginals"),
                &format!("{extra}{}", tm::write_marginals(&output.model)),
            )
        }
        Command::Prune {
            model,
            method,
            threshold,
            top_n,
            counts,
            marginals,
            out,
        } => {
            set(&mut config, "prune_threshold", threshold)?;
            set(&mut config, "prune_top_n", top_n)?;
            let m = read_model(&read_text(&model)?).with_context(|| format!("bad model {}", model.display()))?;
            let pruned = match method {
                PruneMethod::Threshold => prune_threshold(&m, config.get("prune_threshold")?),
                PruneMethod::Topn => {
                    let path = counts.unwrap_or_else(|| sibling(&model, "counts"));
                    prune_topn(&m, config.get("prune_top_n")?, &read_counts(&read_text(&path)?)?)
                }
                PruneMethod::Noise => {
                    let path = marginals.unwrap_or_else(|| sibling(&model, "marginals"));
                    let mut m = m;
                    m.set_marginals(read_marginals(&read_text(&path)?)?);
                    prune_noise(&m, config.get("marginal_floor")?, config.get("digit_rule")?)
                }
            };
            let mut header = config.header();
            header.push(("prune_method".into(), format!("{method:?}").to_lowercase()));
            write_text(&out, &tm::write_model(&pruned, &header))
        }
        Command::Index { docs, language, out } => {
            let language = language.unwrap_or_else(|| config.raw("target_lang").to_owned());
            let analyzer = config.analyzer(&language)?;
            let corpus = read_corpus(&read_text(&docs)?)?;
            let index = build_index(
                corpus
                    .iter()
                    .map(|d| (d.id.clone(), analyzer.analyze(&d.sentences.join(" ")).terms)),
            )?;
            let mut header = config.header();
            header.push(("index_language".into(), language));
            write_text(&out, &write_index(&index, &header))
        }
        Command::Search {
            method,
            tm,
            reverse_tm,
            topics,
            index,
            combine: runs,
            alpha,
            lambda,
            top_k,
            tag,
            out,
        } => {
            set(&mut config, "combine_alpha", alpha)?;
            set(&mut config, "lambda", lambda)?;
            set(&mut config, "top_k", top_k)?;
            let params = config.retrieval_params()?;
            if let Some(runs) = runs {
                let a = read_run(&read_text(&runs[0])?)?;
                let b = read_run(&read_text(&runs[1])?)?;
                let tag = tag.unwrap_or_else(|| format!("{}+{}", a.tag, b.tag));
                let combined = combine(&a, &b, config.get("combine_alpha")?, params.top_k, &tag)?;
                return write_text(&out, &write_run(&combined, &config.header()));
            }
            let (Some(method), Some(topics), Some(index)) = (method, topics, index) else {
                usage("search needs --method, --topics and --index, or --combine RUN_A RUN_B");
            };
            let load_model = |p: &Option<PathBuf>| -> Result<Option<tm::TranslationModel>> {
                p.as_ref()
                    .map(|p| read_model(&read_text(p)?).with_context(|| format!("bad model {}", p.display())))
                    .transpose()
            };
            let (fwd, rev) = (load_model(&tm)?, load_model(&reverse_tm)?);
            let index = read_index(&read_text(&index)?)?;
            let language = match method {
                Method::Mono | Method::External => config.raw("target_lang").to_owned(),
                _ => config.raw("source_lang").to_owned(),
            };
            let analyzer = config.analyzer(&language)?;
            let queries: Vec<(String, QueryModel)> = parse_topics(&read_text(&topics)?)?
                .iter()
                .map(|t| {
                    (
                        t.id.clone(),
                        QueryModel::from_terms(&language, &analyzer.analyze(&t.query_text()).terms),
                    )
                })
                .collect();
            let mut searcher = Searcher::new(&index, params)?;
            if let Some(m) = &fwd {
                searcher = searcher.with_forward(m);
            }
            if let Some(m) = &rev {
                searcher = searcher.with_reverse(m);
            }
            let tag = tag.unwrap_or_else(|| method.name().to_owned());
            let run = searcher.run(method, &tag, &queries)?;
            let mut header = config.header();
            header.push(("method".into(), method.name().into()));
            write_text(&out, &write_run(&run, &header))
        }
        Command::Evaluate {
            run,
            runs,
            qrels,
            significance,
            cutoff,
            judged,
            out,
        } => {
            set(&mut config, "cutoff", cutoff)?;
            let paths: Vec<PathBuf> = run.into_iter().chain(runs).collect();
            if paths.is_empty() {
                usage("evaluate needs --run or --runs");
            }
            let qrels = Qrels::parse(&read_text(&qrels)?)?;
            let loaded = paths
                .iter()
                .map(|p| read_run(&read_text(p)?).with_context(|| format!("bad run {}", p.display())))
                .collect::<Result<Vec<_>>>()?;
            let set = if judged { TopicSet::Judged } else { TopicSet::Retrieved };
            let alpha = significance.then(|| config.get("significance_alpha")).transpose()?;
            let report = evaluate(&loaded, &qrels, config.get("cutoff")?, set, alpha)?;
            emit(out.as_deref(), &format!("{}{}", header_lines(&config), report.render()))
        }
        Command::Stats { topics, tm, out } => {
            let model = read_model(&read_text(&tm)?).with_context(|| format!("bad model {}", tm.display()))?;
            let language = model.direction.source.clone();
            let analyzer = config.analyzer(&language)?;
            let queries: Vec<QueryModel> = parse_topics(&read_text(&topics)?)?
                .iter()
                .map(|t| QueryModel::from_terms(&language, &analyzer.analyze(&t.query_text()).terms))
                .collect();
            let s = translation_stats(&queries, &model);
            let mut text = header_lines(&config);
            let _ = writeln!(text, "model_entries={}", model.num_entries());
            let _ = writeln!(text, "model_sources={}", model.num_sources());
            let _ = writeln!(text, "unique_terms={}", s.unique_terms);
            let _ = writeln!(text, "missed={}", s.missed);
            let _ = writeln!(text, "percent_missed={:.2}", s.percent_missed);
            let _ = writeln!(text, "avg_translations={:.2}", s.avg_translations);
            emit(out.as_deref(), &text)
        }
    }
}
