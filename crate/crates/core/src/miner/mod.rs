//! Finding parallel page pairs in a mirrored site: pair scanning by file
//! names, then length, structure and language filters.

mod filters;
mod langid;
mod naming;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use regex::Regex;

pub use filters::{
    edit_distance, language_filter, length_filter, structure_distance, structure_filter, PageProfile, PairCandidate,
    Reason, Verdict, MEANINGFUL_TAGS,
};
pub use langid::{detect_language, Detection, LanguageIdModel, MIN_RELIABLE_CHARS};
pub use naming::{scan_pairs, NamingRules};

use crate::error::{Error, Result};
use crate::textprep::{anchor_texts, decode_bytes};

#[derive(Debug, Clone, PartialEq)]
pub struct MinerConfig {
    pub source_language: String,
    pub target_language: String,
    pub rules: NamingRules,
    pub max_pairings: usize,
    /// Expected source/target text length ratio.
    pub typical_ratio: f64,
    pub length_tolerance: f64,
    pub structure_threshold: f64,
    pub min_text: usize,
    pub meaningful_tags: Vec<String>,
    /// Require some page to link with an anchor text naming a language.
    pub anchor_gate: bool,
    /// Overrides the default language-name pattern of the anchor gate.
    pub anchor_pattern: Option<String>,
}

impl MinerConfig {
    pub fn new(source: &str, target: &str) -> Self {
        MinerConfig {
            source_language: source.to_owned(),
            target_language: target.to_owned(),
            rules: NamingRules::for_pair(source, target),
            max_pairings: 1,
            typical_ratio: 1.0,
            length_tolerance: 0.40,
            structure_threshold: 0.20,
            min_text: 200,
            meaningful_tags: MEANINGFUL_TAGS.iter().map(|t| (*t).to_owned()).collect(),
            anchor_gate: false,
            anchor_pattern: None,
        }
    }

    fn anchor_regex(&self) -> Result<Regex> {
        let pattern = match &self.anchor_pattern {
            Some(p) => p.clone(),
            None => {
                let mut names: Vec<&str> = Vec::new();
                for lang in [&self.source_language, &self.target_language] {
                    names.extend(anchor_names(lang));
                }
                if names.is_empty() {
                    return Err(Error::Config(format!(
                        "no default anchor pattern for {}-{}; set anchor_pattern",
                        self.source_language, self.target_language
                    )));
                }
                format!(r"(?i)\b({})\b", names.join("|"))
            }
        };
        Regex::new(&pattern).map_err(|e| Error::Config(format!("bad anchor pattern: {e}")))
    }
}

fn anchor_names(lang: &str) -> &'static [&'static str] {
    match lang {
        "en" => &["english", "anglais", "inglese", "in english", "english version"],
        "fr" => &[
            "french",
            "français",
            "francais",
            "en français",
            "version française",
            "francese",
        ],
        "it" => &["italian", "italiano", "italien", "in italiano", "versione italiana"],
        "de" => &["german", "deutsch", "allemand", "tedesco"],
        "es" => &["spanish", "español", "espagnol", "spagnolo"],
        _ => &[],
    }
}

/// Counts from one mining run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MiningReport {
    pub pages_scanned: usize,
    pub candidates: usize,
    pub accepted: usize,
    pub rejections: BTreeMap<Reason, usize>,
}

impl MiningReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "pages_scanned={}", self.pages_scanned);
        let _ = writeln!(out, "candidates={}", self.candidates);
        let _ = writeln!(out, "accepted={}", self.accepted);
        for r in Reason::ALL {
            let _ = writeln!(
                out,
                "rejected.{}={}",
                r.code(),
                self.rejections.get(&r).copied().unwrap_or(0)
            );
        }
        out
    }

    fn reject(&mut self, reason: Reason) {
        *self.rejections.entry(reason).or_insert(0) += 1;
    }
}

fn walk(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            walk(root, &path, out)?;
        } else if path.is_file() {
            let rel = path.strip_prefix(root).unwrap_or(&path);
            let rel: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            out.push(rel.join("/"));
        }
    }
    Ok(())
}

/// Runs each filter in turn and records the first failure.
pub fn verdict(pair: &PairCandidate, config: &MinerConfig) -> Verdict {
    let checks = [
        length_filter(pair, config.typical_ratio, config.length_tolerance),
        structure_filter(pair, config.structure_threshold, config.min_text),
        language_filter(pair, &config.source_language, &config.target_language),
    ];
    checks
        .into_iter()
        .find(|v| !v.is_accepted())
        .unwrap_or(Verdict::Accepted)
}

/// Mines a site tree. Returns every candidate with its verdict, sorted by
/// source path, and the run report.
pub fn mine(
    root: &Path,
    config: &MinerConfig,
    models: &[LanguageIdModel],
) -> Result<(Vec<PairCandidate>, MiningReport)> {
    config.rules.validate()?;
    for lang in [&config.source_language, &config.target_language] {
        if !models.iter().any(|m| &m.language == lang) {
            return Err(Error::Config(format!("no language-identification model for {lang}")));
        }
    }
    let mut listing = Vec::new();
    walk(root, root, &mut listing)?;
    let mut report = MiningReport {
        pages_scanned: listing.len(),
        ..Default::default()
    };
    let read = |rel: &str| {
        let path = root.join(rel);
        std::fs::read(&path).map_err(|e| Error::io(&path, e))
    };

    if config.anchor_gate && !listing.is_empty() {
        let re = config.anchor_regex()?;
        let mut found = false;
        for rel in &listing {
            let page = decode_bytes(&read(rel)?);
            if anchor_texts(&page).iter().any(|a| re.is_match(a)) {
                found = true;
                break;
            }
        }
        if !found {
            report.reject(Reason::NoCandidateAnchor);
            return Ok((Vec::new(), report));
        }
    }

    let pairs = scan_pairs(&listing, &config.rules, config.max_pairings);
    report.candidates = pairs.len();
    let tags: Vec<&str> = config.meaningful_tags.iter().map(String::as_str).collect();
    let candidates: Vec<PairCandidate> = pairs
        .par_iter()
        .map(|(a, b)| {
            let pa = PageProfile::build(a, &read(a)?, &tags, models);
            let pb = PageProfile::build(b, &read(b)?, &tags, models);
            let mut c = PairCandidate::new(pa, pb);
            c.verdict = verdict(&c, config);
            Ok(c)
        })
        .collect::<Result<_>>()?;
    for c in &candidates {
        match c.verdict {
            Verdict::Accepted => report.accepted += 1,
            Verdict::Rejected(r) => report.reject(r),
        }
    }
    Ok((candidates, report))
}

/// `source_path<TAB>target_path` lines for the accepted candidates.
pub fn write_pairs(candidates: &[PairCandidate]) -> String {
    let mut out = String::new();
    for c in candidates.iter().filter(|c| c.verdict.is_accepted()) {
        let _ = writeln!(out, "{}\t{}", c.source_profile.path, c.target_profile.path);
    }
    out
}
