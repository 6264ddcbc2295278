//! Content filters applied to candidate page pairs.

use std::fmt;

use super::langid::{detect_language, LanguageIdModel};
use crate::textprep::{extract_text, tag_sequence, text_content};

/// Tags that carry layout; all others are ignored when comparing structure.
pub const MEANINGFUL_TAGS: &[&str] = &[
    "p", "h1", "h2", "h3", "h4", "h5", "h6", "li", "table", "tr", "td", "ul", "ol", "title",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    EmptyText,
    LengthRatio,
    InsufficientText,
    Structure,
    Language,
    NoCandidateAnchor,
}

impl Reason {
    pub const ALL: [Reason; 6] = [
        Reason::EmptyText,
        Reason::LengthRatio,
        Reason::InsufficientText,
        Reason::Structure,
        Reason::Language,
        Reason::NoCandidateAnchor,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Reason::EmptyText => "empty-text",
            Reason::LengthRatio => "length-ratio",
            Reason::InsufficientText => "insufficient-text",
            Reason::Structure => "structure",
            Reason::Language => "language",
            Reason::NoCandidateAnchor => "no-candidate-anchor",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected(Reason),
}

impl Verdict {
    pub fn is_accepted(self) -> bool {
        self == Verdict::Accepted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageProfile {
    pub path: String,
    pub byte_length: usize,
    /// Characters of text after markup removal.
    pub text_length: usize,
    pub tag_sequence: Vec<String>,
    pub detected_language: String,
    pub language_confidence: f64,
    pub low_confidence: bool,
}

impl PageProfile {
    /// Profiles a page. With no language models the language stays empty.
    pub fn build(path: &str, bytes: &[u8], tags: &[&str], models: &[LanguageIdModel]) -> Self {
        let decoded = crate::textprep::decode_bytes(bytes);
        let text = text_content(&extract_text(bytes));
        let tag_sequence = tag_sequence(&decoded)
            .into_iter()
            .filter(|t| tags.contains(&t.as_str()))
            .collect();
        let detection = if text.is_empty() || models.is_empty() {
            None
        } else {
            detect_language(&text, models).ok()
        };
        PageProfile {
            path: path.to_owned(),
            byte_length: bytes.len(),
            text_length: text.chars().count().min(bytes.len()),
            tag_sequence,
            detected_language: detection.as_ref().map(|d| d.language.clone()).unwrap_or_default(),
            language_confidence: detection.as_ref().map_or(0.0, |d| d.confidence),
            low_confidence: detection.is_none_or(|d| d.low_confidence),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCandidate {
    pub source_profile: PageProfile,
    pub target_profile: PageProfile,
    pub length_ratio: f64,
    pub structure_distance: f64,
    pub verdict: Verdict,
}

impl PairCandidate {
    pub fn new(source_profile: PageProfile, target_profile: PageProfile) -> Self {
        let length_ratio = if target_profile.text_length > 0 {
            source_profile.text_length as f64 / target_profile.text_length as f64
        } else {
            0.0
        };
        let structure_distance = structure_distance(&source_profile.tag_sequence, &target_profile.tag_sequence);
        PairCandidate {
            source_profile,
            target_profile,
            length_ratio,
            structure_distance,
            verdict: Verdict::Accepted,
        }
    }
}

/// Accepts when |ratio / typical_ratio - 1| <= tolerance.
pub fn length_filter(pair: &PairCandidate, typical_ratio: f64, tolerance: f64) -> Verdict {
    if pair.source_profile.text_length == 0 || pair.target_profile.text_length == 0 {
        return Verdict::Rejected(Reason::EmptyText);
    }
    if (pair.length_ratio / typical_ratio - 1.0).abs() <= tolerance + 1e-12 {
        Verdict::Accepted
    } else {
        Verdict::Rejected(Reason::LengthRatio)
    }
}

/// Levenshtein distance between two sequences.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance normalized by the longer sequence, in [0, 1].
pub fn structure_distance<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    edit_distance(a, b) as f64 / a.len().max(b.len()).max(1) as f64
}

/// Rejects pages with less than `min_text` characters of text, then pairs
/// whose structure distance exceeds `threshold`.
pub fn structure_filter(pair: &PairCandidate, threshold: f64, min_text: usize) -> Verdict {
    if pair.source_profile.text_length < min_text || pair.target_profile.text_length < min_text {
        return Verdict::Rejected(Reason::InsufficientText);
    }
    if pair.structure_distance <= threshold + 1e-12 {
        Verdict::Accepted
    } else {
        Verdict::Rejected(Reason::Structure)
    }
}

/// Requires both sides to be detected as the requested languages.
pub fn language_filter(pair: &PairCandidate, source: &str, target: &str) -> Verdict {
    if pair.source_profile.detected_language == source && pair.target_profile.detected_language == target {
        Verdict::Accepted
    } else {
        Verdict::Rejected(Reason::Language)
    }
}
