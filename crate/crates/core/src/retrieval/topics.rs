use crate::error::{Error, Result};

/// A search topic; the query text is the title followed by the description.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Topic {
    pub id: String,
    pub title: String,
    pub description: String,
    pub narrative: String,
}

impl Topic {
    pub fn query_text(&self) -> String {
        match (self.title.is_empty(), self.description.is_empty()) {
            (false, false) => format!("{} {}", self.title, self.description),
            (false, true) => self.title.clone(),
            _ => self.description.clone(),
        }
    }
}

#[derive(Clone, Copy)]
enum Field {
    Title,
    Description,
    Narrative,
    Other,
}

fn push(dst: &mut String, text: &str) {
    let text = text.trim();
    if text.is_empty() {
        return;
    }
    if !dst.is_empty() {
        dst.push(' ');
    }
    dst.push_str(text);
}

/// Parses line-tagged topics. Each field starts with a tag at the beginning
/// of a line and continues until the next tag. `<top>` wrappers, field-name
/// prefixes such as `Description:` and unknown tags are tolerated.
pub fn parse_topics(text: &str) -> Result<Vec<Topic>> {
    let mut topics: Vec<Topic> = Vec::new();
    let mut field = Field::Other;
    for (n, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        let mut rest = trimmed;
        if let Some(stripped) = trimmed.strip_prefix('<') {
            if let Some((tag, after)) = stripped.split_once('>') {
                rest = after;
                field = match tag.trim().to_ascii_lowercase().as_str() {
                    "num" => {
                        let id = after.trim().trim_start_matches("Number:").trim();
                        if id.is_empty() {
                            return Err(Error::parse("topics", n + 1, "empty topic number"));
                        }
                        topics.push(Topic {
                            id: id.to_owned(),
                            ..Default::default()
                        });
                        rest = "";
                        Field::Other
                    }
                    "title" => Field::Title,
                    "desc" | "description" => {
                        rest = after.trim_start().trim_start_matches("Description:");
                        Field::Description
                    }
                    "narr" | "narrative" => {
                        rest = after.trim_start().trim_start_matches("Narrative:");
                        Field::Narrative
                    }
                    _ => {
                        rest = "";
                        Field::Other
                    }
                };
            }
        }
        if rest.trim().is_empty() {
            continue;
        }
        let Some(topic) = topics.last_mut() else {
            if matches!(field, Field::Other) {
                continue;
            }
            return Err(Error::parse("topics", n + 1, "field before any <num> tag"));
        };
        match field {
            Field::Title => push(&mut topic.title, rest),
            Field::Description => push(&mut topic.description, rest),
            Field::Narrative => push(&mut topic.narrative, rest),
            Field::Other => {}
        }
    }
    let mut seen = std::collections::HashSet::new();
    for t in &topics {
        if !seen.insert(t.id.as_str()) {
            return Err(Error::parse("topics", 0, format!("duplicate topic {}", t.id)));
        }
    }
    Ok(topics)
}
