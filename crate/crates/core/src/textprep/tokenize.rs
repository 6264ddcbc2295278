/// Words whose internal apostrophe is not an elision.
const ELISION_EXCEPTIONS: &[&str] = &["aujourd'hui", "prud'homme", "prud'hommes", "presqu'île"];

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '’' | 'ʼ' | '`')
}

/// Splits on whitespace and punctuation, keeping apostrophes attached to
/// the preceding word and hyphens between alphanumerics.
fn raw_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let next_alnum = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() {
            cur.push(c);
        } else if is_apostrophe(c) && (!cur.is_empty() || next_alnum) {
            cur.push('\'');
        } else if c == '-' && !cur.is_empty() && cur.ends_with(char::is_alphanumeric) && next_alnum {
            cur.push('-');
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn split_elision(token: &str, out: &mut Vec<String>) {
    if ELISION_EXCEPTIONS.contains(&token.to_lowercase().as_str()) {
        out.push(token.to_owned());
        return;
    }
    match token.find('\'') {
        Some(k) if k > 0 && k + 1 < token.len() => {
            out.push(token[..=k].to_owned());
            split_elision(&token[k + 1..], out);
        }
        _ => out.push(token.to_owned()),
    }
}

fn french_contraction(token: &str) -> Option<[&'static str; 2]> {
    match token.to_lowercase().as_str() {
        "au" => Some(["à", "le"]),
        "aux" => Some(["à", "les"]),
        "du" => Some(["de", "le"]),
        _ => None,
    }
}

/// Tokenizes a sentence with language-specific rules for `en`, `fr` and
/// `it`; any other language code gets the generic split.
pub fn tokenize(sentence: &str, language: &str) -> Vec<String> {
    let raw = raw_tokens(sentence);
    match language {
        "en" => {
            let mut out = Vec::with_capacity(raw.len());
            for tok in raw {
                if let Some(stem) = tok.strip_suffix("'s").filter(|s| !s.is_empty() && !s.ends_with('\'')) {
                    out.push(stem.to_owned());
                    out.push("'s".to_owned());
                } else if let Some(stem) = tok.strip_suffix('\'').filter(|s| !s.is_empty()) {
                    out.push(stem.to_owned());
                } else {
                    out.push(tok);
                }
            }
            out
        }
        "fr" | "it" => {
            let mut pieces = Vec::with_capacity(raw.len());
            for tok in &raw {
                split_elision(tok, &mut pieces);
            }
            if language == "it" {
                return pieces;
            }
            let mut out = Vec::with_capacity(pieces.len());
            for p in pieces {
                match french_contraction(&p) {
                    Some(parts) => out.extend(parts.iter().map(|s| (*s).to_owned())),
                    None => out.push(p),
                }
            }
            out
        }
        _ => raw,
    }
}
