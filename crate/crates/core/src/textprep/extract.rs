use std::sync::OnceLock;

use regex::Regex;

/// Elements whose boundaries start a new paragraph.
const BLOCK_TAGS: &[&str] = &[
    "address",
    "article",
    "aside",
    "blockquote",
    "body",
    "caption",
    "dd",
    "div",
    "dl",
    "dt",
    "footer",
    "form",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "head",
    "header",
    "hr",
    "html",
    "li",
    "main",
    "nav",
    "ol",
    "p",
    "pre",
    "section",
    "table",
    "tbody",
    "td",
    "tfoot",
    "th",
    "thead",
    "title",
    "tr",
    "ul",
];

const VOID_TAGS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr",
];

/// Elements whose end tag may be omitted; closed implicitly when an
/// enclosing element ends or a sibling starts.
const OPTIONAL_END: &[&str] = &[
    "body", "dd", "dt", "head", "html", "li", "option", "p", "tbody", "td", "th", "thead", "tr",
];

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Event {
    Text(String),
    Open(String),
    Close(String),
}

/// Splits markup into text and tag events. Comments, doctypes, processing
/// instructions and the bodies of `script`/`style` are dropped. Returns
/// `None` in the lexer-level failure case (an unterminated tag).
pub(crate) fn lex(input: &str) -> Option<Vec<Event>> {
    let mut events = Vec::new();
    let mut text = String::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    let flush = |text: &mut String, events: &mut Vec<Event>| {
        if !text.is_empty() {
            events.push(Event::Text(std::mem::take(text)));
        }
    };
    while i < bytes.len() {
        if bytes[i] != b'<' {
            let next = input[i..].find('<').map_or(input.len(), |p| i + p);
            text.push_str(&input[i..next]);
            i = next;
            continue;
        }
        let rest = &input[i..];
        if rest.starts_with("<!--") {
            flush(&mut text, &mut events);
            i = rest.find("-->").map_or(input.len(), |p| i + p + 3);
            continue;
        }
        let after = rest[1..].chars().next();
        let is_tag = matches!(after, Some(c) if c.is_ascii_alphabetic() || c == '/' || c == '!' || c == '?');
        if !is_tag {
            text.push('<');
            i += 1;
            continue;
        }
        let end = tag_end(rest)?;
        let raw = &rest[1..end];
        i += end + 1;
        if raw.starts_with('!') || raw.starts_with('?') {
            continue;
        }
        flush(&mut text, &mut events);
        let (closing, body) = match raw.strip_prefix('/') {
            Some(b) => (true, b),
            None => (false, raw),
        };
        let name: String = body
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        if name.is_empty() {
            continue;
        }
        if closing {
            events.push(Event::Close(name));
            continue;
        }
        let self_closing = body.trim_end().ends_with('/');
        if name == "script" || name == "style" {
            let needle = format!("</{name}");
            let lower = input[i..].to_ascii_lowercase();
            match lower.find(&needle) {
                Some(p) => {
                    let close_end = input[i + p..].find('>').map_or(input.len(), |q| i + p + q + 1);
                    i = close_end;
                }
                None => i = input.len(),
            }
            continue;
        }
        events.push(Event::Open(name.clone()));
        if self_closing && !VOID_TAGS.contains(&name.as_str()) {
            events.push(Event::Close(name));
        }
    }
    flush(&mut text, &mut events);
    Some(events)
}

/// Index of the `>` closing the tag that starts at `s[0] == '<'`, honoring quotes.
fn tag_end(s: &str) -> Option<usize> {
    let mut quote: Option<char> = None;
    for (i, c) in s.char_indices().skip(1) {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '"' || c == '\'' => quote = Some(c),
            None if c == '>' => return Some(i),
            None if c == '<' => return None,
            None => {}
        }
    }
    None
}

/// Checks tag balance after implicit closing of optional-end elements.
pub fn is_well_formed(input: &str) -> bool {
    match lex(input) {
        Some(events) => balanced(&events),
        None => false,
    }
}

fn balanced(events: &[Event]) -> bool {
    let mut stack: Vec<&str> = Vec::new();
    for ev in events {
        match ev {
            Event::Text(_) => {}
            Event::Open(name) => {
                if VOID_TAGS.contains(&name.as_str()) {
                    continue;
                }
                if implicitly_closes(name) {
                    if let Some(pos) = stack.iter().rposition(|t| *t == name.as_str()) {
                        if stack[pos + 1..].iter().all(|t| OPTIONAL_END.contains(t)) {
                            stack.truncate(pos);
                        }
                    }
                }
                if is_block(name) && stack.last() == Some(&"p") {
                    stack.pop();
                }
                stack.push(name);
            }
            Event::Close(name) => {
                if VOID_TAGS.contains(&name.as_str()) {
                    continue;
                }
                let Some(pos) = stack.iter().rposition(|t| *t == name.as_str()) else {
                    return false;
                };
                if !stack[pos + 1..].iter().all(|t| OPTIONAL_END.contains(t)) {
                    return false;
                }
                stack.truncate(pos);
            }
        }
    }
    stack.iter().all(|t| OPTIONAL_END.contains(t))
}

fn implicitly_closes(name: &str) -> bool {
    matches!(name, "li" | "dt" | "dd" | "tr" | "td" | "th" | "option" | "p")
}

fn is_block(name: &str) -> bool {
    BLOCK_TAGS.contains(&name)
}

/// Extracts paragraphs from a page. Well-formed markup is split on block
/// elements; otherwise all markup is stripped and paragraphs are split on
/// blank lines.
pub fn extract_text(page: &[u8]) -> Vec<String> {
    let text = super::decode_bytes(page);
    match lex(&text) {
        Some(events) if balanced(&events) => paragraphs_from_events(&events),
        _ => extract_plain(&text),
    }
}

/// The structured path, applied regardless of well-formedness.
pub fn extract_structured(input: &str) -> Vec<String> {
    match lex(input) {
        Some(events) => paragraphs_from_events(&events),
        None => extract_plain(input),
    }
}

fn paragraphs_from_events(events: &[Event]) -> Vec<String> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut pending_br = false;
    for ev in events {
        match ev {
            Event::Text(t) => {
                let decoded = decode_entities(t);
                if decoded.trim().is_empty() {
                    buf.push(' ');
                    continue;
                }
                pending_br = false;
                let mut parts = blank_line_re().split(&decoded).peekable();
                while let Some(part) = parts.next() {
                    buf.push_str(part);
                    if parts.peek().is_some() {
                        push_paragraph(&mut out, &mut buf);
                    }
                }
            }
            Event::Open(name) | Event::Close(name) if name == "br" => {
                if pending_br {
                    push_paragraph(&mut out, &mut buf);
                    pending_br = false;
                } else {
                    buf.push(' ');
                    pending_br = true;
                }
            }
            Event::Open(name) | Event::Close(name) => {
                if is_block(name) {
                    push_paragraph(&mut out, &mut buf);
                    pending_br = false;
                }
            }
        }
    }
    push_paragraph(&mut out, &mut buf);
    out
}

fn push_paragraph(out: &mut Vec<String>, buf: &mut String) {
    let p = collapse_ws(buf);
    if !p.is_empty() {
        out.push(p);
    }
    buf.clear();
}

/// Plain-text path: strips all markup, then splits on blank lines.
pub fn extract_plain(input: &str) -> Vec<String> {
    let no_scripts = script_re().replace_all(input, " ");
    let no_comments = comment_re().replace_all(&no_scripts, " ");
    let stripped = tag_re().replace_all(&no_comments, |caps: &regex::Captures<'_>| {
        let name = caps[1].to_ascii_lowercase();
        if is_block(&name) || name == "br" {
            "\n"
        } else {
            ""
        }
    });
    let decoded = decode_entities(&stripped);
    blank_line_re()
        .split(&decoded)
        .map(collapse_ws)
        .filter(|p| !p.is_empty())
        .collect()
}

/// Names of the opening tags of a page, in document order, lowercased.
pub fn tag_sequence(input: &str) -> Vec<String> {
    match lex(input) {
        Some(events) => events
            .into_iter()
            .filter_map(|e| match e {
                Event::Open(name) => Some(name),
                _ => None,
            })
            .collect(),
        None => {
            let no_scripts = script_re().replace_all(input, " ");
            let no_comments = comment_re().replace_all(&no_scripts, " ");
            tag_re()
                .captures_iter(&no_comments)
                .filter(|c| !c[0].starts_with("</"))
                .filter_map(|c| c.get(1).map(|m| m.as_str().to_ascii_lowercase()))
                .collect()
        }
    }
}

/// Text of every `<a>` element, whitespace-normalized.
pub fn anchor_texts(input: &str) -> Vec<String> {
    let Some(events) = lex(input) else {
        return anchor_re()
            .captures_iter(input)
            .map(|c| collapse_ws(&decode_entities(&tag_re().replace_all(&c[1], " "))))
            .collect();
    };
    let mut out = Vec::new();
    let mut current: Option<String> = None;
    for e in events {
        match e {
            Event::Open(name) if name == "a" => {
                if let Some(t) = current.take() {
                    out.push(collapse_ws(&t));
                }
                current = Some(String::new());
            }
            Event::Close(name) if name == "a" => {
                if let Some(t) = current.take() {
                    out.push(collapse_ws(&t));
                }
            }
            Event::Text(t) => {
                if let Some(buf) = current.as_mut() {
                    buf.push_str(&decode_entities(&t));
                    buf.push(' ');
                }
            }
            _ => {}
        }
    }
    if let Some(t) = current {
        out.push(collapse_ws(&t));
    }
    out
}

fn anchor_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<a\b[^>]*>(.*?)</a\s*>").unwrap())
}

/// Whitespace-normalized concatenation of paragraph text, for comparing
/// the output of the two extraction paths.
pub fn text_content(paragraphs: &[String]) -> String {
    paragraphs
        .iter()
        .flat_map(|p| p.split_whitespace())
        .collect::<Vec<_>>()
        .join(" ")
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn blank_line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\n[ \t\r\f]*\n").unwrap())
}

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"</?([A-Za-z][A-Za-z0-9]*)[^>]*>|<[!?][^>]*>").unwrap())
}

fn script_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?is)<(script|style)\b.*?(</(script|style)\s*>|\z)").unwrap())
}

fn comment_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?s)<!--.*?(-->|\z)").unwrap())
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_owned();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let semi = rest[1..].find(';').map(|p| p + 1).filter(|&p| p <= 10);
        let decoded = semi.and_then(|p| entity(&rest[1..p]).map(|c| (c, p)));
        match decoded {
            Some((c, p)) => {
                out.push(c);
                rest = &rest[p + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn entity(name: &str) -> Option<char> {
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return char::from_u32(code);
    }
    Some(match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => ' ',
        "laquo" => '«',
        "raquo" => '»',
        "rsquo" => '\'',
        "lsquo" => '\'',
        "agrave" => 'à',
        "aacute" => 'á',
        "acirc" => 'â',
        "ccedil" => 'ç',
        "egrave" => 'è',
        "eacute" => 'é',
        "ecirc" => 'ê',
        "euml" => 'ë',
        "igrave" => 'ì',
        "icirc" => 'î',
        "iuml" => 'ï',
        "ograve" => 'ò',
        "ocirc" => 'ô',
        "ugrave" => 'ù',
        "ucirc" => 'û',
        "oelig" => 'œ',
        "Eacute" => 'É',
        "Agrave" => 'À',
        _ => return None,
    })
}
