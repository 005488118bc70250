use std::sync::OnceLock;

use regex::Regex;

fn word_run() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // letters, combining marks, digits, and ZWJ/ZWNJ (which sit inside
    // Malayalam and other Brahmic words)
    RE.get_or_init(|| Regex::new(r"[\p{L}\p{M}\p{N}\p{Join_Control}]+").expect("valid regex"))
}

/// Per-code-point lowercase; characters whose lowercase mapping is not a
/// single code point are left unchanged.
fn fold(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Case-folded maximal runs of word characters, keeping runs of at least
/// two code points, in text order.
pub fn tokenize(text: &str) -> Vec<String> {
    let folded: String = text.chars().map(fold).collect();
    word_run()
        .find_iter(&folded)
        .map(|m| m.as_str())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_string)
        .collect()
}
