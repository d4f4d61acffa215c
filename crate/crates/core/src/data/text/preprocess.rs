use std::sync::OnceLock;

use regex::Regex;

use super::stem::stem;
use super::stopwords::is_stop_word;

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<[^>]*>").expect("valid regex"))
}

/// Strip HTML tags, lowercase, split on non-alphanumerics, drop stop words
/// and stem. A token is dropped if either its surface form or its stem is
/// a stop word, which keeps the pipeline a fixpoint on its own output.
pub fn preprocess(raw: &str) -> Vec<String> {
    let text = tag_re().replace_all(raw, " ").to_lowercase();
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !is_stop_word(t))
        .map(stem)
        .filter(|s| !s.is_empty() && !is_stop_word(s))
        .collect()
}
