//! Line-oriented `key value` text shared by scenario and config files.

/// Yields `(line_number, content)` for every non-blank line with comments
/// removed. Line numbers are 1-based. A comment starts at a `#` that begins
/// the line or follows whitespace.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let content = strip_comment(raw).trim();
        (!content.is_empty()).then_some((idx + 1, content))
    })
}

pub(crate) fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

/// Splits a line into its key and the (trimmed) remainder.
pub(crate) fn split_key(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((key, rest)) => (key, rest.trim()),
        None => (line, ""),
    }
}
