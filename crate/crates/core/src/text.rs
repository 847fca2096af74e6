//! Helpers for the line-oriented formats.

/// Content lines of a document as `(line_number, line)`, skipping blank and
/// `#` comment lines.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Identifiers and forms: non-empty, no whitespace, no `,`.
pub(crate) fn is_atom(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ',')
}
