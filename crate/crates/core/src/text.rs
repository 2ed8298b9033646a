//! Label normalization shared by claim matching, field judging and
//! candidate scoring.

/// Lowercases, removes punctuation and collapses whitespace.
///
/// Punctuation is removed rather than replaced, so `"Constantine I."` and
/// `"constantine i"` compare equal.
pub fn normalize_label(s: &str) -> String {
    let stripped: String = s
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercase slug made of `[a-z0-9-]`, suitable for an IRI path segment.
pub fn slugify(s: &str) -> String {
    let mut out = String::new();
    let mut dash = false;
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            out.push(c);
            dash = false;
        } else if c.is_alphanumeric() {
            // non-ASCII letters are kept as their UTF-8 hex so slugs stay unique
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("{b:02x}"));
            }
            dash = false;
        } else if !dash && !out.is_empty() {
            out.push('-');
            dash = true;
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    if out.is_empty() {
        out.push_str("unnamed");
    }
    out
}
