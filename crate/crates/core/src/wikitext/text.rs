//! Text repair applied to literal runs before they reach the clean text.

use std::borrow::Cow;

/// Decode HTML entities, then undo UTF-8-read-as-Windows-1252 mojibake.
pub fn fix_text(s: &str) -> Cow<'_, str> {
    let decoded = html_escape::decode_html_entities(s);
    match fix_mojibake(&decoded) {
        Cow::Borrowed(_) => decoded,
        Cow::Owned(fixed) => Cow::Owned(fixed),
    }
}

/// Re-encode suspicious words as Windows-1252 and keep the result when it
/// is valid UTF-8 and shorter. Words without a likely lead byte are left
/// alone, so genuine Latin-1 text ("Âge", "à") is unaffected.
pub fn fix_mojibake(s: &str) -> Cow<'_, str> {
    if !s.chars().any(is_lead_candidate) {
        return Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len());
    let mut changed = false;
    for piece in s.split_inclusive(char::is_whitespace) {
        let (word, ws) = match piece.char_indices().last() {
            Some((i, c)) if c.is_whitespace() => (&piece[..i], &piece[i..]),
            _ => (piece, ""),
        };
        match repair_word(word) {
            Some(fixed) => {
                out.push_str(&fixed);
                changed = true;
            }
            None => out.push_str(word),
        }
        out.push_str(ws);
    }
    if changed {
        Cow::Owned(out)
    } else {
        Cow::Borrowed(s)
    }
}

fn is_lead_candidate(c: char) -> bool {
    // Latin-1 renderings of UTF-8 lead bytes 0xC2..=0xF4.
    ('\u{C2}'..='\u{F4}').contains(&c)
}

fn repair_word(word: &str) -> Option<String> {
    if !word.chars().any(is_lead_candidate) {
        return None;
    }
    let (bytes, _, unmappable) = encoding_rs::WINDOWS_1252.encode(word);
    if unmappable {
        return None;
    }
    let fixed = std::str::from_utf8(&bytes).ok()?;
    if fixed == word || fixed.chars().count() >= word.chars().count() {
        return None;
    }
    // Text can be mis-decoded more than once; each round strictly shrinks it.
    Some(repair_word(fixed).unwrap_or_else(|| fixed.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entities_decoded() {
        assert_eq!(fix_text("A &amp; B &lt;c&gt; &#233;"), "A & B <c> é");
    }

    #[test]
    fn mojibake_repaired() {
        assert_eq!(fix_text("BrontÃ«"), "Brontë");
        assert_eq!(fix_text("cafÃ© au lait"), "café au lait");
        assert_eq!(fix_text("â€œquotedâ€\u{9d}"), "“quoted”");
        assert_eq!(fix_text("ÃƒÂ©t"), "ét");
    }

    #[test]
    fn legitimate_latin1_untouched() {
        assert_eq!(fix_text("Âge à Ôtez"), "Âge à Ôtez");
        assert_eq!(fix_text("Brontë"), "Brontë");
    }
}
