use super::inline::link_display;
use super::scan::link_end;
use crate::config::LanguageConfig;

/// Rewrite every `[[…]]` wikilink in `text` to what it displays as. File and
/// category links vanish, interwiki links keep only explicit display text.
/// Everything outside links, and unbalanced brackets, is left as is.
pub fn strip_wikilinks(text: &str, config: &LanguageConfig) -> String {
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while let Some(p) = text[i..].find("[[") {
        let at = i + p;
        out.push_str(&text[i..at]);
        match link_end(text, at) {
            Some(end) => {
                if let Some(display) = link_display(&text[at + 2..end - 2], config) {
                    out.push_str(&strip_wikilinks(display, config));
                }
                i = end;
            }
            None => {
                out.push_str("[[");
                i = at + 2;
            }
        }
    }
    out.push_str(&text[i..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_links_deleted_with_caption() {
        let en = LanguageConfig::default();
        assert_eq!(strip_wikilinks("[[File:Cat.jpg|thumb|A [[cat]]]]See cat.", &en), "See cat.");
        assert_eq!(strip_wikilinks("[[File:Cat.jpg|thumb|A cat]]See cat.", &en), "See cat.");
    }

    #[test]
    fn display_text_rule() {
        let en = LanguageConfig::default();
        assert_eq!(strip_wikilinks("[[Paris|the capital]]", &en), "the capital");
        assert_eq!(strip_wikilinks("[[Paris]] is big", &en), "Paris is big");
        assert_eq!(strip_wikilinks("[[wikt:chat|chat]] and [[wikt:chien]]", &en), "chat and ");
        assert_eq!(strip_wikilinks("[[Category:Cats]]", &en), "");
        assert_eq!(strip_wikilinks("[[:Category:Cats]]", &en), "Category:Cats");
    }

    #[test]
    fn localized_prefix() {
        let fr = LanguageConfig::for_language("fr");
        assert_eq!(strip_wikilinks("[[fichier:Chat.jpg]]", &fr), "");
        assert_eq!(strip_wikilinks("[[Image:Chat.jpg|vignette]]Le chat.", &fr), "Le chat.");
    }

    #[test]
    fn unbalanced_passes_through() {
        let en = LanguageConfig::default();
        assert_eq!(strip_wikilinks("a [[b c", &en), "a [[b c");
        assert_eq!(strip_wikilinks("a ]] b", &en), "a ]] b");
    }
}
