//! Readable text from downloaded source documents.

use scraper::node::Node;
use scraper::{ElementRef, Html};
use wikicite_core::stats::SKELETON_MESSAGE;

pub const UNSUPPORTED_MESSAGE: &str = "Exception: unsupported content type";

const SKIPPED: &[&str] = &[
    "head", "script", "style", "noscript", "nav", "header", "footer", "aside", "form", "template", "svg", "iframe",
    "button", "select", "textarea", "canvas", "object", "embed", "audio", "video", "map", "dialog",
];

const BLOCKS: &[&str] = &[
    "p", "div", "section", "article", "main", "blockquote", "ul", "ol", "dl", "dt", "dd", "table", "thead", "tbody",
    "tfoot", "tr", "figure", "figcaption", "caption", "address", "details", "summary", "hr", "center",
];

/// What kind of body a Content-Type announces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    Html,
    Plain,
    Unsupported,
}

pub fn body_kind(content_type: &str) -> BodyKind {
    let mime = content_type.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    match mime.as_str() {
        // Servers that send no type at all are almost always serving HTML.
        "" | "text/html" | "application/xhtml+xml" => BodyKind::Html,
        "text/plain" => BodyKind::Plain,
        _ => BodyKind::Unsupported,
    }
}

/// Linearize `content` according to its type. Errors are extract-error
/// messages ready to store.
pub fn extract_text(content: &str, content_type: &str) -> Result<String, String> {
    let text = match body_kind(content_type) {
        BodyKind::Html => html_to_text(content),
        BodyKind::Plain => normalize_plain(content),
        BodyKind::Unsupported => return Err(format!("{UNSUPPORTED_MESSAGE} ({content_type})")),
    };
    if text.is_empty() {
        Err(SKELETON_MESSAGE.to_string())
    } else {
        Ok(text)
    }
}

/// Collapse runs of spaces within lines and drop blank lines.
pub fn normalize_plain(content: &str) -> String {
    content
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn html_to_text(content: &str) -> String {
    let doc = Html::parse_document(content);
    let mut out = Lines::default();
    walk(doc.root_element(), &mut out);
    out.finish()
}

#[derive(Default)]
struct Lines {
    lines: Vec<String>,
    current: String,
    pending_space: bool,
}

impl Lines {
    fn text(&mut self, s: &str) {
        for c in s.chars() {
            if c.is_whitespace() {
                self.pending_space = !self.current.is_empty();
            } else {
                if self.pending_space {
                    self.current.push(' ');
                    self.pending_space = false;
                }
                self.current.push(c);
            }
        }
    }

    /// Append verbatim, keeping source line breaks (for `<pre>`).
    fn raw(&mut self, s: &str) {
        for (i, line) in s.lines().enumerate() {
            if i > 0 {
                self.newline();
            }
            self.current.push_str(line.trim_end());
        }
    }

    fn newline(&mut self) {
        let line = std::mem::take(&mut self.current);
        if !line.trim().is_empty() {
            self.lines.push(line.trim_end().to_string());
        }
        self.pending_space = false;
    }

    fn finish(mut self) -> String {
        self.newline();
        self.lines.join("\n")
    }
}

fn hidden(el: &ElementRef<'_>) -> bool {
    let e = el.value();
    if e.attr("hidden").is_some() || e.attr("aria-hidden") == Some("true") {
        return true;
    }
    e.attr("style").is_some_and(|s| {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        s.contains("display:none") || s.contains("visibility:hidden")
    })
}

fn inner_text(el: ElementRef<'_>) -> String {
    let mut tmp = Lines::default();
    walk(el, &mut tmp);
    tmp.finish().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn walk(el: ElementRef<'_>, out: &mut Lines) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => out.text(t),
            Node::Element(_) => {
                let Some(child_el) = ElementRef::wrap(child) else { continue };
                element(child_el, out);
            }
            _ => {}
        }
    }
}

fn element(el: ElementRef<'_>, out: &mut Lines) {
    let name = el.value().name();
    if SKIPPED.contains(&name) || hidden(&el) {
        return;
    }
    match name {
        "br" => out.newline(),
        "pre" => {
            out.newline();
            out.raw(&el.text().collect::<String>());
            out.newline();
        }
        "h1" | "h2" | "h3" | "h4" | "h5" | "h6" => {
            out.newline();
            let level = usize::from(name.as_bytes()[1] - b'0');
            let text = inner_text(el);
            if !text.is_empty() {
                out.text(&format!("{} {text}", "#".repeat(level)));
            }
            out.newline();
        }
        "li" => {
            out.newline();
            out.text("- ");
            walk(el, out);
            out.newline();
        }
        "td" | "th" => {
            if !out.current.is_empty() {
                out.text(" | ");
            }
            walk(el, out);
        }
        "a" => {
            let href = el.value().attr("href").unwrap_or("").trim();
            let text = inner_text(el);
            if (href.starts_with("http://") || href.starts_with("https://")) && !text.is_empty() {
                out.text(&format!("[{text}]({href})"));
            } else {
                out.text(&text);
            }
        }
        "img" => {}
        _ if BLOCKS.contains(&name) => {
            out.newline();
            walk(el, out);
            out.newline();
        }
        _ => walk(el, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_inline_markup() {
        let html = "<html><body><p>Hello <b>world</b></p><!--x--></body></html>";
        assert_eq!(extract_text(html, "text/html").unwrap(), "Hello world");
    }

    #[test]
    fn skeleton_page() {
        assert_eq!(extract_text("<html><head/><body/></html>", "text/html"), Err(SKELETON_MESSAGE.to_string()));
        let only_boilerplate = "<html><head><title>T</title><script>var x=1;</script></head><body><nav>Home</nav></body></html>";
        assert_eq!(extract_text(only_boilerplate, "text/html; charset=utf-8"), Err(SKELETON_MESSAGE.to_string()));
    }

    #[test]
    fn structure_is_linearized() {
        let html = r#"<body><h2>News</h2><ul><li>One</li><li>Two <a href="https://x.org/a">link</a></li></ul>
            <table><tr><th>k</th><td>v</td></tr></table><p style="display: none">secret</p><a href="/rel">rel</a></body>"#;
        assert_eq!(html_to_text(html), "## News\n- One\n- Two [link](https://x.org/a)\nk | v\nrel");
    }

    #[test]
    fn plain_text_passes_through() {
        let words: Vec<String> = (0..200).map(|i| format!("w{i}")).collect();
        let body = words.join("  ") + "\n\n";
        let out = extract_text(&body, "text/plain").unwrap();
        assert_eq!(out.split_whitespace().collect::<Vec<_>>(), words);
    }

    #[test]
    fn unsupported_types() {
        let err = extract_text("%PDF-1.4", "application/pdf").unwrap_err();
        assert!(err.starts_with(UNSUPPORTED_MESSAGE));
        assert_eq!(body_kind("TEXT/HTML; charset=ISO-8859-1"), BodyKind::Html);
    }
}
