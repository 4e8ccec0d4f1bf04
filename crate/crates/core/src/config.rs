//! Per-language parser configuration.
//!
//! Each Wikipedia project has its own namespace prefixes and infobox
//! templates, so these lists are data rather than code. Shipped defaults
//! live in `configs/*.json`; callers may load their own documents with the
//! same keys.

use serde::{Deserialize, Serialize};

use crate::error::SchemaError;

const SHIPPED: &[(&str, &str)] = &[
    ("en", include_str!("../configs/en.json")),
    ("fr", include_str!("../configs/fr.json")),
    ("de", include_str!("../configs/de.json")),
    ("es", include_str!("../configs/es.json")),
    ("ru", include_str!("../configs/ru.json")),
    ("ja", include_str!("../configs/ja.json")),
    ("zh", include_str!("../configs/zh.json")),
];

/// Citation template names recognised in every language. A trailing `*`
/// means "any template whose name starts with this".
pub const DEFAULT_CITATION_TEMPLATES: &[&str] = &["cite*", "citation", "rp"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageConfig {
    pub language: String,
    pub file_media_prefixes: Vec<String>,
    pub template_prefixes: Vec<String>,
    /// Exact titles, or prefixes when the entry ends in `*`.
    pub infobox_template_titles: Vec<String>,
    pub interwiki_prefixes: Vec<String>,
    #[serde(default = "default_category_prefixes")]
    pub category_prefixes: Vec<String>,
    #[serde(default = "default_citation_templates")]
    pub citation_templates: Vec<String>,
    #[serde(default)]
    pub citation_needed_templates: Vec<String>,
    #[serde(default)]
    pub segmenter: Option<SegmenterRules>,
}

fn default_category_prefixes() -> Vec<String> {
    vec!["Category:".to_string()]
}

fn default_citation_templates() -> Vec<String> {
    DEFAULT_CITATION_TEMPLATES.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmenterRules {
    pub terminal_punctuation: Vec<char>,
    #[serde(default)]
    pub abbreviation_exceptions: Vec<String>,
}

impl Default for SegmenterRules {
    fn default() -> Self {
        SegmenterRules {
            terminal_punctuation: vec!['.', '!', '?', '…', '。', '！', '？', '।'],
            abbreviation_exceptions: Vec::new(),
        }
    }
}

impl LanguageConfig {
    /// Parse a configuration document and check its invariants.
    pub fn from_json(json: &str) -> Result<Self, SchemaError> {
        let mut de = serde_json::Deserializer::from_str(json);
        let config: LanguageConfig = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| SchemaError { path: e.path().to_string(), message: e.inner().to_string() })?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), SchemaError> {
        let lists = [
            ("file_media_prefixes", &self.file_media_prefixes),
            ("template_prefixes", &self.template_prefixes),
            ("infobox_template_titles", &self.infobox_template_titles),
            ("interwiki_prefixes", &self.interwiki_prefixes),
            ("category_prefixes", &self.category_prefixes),
            ("citation_templates", &self.citation_templates),
        ];
        for (name, list) in lists {
            if let Some(i) = list.iter().position(|p| p.trim().is_empty()) {
                return Err(SchemaError { path: format!("{name}[{i}]"), message: "empty entry".into() });
            }
        }
        if let Some(rules) = &self.segmenter {
            if rules.terminal_punctuation.is_empty() {
                return Err(SchemaError {
                    path: "segmenter.terminal_punctuation".into(),
                    message: "terminal punctuation set is empty".into(),
                });
            }
        }
        Ok(())
    }

    /// Shipped configuration for `language`, or a generic fallback built
    /// from the English defaults.
    pub fn for_language(language: &str) -> Self {
        match SHIPPED.iter().find(|(code, _)| *code == language) {
            Some((_, json)) => LanguageConfig::from_json(json).expect("shipped config is valid"),
            None => {
                let mut config = LanguageConfig::for_language("en");
                config.language = language.to_string();
                if let Some(rules) = &mut config.segmenter {
                    rules.abbreviation_exceptions.clear();
                }
                config
            }
        }
    }

    pub fn shipped_languages() -> impl Iterator<Item = &'static str> {
        SHIPPED.iter().map(|(code, _)| *code)
    }

    pub fn segmenter_rules(&self) -> SegmenterRules {
        self.segmenter.clone().unwrap_or_default()
    }

    /// Strip a namespace prefix from `title` if it starts with one of
    /// `prefixes` (case-insensitive, spaces around the colon ignored).
    /// Returns the remainder.
    pub fn strip_prefix<'a>(title: &'a str, prefixes: &[String]) -> Option<&'a str> {
        let title = title.trim_start();
        let colon = title.find(':')?;
        let (head, rest) = (title[..colon].trim_end(), &title[colon + 1..]);
        prefixes
            .iter()
            .any(|p| {
                let p = p.trim_end_matches(':').trim();
                p.to_lowercase() == head.to_lowercase()
            })
            .then_some(rest)
    }

    pub fn is_file_link(&self, target: &str) -> bool {
        Self::strip_prefix(target, &self.file_media_prefixes).is_some()
    }

    pub fn is_category_link(&self, target: &str) -> bool {
        Self::strip_prefix(target, &self.category_prefixes).is_some()
    }

    pub fn is_interwiki_link(&self, target: &str) -> bool {
        Self::strip_prefix(target, &self.interwiki_prefixes).is_some()
    }

    /// Template name with any template-namespace prefix removed,
    /// underscores turned into spaces, and whitespace collapsed.
    pub fn resolve_template_title(&self, raw: &str) -> String {
        let raw = raw.trim();
        let stripped = Self::strip_prefix(raw, &self.template_prefixes).unwrap_or(raw);
        normalize_title(stripped)
    }

    pub fn is_infobox(&self, template_title: &str) -> bool {
        let title = self.resolve_template_title(template_title).to_lowercase();
        self.infobox_template_titles.iter().any(|entry| matches_name(&title, entry))
    }

    pub fn is_citation_template(&self, template_title: &str) -> bool {
        let title = self.resolve_template_title(template_title).to_lowercase();
        if self.is_citation_needed_template(template_title) {
            return false;
        }
        self.citation_templates.iter().any(|entry| matches_name(&title, entry))
    }

    pub fn is_citation_needed_template(&self, template_title: &str) -> bool {
        let title = self.resolve_template_title(template_title).to_lowercase();
        self.citation_needed_templates.iter().any(|entry| matches_name(&title, entry))
            || ["citation needed", "cn", "fact"].contains(&title.as_str())
    }
}

impl Default for LanguageConfig {
    fn default() -> Self {
        LanguageConfig::for_language("en")
    }
}

fn normalize_title(s: &str) -> String {
    s.replace('_', " ").split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `title` is already lowercased and normalised.
fn matches_name(title: &str, entry: &str) -> bool {
    let entry = normalize_title(entry).to_lowercase();
    match entry.strip_suffix('*') {
        Some(prefix) => title.starts_with(prefix.trim_end()),
        None => title == entry,
    }
}
