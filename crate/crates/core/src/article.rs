use crate::config::LanguageConfig;
use crate::excerpt::build_excerpts;
use crate::schema::Article;
use crate::wikitext::parse_article_report;

/// Fill `elements`, `text` and `excerpts_with_citations` from the article's
/// wikicode. Enrichment fields are left untouched. Returns the parser's
/// warning count.
pub fn parse_into(article: &mut Article, config: &LanguageConfig) -> usize {
    let report = parse_article_report(&article.wikicode, config);
    article.text = Article::natural_text(&report.elements);
    article.excerpts_with_citations = build_excerpts(&report.elements);
    article.elements = report.elements;
    report.warnings
}

/// Rebuild excerpts after sentence-level fields changed (e.g. translations).
pub fn refresh_excerpts(article: &mut Article) {
    article.excerpts_with_citations = build_excerpts(&article.elements);
}
