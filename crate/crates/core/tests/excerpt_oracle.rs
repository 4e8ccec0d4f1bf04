mod oracles;

use oracles::excerpt_windows;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wikicite_core::excerpt::build_excerpts;
use wikicite_core::synth::random_article;
use wikicite_core::Element;

#[test]
fn matches_window_oracle_on_random_articles() {
    let mut mismatches = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let article = random_article(&mut rng);
        let got: Vec<(String, Vec<String>)> = build_excerpts(&article.elements)
            .into_iter()
            .map(|e| (e.text, e.citations.into_iter().map(|c| c.content).collect()))
            .collect();
        if got != excerpt_windows(&article.elements) {
            mismatches += 1;
        }
        let cited = article
            .elements
            .iter()
            .filter_map(|e| match e {
                Element::Paragraph(p) => Some(p.sentences.iter().filter(|s| !s.citations.is_empty()).count()),
                _ => None,
            })
            .sum::<usize>();
        assert_eq!(got.len(), cited);
        assert!(got.iter().all(|(_, c)| !c.is_empty()));
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn excerpt_citations_exist_in_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let a = random_article(&mut rng);
        for ex in &a.excerpts_with_citations {
            for c in &ex.citations {
                assert!(a.citations().any(|d| d.same_reference(c)));
                assert!(c.char_index <= ex.text.chars().count());
            }
        }
    }
}
