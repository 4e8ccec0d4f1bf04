use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wikicite_core::synth::random_article;
use wikicite_core::{deserialize_article, serialize_article};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_articles_round_trip(seed in any::<u64>()) {
        let article = random_article(&mut ChaCha8Rng::seed_from_u64(seed));
        let line = serialize_article(&article);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(deserialize_article(&line).unwrap(), article);
    }
}

#[test]
fn absent_fields_are_null_and_field_order_is_fixed() {
    let article = random_article(&mut ChaCha8Rng::seed_from_u64(3));
    let line = serialize_article(&article);
    let keys: Vec<&str> = [
        "\"title\"",
        "\"wikicode\"",
        "\"hash\"",
        "\"last_revision\"",
        "\"first_revision\"",
        "\"first_revision_access_date\"",
        "\"cross_lingual_links\"",
        "\"cross_lingual_links_access_date\"",
        "\"text\"",
        "\"elements\"",
        "\"excerpts_with_citations\"",
    ]
    .to_vec();
    let positions: Vec<usize> = keys.iter().map(|k| line.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn chunk_of_n_articles_has_n_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut chunk = String::new();
    for _ in 0..25 {
        chunk.push_str(&serialize_article(&random_article(&mut rng)));
        chunk.push('\n');
    }
    assert_eq!(chunk.matches('\n').count(), 25);
    assert_eq!(chunk.lines().count(), 25);
}
