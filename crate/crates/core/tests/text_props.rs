use etr_core::text::{count_syllables_fr, fold_case, ngrams, split_sentences, tokenize};
use etr_testkit::gen;
use proptest::prelude::*;

fn french_text() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(vec![
        "Le", "chat", "l'", "été", "aujourd'hui", "peut-être", "C'est", "M.", "Dr.", "12", "3,5", " ", " ", " ", ". ",
        "! ", "? ", "… ", ", ", "\n", "\n\n", "- ", "« ", " »", "jusqu’à", "Noël", "ÉCOLE", "œuvre", "qu'il",
    ]);
    prop::collection::vec(pieces, 0..40).prop_map(|v| v.concat())
}

proptest! {
    #[test]
    fn tokenizing_is_idempotent(text in french_text()) {
        let once = tokenize(&text, false).into_tokens();
        let twice = tokenize(&once.join(" "), false).into_tokens();
        prop_assert_eq!(&once, &twice);
    }

    #[test]
    fn folding_commutes_with_tokenizing(text in french_text()) {
        let folded: Vec<String> = tokenize(&text, false).iter().map(|t| fold_case(t)).collect();
        prop_assert_eq!(tokenize(&text, true).into_tokens(), folded);
    }

    #[test]
    fn sentences_partition_the_tokens(text in french_text()) {
        let sentences = split_sentences(&text);
        let per_sentence: Vec<String> = sentences
            .sentences
            .iter()
            .flat_map(|s| tokenize(s, false).into_tokens())
            .collect();
        prop_assert_eq!(per_sentence, tokenize(&text, false).into_tokens());
        prop_assert!(sentences.boundaries.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ngram_total_is_length_minus_order_plus_one(text in french_text(), n in 1usize..5) {
        let tokens = tokenize(&text, true).into_tokens();
        let bag = ngrams(&tokens, n);
        prop_assert_eq!(bag.total(), (tokens.len() + 1).saturating_sub(n));
        prop_assert_eq!(bag.counts().values().sum::<usize>(), bag.total());
    }

    #[test]
    fn syllable_count_is_positive(word in "\\PC{0,12}") {
        prop_assert!(count_syllables_fr(&word) >= 1);
    }

    #[test]
    fn ba_prefix_adds_one_syllable(seed in any::<u64>(), syllables in 1usize..5) {
        // Consonant-initial words made of consonant+vowel syllables; see the
        // syllable rules for why vowel-initial and mute-e words are excluded.
        let mut rng = gen::rng(seed);
        let word = gen::cv_word(&mut rng, syllables);
        prop_assert_eq!(count_syllables_fr(&format!("ba{word}")), count_syllables_fr(&word) + 1);
    }
}

#[test]
fn ba_prefix_exceptions() {
    // Vowel-initial words merge with the prefix vowel, and mute-e
    // monosyllables stay at one syllable.
    assert_eq!(count_syllables_fr("été"), 2);
    assert_eq!(count_syllables_fr("baété"), 2);
    assert_eq!(count_syllables_fr("le"), 1);
    assert_eq!(count_syllables_fr("bale"), 1);
}

#[test]
fn spaced_punctuation_and_abbreviations() {
    let s = split_sentences("« Stop ! » dit-il. M. Martin arrive. Il part ?Non.");
    assert_eq!(s.sentences, ["« Stop ! » dit-il.", "M. Martin arrive.", "Il part ?Non."]);
}
