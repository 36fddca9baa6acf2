fn is_vowel(c: char) -> bool {
    matches!(
        c,
        'a' | 'e' | 'i' | 'o' | 'u' | 'y' | 'é' | 'è' | 'ê' | 'ë' | 'à' | 'â' | 'î' | 'ï' | 'ô'
            | 'û' | 'ù' | 'ü' | 'ÿ' | 'œ' | 'æ'
    )
}

fn has_diaeresis(c: char) -> bool {
    matches!(c, 'ë' | 'ï' | 'ü' | 'ÿ')
}

fn is_consonant(c: char) -> bool {
    c.is_alphabetic() && !is_vowel(c)
}

/// Estimates the number of French syllables in a word.
///
/// Counts maximal vowel groups (a diaeresis vowel opens a new group) and
/// one syllable per run of digits. A final unaccented `e`, `es` or `ent`
/// after a consonant is treated as mute when at least one syllable remains.
/// The result is never below 1.
pub fn count_syllables_fr(word: &str) -> usize {
    let lower: Vec<char> = word.chars().flat_map(char::to_lowercase).collect();

    let mut groups = 0usize;
    let mut in_vowels = false;
    let mut in_digits = false;
    for &c in &lower {
        if is_vowel(c) {
            if !in_vowels || has_diaeresis(c) {
                groups += 1;
            }
            in_vowels = true;
            in_digits = false;
        } else if c.is_ascii_digit() || c.is_numeric() {
            if !in_digits {
                groups += 1;
            }
            in_digits = true;
            in_vowels = false;
        } else {
            in_vowels = false;
            in_digits = false;
        }
    }

    if groups >= 2 && has_mute_ending(&lower) {
        groups -= 1;
    }
    groups.max(1)
}

fn has_mute_ending(lower: &[char]) -> bool {
    let letters: Vec<char> = lower.iter().copied().filter(|c| c.is_alphabetic()).collect();
    // Only the word-final run of letters matters ("grand-mère" ends in "mère").
    if lower.last().is_none_or(|c| !c.is_alphabetic()) {
        return false;
    }
    for suffix in [&['e'][..], &['e', 's'][..], &['e', 'n', 't'][..]] {
        if letters.ends_with(suffix) && letters.len() > suffix.len() {
            let before = letters[letters.len() - suffix.len() - 1];
            if is_consonant(before) {
                return true;
            }
        }
    }
    false
}
