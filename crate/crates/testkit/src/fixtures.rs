/// A text with its surface counts and readability scores worked out by hand.
#[derive(Debug, Clone, Copy)]
pub struct ReadabilityCase {
    pub text: &'static str,
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub long_words: usize,
    pub kmre: f64,
    pub lix: f64,
}

pub const READABILITY_CASES: [ReadabilityCase; 10] = [
    // le 1, chat 1, dort 1.
    ReadabilityCase {
        text: "Le chat dort.",
        words: 3,
        sentences: 1,
        syllables: 3,
        long_words: 0,
        kmre: 137.55,
        lix: 3.0,
    },
    // les 1, en-fants 2, re-gar-dent 2 (mute -ent), la 1, té-lé-vi-sion 4.
    ReadabilityCase {
        text: "Les enfants regardent la télévision.",
        words: 5,
        sentences: 1,
        syllables: 10,
        long_words: 3,
        kmre: 67.25,
        lix: 65.0,
    },
    // il 1, pleut 1, nous 1, res-tons 2, à 1, la 1, mai-son 2.
    ReadabilityCase {
        text: "Il pleut. Nous restons à la maison.",
        words: 7,
        sentences: 2,
        syllables: 9,
        long_words: 1,
        kmre: 117.546_428_571_428_57,
        lix: 17.785_714_285_714_286,
    },
    // Every word ends in a mute e: elle, mange, une, pomme, rouge.
    ReadabilityCase {
        text: "Elle mange une pomme rouge.",
        words: 5,
        sentences: 1,
        syllables: 5,
        long_words: 0,
        kmre: 135.25,
        lix: 5.0,
    },
    // C' 1, est 1, l' 1, é-té 2.
    ReadabilityCase {
        text: "C'est l'été !",
        words: 4,
        sentences: 1,
        syllables: 5,
        long_words: 0,
        kmre: 119.4,
        lix: 4.0,
    },
    // Digit runs count one syllable each.
    ReadabilityCase {
        text: "Il a 12 ans et 3 chats.",
        words: 7,
        sentences: 1,
        syllables: 7,
        long_words: 0,
        kmre: 132.95,
        lix: 7.0,
    },
    // "M." does not end the sentence. M 1, Du-pont 2, ha-bite 2, à 1,
    // Pa-ris 2, il 1, tra-vaille 2, beau-coup 2.
    ReadabilityCase {
        text: "M. Dupont habite à Paris. Il travaille beaucoup.",
        words: 8,
        sentences: 2,
        syllables: 13,
        long_words: 2,
        kmre: 93.9,
        lix: 29.0,
    },
    // peut-être 2 (mute final e), de-main 2; peut-être has 8 letters.
    ReadabilityCase {
        text: "Peut-être demain.",
        words: 2,
        sentences: 1,
        syllables: 4,
        long_words: 1,
        kmre: 70.7,
        lix: 52.0,
    },
    // Each bullet line is its own sentence.
    ReadabilityCase {
        text: "Il faut :\n- du pain\n- du lait",
        words: 6,
        sentences: 3,
        syllables: 6,
        long_words: 0,
        kmre: 138.7,
        lix: 2.0,
    },
    // No-ël 2, ar-rive 2, bien-tôt 2, oui 1, dans 1, une 1, se-maine 2.
    ReadabilityCase {
        text: "Noël arrive bientôt ? Oui, dans une semaine.",
        words: 7,
        sentences: 2,
        syllables: 11,
        long_words: 2,
        kmre: 98.117_857_142_857_14,
        lix: 32.071_428_571_428_57,
    },
];
