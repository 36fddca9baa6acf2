//! Automatic metric kernels. Kernels work in `[0, 1]`; the 0-100 scale is
//! applied where results are reported, except for SARI's `total`, KMRE,
//! LIX and the percentage ratios, which are defined on their own scales.

mod bertscore;
mod embeddings;
mod prf;
mod ratios;
mod readability;
mod rouge;
mod sari;
mod selection;

pub use bertscore::{bertscore, IdfWeights};
pub use embeddings::{EmbeddedText, EmbeddingTable};
pub use prf::Prf;
pub use ratios::{compression_ratio, novelty};
pub use readability::{
    kmre, kmre_from_counts, lix, lix_from_counts, ReadabilityScores, TextProfile,
    LIX_LONG_WORD_LETTERS,
};
pub use rouge::{lcs_len, rouge_l, rouge_n};
pub use sari::{sari, SariBreakdown, SariOrder, SARI_MAX_ORDER};
pub use selection::selection_score;
