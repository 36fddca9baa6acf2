//! Questionnaire schema, annotation records and inter-annotator agreement.

mod alpha;
mod analysis;
mod questionnaire;
mod records;

pub use alpha::{alpha, Level, ReliabilityMatrix};
pub use analysis::{
    agreement_report, binarize_and_aggregate, binarized_alpha, category_scores, category_scores_by,
    criterion_matrix, per_criterion_alpha, AgreementReport, BinarizedAlpha, CategoryScores, CriterionAlpha,
    CriterionAlphas, ScoreRow,
};
pub use questionnaire::{Category, Criterion, Questionnaire, Scale};
pub use records::{
    load_export, read_export, write_export, AnnotationRecord, ExportHeader, EXPORT_FORMAT, EXPORT_VERSION,
};
