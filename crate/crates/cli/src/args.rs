use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "etr-eval", version, about = "Evaluation toolkit for Easy-to-Read text generation")]
pub struct Cli {
    /// Abbreviation list (one per line) replacing the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    pub abbrev: Option<PathBuf>,

    /// Maximum number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitName {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Nominal,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Shuffled,
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectBy {
    /// Each report is a candidate.
    Run,
    /// Reports are averaged per model label first.
    Model,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write data here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusSelection {
    /// Restrict to one split.
    #[arg(long, value_enum)]
    pub split: Option<SplitName>,

    /// Split assignment file from `split`; overrides split fields in the corpus.
    #[arg(long, value_name = "PATH")]
    pub splits: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus statistics (words, sentences, readability, compression, novelty).
    Stats {
        corpus: PathBuf,
        #[command(flatten)]
        selection: CorpusSelection,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Statistics of several corpora side by side.
    Compare {
        #[arg(required = true, num_args = 2..)]
        corpora: Vec<PathBuf>,
        /// Column labels, one per corpus; defaults to file stems.
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
        #[command(flatten)]
        selection: CorpusSelection,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Book-level test reservation and seeded train/validation split.
    Split {
        corpus: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Books reserved for test.
        #[arg(long, value_delimiter = ',')]
        test_books: Vec<String>,
        #[arg(long, default_value_t = etr_core::corpus::DEFAULT_VAL_FRACTION)]
        val_fraction: f64,
        /// Also write the corpus with split fields filled in.
        #[arg(long, value_name = "PATH")]
        write_corpus: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Score one system run against the corpus targets.
    Score {
        corpus: PathBuf,
        run: PathBuf,
        #[command(flatten)]
        selection: CorpusSelection,
        /// Token embeddings keyed `candidate:<id>` and `reference:<id>`.
        #[arg(long, value_name = "PATH")]
        embeddings: Option<PathBuf>,
        /// Score only the documents that have an output.
        #[arg(long)]
        allow_partial: bool,
        /// Defaults to the run file stem.
        #[arg(long)]
        run_id: Option<String>,
        /// Defaults to the run id.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Mean and standard deviation of metrics over several run reports.
    Aggregate {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Defaults to the shared model label of the reports.
        #[arg(long)]
        label: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Pick the configuration with the best harmonic mean of SARI, ROUGE-L and BERT-F1.
    Select {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "run")]
        by: SelectBy,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Inter-annotator agreement on an annotation export.
    Agreement {
        export: PathBuf,
        /// Force one measurement level on every criterion.
        #[arg(long, value_enum)]
        level: Option<LevelArg>,
        /// Also report alpha on category aggregates with Likert answers cut at this value.
        #[arg(long, value_name = "1-4")]
        binarize_threshold: Option<i64>,
        /// Questionnaire file; defaults to the one in the export header.
        #[arg(long, value_name = "PATH")]
        questionnaire: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Manage annotation campaigns stored in the data directory.
    Campaign {
        /// Defaults to $ETR_DATA_DIR, then ./etr-data.
        #[arg(long, global = true, value_name = "PATH")]
        data_dir: Option<PathBuf>,
        #[command(subcommand)]
        action: CampaignAction,
    },
    /// Run the campaign HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Defaults to $ETR_DATA_DIR, then ./etr-data.
        #[arg(long, value_name = "PATH")]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CampaignAction {
    /// Sample items from a pool and issue annotator tokens.
    Create {
        /// Line-delimited pool items.
        #[arg(long)]
        pool: PathBuf,
        #[arg(long, required = true, value_delimiter = ',')]
        roster: Vec<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        id: Option<String>,
        #[arg(long, value_name = "PATH")]
        questionnaire: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        per_model_in_domain: usize,
        #[arg(long, default_value_t = 10)]
        per_model_out_domain: usize,
        #[arg(long, value_enum, default_value = "shuffled")]
        order: OrderArg,
        #[command(flatten)]
        output: Output,
    },
    /// Done and pending counts per annotator.
    Progress {
        id: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Write the accepted responses as an annotation export.
    Export {
        id: String,
        #[command(flatten)]
        output: Output,
    },
}
