use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use etr_core::agreement::{agreement_report, load_export, Level, Questionnaire};
use etr_core::corpus::{compare_corpora, corpus_stats, stratified_split, AlignedPair, Corpus, PairFilter, Split, SplitAssignment};
use etr_core::evalrun::{
    aggregate_runs, emit_report, select_best, summary_selection_score, Metric, MetricSummary, ReportFormat, RunAggregate,
    RunReport, ScoreOptions, SystemRun,
};
use etr_core::metrics::EmbeddingTable;
use etr_core::text::Segmenter;
use etr_service::{AppState, PoolItem, PresentationOrder, SamplingPolicy, Store, ADMIN_TOKEN_ENV};
use serde::Serialize;
use tracing::info;

use crate::args::{CampaignAction, Command, CorpusSelection, Format, LevelArg, OrderArg, Output, SelectBy, SplitName};
use crate::error::{CliError, Result};

pub struct Context {
    pub segmenter: Segmenter,
}

fn require_file(path: &Path) -> Result<()> {
    std::fs::metadata(path).map(|_| ()).map_err(|e| CliError::io(path, e))
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn split_of(name: SplitName) -> Split {
    match name {
        SplitName::Train => Split::Train,
        SplitName::Validation => Split::Validation,
        SplitName::Test => Split::Test,
    }
}

fn load_corpus(path: &Path, selection: &CorpusSelection) -> Result<Corpus> {
    let corpus = Corpus::load(path)?;
    Ok(match &selection.splits {
        Some(p) => corpus.with_splits(&SplitAssignment::load(p)?),
        None => corpus,
    })
}

fn selected<'a>(corpus: &'a Corpus, selection: &CorpusSelection, origin: &Path) -> Result<Vec<&'a AlignedPair>> {
    let filter = match selection.split {
        Some(s) => PairFilter::split(split_of(s)),
        None => PairFilter::all(),
    };
    let pairs = corpus.select(&filter);
    if pairs.is_empty() {
        let which = selection.split.map(|s| format!(" in split {}", split_of(s))).unwrap_or_default();
        return Err(CliError::Usage(format!("{}: no pairs{which}", origin.display())));
    }
    Ok(pairs)
}

fn check_selection_paths(selection: &CorpusSelection) -> Result<()> {
    if let Some(p) = &selection.splits {
        require_file(p)?;
    }
    Ok(())
}

pub fn run(command: Command, ctx: &Context) -> Result<()> {
    match command {
        Command::Stats {
            corpus,
            selection,
            format,
            output,
        } => {
            require_file(&corpus)?;
            check_selection_paths(&selection)?;
            let c = load_corpus(&corpus, &selection)?;
            let pairs = selected(&c, &selection, &corpus)?;
            let stats = corpus_stats(&pairs, &ctx.segmenter)?;
            info!(texts = stats.n_texts, "corpus statistics computed");
            let text = match format {
                Format::Table => stats.to_table(),
                Format::Csv => stats.to_csv()?,
                Format::Json => to_json(&stats),
            };
            emit(&output, &text)
        }
        Command::Compare {
            corpora,
            labels,
            selection,
            format,
            output,
        } => {
            for p in &corpora {
                require_file(p)?;
            }
            check_selection_paths(&selection)?;
            if !labels.is_empty() && labels.len() != corpora.len() {
                return Err(CliError::Usage(format!("{} labels for {} corpora", labels.len(), corpora.len())));
            }
            let mut stats = Vec::new();
            for (i, path) in corpora.iter().enumerate() {
                let c = load_corpus(path, &selection)?;
                let pairs = selected(&c, &selection, path)?;
                let label = labels.get(i).cloned().unwrap_or_else(|| stem(path));
                stats.push((label, corpus_stats(&pairs, &ctx.segmenter)?));
            }
            let table = compare_corpora(&stats)?;
            let text = match format {
                Format::Table => table.to_table(),
                Format::Csv => table.to_csv()?,
                Format::Json => to_json(&table),
            };
            emit(&output, &text)
        }
        Command::Split {
            corpus,
            seed,
            test_books,
            val_fraction,
            write_corpus,
            output,
        } => {
            require_file(&corpus)?;
            let c = Corpus::load(&corpus)?;
            let assignment = stratified_split(&c, &test_books, val_fraction, seed)?;
            info!(
                train = assignment.count(Split::Train),
                validation = assignment.count(Split::Validation),
                test = assignment.count(Split::Test),
                "split computed"
            );
            if let Some(path) = write_corpus {
                let mut buf = Vec::new();
                c.with_splits(&assignment).write(&mut buf).expect("writing to memory");
                std::fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
            }
            emit(&output, &to_json(&assignment))
        }
        Command::Score {
            corpus,
            run,
            selection,
            embeddings,
            allow_partial,
            run_id,
            model,
            format,
            output,
        } => {
            require_file(&corpus)?;
            require_file(&run)?;
            check_selection_paths(&selection)?;
            if let Some(p) = &embeddings {
                require_file(p)?;
            }
            let c = load_corpus(&corpus, &selection)?;
            let pairs = selected(&c, &selection, &corpus)?;
            let run_id = run_id.unwrap_or_else(|| stem(&run));
            let model = model.unwrap_or_else(|| run_id.clone());
            let system = SystemRun::load(&run, &run_id, &model)?;
            let table = embeddings.as_deref().map(EmbeddingTable::load).transpose()?;
            let options = ScoreOptions {
                allow_partial,
                segmenter: &ctx.segmenter,
            };
            let report = etr_core::evalrun::score_run(&pairs, &system, table.as_ref(), options)?;
            info!(run = %run_id, documents = report.per_document.len(), "run scored");
            let format = match format {
                Format::Table => ReportFormat::Table,
                Format::Csv => ReportFormat::Csv,
                Format::Json => ReportFormat::Json,
            };
            emit(&output, &emit_report(&report, format)?)
        }
        Command::Aggregate {
            reports,
            label,
            format,
            output,
        } => {
            let reports = load_reports(&reports)?;
            let label = match label {
                Some(l) => l,
                None => shared_label(&reports)?,
            };
            let agg = aggregate_runs(&label, &reports)?;
            let text = match format {
                Format::Table => agg.to_table(),
                Format::Csv => agg.to_csv()?,
                Format::Json => to_json(&agg),
            };
            emit(&output, &text)
        }
        Command::Select {
            reports,
            by,
            format,
            output,
        } => {
            let reports = load_reports(&reports)?;
            let selection = match by {
                SelectBy::Run => {
                    let candidates: Vec<(String, RunReport)> = reports.into_iter().map(|r| (r.run_id.clone(), r)).collect();
                    rank(&candidates)?
                }
                SelectBy::Model => {
                    let mut groups: BTreeMap<String, Vec<RunReport>> = BTreeMap::new();
                    for r in reports {
                        groups.entry(r.model_label.clone()).or_default().push(r);
                    }
                    let candidates = groups
                        .iter()
                        .map(|(label, runs)| Ok((label.clone(), aggregate_runs(label, runs)?)))
                        .collect::<Result<Vec<(String, RunAggregate)>>>()?;
                    rank(&candidates)?
                }
            };
            let text = match format {
                Format::Table => selection.to_table(),
                Format::Csv => selection.to_csv(),
                Format::Json => to_json(&selection),
            };
            emit(&output, &text)
        }
        Command::Agreement {
            export,
            level,
            binarize_threshold,
            questionnaire,
            format,
            output,
        } => {
            require_file(&export)?;
            if let Some(q) = &questionnaire {
                require_file(q)?;
            }
            let (header, records) = load_export(&export)?;
            let q = match questionnaire {
                Some(path) => Questionnaire::load(&path)?,
                None => header.and_then(|h| h.questionnaire).unwrap_or_else(Questionnaire::default_form),
            };
            let level = level.map(|l| match l {
                LevelArg::Nominal => Level::Nominal,
                LevelArg::Interval => Level::Interval,
            });
            let report = agreement_report(&records, &q, level, binarize_threshold)?;
            let text = match format {
                Format::Table => report.to_table(),
                Format::Csv => report.to_csv(),
                Format::Json => to_json(&report),
            };
            emit(&output, &text)
        }
        Command::Campaign { data_dir, action } => campaign(open_store(data_dir)?, action),
        Command::Serve { port, host, data_dir } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| CliError::Usage(format!("invalid address {host}:{port}: {e}")))?;
            let store = Arc::new(open_store(data_dir)?);
            info!(data_dir = %store.root().display(), "serving campaigns");
            let state = AppState::new(store, std::env::var(ADMIN_TOKEN_ENV).ok());
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| CliError::io("<runtime>", e))?;
            runtime
                .block_on(etr_service::serve(state, addr))
                .map_err(|e| CliError::io(addr.to_string(), e))
        }
    }
}

fn open_store(data_dir: Option<PathBuf>) -> Result<Store> {
    Ok(match data_dir {
        Some(d) => Store::open(d)?,
        None => Store::from_env()?,
    })
}

fn load_reports(paths: &[PathBuf]) -> Result<Vec<RunReport>> {
    for p in paths {
        require_file(p)?;
    }
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Core(etr_core::Error::Parse {
                    path: p.display().to_string(),
                    line: e.line(),
                    message: format!("not a JSON run report: {e}"),
                })
            })
        })
        .collect()
}

fn shared_label(reports: &[RunReport]) -> Result<String> {
    let first = &reports[0].model_label;
    if reports.iter().all(|r| &r.model_label == first) {
        Ok(first.clone())
    } else {
        Err(CliError::Usage("reports have different model labels; pass --label".into()))
    }
}

#[derive(Debug, Serialize)]
struct Candidate {
    id: String,
    sari: Option<f64>,
    rouge_l: Option<f64>,
    bert_f1: Option<f64>,
    score: f64,
}

#[derive(Debug, Serialize)]
struct Selection {
    best: String,
    score: f64,
    candidates: Vec<Candidate>,
}

fn rank<S: MetricSummary>(candidates: &[(String, S)]) -> Result<Selection> {
    let (best, score) = select_best(candidates)?;
    let mut rows = candidates
        .iter()
        .map(|(id, s)| {
            Ok(Candidate {
                id: id.clone(),
                sari: s.metric_mean(Metric::Sari),
                rouge_l: s.metric_mean(Metric::RougeL),
                bert_f1: s.metric_mean(Metric::BertF1),
                score: summary_selection_score(s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    Ok(Selection {
        best,
        score,
        candidates: rows,
    })
}

impl Selection {
    fn to_table(&self) -> String {
        let width = self.candidates.iter().map(|c| c.id.chars().count()).max().unwrap_or(0).max(9);
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.2}")).unwrap_or_else(|| "–".into());
        let mut out = format!("{:<width$} {:>8} {:>8} {:>8} {:>8}\n", "candidate", "SARI", "ROUGE-L", "BERT-F1", "score");
        for c in &self.candidates {
            out.push_str(&format!(
                "{:<width$} {:>8} {:>8} {:>8} {:>8.2}\n",
                c.id,
                cell(c.sari),
                cell(c.rouge_l),
                cell(c.bert_f1),
                c.score
            ));
        }
        out.push_str(&format!("best: {} ({:.2})\n", self.best, self.score));
        out
    }

    fn to_csv(&self) -> String {
        let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut out = String::from("candidate,sari,rouge_l,bert_f1,score,best\n");
        for c in &self.candidates {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.id,
                cell(c.sari),
                cell(c.rouge_l),
                cell(c.bert_f1),
                c.score,
                c.id == self.best
            ));
        }
        out
    }
}

fn read_pool(path: &Path) -> Result<Vec<PoolItem>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut items = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| {
            CliError::Core(etr_core::Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                message: e.to_string(),
            })
        })?;
        items.push(item);
    }
    Ok(items)
}

fn campaign(store: Store, action: CampaignAction) -> Result<()> {
    match action {
        CampaignAction::Create {
            pool,
            roster,
            seed,
            id,
            questionnaire,
            per_model_in_domain,
            per_model_out_domain,
            order,
            output,
        } => {
            require_file(&pool)?;
            if let Some(q) = &questionnaire {
                require_file(q)?;
            }
            let spec = etr_service::CampaignSpec {
                campaign_id: id,
                questionnaire: questionnaire.as_deref().map(Questionnaire::load).transpose()?,
                pool: read_pool(&pool)?,
                roster,
                policy: SamplingPolicy {
                    per_model_in_domain,
                    per_model_out_domain,
                    seed,
                    order: match order {
                        OrderArg::Shuffled => PresentationOrder::Shuffled,
                        OrderArg::Blocked => PresentationOrder::Blocked,
                    },
                },
            };
            let handle = store.create(spec)?;
            let c = handle.campaign();
            let created = etr_service::CreatedCampaign {
                campaign_id: c.campaign_id.clone(),
                items_per_annotator: c.assignment.len(),
                annotators: c
                    .roster
                    .iter()
                    .map(|a| etr_service::IssuedToken {
                        annotator_id: a.id.clone(),
                        token: a.token.clone(),
                    })
                    .collect(),
            };
            emit(&output, &to_json(&created))
        }
        CampaignAction::Progress { id, format, output } => {
            let handle = store.campaign(&id)?;
            let rows = handle.progress();
            let text = match format {
                Format::Json => to_json(&rows),
                Format::Csv => {
                    let mut out = String::from("annotator,done,pending\n");
                    for r in &rows {
                        out.push_str(&format!("{},{},{}\n", r.annotator_id, r.done, r.pending));
                    }
                    out
                }
                Format::Table => {
                    let width = rows.iter().map(|r| r.annotator_id.chars().count()).max().unwrap_or(0).max(9);
                    let mut out = format!("{:<width$} {:>6} {:>8}\n", "annotator", "done", "pending");
                    for r in &rows {
                        out.push_str(&format!("{:<width$} {:>6} {:>8}\n", r.annotator_id, r.done, r.pending));
                    }
                    out
                }
            };
            emit(&output, &text)
        }
        CampaignAction::Export { id, output } => {
            let handle = store.campaign(&id)?;
            let bytes = handle.export();
            emit(&output, std::str::from_utf8(&bytes).expect("exports are utf-8"))
        }
    }
}
