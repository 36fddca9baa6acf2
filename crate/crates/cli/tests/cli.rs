use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_etr-eval"));
    cmd.env_remove("RUST_LOG").env_remove("ETR_DATA_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

const SOURCES: [&str; 4] = [
    "Le conseil municipal a adopté le budget hier soir après un long débat.",
    "Les enfants jouent dans le jardin depuis ce matin. Ils sont contents.",
    "La préfecture recommande aux habitants de limiter leurs déplacements.",
    "Le musée ouvre une nouvelle salle consacrée aux peintres impressionnistes.",
];
const TARGETS: [&str; 4] = [
    "Le conseil de la ville a voté le budget.",
    "Les enfants jouent dans le jardin.",
    "Restez chez vous si possible.",
    "Le musée ouvre une nouvelle salle.",
];

fn write_lines(path: &Path, lines: impl IntoIterator<Item = Value>) {
    let text: String = lines.into_iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(path, text).unwrap();
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let mut pairs = Vec::new();
        for book in 0..3 {
            for (i, (s, t)) in SOURCES.iter().zip(TARGETS).enumerate() {
                pairs.push(json!({"id": format!("b{book}-{i}"), "book_id": format!("b{book}"), "source": s, "target": t}));
            }
        }
        write_lines(&root.join("corpus.jsonl"), pairs);
        Fixture { _dir: dir, root }
    }

    fn path(&self, name: &str) -> String {
        self.root.join(name).display().to_string()
    }
}

#[test]
fn stats_is_deterministic_across_formats() {
    let f = Fixture::new();
    let corpus = f.path("corpus.jsonl");
    let table = ok(&["stats", &corpus]);
    assert!(table.contains("Comp. ratio"), "{table}");
    assert_eq!(ok(&["stats", &corpus]), table);
    let stats: Value = serde_json::from_str(&ok(&["stats", &corpus, "--format", "json"])).unwrap();
    assert_eq!(stats["n_texts"], 12);
    assert!(ok(&["stats", &corpus, "--format", "csv"]).starts_with("statistic,side,mean,std\n"));
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    assert_eq!(run(&["stats", &f.path("missing.jsonl")]).status.code(), Some(2));
    assert_eq!(run(&["stats", "--bogus", &f.path("corpus.jsonl")]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["split", &f.path("corpus.jsonl")]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["score", "--help"]).status.code(), Some(0));

    std::fs::write(f.root.join("bad.jsonl"), "{\"id\": 1}\n").unwrap();
    let o = run(&["stats", &f.path("bad.jsonl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.jsonl:1"));
    assert_eq!(run(&["--abbrev", &f.path("nope.txt"), "stats", &f.path("corpus.jsonl")]).status.code(), Some(2));
}

#[test]
fn split_score_aggregate_select() {
    let f = Fixture::new();
    let corpus = f.path("corpus.jsonl");
    let splits = f.path("splits.json");
    ok(&["split", &corpus, "--seed", "5", "--test-books", "b2", "--val-fraction", "0.25", "--out", &splits]);
    let assignment: Value = serde_json::from_str(&std::fs::read_to_string(&splits).unwrap()).unwrap();
    let counts = |s: &str| assignment["assignments"].as_object().unwrap().values().filter(|v| *v == s).count();
    assert_eq!((counts("train"), counts("validation"), counts("test")), (6, 2, 4));
    let again = f.path("splits2.json");
    ok(&["split", &corpus, "--seed", "5", "--test-books", "b2", "--val-fraction", "0.25", "--out", &again]);
    assert_eq!(std::fs::read(&splits).unwrap(), std::fs::read(&again).unwrap());

    let mut reports = Vec::new();
    for (run_id, model, outputs) in [
        ("m1-r1", "m1", TARGETS),
        ("m1-r2", "m1", ["Le budget est voté.", "Les enfants jouent.", "Restez chez vous.", "Le musée ouvre."]),
        ("m2-r1", "m2", SOURCES),
    ] {
        let run_path = f.path(&format!("{run_id}.jsonl"));
        write_lines(Path::new(&run_path), (0..4).map(|i| json!({"id": format!("b2-{i}"), "output": outputs[i]})));
        let mut emb = vec![json!({"dim": 2})];
        for i in 0..4 {
            let angle = if model == "m1" { 0.2 } else { 0.9 };
            emb.push(json!({"id": format!("candidate:b2-{i}"), "tokens": ["x"], "vectors": [[f64::cos(angle), f64::sin(angle)]]}));
            emb.push(json!({"id": format!("reference:b2-{i}"), "tokens": ["x"], "vectors": [[1.0, 0.0]]}));
        }
        let emb_path = f.path(&format!("{run_id}.emb.jsonl"));
        write_lines(Path::new(&emb_path), emb);
        let report_path = f.path(&format!("{run_id}.json"));
        ok(&[
            "score", "--split", "test", "--splits", &splits, &corpus, &run_path, "--model", model, "--embeddings", &emb_path,
            "--out", &report_path,
        ]);
        reports.push(report_path);
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&reports[0]).unwrap()).unwrap();
    assert_eq!(report["per_document"].as_object().unwrap().len(), 4);
    assert_eq!(report["aggregate"]["rougeL"], 100.0);

    let csv = ok(&["score", "--split", "test", "--splits", &splits, &corpus, &f.path("m1-r1.jsonl"), "--format", "csv"]);
    assert_eq!(csv.lines().count(), 5);
    let o = run(&["score", "--split", "train", "--splits", &splits, &corpus, &f.path("m1-r1.jsonl")]);
    assert_eq!(o.status.code(), Some(1), "outputs outside the split are rejected");

    let agg: Value = serde_json::from_str(&ok(&["aggregate", &reports[0], &reports[1], "--format", "json"])).unwrap();
    assert_eq!(agg["label"], "m1");
    assert_eq!(agg["n_runs"], 2);
    assert_eq!(run(&["aggregate", &reports[0], &reports[2]]).status.code(), Some(1));

    let sel: Value = serde_json::from_str(&ok(&["select", &reports[0], &reports[1], &reports[2], "--format", "json"])).unwrap();
    assert_eq!(sel["best"], "m1-r1");
    let by_model: Value =
        serde_json::from_str(&ok(&["select", "--by", "model", &reports[0], &reports[1], &reports[2], "--format", "json"])).unwrap();
    assert_eq!(by_model["best"], "m1");
    assert!(ok(&["select", &reports[0], &reports[2]]).contains("best: m1-r1"));
}

#[test]
fn campaign_lifecycle_and_agreement() {
    let f = Fixture::new();
    let mut pool = Vec::new();
    for (tag, n) in [("etr-fr", 3), ("etr-fr-politic", 2)] {
        for i in 0..n {
            pool.push(json!({"item_id": format!("{tag}-{i}"), "model_label": "m", "dataset_tag": tag, "source": "s", "candidate": "c"}));
        }
    }
    write_lines(&f.root.join("pool.jsonl"), pool);
    let data = f.path("data");
    let created: Value = serde_json::from_str(&ok(&[
        "campaign", "create", "--data-dir", &data, "--pool", &f.path("pool.jsonl"), "--roster", "ann1,ann2", "--seed", "3",
        "--id", "toy", "--per-model-in-domain", "2", "--per-model-out-domain", "1",
    ]))
    .unwrap();
    assert_eq!(created["items_per_annotator"], 3);
    assert_eq!(created["annotators"].as_array().unwrap().len(), 2);
    let progress = ok(&["campaign", "progress", "toy", "--data-dir", &data, "--format", "csv"]);
    assert_eq!(progress, "annotator,done,pending\nann1,0,3\nann2,0,3\n");
    let export = ok(&["campaign", "export", "toy", "--data-dir", &data]);
    assert_eq!(export.lines().count(), 1);
    assert_eq!(run(&["campaign", "progress", "nope", "--data-dir", &data]).status.code(), Some(1));

    let short = run(&[
        "campaign", "create", "--data-dir", &data, "--pool", &f.path("pool.jsonl"), "--roster", "a", "--seed", "1",
    ]);
    assert_eq!(short.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&short.stderr).contains("etr-fr"));

    let export_path = f.path("export.jsonl");
    std::fs::write(&export_path, &export).unwrap();
    let o = run(&["agreement", &export_path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient data"));

    let mut lines = vec![serde_json::from_str::<Value>(export.lines().next().unwrap()).unwrap()];
    for item in ["x1", "x2", "x3", "x4"] {
        for (who, flip) in [("ann1", false), ("ann2", item == "x4")] {
            let v = |base: i64| if flip { 1 - base } else { base };
            lines.push(json!({"annotator_id": who, "item_id": item, "answers": {"ic-01": v(i64::from(item < "x3")), "fluency": 3}}));
        }
    }
    write_lines(Path::new(&export_path), lines);
    let table = ok(&["agreement", &export_path, "--level", "nominal"]);
    assert!(table.contains("ic-01") && table.contains("macro alpha"), "{table}");
    let csv = ok(&["agreement", &export_path, "--format", "csv", "--binarize-threshold", "3"]);
    assert!(csv.starts_with("criterion,category,level,alpha,pairable_units\n"));
    assert!(csv.contains("\nbinarized@3,"));
    assert_eq!(ok(&["agreement", &export_path, "--format", "csv"]), ok(&["agreement", &export_path, "--format", "csv"]));
}
