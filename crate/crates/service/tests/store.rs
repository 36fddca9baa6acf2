mod common;

use std::fs::OpenOptions;
use std::io::Write;
use std::sync::Arc;
use std::thread;

use etr_core::agreement::{agreement_report, read_export, Level};
use etr_core::Error as CoreError;
use etr_service::{ServiceError, Store, Submission};

use common::{record, spec};

#[test]
fn concurrent_submissions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let annotators = ["a1", "a2", "a3", "a4"];
    {
        let store = Store::open(dir.path()).unwrap();
        let handle = store.create(spec("dur", &["m"], &annotators)).unwrap();
        let items: Vec<String> = handle.campaign().assignment[..25].to_vec();
        let q = handle.campaign().questionnaire.clone();
        thread::scope(|s| {
            let results: Vec<_> = annotators
                .iter()
                .flat_map(|a| items.iter().map(move |i| (*a, i.clone())))
                .map(|(a, i)| {
                    let (handle, q) = (handle.clone(), &q);
                    s.spawn(move || handle.submit(record(q, a, &i, i.len())))
                })
                .collect();
            assert_eq!(results.len(), 100);
            for r in results {
                assert_eq!(r.join().unwrap().unwrap(), Submission::Accepted);
            }
        });
        assert_eq!(handle.state().len(), 100);
        assert!(dir.path().join("dur/snapshot.json").is_file());
    }
    let reopened = Store::open(dir.path()).unwrap();
    let handle = reopened.campaign("dur").unwrap();
    assert_eq!(handle.state().len(), 100);
    for p in handle.progress() {
        assert_eq!((p.done, p.pending), (25, 5));
    }

    std::fs::remove_file(dir.path().join("dur/snapshot.json")).unwrap();
    let without_snapshot = Store::open(dir.path()).unwrap().campaign("dur").unwrap();
    assert_eq!(without_snapshot.state().records(), handle.state().records());
}

#[test]
fn conflicting_duplicates_accept_exactly_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let handle = store.create(spec("c", &["m"], &["a", "b"])).unwrap();
    let item = handle.campaign().assignment[0].clone();
    let q = handle.campaign().questionnaire.clone();

    let outcomes: Vec<_> = thread::scope(|s| {
        (0..16)
            .map(|salt| {
                let (handle, q, item) = (handle.clone(), &q, &item);
                s.spawn(move || handle.submit(record(q, "a", item, salt)))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().unwrap())
            .collect()
    });
    let accepted = outcomes.iter().filter(|o| matches!(o, Ok(Submission::Accepted))).count();
    let conflicts = outcomes.iter().filter(|o| matches!(o, Err(ServiceError::Conflict { .. }))).count();
    assert_eq!(accepted, 1);
    // Salts congruent modulo 10 produce the same answers and come back as duplicates.
    assert_eq!(accepted + conflicts + outcomes.iter().filter(|o| matches!(o, Ok(Submission::Duplicate))).count(), 16);

    let outcomes: Vec<_> = thread::scope(|s| {
        (0..8)
            .map(|_| {
                let (handle, q, item) = (handle.clone(), &q, &item);
                s.spawn(move || handle.submit(record(q, "b", item, 3)))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().unwrap().unwrap())
            .collect()
    });
    assert_eq!(outcomes.iter().filter(|o| **o == Submission::Accepted).count(), 1);
    assert_eq!(outcomes.iter().filter(|o| **o == Submission::Duplicate).count(), 7);
    assert_eq!(handle.state().len(), 2);
}

#[test]
fn exact_resubmission_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let handle = store.create(spec("c", &["m"], &["a"])).unwrap();
    let q = handle.campaign().questionnaire.clone();
    let item = handle.campaign().assignment[0].clone();
    let mut r = record(&q, "a", &item, 1);
    assert_eq!(handle.submit(r.clone()).unwrap(), Submission::Accepted);
    r.timestamp = Some("later".into());
    assert_eq!(handle.submit(r).unwrap(), Submission::Duplicate);
    let log = std::fs::read_to_string(dir.path().join("c/responses.log")).unwrap();
    assert_eq!(log.lines().count(), 1);
}

#[test]
fn torn_final_line_is_dropped_on_replay() {
    let dir = tempfile::tempdir().unwrap();
    let items = {
        let store = Store::open(dir.path()).unwrap();
        let handle = store.create(spec("t", &["m"], &["a"])).unwrap();
        let q = handle.campaign().questionnaire.clone();
        let items = handle.campaign().assignment.clone();
        for i in &items[..3] {
            handle.submit(record(&q, "a", i, 0)).unwrap();
        }
        items
    };
    let log = dir.path().join("t/responses.log");
    let intact = std::fs::metadata(&log).unwrap().len();
    OpenOptions::new().append(true).open(&log).unwrap().write_all(b"{\"annotator_id\":\"a\",\"ite").unwrap();

    let store = Store::open(dir.path()).unwrap();
    let handle = store.campaign("t").unwrap();
    assert_eq!(handle.state().len(), 3);
    assert_eq!(std::fs::metadata(&log).unwrap().len(), intact);
    let q = handle.campaign().questionnaire.clone();
    handle.submit(record(&q, "a", &items[3], 0)).unwrap();
    drop(store);
    assert_eq!(Store::open(dir.path()).unwrap().campaign("t").unwrap().state().len(), 4);
}

#[test]
fn corrupt_middle_line_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    {
        let store = Store::open(dir.path()).unwrap();
        store.create(spec("x", &["m"], &["a"])).unwrap();
    }
    let log = dir.path().join("x/responses.log");
    std::fs::write(&log, "not json\n").unwrap();
    let err = Store::open(dir.path()).unwrap().campaign("x").err().unwrap();
    assert!(matches!(err, ServiceError::CorruptLog { line: 1, .. }), "{err}");
}

#[test]
fn validation_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let handle = store.create(spec("v", &["m"], &["a"])).unwrap();
    let q = handle.campaign().questionnaire.clone();
    let item = handle.campaign().assignment[0].clone();

    let mut r = record(&q, "a", &item, 0);
    r.answers.insert("fluency".into(), Some(5));
    match handle.submit(r).unwrap_err() {
        ServiceError::Rejected(reasons) => assert_eq!(reasons, ["fluency: value 5 out of range 0–4"]),
        other => panic!("{other}"),
    }
    assert!(matches!(handle.submit(record(&q, "z", &item, 0)), Err(ServiceError::UnknownAnnotator(_))));
    assert!(matches!(handle.submit(record(&q, "a", "nope", 0)), Err(ServiceError::UnassignedItem { .. })));
    assert!(handle.state().is_empty());
    assert!(matches!(store.campaign("missing"), Err(ServiceError::UnknownCampaign(_))));
    assert!(matches!(store.create(spec("v", &["m"], &["a"])), Err(ServiceError::CampaignExists(_))));
}

#[test]
fn progress_counts() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let handle = store.create(spec("p", &["m"], &["a", "b"])).unwrap();
    let q = handle.campaign().questionnaire.clone();
    let items = handle.campaign().assignment.clone();
    assert!(handle.progress().iter().all(|p| (p.done, p.pending) == (0, 30)));
    handle.submit(record(&q, "a", &items[0], 0)).unwrap();
    let p = handle.progress();
    assert_eq!((p[0].done, p[1].done), (1, 0));
    for a in ["a", "b"] {
        for i in &items {
            handle.submit(record(&q, a, i, 0)).unwrap();
        }
    }
    assert!(handle.progress().iter().all(|p| p.pending == 0));
}

#[test]
fn two_models_three_annotators_get_sixty_identical_items() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut s = spec("m2", &["alpha", "beta"], &["a", "b", "c"]);
    s.pool = common::pool(&["alpha", "beta"], 33, 14);
    let handle = store.create(s).unwrap();
    assert_eq!(handle.campaign().assignment.len(), 60);
    assert!(handle.progress().iter().all(|p| p.pending == 60));
}

#[test]
fn export_and_agreement_match_offline_computation() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let handle = store.create(spec("e", &["m"], &["a", "b"])).unwrap();
    let q = handle.campaign().questionnaire.clone();

    let (header, records) = read_export(handle.export().as_slice(), "export").unwrap();
    assert!(records.is_empty());
    assert_eq!(header.unwrap().campaign_id.as_deref(), Some("e"));

    let items = handle.campaign().assignment.clone();
    for (n, i) in items.iter().enumerate() {
        handle.submit(record(&q, "a", i, n)).unwrap();
    }
    assert!(matches!(handle.agreement(None, None), Err(ServiceError::Core(CoreError::InsufficientData(_)))));
    for (n, i) in items.iter().enumerate() {
        handle.submit(record(&q, "b", i, n + usize::from(n % 3 == 0))).unwrap();
    }

    let export = handle.export();
    let (header, records) = read_export(export.as_slice(), "export").unwrap();
    assert_eq!(records, handle.state().records());
    let offline = agreement_report(&records, &header.unwrap().questionnaire.unwrap(), Some(Level::Nominal), Some(3)).unwrap();
    let online = handle.agreement(Some(Level::Nominal), Some(3)).unwrap();
    assert_eq!(online, offline);
    assert_eq!(handle.last_agreement().unwrap(), Some(online));
    assert_eq!(handle.export(), export);
}

#[test]
fn identical_annotators_have_macro_alpha_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::open(dir.path()).unwrap());
    let handle = store.create(spec("same", &["m"], &["a", "b"])).unwrap();
    let q = handle.campaign().questionnaire.clone();
    for (n, i) in handle.campaign().assignment.clone().iter().enumerate() {
        for a in ["a", "b"] {
            handle.submit(record(&q, a, i, n)).unwrap();
        }
    }
    assert_eq!(handle.agreement(None, None).unwrap().criteria.macro_alpha, Some(1.0));
}
