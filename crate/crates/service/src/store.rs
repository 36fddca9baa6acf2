//! File-backed campaign store.
//!
//! Layout under the data directory:
//!
//! ```text
//! <campaign_id>/campaign.json    campaign definition, written once
//! <campaign_id>/responses.log    one AnnotationRecord per line, append-only
//! <campaign_id>/snapshot.json    records covered by the first `log_bytes` of the log
//! <campaign_id>/agreement.json   last agreement report served
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use etr_core::agreement::{agreement_report, write_export, AgreementReport, AnnotationRecord, ExportHeader, Level};
use rand::Rng;
use serde::{Deserialize, Serialize};
use tracing::{debug, info, warn};

use crate::campaign::{valid_id, Campaign, CampaignSpec};
use crate::error::{Result, ServiceError};

pub const DATA_DIR_ENV: &str = "ETR_DATA_DIR";
pub const DEFAULT_DATA_DIR: &str = "etr-data";
pub const SNAPSHOT_EVERY: usize = 64;

const CAMPAIGN_FILE: &str = "campaign.json";
const LOG_FILE: &str = "responses.log";
const SNAPSHOT_FILE: &str = "snapshot.json";
const AGREEMENT_FILE: &str = "agreement.json";

fn random_hex(bytes: usize) -> String {
    let mut rng = rand::rng();
    (0..bytes).map(|_| format!("{:02x}", rng.random::<u8>())).collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(|e| ServiceError::io(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| ServiceError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| ServiceError::io(path, e))?;
    if let Some(dir) = path.parent() {
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Submission {
    Accepted,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatorProgress {
    pub annotator_id: String,
    pub done: usize,
    pub pending: usize,
}

/// Immutable view of the accepted responses.
#[derive(Debug, Clone, Default)]
pub struct CampaignState {
    records: BTreeMap<(String, String), AnnotationRecord>,
}

impl CampaignState {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, annotator: &str, item: &str) -> Option<&AnnotationRecord> {
        self.records.get(&(annotator.to_string(), item.to_string()))
    }

    /// Records ordered by (annotator, item).
    pub fn records(&self) -> Vec<AnnotationRecord> {
        self.records.values().cloned().collect()
    }

    fn insert_first(&mut self, record: AnnotationRecord) -> bool {
        let key = (record.annotator_id.clone(), record.item_id.clone());
        if self.records.contains_key(&key) {
            return false;
        }
        self.records.insert(key, record);
        true
    }
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    log_bytes: u64,
    records: Vec<AnnotationRecord>,
}

struct LogWriter {
    file: File,
    bytes: u64,
    since_snapshot: usize,
}

/// One open campaign. Submissions are serialized through `writer`; readers
/// clone the current `Arc<CampaignState>` and never wait on disk I/O.
pub struct CampaignHandle {
    campaign: Arc<Campaign>,
    dir: PathBuf,
    writer: Mutex<LogWriter>,
    state: RwLock<Arc<CampaignState>>,
}

impl CampaignHandle {
    fn open(dir: PathBuf) -> Result<CampaignHandle> {
        let campaign_path = dir.join(CAMPAIGN_FILE);
        let text = fs::read_to_string(&campaign_path).map_err(|e| ServiceError::io(&campaign_path, e))?;
        let campaign: Campaign = serde_json::from_str(&text).map_err(|e| ServiceError::CorruptLog {
            path: campaign_path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let (state, file, bytes) = replay(&dir)?;
        info!(campaign = %campaign.campaign_id, records = state.len(), "campaign opened");
        Ok(CampaignHandle {
            campaign: Arc::new(campaign),
            dir,
            writer: Mutex::new(LogWriter {
                file,
                bytes,
                since_snapshot: 0,
            }),
            state: RwLock::new(Arc::new(state)),
        })
    }

    pub fn campaign(&self) -> &Arc<Campaign> {
        &self.campaign
    }

    pub fn state(&self) -> Arc<CampaignState> {
        self.state.read().expect("state lock poisoned").clone()
    }

    /// Validates and durably appends one record. An exact resubmission is a
    /// no-op; a different answer set for the same (annotator, item) is a conflict.
    pub fn submit(&self, record: AnnotationRecord) -> Result<Submission> {
        let c = &self.campaign;
        if c.annotator(&record.annotator_id).is_none() {
            return Err(ServiceError::UnknownAnnotator(record.annotator_id));
        }
        if !c.is_assigned(&record.item_id) {
            return Err(ServiceError::UnassignedItem {
                annotator: record.annotator_id,
                item: record.item_id,
            });
        }
        record.validate(&c.questionnaire).map_err(ServiceError::Rejected)?;

        let mut writer = self.writer.lock().expect("writer lock poisoned");
        let current = self.state();
        if let Some(existing) = current.get(&record.annotator_id, &record.item_id) {
            if existing.same_answers(&record) {
                return Ok(Submission::Duplicate);
            }
            return Err(ServiceError::Conflict {
                annotator: record.annotator_id,
                item: record.item_id,
            });
        }

        let mut line = serde_json::to_vec(&record).expect("records serialize");
        line.push(b'\n');
        let log_path = self.dir.join(LOG_FILE);
        if let Err(e) = writer.file.write_all(&line).and_then(|_| writer.file.sync_data()) {
            // Drop any partial line so later appends stay line-aligned.
            let _ = writer.file.set_len(writer.bytes);
            return Err(ServiceError::io(&log_path, e));
        }
        writer.bytes += line.len() as u64;

        let mut next = (*current).clone();
        next.insert_first(record);
        let next = Arc::new(next);
        *self.state.write().expect("state lock poisoned") = next.clone();

        writer.since_snapshot += 1;
        if writer.since_snapshot >= SNAPSHOT_EVERY {
            let snap = Snapshot {
                log_bytes: writer.bytes,
                records: next.records(),
            };
            match write_atomic(&self.dir.join(SNAPSHOT_FILE), &serde_json::to_vec(&snap).expect("snapshot serializes")) {
                Ok(()) => {
                    writer.since_snapshot = 0;
                    debug!(campaign = %c.campaign_id, records = next.len(), "snapshot written");
                }
                Err(e) => warn!(campaign = %c.campaign_id, "snapshot failed: {e}"),
            }
        }
        Ok(Submission::Accepted)
    }

    pub fn progress(&self) -> Vec<AnnotatorProgress> {
        let state = self.state();
        let total = self.campaign.assignment.len();
        let mut done: HashMap<&str, usize> = HashMap::new();
        for (annotator, _) in state.records.keys() {
            *done.entry(annotator.as_str()).or_default() += 1;
        }
        self.campaign
            .roster
            .iter()
            .map(|a| {
                let d = done.get(a.id.as_str()).copied().unwrap_or(0);
                AnnotatorProgress {
                    annotator_id: a.id.clone(),
                    done: d,
                    pending: total - d,
                }
            })
            .collect()
    }

    pub fn export_header(&self) -> ExportHeader {
        ExportHeader::new(Some(self.campaign.campaign_id.clone()), Some(self.campaign.questionnaire.clone()))
    }

    /// Header line plus the accepted records in (annotator, item) order.
    pub fn export(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_export(&mut out, &self.export_header(), &self.state().records()).expect("writing to memory");
        out
    }

    /// Computes the agreement report on the accepted records and stores it
    /// as the campaign's latest report.
    pub fn agreement(&self, level: Option<Level>, threshold: Option<i64>) -> Result<AgreementReport> {
        let records = self.state().records();
        let report = agreement_report(&records, &self.campaign.questionnaire, level, threshold)?;
        let bytes = serde_json::to_vec_pretty(&report).expect("reports serialize");
        write_atomic(&self.dir.join(AGREEMENT_FILE), &bytes)?;
        Ok(report)
    }

    /// The report stored by the last successful [`CampaignHandle::agreement`] call.
    pub fn last_agreement(&self) -> Result<Option<AgreementReport>> {
        let path = self.dir.join(AGREEMENT_FILE);
        match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map(Some).map_err(|e| ServiceError::CorruptLog {
                path,
                line: e.line(),
                message: e.to_string(),
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(ServiceError::io(path, e)),
        }
    }
}

fn load_snapshot(dir: &Path) -> Option<Snapshot> {
    let path = dir.join(SNAPSHOT_FILE);
    let bytes = fs::read(&path).ok()?;
    match serde_json::from_slice(&bytes) {
        Ok(s) => Some(s),
        Err(e) => {
            warn!("ignoring unreadable snapshot {}: {e}", path.display());
            None
        }
    }
}

/// Rebuilds the state from the snapshot and the log tail. A final line
/// without a newline is a write torn by a crash: it was never acknowledged,
/// so it is cut off.
fn replay(dir: &Path) -> Result<(CampaignState, File, u64)> {
    let path = dir.join(LOG_FILE);
    let mut file = OpenOptions::new()
        .read(true)
        .append(true)
        .create(true)
        .open(&path)
        .map_err(|e| ServiceError::io(&path, e))?;
    let len = file.metadata().map_err(|e| ServiceError::io(&path, e))?.len();

    let mut state = CampaignState::default();
    let mut start = 0;
    if let Some(snap) = load_snapshot(dir) {
        if snap.log_bytes <= len {
            start = snap.log_bytes;
            for r in snap.records {
                state.insert_first(r);
            }
        } else {
            warn!("snapshot ahead of log in {}; replaying the full log", dir.display());
        }
    }

    let mut tail = Vec::new();
    file.seek(SeekFrom::Start(start))
        .and_then(|_| file.read_to_end(&mut tail))
        .map_err(|e| ServiceError::io(&path, e))?;
    let complete = tail.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if complete < tail.len() {
        let keep = start + complete as u64;
        warn!("truncating torn record at byte {keep} of {}", path.display());
        file.set_len(keep).map_err(|e| ServiceError::io(&path, e))?;
    }
    for (idx, line) in tail[..complete].split(|&b| b == b'\n').enumerate() {
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let record: AnnotationRecord = serde_json::from_slice(line).map_err(|e| ServiceError::CorruptLog {
            path: path.clone(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        if !state.insert_first(record) {
            warn!("ignoring repeated record at line {} of {}", idx + 1, path.display());
        }
    }
    Ok((state, file, start + complete as u64))
}

/// All campaigns under one data directory.
pub struct Store {
    root: PathBuf,
    open: Mutex<HashMap<String, Arc<CampaignHandle>>>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Store> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| ServiceError::io(&root, e))?;
        Ok(Store {
            root,
            open: Mutex::new(HashMap::new()),
        })
    }

    /// Opens the directory named by `ETR_DATA_DIR`, or `./etr-data`.
    pub fn from_env() -> Result<Store> {
        let root = std::env::var_os(DATA_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_DATA_DIR), PathBuf::from);
        Store::open(root)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn create(&self, spec: CampaignSpec) -> Result<Arc<CampaignHandle>> {
        let id = spec.campaign_id.clone().unwrap_or_else(|| format!("c-{}", random_hex(6)));
        let campaign = Campaign::build(spec, id, || random_hex(16))?;
        let dir = self.root.join(&campaign.campaign_id);
        let mut open = self.open.lock().expect("store lock poisoned");
        match fs::create_dir(&dir) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                return Err(ServiceError::CampaignExists(campaign.campaign_id));
            }
            Err(e) => return Err(ServiceError::io(&dir, e)),
        }
        let body = serde_json::to_vec_pretty(&campaign).expect("campaigns serialize");
        write_atomic(&dir.join(CAMPAIGN_FILE), &body)?;
        let handle = Arc::new(CampaignHandle::open(dir)?);
        open.insert(campaign.campaign_id.clone(), handle.clone());
        info!(campaign = %campaign.campaign_id, items = campaign.assignment.len(), annotators = campaign.roster.len(), "campaign created");
        Ok(handle)
    }

    pub fn campaign(&self, id: &str) -> Result<Arc<CampaignHandle>> {
        if !valid_id(id) {
            return Err(ServiceError::UnknownCampaign(id.to_string()));
        }
        let mut open = self.open.lock().expect("store lock poisoned");
        if let Some(h) = open.get(id) {
            return Ok(h.clone());
        }
        let dir = self.root.join(id);
        if !dir.join(CAMPAIGN_FILE).is_file() {
            return Err(ServiceError::UnknownCampaign(id.to_string()));
        }
        let handle = Arc::new(CampaignHandle::open(dir)?);
        open.insert(id.to_string(), handle.clone());
        Ok(handle)
    }

    /// Campaign ids present on disk, sorted.
    pub fn list(&self) -> Result<Vec<String>> {
        let entries = fs::read_dir(&self.root).map_err(|e| ServiceError::io(&self.root, e))?;
        let mut ids: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter(|e| e.path().join(CAMPAIGN_FILE).is_file())
            .filter_map(|e| e.file_name().into_string().ok())
            .collect();
        ids.sort();
        Ok(ids)
    }
}
