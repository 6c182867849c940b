//! Session registry with an append-only JSON-lines log per session.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use evc_core::game::RoundRecord;
use evc_core::Coord;
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, Mutex};

use crate::error::{ApiError, ServiceError};
use crate::session::{now_ms, CreateSession, Session, SessionView};

/// One line of a session log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LogLine {
    Created {
        id: String,
        #[serde(flatten)]
        params: CreateSession,
        at: u64,
    },
    Round {
        version: u64,
        record: RoundRecord,
        at: u64,
    },
}

/// Pushed on the event stream after every round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundEvent {
    pub id: String,
    pub version: u64,
    pub record: RoundRecord,
}

/// Immutable view served to readers.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub view: SessionView,
    pub attacks: Vec<(Coord, Coord)>,
}

struct Entry {
    writer: Mutex<Session>,
    snapshot: RwLock<Arc<Snapshot>>,
    events: broadcast::Sender<RoundEvent>,
}

impl Entry {
    fn new(session: Session) -> Result<Self, ServiceError> {
        let snap = snapshot(&session)?;
        Ok(Entry { writer: Mutex::new(session), snapshot: RwLock::new(Arc::new(snap)), events: broadcast::channel(256).0 })
    }

    fn current(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }
}

fn snapshot(s: &Session) -> Result<Snapshot, ServiceError> {
    Ok(Snapshot { view: s.view(), attacks: s.attacks()? })
}

/// A fresh 128-bit id in URL-safe base64.
pub fn new_session_id() -> String {
    URL_SAFE_NO_PAD.encode(rand::random::<[u8; 16]>())
}

pub struct Store {
    data_dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Entry>>>,
}

impl Store {
    /// An in-memory store.
    pub fn ephemeral() -> Self {
        Store { data_dir: None, sessions: RwLock::new(HashMap::new()) }
    }

    /// Opens `dir`, replaying every `*.jsonl` log found there.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let session = replay(&path)?;
            sessions.insert(session.id.clone(), Arc::new(Entry::new(session)?));
        }
        Ok(Store { data_dir: Some(dir), sessions: RwLock::new(sessions) })
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("registry lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn entry(&self, id: &str) -> Result<Arc<Entry>, ServiceError> {
        self.sessions
            .read()
            .expect("registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_owned()))
    }

    fn log_path(&self, id: &str) -> Option<PathBuf> {
        self.data_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")))
    }

    fn append(&self, id: &str, line: &LogLine) -> Result<(), ServiceError> {
        if let Some(path) = self.log_path(id) {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            let mut text = serde_json::to_string(line).map_err(|e| ServiceError::Storage(e.to_string()))?;
            text.push('\n');
            f.write_all(text.as_bytes())?;
            f.sync_data()?;
        }
        Ok(())
    }

    pub fn create(&self, params: CreateSession) -> Result<SessionView, ServiceError> {
        let id = new_session_id();
        let at = now_ms();
        let session = Session::create(id.clone(), params.clone(), at)?;
        self.append(&id, &LogLine::Created { id: id.clone(), params, at })?;
        let entry = Arc::new(Entry::new(session)?);
        let view = entry.current().view.clone();
        self.sessions.write().expect("registry lock").insert(id, entry);
        Ok(view)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Snapshot>, ServiceError> {
        Ok(self.entry(id)?.current())
    }

    pub fn subscribe(&self, id: &str) -> Result<broadcast::Receiver<RoundEvent>, ServiceError> {
        Ok(self.entry(id)?.events.subscribe())
    }

    /// Plays one round. With `expected` set, a request made against a stale
    /// version fails with `Conflict`.
    pub async fn attack(&self, id: &str, edge: (Coord, Coord), expected: Option<u64>) -> Result<RoundEvent, ApiError> {
        let entry = self.entry(id)?;
        let mut session = entry.writer.lock().await;
        let current = session.version();
        if let Some(expected) = expected.filter(|&v| v != current) {
            return Err(ServiceError::Conflict { expected, current }.into());
        }
        let mut next = session.clone();
        let at = now_ms();
        let record = next
            .attack(edge.0, edge.1, at)
            .map_err(|error| ApiError { error, trace: Some(session.history.clone()) })?;
        let version = next.version();
        self.append(id, &LogLine::Round { version, record: record.clone(), at })?;
        let snap = snapshot(&next)?;
        *session = next;
        *entry.snapshot.write().expect("snapshot lock") = Arc::new(snap);
        let event = RoundEvent { id: id.to_owned(), version, record };
        // No subscribers is fine.
        let _ = entry.events.send(event.clone());
        Ok(event)
    }
}

/// Rebuilds a session by re-playing its log and checking every record.
pub fn replay(path: &Path) -> Result<Session, ServiceError> {
    let bad = |msg: String| ServiceError::Storage(format!("{}: {msg}", path.display()));
    let mut lines = BufReader::new(File::open(path)?).lines();
    let first = lines.next().ok_or_else(|| bad("empty log".into()))??;
    let mut session = match serde_json::from_str(&first).map_err(|e| bad(e.to_string()))? {
        LogLine::Created { id, params, at } => Session::create(id, params, at)?,
        LogLine::Round { .. } => return Err(bad("log does not start with a created line".into())),
    };
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line).map_err(|e| bad(e.to_string()))? {
            LogLine::Round { version, record, at } => {
                let replayed = session.attack(record.attack.0, record.attack.1, at)?;
                if replayed != record || session.version() != version {
                    return Err(bad(format!("replay diverged at version {version}")));
                }
            }
            LogLine::Created { .. } => return Err(bad("duplicate created line".into())),
        }
    }
    Ok(session)
}
