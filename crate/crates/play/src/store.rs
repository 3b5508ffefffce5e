//! In-process session store with an optional append-only journal.
//!
//! Journal lines are JSON objects: a `create` entry per session and a `move`
//! entry per stage, written before the stage is applied. Reopening a journal
//! replays it; a torn final line is dropped.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::session::{CreateRequest, HumanAction, PlayError, Session, SessionView, StageResult};

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
enum Entry {
    Create { id: String, seed: u64, request: CreateRequest },
    Move { id: String, stage: usize, human: usize, engine: usize },
}

#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    journal: Option<Mutex<File>>,
}

fn journal_err(e: impl std::fmt::Display) -> PlayError {
    PlayError::Journal(e.to_string())
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    /// Replays `path` if it exists, then appends to it.
    pub fn with_journal(path: &Path) -> Result<Self, PlayError> {
        let mut store = Store::new();
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(journal_err)?;
            let mut valid = 0;
            let mut lines = text.split_inclusive('\n').peekable();
            while let Some(line) = lines.next() {
                let last = lines.peek().is_none();
                if line.trim().is_empty() {
                    valid += line.len();
                    continue;
                }
                match serde_json::from_str::<Entry>(line) {
                    _ if last && !line.ends_with('\n') => break,
                    Ok(entry) => store.replay(entry)?,
                    Err(e) => return Err(journal_err(format!("{e} in {line:?}"))),
                }
                valid += line.len();
            }
            if valid < text.len() {
                OpenOptions::new().write(true).open(path).and_then(|f| f.set_len(valid as u64)).map_err(journal_err)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(journal_err)?;
        store.journal = Some(Mutex::new(file));
        Ok(store)
    }

    fn replay(&self, entry: Entry) -> Result<(), PlayError> {
        match entry {
            Entry::Create { id, seed, request } => {
                let s = Session::new(id.clone(), request, seed)?;
                self.sessions.write().unwrap().insert(id, Arc::new(Mutex::new(s)));
            }
            Entry::Move { id, stage, human, engine } => {
                let session = self.get(&id)?;
                let mut s = session.lock().unwrap();
                if s.stage() != stage || s.committed_action()? != engine {
                    return Err(journal_err(format!("session {id} diverges at stage {stage}")));
                }
                s.play(human)?;
            }
        }
        Ok(())
    }

    fn append(&self, entry: &Entry) -> Result<(), PlayError> {
        if let Some(j) = &self.journal {
            let mut line = serde_json::to_string(entry).map_err(journal_err)?;
            line.push('\n');
            let mut f = j.lock().unwrap();
            f.write_all(line.as_bytes()).map_err(journal_err)?;
            f.flush().map_err(journal_err)?;
        }
        Ok(())
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, PlayError> {
        self.sessions.read().unwrap().get(id).cloned().ok_or(PlayError::UnknownSession)
    }

    pub fn create(&self, request: CreateRequest) -> Result<SessionView, PlayError> {
        let mut rng = rand::thread_rng();
        let id = hex::encode(rng.gen::<[u8; 16]>());
        let seed = request.seed.unwrap_or_else(|| rng.gen());
        let session = Session::new(id.clone(), request.clone(), seed)?;
        self.append(&Entry::Create { id: id.clone(), seed, request })?;
        let view = session.view();
        self.sessions.write().unwrap().insert(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    pub fn submit(&self, id: &str, action: &HumanAction) -> Result<StageResult, PlayError> {
        let session = self.get(id)?;
        let mut s = session.lock().unwrap();
        let engine = s.committed_action()?;
        let human = s.parse_action(action)?;
        self.append(&Entry::Move { id: id.to_string(), stage: s.stage(), human, engine })?;
        s.play(human)
    }

    pub fn state(&self, id: &str) -> Result<SessionView, PlayError> {
        Ok(self.get(id)?.lock().unwrap().view())
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
