//! Game sessions against the engine, shared by the terminal player and the
//! HTTP service.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use polygame_core::game::{ArenaSpec, Certificate, GameRecord, LogRecord, Outcome};
use polygame_core::strategy::{select_strategy, select_valued_strategy, strategy_by_name, Engine, MoveSource};
use polygame_core::valued::{lower_hull, ord_p, NewtonPolygon};
use polygame_core::{Arena, Error, GameState, Move, Player};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    pub arena: ArenaSpec,
    pub degree: usize,
    pub engine_role: Player,
    pub first: Player,
    /// Strategy id; the dispatcher picks one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostMove {
    pub index: usize,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineMoveRecord {
    /// Position of the move in the game log.
    pub ply: usize,
    pub index: usize,
    pub value: String,
    pub source: MoveSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionResult {
    pub winner: Player,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Set when the engine could not produce a move and resigned.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resigned: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Open,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalSlot {
    pub index: usize,
    pub zero_excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub engine_role: Player,
    pub strategy: Option<String>,
    pub status: Status,
    pub to_move: Option<Player>,
    pub game: GameRecord,
    pub legal_moves: Vec<LegalSlot>,
    /// Newton polygon of the slots set so far (valued arenas).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polygon: Option<NewtonPolygon>,
    pub engine_moves: Vec<EngineMoveRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<SessionResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("it is {0}'s turn")]
    NotYourTurn(Player),
    #[error("session is finished")]
    Finished,
    #[error(transparent)]
    Game(#[from] Error),
}

pub struct Session {
    id: String,
    request: CreateSession,
    game: GameState,
    engine: Engine,
    engine_moves: Vec<EngineMoveRecord>,
    result: Option<SessionResult>,
}

impl Session {
    /// Builds the session and plays the engine's opening when it moves first.
    pub fn create(id: String, request: CreateSession) -> Result<Session, SessionError> {
        let mut s = Session::restore(id, request, &[])?;
        s.advance();
        Ok(s)
    }

    /// Rebuilds a session from its request and move log without letting the
    /// engine move.
    fn restore(id: String, request: CreateSession, log: &[LogRecord]) -> Result<Session, SessionError> {
        let arena = Arena::from_spec(&request.arena, request.degree, false)?;
        let role = request.engine_role;
        let first = request.first;
        let strategy = match &request.strategy {
            Some(name) => {
                let s = strategy_by_name(name)?;
                if s.player() != role {
                    return Err(Error::NotApplicable(format!("{} plays {}", s.id(), s.player())).into());
                }
                s.applicable(&arena, first)?;
                Some(s)
            }
            None => match &arena.kind {
                polygame_core::game::ArenaKind::Cyclic(r) => {
                    match select_strategy(r.modulus(), arena.degree, role, first) {
                        Ok(s) => Some(s),
                        Err(Error::RoleLoses(_) | Error::NotApplicable(_)) => None,
                        // prime moduli are out of scope
                        Err(e) => return Err(e.into()),
                    }
                }
                polygame_core::game::ArenaKind::Valued(_) => {
                    select_valued_strategy(arena.degree, role, first, arena.integral).ok()
                }
            },
        };
        let engine = Engine::new(&arena, role, first, strategy);
        if engine.strategy_id().is_none() && !engine.has_fallback() {
            return Err(Error::NotApplicable("no engine strategy and no solver fallback for this game".into()).into());
        }
        let mut game = GameState::new(arena, first);
        for e in log {
            if game.to_move() != Some(e.player) {
                return Err(Error::IllegalMove(format!("log entry out of turn: {}", e.player)).into());
            }
            let value = game.arena().parse_value(&e.value)?;
            game = game.apply_move(&Move { index: e.index, value })?;
        }
        let mut s = Session { id, request, game, engine, engine_moves: Vec::new(), result: None };
        s.settle();
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn game(&self) -> &GameState {
        &self.game
    }

    pub fn human(&self) -> Player {
        self.request.engine_role.other()
    }

    pub fn is_finished(&self) -> bool {
        self.result.is_some()
    }

    fn settle(&mut self) {
        if self.result.is_none() && self.game.is_complete() {
            self.result = Some(match self.game.adjudicate() {
                Ok(Outcome { winner, certificate }) => {
                    SessionResult { winner, certificate: Some(certificate), resigned: None }
                }
                Err(e) => SessionResult { winner: self.human(), certificate: None, resigned: Some(e.to_string()) },
            });
        }
    }

    /// Lets the engine move while it is its turn.
    fn advance(&mut self) {
        while self.result.is_none() && self.game.to_move() == Some(self.request.engine_role) {
            match self.engine.next_move(&self.game).and_then(|m| Ok((self.game.apply_move(&m.mv)?, m))) {
                Ok((next, m)) => {
                    self.engine_moves.push(EngineMoveRecord {
                        ply: self.game.moves_made(),
                        index: m.mv.index,
                        value: m.mv.value.to_string(),
                        source: m.source,
                        branch: m.branch.map(String::from),
                    });
                    self.game = next;
                    self.settle();
                }
                Err(e) => {
                    self.result = Some(SessionResult {
                        winner: self.human(),
                        certificate: None,
                        resigned: Some(e.to_string()),
                    });
                }
            }
        }
    }

    /// Applies the human move, then the engine's reply when the game goes on.
    pub fn post_move(&mut self, mv: &PostMove) -> Result<(), SessionError> {
        if self.is_finished() {
            return Err(SessionError::Finished);
        }
        if self.game.to_move() != Some(self.human()) {
            return Err(SessionError::NotYourTurn(self.request.engine_role));
        }
        let value = self.game.arena().parse_value(&mv.value)?;
        self.game = self.game.apply_move(&Move { index: mv.index, value })?;
        self.settle();
        self.advance();
        Ok(())
    }

    pub fn view(&self) -> SessionView {
        let arena = self.game.arena();
        let polygon = arena.prime().map(|p| {
            let pts: Vec<_> = self
                .game
                .poly()
                .slots()
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.as_ref().and_then(|c| c.rational()).map(|q| (i, ord_p(q, p))))
                .filter(|(_, v)| !v.is_infinite())
                .collect();
            lower_hull(&pts)
        });
        SessionView {
            id: self.id.clone(),
            engine_role: self.request.engine_role,
            strategy: self.engine.strategy_id(),
            status: if self.is_finished() { Status::Finished } else { Status::Open },
            to_move: if self.is_finished() { None } else { self.game.to_move() },
            game: self.game.to_record(),
            legal_moves: if self.is_finished() {
                Vec::new()
            } else {
                self.game
                    .legal_moves()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|s| LegalSlot { index: s.index, zero_excluded: s.zero_excluded })
                    .collect()
            },
            polygon,
            engine_moves: self.engine_moves.clone(),
            result: self.result.clone(),
        }
    }

    fn persisted(&self) -> PersistedSession {
        PersistedSession {
            id: self.id.clone(),
            request: self.request.clone(),
            log: self.game.to_record().log,
            engine_moves: self.engine_moves.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PersistedSession {
    id: String,
    request: CreateSession,
    log: Vec<LogRecord>,
    #[serde(default)]
    engine_moves: Vec<EngineMoveRecord>,
}

/// In-memory sessions, optionally mirrored to an append-only JSONL file.
#[derive(Default)]
pub struct Store {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    journal: Option<Mutex<File>>,
}

pub const JOURNAL_FILE: &str = "sessions.jsonl";

fn new_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    /// Opens (or creates) the journal in `dir` and replays it; the last
    /// record of each session wins.
    pub fn persistent(dir: &Path) -> std::io::Result<Store> {
        std::fs::create_dir_all(dir)?;
        let path: PathBuf = dir.join(JOURNAL_FILE);
        let mut latest: HashMap<String, PersistedSession> = HashMap::new();
        let mut order = Vec::new();
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                // a torn final line from a crash is skipped
                let Ok(rec) = serde_json::from_str::<PersistedSession>(&line) else { continue };
                if !latest.contains_key(&rec.id) {
                    order.push(rec.id.clone());
                }
                latest.insert(rec.id.clone(), rec);
            }
        }
        let mut sessions = HashMap::new();
        for id in order {
            let rec = latest.remove(&id).expect("recorded above");
            if let Ok(mut s) = Session::restore(rec.id, rec.request, &rec.log) {
                s.engine_moves = rec.engine_moves;
                s.advance();
                sessions.insert(id, Arc::new(Mutex::new(s)));
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Store { sessions: RwLock::new(sessions), journal: Some(Mutex::new(file)) })
    }

    fn record(&self, s: &Session) {
        if let Some(j) = &self.journal {
            let line = serde_json::to_string(&s.persisted()).expect("serializable");
            let mut f = j.lock().unwrap();
            // persistence is best effort; the in-memory session stays authoritative
            let _ = writeln!(f, "{line}").and_then(|_| f.flush());
        }
    }

    pub fn create(&self, request: CreateSession) -> Result<SessionView, SessionError> {
        let s = Session::create(new_id(), request)?;
        self.record(&s);
        let view = s.view();
        self.sessions.write().unwrap().insert(view.id.clone(), Arc::new(Mutex::new(s)));
        Ok(view)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn view(&self, id: &str) -> Result<SessionView, SessionError> {
        Ok(self.get(id)?.lock().unwrap().view())
    }

    pub fn post_move(&self, id: &str, mv: &PostMove) -> Result<SessionView, SessionError> {
        let handle = self.get(id)?;
        let mut s = handle.lock().unwrap();
        s.post_move(mv)?;
        self.record(&s);
        Ok(s.view())
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Player::*;

    fn cyclic(n: u64, d: usize, engine_role: Player, first: Player) -> CreateSession {
        CreateSession { arena: ArenaSpec::Cyclic { modulus: n }, degree: d, engine_role, first, strategy: None }
    }

    #[test]
    fn openings() {
        let s = Session::create("a".into(), cyclic(16, 3, Wanda, Wanda)).unwrap();
        let log = s.view().game.log;
        assert_eq!((log[0].player, log[0].index, log[0].value.as_str()), (Wanda, 0, "12"));
        let s = Session::create("b".into(), cyclic(9, 2, Nora, Nora)).unwrap();
        assert_eq!((s.view().game.log[0].index, s.view().game.log[0].value.as_str()), (0, "1"));
    }

    #[test]
    fn reply_and_turn_checks() {
        let mut s = Session::create("a".into(), cyclic(16, 3, Wanda, Wanda)).unwrap();
        s.post_move(&PostMove { index: 1, value: "4".into() }).unwrap();
        let v = s.view();
        assert_eq!((v.game.log[2].index, v.game.log[2].value.as_str()), (2, "15"));
        assert_eq!(v.engine_moves[1].branch.as_deref(), Some("fp.two.a2"));
        s.post_move(&PostMove { index: 3, value: "2".into() }).unwrap();
        let v = s.view();
        assert_eq!(v.status, Status::Finished);
        assert_eq!(v.result.unwrap().winner, Wanda);
        assert_eq!(s.post_move(&PostMove { index: 3, value: "1".into() }), Err(SessionError::Finished));
    }

    #[test]
    fn zero_extreme_rejected() {
        let mut s = Session::create("a".into(), cyclic(9, 2, Wanda, Wanda)).unwrap();
        assert!(matches!(
            s.post_move(&PostMove { index: 0, value: "0".into() }),
            Err(SessionError::Game(Error::IllegalMove(_)))
        ));
    }

    #[test]
    fn losing_role_uses_solver() {
        let mut s = Session::create("a".into(), cyclic(12, 2, Wanda, Nora)).unwrap();
        assert_eq!(s.view().strategy, None);
        s.post_move(&PostMove { index: 1, value: "0".into() }).unwrap();
        assert_eq!(s.view().engine_moves[0].source, MoveSource::Solver);
    }
}
