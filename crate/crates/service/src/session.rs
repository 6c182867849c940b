//! One game: a graph, a strategy and the round history.

use std::time::{SystemTime, UNIX_EPOCH};

use evc_core::game::{apply_round, legal_attacks, AttackEvent, GuardConfig, RoundRecord};
use evc_core::grid::{build, GraphJson};
use evc_core::strategies::{Strategy, StrategyKind, StrategyState};
use evc_core::{Coord, EvcError, GridGraph, GridKind, Topology};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// `POST /sessions` body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    pub kind: GridKind,
    pub h: usize,
    pub w: usize,
    #[serde(default = "finite_rect")]
    pub topology: Topology,
    pub strategy: StrategyKind,
}

fn finite_rect() -> Topology {
    Topology::FiniteRect
}

/// Full session view returned by `GET /sessions/{id}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub version: u64,
    pub strategy: StrategyKind,
    pub state: StrategyState,
    pub graph: GraphJson,
    pub guards: usize,
    pub config: Vec<Coord>,
    pub history: Vec<RoundRecord>,
    pub created_at: u64,
    pub updated_at: u64,
}

/// Milliseconds since the Unix epoch.
pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub params: CreateSession,
    pub graph: GridGraph,
    strategy: Strategy,
    pub initial: GuardConfig,
    pub config: GuardConfig,
    pub history: Vec<RoundRecord>,
    pub created_at: u64,
    pub updated_at: u64,
}

impl Session {
    pub fn create(id: String, params: CreateSession, created_at: u64) -> Result<Self, ServiceError> {
        let graph = build(params.kind, params.h, params.w, params.topology)?;
        let strategy = Strategy::new(params.strategy, &graph)?;
        let initial = strategy.initial_config(&graph);
        Ok(Session {
            id,
            params,
            graph,
            strategy,
            config: initial.clone(),
            initial,
            history: Vec::new(),
            created_at,
            updated_at: created_at,
        })
    }

    /// Rounds played so far; also the optimistic-concurrency version.
    pub fn version(&self) -> u64 {
        self.history.len() as u64
    }

    /// Legal attacks as `[guarded, target]` pairs in canonical edge order.
    pub fn attacks(&self) -> Result<Vec<(Coord, Coord)>, ServiceError> {
        Ok(legal_attacks(&self.graph, &self.config)?
            .into_iter()
            .map(|a| (self.graph.coord(a.guarded), self.graph.coord(a.target)))
            .collect())
    }

    /// Plays one round on edge `{a, b}`. The session is unchanged on error.
    pub fn attack(&mut self, a: Coord, b: Coord, at: u64) -> Result<RoundRecord, ServiceError> {
        let g = &self.graph;
        let unknown = |c: Coord| EvcError::IllegalAttack(format!("{c} is not a vertex"));
        let i = g.index_of(a).ok_or_else(|| unknown(a))?;
        let j = g.index_of(b).ok_or_else(|| unknown(b))?;
        if !g.has_edge(i, j) {
            return Err(EvcError::IllegalAttack(format!("{a}-{b} is not an edge")).into());
        }
        let event = match (self.config.contains(i), self.config.contains(j)) {
            (true, _) => AttackEvent::new(i, j),
            (false, true) => AttackEvent::new(j, i),
            (false, false) => {
                return Err(EvcError::IllegalAttack(format!("{a}-{b} has no guarded endpoint: cover invariant broken")).into())
            }
        };
        let mut strategy = self.strategy.clone();
        let m = strategy.defend(g, &self.config, &event)?;
        let next = apply_round(g, &self.config, &event, &m)?;
        let record = RoundRecord::new(g, &event, &m, &next);
        self.strategy = strategy;
        self.config = next;
        self.history.push(record.clone());
        self.updated_at = at;
        Ok(record)
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            version: self.version(),
            strategy: self.params.strategy,
            state: self.strategy.state(),
            graph: self.graph.to_json(),
            guards: self.config.len(),
            config: self.config.coords(&self.graph),
            history: self.history.clone(),
            created_at: self.created_at,
            updated_at: self.updated_at,
        }
    }
}
