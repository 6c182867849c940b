//! Constructive defense strategies.
//!
//! Each strategy is a deterministic responder `(config, attack) -> move` with a
//! small amount of explicit, serializable state.

mod ham_cycle;
mod hex;
mod oct_shift;
mod shift_all;
mod tri_tile;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EvcError, Result};
use crate::game::{swap_move, AttackEvent, DefenseMove, GuardConfig};
use crate::grid::{GridGraph, GridKind, Topology};

pub use ham_cycle::hamiltonian_cycle_through;
pub use hex::column_parity;
pub use oct_shift::column_invariant_holds;
pub use tri_tile::{tile_layout, TileLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "shift-all")]
    ShiftAll,
    #[serde(rename = "hex-case")]
    HexCaseAnalysis,
    #[serde(rename = "ham-cycle")]
    HamCycle,
    #[serde(rename = "tri-tile")]
    TriTileOscillation,
    #[serde(rename = "oct-shift")]
    OctColumnShift,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::ShiftAll,
        StrategyKind::HexCaseAnalysis,
        StrategyKind::HamCycle,
        StrategyKind::TriTileOscillation,
        StrategyKind::OctColumnShift,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            StrategyKind::ShiftAll => "shift-all",
            StrategyKind::HexCaseAnalysis => "hex-case",
            StrategyKind::HamCycle => "ham-cycle",
            StrategyKind::TriTileOscillation => "tri-tile",
            StrategyKind::OctColumnShift => "oct-shift",
        }
    }

    /// Checks the strategy's (kind, topology, parameter) domain.
    pub fn check_applicable(self, g: &GridGraph) -> Result<()> {
        let (kind, topo, h, w) = (g.kind(), g.topology(), g.h(), g.w());
        let refuse = |why: &str| Err(EvcError::NotApplicable(format!("{} on {kind} {topo} {h}x{w}: {why}", self.tag())));
        match self {
            StrategyKind::ShiftAll => {
                if topo != Topology::Torus || !kind.is_lattice() {
                    return refuse("needs a lattice torus");
                }
                let p = crate::cover::pattern(kind);
                if h % p.period_y != 0 || w % p.period_x != 0 {
                    return refuse("torus size must be a multiple of the pattern period");
                }
            }
            StrategyKind::HexCaseAnalysis => {
                if kind != GridKind::Hex3 || topo != Topology::FiniteRect {
                    return refuse("needs a finite hexagonal grid");
                }
            }
            StrategyKind::HamCycle => {
                if kind != GridKind::Square4 || topo != Topology::FiniteRect {
                    return refuse("needs a finite square grid");
                }
                if (h * w) % 2 != 0 {
                    return refuse("needs an even number of vertices");
                }
            }
            StrategyKind::TriTileOscillation => {
                if kind != GridKind::Tri6 || topo != Topology::FiniteRect {
                    return refuse("needs a finite triangular grid");
                }
            }
            StrategyKind::OctColumnShift => {
                if kind != GridKind::Oct8 || topo != Topology::FiniteRect {
                    return refuse("needs a finite octagonal grid");
                }
            }
        }
        Ok(())
    }

    /// The strategy the harness uses by default for an instance, if any.
    pub fn default_for(g: &GridGraph) -> Option<StrategyKind> {
        StrategyKind::ALL.into_iter().find(|s| s.check_applicable(g).is_ok())
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = EvcError;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| EvcError::NotApplicable(format!("unknown strategy `{s}`")))
    }
}

/// Explicit strategy memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StrategyState {
    /// Accumulated translation of the pattern.
    Offset { dx: i64, dy: i64 },
    /// Which color class (0 or 1) currently holds the guards.
    Parity { parity: u8 },
    /// Current cover phase, 0 for S1 and 1 for S2.
    Phase { phase: u8 },
    Stateless,
}

/// A strategy instance bound to one graph.
#[derive(Debug, Clone)]
pub struct Strategy {
    kind: StrategyKind,
    state: StrategyState,
    /// Hamiltonian cycles found so far, keyed by canonical edge.
    cycle_cache: HashMap<(usize, usize), Option<Vec<usize>>>,
}

impl Strategy {
    pub fn new(kind: StrategyKind, g: &GridGraph) -> Result<Self> {
        kind.check_applicable(g)?;
        let state = match kind {
            StrategyKind::ShiftAll => StrategyState::Offset { dx: 0, dy: 0 },
            StrategyKind::HexCaseAnalysis => StrategyState::Parity { parity: 1 },
            StrategyKind::HamCycle => StrategyState::Parity { parity: 0 },
            StrategyKind::TriTileOscillation => StrategyState::Phase { phase: 0 },
            StrategyKind::OctColumnShift => StrategyState::Stateless,
        };
        Ok(Strategy { kind, state, cycle_cache: HashMap::new() })
    }

    /// Resumes a strategy from persisted state.
    pub fn with_state(kind: StrategyKind, g: &GridGraph, state: StrategyState) -> Result<Self> {
        let mut s = Strategy::new(kind, g)?;
        s.state = state;
        Ok(s)
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn state(&self) -> StrategyState {
        self.state
    }

    /// The starting cover.
    pub fn initial_config(&self, g: &GridGraph) -> GuardConfig {
        match self.kind {
            StrategyKind::ShiftAll => shift_all::initial(g),
            StrategyKind::HexCaseAnalysis => hex::parity_class(g, 1),
            StrategyKind::HamCycle => ham_cycle::parity_class(g, 0),
            StrategyKind::TriTileOscillation => tri_tile::phase_cover(g, 0),
            StrategyKind::OctColumnShift => oct_shift::initial(g),
        }
    }

    /// Answers attack `a` on `c`. State advances only on success.
    ///
    /// Attacks on fully guarded edges are answered by a swap without touching
    /// the strategy.
    pub fn defend(&mut self, g: &GridGraph, c: &GuardConfig, a: &AttackEvent) -> Result<DefenseMove> {
        if !c.contains(a.guarded) || !g.has_edge(a.guarded, a.target) {
            return Err(EvcError::IllegalAttack(format!("{}-{}", g.coord(a.guarded), g.coord(a.target))));
        }
        if a.is_swap(c) {
            return Ok(swap_move(c, a));
        }
        let (m, next) = match (self.kind, self.state) {
            (StrategyKind::ShiftAll, StrategyState::Offset { dx, dy }) => {
                let (m, (ddx, ddy)) = shift_all::defend(g, c, a)?;
                (m, StrategyState::Offset { dx: dx + ddx, dy: dy + ddy })
            }
            (StrategyKind::HexCaseAnalysis, StrategyState::Parity { parity }) => {
                (hex::defend(g, c, a, parity)?, StrategyState::Parity { parity: 1 - parity })
            }
            (StrategyKind::HamCycle, StrategyState::Parity { parity }) => {
                let m = ham_cycle::defend(g, c, a, parity, &mut self.cycle_cache)?;
                (m, StrategyState::Parity { parity: 1 - parity })
            }
            (StrategyKind::TriTileOscillation, StrategyState::Phase { phase }) => {
                (tri_tile::defend(g, c, a, phase)?, StrategyState::Phase { phase: 1 - phase })
            }
            (StrategyKind::OctColumnShift, StrategyState::Stateless) => (oct_shift::defend(g, c, a)?, self.state),
            (kind, state) => {
                return Err(EvcError::NotApplicable(format!("{kind} cannot run from state {state:?}")));
            }
        };
        self.state = next;
        Ok(m)
    }

    /// Hamiltonian cycle used for the last lookup of edge `(i, j)`, if cached.
    pub fn cached_cycle(&self, i: usize, j: usize) -> Option<&Vec<usize>> {
        self.cycle_cache.get(&(i.min(j), i.max(j))).and_then(Option::as_ref)
    }
}

/// Matches `guards` onto `targets` under "stay or step", pinning `from -> to`.
/// Both lists must be ascending; returns `(from, to)` pairs.
pub(crate) fn forced_matching(
    g: &GridGraph,
    guards: &[usize],
    targets: &[usize],
    from: usize,
    to: usize,
) -> Option<Vec<(usize, usize)>> {
    let left: Vec<usize> = guards.iter().copied().filter(|&s| s != from).collect();
    let right: Vec<usize> = targets.iter().copied().filter(|&t| t != to).collect();
    if left.len() != right.len() || !targets.contains(&to) || !guards.contains(&from) {
        return None;
    }
    let pos: HashMap<usize, usize> = right.iter().enumerate().map(|(k, &t)| (t, k)).collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&s| std::iter::once(s).chain(g.neighbors(s).iter().copied()).filter_map(|t| pos.get(&t).copied()).collect())
        .collect();
    let m = crate::matching::hopcroft_karp(&adj, right.len());
    if !m.is_left_perfect() {
        return None;
    }
    let mut out: Vec<(usize, usize)> = left.iter().enumerate().map(|(k, &s)| (s, right[m.left_to_right[k]])).collect();
    out.push((from, to));
    Some(out)
}

fn indefensible(g: &GridGraph, kind: StrategyKind, a: &AttackEvent, why: &str) -> EvcError {
    EvcError::Indefensible(format!(
        "{} cannot answer {}->{} on {} {}x{}: {why}",
        kind.tag(),
        g.coord(a.guarded),
        g.coord(a.target),
        g.kind(),
        g.h(),
        g.w()
    ))
}
