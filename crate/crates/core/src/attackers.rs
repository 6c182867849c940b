//! Automated attack generators.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EvcError, Result};
use crate::evc_solver::{bits, covers_of_size, Masks};
use crate::game::{defense_exists, legal_attacks, AttackEvent, GuardConfig};
use crate::grid::GridGraph;

/// Candidate covers examined per greedy decision.
pub const GREEDY_CAP: usize = 512;

/// Vertex cap for exhaustive minimax.
pub const MINIMAX_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum AttackerKind {
    #[serde(rename = "random")]
    UniformRandom { seed: u64 },
    #[serde(rename = "greedy")]
    GreedyPressure,
    #[serde(rename = "minimax")]
    MinimaxExhaustive { depth: usize },
}

impl AttackerKind {
    pub fn tag(&self) -> &'static str {
        match self {
            AttackerKind::UniformRandom { .. } => "random",
            AttackerKind::GreedyPressure => "greedy",
            AttackerKind::MinimaxExhaustive { .. } => "minimax",
        }
    }

    /// Parses a tag, filling in `seed` and `depth`.
    pub fn from_tag(tag: &str, seed: u64, depth: usize) -> Result<Self> {
        match tag {
            "random" => Ok(AttackerKind::UniformRandom { seed }),
            "greedy" => Ok(AttackerKind::GreedyPressure),
            "minimax" => Ok(AttackerKind::MinimaxExhaustive { depth }),
            _ => Err(EvcError::DegenerateParameters(format!("unknown attacker `{tag}`"))),
        }
    }
}

impl fmt::Display for AttackerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A stateful attacker.
#[derive(Debug, Clone)]
pub struct Attacker {
    kind: AttackerKind,
    rng: ChaCha8Rng,
    memo: HashMap<(u64, usize), bool>,
}

impl Attacker {
    pub fn new(kind: AttackerKind) -> Self {
        let seed = match kind {
            AttackerKind::UniformRandom { seed } => seed,
            _ => 0,
        };
        Attacker { kind, rng: ChaCha8Rng::seed_from_u64(seed), memo: HashMap::new() }
    }

    pub fn kind(&self) -> AttackerKind {
        self.kind
    }

    pub fn next_attack(&mut self, g: &GridGraph, c: &GuardConfig) -> Result<AttackEvent> {
        let attacks = legal_attacks(g, c)?;
        if attacks.is_empty() {
            return Err(EvcError::NoLegalAttack);
        }
        match self.kind {
            AttackerKind::UniformRandom { .. } => Ok(attacks[self.rng.gen_range(0..attacks.len())]),
            AttackerKind::GreedyPressure => greedy(g, c, &attacks),
            AttackerKind::MinimaxExhaustive { depth } => {
                let mk = minimax_masks(g)?;
                let s = to_mask(c);
                let covers = covers_of_size(&mk, g.n(), c.len());
                let pick = attacks.iter().copied().find(|a| {
                    depth > 0 && refutes(&mk, &covers, &mut self.memo, s, (a.guarded, a.target), depth)
                });
                Ok(pick.unwrap_or(attacks[0]))
            }
        }
    }
}

/// Free-function form of [`Attacker::next_attack`].
pub fn next_attack(atk: &mut Attacker, g: &GridGraph, c: &GuardConfig) -> Result<AttackEvent> {
    atk.next_attack(g, c)
}

fn to_mask(c: &GuardConfig) -> u64 {
    c.indices().into_iter().fold(0, |m, i| m | 1 << i)
}

fn minimax_masks(g: &GridGraph) -> Result<Masks> {
    if g.n() > MINIMAX_CAP {
        return Err(EvcError::TooLarge { n: g.n(), cap: MINIMAX_CAP });
    }
    Ok(Masks::new(g))
}

/// Up to `cap` same-size covers inside the closed neighborhood of `c`, in
/// lexicographic order of their sorted index lists.
fn nearby_covers(g: &GridGraph, c: &GuardConfig, cap: usize) -> Vec<GuardConfig> {
    let n = g.n();
    let k = c.len();
    let reach: Vec<bool> = (0..n).map(|i| c.contains(i) || g.neighbors(i).iter().any(|&j| c.contains(j))).collect();
    let mut out = Vec::new();
    let mut chosen = vec![false; n];

    fn go(g: &GridGraph, reach: &[bool], k: usize, cap: usize, i: usize, used: usize, chosen: &mut Vec<bool>, out: &mut Vec<GuardConfig>) {
        if out.len() >= cap || used + (g.n() - i) < k {
            return;
        }
        if i == g.n() {
            if used == k {
                out.push(GuardConfig::from_mask(chosen.clone()));
            }
            return;
        }
        let must = g.neighbors(i).iter().any(|&j| j < i && !chosen[j]);
        if reach[i] && used < k {
            chosen[i] = true;
            go(g, reach, k, cap, i + 1, used + 1, chosen, out);
            chosen[i] = false;
        }
        if !must {
            go(g, reach, k, cap, i + 1, used, chosen, out);
        }
    }

    go(g, &reach, k, cap, 0, 0, &mut chosen, &mut out);
    out
}

/// The attack leaving the fewest one-step-defensible targets; ties go to the
/// earliest attack.
fn greedy(g: &GridGraph, c: &GuardConfig, attacks: &[AttackEvent]) -> Result<AttackEvent> {
    let candidates = nearby_covers(g, c, GREEDY_CAP);
    let mut best = (usize::MAX, attacks[0]);
    for a in attacks {
        let mut count = 0;
        for t in candidates.iter().filter(|t| t.contains(a.target)) {
            if defense_exists(g, c, a, t)?.is_some() {
                count += 1;
            }
        }
        if count < best.0 {
            best = (count, *a);
        }
    }
    Ok(best.1)
}

/// Can the attacker force a loss within `depth` rounds from `s`?
fn attacker_wins_from(mk: &Masks, covers: &[u64], memo: &mut HashMap<(u64, usize), bool>, s: u64, depth: usize) -> bool {
    if depth == 0 {
        return false;
    }
    if let Some(&w) = memo.get(&(s, depth)) {
        return w;
    }
    let win = mk.attacks(s).into_iter().any(|att| refutes(mk, covers, memo, s, att, depth));
    memo.insert((s, depth), win);
    win
}

/// Every cover the defender can reach after attack `att` is lost in `depth - 1`.
fn refutes(mk: &Masks, covers: &[u64], memo: &mut HashMap<(u64, usize), bool>, s: u64, att: (usize, usize), depth: usize) -> bool {
    let (u, v) = att;
    covers
        .iter()
        .filter(|&&t| mk.can_defend(s, t, u, v))
        .all(|&t| attacker_wins_from(mk, covers, memo, t, depth - 1))
}

/// Whether the attacker wins from `c` within `depth` rounds.
pub fn attacker_wins(g: &GridGraph, c: &GuardConfig, depth: usize) -> Result<bool> {
    let mk = minimax_masks(g)?;
    if !c.is_cover(g) {
        return Err(EvcError::NotACover);
    }
    let covers = covers_of_size(&mk, g.n(), c.len());
    Ok(attacker_wins_from(&mk, &covers, &mut HashMap::new(), to_mask(c), depth))
}

/// Size-`k` covers of `g`, as configurations.
pub fn all_covers(g: &GridGraph, k: usize) -> Result<Vec<GuardConfig>> {
    let mk = minimax_masks(g)?;
    Ok(covers_of_size(&mk, g.n(), k).into_iter().map(|m| GuardConfig::from_indices(g, bits(m))).collect())
}
