//! Exact eternal vertex cover numbers by greatest-fixpoint elimination.
//!
//! For a guard count `k` the candidates are all size-`k` vertex covers. A
//! candidate dies when some attack on it has no defense landing on a surviving
//! candidate. Whatever survives is closed under play: a defender certificate.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attackers::{Attacker, AttackerKind};
use crate::cover::{exact_alpha, masks};
use crate::error::{EvcError, Result};
use crate::game::{apply_round, legal_attacks, AttackEvent, DefenseMove, GuardConfig, RoundRecord};
use crate::grid::{Coord, GridGraph};
use crate::strategies::{Strategy, StrategyKind};

/// Default vertex cap for the fixpoint solver.
pub const EVC_CAP: usize = 16;

/// Surviving size-`k` configurations as bitmasks over the vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafeSet {
    pub k: usize,
    pub members: Vec<u64>,
}

impl SafeSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Closed neighborhoods and plain adjacency as masks.
pub(crate) struct Masks {
    adj: Vec<u64>,
    closed: Vec<u64>,
}

impl Masks {
    pub(crate) fn new(g: &GridGraph) -> Self {
        let adj = masks(g);
        let closed = adj.iter().enumerate().map(|(i, &m)| m | 1 << i).collect();
        Masks { adj, closed }
    }

    pub(crate) fn is_cover(&self, s: u64) -> bool {
        let mut out = !s & full(self.adj.len());
        while out != 0 {
            let v = out.trailing_zeros() as usize;
            out &= out - 1;
            if self.adj[v] & !s != 0 {
                return false;
            }
        }
        true
    }

    fn closed_of(&self, s: u64) -> u64 {
        bits(s).fold(0, |m, i| m | self.closed[i])
    }

    /// Attacks `(u, v)` with `u` guarded and `v` not, in edge order.
    pub(crate) fn attacks(&self, s: u64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in bits(s) {
            for v in bits(self.adj[u] & !s) {
                out.push((u, v));
            }
        }
        out.sort_unstable_by_key(|&(u, v)| (u.min(v), u.max(v)));
        out
    }

    /// Is there a move from `s` to `t` sending the guard on `u` to `v`?
    pub(crate) fn can_defend(&self, s: u64, t: u64, u: usize, v: usize) -> bool {
        if t >> v & 1 == 0 {
            return false;
        }
        let left = s & !(1 << u);
        let right = t & !(1 << v);
        if right & !self.closed_of(left) != 0 || left & !self.closed_of(right) != 0 {
            return false;
        }
        let left: Vec<usize> = bits(left).collect();
        let mut owner = [usize::MAX; 64];
        for k in 0..left.len() {
            let mut seen = 0u64;
            if !self.kuhn(k, &left, right, &mut owner, &mut seen) {
                return false;
            }
        }
        true
    }

    fn kuhn(&self, k: usize, left: &[usize], right: u64, owner: &mut [usize; 64], seen: &mut u64) -> bool {
        let opts = self.closed[left[k]] & right & !*seen;
        for r in bits(opts) {
            *seen |= 1 << r;
            if owner[r] == usize::MAX || self.kuhn(owner[r], left, right, owner, seen) {
                owner[r] = k;
                return true;
            }
        }
        false
    }
}

fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

/// All `k`-subsets of `0..n` that are vertex covers, ascending.
pub(crate) fn covers_of_size(mk: &Masks, n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return if mk.is_cover(0) { vec![0] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut s: u64 = (1u64 << k) - 1;
    let limit = full(n);
    loop {
        if mk.is_cover(s) {
            out.push(s);
        }
        // Gosper's hack: next subset with the same popcount.
        let c = s & s.wrapping_neg();
        let r = s.wrapping_add(c);
        if r == 0 || r & !limit != 0 {
            break;
        }
        s = (((r ^ s) >> 2) / c) | r;
        if s & !limit != 0 {
            break;
        }
    }
    out
}

/// Greatest fixpoint for `k` guards. `reverse` flips the candidate scan order
/// (the result must not depend on it).
pub fn greatest_fixpoint(g: &GridGraph, k: usize, reverse: bool) -> Result<SafeSet> {
    if g.n() > 64 {
        return Err(EvcError::TooLarge { n: g.n(), cap: 64 });
    }
    let mk = Masks::new(g);
    let mut configs = covers_of_size(&mk, g.n(), k);
    if reverse {
        configs.reverse();
    }
    // Candidates containing each vertex, in scan order.
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, &s) in configs.iter().enumerate() {
        for v in bits(s) {
            by_vertex[v].push(i);
        }
    }
    let attacks: Vec<Vec<(usize, usize)>> = configs.iter().map(|&s| mk.attacks(s)).collect();

    let scan = |i: usize, (u, v): (usize, usize), from: usize, alive: &[bool]| -> Option<usize> {
        let list = &by_vertex[v];
        (from..list.len()).find(|&p| alive[list[p]] && mk.can_defend(configs[i], configs[list[p]], u, v))
    };

    let mut alive = vec![true; configs.len()];
    // cursor[i][a]: position in by_vertex[v] of the current witness.
    let initial: Vec<Vec<Option<usize>>> = (0..configs.len())
        .into_par_iter()
        .map(|i| attacks[i].iter().map(|&att| scan(i, att, 0, &alive)).collect())
        .collect();

    let mut dependents: Vec<Vec<(usize, usize)>> = vec![Vec::new(); configs.len()];
    let mut cursor: Vec<Vec<usize>> = Vec::with_capacity(configs.len());
    let mut queue = Vec::new();
    for (i, row) in initial.into_iter().enumerate() {
        let mut cur = Vec::with_capacity(row.len());
        for (a, found) in row.into_iter().enumerate() {
            match found {
                Some(p) => {
                    dependents[by_vertex[attacks[i][a].1][p]].push((i, a));
                    cur.push(p);
                }
                None => cur.push(usize::MAX),
            }
        }
        if cur.contains(&usize::MAX) {
            queue.push(i);
        }
        cursor.push(cur);
    }

    while let Some(dead) = queue.pop() {
        if !alive[dead] {
            continue;
        }
        alive[dead] = false;
        for (i, a) in std::mem::take(&mut dependents[dead]) {
            if !alive[i] {
                continue;
            }
            let att = attacks[i][a];
            match scan(i, att, cursor[i][a] + 1, &alive) {
                Some(p) => {
                    cursor[i][a] = p;
                    dependents[by_vertex[att.1][p]].push((i, a));
                }
                None => queue.push(i),
            }
        }
    }

    let mut members: Vec<u64> = configs.iter().zip(&alive).filter_map(|(&s, &ok)| ok.then_some(s)).collect();
    members.sort_unstable();
    Ok(SafeSet { k, members })
}

/// Smallest `k` in `[alpha, min(k_max, 2 alpha)]` with a nonempty greatest
/// fixpoint, for graphs with at most `cap` vertices.
pub fn exact_alpha_inf_with_cap(g: &GridGraph, k_max: usize, cap: usize) -> Result<(usize, SafeSet)> {
    if g.n() > cap.min(64) {
        return Err(EvcError::TooLarge { n: g.n(), cap: cap.min(64) });
    }
    let alpha = exact_alpha(g)?.size;
    let hi = k_max.min(2 * alpha).min(g.n());
    for k in alpha..=hi {
        let safe = greatest_fixpoint(g, k, false)?;
        if !safe.is_empty() {
            return Ok((k, safe));
        }
    }
    Err(EvcError::NoneFound { k_max })
}

pub fn exact_alpha_inf(g: &GridGraph, k_max: usize) -> Result<(usize, SafeSet)> {
    exact_alpha_inf_with_cap(g, k_max, EVC_CAP)
}

/// Re-checks closure of a safe set: every member is a size-`k` cover, and
/// every attack on a member has a defense landing inside the set.
pub fn verify_safe_set(g: &GridGraph, safe: &SafeSet) -> bool {
    let mk = Masks::new(g);
    safe.members.iter().all(|&s| {
        s.count_ones() as usize == safe.k
            && mk.is_cover(s)
            && mk
                .attacks(s)
                .into_iter()
                .all(|(u, v)| safe.members.iter().any(|&t| mk.can_defend(s, t, u, v)))
    })
}

/// `solve-evc` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvcReport {
    pub alpha: usize,
    pub alpha_inf: usize,
    pub safe_count: usize,
    pub elapsed_ms: u64,
}

pub fn solve_report(g: &GridGraph, k_max: Option<usize>, cap: usize) -> Result<EvcReport> {
    let start = Instant::now();
    let alpha = exact_alpha(g)?.size;
    let (alpha_inf, safe) = exact_alpha_inf_with_cap(g, k_max.unwrap_or(2 * alpha), cap)?;
    Ok(EvcReport { alpha, alpha_inf, safe_count: safe.len(), elapsed_ms: start.elapsed().as_millis() as u64 })
}

/// Converts a safe-set member to vertex indices.
pub fn mask_indices(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

/// One failed round found while certifying a strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertFailure {
    /// `sweep`, or the attacker tag for the played rounds.
    pub stage: String,
    /// Zero-based round within the stage.
    pub round: usize,
    pub attack: (Coord, Coord),
    pub error: String,
    /// Every round played before the failure, starting from the initial cover.
    pub trace: Vec<RoundRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertReport {
    pub strategy: StrategyKind,
    pub attacker: AttackerKind,
    pub seed: u64,
    pub guards: usize,
    pub sweep_attacks: usize,
    pub rounds: usize,
    pub rounds_survived: usize,
    pub failures: Vec<CertFailure>,
}

impl CertReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn play(
    g: &GridGraph,
    strat: &mut Strategy,
    c: &GuardConfig,
    a: &AttackEvent,
) -> std::result::Result<(DefenseMove, GuardConfig), EvcError> {
    let m = strat.defend(g, c, a)?;
    let next = apply_round(g, c, a, &m)?;
    Ok((m, next))
}

fn failure(
    g: &GridGraph,
    stage: &str,
    round: usize,
    a: &AttackEvent,
    err: EvcError,
    history: &[(AttackEvent, DefenseMove, GuardConfig)],
) -> CertFailure {
    CertFailure {
        stage: stage.into(),
        round,
        attack: (g.coord(a.guarded), g.coord(a.target)),
        error: err.to_string(),
        trace: history.iter().map(|(a, m, c)| RoundRecord::new(g, a, m, c)).collect(),
    }
}

/// Runs `strat` through every legal attack on its initial cover, then through
/// `rounds` seeded random attacks. Random play stops at the first failure.
pub fn certify_strategy(g: &GridGraph, strat: StrategyKind, rounds: usize, seed: u64) -> Result<CertReport> {
    certify_against(g, strat, rounds, AttackerKind::UniformRandom { seed })
}

/// Like [`certify_strategy`], with `attacker` choosing the played rounds.
pub fn certify_against(g: &GridGraph, strat: StrategyKind, rounds: usize, attacker: AttackerKind) -> Result<CertReport> {
    let seed = match attacker {
        AttackerKind::UniformRandom { seed } => seed,
        _ => 0,
    };
    let fresh = Strategy::new(strat, g)?;
    let start = fresh.initial_config(g);
    let mut failures = Vec::new();

    let sweep = legal_attacks(g, &start)?;
    for (i, a) in sweep.iter().enumerate() {
        if let Err(e) = play(g, &mut fresh.clone(), &start, a) {
            failures.push(failure(g, "sweep", i, a, e, &[]));
        }
    }

    let kind = attacker;
    let mut attacker = Attacker::new(kind);
    let mut s = fresh;
    let mut c = start.clone();
    let mut history = Vec::new();
    let mut survived = 0;
    for round in 0..rounds {
        let a = match attacker.next_attack(g, &c) {
            Ok(a) => a,
            Err(EvcError::NoLegalAttack) => {
                survived = rounds;
                break;
            }
            Err(e) => return Err(e),
        };
        match play(g, &mut s, &c, &a) {
            Ok((m, next)) => {
                history.push((a, m, next.clone()));
                c = next;
                survived = round + 1;
            }
            Err(e) => {
                failures.push(failure(g, kind.tag(), round, &a, e, &history));
                break;
            }
        }
    }

    Ok(CertReport {
        strategy: strat,
        attacker: kind,
        seed,
        guards: start.len(),
        sweep_attacks: sweep.len(),
        rounds,
        rounds_survived: survived,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_finite, build_oracle, GridKind};

    fn ainf(g: &GridGraph) -> usize {
        exact_alpha_inf(g, g.n()).unwrap().0
    }

    #[test]
    fn literature_examples() {
        assert_eq!(ainf(&build_oracle(GridKind::Path, 4).unwrap()), 3);
        assert_eq!(ainf(&build_oracle(GridKind::Cycle, 4).unwrap()), 2);
        assert_eq!(ainf(&build_finite(GridKind::Tri6, 2, 2).unwrap()), 3);
        assert_eq!(ainf(&build_finite(GridKind::Square4, 3, 3).unwrap()), 5);
    }

    #[test]
    fn gosper_enumerates_binomials() {
        let g = build_oracle(GridKind::Path, 6).unwrap();
        let mk = Masks::new(&g);
        let all: Vec<u64> = (0u64..64).filter(|s| s.count_ones() == 3 && mk.is_cover(*s)).collect();
        assert_eq!(covers_of_size(&mk, 6, 3), all);
        assert_eq!(covers_of_size(&mk, 6, 6), vec![63]);
    }

    #[test]
    fn reverse_order_gives_same_fixpoint() {
        for g in [
            build_finite(GridKind::Square4, 2, 3).unwrap(),
            build_finite(GridKind::Tri6, 2, 3).unwrap(),
            build_oracle(GridKind::Path, 6).unwrap(),
        ] {
            for k in 1..=g.n() {
                let a = greatest_fixpoint(&g, k, false).unwrap();
                let b = greatest_fixpoint(&g, k, true).unwrap();
                assert_eq!(a, b);
                assert!(verify_safe_set(&g, &a));
            }
        }
    }

    #[test]
    fn too_large() {
        let g = build_finite(GridKind::Square4, 5, 5).unwrap();
        assert!(matches!(exact_alpha_inf(&g, 25), Err(EvcError::TooLarge { .. })));
    }

    #[test]
    fn none_found_below_alpha_inf() {
        let g = build_oracle(GridKind::Path, 5).unwrap();
        assert_eq!(exact_alpha_inf(&g, 3), Err(EvcError::NoneFound { k_max: 3 }));
    }
}
