//! Hamiltonian-cycle rotation on finite square grids.
//!
//! Guards sit on one color class. An attack on `u -> v` is answered by
//! rotating every guard one step along a Hamiltonian cycle through `uv`, which
//! lands them exactly on the other class. Edges lying on no Hamiltonian cycle
//! fall back to a perfect matching through the edge.

use std::collections::HashMap;

use crate::error::Result;
use crate::game::{AttackEvent, DefenseMove, GuardConfig};
use crate::grid::GridGraph;

use super::{forced_matching, indefensible, StrategyKind};

/// Search nodes spent per edge before giving up on a cycle.
const SEARCH_BUDGET: usize = 2_000_000;

pub(crate) fn parity_class(g: &GridGraph, p: u8) -> GuardConfig {
    GuardConfig::from_mask(g.vertices().iter().map(|c| (c.x + c.y).rem_euclid(2) == p as i32).collect())
}

struct Search<'a> {
    g: &'a GridGraph,
    head: usize,
    path: Vec<usize>,
    visited: Vec<bool>,
    budget: usize,
}

impl Search<'_> {
    fn available(&self, w: usize, last: usize) -> usize {
        self.g.neighbors(w).iter().filter(|&&x| !self.visited[x] || x == last || x == self.head).count()
    }

    fn dead_end(&self, last: usize) -> bool {
        (0..self.g.n()).any(|w| !self.visited[w] && self.available(w, last) < 2)
    }

    fn extend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let last = *self.path.last().expect("path is never empty");
        if self.path.len() == self.g.n() {
            return self.g.has_edge(last, self.head);
        }
        if self.dead_end(last) {
            return false;
        }
        let mut next: Vec<usize> = self.g.neighbors(last).iter().copied().filter(|&x| !self.visited[x]).collect();
        next.sort_by_key(|&x| (self.g.neighbors(x).iter().filter(|&&y| !self.visited[y]).count(), x));
        for x in next {
            self.visited[x] = true;
            self.path.push(x);
            if self.extend() {
                return true;
            }
            self.path.pop();
            self.visited[x] = false;
        }
        false
    }
}

/// A Hamiltonian cycle starting `i, j, ...`, if the bounded search finds one.
pub fn hamiltonian_cycle_through(g: &GridGraph, i: usize, j: usize) -> Option<Vec<usize>> {
    if !g.has_edge(i, j) || g.n() < 3 {
        return None;
    }
    let mut visited = vec![false; g.n()];
    visited[i] = true;
    visited[j] = true;
    let mut s = Search { g, head: i, path: vec![i, j], visited, budget: SEARCH_BUDGET };
    s.extend().then_some(s.path)
}

pub(super) fn defend(
    g: &GridGraph,
    c: &GuardConfig,
    a: &AttackEvent,
    parity: u8,
    cache: &mut HashMap<(usize, usize), Option<Vec<usize>>>,
) -> Result<DefenseMove> {
    if parity_class(g, parity) != *c {
        return Err(indefensible(g, StrategyKind::HamCycle, a, "guards left the color class"));
    }
    let (lo, hi) = a.edge();
    let cycle = cache.entry((lo, hi)).or_insert_with(|| hamiltonian_cycle_through(g, lo, hi));
    if let Some(cycle) = cycle {
        let n = cycle.len();
        let pos: HashMap<usize, usize> = cycle.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let forward = cycle[(pos[&a.guarded] + 1) % n] == a.target;
        let step = if forward { 1 } else { n - 1 };
        let mapping = c.indices().into_iter().map(|s| (s, cycle[(pos[&s] + step) % n])).collect();
        return Ok(DefenseMove::new(mapping));
    }
    let target = parity_class(g, 1 - parity);
    forced_matching(g, &c.indices(), &target.indices(), a.guarded, a.target)
        .map(DefenseMove::new)
        .ok_or_else(|| indefensible(g, StrategyKind::HamCycle, a, "edge lies on no perfect matching"))
}
