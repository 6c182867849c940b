#![allow(dead_code)]

use evc_core::game::{AttackEvent, GuardConfig};
use evc_core::GridGraph;

/// Tries every injective assignment of guards to target vertices.
pub fn brute_defense(g: &GridGraph, c: &GuardConfig, a: &AttackEvent, target: &GuardConfig) -> bool {
    let guards = c.indices();
    if guards.len() != target.len() || !target.contains(a.target) {
        return false;
    }
    let mut used = vec![false; g.n()];
    assign(g, &guards, 0, a, target, &mut used)
}

fn assign(g: &GridGraph, guards: &[usize], k: usize, a: &AttackEvent, target: &GuardConfig, used: &mut [bool]) -> bool {
    if k == guards.len() {
        return true;
    }
    let s = guards[k];
    for t in 0..g.n() {
        if used[t] || !target.contains(t) {
            continue;
        }
        let ok = if s == a.guarded { t == a.target } else { s == t || g.has_edge(s, t) };
        if ok {
            used[t] = true;
            if assign(g, guards, k + 1, a, target, used) {
                return true;
            }
            used[t] = false;
        }
    }
    false
}

/// Every subset of `0..n` of size `k`, as masks, for `n <= 16`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<bool>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Every buildable instance with at most `max_n` vertices.
pub fn graphs_up_to(max_n: usize) -> Vec<GridGraph> {
    use evc_core::grid::{build, build_oracle};
    use evc_core::{GridKind, Topology};
    let mut out = Vec::new();
    for kind in GridKind::LATTICES {
        for topo in [Topology::FiniteRect, Topology::Torus] {
            for h in 1..=max_n {
                for w in 1..=max_n {
                    if let Ok(g) = build(kind, h, w, topo) {
                        if g.n() <= max_n && g.m() > 0 {
                            out.push(g);
                        }
                    }
                }
            }
        }
    }
    for n in 2..=max_n {
        out.push(build_oracle(GridKind::Path, n).unwrap());
    }
    for n in 3..=max_n {
        out.push(build_oracle(GridKind::Cycle, n).unwrap());
    }
    out
}
