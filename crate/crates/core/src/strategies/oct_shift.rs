//! Column shifting on finite octagonal (king) grids.
//!
//! Odd columns are always full. Every even column keeps its guard count and
//! never has two vertically adjacent empty cells. An attack touches one even
//! column `E` and a neighboring odd column `P`; only guards in those two
//! columns move.

use crate::error::Result;
use crate::game::{AttackEvent, DefenseMove, GuardConfig};
use crate::grid::{Coord, GridGraph};

use super::{forced_matching, indefensible, StrategyKind};

pub(super) fn initial(g: &GridGraph) -> GuardConfig {
    GuardConfig::from_mask(g.vertices().iter().map(|c| c.x % 2 == 1 || c.y % 2 == 0).collect())
}

fn column(g: &GridGraph, c: &GuardConfig, x: i32) -> Vec<bool> {
    (0..g.h() as i32).map(|y| g.index_of(Coord::new(x, y)).is_some_and(|i| c.contains(i))).collect()
}

/// Odd columns full; even columns hold at least `ceil(h/2)` guards with no
/// two adjacent empty cells.
pub fn column_invariant_holds(g: &GridGraph, c: &GuardConfig) -> bool {
    (0..g.w() as i32).all(|x| {
        let col = column(g, c, x);
        if x % 2 == 1 {
            col.iter().all(|&b| b)
        } else {
            col.windows(2).all(|p| p[0] || p[1]) && col.iter().filter(|&&b| b).count() >= g.h().div_ceil(2)
        }
    })
}

/// Row sets of size `k` containing `row`, without two adjacent missing rows,
/// nearest to `current` first.
fn candidates(current: &[bool], k: usize, row: usize) -> Vec<Vec<bool>> {
    fn go(h: usize, k: usize, row: usize, acc: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        let y = acc.len();
        let chosen = acc.iter().filter(|&&b| b).count();
        if y == h {
            if chosen == k {
                out.push(acc.clone());
            }
            return;
        }
        if chosen + (h - y) < k {
            return;
        }
        if chosen < k {
            acc.push(true);
            go(h, k, row, acc, out);
            acc.pop();
        }
        let prev_missing = y > 0 && !acc[y - 1];
        if y != row && !prev_missing {
            acc.push(false);
            go(h, k, row, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(current.len(), k, row, &mut Vec::new(), &mut out);
    let dist = |s: &Vec<bool>| s.iter().zip(current).filter(|(a, b)| a != b).count();
    out.sort_by(|a, b| dist(a).cmp(&dist(b)).then_with(|| b.cmp(a)));
    out
}

pub(super) fn defend(g: &GridGraph, c: &GuardConfig, a: &AttackEvent) -> Result<DefenseMove> {
    let fail = |why: &str| indefensible(g, StrategyKind::OctColumnShift, a, why);
    if !column_invariant_holds(g, c) {
        return Err(fail("column invariant broken"));
    }
    let (u, v) = (g.coord(a.guarded), g.coord(a.target));
    let e = v.x;
    let p = if u.x != e {
        u.x
    } else if e > 0 {
        e - 1
    } else {
        e + 1
    };
    let local = |i: &usize| {
        let x = g.coord(*i).x;
        x == e || x == p
    };
    let guards: Vec<usize> = c.indices().into_iter().filter(local).collect();
    let current = column(g, c, e);
    let k = current.iter().filter(|&&b| b).count();
    for rows in candidates(&current, k, v.y as usize) {
        let mut targets: Vec<usize> = (0..g.h() as i32)
            .filter_map(|y| g.index_of(Coord::new(p, y)))
            .chain(rows.iter().enumerate().filter(|(_, &b)| b).filter_map(|(y, _)| g.index_of(Coord::new(e, y as i32))))
            .collect();
        targets.sort_unstable();
        if let Some(local_moves) = forced_matching(g, &guards, &targets, a.guarded, a.target) {
            let mut mapping: Vec<(usize, usize)> = c.indices().into_iter().filter(|i| !local(i)).map(|i| (i, i)).collect();
            mapping.extend(local_moves);
            return Ok(DefenseMove::new(mapping));
        }
    }
    Err(fail("no column arrangement reachable"))
}
