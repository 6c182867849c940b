//! Whole-pattern translation on tori.

use crate::cover::pattern;
use crate::error::Result;
use crate::game::{AttackEvent, DefenseMove, GuardConfig};
use crate::grid::{build_infinite_adjacency, Coord, GridGraph, GridKind};

use super::{indefensible, StrategyKind};

pub(super) fn initial(g: &GridGraph) -> GuardConfig {
    GuardConfig::from_mask(pattern(g.kind()).select_on(g))
}

/// Torus-reduced step from `a` to `b`, each component in `{-1, 0, 1}`.
fn step(g: &GridGraph, a: Coord, b: Coord) -> (i64, i64) {
    let wrap = |d: i32, m: usize| -> i64 {
        let d = (d as i64).rem_euclid(m as i64);
        if d == m as i64 - 1 {
            -1
        } else {
            d
        }
    };
    (wrap(b.x - a.x, g.w()), wrap(b.y - a.y, g.h()))
}

fn wrap(g: &GridGraph, c: Coord) -> Coord {
    Coord::new(c.x.rem_euclid(g.w() as i32), c.y.rem_euclid(g.h() as i32))
}

/// The unique slant neighbor of a hexagonal vertex.
fn slant(g: &GridGraph, c: Coord) -> Coord {
    let s = build_infinite_adjacency(GridKind::Hex3, c).into_iter().find(|n| n.x != c.x).expect("hex vertex has a slant edge");
    wrap(g, s)
}

/// Moves every guard by the attacked edge's direction. Returns the move and
/// the pattern displacement.
pub(super) fn defend(g: &GridGraph, c: &GuardConfig, a: &AttackEvent) -> Result<(DefenseMove, (i64, i64))> {
    let (u, v) = (g.coord(a.guarded), g.coord(a.target));
    let (dx, dy) = step(g, u, v);
    let slanted = g.kind() == GridKind::Hex3 && dx != 0;
    let mut mapping = Vec::with_capacity(c.len());
    for s in c.indices() {
        let p = g.coord(s);
        let q = if slanted { slant(g, p) } else { wrap(g, Coord::new(p.x + dx as i32, p.y + dy as i32)) };
        let t = g.index_of(q).ok_or_else(|| indefensible(g, StrategyKind::ShiftAll, a, "shift leaves the torus"))?;
        mapping.push((s, t));
    }
    let m = DefenseMove::new(mapping);
    m.validate(g, c, a).map_err(|e| indefensible(g, StrategyKind::ShiftAll, a, &e.to_string()))?;
    Ok((m, if slanted { (0, dy) } else { (dx, dy) }))
}
