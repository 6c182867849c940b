//! Two-phase tiling defense on finite triangular grids.
//!
//! The block `[0, 3w') x [0, 3h')` (or `[0, 3w') x [0, 2)` on strips) is tiled;
//! the leftover stripes stay fully guarded. Inside the block phase `p` leaves
//! exactly the class `x + y = p (mod 3)` empty, and every attack flips phase.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::{AttackEvent, DefenseMove, GuardConfig};
use crate::grid::{Coord, GridGraph};

use super::{forced_matching, indefensible, StrategyKind};

/// Tile counts and leftover stripe widths for an `h x w` grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileLayout {
    pub h_tiles: usize,
    pub h_rest: usize,
    pub w_tiles: usize,
    pub w_rest: usize,
    /// Rows covered by tiles.
    pub tile_rows: usize,
}

pub fn tile_layout(h: usize, w: usize) -> TileLayout {
    let (w_tiles, w_rest) = (w / 3, w % 3);
    if h == 2 {
        TileLayout { h_tiles: 1, h_rest: 0, w_tiles, w_rest, tile_rows: 2 }
    } else {
        TileLayout { h_tiles: h / 3, h_rest: h % 3, w_tiles, w_rest, tile_rows: 3 * (h / 3) }
    }
}

impl TileLayout {
    /// Guards used by either phase.
    pub fn guards(&self) -> usize {
        if self.tile_rows == 2 {
            4 * self.w_tiles + 2 * self.w_rest
        } else {
            let (h1, h2, w1, w2) = (self.h_tiles, self.h_rest, self.w_tiles, self.w_rest);
            6 * h1 * w1 + 3 * h1 * w2 + 3 * w1 * h2 + h2 * w2
        }
    }

    fn in_block(&self, c: Coord) -> bool {
        (c.x as usize) < 3 * self.w_tiles && (c.y as usize) < self.tile_rows
    }
}

pub(super) fn phase_cover(g: &GridGraph, phase: u8) -> GuardConfig {
    let t = tile_layout(g.h(), g.w());
    GuardConfig::from_mask(
        g.vertices().iter().map(|&c| !t.in_block(c) || (c.x + c.y).rem_euclid(3) != phase as i32).collect(),
    )
}

pub(super) fn defend(g: &GridGraph, c: &GuardConfig, a: &AttackEvent, phase: u8) -> Result<DefenseMove> {
    if phase_cover(g, phase) != *c {
        return Err(indefensible(g, StrategyKind::TriTileOscillation, a, "guards left the phase cover"));
    }
    let target = phase_cover(g, 1 - phase);
    forced_matching(g, &c.indices(), &target.indices(), a.guarded, a.target)
        .map(DefenseMove::new)
        .ok_or_else(|| indefensible(g, StrategyKind::TriTileOscillation, a, "no phase-flipping move"))
}
