//! Row-parity alternation on finite hexagonal grids.
//!
//! Guards always occupy one full color class (odd rows or even rows). Each
//! attack flips the class; the move is a perfect matching of the grid that
//! uses the attacked edge.

use crate::error::Result;
use crate::game::{AttackEvent, DefenseMove, GuardConfig};
use crate::grid::GridGraph;

use super::{forced_matching, indefensible, StrategyKind};

/// Vertices whose row has parity `p`.
pub(crate) fn parity_class(g: &GridGraph, p: u8) -> GuardConfig {
    GuardConfig::from_mask(g.vertices().iter().map(|c| c.y.rem_euclid(2) == p as i32).collect())
}

/// The row parity shared by every guard in every column, if the configuration
/// is exactly one color class.
pub fn column_parity(g: &GridGraph, c: &GuardConfig) -> Option<u8> {
    (0..2u8).find(|&p| parity_class(g, p) == *c)
}

pub(super) fn defend(g: &GridGraph, c: &GuardConfig, a: &AttackEvent, parity: u8) -> Result<DefenseMove> {
    let target = parity_class(g, 1 - parity);
    if parity_class(g, parity) != *c {
        return Err(indefensible(g, StrategyKind::HexCaseAnalysis, a, "guards left the parity class"));
    }
    forced_matching(g, &c.indices(), &target.indices(), a.guarded, a.target)
        .map(DefenseMove::new)
        .ok_or_else(|| indefensible(g, StrategyKind::HexCaseAnalysis, a, "no perfect matching uses the attacked edge"))
}
