//! Guard configurations, attacks and defense moves.

use serde::{Deserialize, Serialize};

use crate::cover::uncovered_edge;
use crate::error::{EvcError, Result};
use crate::grid::{Coord, GridGraph};
use crate::matching::hopcroft_karp;

/// A set of guarded vertices, indexed by the graph's canonical vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuardConfig {
    guarded: Vec<bool>,
}

impl GuardConfig {
    pub fn empty(g: &GridGraph) -> Self {
        GuardConfig { guarded: vec![false; g.n()] }
    }

    pub fn full(g: &GridGraph) -> Self {
        GuardConfig { guarded: vec![true; g.n()] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        GuardConfig { guarded: mask }
    }

    pub fn from_indices(g: &GridGraph, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut guarded = vec![false; g.n()];
        for i in indices {
            guarded[i] = true;
        }
        GuardConfig { guarded }
    }

    pub fn from_coords(g: &GridGraph, coords: impl IntoIterator<Item = Coord>) -> Result<Self> {
        let mut guarded = vec![false; g.n()];
        for c in coords {
            guarded[g.try_index(c)?] = true;
        }
        Ok(GuardConfig { guarded })
    }

    pub fn contains(&self, i: usize) -> bool {
        self.guarded[i]
    }

    pub fn len(&self) -> usize {
        self.guarded.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mask(&self) -> &[bool] {
        &self.guarded
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.guarded.len()).filter(|&i| self.guarded[i]).collect()
    }

    pub fn coords(&self, g: &GridGraph) -> Vec<Coord> {
        self.indices().into_iter().map(|i| g.coord(i)).collect()
    }

    pub fn is_cover(&self, g: &GridGraph) -> bool {
        uncovered_edge(g, &self.guarded).is_none()
    }
}

/// An attack on edge `{guarded, target}`; the guard on `guarded` must cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttackEvent {
    pub guarded: usize,
    pub target: usize,
}

impl AttackEvent {
    pub fn new(guarded: usize, target: usize) -> Self {
        AttackEvent { guarded, target }
    }

    /// Orients the edge `{a, b}` toward its unguarded endpoint.
    pub fn on_edge(g: &GridGraph, c: &GuardConfig, a: Coord, b: Coord) -> Result<Self> {
        let (i, j) = (g.try_index(a)?, g.try_index(b)?);
        if !g.has_edge(i, j) {
            return Err(EvcError::IllegalAttack(format!("{a}-{b} is not an edge")));
        }
        match (c.contains(i), c.contains(j)) {
            (true, false) | (true, true) => Ok(AttackEvent::new(i, j)),
            (false, true) => Ok(AttackEvent::new(j, i)),
            (false, false) => Err(EvcError::IllegalAttack(format!("{a}-{b} has no guarded endpoint"))),
        }
    }

    /// Canonical unordered edge.
    pub fn edge(&self) -> (usize, usize) {
        (self.guarded.min(self.target), self.guarded.max(self.target))
    }

    pub fn is_swap(&self, c: &GuardConfig) -> bool {
        c.contains(self.guarded) && c.contains(self.target)
    }
}

/// One-to-one relocation of every guard, as `(from, to)` sorted by `from`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DefenseMove {
    pub mapping: Vec<(usize, usize)>,
}

impl DefenseMove {
    pub fn new(mut mapping: Vec<(usize, usize)>) -> Self {
        mapping.sort_unstable();
        DefenseMove { mapping }
    }

    pub fn image(&self, g: &GridGraph) -> GuardConfig {
        GuardConfig::from_indices(g, self.mapping.iter().map(|&(_, t)| t))
    }

    /// Checks the move's legality against `c` and attack `a`.
    pub fn validate(&self, g: &GridGraph, c: &GuardConfig, a: &AttackEvent) -> Result<()> {
        let domain: Vec<usize> = self.mapping.iter().map(|&(s, _)| s).collect();
        if domain != c.indices() {
            return Err(EvcError::IllegalMove("domain differs from the guarded set".into()));
        }
        let mut hit = vec![false; g.n()];
        for &(s, t) in &self.mapping {
            if t >= g.n() {
                return Err(EvcError::IllegalMove(format!("target index {t} out of range")));
            }
            if hit[t] {
                return Err(EvcError::IllegalMove(format!("two guards sent to {}", g.coord(t))));
            }
            hit[t] = true;
            if s == a.guarded {
                if t != a.target {
                    return Err(EvcError::IllegalMove(format!(
                        "guard on {} must cross to {}",
                        g.coord(s),
                        g.coord(a.target)
                    )));
                }
            } else if !g.in_closed_neighborhood(s, t) {
                return Err(EvcError::IllegalMove(format!("{} -> {} is not a step", g.coord(s), g.coord(t))));
            }
        }
        Ok(())
    }

    pub fn to_coords(&self, g: &GridGraph) -> Vec<(Coord, Coord)> {
        self.mapping.iter().map(|&(s, t)| (g.coord(s), g.coord(t))).collect()
    }
}

/// Edges with exactly one guarded endpoint, in canonical edge order.
pub fn legal_attacks(g: &GridGraph, c: &GuardConfig) -> Result<Vec<AttackEvent>> {
    if !c.is_cover(g) {
        return Err(EvcError::NotACover);
    }
    Ok(g.edges()
        .iter()
        .filter_map(|&(i, j)| match (c.contains(i), c.contains(j)) {
            (true, false) => Some(AttackEvent::new(i, j)),
            (false, true) => Some(AttackEvent::new(j, i)),
            _ => None,
        })
        .collect())
}

/// The swap answer to an attack on a fully guarded edge.
pub fn swap_move(c: &GuardConfig, a: &AttackEvent) -> DefenseMove {
    DefenseMove::new(
        c.indices()
            .into_iter()
            .map(|s| match s {
                s if s == a.guarded => (s, a.target),
                s if s == a.target => (s, a.guarded),
                s => (s, s),
            })
            .collect(),
    )
}

/// A move from `c` onto exactly `target` that answers `a`, if one exists.
///
/// The attacked guard is pinned to `a.target`; the remaining guards need a
/// perfect matching onto the remaining targets under "stay or step".
pub fn defense_exists(
    g: &GridGraph,
    c: &GuardConfig,
    a: &AttackEvent,
    target: &GuardConfig,
) -> Result<Option<DefenseMove>> {
    let (guards, targets) = (c.len(), target.len());
    if guards != targets {
        return Err(EvcError::SizeMismatch { guards, target: targets });
    }
    if !c.contains(a.guarded) || !g.has_edge(a.guarded, a.target) {
        return Err(EvcError::IllegalAttack(format!(
            "{}-{} is not an attack on this configuration",
            g.coord(a.guarded),
            g.coord(a.target)
        )));
    }
    if !target.contains(a.target) {
        return Ok(None);
    }
    let left: Vec<usize> = c.indices().into_iter().filter(|&s| s != a.guarded).collect();
    let right: Vec<usize> = target.indices().into_iter().filter(|&t| t != a.target).collect();
    let mut pos = vec![usize::MAX; g.n()];
    for (k, &t) in right.iter().enumerate() {
        pos[t] = k;
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&s| {
            // Staying put is tried first, then neighbors in canonical order.
            std::iter::once(s)
                .chain(g.neighbors(s).iter().copied())
                .filter(|&t| pos[t] != usize::MAX)
                .map(|t| pos[t])
                .collect()
        })
        .collect();
    let m = hopcroft_karp(&adj, right.len());
    if !m.is_left_perfect() {
        return Ok(None);
    }
    let mut mapping: Vec<(usize, usize)> =
        left.iter().enumerate().map(|(k, &s)| (s, right[m.left_to_right[k]])).collect();
    mapping.push((a.guarded, a.target));
    Ok(Some(DefenseMove::new(mapping)))
}

/// Plays one round: validates `m` and returns the new configuration.
pub fn apply_round(g: &GridGraph, c: &GuardConfig, a: &AttackEvent, m: &DefenseMove) -> Result<GuardConfig> {
    m.validate(g, c, a)?;
    let image = m.image(g);
    if let Some((i, j)) = uncovered_edge(g, image.mask()) {
        return Err(EvcError::CoverBroken(g.coord(i), g.coord(j)));
    }
    Ok(image)
}

/// Wire form of one played round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// `[guarded endpoint, attacked endpoint]`.
    pub attack: (Coord, Coord),
    #[serde(rename = "move")]
    pub moves: Vec<(Coord, Coord)>,
    pub config_after: Vec<Coord>,
}

impl RoundRecord {
    pub fn new(g: &GridGraph, a: &AttackEvent, m: &DefenseMove, after: &GuardConfig) -> Self {
        RoundRecord {
            attack: (g.coord(a.guarded), g.coord(a.target)),
            moves: m.to_coords(g),
            config_after: after.coords(g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_finite, build_oracle, build_torus, GridKind};

    fn c(x: i32, y: i32) -> Coord {
        Coord::new(x, y)
    }

    #[test]
    fn legal_attack_examples() {
        let g = build_finite(GridKind::Square4, 2, 2).unwrap();
        let diag = GuardConfig::from_coords(&g, [c(0, 0), c(1, 1)]).unwrap();
        assert_eq!(legal_attacks(&g, &diag).unwrap().len(), 4);
        assert!(legal_attacks(&g, &GuardConfig::full(&g)).unwrap().is_empty());
        let p3 = build_oracle(GridKind::Path, 3).unwrap();
        let mid = GuardConfig::from_coords(&p3, [c(1, 0)]).unwrap();
        assert_eq!(legal_attacks(&p3, &mid).unwrap().len(), 2);
        let bad = GuardConfig::from_coords(&p3, [c(0, 0)]).unwrap();
        assert_eq!(legal_attacks(&p3, &bad), Err(EvcError::NotACover));
    }

    #[test]
    fn swap_on_fully_guarded_edge() {
        let g = build_finite(GridKind::Square4, 2, 2).unwrap();
        let full = GuardConfig::full(&g);
        let a = AttackEvent::new(0, 1);
        let m = defense_exists(&g, &full, &a, &full).unwrap().unwrap();
        assert!(m.mapping.contains(&(0, 1)) && m.mapping.contains(&(1, 0)));
        assert_eq!(apply_round(&g, &full, &a, &m).unwrap(), full);
        assert_eq!(apply_round(&g, &full, &a, &swap_move(&full, &a)).unwrap(), full);
    }

    #[test]
    fn single_guard_path() {
        let g = build_oracle(GridKind::Path, 3).unwrap();
        let cfg = GuardConfig::from_coords(&g, [c(1, 0)]).unwrap();
        let a = AttackEvent::on_edge(&g, &cfg, c(1, 0), c(0, 0)).unwrap();
        let target = GuardConfig::from_coords(&g, [c(0, 0)]).unwrap();
        let m = defense_exists(&g, &cfg, &a, &target).unwrap().unwrap();
        assert_eq!(m.to_coords(&g), vec![(c(1, 0), c(0, 0))]);
        // Defended, but the image leaves {1,2} uncovered.
        assert_eq!(apply_round(&g, &cfg, &a, &m), Err(EvcError::CoverBroken(c(1, 0), c(2, 0))));
    }

    #[test]
    fn tri_2x2_three_guards() {
        let g = build_finite(GridKind::Tri6, 2, 2).unwrap();
        let covers: Vec<GuardConfig> = (0..4)
            .map(|skip| GuardConfig::from_indices(&g, (0..4).filter(|&i| i != skip)))
            .filter(|s| s.is_cover(&g))
            .collect();
        for s in &covers {
            for a in legal_attacks(&g, s).unwrap() {
                let others: Vec<_> = covers.iter().filter(|t| t.contains(a.target)).collect();
                assert!(others.iter().any(|t| defense_exists(&g, s, &a, t).unwrap().is_some()));
            }
        }
    }

    #[test]
    fn shift_all_on_square_torus() {
        let g = build_torus(GridKind::Square4, 4, 4).unwrap();
        let even = GuardConfig::from_indices(&g, (0..16).filter(|&i| (g.coord(i).x + g.coord(i).y) % 2 == 0));
        let odd = GuardConfig::from_indices(&g, (0..16).filter(|&i| !even.contains(i)));
        let a = AttackEvent::on_edge(&g, &even, c(0, 0), c(1, 0)).unwrap();
        let m = DefenseMove::new(
            even.indices()
                .into_iter()
                .map(|s| {
                    let p = g.coord(s);
                    (s, g.index_of(c((p.x + 1) % 4, p.y)).unwrap())
                })
                .collect(),
        );
        assert_eq!(apply_round(&g, &even, &a, &m).unwrap(), odd);
    }

    #[test]
    fn illegal_moves() {
        let g = build_finite(GridKind::Square4, 2, 2).unwrap();
        let diag = GuardConfig::from_coords(&g, [c(0, 0), c(1, 1)]).unwrap();
        let a = AttackEvent::on_edge(&g, &diag, c(0, 0), c(0, 1)).unwrap();
        let (i01, i11) = (g.index_of(c(0, 1)).unwrap(), g.index_of(c(1, 1)).unwrap());
        let collide = DefenseMove::new(vec![(0, i01), (i11, i01)]);
        assert!(matches!(apply_round(&g, &diag, &a, &collide), Err(EvcError::IllegalMove(_))));
        let wrong = DefenseMove::new(vec![(0, 0), (i11, i01)]);
        assert!(matches!(apply_round(&g, &diag, &a, &wrong), Err(EvcError::IllegalMove(_))));
        let target = GuardConfig::from_coords(&g, [c(0, 1)]).unwrap();
        assert!(matches!(defense_exists(&g, &diag, &a, &target), Err(EvcError::SizeMismatch { .. })));
    }

    #[test]
    fn round_record_json() {
        let g = build_oracle(GridKind::Path, 2).unwrap();
        let cfg = GuardConfig::from_coords(&g, [c(0, 0)]).unwrap();
        let a = AttackEvent::new(0, 1);
        let m = DefenseMove::new(vec![(0, 1)]);
        let after = apply_round(&g, &cfg, &a, &m).unwrap();
        let s = serde_json::to_string(&RoundRecord::new(&g, &a, &m, &after)).unwrap();
        assert_eq!(s, r#"{"attack":[[0,0],[1,0]],"move":[[[0,0],[1,0]]],"config_after":[[1,0]]}"#);
    }
}
