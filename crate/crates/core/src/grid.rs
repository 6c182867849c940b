//! Regular lattices, their finite rectangular restrictions and toroidal wraps.
//!
//! Vertices carry integer lattice coordinates. Every graph keeps its vertices
//! in canonical (lexicographic) order, and all indices handed out by this
//! module refer to that order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EvcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(i32, i32)", from = "(i32, i32)")]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Coord { x, y }
    }
}

impl From<(i32, i32)> for Coord {
    fn from((x, y): (i32, i32)) -> Self {
        Coord { x, y }
    }
}

impl From<Coord> for (i32, i32) {
    fn from(c: Coord) -> Self {
        (c.x, c.y)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Hex3,
    Square4,
    Tri6,
    Oct8,
    /// Oracle-only: the path on `n` vertices.
    Path,
    /// Oracle-only: the cycle on `n` vertices.
    Cycle,
}

impl GridKind {
    pub const LATTICES: [GridKind; 4] = [GridKind::Hex3, GridKind::Square4, GridKind::Tri6, GridKind::Oct8];

    /// Degree of every vertex of the infinite lattice.
    pub fn degree(self) -> usize {
        match self {
            GridKind::Hex3 => 3,
            GridKind::Square4 => 4,
            GridKind::Tri6 => 6,
            GridKind::Oct8 => 8,
            GridKind::Path | GridKind::Cycle => 2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            GridKind::Hex3 => "hex3",
            GridKind::Square4 => "square4",
            GridKind::Tri6 => "tri6",
            GridKind::Oct8 => "oct8",
            GridKind::Path => "path",
            GridKind::Cycle => "cycle",
        }
    }

    pub fn is_lattice(self) -> bool {
        !matches!(self, GridKind::Path | GridKind::Cycle)
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for GridKind {
    type Err = EvcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hex3" | "hex" | "t3" => Ok(GridKind::Hex3),
            "square4" | "square" | "t4" => Ok(GridKind::Square4),
            "tri6" | "tri" | "t6" => Ok(GridKind::Tri6),
            "oct8" | "oct" | "king" | "t8" => Ok(GridKind::Oct8),
            "path" => Ok(GridKind::Path),
            "cycle" => Ok(GridKind::Cycle),
            other => Err(EvcError::DegenerateParameters(format!("unknown grid kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    FiniteRect,
    Torus,
}

impl Topology {
    pub fn tag(self) -> &'static str {
        match self {
            Topology::FiniteRect => "finite-rect",
            Topology::Torus => "torus",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Topology {
    type Err = EvcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "finite-rect" | "finite" | "rect" => Ok(Topology::FiniteRect),
            "torus" => Ok(Topology::Torus),
            other => Err(EvcError::DegenerateParameters(format!("unknown topology `{other}`"))),
        }
    }
}

/// Neighbors of `v` on the infinite lattice of the given kind.
///
/// Path and Cycle are treated as the infinite path along the x axis.
pub fn build_infinite_adjacency(kind: GridKind, v: Coord) -> Vec<Coord> {
    let Coord { x, y } = v;
    let c = Coord::new;
    match kind {
        GridKind::Hex3 => {
            let slant = match y.rem_euclid(4) {
                0 => c(x + 1, y + 1),
                1 => c(x - 1, y - 1),
                2 => c(x - 1, y + 1),
                _ => c(x + 1, y - 1),
            };
            vec![c(x, y + 1), c(x, y - 1), slant]
        }
        GridKind::Square4 => vec![c(x + 1, y), c(x - 1, y), c(x, y + 1), c(x, y - 1)],
        GridKind::Tri6 => vec![
            c(x + 1, y),
            c(x - 1, y),
            c(x, y + 1),
            c(x, y - 1),
            c(x - 1, y - 1),
            c(x + 1, y + 1),
        ],
        GridKind::Oct8 => vec![
            c(x + 1, y),
            c(x - 1, y),
            c(x, y + 1),
            c(x, y - 1),
            c(x - 1, y - 1),
            c(x + 1, y + 1),
            c(x - 1, y + 1),
            c(x + 1, y - 1),
        ],
        GridKind::Path | GridKind::Cycle => vec![c(x + 1, y), c(x - 1, y)],
    }
}

/// An immutable simple undirected graph with lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph {
    kind: GridKind,
    h: usize,
    w: usize,
    topology: Topology,
    vertices: Vec<Coord>,
    index: HashMap<Coord, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl GridGraph {
    /// Assembles a graph from coordinates and coordinate edges. Vertices are
    /// sorted, edges canonicalized and deduplicated.
    fn assemble(
        kind: GridKind,
        h: usize,
        w: usize,
        topology: Topology,
        vertices: BTreeSet<Coord>,
        edges: BTreeSet<(Coord, Coord)>,
    ) -> Self {
        let vertices: Vec<Coord> = vertices.into_iter().collect();
        let index: HashMap<Coord, usize> = vertices.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let (i, j) = (index[&a], index[&b]);
            adj[i].push(j);
            adj[j].push(i);
            idx_edges.push((i.min(j), i.max(j)));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        idx_edges.sort_unstable();
        GridGraph { kind, h, w, topology, vertices, index, adj, edges: idx_edges }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Coord] {
        &self.vertices
    }

    pub fn coord(&self, i: usize) -> Coord {
        self.vertices[i]
    }

    pub fn index_of(&self, c: Coord) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn try_index(&self, c: Coord) -> Result<usize> {
        self.index_of(c).ok_or(EvcError::UnknownVertex(c))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Closed-neighborhood test: `j == i` or `j` adjacent to `i`.
    pub fn in_closed_neighborhood(&self, i: usize, j: usize) -> bool {
        i == j || self.has_edge(i, j)
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n()];
        for s in 0..self.n() {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        stack.push(u);
                    } else if color[u] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            kind: self.kind,
            h: self.h,
            w: self.w,
            topology: self.topology,
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|&(i, j)| (self.vertices[i], self.vertices[j])).collect(),
        }
    }
}

/// Wire form of a graph, vertices and edges in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub kind: GridKind,
    pub h: usize,
    pub w: usize,
    pub topology: Topology,
    pub vertices: Vec<Coord>,
    pub edges: Vec<(Coord, Coord)>,
}

fn canonical_pair(a: Coord, b: Coord) -> (Coord, Coord) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_finite_params(kind: GridKind, h: usize, w: usize) -> Result<()> {
    if !kind.is_lattice() {
        return Err(EvcError::DegenerateParameters(format!("{kind} is not a lattice kind")));
    }
    if h < 2 || w < 2 {
        return Err(EvcError::DegenerateParameters(format!("{kind} grid needs h, w >= 2 (got {h}x{w})")));
    }
    if kind == GridKind::Hex3 && (h < 4 || !h.is_multiple_of(2)) {
        return Err(EvcError::DegenerateParameters(format!("hex3 grid needs even h >= 4 (got {h})")));
    }
    Ok(())
}

/// Finite `h x w` rectangular restriction of a lattice.
///
/// All integer points of `[0, w-1] x [0, h-1]` are taken, edges induced, and
/// vertices of degree at most one removed until none remain. For the octagonal
/// grid the restriction is computed on the planar (triangular) subgraph and
/// both diagonal families are restored among retained vertices afterwards.
pub fn build_finite(kind: GridKind, h: usize, w: usize) -> Result<GridGraph> {
    check_finite_params(kind, h, w)?;
    let planar = if kind == GridKind::Oct8 { GridKind::Tri6 } else { kind };

    let mut alive: BTreeSet<Coord> = BTreeSet::new();
    for x in 0..w as i32 {
        for y in 0..h as i32 {
            alive.insert(Coord::new(x, y));
        }
    }
    loop {
        let doomed: Vec<Coord> = alive
            .iter()
            .copied()
            .filter(|&v| build_infinite_adjacency(planar, v).iter().filter(|u| alive.contains(u)).count() <= 1)
            .collect();
        if doomed.is_empty() {
            break;
        }
        for v in doomed {
            alive.remove(&v);
        }
    }
    if alive.is_empty() {
        return Err(EvcError::DegenerateParameters(format!("{kind} {h}x{w} prunes to nothing")));
    }

    let min_x = alive.iter().map(|c| c.x).min().unwrap_or(0);
    let min_y = alive.iter().map(|c| c.y).min().unwrap_or(0);
    // Shifting y would change the 4-periodic hexagonal slant phase.
    debug_assert!(kind != GridKind::Hex3 || min_y == 0);
    let shift = |c: Coord| Coord::new(c.x - min_x, c.y - min_y);

    let mut edges = BTreeSet::new();
    for &v in &alive {
        for u in build_infinite_adjacency(kind, v) {
            if alive.contains(&u) {
                edges.insert(canonical_pair(shift(v), shift(u)));
            }
        }
    }
    let vertices = alive.into_iter().map(shift).collect();
    Ok(GridGraph::assemble(kind, h, w, Topology::FiniteRect, vertices, edges))
}

/// `h x w` torus: infinite adjacency with coordinates taken mod `w` and `h`.
pub fn build_torus(kind: GridKind, h: usize, w: usize) -> Result<GridGraph> {
    if !kind.is_lattice() {
        return Err(EvcError::DegenerateParameters(format!("{kind} has no torus form")));
    }
    if h < 3 || w < 3 {
        return Err(EvcError::DegenerateParameters(format!("torus needs h, w >= 3 (got {h}x{w})")));
    }
    if kind == GridKind::Hex3 && !h.is_multiple_of(4) {
        return Err(EvcError::DegenerateParameters(format!("hex3 torus needs h divisible by 4 (got {h})")));
    }
    let (hi, wi) = (h as i32, w as i32);
    let wrap = |c: Coord| Coord::new(c.x.rem_euclid(wi), c.y.rem_euclid(hi));
    let mut vertices = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for x in 0..wi {
        for y in 0..hi {
            let v = Coord::new(x, y);
            vertices.insert(v);
            for u in build_infinite_adjacency(kind, v) {
                edges.insert(canonical_pair(v, wrap(u)));
            }
        }
    }
    let g = GridGraph::assemble(kind, h, w, Topology::Torus, vertices, edges);
    if (0..g.n()).any(|i| g.degree(i) != kind.degree()) {
        return Err(EvcError::DegenerateParameters(format!("{kind} torus {h}x{w} is not {}-regular", kind.degree())));
    }
    Ok(g)
}

/// Path (`n >= 2`) or cycle (`n >= 3`) on vertices `(i, 0)`.
pub fn build_oracle(kind: GridKind, n: usize) -> Result<GridGraph> {
    let (min, topology) = match kind {
        GridKind::Path => (2, Topology::FiniteRect),
        GridKind::Cycle => (3, Topology::Torus),
        other => return Err(EvcError::DegenerateParameters(format!("{other} is not an oracle kind"))),
    };
    if n < min {
        return Err(EvcError::DegenerateParameters(format!("{kind} needs n >= {min} (got {n})")));
    }
    let vertices: BTreeSet<Coord> = (0..n as i32).map(|i| Coord::new(i, 0)).collect();
    let mut edges: BTreeSet<(Coord, Coord)> =
        (0..n as i32 - 1).map(|i| (Coord::new(i, 0), Coord::new(i + 1, 0))).collect();
    if kind == GridKind::Cycle {
        edges.insert((Coord::new(0, 0), Coord::new(n as i32 - 1, 0)));
    }
    Ok(GridGraph::assemble(kind, 1, n, topology, vertices, edges))
}

/// Builds any instance; `n` for oracle kinds is taken from `w`.
pub fn build(kind: GridKind, h: usize, w: usize, topology: Topology) -> Result<GridGraph> {
    match (kind, topology) {
        (GridKind::Path | GridKind::Cycle, _) => build_oracle(kind, w),
        (_, Topology::FiniteRect) => build_finite(kind, h, w),
        (_, Topology::Torus) => build_torus(kind, h, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[(i32, i32)]) -> BTreeSet<Coord> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn infinite_adjacency_examples() {
        let o = Coord::new(0, 0);
        let got: BTreeSet<_> = build_infinite_adjacency(GridKind::Square4, o).into_iter().collect();
        assert_eq!(got, set(&[(1, 0), (-1, 0), (0, 1), (0, -1)]));
        let got: BTreeSet<_> = build_infinite_adjacency(GridKind::Tri6, o).into_iter().collect();
        assert_eq!(got, set(&[(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)]));
        let got: BTreeSet<_> = build_infinite_adjacency(GridKind::Hex3, o).into_iter().collect();
        assert_eq!(got, set(&[(0, 1), (0, -1), (1, 1)]));
    }

    #[test]
    fn infinite_adjacency_is_symmetric() {
        for kind in GridKind::LATTICES {
            for x in -5..5 {
                for y in -9..9 {
                    let v = Coord::new(x, y);
                    let nb = build_infinite_adjacency(kind, v);
                    assert_eq!(nb.iter().collect::<BTreeSet<_>>().len(), kind.degree());
                    for u in nb {
                        assert!(build_infinite_adjacency(kind, u).contains(&v), "{kind} {v} {u}");
                    }
                }
            }
        }
    }

    #[test]
    fn finite_examples() {
        let g = build_finite(GridKind::Square4, 2, 3).unwrap();
        assert_eq!((g.n(), g.m()), (6, 7));
        let g = build_finite(GridKind::Oct8, 2, 2).unwrap();
        assert_eq!((g.n(), g.m()), (4, 6));
        let g = build_finite(GridKind::Hex3, 4, 2).unwrap();
        assert_eq!((g.n(), g.m()), (6, 6));
        assert!((0..6).all(|i| g.degree(i) == 2));
    }

    #[test]
    fn square_counts() {
        for h in 2..=8 {
            for w in 2..=8 {
                let g = build_finite(GridKind::Square4, h, w).unwrap();
                assert_eq!(g.n(), h * w);
                assert_eq!(g.m(), 2 * w * h - h - w);
            }
        }
    }

    #[test]
    fn hex_two_columns() {
        for h in (4..=20).step_by(2) {
            let g = build_finite(GridKind::Hex3, h, 2).unwrap();
            assert_eq!(g.n(), 2 * (h - 1), "h={h}");
        }
    }

    #[test]
    fn finite_has_no_low_degree_vertices() {
        for kind in GridKind::LATTICES {
            for h in 2..=8 {
                for w in 2..=8 {
                    let Ok(g) = build_finite(kind, h, w) else { continue };
                    assert!((0..g.n()).all(|i| g.degree(i) >= 2), "{kind} {h}x{w}");
                    assert_eq!(g.coord(0), Coord::new(0, 0));
                }
            }
        }
    }

    #[test]
    fn degenerate_rejected() {
        assert!(build_finite(GridKind::Square4, 1, 5).is_err());
        assert!(build_finite(GridKind::Tri6, 4, 1).is_err());
        assert!(build_finite(GridKind::Hex3, 2, 4).is_err());
        assert!(build_finite(GridKind::Hex3, 5, 4).is_err());
        assert!(build_finite(GridKind::Hex3, 4, 1).is_err());
        assert!(build_torus(GridKind::Hex3, 6, 4).is_err());
        assert!(build_torus(GridKind::Square4, 2, 4).is_err());
        assert!(build_oracle(GridKind::Path, 1).is_err());
        assert!(build_oracle(GridKind::Cycle, 2).is_err());
        assert!(build_oracle(GridKind::Square4, 5).is_err());
    }

    #[test]
    fn torus_examples() {
        let g = build_torus(GridKind::Square4, 4, 4).unwrap();
        assert_eq!((g.n(), g.m()), (16, 32));
        let g = build_torus(GridKind::Tri6, 3, 3).unwrap();
        assert_eq!((g.n(), g.m()), (9, 27));
        let g = build_torus(GridKind::Hex3, 4, 4).unwrap();
        assert_eq!((g.n(), g.m()), (16, 24));
    }

    #[test]
    fn torus_is_regular() {
        for kind in GridKind::LATTICES {
            for h in 3..=12 {
                for w in 3..=12 {
                    let Ok(g) = build_torus(kind, h, w) else { continue };
                    assert!((0..g.n()).all(|i| g.degree(i) == kind.degree()));
                }
            }
        }
    }

    #[test]
    fn oracle_graphs() {
        let g = build_oracle(GridKind::Path, 2).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        let g = build_oracle(GridKind::Cycle, 3).unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        let g = build_oracle(GridKind::Path, 5).unwrap();
        assert_eq!(g.m(), 4);
    }

    #[test]
    fn json_is_canonical() {
        let g = build_finite(GridKind::Tri6, 2, 2).unwrap();
        let s = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"tri6","h":2,"w":2,"topology":"finite-rect","vertices":[[0,0],[0,1],[1,0],[1,1]],"edges":[[[0,0],[0,1]],[[0,0],[1,0]],[[0,0],[1,1]],[[0,1],[1,1]],[[1,0],[1,1]]]}"#
        );
    }
}
