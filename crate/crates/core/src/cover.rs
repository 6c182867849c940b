//! Periodic cover patterns, window densities and exact minimum vertex covers.

use serde::{Deserialize, Serialize};

use crate::error::{EvcError, Result};
use crate::grid::{Coord, GridGraph, GridKind, Topology};
use crate::matching::{hopcroft_karp, konig_cover};
use crate::ratio::{self, rat, Rational};

/// Default vertex cap for the branch-and-bound solver.
pub const BNB_CAP: usize = 64;

/// A periodic rule selecting vertices of an infinite lattice.
#[derive(Clone, Copy)]
pub struct CoverPattern {
    pub kind: GridKind,
    pub period_x: usize,
    pub period_y: usize,
    rule: fn(i64, i64) -> bool,
    phase: (i64, i64),
}

impl std::fmt::Debug for CoverPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoverPattern")
            .field("kind", &self.kind)
            .field("period_x", &self.period_x)
            .field("period_y", &self.period_y)
            .field("phase", &self.phase)
            .finish()
    }
}

fn even_rows(_x: i64, y: i64) -> bool {
    y.rem_euclid(2) == 0
}

fn even_sum(x: i64, y: i64) -> bool {
    (x + y).rem_euclid(2) == 0
}

fn even_x(x: i64, _y: i64) -> bool {
    x.rem_euclid(2) == 0
}

/// Everything except one of the three independent classes `x + y mod 3`.
fn tri_two_thirds(x: i64, y: i64) -> bool {
    (x + y).rem_euclid(3) != 1
}

/// Odd columns full, even columns on even rows.
fn king_three_quarters(x: i64, y: i64) -> bool {
    x.rem_euclid(2) == 1 || y.rem_euclid(2) == 0
}

/// The canonical optimal pattern of each lattice.
pub fn pattern(kind: GridKind) -> CoverPattern {
    let (rule, period_x, period_y): (fn(i64, i64) -> bool, usize, usize) = match kind {
        GridKind::Hex3 => (even_rows, 1, 2),
        GridKind::Square4 => (even_sum, 2, 2),
        GridKind::Tri6 => (tri_two_thirds, 3, 3),
        GridKind::Oct8 => (king_three_quarters, 2, 2),
        GridKind::Path | GridKind::Cycle => (even_x, 2, 1),
    };
    CoverPattern { kind, period_x, period_y, rule, phase: (0, 0) }
}

impl CoverPattern {
    pub fn selects(&self, c: Coord) -> bool {
        (self.rule)(c.x as i64 - self.phase.0, c.y as i64 - self.phase.1)
    }

    /// The same rule translated by `(dx, dy)`.
    pub fn translated(&self, dx: i64, dy: i64) -> CoverPattern {
        let phase = (
            (self.phase.0 + dx).rem_euclid(self.period_x as i64),
            (self.phase.1 + dy).rem_euclid(self.period_y as i64),
        );
        CoverPattern { phase, ..*self }
    }

    pub fn phase(&self) -> (i64, i64) {
        self.phase
    }

    /// All `period_x * period_y` translates, canonical phase first.
    pub fn translates(&self) -> Vec<CoverPattern> {
        let mut out = Vec::with_capacity(self.period_x * self.period_y);
        for dx in 0..self.period_x as i64 {
            for dy in 0..self.period_y as i64 {
                out.push(self.translated(dx, dy));
            }
        }
        out
    }

    /// Selected-per-fundamental-domain over the domain size.
    pub fn limit(&self) -> Rational {
        let mut sel = 0i64;
        for x in 0..self.period_x as i32 {
            for y in 0..self.period_y as i32 {
                sel += self.selects(Coord::new(x, y)) as i64;
            }
        }
        rat(sel, (self.period_x * self.period_y) as i64)
    }

    /// Indicator over the vertices of `g`.
    pub fn select_on(&self, g: &GridGraph) -> Vec<bool> {
        g.vertices().iter().map(|&c| self.selects(c)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub window_n: usize,
    pub selected: usize,
    pub total: usize,
    #[serde(with = "ratio")]
    pub ratio: Rational,
    #[serde(with = "ratio")]
    pub limit: Rational,
}

/// Counts pattern points in the `n x n` window `[0, n-1]^2`.
pub fn window_density(p: &CoverPattern, n: usize) -> DensityReport {
    let mut selected = 0usize;
    for x in 0..n as i32 {
        for y in 0..n as i32 {
            selected += p.selects(Coord::new(x, y)) as usize;
        }
    }
    let total = n * n;
    DensityReport {
        window_n: n,
        selected,
        total,
        ratio: rat(selected as i64, total.max(1) as i64),
        limit: p.limit(),
    }
}

pub fn is_vertex_cover(g: &GridGraph, chosen: &[bool]) -> bool {
    g.edges().iter().all(|&(i, j)| chosen[i] || chosen[j])
}

/// First edge with both endpoints outside `chosen`.
pub fn uncovered_edge(g: &GridGraph, chosen: &[bool]) -> Option<(usize, usize)> {
    g.edges().iter().copied().find(|&(i, j)| !chosen[i] && !chosen[j])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub size: usize,
    /// Vertex indices of the witness cover, ascending.
    pub witness: Vec<usize>,
}

impl AlphaResult {
    pub fn witness_coords(&self, g: &GridGraph) -> Vec<Coord> {
        self.witness.iter().map(|&i| g.coord(i)).collect()
    }
}

/// Minimum vertex cover, witness canonicalized to the lexicographically
/// smallest optimal cover. Bipartite graphs go through matching, anything else
/// through branch and bound (capped at [`BNB_CAP`] vertices).
pub fn exact_alpha(g: &GridGraph) -> Result<AlphaResult> {
    exact_alpha_with_cap(g, BNB_CAP)
}

pub fn exact_alpha_with_cap(g: &GridGraph, cap: usize) -> Result<AlphaResult> {
    if g.is_bipartite() {
        let oracle = BipartiteOracle::new(g);
        let size = oracle.min_cover(&vec![true; g.n()]);
        let witness = canonical_witness(g, size, |active| oracle.min_cover(active));
        return Ok(AlphaResult { size, witness });
    }
    let cap = cap.min(64);
    if g.n() > cap {
        return Err(EvcError::TooLarge { n: g.n(), cap });
    }
    let adj = masks(g);
    let size = bnb_min_cover(&adj, full_mask(g.n())).0;
    let witness = canonical_witness(g, size, |active| bnb_min_cover(&adj, to_mask(active)).0);
    Ok(AlphaResult { size, witness })
}

/// König cover from a maximum matching; witness not canonicalized.
pub fn alpha_bipartite(g: &GridGraph) -> Option<AlphaResult> {
    let color = two_coloring(g)?;
    let left: Vec<usize> = (0..g.n()).filter(|&i| !color[i]).collect();
    let right: Vec<usize> = (0..g.n()).filter(|&i| color[i]).collect();
    let mut pos = vec![0usize; g.n()];
    for (k, &i) in left.iter().chain(right.iter()).enumerate() {
        pos[i] = if k < left.len() { k } else { k - left.len() };
    }
    let adj: Vec<Vec<usize>> = left.iter().map(|&l| g.neighbors(l).iter().map(|&r| pos[r]).collect()).collect();
    let m = hopcroft_karp(&adj, right.len());
    let (cl, cr) = konig_cover(&adj, right.len(), &m);
    let mut witness: Vec<usize> = left
        .iter()
        .zip(&cl)
        .chain(right.iter().zip(&cr))
        .filter_map(|(&i, &inc)| inc.then_some(i))
        .collect();
    witness.sort_unstable();
    Some(AlphaResult { size: m.size, witness })
}

/// Branch and bound on vertex bitmasks; witness not canonicalized.
pub fn alpha_branch_and_bound(g: &GridGraph) -> Result<AlphaResult> {
    if g.n() > 64 {
        return Err(EvcError::TooLarge { n: g.n(), cap: 64 });
    }
    let (size, cover) = bnb_min_cover(&masks(g), full_mask(g.n()));
    Ok(AlphaResult { size, witness: (0..g.n()).filter(|&i| cover >> i & 1 == 1).collect() })
}

fn two_coloring(g: &GridGraph) -> Option<Vec<bool>> {
    let mut color: Vec<Option<bool>> = vec![None; g.n()];
    for s in 0..g.n() {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let cv = color[v]?;
            for &u in g.neighbors(v) {
                match color[u] {
                    None => {
                        color[u] = Some(!cv);
                        stack.push(u);
                    }
                    Some(cu) if cu == cv => return None,
                    _ => {}
                }
            }
        }
    }
    color.into_iter().collect()
}

struct BipartiteOracle<'a> {
    g: &'a GridGraph,
    color: Vec<bool>,
}

impl<'a> BipartiteOracle<'a> {
    fn new(g: &'a GridGraph) -> Self {
        let color = two_coloring(g).expect("bipartite graph");
        BipartiteOracle { g, color }
    }

    /// Minimum cover size of the subgraph induced by `active`.
    fn min_cover(&self, active: &[bool]) -> usize {
        let n = self.g.n();
        let mut pos = vec![usize::MAX; n];
        let (mut nl, mut nr) = (0, 0);
        for i in (0..n).filter(|&i| active[i]) {
            if self.color[i] {
                pos[i] = nr;
                nr += 1;
            } else {
                pos[i] = nl;
                nl += 1;
            }
        }
        let mut adj = vec![Vec::new(); nl];
        for i in (0..n).filter(|&i| active[i] && !self.color[i]) {
            adj[pos[i]] = self.g.neighbors(i).iter().filter(|&&j| active[j]).map(|&j| pos[j]).collect();
        }
        hopcroft_karp(&adj, nr).size
    }
}

/// Lexicographically smallest cover of size `alpha`: walk vertices in order,
/// keep a vertex whenever the residual optimum still fits the budget, otherwise
/// exclude it and force its neighbors in. `oracle` returns the minimum cover
/// size of the subgraph induced by its argument.
fn canonical_witness(g: &GridGraph, alpha: usize, oracle: impl Fn(&[bool]) -> usize) -> Vec<usize> {
    let n = g.n();
    // None = undecided.
    let mut state: Vec<Option<bool>> = vec![None; n];
    let mut used = 0usize;
    for v in 0..n {
        if state[v].is_some() {
            continue;
        }
        state[v] = Some(true);
        let active: Vec<bool> = state.iter().map(Option::is_none).collect();
        if used + 1 + oracle(&active) <= alpha {
            used += 1;
            continue;
        }
        state[v] = Some(false);
        for &u in g.neighbors(v) {
            if state[u].is_none() {
                state[u] = Some(true);
                used += 1;
            }
        }
    }
    let witness: Vec<usize> = (0..n).filter(|&i| state[i] == Some(true)).collect();
    debug_assert_eq!(witness.len(), alpha);
    witness
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn to_mask(active: &[bool]) -> u64 {
    active.iter().enumerate().filter(|(_, &a)| a).fold(0u64, |m, (i, _)| m | 1 << i)
}

pub(crate) fn masks(g: &GridGraph) -> Vec<u64> {
    (0..g.n()).map(|i| g.neighbors(i).iter().fold(0u64, |m, &j| m | 1 << j)).collect()
}

/// Minimum vertex cover of the subgraph induced by `active`.
pub(crate) fn bnb_min_cover(adj: &[u64], active: u64) -> (usize, u64) {
    let mut search = Bnb { adj, best: active.count_ones() as usize + 1, best_cover: active };
    search.run(active, 0);
    (search.best, search.best_cover)
}

struct Bnb<'a> {
    adj: &'a [u64],
    best: usize,
    best_cover: u64,
}

impl Bnb<'_> {
    fn run(&mut self, mut active: u64, mut cover: u64) {
        // Degree-0, degree-1 and degree-2-in-a-triangle reductions.
        loop {
            let mut changed = false;
            let mut rest = active;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if active >> v & 1 == 0 {
                    continue;
                }
                let nb = self.adj[v] & active;
                match nb.count_ones() {
                    0 => {
                        active &= !(1 << v);
                        changed = true;
                    }
                    1 => {
                        cover |= nb;
                        active &= !(nb | 1 << v);
                        changed = true;
                    }
                    2 => {
                        let a = nb.trailing_zeros() as usize;
                        let b = 63 - nb.leading_zeros() as usize;
                        if self.adj[a] >> b & 1 == 1 {
                            cover |= nb;
                            active &= !(nb | 1 << v);
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        let used = cover.count_ones() as usize;
        if active == 0 {
            if used < self.best {
                self.best = used;
                self.best_cover = cover;
            }
            return;
        }
        if used + self.lower_bound(active) >= self.best {
            return;
        }
        let mut v = 0;
        let mut deg = 0;
        let mut rest = active;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[u] & active).count_ones();
            if d > deg {
                deg = d;
                v = u;
            }
        }
        self.run(active & !(1 << v), cover | 1 << v);
        let nb = self.adj[v] & active;
        self.run(active & !(nb | 1 << v), cover | nb);
    }

    /// Maximum of a greedy maximal matching and a greedy clique partition
    /// (a clique of size s needs s - 1 cover vertices).
    fn lower_bound(&self, active: u64) -> usize {
        let mut matching = 0;
        let mut rest = active;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= !(1 << v);
            let nb = self.adj[v] & rest;
            if nb != 0 {
                rest &= !(1 << nb.trailing_zeros());
                matching += 1;
            }
        }
        let mut cliques = 0;
        let mut rest = active;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            let mut clique = 1u64 << v;
            let mut cand = self.adj[v] & rest;
            while cand != 0 {
                let u = cand.trailing_zeros() as usize;
                clique |= 1 << u;
                cand &= self.adj[u];
            }
            cliques += clique.count_ones() as usize - 1;
            rest &= !clique;
        }
        matching.max(cliques)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    #[serde(with = "ratio")]
    pub lhs: Rational,
    #[serde(with = "ratio")]
    pub rhs: Rational,
    pub ok: bool,
}

impl BoundEntry {
    fn at_least(name: &str, lhs: Rational, rhs: Rational) -> Self {
        BoundEntry { name: name.to_owned(), lhs, rhs, ok: lhs >= rhs }
    }

    fn at_most(name: &str, lhs: Rational, rhs: Rational) -> Self {
        BoundEntry { name: name.to_owned(), lhs, rhs, ok: lhs <= rhs }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundCheck {
    pub entries: Vec<BoundEntry>,
}

impl BoundCheck {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| !e.ok).count()
    }
}

/// Fewest vertices of `g` selected by any translate of the kind's pattern
/// that still covers `g`.
pub fn best_pattern_translate(g: &GridGraph) -> Option<usize> {
    pattern(g.kind())
        .translates()
        .iter()
        .map(|p| p.select_on(g))
        .filter(|sel| is_vertex_cover(g, sel))
        .map(|sel| sel.iter().filter(|&&b| b).count())
        .min()
}

/// Checks the known inequalities on the cover number of `g`.
pub fn check_bounds(g: &GridGraph, alpha: usize) -> BoundCheck {
    let n = g.n() as i64;
    let (h, w) = (g.h() as i64, g.w() as i64);
    let rho = rat(alpha as i64, n);
    let a = rat(alpha as i64, 1);
    let mut entries = Vec::new();

    if let Some(best) = best_pattern_translate(g) {
        entries.push(BoundEntry::at_most("pattern_upper", a, rat(best as i64, 1)));
    }
    match (g.kind(), g.topology()) {
        (GridKind::Square4, Topology::FiniteRect) => {
            entries.push(BoundEntry::at_least("edge_count_lower", a, rat(h * w - 1, 2)));
            entries.push(BoundEntry::at_least("rho_lower", rho, rat(1, 2) - rat(1, 2 * h * w)));
            entries.push(BoundEntry::at_most("rho_upper", rho, rat(1, 2)));
        }
        (GridKind::Hex3, Topology::FiniteRect) => {
            entries.push(BoundEntry::at_least("rho_lower", rho, rat(1, 2)));
            entries.push(BoundEntry::at_most("rho_upper", rho, rat(1, 2)));
        }
        (GridKind::Tri6, Topology::FiniteRect) => {
            entries.push(BoundEntry::at_least("rho_lower", rho, rat(2, 3) - rat(1, 3 * w)));
            entries.push(BoundEntry::at_most("rho_upper", rho, rat(2, 3)));
        }
        (GridKind::Oct8, Topology::FiniteRect) => {
            let independent = ((h + 1) / 2) * ((w + 1) / 2);
            entries.push(BoundEntry::at_least("king_exact_lower", a, rat(h * w - independent, 1)));
            entries.push(BoundEntry::at_most("king_exact_upper", a, rat(h * w - independent, 1)));
            // Fails for odd h, e.g. 3x3 has ratio 5/9.
            if h % 2 == 0 {
                entries.push(BoundEntry::at_least("rho_lower", rho, rat(3, 4) - rat(1, 4 * w)));
            }
            entries.push(BoundEntry::at_most("rho_upper", rho, rat(3, 4)));
        }
        (GridKind::Path, _) => {
            entries.push(BoundEntry::at_least("rho_lower", rho, rat(1, 2) * (rat(1, 1) - rat(1, n))));
            entries.push(BoundEntry::at_most("rho_upper", rho, rat(1, 2)));
        }
        (GridKind::Cycle, _) => {
            let half = rat((n + 1) / 2, n);
            entries.push(BoundEntry::at_least("rho_exact_lower", rho, half));
            entries.push(BoundEntry::at_most("rho_exact_upper", rho, half));
        }
        (_, Topology::Torus) => {
            // Regular graph: every cover vertex covers exactly `degree` edges.
            entries.push(BoundEntry::at_least("rho_lower_regular", rho, rat(1, 2)));
        }
    }
    BoundCheck { entries }
}

/// Checks the known inequalities on the eternal cover number of `g`.
pub fn check_eternal_bounds(g: &GridGraph, alpha: usize, alpha_inf: usize) -> BoundCheck {
    eternal_bounds(g, alpha, alpha_inf, true)
}

/// The same intervals applied to a strategy's guard count. The exact
/// small-case values of the eternal number are skipped.
pub fn check_strategy_bounds(g: &GridGraph, alpha: usize, guards: usize) -> BoundCheck {
    eternal_bounds(g, alpha, guards, false)
}

fn eternal_bounds(g: &GridGraph, alpha: usize, alpha_inf: usize, exact_small: bool) -> BoundCheck {
    let n = g.n() as i64;
    let (h, w) = (g.h() as i64, g.w() as i64);
    let rho = rat(alpha_inf as i64, n);
    let ai = rat(alpha_inf as i64, 1);
    let mut entries = vec![
        BoundEntry::at_least("sandwich_lower", ai, rat(alpha as i64, 1)),
        BoundEntry::at_most("sandwich_upper", ai, rat(2 * alpha as i64, 1)),
    ];
    match (g.kind(), g.topology()) {
        (GridKind::Square4, Topology::FiniteRect) => {
            entries.push(BoundEntry::at_least("rho_inf_lower", rho, rat(1, 2) - rat(1, 2 * h * w)));
            entries.push(BoundEntry::at_most("rho_inf_upper", rho, rat(1, 2) + rat(1, 2 * h * w)));
        }
        (GridKind::Hex3, Topology::FiniteRect) => {
            entries.push(BoundEntry::at_least("rho_inf_lower", rho, rat(1, 2)));
            entries.push(BoundEntry::at_most("rho_inf_upper", rho, rat(1, 2)));
        }
        (GridKind::Tri6, Topology::FiniteRect) => {
            entries.push(BoundEntry::at_least("rho_inf_lower", rho, rat(2, 3) - rat(1, 3 * w)));
            if h == 2 && w == 2 && exact_small {
                entries.push(BoundEntry::at_most("rho_inf_upper", rho, rat(3, 4)));
            } else if h == 2 {
                entries.push(BoundEntry::at_most("rho_inf_upper", rho, rat(2, 3) + rat(2, w)));
            } else if w >= h {
                entries.push(BoundEntry::at_most("rho_inf_upper", rho, rat(2, 3) + rat(4, h) + rat(4, h * h)));
            }
        }
        (GridKind::Oct8, Topology::FiniteRect) => {
            if h % 2 == 0 {
                entries.push(BoundEntry::at_least("rho_inf_lower", rho, rat(3, 4) - rat(1, 4 * w)));
            }
            if w >= h {
                entries.push(BoundEntry::at_most("rho_inf_upper", rho, rat(3, 4) + rat(1, 2 * h) + rat(1, 4 * h * h)));
            }
        }
        (GridKind::Path, _) => {
            let exact = rat(1, 1) - rat(1, n);
            entries.push(BoundEntry::at_least("rho_inf_exact_lower", rho, exact));
            entries.push(BoundEntry::at_most("rho_inf_exact_upper", rho, exact));
        }
        (GridKind::Cycle, _) => {
            let exact = rat((n + 1) / 2, n);
            entries.push(BoundEntry::at_least("rho_inf_exact_lower", rho, exact));
            entries.push(BoundEntry::at_most("rho_inf_exact_upper", rho, exact));
        }
        (_, Topology::Torus) => {}
    }
    BoundCheck { entries }
}

/// CLI-facing cover report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub alpha: usize,
    pub witness: Vec<Coord>,
    pub bounds: BoundCheck,
}

pub fn alpha_report(g: &GridGraph) -> Result<AlphaReport> {
    let res = exact_alpha(g)?;
    Ok(AlphaReport { alpha: res.size, witness: res.witness_coords(g), bounds: check_bounds(g, res.size) })
}
