//! Bipartite maximum matching (Hopcroft–Karp) and the König cover.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// A maximum matching between `0..left` and `0..right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left_to_right: Vec<usize>,
    pub right_to_left: Vec<usize>,
    pub size: usize,
}

impl Matching {
    pub fn partner_of_left(&self, l: usize) -> Option<usize> {
        (self.left_to_right[l] != NIL).then_some(self.left_to_right[l])
    }

    pub fn partner_of_right(&self, r: usize) -> Option<usize> {
        (self.right_to_left[r] != NIL).then_some(self.right_to_left[r])
    }

    pub fn is_left_perfect(&self) -> bool {
        self.size == self.left_to_right.len()
    }
}

/// Hopcroft–Karp. `adj[l]` lists right vertices adjacent to left vertex `l`;
/// lists are scanned in the given order, so the result is deterministic.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Matching {
    let left = adj.len();
    let mut l2r = vec![NIL; left];
    let mut r2l = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..left {
            if l2r[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = r2l[r];
                if m == NIL {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut iter = vec![0usize; left];
        for l in 0..left {
            if l2r[l] == NIL && augment(l, adj, &mut l2r, &mut r2l, &mut dist, &mut iter) {
                size += 1;
            }
        }
    }
    Matching { left_to_right: l2r, right_to_left: r2l, size }
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    l2r: &mut [usize],
    r2l: &mut [usize],
    dist: &mut [usize],
    iter: &mut [usize],
) -> bool {
    // Iterative DFS along the BFS layers.
    let mut stack = vec![l];
    while let Some(&top) = stack.last() {
        if iter[top] >= adj[top].len() {
            dist[top] = usize::MAX;
            stack.pop();
            continue;
        }
        let r = adj[top][iter[top]];
        iter[top] += 1;
        let m = r2l[r];
        if m == NIL {
            // Flip the path recorded on the stack.
            let mut r_cur = r;
            while let Some(lv) = stack.pop() {
                let prev = l2r[lv];
                l2r[lv] = r_cur;
                r2l[r_cur] = lv;
                r_cur = prev;
            }
            return true;
        }
        if dist[m] != usize::MAX && dist[m] == dist[top] + 1 {
            stack.push(m);
        }
    }
    false
}

/// Minimum vertex cover of a bipartite graph from a maximum matching.
///
/// Returns `(left_in_cover, right_in_cover)`: left vertices not reachable by
/// alternating paths from free left vertices, plus right vertices that are.
pub fn konig_cover(adj: &[Vec<usize>], right: usize, matching: &Matching) -> (Vec<bool>, Vec<bool>) {
    let left = adj.len();
    let mut seen_l = vec![false; left];
    let mut seen_r = vec![false; right];
    let mut queue: VecDeque<usize> = (0..left).filter(|&l| matching.left_to_right[l] == NIL).collect();
    for &l in &queue {
        seen_l[l] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            if seen_r[r] {
                continue;
            }
            seen_r[r] = true;
            let m = matching.right_to_left[r];
            if m != NIL && !seen_l[m] {
                seen_l[m] = true;
                queue.push_back(m);
            }
        }
    }
    (seen_l.into_iter().map(|s| !s).collect(), seen_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_max_matching(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(l: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if l == adj.len() {
                return 0;
            }
            let mut best = go(l + 1, adj, used);
            for &r in &adj[l] {
                if !used[r] {
                    used[r] = true;
                    best = best.max(1 + go(l + 1, adj, used));
                    used[r] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn small_cases() {
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        let m = hopcroft_karp(&adj, 3);
        assert_eq!(m.size, 3);
        assert_eq!(m.left_to_right, vec![1, 0, 2]);
        assert_eq!(hopcroft_karp(&[], 0).size, 0);
        assert_eq!(hopcroft_karp(&[vec![], vec![]], 2).size, 0);
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force_and_konig_covers(
            left in 0usize..7,
            right in 0usize..7,
            bits in proptest::collection::vec(proptest::bool::ANY, 49),
        ) {
            let adj: Vec<Vec<usize>> = (0..left)
                .map(|l| (0..right).filter(|&r| bits[l * 7 + r]).collect())
                .collect();
            let m = hopcroft_karp(&adj, right);
            proptest::prop_assert_eq!(m.size, brute_max_matching(&adj, right));
            for l in 0..left {
                if let Some(r) = m.partner_of_left(l) {
                    proptest::prop_assert!(adj[l].contains(&r));
                    proptest::prop_assert_eq!(m.partner_of_right(r), Some(l));
                }
            }
            let (cl, cr) = konig_cover(&adj, right, &m);
            let size = cl.iter().filter(|&&b| b).count() + cr.iter().filter(|&&b| b).count();
            proptest::prop_assert_eq!(size, m.size);
            for l in 0..left {
                for &r in &adj[l] {
                    proptest::prop_assert!(cl[l] || cr[r]);
                }
            }
        }
    }
}
