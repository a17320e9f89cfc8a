//! Bandwidth-reducing symmetric orderings.

use std::collections::VecDeque;

use super::SparseMatrix;

/// Symmetric permutation policy applied before factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Ordering {
    /// Keep the input numbering.
    Natural,
    /// Reverse Cuthill–McKee.
    Rcm,
    /// Whichever of natural and RCM gives the smaller envelope.
    #[default]
    Auto,
}

/// Adjacency lists of the symmetrized pattern, without self loops.
fn adjacency(m: &SparseMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut adj = vec![Vec::new(); n];
    for (i, j, _) in m.triplets() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// BFS from `root`; returns (eccentricity, vertices of the last level).
fn bfs_last_level(adj: &[Vec<usize>], root: usize, mark: &mut [bool]) -> (usize, Vec<usize>) {
    let mut order = vec![root];
    let mut level = vec![0usize];
    mark[root] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        let lv = level[head];
        head += 1;
        for &w in &adj[v] {
            if !mark[w] {
                mark[w] = true;
                order.push(w);
                level.push(lv + 1);
            }
        }
    }
    for &v in &order {
        mark[v] = false;
    }
    let ecc = level.last().copied().unwrap_or(0);
    let last = order
        .iter()
        .zip(&level)
        .filter(|(_, &l)| l == ecc)
        .map(|(&v, _)| v)
        .collect();
    (ecc, last)
}

/// Reverse Cuthill–McKee permutation (`perm[new] = old`) of a square matrix pattern.
pub fn reverse_cuthill_mckee(m: &SparseMatrix) -> Vec<usize> {
    let n = m.nrows();
    let adj = adjacency(m);
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut scratch = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        // pseudo-peripheral start inside the next unvisited component
        let seed = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| degree[v])
            .expect("unvisited vertex exists");
        let mut root = seed;
        let (mut ecc, mut last) = bfs_last_level(&adj, root, &mut scratch);
        loop {
            let candidate = *last.iter().min_by_key(|&&v| degree[v]).unwrap_or(&root);
            let (e2, l2) = bfs_last_level(&adj, candidate, &mut scratch);
            if e2 > ecc {
                root = candidate;
                ecc = e2;
                last = l2;
            } else {
                break;
            }
        }

        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Number of stored off-diagonal envelope entries of the lower triangle
/// of `P M Pᵀ`, where `perm[new] = old`.
pub fn envelope_size(m: &SparseMatrix, perm: &[usize]) -> usize {
    let n = m.nrows();
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut first: Vec<usize> = (0..n).collect();
    for (i, j, _) in m.triplets() {
        let (a, b) = (inv[i], inv[j]);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        first[hi] = first[hi].min(lo);
    }
    first.iter().enumerate().map(|(i, &f)| i - f).sum()
}

pub fn choose_ordering(m: &SparseMatrix, ordering: Ordering) -> Vec<usize> {
    let natural: Vec<usize> = (0..m.nrows()).collect();
    match ordering {
        Ordering::Natural => natural,
        Ordering::Rcm => reverse_cuthill_mckee(m),
        Ordering::Auto => {
            let rcm = reverse_cuthill_mckee(m);
            if envelope_size(m, &rcm) < envelope_size(m, &natural) {
                rcm
            } else {
                natural
            }
        }
    }
}
