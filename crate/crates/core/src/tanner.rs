//! Tanner graphs of LDPC codes.
//!
//! Variable nodes are `0..n`, check nodes `0..m`. Internally, a BFS over the
//! bipartite graph numbers check `j` as vertex `n + j`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Attempts made by [`build_regular_graph`] before giving up.
pub const MAX_CONSTRUCTION_RETRIES: usize = 10_000;
/// Random edge moves tried at a dead end before restarting.
const REROUTE_TRIES: usize = 200;

#[derive(Debug, Clone)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    var_adj: Vec<Vec<usize>>,
    chk_adj: Vec<Vec<usize>>,
    girth_cache: OnceLock<Option<usize>>,
}

impl PartialEq for TannerGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.chk_adj == other.chk_adj
    }
}

impl Eq for TannerGraph {}

/// A word that satisfies every parity check of the graph it was validated against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword(Vec<u8>);

impl Codeword {
    pub fn new(g: &TannerGraph, bits: Vec<u8>) -> Result<Self> {
        if g.is_codeword(&bits)? {
            Ok(Codeword(bits))
        } else {
            Err(Error::NotACodeword)
        }
    }

    pub fn zero(n: usize) -> Self {
        Codeword(vec![0; n])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

impl AsRef<[u8]> for Codeword {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl TannerGraph {
    /// Build a graph from the variable lists of each check. Degrees may be
    /// irregular; use [`TannerGraph::regular_degrees`] to test regularity.
    pub fn from_checks(n: usize, chk_adj: Vec<Vec<usize>>) -> Result<Self> {
        let m = chk_adj.len();
        let mut var_adj = vec![Vec::new(); n];
        for (j, row) in chk_adj.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::InvalidArgument(format!(
                        "check {j} references variable {v} but n = {n}"
                    )));
                }
                if row[..k].contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "parallel edge between variable {v} and check {j}"
                    )));
                }
                var_adj[v].push(j);
            }
        }
        Ok(TannerGraph {
            n,
            m,
            var_adj,
            chk_adj,
            girth_cache: OnceLock::new(),
        })
    }

    /// Like [`TannerGraph::from_checks`], but rejects graphs that are not
    /// `(d_l, d_r)`-regular.
    pub fn regular(n: usize, chk_adj: Vec<Vec<usize>>, d_l: usize, d_r: usize) -> Result<Self> {
        let g = Self::from_checks(n, chk_adj)?;
        match g.regular_degrees() {
            Some(d) if d == (d_l, d_r) => Ok(g),
            _ => Err(Error::InvalidArgument(format!(
                "graph is not ({d_l},{d_r})-regular"
            ))),
        }
    }

    /// Parity-check matrix rows (dense 0/1) to a graph.
    pub fn from_parity_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut chk_adj = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            chk_adj.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        Self::from_checks(n, chk_adj)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn var_neighbors(&self, v: usize) -> &[usize] {
        &self.var_adj[v]
    }

    pub fn check_neighbors(&self, c: usize) -> &[usize] {
        &self.chk_adj[c]
    }

    pub fn checks(&self) -> &[Vec<usize>] {
        &self.chk_adj
    }

    pub fn edge_count(&self) -> usize {
        self.chk_adj.iter().map(Vec::len).sum()
    }

    /// `Some((d_L, d_R))` when every variable has degree `d_L` and every
    /// check degree `d_R`.
    pub fn regular_degrees(&self) -> Option<(usize, usize)> {
        let d_l = self.var_adj.first()?.len();
        let d_r = self.chk_adj.first()?.len();
        let ok = self.var_adj.iter().all(|a| a.len() == d_l)
            && self.chk_adj.iter().all(|a| a.len() == d_r)
            && self.n * d_l == self.m * d_r;
        ok.then_some((d_l, d_r))
    }

    pub fn max_check_degree(&self) -> usize {
        self.chk_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Length of the shortest cycle, `None` for a forest. Cached.
    pub fn girth(&self) -> Option<usize> {
        *self.girth_cache.get_or_init(|| compute_girth(self))
    }

    /// Largest `T` with `4T < girth`; unbounded graphs (forests) report `usize::MAX`.
    pub fn max_tree_depth(&self) -> usize {
        match self.girth() {
            Some(g) => (g - 1) / 4,
            None => usize::MAX,
        }
    }

    pub fn is_codeword(&self, x: &[u8]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(self
            .chk_adj
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &v| acc ^ (x[v] & 1)) == 0))
    }

    /// A basis of the code (the GF(2) null space of the parity-check matrix).
    pub fn codeword_basis(&self) -> Vec<Vec<u8>> {
        let n = self.n;
        let mut rows: Vec<Vec<u8>> = self
            .chk_adj
            .iter()
            .map(|row| {
                let mut r = vec![0u8; n];
                for &v in row {
                    r[v] = 1;
                }
                r
            })
            .collect();
        // reduced row echelon form
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] == 1) else {
                continue;
            };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][col] == 1 {
                    let (a, b) = if r < rank {
                        let (lo, hi) = rows.split_at_mut(rank);
                        (&mut lo[r], &hi[0])
                    } else {
                        let (lo, hi) = rows.split_at_mut(r);
                        (&mut hi[0], &lo[rank])
                    };
                    for (x, y) in a.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u8; n];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = rows[r][f];
                }
                v
            })
            .collect()
    }

    /// Every codeword, for codes of dimension at most `max_dimension`.
    pub fn codewords(&self, max_dimension: usize) -> Result<Vec<Vec<u8>>> {
        let basis = self.codeword_basis();
        let k = basis.len();
        if k > max_dimension {
            return Err(Error::InvalidArgument(format!(
                "code dimension {k} exceeds enumeration limit {max_dimension}"
            )));
        }
        let mut words = Vec::with_capacity(1 << k);
        for mask in 0u64..(1u64 << k) {
            let mut w = vec![0u8; self.n];
            for (b, row) in basis.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    for (x, y) in w.iter_mut().zip(row) {
                        *x ^= y;
                    }
                }
            }
            words.push(w);
        }
        Ok(words)
    }

    /// Text form: header `n m d_L d_R`, then one line per check listing its
    /// variables (0-based). Irregular graphs write `0` for the degrees.
    pub fn to_text(&self) -> String {
        let (d_l, d_r) = self.regular_degrees().unwrap_or((0, 0));
        let mut s = format!("{} {} {} {}\n", self.n, self.m, d_l, d_r);
        for row in &self.chk_adj {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for TannerGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for TannerGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let nums = parse_usizes(header)?;
        let [n, m, d_l, d_r] = nums[..] else {
            return Err(Error::Parse(format!(
                "header must be `n m d_L d_R`, got `{header}`"
            )));
        };
        let rows = lines.map(parse_usizes).collect::<Result<Vec<_>>>()?;
        if rows.len() != m {
            return Err(Error::Parse(format!(
                "header declares {m} checks, found {}",
                rows.len()
            )));
        }
        if d_l == 0 && d_r == 0 {
            TannerGraph::from_checks(n, rows)
        } else {
            TannerGraph::regular(n, rows, d_l, d_r)
        }
    }
}

fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
        })
        .collect()
}

fn compute_girth(g: &TannerGraph) -> Option<usize> {
    let total = g.n + g.m;
    let neighbors = |u: usize| -> Box<dyn Iterator<Item = usize> + '_> {
        if u < g.n {
            Box::new(g.var_adj[u].iter().map(move |&c| g.n + c))
        } else {
            Box::new(g.chk_adj[u - g.n].iter().copied())
        }
    };
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    for src in 0..total {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        parent[src] = usize::MAX;
        queue.clear();
        queue.push_back(src);
        'bfs: while let Some(u) = queue.pop_front() {
            if let Some(b) = best {
                // no shorter cycle can be found from this depth on
                if 2 * dist[u] + 1 >= b {
                    break 'bfs;
                }
            }
            for w in neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// Distance from variable `v` to every check in the partial graph, explored
/// up to `limit` hops. Unreached checks report `usize::MAX`.
fn check_distances(
    v: usize,
    var_adj: &[Vec<usize>],
    chk_adj: &[Vec<usize>],
    limit: usize,
) -> Vec<usize> {
    let n = var_adj.len();
    let mut var_dist = vec![usize::MAX; n];
    let mut chk_dist = vec![usize::MAX; chk_adj.len()];
    var_dist[v] = 0;
    let mut frontier = vec![v];
    let mut d = 0;
    while !frontier.is_empty() && d < limit {
        let mut next_checks = Vec::new();
        for &u in &frontier {
            for &c in &var_adj[u] {
                if chk_dist[c] == usize::MAX {
                    chk_dist[c] = d + 1;
                    next_checks.push(c);
                }
            }
        }
        d += 1;
        if d >= limit {
            break;
        }
        let mut next_vars = Vec::new();
        for &c in &next_checks {
            for &u in &chk_adj[c] {
                if var_dist[u] == usize::MAX {
                    var_dist[u] = d + 1;
                    next_vars.push(u);
                }
            }
        }
        d += 1;
        frontier = next_vars;
    }
    chk_dist
}

/// Build a `(d_l, d_r)`-regular Tanner graph on `n` variables with girth at
/// least `min_girth`.
///
/// Edges are placed socket by socket: each variable picks a random
/// check with free sockets among those that would not close a cycle shorter
/// than `min_girth`, preferring the emptiest checks. At a dead end an existing
/// edge is moved to make room; if that fails too the construction restarts,
/// up to [`MAX_CONSTRUCTION_RETRIES`] times.
/// The result depends only on the arguments.
pub fn build_regular_graph(
    n: usize,
    d_l: usize,
    d_r: usize,
    min_girth: usize,
    seed: u64,
) -> Result<TannerGraph> {
    if n == 0 || d_l == 0 || d_r == 0 {
        return Err(Error::InvalidArgument(
            "n, d_L and d_R must be positive".into(),
        ));
    }
    if (n * d_l) % d_r != 0 {
        return Err(Error::InvalidArgument(format!(
            "n·d_L = {} is not divisible by d_R = {d_r}",
            n * d_l
        )));
    }
    if min_girth < 4 || min_girth % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "min_girth must be even and at least 4, got {min_girth}"
        )));
    }
    let m = n * d_l / d_r;
    if d_r > n || d_l > m {
        return Err(Error::InvalidArgument(format!(
            "degrees ({d_l},{d_r}) impossible with n = {n}, m = {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_CONSTRUCTION_RETRIES {
        if let Some(chk_adj) = try_build(n, m, d_l, d_r, min_girth, &mut rng) {
            let g = TannerGraph::regular(n, chk_adj, d_l, d_r)?;
            debug_assert!(g.girth().map_or(true, |gi| gi >= min_girth));
            return Ok(g);
        }
    }
    Err(Error::ConstructionFailure {
        n,
        d_l,
        d_r,
        min_girth,
        retries: MAX_CONSTRUCTION_RETRIES,
    })
}

fn try_build(
    n: usize,
    m: usize,
    d_l: usize,
    d_r: usize,
    min_girth: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d_l); n];
    let mut chk_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d_r); m];
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    let mut candidates = Vec::with_capacity(m);
    for &v in &order {
        for _ in 0..d_l {
            // a new edge v–c closes a cycle of length dist(v, c) + 1
            let dist = check_distances(v, &var_adj, &chk_adj, min_girth - 2);
            candidates.clear();
            let mut best_free = 0;
            for c in 0..m {
                let free = d_r - chk_adj[c].len();
                if free == 0 || var_adj[v].contains(&c) {
                    continue;
                }
                if dist[c] != usize::MAX && dist[c] + 1 < min_girth {
                    continue;
                }
                if free > best_free {
                    best_free = free;
                    candidates.clear();
                }
                if free == best_free {
                    candidates.push(c);
                }
            }
            match candidates.choose(rng) {
                Some(&c) => {
                    var_adj[v].push(c);
                    chk_adj[c].push(v);
                }
                None => {
                    if !reroute(v, &mut var_adj, &mut chk_adj, d_r, min_girth, rng) {
                        return None;
                    }
                }
            }
        }
    }
    for row in &mut chk_adj {
        row.sort_unstable();
    }
    Some(chk_adj)
}

/// Whether some cycle through one copy of the edge `v–c` is shorter than `limit`.
fn short_cycle_through(v: usize, c: usize, var_adj: &[Vec<usize>], chk_adj: &[Vec<usize>], limit: usize) -> bool {
    let mut skipped = false;
    let mut var_seen = vec![false; var_adj.len()];
    let mut chk_seen = vec![false; chk_adj.len()];
    var_seen[v] = true;
    let mut frontier = vec![v];
    // checks reached in this round sit at odd distance d; reaching c closes a cycle of length d + 1
    let mut d = 1;
    while d + 1 < limit && !frontier.is_empty() {
        let mut checks = Vec::new();
        for &u in &frontier {
            for &cc in &var_adj[u] {
                if u == v && cc == c && !skipped {
                    skipped = true;
                    continue;
                }
                if cc == c {
                    return true;
                }
                if !chk_seen[cc] {
                    chk_seen[cc] = true;
                    checks.push(cc);
                }
            }
        }
        frontier.clear();
        for &cc in &checks {
            for &u in &chk_adj[cc] {
                if !var_seen[u] {
                    var_seen[u] = true;
                    frontier.push(u);
                }
            }
        }
        d += 2;
    }
    false
}

fn remove_one(list: &mut Vec<usize>, x: usize) {
    let i = list.iter().position(|&y| y == x).expect("edge present");
    list.swap_remove(i);
}

/// Free a socket for `v` at a dead end: move an existing edge `v2–c2` to a
/// check `c` that still has room and give `c2` to `v`, provided neither new
/// edge closes a short cycle.
fn reroute(
    v: usize,
    var_adj: &mut [Vec<usize>],
    chk_adj: &mut [Vec<usize>],
    d_r: usize,
    min_girth: usize,
    rng: &mut ChaCha8Rng,
) -> bool {
    use rand::Rng;
    let open: Vec<usize> = (0..chk_adj.len())
        .filter(|&c| chk_adj[c].len() < d_r && !var_adj[v].contains(&c))
        .collect();
    let placed: Vec<usize> = (0..var_adj.len()).filter(|&u| u != v && !var_adj[u].is_empty()).collect();
    if open.is_empty() || placed.is_empty() {
        return false;
    }
    for _ in 0..REROUTE_TRIES {
        let c = open[rng.random_range(0..open.len())];
        let v2 = placed[rng.random_range(0..placed.len())];
        let c2 = var_adj[v2][rng.random_range(0..var_adj[v2].len())];
        if c2 == c || var_adj[v].contains(&c2) || var_adj[v2].contains(&c) {
            continue;
        }
        remove_one(&mut var_adj[v2], c2);
        remove_one(&mut chk_adj[c2], v2);
        var_adj[v2].push(c);
        chk_adj[c].push(v2);
        var_adj[v].push(c2);
        chk_adj[c2].push(v);
        if !short_cycle_through(v2, c, var_adj, chk_adj, min_girth)
            && !short_cycle_through(v, c2, var_adj, chk_adj, min_girth)
        {
            return true;
        }
        remove_one(&mut var_adj[v], c2);
        remove_one(&mut chk_adj[c2], v);
        remove_one(&mut var_adj[v2], c);
        remove_one(&mut chk_adj[c], v2);
        var_adj[v2].push(c2);
        chk_adj[c2].push(v2);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force shortest simple cycle by DFS (small graphs only).
    fn brute_force_girth(g: &TannerGraph) -> Option<usize> {
        let total = g.n() + g.m();
        let adj: Vec<Vec<usize>> = (0..total)
            .map(|u| {
                if u < g.n() {
                    g.var_neighbors(u).iter().map(|&c| g.n() + c).collect()
                } else {
                    g.check_neighbors(u - g.n()).to_vec()
                }
            })
            .collect();
        fn dfs(
            adj: &[Vec<usize>],
            start: usize,
            u: usize,
            len: usize,
            on_path: &mut Vec<bool>,
            best: &mut Option<usize>,
        ) {
            for &w in &adj[u] {
                if w == start && len >= 3 {
                    *best = Some(best.map_or(len, |b| b.min(len)));
                } else if w > start && !on_path[w] {
                    on_path[w] = true;
                    dfs(adj, start, w, len + 1, on_path, best);
                    on_path[w] = false;
                }
            }
        }
        let mut best = None;
        for s in 0..total {
            let mut on_path = vec![false; total];
            on_path[s] = true;
            dfs(&adj, s, s, 1, &mut on_path, &mut best);
        }
        best
    }

    fn six_cycle() -> TannerGraph {
        TannerGraph::regular(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], 2, 2).unwrap()
    }

    fn hamming() -> TannerGraph {
        TannerGraph::from_parity_matrix(&[
            vec![1, 1, 1, 0, 1, 0, 0],
            vec![1, 1, 0, 1, 0, 1, 0],
            vec![1, 0, 1, 1, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn six_cycle_girth() {
        assert_eq!(six_cycle().girth(), Some(6));
    }

    #[test]
    fn hamming_girth_matches_enumeration() {
        let g = hamming();
        assert_eq!(brute_force_girth(&g), Some(4));
        assert_eq!(g.girth(), Some(4));
    }

    #[test]
    fn tree_has_no_girth() {
        let g = TannerGraph::from_checks(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(g.girth(), None);
        let path = TannerGraph::from_checks(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(path.girth(), None);
        assert_eq!(path.max_tree_depth(), usize::MAX);
    }

    #[test]
    fn builds_the_six_cycle() {
        let g = build_regular_graph(3, 2, 2, 6, 0).unwrap();
        assert_eq!(g.regular_degrees(), Some((2, 2)));
        assert_eq!(g.girth(), Some(6));
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn small_36_graph_respects_girth() {
        let g = build_regular_graph(12, 3, 6, 4, 1).unwrap();
        assert_eq!(g.regular_degrees(), Some((3, 6)));
        let gi = g.girth().unwrap();
        assert!(gi >= 4);
        assert_eq!(brute_force_girth(&g), Some(gi));
    }

    #[test]
    fn divisibility_is_checked() {
        assert!(matches!(
            build_regular_graph(6, 3, 4, 4, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_regular_graph(12, 3, 6, 5, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn unreachable_girth_fails() {
        // a (3,6) graph on 12 variables cannot have girth 8
        assert!(matches!(
            build_regular_graph(12, 3, 6, 8, 0),
            Err(Error::ConstructionFailure { .. })
        ));
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_regular_graph(60, 3, 6, 6, 42).unwrap();
        let b = build_regular_graph(60, 3, 6, 6, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn codeword_checks() {
        let g = six_cycle();
        assert!(g.is_codeword(&[0, 0, 0]).unwrap());
        assert!(g.is_codeword(&[1, 1, 1]).unwrap());
        assert!(!g.is_codeword(&[1, 0, 0]).unwrap());
        assert!(matches!(
            g.is_codeword(&[0, 0]),
            Err(Error::LengthMismatch { .. })
        ));
        let h = hamming();
        assert_eq!(h.codewords(10).unwrap().len(), 16);
        for w in h.codewords(10).unwrap() {
            assert!(h.is_codeword(&w).unwrap());
        }
    }

    #[test]
    fn text_round_trip() {
        let g = build_regular_graph(48, 3, 6, 6, 3).unwrap();
        let back: TannerGraph = g.to_text().parse().unwrap();
        assert_eq!(g, back);
        assert!("3 3 2 2\n0 1\n1 2\n".parse::<TannerGraph>().is_err());
        assert!("3 3 2 2\n0 1\n1 2\n0 x\n".parse::<TannerGraph>().is_err());
    }

    #[test]
    fn parallel_edges_rejected() {
        assert!(TannerGraph::from_checks(3, vec![vec![0, 0]]).is_err());
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn built_graphs_are_regular_with_requested_girth(seed in 0u64..10_000, pick in 0usize..4) {
            let (n, d_l, d_r, girth) = [(12, 2, 3, 6), (12, 3, 6, 4), (8, 3, 4, 4), (10, 2, 2, 8)][pick];
            let g = build_regular_graph(n, d_l, d_r, girth, seed).unwrap();
            prop_assert_eq!(g.regular_degrees(), Some((d_l, d_r)));
            let gi = g.girth().unwrap_or(usize::MAX);
            prop_assert!(gi >= girth);
            prop_assert_eq!(brute_force_girth(&g), g.girth());
        }
    }
}
