//! Weighted graphs and the automorphism-compatible matrices built from them.

use std::collections::{BTreeMap, VecDeque};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{MatrixC, C64, ONE};
use crate::permutation::Permutation;

/// Graph on vertices `1..=n`. Undirected edges are stored once under
/// `(min, max)`; loops are allowed; at most one edge per ordered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    directed: bool,
    edges: BTreeMap<(usize, usize), f64>,
}

impl WeightedDigraph {
    pub fn new(n: usize, directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph(
                "graph needs at least one vertex".into(),
            ));
        }
        Ok(WeightedDigraph {
            n,
            directed,
            edges: BTreeMap::new(),
        })
    }

    pub fn from_edges(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut g = WeightedDigraph::new(n, directed)?;
        for (i, j, w) in edges {
            g.add_edge(i, j, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        for v in [i, j] {
            if v == 0 || v > self.n {
                return Err(Error::InvalidGraph(format!(
                    "endpoint {v} outside 1..={}",
                    self.n
                )));
            }
        }
        if !w.is_finite() {
            return Err(Error::InvalidGraph(format!(
                "edge ({i},{j}) has weight {w}"
            )));
        }
        let key = if self.directed {
            (i, j)
        } else {
            (i.min(j), i.max(j))
        };
        if self.edges.insert(key, w).is_some() {
            return Err(Error::InvalidGraph(format!("repeated edge ({i},{j})")));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Stored edges as `(i, j, w)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Weight of the edge `i → j`, symmetric for undirected graphs.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let key = if self.directed {
            (i, j)
        } else {
            (i.min(j), i.max(j))
        };
        self.edges.get(&key).copied()
    }

    /// Out-neighbours on the unweighted skeleton.
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for (i, j, _) in self.edges() {
            adj[i].push(j);
            if !self.directed && i != j {
                adj[j].push(i);
            }
        }
        adj
    }

    /// Weakly connected (the direction of edges is ignored).
    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n + 1];
        for (i, j, _) in self.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    WeightedAdjacency,
    Adjacency,
    CombinatorialLaplacian,
    SignlessLaplacian,
    NormalizedLaplacian,
    Distance,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 6] = [
        MatrixKind::WeightedAdjacency,
        MatrixKind::Adjacency,
        MatrixKind::CombinatorialLaplacian,
        MatrixKind::SignlessLaplacian,
        MatrixKind::NormalizedLaplacian,
        MatrixKind::Distance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::WeightedAdjacency => "weighted",
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::CombinatorialLaplacian => "laplacian",
            MatrixKind::SignlessLaplacian => "signless",
            MatrixKind::NormalizedLaplacian => "normalized",
            MatrixKind::Distance => "distance",
        }
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatrixKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown matrix kind {s:?}")))
    }
}

/// Builds the `n × n` matrix of the requested kind.
///
/// Laplacian degrees are weighted row sums of the weighted adjacency matrix.
/// Distances count hops on the unweighted skeleton.
pub fn build_matrix(g: &WeightedDigraph, kind: MatrixKind) -> Result<MatrixC> {
    let n = g.n();
    let weighted = || {
        let mut w = MatrixC::zeros(n, n);
        for (i, j, wt) in g.edges() {
            w[(i - 1, j - 1)] = C64::new(wt, 0.0);
            if !g.directed() {
                w[(j - 1, i - 1)] = C64::new(wt, 0.0);
            }
        }
        w
    };
    let degrees = |w: &MatrixC| -> Vec<f64> {
        (0..n)
            .map(|i| {
                // sort before summing so that vertices in the same orbit get
                // bit-identical degrees
                let mut row: Vec<f64> = w.row(i).iter().map(|z| z.re).collect();
                row.sort_by(f64::total_cmp);
                row.iter().sum()
            })
            .collect()
    };

    match kind {
        MatrixKind::WeightedAdjacency => Ok(weighted()),
        MatrixKind::Adjacency => {
            let mut a = MatrixC::zeros(n, n);
            for (i, j, _) in g.edges() {
                a[(i - 1, j - 1)] = ONE;
                if !g.directed() {
                    a[(j - 1, i - 1)] = ONE;
                }
            }
            Ok(a)
        }
        MatrixKind::CombinatorialLaplacian | MatrixKind::SignlessLaplacian => {
            if g.directed() {
                return Err(Error::DirectedUnsupported(kind.name()));
            }
            let w = weighted();
            let d = degrees(&w);
            let sign = if kind == MatrixKind::CombinatorialLaplacian {
                -1.0
            } else {
                1.0
            };
            let mut l = w.scale(C64::new(sign, 0.0));
            for (i, di) in d.iter().enumerate() {
                l[(i, i)] += C64::new(*di, 0.0);
            }
            Ok(l)
        }
        MatrixKind::NormalizedLaplacian => {
            if g.directed() {
                return Err(Error::DirectedUnsupported(kind.name()));
            }
            let w = weighted();
            let d = degrees(&w);
            if let Some(i) = d.iter().position(|&x| x == 0.0) {
                return Err(Error::IsolatedVertex(i + 1));
            }
            let s: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
            Ok(MatrixC::from_fn(n, n, |i, j| {
                let delta = if i == j { 1.0 } else { 0.0 };
                C64::new(delta - w[(i, j)].re * s[i] * s[j], 0.0)
            }))
        }
        MatrixKind::Distance => {
            if g.directed() {
                return Err(Error::DirectedUnsupported(kind.name()));
            }
            let adj = g.neighbours();
            let mut out = MatrixC::zeros(n, n);
            for src in 1..=n {
                let mut dist = vec![usize::MAX; n + 1];
                dist[src] = 0;
                let mut queue = VecDeque::from([src]);
                while let Some(u) = queue.pop_front() {
                    for &v in &adj[u] {
                        if dist[v] == usize::MAX {
                            dist[v] = dist[u] + 1;
                            queue.push_back(v);
                        }
                    }
                }
                for t in 1..=n {
                    if dist[t] == usize::MAX {
                        return Err(Error::DisconnectedGraph);
                    }
                    out[(src - 1, t - 1)] = C64::new(dist[t] as f64, 0.0);
                }
            }
            Ok(out)
        }
    }
}

/// `P` with `P[p(j), j] = 1`, so that `Pᵀ M P` relabels `M` by `p`.
pub fn permutation_matrix(p: &Permutation, n: usize) -> Result<MatrixC> {
    if let Some(&bad) = p.images().iter().find(|&&v| v > n) {
        return Err(Error::DomainMismatch { index: bad, n });
    }
    if p.n() > n {
        // a permutation on more points is acceptable only if it fixes the extras
        if let Some(i) = (n + 1..=p.n()).find(|&i| p.apply(i) != i) {
            return Err(Error::DomainMismatch { index: i, n });
        }
    }
    let mut m = MatrixC::zeros(n, n);
    for j in 1..=n {
        let pj = if j <= p.n() { p.apply(j) } else { j };
        m[(pj - 1, j - 1)] = ONE;
    }
    Ok(m)
}
