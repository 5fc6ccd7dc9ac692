//! Finite simple graphs, directed or undirected, as dense adjacency
//! matrices. The adjacency convention is receiver-major: `adj[i][j] = 1`
//! means node j influences node i, so row sums are in-degrees and column
//! sums are out-degrees. Undirected graphs keep the matrix symmetric.
//!
//! Graphs are immutable once built. Construction rejects self-loops and
//! (for undirected graphs) asymmetric adjacency.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// How many candidate cycles the random balanced generator draws before
/// giving up on a duplicate-free superposition.
const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    adj: Vec<bool>,
}

impl Graph {
    /// Builds a graph from explicit edges. Each `(i, j)` pair is the edge
    /// i -> j (j receives from i); for undirected graphs both directions are
    /// set. Errors on out-of-range indices, self-loops and duplicates.
    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        let mut g = Graph {
            n,
            directed,
            adj: vec![false; n * n],
        };
        for &(i, j) in edges {
            g.insert_edge(i, j)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, from: usize, to: usize) -> Result<()> {
        let n = self.n;
        if from >= n || to >= n {
            return Err(Error::invalid(format!(
                "edge ({from}, {to}) out of range for {n} nodes"
            )));
        }
        if from == to {
            return Err(Error::invalid(format!("self-loop at node {from}")));
        }
        if self.adj[to * n + from] {
            return Err(Error::invalid(format!("duplicate edge ({from}, {to})")));
        }
        self.adj[to * n + from] = true;
        if !self.directed {
            self.adj[from * n + to] = true;
        }
        Ok(())
    }

    /// Path graph P_n: nodes 0..n in a line.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("path needs at least 2 nodes"));
        }
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, false, &edges)
    }

    /// Star graph S_n on n nodes: node 0 is the hub, nodes 1..n are leaves.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("star needs at least 2 nodes"));
        }
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, false, &edges)
    }

    /// Cycle graph C_n.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("cycle needs at least 3 nodes"));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, false, &edges)
    }

    /// Complete graph K_n.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("complete graph needs at least 2 nodes"));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, false, &edges)
    }

    /// The 4-node, 5-edge undirected demo graph used throughout the test
    /// corpus: a 4-cycle with one chord, degree profile (3, 2, 3, 2),
    /// non-bipartite because of the 1-2-3 triangle.
    pub fn demo4() -> Self {
        Self::from_edges(4, false, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
            .expect("demo graph is valid by construction")
    }

    /// Random balanced digraph: a superposition of a spanning directed cycle
    /// (random node order) and `cycles - 1` further directed cycles over
    /// random node subsets, all edge-disjoint. Every node ends with equal
    /// in- and out-degree and the graph is strongly connected. Deterministic
    /// per seed; errors if `MAX_ATTEMPTS` candidate cycles in a row collide
    /// with already placed edges.
    pub fn random_balanced_digraph(n: usize, cycles: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("balanced digraph needs at least 2 nodes"));
        }
        if cycles < 1 {
            return Err(Error::invalid("need at least the spanning cycle"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph {
            n,
            directed: true,
            adj: vec![false; n * n],
        };

        let mut order: Vec<usize> = (0..n).collect();
        shuffle(&mut order, &mut rng);
        g.add_cycle(&order)
            .expect("spanning cycle cannot collide in an empty graph");

        for _ in 1..cycles {
            let mut placed = false;
            for _ in 0..MAX_ATTEMPTS {
                let len = rng.random_range(2..=n);
                let mut nodes: Vec<usize> = (0..n).collect();
                shuffle(&mut nodes, &mut rng);
                nodes.truncate(len);
                if g.cycle_is_free(&nodes) {
                    g.add_cycle(&nodes).expect("checked free");
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::ExhaustedAttempts(MAX_ATTEMPTS));
            }
        }
        debug_assert!(g.is_balanced());
        debug_assert!(g.is_connected());
        Ok(g)
    }

    fn cycle_is_free(&self, nodes: &[usize]) -> bool {
        nodes.iter().enumerate().all(|(k, &i)| {
            let j = nodes[(k + 1) % nodes.len()];
            !self.adj[j * self.n + i]
        })
    }

    fn add_cycle(&mut self, nodes: &[usize]) -> Result<()> {
        for (k, &i) in nodes.iter().enumerate() {
            let j = nodes[(k + 1) % nodes.len()];
            self.insert_edge(i, j)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[to * self.n + from]
    }

    /// Number of stored directed arcs; an undirected edge counts once.
    pub fn edge_count(&self) -> usize {
        let arcs = self.adj.iter().filter(|&&b| b).count();
        if self.directed {
            arcs
        } else {
            arcs / 2
        }
    }

    /// Adjacency entry in receiver-major orientation: row = receiver.
    pub fn adjacency_entry(&self, receiver: usize, sender: usize) -> bool {
        self.adj[receiver * self.n + sender]
    }

    pub fn in_degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.adj[i * self.n + j]).count()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.adj[j * self.n + i]).count()
    }

    /// (in-degrees, out-degrees); equal vectors for undirected graphs.
    pub fn degree_profile(&self) -> (Vec<usize>, Vec<usize>) {
        let ins = (0..self.n).map(|i| self.in_degree(i)).collect();
        let outs = (0..self.n).map(|i| self.out_degree(i)).collect();
        (ins, outs)
    }

    /// Per-node divergence out-degree minus in-degree is nowhere positive.
    /// By the handshake identity the total divergence is zero, so this is
    /// equivalent to in-degree equal to out-degree at every node.
    pub fn is_non_positive_divergence(&self) -> bool {
        (0..self.n).all(|i| self.out_degree(i) <= self.in_degree(i))
    }

    fn is_balanced(&self) -> bool {
        (0..self.n).all(|i| self.out_degree(i) == self.in_degree(i))
    }

    /// Connectivity: weak reachability for undirected graphs, strong
    /// connectivity (forward and reverse reachability from node 0) for
    /// directed graphs.
    pub fn is_connected(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        let forward = self.reach_count(false);
        if !self.directed {
            return forward == self.n;
        }
        forward == self.n && self.reach_count(true) == self.n
    }

    fn reach_count(&self, reverse: bool) -> usize {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                let connected = if reverse {
                    self.adj[u * self.n + v]
                } else {
                    self.adj[v * self.n + u]
                };
                if connected && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    }

    /// Two-colorability of the underlying undirected graph, by BFS coloring.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![-1i8; self.n];
        for start in 0..self.n {
            if color[start] != -1 {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in 0..self.n {
                    if !(self.adj[u * self.n + v] || self.adj[v * self.n + u]) {
                        continue;
                    }
                    if color[v] == -1 {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Parses the plain-text edge list format:
    ///
    /// ```text
    /// undirected 4
    /// # comment
    /// 1 2
    /// 2 3
    /// ```
    ///
    /// The header is `directed N` or `undirected N`; every following
    /// non-empty, non-comment line is a 1-based `i j` edge from i to j.
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match &mut graph {
                None => {
                    let mut parts = line.split_whitespace();
                    let kind = parts.next().unwrap_or_default();
                    let directed = match kind {
                        "directed" => true,
                        "undirected" => false,
                        other => {
                            return Err(Error::Parse {
                                line: line_no,
                                message: format!(
                                    "expected 'directed N' or 'undirected N', got '{other}'"
                                ),
                            })
                        }
                    };
                    let n: usize = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .filter(|&n| n > 0)
                        .ok_or(Error::Parse {
                            line: line_no,
                            message: "header needs a positive node count".into(),
                        })?;
                    if parts.next().is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "trailing tokens after header".into(),
                        });
                    }
                    graph = Some(Graph {
                        n,
                        directed,
                        adj: vec![false; n * n],
                    });
                }
                Some(g) => {
                    let mut parts = line.split_whitespace();
                    let read = |tok: Option<&str>| -> Result<usize> {
                        tok.and_then(|t| t.parse::<usize>().ok())
                            .filter(|&v| v >= 1)
                            .ok_or(Error::Parse {
                                line: line_no,
                                message: format!("expected 1-based edge 'i j', got '{line}'"),
                            })
                    };
                    let i = read(parts.next())?;
                    let j = read(parts.next())?;
                    if parts.next().is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "trailing tokens after edge".into(),
                        });
                    }
                    if i > g.n || j > g.n {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("edge ({i}, {j}) out of range for {} nodes", g.n),
                        });
                    }
                    g.insert_edge(i - 1, j - 1).map_err(|e| Error::Parse {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                }
            }
        }
        graph.ok_or(Error::Parse {
            line: 0,
            message: "empty input, missing header".into(),
        })
    }

    /// Canonical edge-list text: header, then edges with ascending source
    /// and ascending target (undirected edges emitted once, low node first).
    /// `parse(serialize(g))` reproduces `g` exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let kind = if self.directed { "directed" } else { "undirected" };
        out.push_str(&format!("{kind} {}\n", self.n));
        for i in 0..self.n {
            for j in 0..self.n {
                let present = self.adj[j * self.n + i];
                let canonical = self.directed || i < j;
                if present && canonical {
                    out.push_str(&format!("{} {}\n", i + 1, j + 1));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Graph({} {} nodes, {} edges)",
            if self.directed { "directed" } else { "undirected" },
            self.n,
            self.edge_count()
        )
    }
}

fn shuffle(items: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
