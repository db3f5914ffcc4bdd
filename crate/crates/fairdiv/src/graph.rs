//! Item graphs: simple undirected graphs whose vertices are the indivisible items.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is not simple: self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph is not simple: duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
}

/// Simple undirected graph on vertices `0..n`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl ItemGraph {
    /// Builds a graph from an edge list. Rejects loops, duplicates and
    /// out-of-range endpoints; edges are normalized to `(lo, hi)` sorted order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n {
                return Err(GraphError::VertexOutOfRange { vertex: a, n });
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange { vertex: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(ItemGraph {
            n,
            edges: norm,
            adj,
        })
    }

    /// Path with vertices in order `0 - 1 - ... - m-1`.
    pub fn path(m: usize) -> Self {
        let edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        ItemGraph::new(m, &edges).expect("path edges are simple")
    }

    /// Cycle `0 - 1 - ... - m-1 - 0`. Requires `m >= 3`.
    pub fn cycle(m: usize) -> Self {
        assert!(m >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        edges.push((0, m - 1));
        ItemGraph::new(m, &edges).expect("cycle edges are simple")
    }

    /// Star with center `0` and the given number of leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        ItemGraph::new(leaves + 1, &edges).expect("star edges are simple")
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Normalized `(lo, hi)` edges in sorted order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Whether the induced subgraph on `bundle` is connected.
    /// The empty bundle counts as connected.
    pub fn is_connected(&self, bundle: &[usize]) -> Result<bool, GraphError> {
        let mut member = vec![false; self.n];
        for &v in bundle {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            member[v] = true;
        }
        let Some(&start) = bundle.first() else {
            return Ok(true);
        };
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 1usize;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if member[w] && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        let distinct = member.iter().filter(|&&m| m).count();
        Ok(reached == distinct)
    }

    /// Whether the whole graph is connected. True for the empty graph.
    pub fn is_connected_graph(&self) -> bool {
        let all: Vec<usize> = (0..self.n).collect();
        self.is_connected(&all)
            .expect("full vertex set is in range")
    }

    /// True when the graph is connected and has no cycle.
    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edges.len() == self.n - 1 && self.is_connected_graph()
    }

    /// True when the graph is connected and has exactly one cycle.
    pub fn is_unicyclic(&self) -> bool {
        self.n > 0 && self.edges.len() == self.n && self.is_connected_graph()
    }

    /// Induced subgraph on `verts` plus the map from new indices to old ones.
    /// `verts` must be sorted and duplicate-free.
    pub fn induced(&self, verts: &[usize]) -> (ItemGraph, Vec<usize>) {
        debug_assert!(verts.windows(2).all(|w| w[0] < w[1]));
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            if local[a] != usize::MAX && local[b] != usize::MAX {
                edges.push((local[a], local[b]));
            }
        }
        let graph = ItemGraph::new(verts.len(), &edges).expect("induced edges stay simple");
        (graph, verts.to_vec())
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True when some edge joins a vertex of `a` to a vertex of `b`.
    pub fn bundles_adjacent(&self, a: &[usize], b: &[usize]) -> bool {
        let mut in_b = vec![false; self.n];
        for &v in b {
            in_b[v] = true;
        }
        a.iter().any(|&v| self.adj[v].iter().any(|&w| in_b[w]))
    }

    /// If the graph is a path, the vertices in path order (the endpoint with
    /// the smaller index first); otherwise `None`.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if self.n == 0 {
            return None;
        }
        if self.n == 1 {
            return Some(vec![0]);
        }
        if !self.is_tree() || self.adj.iter().any(|a| a.len() > 2) {
            return None;
        }
        let start = (0..self.n).find(|&v| self.degree(v) == 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while order.len() < self.n {
            let &next = self.adj[cur].iter().find(|&&w| w != prev)?;
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}
