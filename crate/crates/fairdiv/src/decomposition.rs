//! Blocks, cut vertices, bipolar orderings, and the side/merge machinery the
//! two-agent algorithms are built on.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{GraphError, ItemGraph};
use crate::utility::UtilityFunction;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not biconnected")]
    NotBiconnected,
    #[error("source and sink must differ")]
    SourceEqualsSink,
    #[error("no block with id {0}")]
    UnknownBlock(usize),
    #[error("block {block} and cut vertex {cut} are not incident")]
    NotIncident { block: usize, cut: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Blocks (maximal biconnected subgraphs), cut vertices, and their incidence
/// tree. Bridges are ordinary 2-vertex blocks; a single vertex is one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCutTree {
    /// Vertex set of each block, sorted. Ids are discovery order.
    pub blocks: Vec<Vec<usize>>,
    /// Sorted.
    pub cut_vertices: Vec<usize>,
    /// (block id, cut vertex), one per cut vertex contained in a block.
    pub tree_edges: Vec<(usize, usize)>,
}

impl BlockCutTree {
    pub fn is_cut_vertex(&self, v: usize) -> bool {
        self.cut_vertices.binary_search(&v).is_ok()
    }

    pub fn incident(&self, block: usize, cut: usize) -> bool {
        self.tree_edges.contains(&(block, cut))
    }

    /// Blocks containing vertex `v`, by id.
    pub fn blocks_of_vertex(&self, v: usize) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.binary_search(&v).is_ok())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Single-pass depth-first lowpoint decomposition into blocks.
pub fn block_cut_tree(graph: &ItemGraph) -> Result<BlockCutTree, DecompositionError> {
    let n = graph.n_vertices();
    if !graph.is_connected_graph() {
        return Err(DecompositionError::NotConnected);
    }
    if n == 0 {
        return Ok(BlockCutTree {
            blocks: Vec::new(),
            cut_vertices: Vec::new(),
            tree_edges: Vec::new(),
        });
    }
    if n == 1 {
        return Ok(BlockCutTree {
            blocks: vec![vec![0]],
            cut_vertices: Vec::new(),
            tree_edges: Vec::new(),
        });
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut is_cut = vec![false; n];
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut timer = 0;
    disc[0] = 0;
    low[0] = 0;
    timer += 1;
    let mut root_children = 0;
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some(frame) = stack.last_mut() {
        let v = frame.0;
        if frame.1 < graph.neighbors(v).len() {
            let w = graph.neighbors(v)[frame.1];
            frame.1 += 1;
            if disc[w] == usize::MAX {
                parent[w] = v;
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                edge_stack.push((v, w));
                stack.push((w, 0));
            } else if w != parent[v] && disc[w] < disc[v] {
                edge_stack.push((v, w));
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(pf) = stack.last() {
                let p = pf.0;
                low[p] = low[p].min(low[v]);
                if low[v] >= disc[p] {
                    // p closes a block rooted at the tree edge (p, v).
                    let mut verts = BTreeSet::new();
                    while let Some(&(a, b)) = edge_stack.last() {
                        edge_stack.pop();
                        verts.insert(a);
                        verts.insert(b);
                        if (a, b) == (p, v) {
                            break;
                        }
                    }
                    blocks.push(verts.into_iter().collect());
                    if p == 0 {
                        root_children += 1;
                    } else {
                        is_cut[p] = true;
                    }
                }
            }
        }
    }
    debug_assert!(edge_stack.is_empty());
    if root_children >= 2 {
        is_cut[0] = true;
    }
    let cut_vertices: Vec<usize> = (0..n).filter(|&v| is_cut[v]).collect();
    let mut tree_edges = Vec::new();
    for (id, block) in blocks.iter().enumerate() {
        for &v in block {
            if is_cut[v] {
                tree_edges.push((id, v));
            }
        }
    }
    Ok(BlockCutTree {
        blocks,
        cut_vertices,
        tree_edges,
    })
}

/// A vertex order whose every prefix and every suffix induces a connected
/// subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipolarOrdering {
    pub sequence: Vec<usize>,
    pub source: usize,
    pub sink: usize,
}

/// Orders a biconnected graph from `source` to `sink` by depth-first
/// numbering: the source–sink edge is forced first (added virtually when
/// absent, which no proper prefix or suffix can use), then each vertex is
/// spliced next to its parent on the side chosen by the sign of its lowpoint
/// vertex.
pub fn bipolar_ordering(
    graph: &ItemGraph,
    source: usize,
    sink: usize,
) -> Result<BipolarOrdering, DecompositionError> {
    let n = graph.n_vertices();
    for v in [source, sink] {
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n }.into());
        }
    }
    if source == sink {
        return Err(DecompositionError::SourceEqualsSink);
    }
    let tree = block_cut_tree(graph)?;
    if tree.blocks.len() != 1 {
        return Err(DecompositionError::NotBiconnected);
    }
    if n == 2 {
        return Ok(BipolarOrdering {
            sequence: vec![source, sink],
            source,
            sink,
        });
    }

    let mut adj: Vec<Vec<usize>> = (0..n).map(|v| graph.neighbors(v).to_vec()).collect();
    if !graph.has_edge(source, sink) {
        adj[source].push(sink);
        adj[sink].push(source);
    }
    let pos = adj[source].iter().position(|&w| w == sink).unwrap();
    adj[source].swap(0, pos);

    // Depth-first preorder with lowpoint vertices. Forcing the sink first
    // makes it the source's only tree child in a biconnected graph.
    let mut pre = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut lowvert: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    pre[source] = 0;
    order.push(source);
    let mut timer = 1;
    let mut stack: Vec<(usize, usize)> = vec![(source, 0)];
    while let Some(frame) = stack.last_mut() {
        let v = frame.0;
        if frame.1 < adj[v].len() {
            let w = adj[v][frame.1];
            frame.1 += 1;
            if pre[w] == usize::MAX {
                pre[w] = timer;
                timer += 1;
                parent[w] = v;
                order.push(w);
                stack.push((w, 0));
            } else if w != parent[v] && pre[w] < pre[lowvert[v]] {
                lowvert[v] = w;
            }
        } else {
            stack.pop();
            if let Some(pf) = stack.last() {
                let p = pf.0;
                if pre[lowvert[v]] < pre[lowvert[p]] {
                    lowvert[p] = lowvert[v];
                }
            }
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Sign {
        Minus,
        Plus,
    }
    let mut sign = vec![Sign::Minus; n];
    let mut next = vec![usize::MAX; n];
    let mut prev = vec![usize::MAX; n];
    next[source] = sink;
    prev[sink] = source;
    for &v in &order {
        if v == source || v == sink {
            continue;
        }
        let p = parent[v];
        if sign[lowvert[v]] == Sign::Minus {
            let before = prev[p];
            debug_assert_ne!(before, usize::MAX);
            next[before] = v;
            prev[v] = before;
            next[v] = p;
            prev[p] = v;
            sign[p] = Sign::Plus;
        } else {
            let after = next[p];
            debug_assert_ne!(after, usize::MAX);
            prev[after] = v;
            next[v] = after;
            prev[v] = p;
            next[p] = v;
            sign[p] = Sign::Minus;
        }
    }
    let mut sequence = Vec::with_capacity(n);
    let mut at = source;
    while at != usize::MAX {
        sequence.push(at);
        at = next[at];
    }
    debug_assert_eq!(sequence.len(), n);
    debug_assert_eq!(*sequence.last().unwrap(), sink);
    Ok(BipolarOrdering {
        sequence,
        source,
        sink,
    })
}

/// The two sides of the graph split at a (block, cut vertex) incidence:
/// `x_side` is the block's side without the cut, `y_side` the rest with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidePartition {
    pub block: usize,
    pub cut: usize,
    /// Sorted; excludes the cut vertex.
    pub x_side: Vec<usize>,
    /// Sorted; contains the cut vertex.
    pub y_side: Vec<usize>,
}

pub fn side_partition(
    graph: &ItemGraph,
    tree: &BlockCutTree,
    block: usize,
    cut: usize,
) -> Result<SidePartition, DecompositionError> {
    if !tree.incident(block, cut) {
        return Err(DecompositionError::NotIncident { block, cut });
    }
    // Walk the incidence tree from the cut without crossing into `block`.
    let mut seen_block = vec![false; tree.blocks.len()];
    let mut seen_cut = vec![false; graph.n_vertices()];
    seen_cut[cut] = true;
    let mut queue = vec![cut];
    while let Some(c) = queue.pop() {
        for &(b, cv) in &tree.tree_edges {
            if cv != c || seen_block[b] || (c == cut && b == block) {
                continue;
            }
            seen_block[b] = true;
            for &v in &tree.blocks[b] {
                if tree.is_cut_vertex(v) && !seen_cut[v] {
                    seen_cut[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    let mut y: BTreeSet<usize> = [cut].into();
    for (b, block_verts) in tree.blocks.iter().enumerate() {
        if seen_block[b] {
            y.extend(block_verts.iter().copied());
        }
    }
    let y_side: Vec<usize> = y.iter().copied().collect();
    let x_side: Vec<usize> = (0..graph.n_vertices()).filter(|v| !y.contains(v)).collect();
    Ok(SidePartition {
        block,
        cut,
        x_side,
        y_side,
    })
}

/// A block with everything beyond each of its cut vertices folded into that
/// vertex. The result is biconnected (or a single edge/vertex) and its
/// utilities sum the absorbed originals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedBlock {
    pub graph: ItemGraph,
    pub utility: UtilityFunction,
    /// `origins[i]` = original vertices folded into local vertex `i`, sorted.
    pub origins: Vec<Vec<usize>>,
}

impl MergedBlock {
    /// Original vertices behind a bundle of local vertices, sorted.
    pub fn lift(&self, bundle: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = bundle
            .iter()
            .flat_map(|&v| self.origins[v].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Folds the exterior of `block` into its cut vertices. Additive utilities
/// only: absorbed values are summed.
pub fn merge_exterior(
    graph: &ItemGraph,
    u: &UtilityFunction,
    tree: &BlockCutTree,
    block: usize,
) -> Result<MergedBlock, DecompositionError> {
    let vals = u
        .values()
        .expect("merging folds utilities by summation, which needs additive utilities");
    if block >= tree.blocks.len() {
        return Err(DecompositionError::UnknownBlock(block));
    }
    let verts = &tree.blocks[block];
    let (local_graph, to_global) = graph.induced(verts);
    let mut origins: Vec<Vec<usize>> = to_global.iter().map(|&v| vec![v]).collect();
    for (i, &v) in to_global.iter().enumerate() {
        if tree.incident(block, v) {
            origins[i] = side_partition(graph, tree, block, v)?.y_side;
        }
    }
    let weights: Vec<u64> = origins
        .iter()
        .map(|orig| orig.iter().map(|&v| vals[v]).sum())
        .collect();
    Ok(MergedBlock {
        graph: local_graph,
        utility: UtilityFunction::additive(weights),
        origins,
    })
}
