//! Simple undirected graphs, BFS orderings, and the adjacency-row sequence
//! representation.
//!
//! A graph over `n` nodes is encoded, under a node ordering, as a list of
//! binary rows: row `i` (1-based) has length `i - 1` and its `j`-th entry
//! says whether the node placed at position `i` links back to the node at
//! position `j`. Partially observed graphs produce rows with `Unknown`
//! entries wherever a missing node is involved; those entries are what the
//! completion algorithms impute.

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Errors from graph construction, encoding, and edge-list parsing.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node {0} out of range for graph with {1} nodes")]
    InvalidNode(usize, usize),
    #[error("ordering covers {0} nodes but graph has {1}")]
    OrderingMismatch(usize, usize),
    #[error("permutation is not a bijection over 0..{0}")]
    NotAPermutation(usize),
    #[error("sequence row {row} has an unimputed entry at position {col}")]
    UnknownEntry { row: usize, col: usize },
    #[error("row {row} has length {got}, expected {expected}")]
    BadRowLength { row: usize, got: usize, expected: usize },
    #[error("edge list line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected, unweighted simple graph over dense node ids `0..n`.
///
/// Self-loops and duplicate edges are rejected at insertion. Optional string
/// labels survive import/export round trips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
            edge_count: 0,
            labels: None,
        }
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Insert an undirected edge. Duplicate insertions are no-ops; self-loops
    /// are errors.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.node_count();
        if u >= n {
            return Err(GraphError::InvalidNode(u, n));
        }
        if v >= n {
            return Err(GraphError::InvalidNode(v, n));
        }
        if u == v {
            return Err(GraphError::InvalidNode(u, n));
        }
        if self.adj[u].insert(v) {
            self.adj[v].insert(u);
            self.edge_count += 1;
        }
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|s| s.contains(&v))
    }

    /// Neighbors in ascending id order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().copied()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs.iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.node_count());
        self.labels = Some(labels);
    }

    /// Label of a node, falling back to its dense id.
    pub fn label_of(&self, u: usize) -> String {
        match &self.labels {
            Some(l) => l[u].clone(),
            None => u.to_string(),
        }
    }

    /// Subgraph induced by `keep` (old node ids). Returns the subgraph and
    /// the map from new id to old id; `keep` order defines the new ids.
    pub fn induced_subgraph(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut old_to_new = vec![usize::MAX; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut g = Graph::new(keep.len());
        for (new_u, &old_u) in keep.iter().enumerate() {
            for &old_v in self.adj[old_u].iter() {
                let new_v = old_to_new[old_v];
                if new_v != usize::MAX && new_u < new_v {
                    g.add_edge(new_u, new_v).expect("induced edge in range");
                }
            }
        }
        if let Some(labels) = &self.labels {
            g.labels = Some(keep.iter().map(|&old| labels[old].clone()).collect());
        }
        (g, keep.to_vec())
    }

    /// Connected components as sorted node lists, largest first (ties broken
    /// by smallest member id).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &v in self.adj[u].iter() {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// Subgraph induced by the largest connected component.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let comps = self.components();
        match comps.first() {
            Some(c) => self.induced_subgraph(c),
            None => (Graph::new(0), Vec::new()),
        }
    }
}

/// A graph plus the number of nodes known to be missing from it.
///
/// Missing nodes carry the highest indices of the completed graph: the total
/// node set is `0..observed.node_count() + missing_node_count`, with ids at
/// and above `observed.node_count()` acting as placeholders.
#[derive(Debug, Clone)]
pub struct PartialObservation {
    pub observed: Graph,
    pub missing_node_count: usize,
}

impl PartialObservation {
    pub fn new(observed: Graph, missing_node_count: usize) -> Self {
        PartialObservation {
            observed,
            missing_node_count,
        }
    }

    /// Node budget of the completed graph.
    pub fn total_nodes(&self) -> usize {
        self.observed.node_count() + self.missing_node_count
    }

    pub fn is_observed(&self, node: usize) -> bool {
        node < self.observed.node_count()
    }
}

/// Bijection between generation positions and node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeOrdering {
    order: Vec<usize>,    // position -> node
    position: Vec<usize>, // node -> position
}

impl NodeOrdering {
    /// Build from a position -> node vector; must be a permutation of `0..n`.
    pub fn from_order(order: Vec<usize>) -> Result<Self, GraphError> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &node) in order.iter().enumerate() {
            if node >= n || position[node] != usize::MAX {
                return Err(GraphError::NotAPermutation(n));
            }
            position[node] = pos;
        }
        Ok(NodeOrdering { order, position })
    }

    pub fn identity(n: usize) -> Self {
        NodeOrdering {
            order: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Node placed at `pos` (0-based).
    pub fn node_at(&self, pos: usize) -> usize {
        self.order[pos]
    }

    /// Position (0-based) of `node`.
    pub fn position_of(&self, node: usize) -> usize {
        self.position[node]
    }

    pub fn as_order(&self) -> &[usize] {
        &self.order
    }
}

/// One entry of an adjacency row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqEntry {
    Zero,
    One,
    Unknown,
}

impl SeqEntry {
    pub fn from_bit(b: bool) -> Self {
        if b {
            SeqEntry::One
        } else {
            SeqEntry::Zero
        }
    }

    pub fn known_bit(self) -> Option<bool> {
        match self {
            SeqEntry::Zero => Some(false),
            SeqEntry::One => Some(true),
            SeqEntry::Unknown => None,
        }
    }
}

/// Adjacency-row sequence of a graph under some node ordering.
///
/// `rows[k]` (0-based) describes the node at position `k` and has exactly `k`
/// entries; entry `j` refers to the node at position `j`. A sequence is
/// "fully known" when no entry is [`SeqEntry::Unknown`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencySequence {
    rows: Vec<Vec<SeqEntry>>,
}

impl AdjacencySequence {
    /// Take ownership of raw rows, enforcing the row-length law.
    pub fn from_rows(rows: Vec<Vec<SeqEntry>>) -> Result<Self, GraphError> {
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(GraphError::BadRowLength {
                    row: k + 1,
                    got: row.len(),
                    expected: k,
                });
            }
        }
        Ok(AdjacencySequence { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row for the node at 0-based position `k` (length `k`).
    pub fn row(&self, k: usize) -> &[SeqEntry] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<SeqEntry>] {
        &self.rows
    }

    pub fn set_row(&mut self, k: usize, row: Vec<SeqEntry>) {
        assert_eq!(row.len(), k, "row {k} must have {k} entries");
        self.rows[k] = row;
    }

    pub fn unknown_count(&self) -> usize {
        self.rows
            .iter()
            .flatten()
            .filter(|e| matches!(e, SeqEntry::Unknown))
            .count()
    }

    pub fn is_fully_known(&self) -> bool {
        self.unknown_count() == 0
    }
}

/// BFS visit order from `start`, with rng-shuffled neighbor expansion.
///
/// Repeated calls with fresh rng state give different valid BFS orders, which
/// is how training samples several orderings per graph. Nodes unreachable
/// from `start` are appended in shuffled order.
pub fn bfs_ordering<T: Rng>(
    g: &Graph,
    start: usize,
    rng: &mut T,
) -> Result<NodeOrdering, GraphError> {
    let n = g.node_count();
    if start >= n {
        return Err(GraphError::InvalidNode(start, n));
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        let mut next: Vec<usize> = g.neighbors(u).filter(|&v| !seen[v]).collect();
        next.shuffle(rng);
        for v in next {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    let mut rest: Vec<usize> = (0..n).filter(|&v| !seen[v]).collect();
    rest.shuffle(rng);
    order.extend(rest);
    NodeOrdering::from_order(order)
}

/// Encode a fully observed graph as adjacency rows under `ord`.
pub fn encode_sequence(g: &Graph, ord: &NodeOrdering) -> Result<AdjacencySequence, GraphError> {
    if ord.len() != g.node_count() {
        return Err(GraphError::OrderingMismatch(ord.len(), g.node_count()));
    }
    let rows = (0..ord.len())
        .map(|i| {
            let vi = ord.node_at(i);
            (0..i)
                .map(|j| SeqEntry::from_bit(g.has_edge(ord.node_at(j), vi)))
                .collect()
        })
        .collect();
    Ok(AdjacencySequence { rows })
}

/// Decode adjacency rows back into a graph. Fails on `Unknown` entries.
pub fn decode_sequence(
    seq: &AdjacencySequence,
    ord: &NodeOrdering,
) -> Result<Graph, GraphError> {
    if ord.len() != seq.len() {
        return Err(GraphError::OrderingMismatch(ord.len(), seq.len()));
    }
    let mut g = Graph::new(ord.len());
    for (i, row) in seq.rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            match entry.known_bit() {
                Some(true) => g.add_edge(ord.node_at(j), ord.node_at(i))?,
                Some(false) => {}
                None => return Err(GraphError::UnknownEntry { row: i + 1, col: j + 1 }),
            }
        }
    }
    Ok(g)
}

/// Encode a partial observation: entries between two observed nodes come
/// from the observed graph (absent edges are genuine zeros under the greedy
/// algorithm's assumption), anything touching a placeholder is `Unknown`.
pub fn encode_partial(
    obs: &PartialObservation,
    ord: &NodeOrdering,
) -> Result<AdjacencySequence, GraphError> {
    if ord.len() != obs.total_nodes() {
        return Err(GraphError::OrderingMismatch(ord.len(), obs.total_nodes()));
    }
    let rows = (0..ord.len())
        .map(|i| {
            let vi = ord.node_at(i);
            (0..i)
                .map(|j| {
                    let vj = ord.node_at(j);
                    if obs.is_observed(vi) && obs.is_observed(vj) {
                        SeqEntry::from_bit(obs.observed.has_edge(vj, vi))
                    } else {
                        SeqEntry::Unknown
                    }
                })
                .collect()
        })
        .collect();
    Ok(AdjacencySequence { rows })
}

/// Outcome of loading an edge list: the normalized graph plus counts of the
/// lines that were dropped.
#[derive(Debug, Clone, Default)]
pub struct LoadWarnings {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Parse edge-list text: one `u v` pair per line, `#` starts a comment,
/// tokens are arbitrary whitespace-separated labels. Labels are mapped to
/// dense 0-based ids in first-appearance order and stored on the graph.
pub fn parse_edge_list(text: &str) -> Result<(Graph, LoadWarnings), GraphError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut warnings = LoadWarnings::default();

    let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&id) = index.get(tok) {
            return id;
        }
        let id = labels.len();
        labels.push(tok.to_string());
        index.insert(tok.to_string(), id);
        id
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut toks = line.split_whitespace();
        let (Some(a), b) = (toks.next(), toks.next()) else {
            continue;
        };
        let Some(b) = b else {
            return Err(GraphError::Parse {
                line: lineno + 1,
                msg: format!("expected two tokens, got one: {a:?}"),
            });
        };
        if toks.next().is_some() {
            return Err(GraphError::Parse {
                line: lineno + 1,
                msg: "expected exactly two tokens".into(),
            });
        }
        let u = intern(a, &mut labels);
        let v = intern(b, &mut labels);
        if u == v {
            warnings.self_loops_dropped += 1;
            continue;
        }
        edges.push((u, v));
    }

    let mut g = Graph::new(labels.len());
    for (u, v) in edges {
        if g.has_edge(u, v) {
            warnings.duplicates_dropped += 1;
        } else {
            g.add_edge(u, v)?;
        }
    }
    g.set_labels(labels);
    Ok((g, warnings))
}

pub fn read_edge_list(path: &Path) -> Result<(Graph, LoadWarnings), GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Render a graph in the edge-list format, using labels when present.
pub fn edge_list_string(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", g.label_of(u), g.label_of(v));
    }
    out
}

pub fn write_edge_list(g: &Graph, path: &Path) -> Result<(), GraphError> {
    std::fs::write(path, edge_list_string(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig2_graph() -> Graph {
        // A-B, A-C, B-D, C-D with A=0, B=1, C=2, D=3.
        Graph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn bfs_on_path_is_unique() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ord = bfs_ordering(&g, 0, &mut rng).unwrap();
        assert_eq!(ord.as_order(), &[0, 1, 2]);
    }

    #[test]
    fn bfs_star_visits_center_first() {
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        for seed in 0..8 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ord = bfs_ordering(&g, 0, &mut rng).unwrap();
            assert_eq!(ord.node_at(0), 0);
            let mut leaves = [ord.node_at(1), ord.node_at(2)];
            leaves.sort_unstable();
            assert_eq!(leaves, [1, 2]);
        }
    }

    #[test]
    fn bfs_invalid_start() {
        let g = Graph::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(bfs_ordering(&g, 5, &mut rng).is_err());
    }

    #[test]
    fn bfs_appends_unreachable_nodes() {
        // Two components: 0-1 and 2-3.
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ord = bfs_ordering(&g, 0, &mut rng).unwrap();
        assert_eq!(ord.node_at(0), 0);
        assert_eq!(ord.node_at(1), 1);
        let mut tail = [ord.node_at(2), ord.node_at(3)];
        tail.sort_unstable();
        assert_eq!(tail, [2, 3]);
    }

    #[test]
    fn bfs_validity_property() {
        // Every non-start node in the start's component has an earlier
        // neighbor in the ordering.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..50 {
            let g = random_graph(20, 0.15, trial);
            let ord = bfs_ordering(&g, 0, &mut rng).unwrap();
            let comp: std::collections::HashSet<usize> =
                g.components().into_iter().find(|c| c.contains(&0)).unwrap().into_iter().collect();
            for pos in 1..ord.len() {
                let v = ord.node_at(pos);
                if !comp.contains(&v) {
                    continue;
                }
                let has_earlier = (0..pos).any(|p| g.has_edge(ord.node_at(p), v));
                assert!(has_earlier, "node {v} at pos {pos} has no earlier neighbor");
            }
        }
    }

    #[test]
    fn encode_fig2_rows() {
        let g = fig2_graph();
        let ord = NodeOrdering::identity(4);
        let seq = encode_sequence(&g, &ord).unwrap();
        assert_eq!(seq.row(0), &[] as &[SeqEntry]);
        assert_eq!(seq.row(1), &[SeqEntry::One]);
        assert_eq!(seq.row(2), &[SeqEntry::One, SeqEntry::Zero]);
        assert_eq!(seq.row(3), &[SeqEntry::Zero, SeqEntry::One, SeqEntry::One]);
    }

    #[test]
    fn encode_edgeless_and_triangle() {
        let ord = NodeOrdering::identity(3);
        let empty = Graph::new(3);
        let seq = encode_sequence(&empty, &ord).unwrap();
        assert_eq!(seq.row(1), &[SeqEntry::Zero]);
        assert_eq!(seq.row(2), &[SeqEntry::Zero, SeqEntry::Zero]);

        let tri = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let seq = encode_sequence(&tri, &ord).unwrap();
        assert_eq!(seq.row(1), &[SeqEntry::One]);
        assert_eq!(seq.row(2), &[SeqEntry::One, SeqEntry::One]);
    }

    #[test]
    fn decode_fig2_rows() {
        let ord = NodeOrdering::identity(4);
        let seq = AdjacencySequence::from_rows(vec![
            vec![],
            vec![SeqEntry::One],
            vec![SeqEntry::One, SeqEntry::Zero],
            vec![SeqEntry::Zero, SeqEntry::One, SeqEntry::One],
        ])
        .unwrap();
        let g = decode_sequence(&seq, &ord).unwrap();
        assert_eq!(g, fig2_graph());
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn decode_rejects_unknown() {
        let ord = NodeOrdering::identity(2);
        let seq = AdjacencySequence::from_rows(vec![vec![], vec![SeqEntry::Unknown]]).unwrap();
        assert!(matches!(
            decode_sequence(&seq, &ord),
            Err(GraphError::UnknownEntry { .. })
        ));
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        g
    }

    fn random_ordering(n: usize, rng: &mut ChaCha8Rng) -> NodeOrdering {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        NodeOrdering::from_order(order).unwrap()
    }

    #[test]
    fn round_trip_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..200 {
            let n = 2 + (trial % 29);
            let g = random_graph(n, 0.3, trial as u64);
            let ord = random_ordering(n, &mut rng);
            let seq = encode_sequence(&g, &ord).unwrap();
            for (k, row) in seq.rows().iter().enumerate() {
                assert_eq!(row.len(), k);
            }
            let back = decode_sequence(&seq, &ord).unwrap();
            assert_eq!(back.edges(), g.edges());
        }
    }

    #[test]
    fn encode_partial_fig3() {
        // A=0, B=1, C=2 observed with A-B, B-C; two missing placeholders.
        let observed = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let obs = PartialObservation::new(observed, 2);
        let ord = NodeOrdering::identity(5);
        let seq = encode_partial(&obs, &ord).unwrap();
        assert_eq!(seq.row(1), &[SeqEntry::One]);
        assert_eq!(seq.row(2), &[SeqEntry::Zero, SeqEntry::One]);
        assert_eq!(seq.row(3), &[SeqEntry::Unknown; 3]);
        assert_eq!(seq.row(4), &[SeqEntry::Unknown; 4]);
    }

    #[test]
    fn encode_partial_zero_missing_matches_full() {
        let g = fig2_graph();
        let obs = PartialObservation::new(g.clone(), 0);
        let ord = NodeOrdering::identity(4);
        assert_eq!(
            encode_partial(&obs, &ord).unwrap(),
            encode_sequence(&g, &ord).unwrap()
        );
    }

    #[test]
    fn encode_partial_unknown_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..20 {
            let n_obs = 3 + (trial % 7);
            let missing = trial % 5;
            let g = random_graph(n_obs, 0.4, trial as u64);
            let obs = PartialObservation::new(g, missing);
            let n = obs.total_nodes();
            let ord = random_ordering(n, &mut rng);
            let seq = encode_partial(&obs, &ord).unwrap();
            let expected = n * (n - 1) / 2 - n_obs * (n_obs - 1) / 2;
            assert_eq!(seq.unknown_count(), expected);
        }
    }

    #[test]
    fn parse_edge_list_normalizes() {
        let text = "# friendships\n a b \nb c\na a\na b # dup\n";
        let (g, warn) = parse_edge_list(text).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(warn.self_loops_dropped, 1);
        assert_eq!(warn.duplicates_dropped, 1);
        assert_eq!(g.label_of(0), "a");
        // Round trip through the writer keeps labels.
        let (g2, _) = parse_edge_list(&edge_list_string(&g)).unwrap();
        assert_eq!(g2.node_count(), 3);
        assert_eq!(g2.edge_count(), 2);
    }

    #[test]
    fn largest_component_extraction() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let (lcc, map) = g.largest_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(lcc.edge_count(), 2);
    }
}
