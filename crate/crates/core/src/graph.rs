//! Undirected simple graphs, the MIS cost function and graph generators.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored canonically as `(u, v)` with `u < v`, sorted and
/// deduplicated, so two graphs compare equal iff they have the same edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop on vertex {u}")));
            }
            canon.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_canonical(n, canon.into_iter().collect()))
    }

    fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        Self::from_canonical(n, edges)
    }

    pub fn path(n: usize) -> Self {
        Self::from_canonical(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((0, n - 1));
            edges.sort_unstable();
        }
        Self::from_canonical(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Δ(G); zero for edgeless graphs.
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbourhood bitmasks, valid for graphs with at most 64 vertices.
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.adj
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect()
    }
}

/// One status bit per vertex: `true` means the vertex is selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn from_set(n: usize, set: &IndependentSet) -> Self {
        let mut bits = vec![false; n];
        for &v in set.members() {
            bits[v] = true;
        }
        Assignment(bits)
    }

    /// Low `n` bits of `mask`, bit i = vertex i.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Assignment((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }
}

/// A set of vertex ids. Independence is a property checked against a graph
/// with [`is_independent`], not an invariant of the type itself.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndependentSet(BTreeSet<usize>);

impl IndependentSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        IndependentSet(members.into_iter().collect())
    }

    pub fn from_mask(mask: u64) -> Self {
        IndependentSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }
}

impl FromIterator<usize> for IndependentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndependentSet::new(iter)
    }
}

/// True iff no edge of `g` has both endpoints in `s`.
pub fn is_independent(g: &Graph, s: &IndependentSet) -> Result<bool> {
    if let Some(&v) = s.members().iter().find(|&&v| v >= g.n()) {
        return Err(Error::input(format!(
            "vertex {v} out of range for graph with {} vertices",
            g.n()
        )));
    }
    Ok(g.edges()
        .iter()
        .all(|&(u, v)| !(s.contains(u) && s.contains(v))))
}

/// C(z) = -Σ z_i + U Σ_{(i,j) ∈ E} z_i z_j.
pub fn cost(g: &Graph, z: &Assignment, penalty: f64) -> Result<f64> {
    if z.len() != g.n() {
        return Err(Error::input(format!(
            "assignment length {} does not match vertex count {}",
            z.len(),
            g.n()
        )));
    }
    if penalty <= g.max_degree() as f64 {
        log::warn!(
            "penalty U = {penalty} does not exceed the maximum degree {}; minima may not be independent sets",
            g.max_degree()
        );
    }
    let selected = z.selected().count() as f64;
    let violated = g.edges().iter().filter(|&&(u, v)| z.0[u] && z.0[v]).count() as f64;
    Ok(-selected + penalty * violated)
}

/// Default penalty for combinatorial checks: the smallest integer above Δ(G).
pub fn default_penalty(g: &Graph) -> f64 {
    (g.max_degree() + 1) as f64
}

pub fn max_degree(g: &Graph) -> usize {
    g.max_degree()
}

/// K₃₃⁺: K_{3,3} between {1,2,3} and {4,5,6}, a clique on {4,5,6}, and
/// vertex 0 attached to {1,2,3}.
pub fn k33_plus() -> Graph {
    let mut edges = vec![(0, 1), (0, 2), (0, 3)];
    for u in 1..=3 {
        for v in 4..=6 {
            edges.push((u, v));
        }
    }
    edges.extend([(4, 5), (4, 6), (5, 6)]);
    Graph::new(7, edges).expect("static edge list is valid")
}

/// Sample G(n, p), then trim uniformly random incident edges from every
/// vertex whose degree exceeds `dmax`. Deterministic in `seed`.
pub fn erdos_renyi_bounded(n: usize, p: f64, dmax: usize, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::input(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                adj[u].insert(v);
                adj[v].insert(u);
            }
        }
    }
    for v in 0..n {
        while adj[v].len() > dmax {
            let incident: Vec<usize> = adj[v].iter().copied().collect();
            let &w = incident.choose(&mut rng).expect("degree > dmax >= 0");
            adj[v].remove(&w);
            adj[w].remove(&v);
        }
    }
    let edges = (0..n).flat_map(|u| {
        adj[u]
            .iter()
            .filter(move |&&v| v > u)
            .map(move |&v| (u, v))
            .collect::<Vec<_>>()
    });
    Graph::new(n, edges)
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parse `{"n": .., "edges": [[u, v], ..]}`.
pub fn read_graph(text: &str) -> Result<Graph> {
    let raw: GraphJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    for (i, &[u, v]) in raw.edges.iter().enumerate() {
        if u >= raw.n || v >= raw.n || u == v {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!("edges[{i}] = [{u}, {v}] is invalid for n = {}", raw.n),
            });
        }
    }
    Graph::new(raw.n, raw.edges.into_iter().map(|[u, v]| (u, v)))
}

/// Serialize with canonical `u < v` edge ordering.
pub fn write_graph(g: &Graph) -> String {
    let raw = GraphJson {
        n: g.n(),
        edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&raw).expect("graph serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndependentSet {
        IndependentSet::new(v.iter().copied())
    }

    #[test]
    fn k33_plus_structure() {
        let g = k33_plus();
        assert_eq!(g.edge_count(), 15);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(4), 5);
        assert_eq!(max_degree(&g), 5);
    }

    #[test]
    fn independence_examples() {
        let g = k33_plus();
        assert!(is_independent(&g, &set(&[1, 2, 3])).unwrap());
        assert!(is_independent(&g, &set(&[])).unwrap());
        assert!(!is_independent(&g, &set(&[4, 5])).unwrap());
        assert!(is_independent(&g, &set(&[7])).is_err());
    }

    #[test]
    fn cost_examples() {
        let g = k33_plus();
        assert_eq!(cost(&g, &Assignment::zeros(7), 10.0).unwrap(), 0.0);
        let z = Assignment::from_set(7, &set(&[1, 2, 3]));
        assert_eq!(cost(&g, &z, 10.0).unwrap(), -3.0);
        let z = Assignment::from_set(7, &set(&[4, 5]));
        assert_eq!(cost(&g, &z, 10.0).unwrap(), 8.0);
        assert!(cost(&g, &Assignment::zeros(6), 10.0).is_err());
    }

    #[test]
    fn max_degree_small_cases() {
        assert_eq!(max_degree(&Graph::empty(5)), 0);
        assert_eq!(max_degree(&Graph::path(2)), 1);
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(3, [(1, 1)]).is_err());
        let g = Graph::new(3, [(1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn erdos_renyi_examples() {
        assert_eq!(erdos_renyi_bounded(5, 0.0, 6, 1).unwrap(), Graph::empty(5));
        assert_eq!(
            erdos_renyi_bounded(4, 1.0, 3, 1).unwrap(),
            Graph::complete(4)
        );
        let g = erdos_renyi_bounded(40, 0.3, 6, 7).unwrap();
        assert!(g.max_degree() <= 6);
        assert_eq!(g, erdos_renyi_bounded(40, 0.3, 6, 7).unwrap());
        assert!(erdos_renyi_bounded(4, 1.5, 3, 1).is_err());
    }

    #[test]
    fn json_examples() {
        let g = read_graph(r#"{"n":2,"edges":[[0,1]]}"#).unwrap();
        assert_eq!(g, Graph::path(2));
        let k = k33_plus();
        assert_eq!(read_graph(&write_graph(&k)).unwrap(), k);
        assert!(matches!(
            read_graph(r#"{"n":2,"edges":[[0,2]]}"#),
            Err(Error::Parse { .. })
        ));
        match read_graph("{\"n\":2,\n \"edges\": [[0,1]") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn write_uses_canonical_order() {
        let g = Graph::new(3, [(2, 1), (1, 0)]).unwrap();
        assert_eq!(write_graph(&g), r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
    }

    #[test]
    fn cycle_has_n_edges() {
        let c = Graph::cycle(6);
        assert_eq!(c.edge_count(), 6);
        assert!((0..6).all(|v| c.degree(v) == 2));
    }
}
