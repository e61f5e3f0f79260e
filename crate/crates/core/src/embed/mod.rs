//! Graph → 3D atom register: layout, snapping, routing and ancilla chains.

pub mod chain;
pub mod layout;
pub mod route;
pub mod snap;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, Point3, Site};
use crate::graph::Graph;
use chain::{assign_detunings, in_detuning_window, place_ancillas, Chain};
use layout::layout_fr3d;
use route::{route_edges, RoutedEdge};
use snap::snap_to_grid_with_clearance;

/// Atoms closer than this (lattice units) are treated as coupled.
pub const CONNECTIVITY_RADIUS: f64 = 1.1;
/// Minimum distance between atoms of unrelated chains.
pub const CHAIN_SEPARATION: f64 = 2.0;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedParams {
    pub seed: u64,
    pub iterations: usize,
    pub max_retries: usize,
    /// δ_i as a fraction of each chain's bond energy.
    pub detuning_fraction: f64,
    /// Lattice units per unit of force-directed length.
    pub spacing: f64,
    /// Vertex sites keep Chebyshev distance > `clearance` from each other.
    pub clearance: i64,
    pub lattice_scale_um: f64,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            seed: 0,
            iterations: 500,
            max_retries: 4,
            detuning_fraction: 0.5,
            spacing: 3.0,
            clearance: 2,
            lattice_scale_um: 7.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Vertex,
    Ancilla,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: usize,
    /// Lattice units.
    pub pos: Point3,
    pub kind: AtomKind,
    /// Local detuning in units of the nearest-neighbour lattice interaction.
    #[serde(rename = "detuning_over_U")]
    pub detuning_over_u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedChain {
    pub edge: (usize, usize),
    /// Ancilla atom ids from `edge.0` towards `edge.1`.
    pub atoms: Vec<usize>,
    /// Routed lattice path; empty when unknown.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<Site>,
}

/// Atom register for a graph. Atom ids `0..n` are the original vertices,
/// ancillas follow chain by chain in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedEmbedding {
    pub original: Graph,
    pub lattice_scale_um: f64,
    pub atoms: Vec<Atom>,
    pub chains: Vec<EmbeddedChain>,
    /// How many times the grid was doubled before routing succeeded.
    pub retries: usize,
}

impl AugmentedEmbedding {
    pub fn n_plus(&self) -> usize {
        self.atoms.len()
    }

    pub fn positions(&self) -> Vec<Point3> {
        self.atoms.iter().map(|a| a.pos).collect()
    }

    pub fn detunings(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.detuning_over_u).collect()
    }

    /// `[u, ancillas.., v]` for chain `c`.
    pub fn chain_sequence(&self, c: usize) -> Vec<usize> {
        let ch = &self.chains[c];
        let mut s = Vec::with_capacity(ch.atoms.len() + 2);
        s.push(ch.edge.0);
        s.extend_from_slice(&ch.atoms);
        s.push(ch.edge.1);
        s
    }

    pub fn chain_geometry(&self, c: usize) -> Chain {
        let ch = &self.chains[c];
        Chain {
            edge: ch.edge,
            start: self.atoms[ch.edge.0].pos,
            end: self.atoms[ch.edge.1].pos,
            ancilla_positions: ch.atoms.iter().map(|&a| self.atoms[a].pos).collect(),
        }
    }
}

/// Embeds `g`. Routing failures double the grid, up to `max_retries` times.
pub fn embed(g: &Graph, params: &EmbedParams) -> Result<AugmentedEmbedding> {
    let dmax = g.max_degree();
    if dmax > 6 {
        return Err(Error::UnsupportedDegree { degree: dmax });
    }
    if params.clearance < 1 {
        return Err(Error::input("vertex clearance must be at least 1"));
    }
    if !(params.spacing > 0.0 && params.lattice_scale_um > 0.0) {
        return Err(Error::input("spacing and lattice scale must be positive"));
    }
    if !in_detuning_window(params.detuning_fraction) {
        return Err(Error::input(format!(
            "detuning fraction {} is outside the admissible window",
            params.detuning_fraction
        )));
    }
    if g.n() == 0 {
        return Ok(AugmentedEmbedding {
            original: g.clone(),
            lattice_scale_um: params.lattice_scale_um,
            atoms: Vec::new(),
            chains: Vec::new(),
            retries: 0,
        });
    }

    let layout = layout_fr3d(g, params.iterations, params.seed)?;
    let base = snap_to_grid_with_clearance(&layout, 1.0 / params.spacing, params.clearance)?;
    let mut failures = Vec::new();
    for retry in 0..=params.max_retries {
        let grid = base.scaled(1 << retry);
        match route_edges(&grid, g) {
            Ok(routes) => {
                let e = assemble(g, &grid.sites, &routes, params, retry)?;
                let problems = check_embedding(&e);
                if !problems.is_empty() {
                    return Err(Error::EmbeddingFailed {
                        retries: retry,
                        diagnostics: problems.join("; "),
                    });
                }
                log::debug!(
                    "embedded n={} into {} atoms after {retry} retries",
                    g.n(),
                    e.n_plus()
                );
                return Ok(e);
            }
            Err(Error::RoutingFailed { edge }) => {
                log::debug!("routing failed for {edge:?} at grid scale {}", 1 << retry);
                failures.push(format!(
                    "scale {}: edge ({}, {})",
                    1 << retry,
                    edge.0,
                    edge.1
                ));
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::EmbeddingFailed {
        retries: params.max_retries,
        diagnostics: format!("no routing found: {}", failures.join(", ")),
    })
}

fn assemble(
    g: &Graph,
    sites: &[Site],
    routes: &[RoutedEdge],
    params: &EmbedParams,
    retries: usize,
) -> Result<AugmentedEmbedding> {
    let chains: Vec<Chain> = routes.iter().map(place_ancillas).collect::<Result<_>>()?;
    let detunings = assign_detunings(&chains, params.detuning_fraction)?;
    let mut atoms: Vec<Atom> = sites
        .iter()
        .enumerate()
        .map(|(id, s)| Atom {
            id,
            pos: s.to_point(),
            kind: AtomKind::Vertex,
            detuning_over_u: 0.0,
        })
        .collect();
    let mut embedded = Vec::with_capacity(chains.len());
    for ((c, d), r) in chains.iter().zip(&detunings).zip(routes) {
        let mut ids = Vec::with_capacity(c.count());
        for (&pos, &det) in c.ancilla_positions.iter().zip(d) {
            ids.push(atoms.len());
            atoms.push(Atom {
                id: atoms.len(),
                pos,
                kind: AtomKind::Ancilla,
                detuning_over_u: det,
            });
        }
        embedded.push(EmbeddedChain {
            edge: c.edge,
            atoms: ids,
            path: r.waypoints.clone(),
        });
    }
    Ok(AugmentedEmbedding {
        original: g.clone(),
        lattice_scale_um: params.lattice_scale_um,
        atoms,
        chains: embedded,
        retries,
    })
}

/// Unit-ball graph on all atoms with the given radius (lattice units).
pub fn augmented_graph(e: &AugmentedEmbedding, radius: f64) -> Result<Graph> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::input(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let pos = e.positions();
    let buckets = bucket(&pos, radius);
    let mut edges = Vec::new();
    for (i, j) in near_pairs(&pos, &buckets, radius) {
        if dist(pos[i], pos[j]) <= radius {
            edges.push((i, j));
        }
    }
    Graph::new(pos.len(), edges)
}

type Buckets = HashMap<[i64; 3], Vec<usize>>;

fn cell(p: Point3, size: f64) -> [i64; 3] {
    [
        (p[0] / size).floor() as i64,
        (p[1] / size).floor() as i64,
        (p[2] / size).floor() as i64,
    ]
}

fn bucket(pos: &[Point3], size: f64) -> Buckets {
    let mut b: Buckets = HashMap::new();
    for (i, &p) in pos.iter().enumerate() {
        b.entry(cell(p, size)).or_default().push(i);
    }
    b
}

/// Index pairs `i < j` that may lie within `size` of each other.
fn near_pairs<'a>(
    pos: &'a [Point3],
    buckets: &'a Buckets,
    size: f64,
) -> impl Iterator<Item = (usize, usize)> + 'a {
    (0..pos.len()).flat_map(move |i| {
        let c = cell(pos[i], size);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = buckets.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        out.extend(v.iter().copied().filter(|&j| j > i).map(|j| (i, j)));
                    }
                }
            }
        }
        out
    })
}

/// Lists every structural violation of an embedding; empty means valid.
///
/// Checked: one chain per original edge, even ancilla counts, consecutive
/// spacing ≤ 1, detunings inside the window, non-consecutive atoms of one
/// chain farther apart than [`CONNECTIVITY_RADIUS`], and atoms of different
/// chains at least [`CHAIN_SEPARATION`] apart. Atoms of two chains that both
/// sit within that separation of a shared endpoint only need to clear the
/// connectivity radius.
pub fn check_embedding(e: &AugmentedEmbedding) -> Vec<String> {
    let mut problems = Vec::new();
    let n = e.original.n();
    let mut want: Vec<(usize, usize)> = e.original.edges().to_vec();
    let mut have: Vec<(usize, usize)> = e.chains.iter().map(|c| c.edge).collect();
    want.sort_unstable();
    have.sort_unstable();
    if want != have {
        problems.push("chains do not match the original edges one to one".to_string());
    }
    if e.atoms.iter().enumerate().any(|(i, a)| a.id != i) {
        problems.push("atom ids are not 0..N+ in order".to_string());
    }
    for (i, a) in e.atoms.iter().enumerate() {
        if (i < n) != (a.kind == AtomKind::Vertex) {
            problems.push(format!("atom {i} has kind {:?}", a.kind));
        }
        if a.kind == AtomKind::Vertex && a.detuning_over_u != 0.0 {
            problems.push(format!("vertex atom {i} carries a local detuning"));
        }
    }
    if !problems.is_empty() {
        return problems;
    }

    // (chain, position in [u, ancillas.., v]) for every atom
    let mut membership: Vec<Vec<(usize, usize)>> = vec![Vec::new(); e.atoms.len()];
    for c in 0..e.chains.len() {
        let seq = e.chain_sequence(c);
        if seq.iter().any(|&a| a >= e.atoms.len()) {
            problems.push(format!(
                "chain {:?} references a missing atom",
                e.chains[c].edge
            ));
            return problems;
        }
        for (k, &a) in seq.iter().enumerate() {
            membership[a].push((c, k));
        }
        let count = e.chains[c].atoms.len();
        if count < 2 || count % 2 == 1 {
            problems.push(format!("chain {:?} has {count} ancillas", e.chains[c].edge));
        }
        let geom = e.chain_geometry(c);
        for (k, d) in geom.spacings().into_iter().enumerate() {
            if !(TOL..=1.0 + TOL).contains(&d) {
                problems.push(format!(
                    "chain {:?}: spacing {d:.4} at bond {k}",
                    e.chains[c].edge
                ));
            }
        }
        let bond = geom.bond_energy();
        for &a in &e.chains[c].atoms {
            let f = e.atoms[a].detuning_over_u / bond;
            if !in_detuning_window(f) {
                problems.push(format!(
                    "chain {:?}: atom {a} detuning is {f:.4} of the bond energy",
                    e.chains[c].edge
                ));
            }
        }
    }
    for (a, m) in membership.iter().enumerate().skip(n) {
        if m.len() != 1 {
            problems.push(format!("ancilla {a} belongs to {} chains", m.len()));
        }
    }
    if !problems.is_empty() {
        return problems;
    }

    let pos = e.positions();
    let buckets = bucket(&pos, CHAIN_SEPARATION);
    for (i, j) in near_pairs(&pos, &buckets, CHAIN_SEPARATION) {
        let d = dist(pos[i], pos[j]);
        if d >= CHAIN_SEPARATION - TOL {
            continue;
        }
        let common = membership[i].iter().find_map(|&(ci, ki)| {
            membership[j]
                .iter()
                .find(|&&(cj, _)| cj == ci)
                .map(|&(_, kj)| ki.abs_diff(kj))
        });
        let ok = match common {
            Some(1) => true,
            Some(_) => d > CONNECTIVITY_RADIUS,
            None => near_shared_endpoint(e, &membership, &pos, i, j) && d > CONNECTIVITY_RADIUS,
        };
        if !ok {
            problems.push(format!("atoms {i} and {j} are {d:.4} apart"));
        }
    }
    problems
}

fn near_shared_endpoint(
    e: &AugmentedEmbedding,
    membership: &[Vec<(usize, usize)>],
    pos: &[Point3],
    i: usize,
    j: usize,
) -> bool {
    let ends = |a: usize| -> Vec<usize> {
        membership[a]
            .iter()
            .flat_map(|&(c, _)| [e.chains[c].edge.0, e.chains[c].edge.1])
            .filter(|&w| dist(pos[w], pos[a]) < CHAIN_SEPARATION - TOL)
            .collect()
    };
    let ej = ends(j);
    ends(i).into_iter().any(|w| ej.contains(&w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverheadStats {
    pub n: usize,
    pub n_plus: usize,
    pub ancillas: usize,
    /// Sum of routed path lengths in lattice steps.
    pub total_edge_length: usize,
    pub bends: usize,
    pub retries: usize,
}

/// Path length and bend count of a chain. Uses the stored route when there
/// is one. Otherwise a chain on lattice points with unit bonds is read as
/// an odd-length path through its atoms, and any other chain as an even path
/// with one step per ancilla whose bends are counted along the atom polyline.
fn chain_extent(e: &AugmentedEmbedding, c: usize) -> (usize, usize) {
    let ch = &e.chains[c];
    if !ch.path.is_empty() {
        let r = RoutedEdge {
            edge: ch.edge,
            waypoints: ch.path.clone(),
        };
        return (r.length(), r.bends());
    }
    let geom = e.chain_geometry(c);
    let poly = geom.polyline();
    let steps: Vec<Point3> = poly
        .windows(2)
        .map(|w| {
            let d = dist(w[0], w[1]);
            [
                (w[1][0] - w[0][0]) / d,
                (w[1][1] - w[0][1]) / d,
                (w[1][2] - w[0][2]) / d,
            ]
        })
        .collect();
    let bends = steps.windows(2).filter(|s| dist(s[0], s[1]) > 1e-6).count();
    let on_lattice = poly
        .iter()
        .all(|p| p.iter().all(|x| (x - x.round()).abs() < TOL))
        && geom.spacings().iter().all(|d| (d - 1.0).abs() < TOL);
    let length = if on_lattice {
        geom.count() + 1
    } else {
        geom.count()
    };
    (length, bends)
}

pub fn overhead_stats(e: &AugmentedEmbedding) -> OverheadStats {
    let (mut total, mut bends) = (0, 0);
    for c in 0..e.chains.len() {
        let (l, b) = chain_extent(e, c);
        total += l;
        bends += b;
    }
    OverheadStats {
        n: e.original.n(),
        n_plus: e.n_plus(),
        ancillas: e.n_plus() - e.original.n(),
        total_edge_length: total,
        bends,
        retries: e.retries,
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    lattice_scale_um: f64,
    atoms: Vec<Atom>,
    chains: Vec<EmbeddedChain>,
}

pub fn write_embedding(e: &AugmentedEmbedding) -> String {
    let raw = EmbeddingJson {
        lattice_scale_um: e.lattice_scale_um,
        atoms: e.atoms.clone(),
        chains: e.chains.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("embedding serialization cannot fail")
}

/// Parses embedding JSON. The original graph is recovered from the vertex
/// atoms and the chain edges.
pub fn read_embedding(text: &str) -> Result<AugmentedEmbedding> {
    let raw: EmbeddingJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let invalid = |message: String| Error::Parse {
        line: 0,
        column: 0,
        message,
    };
    let n = raw
        .atoms
        .iter()
        .take_while(|a| a.kind == AtomKind::Vertex)
        .count();
    if raw.atoms[n..].iter().any(|a| a.kind == AtomKind::Vertex) {
        return Err(invalid("vertex atoms must precede ancillas".into()));
    }
    if let Some((i, a)) = raw.atoms.iter().enumerate().find(|(i, a)| a.id != *i) {
        return Err(invalid(format!("atom at index {i} has id {}", a.id)));
    }
    if raw.atoms.iter().any(|a| {
        a.pos
            .iter()
            .chain([&a.detuning_over_u])
            .any(|x| !x.is_finite())
    }) {
        return Err(invalid("non-finite atom coordinate or detuning".into()));
    }
    for c in &raw.chains {
        let (u, v) = c.edge;
        if u >= n || v >= n || u == v {
            return Err(invalid(format!(
                "chain edge ({u}, {v}) is invalid for {n} vertices"
            )));
        }
        if let Some(&a) = c.atoms.iter().find(|&&a| a < n || a >= raw.atoms.len()) {
            return Err(invalid(format!(
                "chain ({u}, {v}) lists atom {a}, not an ancilla"
            )));
        }
    }
    let original = Graph::new(n, raw.chains.iter().map(|c| c.edge))?;
    Ok(AugmentedEmbedding {
        original,
        lattice_scale_um: raw.lattice_scale_um,
        atoms: raw.atoms,
        chains: raw.chains,
        retries: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::k33_plus;

    #[test]
    fn single_edge_embeds_into_a_chain() {
        let e = embed(&Graph::path(2), &EmbedParams::default()).unwrap();
        assert_eq!(e.chains.len(), 1);
        let k = e.chains[0].atoms.len();
        assert!(k >= 2 && k.is_multiple_of(2));
        assert_eq!(e.n_plus(), 2 + k);
        assert!(check_embedding(&e).is_empty());
    }

    #[test]
    fn empty_and_edgeless_graphs() {
        let e = embed(&Graph::empty(0), &EmbedParams::default()).unwrap();
        assert_eq!(e.n_plus(), 0);
        let e = embed(&Graph::empty(3), &EmbedParams::default()).unwrap();
        assert_eq!(e.n_plus(), 3);
        assert!(e.chains.is_empty());
    }

    #[test]
    fn rejects_degree_seven() {
        let star = Graph::new(8, (1..8).map(|v| (0, v))).unwrap();
        assert_eq!(
            embed(&star, &EmbedParams::default()),
            Err(Error::UnsupportedDegree { degree: 7 })
        );
    }

    #[test]
    fn k33_plus_is_valid_and_deterministic() {
        let p = EmbedParams {
            seed: 4,
            ..EmbedParams::default()
        };
        let a = embed(&k33_plus(), &p).unwrap();
        let b = embed(&k33_plus(), &p).unwrap();
        assert_eq!(a, b);
        assert!(check_embedding(&a).is_empty(), "{:?}", check_embedding(&a));
        let stats = overhead_stats(&a);
        assert_eq!(stats.n, 7);
        assert!(stats.total_edge_length >= stats.ancillas);
    }

    #[test]
    fn connectivity_matches_chains() {
        let e = embed(&k33_plus(), &EmbedParams::default()).unwrap();
        let ub = augmented_graph(&e, CONNECTIVITY_RADIUS).unwrap();
        let mut expected = Vec::new();
        for c in 0..e.chains.len() {
            for w in e.chain_sequence(c).windows(2) {
                expected.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        expected.sort_unstable();
        assert_eq!(ub.edges(), &expected[..]);
    }

    #[test]
    fn json_round_trip() {
        let e = embed(&k33_plus(), &EmbedParams::default()).unwrap();
        let back = read_embedding(&write_embedding(&e)).unwrap();
        assert_eq!(back.atoms, e.atoms);
        assert_eq!(back.chains, e.chains);
        assert_eq!(back.original, e.original);
        assert!(read_embedding("{\"atoms\": 3}").is_err());
    }

    #[test]
    fn stats_without_stored_path_agree() {
        let e = embed(&k33_plus(), &EmbedParams::default()).unwrap();
        let mut stripped = e.clone();
        stripped.chains.iter_mut().for_each(|c| c.path.clear());
        let (a, b) = (overhead_stats(&e), overhead_stats(&stripped));
        assert_eq!(a.total_edge_length, b.total_edge_length);
        assert_eq!(a.n_plus, b.n_plus);
    }

    #[test]
    fn checker_flags_crowding() {
        let mut e = embed(&k33_plus(), &EmbedParams::default()).unwrap();
        let a = e.chains[0].atoms[0];
        let far = e.chains.last().unwrap().atoms[0];
        e.atoms[a].pos = e.atoms[far].pos;
        assert!(!check_embedding(&e).is_empty());
    }
}
