//! Shortest orthogonal lattice paths with clearance between distinct edges.
//!
//! Interior points of a path must keep Chebyshev distance ≥ 2 from interior
//! points of every other path and from every foreign vertex site. The one
//! exception is a pair of first steps leaving a shared endpoint: those sit
//! next to the same vertex and are allowed to be diagonal neighbours.
//! A path may only touch the Chebyshev-1 shell of its own endpoints with its
//! first and last step. The first two axis steps out of every vertex are kept
//! clear of paths that do not end there, so later edges can still leave it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::snap::GridLayout;
use crate::error::{Error, Result};
use crate::geometry::{Site, AXIS_STEPS};
use crate::graph::Graph;

const SEARCH_MARGIN: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedEdge {
    pub edge: (usize, usize),
    /// Lattice points from the site of `edge.0` to the site of `edge.1`.
    pub waypoints: Vec<Site>,
}

impl RoutedEdge {
    /// Number of unit steps p.
    pub fn length(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    pub fn interior(&self) -> &[Site] {
        let w = &self.waypoints;
        if w.len() < 2 {
            &[]
        } else {
            &w[1..w.len() - 1]
        }
    }

    /// Direction changes along the path.
    pub fn bends(&self) -> usize {
        let steps: Vec<Site> = self
            .waypoints
            .windows(2)
            .map(|w| Site::new(w[1].x - w[0].x, w[1].y - w[0].y, w[1].z - w[0].z))
            .collect();
        steps.windows(2).filter(|s| s[0] != s[1]).count()
    }

    /// True when consecutive points differ by one unit step along one axis.
    pub fn is_axis_aligned(&self) -> bool {
        self.waypoints
            .windows(2)
            .all(|w| w[0].is_axis_neighbor(w[1]))
    }
}

#[derive(Debug, Clone, Copy)]
struct Occupant {
    edge: usize,
    /// Set when the point is a first/last step, i.e. next to this endpoint.
    beside: Option<usize>,
}

struct Router<'a> {
    sites: &'a [Site],
    vertex_at: HashMap<Site, usize>,
    /// Sites one or two axis steps from a vertex, with their vertices.
    stubs: HashMap<Site, Vec<usize>>,
    occupied: HashMap<Site, Occupant>,
}

/// Inclusive axis-aligned search box.
#[derive(Debug, Clone, Copy)]
struct Bounds {
    lo: Site,
    hi: Site,
}

impl Bounds {
    fn around(a: Site, b: Site, margin: i64) -> Self {
        Bounds {
            lo: Site::new(
                a.x.min(b.x) - margin,
                a.y.min(b.y) - margin,
                a.z.min(b.z) - margin,
            ),
            hi: Site::new(
                a.x.max(b.x) + margin,
                a.y.max(b.y) + margin,
                a.z.max(b.z) + margin,
            ),
        }
    }

    fn contains(&self, s: Site) -> bool {
        (self.lo.x..=self.hi.x).contains(&s.x)
            && (self.lo.y..=self.hi.y).contains(&s.y)
            && (self.lo.z..=self.hi.z).contains(&s.z)
    }
}

impl<'a> Router<'a> {
    fn new(grid: &'a GridLayout) -> Self {
        let sites = &grid.sites;
        let vertex_at = sites.iter().enumerate().map(|(v, &s)| (s, v)).collect();
        let mut stubs: HashMap<Site, Vec<usize>> = HashMap::new();
        for (v, &s) in sites.iter().enumerate() {
            for d in AXIS_STEPS {
                stubs.entry(s.offset(d)).or_default().push(v);
                stubs.entry(s.offset(d).offset(d)).or_default().push(v);
            }
        }
        Router {
            sites,
            vertex_at,
            stubs,
            occupied: HashMap::new(),
        }
    }

    /// Whether `q` may become an interior point of the path for `edge`
    /// (index `idx`), arriving from `from`.
    fn admissible(
        &self,
        idx: usize,
        (u, v): (usize, usize),
        from: Site,
        q: Site,
        bounds: &Bounds,
    ) -> bool {
        let (su, sv) = (self.sites[u], self.sites[v]);
        if !bounds.contains(q) {
            return false;
        }
        if q.chebyshev(su) <= 1 && !(from == su && q.is_axis_neighbor(su)) {
            return false;
        }
        if q.chebyshev(sv) <= 1 && !q.is_axis_neighbor(sv) {
            return false;
        }
        let beside = if q.is_axis_neighbor(su) && from == su {
            Some(u)
        } else if q.is_axis_neighbor(sv) {
            Some(v)
        } else {
            None
        };
        for c in q.cube(1) {
            if let Some(&w) = self.vertex_at.get(&c) {
                if w != u && w != v {
                    return false;
                }
            }
            if let Some(owners) = self.stubs.get(&c) {
                if owners.iter().any(|&w| w != u && w != v) {
                    return false;
                }
            }
            if let Some(occ) = self.occupied.get(&c) {
                debug_assert_ne!(occ.edge, idx);
                let exempt = c != q && beside.is_some() && occ.beside == beside;
                if !exempt {
                    return false;
                }
            }
        }
        true
    }

    /// A* over (site, incoming direction) with lexicographic cost
    /// (length, bends); remaining ties go to the smaller successor site.
    fn route(&self, idx: usize, (u, v): (usize, usize), bounds: &Bounds) -> Option<Vec<Site>> {
        const START: u8 = 6;
        let (su, sv) = (self.sites[u], self.sites[v]);
        type Key = (Site, u8);
        let mut best: HashMap<Key, (i64, i64)> = HashMap::new();
        let mut parent: HashMap<Key, Key> = HashMap::new();
        let mut heap = BinaryHeap::new();
        best.insert((su, START), (0, 0));
        heap.push(Reverse((su.manhattan(sv), 0i64, su, START, 0i64)));

        while let Some(Reverse((_, bends, site, dir, len))) = heap.pop() {
            if best.get(&(site, dir)).is_some_and(|&b| b < (len, bends)) {
                continue;
            }
            if site == sv {
                let mut path = vec![site];
                let mut key = (site, dir);
                while let Some(&p) = parent.get(&key) {
                    path.push(p.0);
                    key = p;
                }
                path.reverse();
                return Some(path);
            }
            let only_goal = site != su && site.is_axis_neighbor(sv);
            for (d, step) in AXIS_STEPS.iter().enumerate() {
                let q = site.offset(*step);
                let ok = if q == sv {
                    true
                } else {
                    !only_goal && self.admissible(idx, (u, v), site, q, bounds)
                };
                if !ok {
                    continue;
                }
                let d = d as u8;
                let nb = bends + i64::from(dir != START && dir != d);
                let cost = (len + 1, nb);
                if best.get(&(q, d)).is_none_or(|&b| cost < b) {
                    best.insert((q, d), cost);
                    parent.insert((q, d), (site, dir));
                    heap.push(Reverse((len + 1 + q.manhattan(sv), nb, q, d, len + 1)));
                }
            }
        }
        None
    }

    fn commit(&mut self, idx: usize, (u, v): (usize, usize), path: &[Site]) {
        let (su, sv) = (self.sites[u], self.sites[v]);
        let last = path.len() - 1;
        for (i, &p) in path.iter().enumerate().take(last).skip(1) {
            let beside = if i == 1 && p.is_axis_neighbor(su) {
                Some(u)
            } else if i == last - 1 && p.is_axis_neighbor(sv) {
                Some(v)
            } else {
                None
            };
            self.occupied.insert(p, Occupant { edge: idx, beside });
        }
    }
}

/// Routes every edge of `g` on the lattice, shortest first by Manhattan
/// endpoint distance. Each search is confined to the bounding box of the
/// two endpoints plus a margin, widened once on failure. Returns the paths
/// in `g.edges()` order.
pub fn route_edges(grid: &GridLayout, g: &Graph) -> Result<Vec<RoutedEdge>> {
    if grid.sites.len() != g.n() {
        return Err(Error::input(format!(
            "grid has {} sites for a graph with {} vertices",
            grid.sites.len(),
            g.n()
        )));
    }
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    let manhattan = |i: usize| {
        let (u, v) = g.edges()[i];
        grid.sites[u].manhattan(grid.sites[v])
    };
    order.sort_by_key(|&i| (manhattan(i), g.edges()[i]));

    let mut router = Router::new(grid);
    let mut routed: Vec<Option<RoutedEdge>> = vec![None; g.edge_count()];
    for idx in order {
        let edge = g.edges()[idx];
        let (su, sv) = (grid.sites[edge.0], grid.sites[edge.1]);
        let margin = SEARCH_MARGIN.max(su.manhattan(sv) / 2);
        let path = [margin, 3 * margin]
            .iter()
            .find_map(|&m| router.route(idx, edge, &Bounds::around(su, sv, m)))
            .ok_or(Error::RoutingFailed { edge })?;
        router.commit(idx, edge, &path);
        routed[idx] = Some(RoutedEdge {
            edge,
            waypoints: path,
        });
    }
    Ok(routed
        .into_iter()
        .map(|r| r.expect("every edge routed"))
        .collect())
}

/// Lists every clearance violation among a set of routed paths.
pub fn check_routes(grid: &GridLayout, routes: &[RoutedEdge]) -> Vec<String> {
    let mut problems = Vec::new();
    let sites = &grid.sites;
    for r in routes {
        let (u, v) = r.edge;
        if r.waypoints.first() != Some(&sites[u]) || r.waypoints.last() != Some(&sites[v]) {
            problems.push(format!(
                "edge {:?}: path does not join its endpoint sites",
                r.edge
            ));
        }
        if !r.is_axis_aligned() {
            problems.push(format!("edge {:?}: path is not axis aligned", r.edge));
        }
        for &q in r.interior() {
            for (w, &s) in sites.iter().enumerate() {
                if w != u && w != v && q.chebyshev(s) <= 1 {
                    problems.push(format!("edge {:?}: {q:?} crowds vertex {w}", r.edge));
                }
            }
        }
    }
    let beside = |r: &RoutedEdge, i: usize| -> Option<usize> {
        let w = &r.waypoints;
        if i == 1 {
            Some(r.edge.0)
        } else if i + 2 == w.len() {
            Some(r.edge.1)
        } else {
            None
        }
    };
    for a in 0..routes.len() {
        for b in (a + 1)..routes.len() {
            let (ra, rb) = (&routes[a], &routes[b]);
            for i in 1..ra.waypoints.len().saturating_sub(1) {
                for j in 1..rb.waypoints.len().saturating_sub(1) {
                    let (p, q) = (ra.waypoints[i], rb.waypoints[j]);
                    if p.chebyshev(q) >= 2 {
                        continue;
                    }
                    let shared = match (beside(ra, i), beside(rb, j)) {
                        (Some(x), Some(y)) => x == y && p != q,
                        _ => false,
                    };
                    if !shared {
                        problems.push(format!(
                            "edges {:?} and {:?}: interior points {p:?} and {q:?} too close",
                            ra.edge, rb.edge
                        ));
                    }
                }
            }
        }
    }
    problems
}
