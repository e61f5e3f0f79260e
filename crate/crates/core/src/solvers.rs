//! Classical MIS baselines and the exact oracle.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, IndependentSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GreedyRandom,
    GreedyMinDegree,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestId,
    SeededRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub set: IndependentSet,
    pub size: usize,
    pub method: Method,
    pub elapsed: Duration,
}

#[derive(Serialize, Deserialize)]
struct SolverResultJson {
    method: Method,
    size: usize,
    members: Vec<usize>,
    elapsed_ms: f64,
}

impl SolverResult {
    fn new(set: IndependentSet, method: Method, started: Instant) -> Self {
        SolverResult {
            size: set.len(),
            set,
            method,
            elapsed: started.elapsed(),
        }
    }

    /// `{"method", "size", "members", "elapsed_ms"}`.
    pub fn to_json(&self) -> String {
        let raw = SolverResultJson {
            method: self.method,
            size: self.size,
            members: self.set.members().iter().copied().collect(),
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
        };
        serde_json::to_string(&raw).expect("solver result serialization cannot fail")
    }
}

/// Removes the closed neighbourhood of `v` from `alive`.
fn delete_closed_neighborhood(g: &Graph, alive: &mut [bool], v: usize) {
    alive[v] = false;
    for &w in g.neighbors(v) {
        alive[w] = false;
    }
}

/// Pick a uniformly random remaining vertex, keep it, delete its closed
/// neighbourhood; repeat until nothing remains.
pub fn greedy_random(g: &Graph, seed: u64) -> SolverResult {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive = vec![true; g.n()];
    let mut picked = Vec::new();
    loop {
        let remaining: Vec<usize> = (0..g.n()).filter(|&v| alive[v]).collect();
        if remaining.is_empty() {
            break;
        }
        let v = remaining[rng.gen_range(0..remaining.len())];
        picked.push(v);
        delete_closed_neighborhood(g, &mut alive, v);
    }
    SolverResult::new(picked.into_iter().collect(), Method::GreedyRandom, started)
}

/// Min-degree greedy. Degrees are taken in the shrinking graph, not the input.
pub fn greedy_min_degree(g: &Graph, tie_break: TieBreak, seed: u64) -> SolverResult {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alive = vec![true; g.n()];
    let mut picked = Vec::new();
    loop {
        let current_degree = |v: usize| g.neighbors(v).iter().filter(|&&w| alive[w]).count();
        let Some(min_deg) = (0..g.n()).filter(|&v| alive[v]).map(current_degree).min() else {
            break;
        };
        let ties: Vec<usize> = (0..g.n())
            .filter(|&v| alive[v] && current_degree(v) == min_deg)
            .collect();
        let v = match tie_break {
            TieBreak::LowestId => ties[0],
            TieBreak::SeededRandom => ties[rng.gen_range(0..ties.len())],
        };
        picked.push(v);
        delete_closed_neighborhood(g, &mut alive, v);
    }
    SolverResult::new(
        picked.into_iter().collect(),
        Method::GreedyMinDegree,
        started,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest graph solved by plain bitmask enumeration.
    pub exhaustive_limit: usize,
    /// Largest graph accepted at all (branch-and-bound above `exhaustive_limit`).
    pub branch_and_bound_limit: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            exhaustive_limit: 32,
            branch_and_bound_limit: 128,
        }
    }
}

pub fn exact_mis(g: &Graph) -> Result<SolverResult> {
    exact_mis_with(g, ExactConfig::default())
}

pub fn exact_mis_with(g: &Graph, config: ExactConfig) -> Result<SolverResult> {
    let started = Instant::now();
    let n = g.n();
    let set = if n <= config.exhaustive_limit.min(64) {
        let nbr = g.neighbor_masks();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut best = 0u64;
        enumerate(&nbr, all, 0, &mut best);
        IndependentSet::from_mask(best)
    } else if n <= config.branch_and_bound_limit.min(128) {
        let nbr: Vec<u128> = (0..n)
            .map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | 1 << w))
            .collect();
        let all = if n == 128 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        };
        let mut best = 0u128;
        branch_and_bound(&nbr, all, 0, &mut best);
        (0..n).filter(|&v| best >> v & 1 == 1).collect()
    } else {
        return Err(Error::Resource {
            what: "exact MIS vertex count",
            size: n,
            limit: config.branch_and_bound_limit.min(128),
        });
    };
    Ok(SolverResult::new(set, Method::Exact, started))
}

/// Visits every independent set built by deciding vertices in index order.
/// A vertex with no live neighbours is always taken, which cannot lose
/// optimality.
fn enumerate(nbr: &[u64], live: u64, chosen: u64, best: &mut u64) {
    if live == 0 {
        if chosen.count_ones() > best.count_ones() {
            *best = chosen;
        }
        return;
    }
    let v = live.trailing_zeros() as usize;
    let bit = 1u64 << v;
    enumerate(nbr, live & !bit & !nbr[v], chosen | bit, best);
    if nbr[v] & live != 0 {
        enumerate(nbr, live & !bit, chosen, best);
    }
}

/// Branch on a maximum-degree live vertex; bound by the live-vertex count.
fn branch_and_bound(nbr: &[u128], live: u128, chosen: u128, best: &mut u128) {
    if chosen.count_ones() + live.count_ones() <= best.count_ones() {
        return;
    }
    let mut pivot = None;
    let mut isolated = 0u128;
    let mut rest = live;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (nbr[v] & live).count_ones();
        if d == 0 {
            isolated |= 1 << v;
        } else if pivot.is_none_or(|(_, pd)| d > pd) {
            pivot = Some((v, d));
        }
    }
    let chosen = chosen | isolated;
    let live = live & !isolated;
    let Some((v, _)) = pivot else {
        if chosen.count_ones() > best.count_ones() {
            *best = chosen;
        }
        return;
    };
    let bit = 1u128 << v;
    branch_and_bound(nbr, live & !bit & !nbr[v], chosen | bit, best);
    branch_and_bound(nbr, live & !bit, chosen, best);
}

/// `r.size / α(G)`; 1 for the empty graph.
pub fn approximation_ratio(g: &Graph, r: &SolverResult) -> Result<f64> {
    let optimum = exact_mis(g)?.size;
    if optimum == 0 {
        return Ok(1.0);
    }
    Ok(r.size as f64 / optimum as f64)
}
