//! State-vector annealing of small registers, readout sampling and SPAM
//! correction. Times are in µs and rates in rad/µs.

mod evolve;
mod measure;
mod schedule;

pub use evolve::{
    evolve, evolve_from, evolve_observed, largest_stable_dt, QuantumState, MAX_STEP_PHASE,
    SIMULATOR_LIMIT,
};
pub use measure::{
    measure, mis_probability, spam_correct, spam_corrupt, ConfusionMatrix, MeasurementDistribution,
    DENSE_LIMIT,
};
pub use schedule::{
    read_schedule, reference_schedule, reference_schedule_with, write_schedule, Schedule,
    DELTA_INITIAL, OMEGA_0,
};

use std::f64::consts::TAU;

use crate::embed::{Atom, AtomKind, AugmentedEmbedding};
use crate::geometry::{dist, Point3};
use crate::graph::{k33_plus, Graph};
use crate::rydberg::{AtomRegister, RegisterFile, RegisterParams, C6_DEFAULT};

/// Unit-ball K₃₃⁺ positions in µm, labelled as in [`crate::graph::k33_plus`].
/// Vertex 0 sits on the axis above the ring {1, 2, 3}; the triangle
/// {4, 5, 6} lies below, each corner under one ring atom. The shape and
/// scale were picked by scanning anneals under the reference schedule.
pub fn k33_plus_positions() -> Vec<Point3> {
    let mut pts = vec![[0.0, 0.0, K33_TOP_HEIGHT]];
    for (r, z) in [(1.0, K33_RING_HEIGHT), (K33_RHO, 0.0)] {
        for k in 0..3 {
            let a = TAU * k as f64 / 3.0;
            pts.push([r * a.cos(), r * a.sin(), z]);
        }
    }
    let g = k33_plus();
    let longest = g
        .edges()
        .iter()
        .map(|&(i, j)| dist(pts[i], pts[j]))
        .fold(0.0, f64::max);
    let scale = K33_LONGEST_EDGE_UM / longest;
    pts.into_iter()
        .map(|p| [p[0] * scale, p[1] * scale, p[2] * scale])
        .collect()
}

/// Triangle radius relative to the ring radius.
const K33_RHO: f64 = 0.361;
const K33_RING_HEIGHT: f64 = 0.698;
const K33_TOP_HEIGHT: f64 = 1.488;
const K33_LONGEST_EDGE_UM: f64 = 9.48;

/// The K₃₃⁺ register with no local detunings.
pub fn k33_plus_register() -> AtomRegister {
    AtomRegister::uniform(k33_plus_positions()).expect("static positions are distinct")
}

/// Parameters for [`k33_plus_register`]: default C6, with Ω setting the
/// blockade radius to the geometric mean of the longest edge and the
/// shortest non-edge. Anneals take Ω from their schedule instead.
pub fn k33_plus_params() -> RegisterParams {
    let p = k33_plus_positions();
    let g = k33_plus();
    let (mut longest, mut shortest) = (0.0f64, f64::INFINITY);
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            let d = dist(p[i], p[j]);
            if g.has_edge(i, j) {
                longest = longest.max(d);
            } else {
                shortest = shortest.min(d);
            }
        }
    }
    let r_b = (longest * shortest).sqrt();
    RegisterParams {
        c6: C6_DEFAULT,
        hbar: 1.0,
        omega: C6_DEFAULT / r_b.powi(6),
        delta: 0.0,
    }
}

/// The K₃₃⁺ register as a register file: seven vertex atoms in µm with no
/// chains, so the target graph is the one induced at the blockade radius.
pub fn k33_plus_register_file() -> RegisterFile {
    let atoms = k33_plus_positions()
        .into_iter()
        .enumerate()
        .map(|(id, pos)| Atom {
            id,
            pos,
            kind: AtomKind::Vertex,
            detuning_over_u: 0.0,
        })
        .collect();
    RegisterFile {
        embedding: AugmentedEmbedding {
            original: Graph::empty(7),
            lattice_scale_um: 1.0,
            atoms,
            chains: vec![],
            retries: 0,
        },
        params: k33_plus_params(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rydberg::{blockade_radius, induced_graph};

    #[test]
    fn register_induces_k33_plus() {
        let reg = k33_plus_register();
        let r_b = blockade_radius(&k33_plus_params()).unwrap();
        let g = induced_graph(&reg, r_b).unwrap();
        let mut got = g.edges().to_vec();
        let mut want = k33_plus().edges().to_vec();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        // unit-ball: every edge shorter than every non-edge
        let p = &reg.positions;
        let k = k33_plus();
        let longest = k
            .edges()
            .iter()
            .map(|&(i, j)| dist(p[i], p[j]))
            .fold(0.0, f64::max);
        let shortest = (0..7)
            .flat_map(|i| ((i + 1)..7).map(move |j| (i, j)))
            .filter(|&(i, j)| !k.has_edge(i, j))
            .map(|(i, j)| dist(p[i], p[j]))
            .fold(f64::INFINITY, f64::min);
        assert!(longest < shortest);
    }

    #[test]
    fn register_file_round_trips() {
        use crate::rydberg::{read_register, write_register};
        let f = k33_plus_register_file();
        assert_eq!(f.register().unwrap(), k33_plus_register());
        let back = read_register(&write_register(&f), |_| unreachable!()).unwrap();
        let mut edges = back.target_graph().unwrap().edges().to_vec();
        edges.sort();
        let mut want = k33_plus().edges().to_vec();
        want.sort();
        assert_eq!(edges, want);
    }
}
