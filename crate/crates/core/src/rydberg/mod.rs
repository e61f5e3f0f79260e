//! Rydberg Hamiltonian parameters, atom registers and the classical
//! (Ω = 0) energy landscape.
//!
//! Units are the caller's choice as long as they are consistent. The
//! defaults use µs, µm and rad/µs with ħ = 1, so energies are angular
//! frequencies.

mod diagonal;
mod verify;
mod window;

pub use diagonal::{
    bitstring, diagonal_energy, ground_states_diagonal, ground_states_diagonal_with,
    DiagonalReport, ScanOptions, EXHAUSTIVE_LIMIT,
};
pub use verify::{verify_encoding, VerifyReport};
pub use window::{detuning_window_scan, DetuningWindow};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embed::{read_embedding, AugmentedEmbedding};
use crate::error::{Error, Result};
use crate::geometry::{dist, Point3};
use crate::graph::Graph;

/// C6 for the 70S Rb state in rad/µs · µm⁶.
pub const C6_DEFAULT: f64 = 5_420_158.53;

/// Global detuning for embedded registers, in nearest-neighbour lattice
/// interactions. Encodings hold from about 0.7 to 0.9 on random graphs.
pub const DEFAULT_DELTA_OVER_U: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionModel {
    /// V_ij = C6 / r⁶ for every pair.
    #[default]
    FullTails,
    /// V_ij = C6 / r⁶ only when r < r_b, zero otherwise.
    BlockadeCutoff,
}

impl FromStr for InteractionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full_tails" => Ok(InteractionModel::FullTails),
            "blockade_cutoff" => Ok(InteractionModel::BlockadeCutoff),
            other => Err(Error::input(format!(
                "unknown interaction model {other:?}; expected full_tails or blockade_cutoff"
            ))),
        }
    }
}

impl fmt::Display for InteractionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionModel::FullTails => "full_tails",
            InteractionModel::BlockadeCutoff => "blockade_cutoff",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterParams {
    #[serde(rename = "C6")]
    pub c6: f64,
    #[serde(rename = "hbar_units")]
    pub hbar: f64,
    /// Rabi frequency Ω.
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// Global detuning δ.
    pub delta: f64,
}

impl RegisterParams {
    pub fn new(c6: f64, hbar: f64, omega: f64, delta: f64) -> Result<Self> {
        let p = RegisterParams {
            c6,
            hbar,
            omega,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c6 > 0.0 && self.c6.is_finite()) {
            return Err(Error::input(format!(
                "C6 must be positive, got {}",
                self.c6
            )));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::input(format!(
                "hbar must be positive, got {}",
                self.hbar
            )));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::input(format!(
                "Omega must be non-negative, got {}",
                self.omega
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::input("delta must be finite"));
        }
        Ok(())
    }

    /// Natural units with the default C6, a global detuning of
    /// `delta_over_u` nearest-neighbour lattice interactions, and Ω chosen so
    /// the blockade radius is 1.5 lattice spacings.
    pub fn for_embedding(e: &AugmentedEmbedding, delta_over_u: f64) -> Self {
        let a = e.lattice_scale_um;
        let u = C6_DEFAULT / a.powi(6);
        RegisterParams {
            c6: C6_DEFAULT,
            hbar: 1.0,
            omega: C6_DEFAULT / (1.5 * a).powi(6),
            delta: delta_over_u * u,
        }
    }
}

/// r_b = (C6 / ħΩ)^{1/6}.
pub fn blockade_radius(p: &RegisterParams) -> Result<f64> {
    if !(p.omega > 0.0) {
        return Err(Error::input("blockade radius needs Omega > 0"));
    }
    Ok((p.c6 / (p.hbar * p.omega)).powf(1.0 / 6.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRegister {
    /// Physical coordinates.
    pub positions: Vec<Point3>,
    /// δ_j, same units as the global detuning.
    pub local_detunings: Vec<f64>,
}

impl AtomRegister {
    pub fn new(positions: Vec<Point3>, local_detunings: Vec<f64>) -> Result<Self> {
        if positions.len() != local_detunings.len() {
            return Err(Error::input(format!(
                "{} positions but {} local detunings",
                positions.len(),
                local_detunings.len()
            )));
        }
        if positions
            .iter()
            .flatten()
            .chain(&local_detunings)
            .any(|x| !x.is_finite())
        {
            return Err(Error::input("register contains a non-finite value"));
        }
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                if dist(positions[i], positions[j]) == 0.0 {
                    return Err(Error::input(format!("atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(AtomRegister {
            positions,
            local_detunings,
        })
    }

    /// Register with no local detunings.
    pub fn uniform(positions: Vec<Point3>) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, vec![0.0; n])
    }

    /// Physical register for an embedding: lattice positions scaled to µm,
    /// detunings converted from lattice interaction units using `p`.
    pub fn from_embedding(e: &AugmentedEmbedding, p: &RegisterParams) -> Result<Self> {
        let a = e.lattice_scale_um;
        let u = p.c6 / (p.hbar * a.powi(6));
        Self::new(
            e.atoms
                .iter()
                .map(|at| [at.pos[0] * a, at.pos[1] * a, at.pos[2] * a])
                .collect(),
            e.atoms.iter().map(|at| at.detuning_over_u * u).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Pairwise interactions under `model`, as a dense symmetric matrix
    /// with zero diagonal.
    pub fn interactions(
        &self,
        p: &RegisterParams,
        model: InteractionModel,
    ) -> Result<Vec<Vec<f64>>> {
        let cutoff = match model {
            InteractionModel::FullTails => f64::INFINITY,
            InteractionModel::BlockadeCutoff => blockade_radius(p)?,
        };
        let n = self.len();
        let mut v = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let r = dist(self.positions[i], self.positions[j]);
                if r < cutoff {
                    let x = p.c6 / r.powi(6);
                    v[i][j] = x;
                    v[j][i] = x;
                }
            }
        }
        Ok(v)
    }
}

/// Edge (i, j) iff ‖r_i − r_j‖ < r_b.
pub fn induced_graph(reg: &AtomRegister, r_b: f64) -> Result<Graph> {
    if !(r_b > 0.0) {
        return Err(Error::input(format!(
            "blockade radius must be positive, got {r_b}"
        )));
    }
    let n = reg.len();
    let edges = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| dist(reg.positions[i], reg.positions[j]) < r_b);
    Graph::new(n, edges)
}

/// A register file: embedding JSON plus a `params` block.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterFile {
    pub embedding: AugmentedEmbedding,
    pub params: RegisterParams,
}

impl RegisterFile {
    pub fn register(&self) -> Result<AtomRegister> {
        AtomRegister::from_embedding(&self.embedding, &self.params)
    }

    /// The graph the register is meant to solve: the embedded graph when
    /// there are chains, otherwise the graph induced at the blockade radius.
    pub fn target_graph(&self) -> Result<Graph> {
        if self.embedding.chains.is_empty() && self.embedding.original.n() > 0 {
            induced_graph(&self.register()?, blockade_radius(&self.params)?)
        } else {
            Ok(self.embedding.original.clone())
        }
    }
}

#[derive(Deserialize)]
struct ParamsOnly {
    params: Option<RegisterParams>,
}

/// Reads embedding or register JSON. Plain embeddings get `fallback` params.
pub fn read_register(
    text: &str,
    fallback: impl FnOnce(&AugmentedEmbedding) -> RegisterParams,
) -> Result<RegisterFile> {
    let embedding = read_embedding(text)?;
    let extra: ParamsOnly = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let params = match extra.params {
        Some(p) => {
            p.validate()?;
            p
        }
        None => fallback(&embedding),
    };
    Ok(RegisterFile { embedding, params })
}

pub fn write_register(r: &RegisterFile) -> String {
    let mut v: serde_json::Value =
        serde_json::from_str(&crate::embed::write_embedding(&r.embedding)).expect("valid JSON");
    v["params"] = serde_json::to_value(r.params).expect("params serialize");
    serde_json::to_string_pretty(&v).expect("register serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c6: f64, omega: f64) -> RegisterParams {
        RegisterParams::new(c6, 1.0, omega, 0.0).unwrap()
    }

    #[test]
    fn blockade_radius_examples() {
        assert!((blockade_radius(&params(1.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((blockade_radius(&params(64.0, 1.0)).unwrap() - 2.0).abs() < 1e-14);
        let r = blockade_radius(&params(64.0, 2.0)).unwrap();
        assert!((r - 2.0 / 2f64.powf(1.0 / 6.0)).abs() < 1e-14);
        assert!(blockade_radius(&params(64.0, 0.0)).is_err());
    }

    #[test]
    fn induced_graph_examples() {
        let reg = AtomRegister::uniform(vec![[0.0; 3], [0.5, 0.0, 0.0]]).unwrap();
        assert_eq!(induced_graph(&reg, 1.0).unwrap().edge_count(), 1);
        let reg = AtomRegister::uniform(vec![[0.0; 3], [2.0, 0.0, 0.0]]).unwrap();
        assert_eq!(induced_graph(&reg, 1.0).unwrap().edge_count(), 0);
    }

    #[test]
    fn register_validation() {
        assert!(AtomRegister::new(vec![[0.0; 3]], vec![]).is_err());
        assert!(AtomRegister::uniform(vec![[1.0; 3], [1.0; 3]]).is_err());
        assert!(RegisterParams::new(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(RegisterParams::new(1.0, 1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for m in [
            InteractionModel::FullTails,
            InteractionModel::BlockadeCutoff,
        ] {
            assert_eq!(m.to_string().parse::<InteractionModel>().unwrap(), m);
        }
        assert!("tails".parse::<InteractionModel>().is_err());
    }
}
