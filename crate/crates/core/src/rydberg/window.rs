use serde::Serialize;

use super::{ground_states_diagonal, AtomRegister, InteractionModel, RegisterParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetuningWindow {
    /// Smallest swept δ_i / U with an antiferromagnetic ground state.
    pub lower: f64,
    /// Largest such value.
    pub upper: f64,
    pub step: f64,
}

/// Sweeps δ_i / U over [0, 1.2] in `steps` uniform steps on a straight chain
/// vertex–ancilla–ancilla–vertex with the given spacing, U = C6 / spacing⁶.
/// The ground state counts as antiferromagnetic when every ground state is
/// 1010 or 0101 in chain order. The global detuning comes from `p`.
pub fn detuning_window_scan(
    spacing: f64,
    p: &RegisterParams,
    steps: usize,
) -> Result<DetuningWindow> {
    if steps < 100 {
        return Err(Error::input(format!(
            "at least 100 sweep steps are needed, got {steps}"
        )));
    }
    if !(spacing > 0.0) {
        return Err(Error::input("chain spacing must be positive"));
    }
    let u = p.c6 / (p.hbar * spacing.powi(6));
    let step = 1.2 / steps as f64;
    let positions: Vec<_> = (0..4).map(|i| [i as f64 * spacing, 0.0, 0.0]).collect();
    // masks in chain order: "1010" = atoms 0 and 2, "0101" = atoms 1 and 3
    let afm = [0b0101u64, 0b1010];
    let mut inside = Vec::new();
    for k in 0..=steps {
        let f = k as f64 * step;
        let reg = AtomRegister::new(positions.clone(), vec![0.0, f * u, f * u, 0.0])?;
        let r = ground_states_diagonal(&reg, p, InteractionModel::FullTails)?;
        if r.ground_states.iter().all(|m| afm.contains(m)) {
            inside.push(f);
        }
    }
    match (inside.first(), inside.last()) {
        (Some(&lower), Some(&upper)) => Ok(DetuningWindow { lower, upper, step }),
        _ => Err(Error::input(
            "no antiferromagnetic ground state anywhere in the sweep; check the global detuning",
        )),
    }
}
