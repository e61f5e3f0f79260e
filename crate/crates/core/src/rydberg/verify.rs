use serde::Serialize;

use super::{ground_states_diagonal, AtomRegister, InteractionModel, RegisterParams};
use crate::embed::AugmentedEmbedding;
use crate::error::Result;
use crate::graph::{is_independent, IndependentSet};
use crate::solvers::exact_mis;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    /// Size of the projected witness.
    pub mis_size: usize,
    /// Exact MIS size of the original graph.
    pub expected_size: usize,
    /// Projection of the first ground state onto the original vertices.
    pub witness: IndependentSet,
    pub ground_energy: f64,
    pub degeneracy: usize,
    pub diagnostics: Vec<String>,
}

/// Finds every diagonal ground state of the embedded register and checks
/// that each one, restricted to the original vertex atoms, is a maximum
/// independent set of the original graph.
pub fn verify_encoding(
    e: &AugmentedEmbedding,
    p: &RegisterParams,
    model: InteractionModel,
) -> Result<VerifyReport> {
    let reg = AtomRegister::from_embedding(e, p)?;
    let report = ground_states_diagonal(&reg, p, model)?;
    let g = &e.original;
    let expected = exact_mis(g)?.size;
    let vertex_mask = if g.n() == 64 {
        u64::MAX
    } else {
        (1u64 << g.n()) - 1
    };

    let mut diagnostics = Vec::new();
    let mut witness = None;
    for &state in &report.ground_states {
        let proj = IndependentSet::from_mask(state & vertex_mask);
        if !is_independent(g, &proj)? {
            diagnostics.push(format!(
                "ground state {} projects to a dependent set {:?}",
                super::bitstring(state, reg.len()),
                proj.members()
            ));
        } else if proj.len() != expected {
            diagnostics.push(format!(
                "ground state {} projects to an independent set of size {} instead of {expected}",
                super::bitstring(state, reg.len()),
                proj.len()
            ));
        }
        witness.get_or_insert(proj);
    }
    let witness = witness.unwrap_or_default();
    Ok(VerifyReport {
        ok: diagnostics.is_empty(),
        mis_size: witness.len(),
        expected_size: expected,
        witness,
        ground_energy: report.ground_energy,
        degeneracy: report.ground_states.len(),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{embed, EmbedParams};
    use crate::graph::Graph;

    #[test]
    fn single_edge_is_encoded() {
        let e = embed(&Graph::path(2), &EmbedParams::default()).unwrap();
        let p = RegisterParams::for_embedding(&e, crate::rydberg::DEFAULT_DELTA_OVER_U);
        let r = verify_encoding(&e, &p, InteractionModel::FullTails).unwrap();
        assert!(r.ok, "{:?}", r.diagnostics);
        assert_eq!(r.mis_size, 1);
    }

    #[test]
    fn zero_detuning_fails_loudly() {
        let e = embed(&Graph::path(2), &EmbedParams::default()).unwrap();
        let p = RegisterParams::for_embedding(&e, -0.2);
        let r = verify_encoding(&e, &p, InteractionModel::FullTails).unwrap();
        assert!(!r.ok);
        assert!(!r.diagnostics.is_empty());
    }
}
