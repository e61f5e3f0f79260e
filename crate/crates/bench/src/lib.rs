//! Fixtures shared by the criterion benches.

use ogdmis_core::{embed, erdos_renyi_bounded, AugmentedEmbedding, EmbedParams, Graph};

/// Random degree-bounded graph used across benches.
pub fn fixture_graph(n: usize, seed: u64) -> Graph {
    erdos_renyi_bounded(n, 0.5, 6, seed).expect("valid generator arguments")
}

/// Smallest-seed embedding of a random graph on `n` vertices with at most
/// `max_atoms` atoms, for benches of the exhaustive scan.
pub fn small_embedding(n: usize, max_atoms: usize) -> AugmentedEmbedding {
    (0..)
        .map(|seed| {
            let g = erdos_renyi_bounded(n, 0.3, 6, seed).expect("valid generator arguments");
            embed(
                &g,
                &EmbedParams {
                    seed,
                    ..Default::default()
                },
            )
            .expect("small graphs embed")
        })
        .find(|e| e.n_plus() <= max_atoms && !e.chains.is_empty())
        .expect("some seed gives a small embedding")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(fixture_graph(12, 3), fixture_graph(12, 3));
        let e = small_embedding(4, 20);
        assert!(e.n_plus() <= 20);
    }
}
