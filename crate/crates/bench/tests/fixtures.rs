use ogdmis_bench::{fixture_graph, small_embedding};
use ogdmis_core::{check_embedding, max_degree};

#[test]
fn fixture_graphs_respect_the_degree_bound() {
    for n in [20, 40] {
        assert!(max_degree(&fixture_graph(n, 1)) <= 6);
    }
}

#[test]
fn small_embedding_is_valid() {
    let e = small_embedding(4, 20);
    assert!(check_embedding(&e).is_empty());
    assert!(e.n_plus() <= 20);
}
