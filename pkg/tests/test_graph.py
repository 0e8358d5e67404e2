import numpy as np
import pytest

from gfstab.errors import DegenerateInputError, ParseError, ValidationError
from gfstab.graph import (
    Graph,
    adjacency,
    gft,
    is_connected,
    load_communities,
    load_edge_list,
    normalized_laplacian,
    permute,
    total_variation,
    unnormalized_laplacian,
)
from gfstab.spectral import eigh


K3 = Graph(3, frozenset({(0, 1), (1, 2), (0, 2)}))
EDGE = Graph(2, frozenset({(0, 1)}))


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    return Graph(n, frozenset(zip(iu[mask].tolist(), ju[mask].tolist())))


class TestGraphType:
    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError):
            Graph(3, frozenset({(1, 1)}))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            Graph(2, frozenset({(0, 2)}))

    def test_edges_canonicalized(self):
        g = Graph(3, frozenset({(2, 0)}))
        assert g.edges == frozenset({(0, 2)})

    def test_membership_length_checked(self):
        with pytest.raises(ValidationError):
            Graph(3, frozenset(), membership=(0, 1))

    def test_degrees(self):
        assert K3.degrees().tolist() == [2, 2, 2]
        assert EDGE.degrees().tolist() == [1, 1]


class TestLoadEdgeList:
    def test_plain_file(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n1 2\n")
        g = load_edge_list(p)
        assert g.n == 3
        assert g.edges == frozenset({(0, 1), (1, 2)})

    def test_dedupe_drops_mirrors_and_loops(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n1 0\n1 1\n")
        g = load_edge_list(p, dedupe=True)
        assert g.n == 2
        assert g.edges == frozenset({(0, 1)})

    def test_duplicate_rejected_without_dedupe(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n1 0\n")
        with pytest.raises(ValidationError):
            load_edge_list(p)

    def test_self_loop_rejected_without_dedupe(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n2 2\n")
        with pytest.raises(ValidationError):
            load_edge_list(p)

    def test_malformed_line_reports_number(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\nnope\n")
        with pytest.raises(ParseError, match="line 2"):
            load_edge_list(p)

    def test_comments_and_blanks_skipped(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# header\n\n0 1\n")
        assert load_edge_list(p).edges == frozenset({(0, 1)})


class TestLoadCommunities:
    def test_contiguous_relabel(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("0 5\n1 5\n2 9\n")
        assert load_communities(p, 3) == (0, 0, 1)

    def test_missing_label_rejected(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("0 0\n")
        with pytest.raises(ValidationError, match="missing"):
            load_communities(p, 2)

    def test_out_of_range_node_rejected(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("5 0\n")
        with pytest.raises(ValidationError, match="out of range"):
            load_communities(p, 3)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("")
        with pytest.raises(ValidationError):
            load_communities(p, 2)

    def test_conflicting_labels_rejected(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("0 1\n0 2\n1 0\n")
        with pytest.raises(ValidationError):
            load_communities(p, 2)


class TestOperators:
    def test_adjacency_triangle(self):
        np.testing.assert_array_equal(adjacency(K3), np.ones((3, 3)) - np.eye(3))

    def test_adjacency_single_edge(self):
        np.testing.assert_array_equal(adjacency(EDGE), [[0, 1], [1, 0]])

    def test_adjacency_empty(self):
        np.testing.assert_array_equal(adjacency(Graph(3, frozenset())), np.zeros((3, 3)))

    def test_unnormalized_triangle(self):
        expected = [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
        np.testing.assert_array_equal(unnormalized_laplacian(K3), expected)

    def test_unnormalized_single_edge(self):
        np.testing.assert_array_equal(unnormalized_laplacian(EDGE), [[1, -1], [-1, 1]])

    def test_triangle_spectrum(self):
        # char poly of the triangle's Laplacian factors to -x (x-3)^2
        lam = eigh(unnormalized_laplacian(K3)).lambdas
        np.testing.assert_allclose(lam, [0.0, 3.0, 3.0], atol=1e-12)

    def test_row_sums_exactly_zero(self):
        for seed in range(5):
            g = random_graph(40, 0.2, seed)
            lap = unnormalized_laplacian(g)
            assert np.all(lap.sum(axis=1) == 0.0)

    def test_normalized_single_edge(self):
        ln = normalized_laplacian(EDGE)
        np.testing.assert_array_equal(ln, [[1, -1], [-1, 1]])
        np.testing.assert_allclose(eigh(ln).lambdas, [0.0, 2.0], atol=1e-12)

    def test_normalized_triangle(self):
        ln = normalized_laplacian(K3)
        np.testing.assert_allclose(ln, np.eye(3) - adjacency(K3) / 2.0, atol=1e-15)
        np.testing.assert_allclose(eigh(ln).lambdas, [0.0, 1.5, 1.5], atol=1e-12)

    def test_normalized_rejects_isolated_node(self):
        g = Graph(3, frozenset({(0, 1)}))
        with pytest.raises(DegenerateInputError, match="node 2"):
            normalized_laplacian(g)

    def test_normalized_spectrum_in_range(self):
        for seed in range(5):
            g = random_graph(30, 0.3, seed)
            if np.any(g.degrees() == 0):
                continue
            lam = eigh(normalized_laplacian(g)).lambdas
            assert lam[0] >= -1e-8 and lam[-1] <= 2.0 + 1e-8

    def test_null_vector_of_connected_graph(self):
        g = random_graph(30, 0.3, 1)
        assert is_connected(g)
        lu = unnormalized_laplacian(g)
        ones = np.ones(g.n) / np.sqrt(g.n)
        norm_lu = np.max(np.abs(np.linalg.eigvalsh(lu)))
        assert np.linalg.norm(lu @ ones) <= 1e-8 * norm_lu
        ln = normalized_laplacian(g)
        v = np.sqrt(g.degrees().astype(float))
        v /= np.linalg.norm(v)
        assert np.linalg.norm(ln @ v) <= 1e-8 * 2.0


class TestTotalVariation:
    def test_constant_signal(self):
        lu = unnormalized_laplacian(EDGE)
        assert total_variation(lu, [1.0, 1.0]) == 0.0

    def test_single_edge_indicator(self):
        # hand expansion: x^T L x = (x0 - x1)^2 = 1, so the halved form is 0.5
        lu = unnormalized_laplacian(EDGE)
        assert total_variation(lu, [1.0, 0.0]) == 0.5

    def test_quadratic_form_equals_edge_sum(self):
        g = random_graph(25, 0.25, 3)
        lu = unnormalized_laplacian(g)
        rng = np.random.default_rng(4)
        x = rng.standard_normal(g.n)
        edge_sum = sum((x[u] - x[v]) ** 2 for u, v in g.edges)
        assert total_variation(lu, x) == pytest.approx(edge_sum / 2.0, rel=1e-12)

    def test_eigenvector_gives_half_frequency(self):
        e = eigh(unnormalized_laplacian(K3))
        lu = unnormalized_laplacian(K3)
        for i in range(3):
            assert total_variation(lu, e.V[:, i]) == pytest.approx(
                e.lambdas[i] / 2.0, abs=1e-12
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            total_variation(unnormalized_laplacian(K3), [1.0, 2.0])


class TestGft:
    def test_first_eigenvector_maps_to_basis(self):
        e = eigh(unnormalized_laplacian(K3))
        np.testing.assert_allclose(gft(e, e.V[:, 0]), [1, 0, 0], atol=1e-12)

    def test_zero_signal(self):
        e = eigh(unnormalized_laplacian(K3))
        np.testing.assert_array_equal(gft(e, np.zeros(3)), np.zeros(3))

    def test_norm_preserved(self):
        e = eigh(unnormalized_laplacian(K3))
        x = np.random.default_rng(0).standard_normal(3)
        assert abs(np.linalg.norm(gft(e, x)) - np.linalg.norm(x)) < 1e-10


class TestPermute:
    def test_identity(self):
        assert permute(K3, [0, 1, 2]) == K3

    def test_swap(self):
        g = Graph(3, frozenset({(0, 2)}))
        assert permute(g, [1, 0, 2]).edges == frozenset({(1, 2)})

    def test_preserves_edge_count_and_degrees(self):
        g = random_graph(20, 0.3, 7)
        perm = np.random.default_rng(8).permutation(20)
        h = permute(g, perm)
        assert h.num_edges == g.num_edges
        assert sorted(h.degrees()) == sorted(g.degrees())

    def test_rejects_non_bijection(self):
        with pytest.raises(ValidationError):
            permute(K3, [0, 0, 1])

    def test_laplacian_conjugation_commutes(self):
        g = random_graph(15, 0.3, 9)
        perm = np.random.default_rng(10).permutation(15)
        pm = np.zeros((15, 15))
        pm[perm, np.arange(15)] = 1.0
        lhs = unnormalized_laplacian(permute(g, perm))
        rhs = pm @ unnormalized_laplacian(g) @ pm.T
        np.testing.assert_array_equal(lhs, rhs)

    def test_membership_permuted(self):
        g = Graph(3, frozenset({(0, 1)}), membership=(0, 0, 1))
        h = permute(g, [2, 0, 1])
        assert h.membership == (0, 1, 0)
