import numpy as np
import pytest

from dpa.core import (
    DirectedMultigraph,
    EndpointRangeError,
    GraphFormatError,
    ModelParams,
    NoVertexGrowthError,
    ProbabilityRangeError,
    ProbabilitySumError,
    SeedEdgeError,
    SeedGraph,
    default_seed,
    load_graph,
    save_graph,
    validate_params,
)


PSTAR = ModelParams(0.25, 0.5, 0.25, 1.0, 1.0)


class TestModelParams:
    def test_valid_roundtrip(self):
        p, seed = validate_params(PSTAR)
        assert p.alpha == 0.25
        assert p.beta == 0.5
        assert p.gamma == 0.25
        assert seed.n0 == 1
        assert seed.t0 == 0

    def test_beta_recomputed_exactly(self):
        # beta slightly off but within tolerance: replaced by 1 - alpha - gamma
        p, _ = validate_params(ModelParams(0.3, 0.4 + 5e-13, 0.3, 0.0, 1.0))
        assert p.beta == 1.0 - 0.3 - 0.3

    def test_sum_error(self):
        with pytest.raises(ProbabilitySumError):
            validate_params(ModelParams(0.5, 0.5, 0.5, 1.0, 1.0))

    def test_range_error_negative(self):
        with pytest.raises(ProbabilityRangeError):
            validate_params(ModelParams(-0.1, 0.6, 0.5, 1.0, 1.0))

    def test_negative_delta(self):
        with pytest.raises(ProbabilityRangeError):
            validate_params(ModelParams(0.25, 0.5, 0.25, -1.0, 1.0))

    def test_no_vertex_growth(self):
        with pytest.raises(NoVertexGrowthError):
            validate_params(ModelParams(0.0, 1.0, 0.0, 1.0, 1.0))

    def test_dict_roundtrip(self):
        d = PSTAR.as_dict()
        assert ModelParams.from_dict(d) == PSTAR


class TestSeeds:
    def test_default_seed_positive_deltas(self):
        seed = default_seed(PSTAR)
        assert seed.n0 == 1
        assert seed.edges == ()

    def test_default_seed_zero_delta_needs_edge(self):
        seed = default_seed(ModelParams(0.3, 0.4, 0.3, 0.0, 1.0))
        assert seed.t0 >= 1

    def test_zero_delta_empty_seed_rejected(self):
        p = ModelParams(0.3, 0.4, 0.3, 0.0, 1.0)
        with pytest.raises(SeedEdgeError):
            validate_params(p, SeedGraph(n0=2, edges=()))

    def test_zero_delta_out_empty_seed_rejected(self):
        p = ModelParams(0.3, 0.4, 0.3, 1.0, 0.0)
        with pytest.raises(SeedEdgeError):
            validate_params(p, SeedGraph(n0=1, edges=()))

    def test_seed_edge_out_of_range(self):
        with pytest.raises(EndpointRangeError):
            validate_params(PSTAR, SeedGraph(n0=1, edges=((0, 1),)))

    def test_seed_degrees(self):
        seed = SeedGraph(n0=3, edges=((0, 1), (1, 1), (2, 2)))
        assert seed.in_degrees().tolist() == [0, 2, 1]
        assert seed.out_degrees().tolist() == [1, 1, 1]
        assert seed.t0 == 3


class TestDirectedMultigraph:
    def test_from_edges_degrees(self):
        g = DirectedMultigraph.from_edges(3, [(0, 1), (1, 2), (2, 2), (0, 1)])
        assert g.t == 4
        assert g.in_deg.tolist() == [0, 2, 2]
        assert g.out_deg.tolist() == [2, 1, 1]
        # loops count on both sides
        assert g.in_deg[2] == 2 and g.out_deg[2] == 1

    def test_from_edges_range_check(self):
        with pytest.raises(EndpointRangeError):
            DirectedMultigraph.from_edges(2, [(0, 2)])

    def test_edges_property(self):
        g = DirectedMultigraph.from_edges(2, [(0, 1), (1, 0)])
        assert g.edges.tolist() == [[0, 1], [1, 0]]

    def test_from_seed(self):
        g = DirectedMultigraph.from_seed(SeedGraph(2, ((0, 1),)))
        assert g.n == 2 and g.t == 1


class TestGraphCsv:
    def test_roundtrip(self, tmp_path):
        g = DirectedMultigraph.from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 0)])
        path = tmp_path / "edges.csv"
        save_graph(g, path)
        back = load_graph(path)
        assert back.n == g.n
        assert np.array_equal(back.src, g.src)
        assert np.array_equal(back.dst, g.dst)
        assert np.array_equal(back.in_deg, g.in_deg)

    def test_save_rejects_uncovered_vertex(self, tmp_path):
        # vertex 2 appears in no edge: its existence cannot round-trip
        g = DirectedMultigraph.from_edges(3, [(0, 1)])
        with pytest.raises(GraphFormatError):
            save_graph(g, tmp_path / "edges.csv")

    def test_load_rejects_bad_header(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("source,target\n0,0\n")
        with pytest.raises(GraphFormatError):
            load_graph(path)

    def test_load_rejects_malformed_row(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("src,dst\n0,0\n1\n")
        with pytest.raises(GraphFormatError) as err:
            load_graph(path)
        assert "3" in str(err.value)  # line number in message

    def test_load_rejects_non_integer(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("src,dst\n0,x\n")
        with pytest.raises(GraphFormatError):
            load_graph(path)

    def test_load_rejects_negative(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("src,dst\n0,-1\n")
        with pytest.raises(GraphFormatError):
            load_graph(path)

    def test_load_rejects_index_gap(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("src,dst\n0,3\n")
        with pytest.raises(GraphFormatError):
            load_graph(path)

    def test_load_empty_graph(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("src,dst\n")
        g = load_graph(path)
        assert g.n == 0 and g.t == 0
