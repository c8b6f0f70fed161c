import pytest

from stochmatch.errors import (BadProbability, DuplicateEdge, GraphError, NotAMatching,
                               Overflow, SelfLoop)
from stochmatch.graph import (build_graph, format_edge_list, parse_edge_list,
                              read_edge_list, symmetric_difference, validate_matching,
                              write_edge_list)


def square():
    # 4-cycle 0-1-2-3-0
    return build_graph(4, [(0, 1, 5, 1), (1, 2, 7, 1), (2, 3, 5, 1), (3, 0, 7, 1)])


def test_build_assigns_ids_in_input_order():
    g = build_graph(3, [(2, 0, 4, 0.5), (0, 1, 1, 1.0)])
    assert [e.id for e in g.edges] == [0, 1]
    assert g.endpoints(0) == (2, 0)
    assert g.weight([0, 1]) == 5
    assert g.p_min == 0.5


@pytest.mark.parametrize("edges, exc", [
    ([(0, 0, 1, 1)], SelfLoop),
    ([(0, 1, 1, 1), (1, 0, 2, 1)], DuplicateEdge),
    ([(0, 1, 1, 0.0)], BadProbability),
    ([(0, 1, 1, 1.5)], BadProbability),
    ([(0, 1, -1, 1)], GraphError),
    ([(0, 1, 1.5, 1)], GraphError),
    ([(0, 5, 1, 1)], GraphError),
    ([(0, 1, 2**62, 1), (1, 2, 2**62, 1)], Overflow),
])
def test_build_rejects(edges, exc):
    with pytest.raises(exc):
        build_graph(3, edges)


def test_validate_matching_rejects_shared_vertex():
    g = square()
    assert validate_matching(g, [0, 2]).weight == 10
    with pytest.raises(NotAMatching):
        validate_matching(g, [0, 1])


def test_symmetric_difference_cycle_and_path():
    g = square()
    a, b = validate_matching(g, [0, 2]), validate_matching(g, [1, 3])
    comps = symmetric_difference(a, b, g)
    assert len(comps) == 1 and comps[0].shape == "cycle"
    # starts at the smallest edge of the second matching
    assert comps[0].edges[0] == 1 and sorted(comps[0].edges) == [0, 1, 2, 3]

    comps = symmetric_difference(validate_matching(g, [0]), validate_matching(g, [1]), g)
    assert [c.shape for c in comps] == ["path"]
    assert sorted(comps[0].edges) == [0, 1]


def test_symmetric_difference_of_equal_matchings_is_empty():
    g = square()
    m = validate_matching(g, [0, 2])
    assert symmetric_difference(m, m, g) == []


def test_edge_list_round_trip(tmp_path):
    g = build_graph(4, [(0, 1, 3, 0.25), (2, 3, 9, 1.0)])
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    assert read_edge_list(path) == g
    assert parse_edge_list(format_edge_list(g)) == g


def test_edge_list_default_probability_and_comments():
    g = parse_edge_list("# demo\nn 3 m 2\n0 1 4\n1 2 6 0.5\n", p=0.75)
    assert [e.p for e in g.edges] == [0.75, 0.5]


def test_edge_list_needs_header():
    with pytest.raises(GraphError):
        parse_edge_list("0 1 4\n")
