import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpathnet.errors import DomainError, ParseError, ValidationError
from kpathnet.graph import Graph, format_weight, load_edge_list, write_edge_list

from conftest import two_triangles


def test_load_basic_and_comments():
    g = load_edge_list(b"# header\n% other\n10 20\n20 30 2.5\n\n")
    assert g.n == 3 and g.edge_count == 2
    assert g.labels.tolist() == [10, 20, 30]
    assert g.weight.tolist() == [1.0, 2.5]


def test_ids_compacted_in_ascending_order():
    g = load_edge_list(b"7 3\n3 100\n")
    assert g.labels.tolist() == [3, 7, 100]
    assert g.edges().tolist() == [[0, 1], [0, 2]]


def test_duplicates_merge_and_self_loops_drop():
    g = load_edge_list(b"1 2 1\n2 1 2\n3 3\n2 3\n")
    assert g.edge_count == 2
    assert g.weight.tolist() == [3.0, 1.0]
    # vertex 3 survives through its non-loop edge
    assert g.n == 3


def test_reciprocal_arcs_rejected_without_symmetrize():
    with pytest.raises(ValidationError):
        load_edge_list(b"1 2\n2 1\n", symmetrize=False)
    g = load_edge_list(b"1 2\n2 3\n", symmetrize=False)
    assert g.edge_count == 2


@pytest.mark.parametrize("text, line", [
    (b"1 2\n1 2 3 4\n", 2),
    (b"1 x\n", 1),
    (b"1 2 abc\n", 1),
    (b"1 2 inf\n", 1),
    (b"# c\n-1 2\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        load_edge_list(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_negative_weight_is_validation_error():
    with pytest.raises(ValidationError):
        load_edge_list(b"1 2 -0.5\n")


def test_empty_input():
    with pytest.raises(DomainError):
        load_edge_list(b"# nothing\n")


def test_text_stream_and_path(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n")
    assert load_edge_list(p).edge_count == 2
    assert load_edge_list(io.StringIO("0 1\n")).edge_count == 1
    assert load_edge_list(io.BytesIO(b"0 1\n")).edge_count == 1


def test_csr_consistency():
    g = two_triangles()
    assert g.degrees().tolist() == [2] * 6
    for v in range(g.n):
        for e, u in g.incident(v):
            assert {int(g.src[e]), int(g.dst[e])} == {v, u}
    # mirror slots point at the same edge from the other side
    assert np.array_equal(g.adj_edge[g.adj_mirror], g.adj_edge)
    assert np.array_equal(g.adj_mirror[g.adj_mirror], np.arange(2 * g.edge_count))
    assert np.array_equal(g.adj_edge[g.edge_slot], np.arange(g.edge_count))


def test_arrays_are_read_only():
    g = two_triangles()
    with pytest.raises(ValueError):
        g.weight[0] = 5.0


def test_normalized_degree():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert g.normalized_degree(0) == 0.75
    assert g.normalized_degree(1) == 0.25
    with pytest.raises(DomainError):
        g.normalized_degree(4)


def test_from_edges_validation():
    with pytest.raises(ValidationError):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(ValidationError):
        Graph.from_edges(2, [(0, 1)], weights=[-1.0])
    with pytest.raises(ValidationError):
        two_triangles().with_weights([1.0])


def test_format_weight():
    assert format_weight(3.0) == "3"
    assert format_weight(0.1) == "0.1"
    assert float(format_weight(1 / 3)) == 1 / 3


edge_lists = st.lists(
    st.tuples(st.integers(0, 40), st.integers(0, 40), st.floats(0, 100, allow_nan=False)),
    min_size=1, max_size=60,
).filter(lambda es: any(u != v for u, v, _ in es))


@settings(max_examples=150, deadline=None)
@given(edge_lists)
def test_write_read_round_trip(edges):
    text = "".join(f"{u} {v} {format_weight(w)}\n" for u, v, w in edges)
    g = load_edge_list(text.encode())
    buf = io.StringIO()
    write_edge_list(g, buf)
    h = load_edge_list(buf.getvalue().encode())
    assert np.array_equal(g.labels[g.src], h.labels[h.src])
    assert np.array_equal(g.labels[g.dst], h.labels[h.dst])
    assert np.array_equal(g.weight, h.weight)
    # idempotent once normalised
    buf2 = io.StringIO()
    write_edge_list(h, buf2)
    assert buf2.getvalue() == buf.getvalue()


@settings(max_examples=150, deadline=None)
@given(edge_lists)
def test_handshake(edges):
    g = load_edge_list("".join(f"{u} {v}\n" for u, v, _ in edges).encode())
    assert int(g.degrees().sum()) == 2 * g.edge_count
    assert np.all(g.src < g.dst)
