#!/usr/bin/env python3
"""
Tests for the 3-graph core: canonical construction, degree and codegree
bookkeeping, vertex maps, twins, isomorphism and the .3g format.
"""

import json
import os
import sys

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from constructions import BlowupSpec, blowup
from tests.strategies import graphs, graphs_with_permutation
from three_graph import (VertexMap, build, codegree, codegree_table, degree, degrees, empty_graph,
                         induced_subgraph, invariant_signature, is_homomorphism, is_isomorphic,
                         link, pair_stats, parse_3g, read_graph, relabel, shadow, to_3g,
                         twin_quotient, write_graph)
from utils.errors import (ArityMismatch, Degenerate, InvalidSpec, OutOfRange, ParseError,
                          SameVertex, TooLarge)

K4MINUS = build(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3)])


def test_build_is_canonical():
    graph = build(4, [(2, 1, 0), (0, 1, 2), (3, 0, 1)])
    assert graph.edges == ((0, 1, 2), (0, 1, 3))
    assert graph.num_edges == 2
    assert graph == build(4, [(0, 1, 3), (1, 2, 0)])
    assert hash(graph) == hash(build(4, [(0, 1, 3), (1, 2, 0)]))


def test_build_accepts_arrays():
    arr = np.array([[3, 2, 1], [0, 1, 2]])
    assert build(4, arr).edges == ((0, 1, 2), (1, 2, 3))
    assert build(5, np.empty((0, 3), dtype=np.int64)).num_edges == 0


def test_build_rejects_bad_triples():
    with pytest.raises(Degenerate):
        build(3, [(0, 0, 1)])
    with pytest.raises(OutOfRange):
        build(3, [(0, 1, 3)])
    with pytest.raises(OutOfRange):
        build(-1, [])
    with pytest.raises(InvalidSpec):
        build(4, [(0, 1)])


def test_has_edge_in_any_order():
    assert K4MINUS.has_edge(2, 0, 1)
    assert K4MINUS.has_edge(3, 2, 0)
    assert not K4MINUS.has_edge(1, 2, 3)
    assert not K4MINUS.has_edge(0, 0, 1)
    assert not K4MINUS.has_edge(0, 1, 9)


def test_degrees_and_codegrees_of_k4minus():
    assert list(degrees(K4MINUS)) == [3, 2, 2, 2]
    assert degree(K4MINUS, 0) == 3
    assert codegree(K4MINUS, 0, 1) == 2
    assert codegree(K4MINUS, 2, 3) == 1
    table = codegree_table(K4MINUS)
    assert table.shape == (4, 4)
    np.testing.assert_array_equal(table, table.T)
    assert (np.diag(table) == 0).all()
    with pytest.raises(SameVertex):
        codegree(K4MINUS, 1, 1)
    with pytest.raises(OutOfRange):
        degree(K4MINUS, 4)


def test_codegree_table_limit():
    with pytest.raises(TooLarge):
        codegree_table(empty_graph(10), limit=5)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_handshake(graph):
    assert int(degrees(graph).sum()) == 3 * graph.num_edges
    table = codegree_table(graph)
    assert int(np.triu(table, 1).sum()) == 3 * graph.num_edges
    assert sum(s.codegree for s in pair_stats(graph)) == 3 * graph.num_edges


def test_shadow_link_and_induced_subgraph():
    assert shadow(K4MINUS) == frozenset({(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)})
    assert link(K4MINUS, 0) == frozenset({(1, 2), (1, 3), (2, 3)})
    assert link(K4MINUS, 3) == frozenset({(0, 1), (0, 2)})
    sub = induced_subgraph(K4MINUS, [3, 0, 1])
    assert sub.n == 3
    assert sub.edges == ((0, 1, 2),)
    with pytest.raises(InvalidSpec):
        induced_subgraph(K4MINUS, [0, 0, 1])


def test_vertex_map_validation_and_composition():
    with pytest.raises(ArityMismatch):
        VertexMap(3, 2, (0, 1))
    with pytest.raises(OutOfRange):
        VertexMap(2, 2, (0, 2))
    with pytest.raises(InvalidSpec):
        VertexMap(2, 3, (1, 1), 'injective')
    with pytest.raises(InvalidSpec):
        VertexMap(2, 3, (0, 1), 'bijective')
    first = VertexMap(3, 3, (1, 2, 0), 'bijective')
    second = VertexMap(3, 2, (0, 0, 1))
    composed = first.then(second)
    assert composed.image == (0, 1, 0)
    assert composed.kind == 'general'
    assert VertexMap.from_dict(composed.to_dict()) == composed


def test_is_homomorphism():
    single = build(3, [(0, 1, 2)])
    two_edges = build(4, [(0, 1, 2), (0, 1, 3)])
    assert is_homomorphism(VertexMap(4, 3, (0, 1, 2, 2)), two_edges, single)
    assert not is_homomorphism(VertexMap(4, 3, (0, 0, 1, 2)), two_edges, single)
    # acd collapses under any map of K4minus onto three vertices
    assert not is_homomorphism(VertexMap(4, 3, (0, 1, 2, 2)), K4MINUS, single)


@settings(max_examples=60, deadline=None)
@given(graphs_with_permutation())
def test_isomorphism_under_relabelling(pair):
    graph, perm = pair
    image = relabel(graph, perm)
    witness = is_isomorphic(graph, image)
    assert witness is not None
    assert witness.kind == 'bijective'
    assert is_homomorphism(witness, graph, image)
    assert invariant_signature(graph) == invariant_signature(image)


@settings(max_examples=60, deadline=None)
@given(graphs_with_permutation(3, 6), st.data())
def test_isomorphism_is_symmetric_and_relabelling_invariant(pair, data):
    graph, perm = pair
    other = data.draw(graphs(graph.n, graph.n))
    forward = is_isomorphic(graph, other) is not None
    assert (is_isomorphic(other, graph) is not None) == forward
    assert (is_isomorphic(relabel(graph, perm), other) is not None) == forward


def test_non_isomorphic_graphs():
    path = build(5, [(0, 1, 2), (2, 3, 4)])
    sunflower = build(5, [(0, 1, 2), (0, 1, 3)])
    assert is_isomorphic(path, sunflower) is None
    assert is_isomorphic(path, build(5, [(0, 1, 2)])) is None
    with pytest.raises(TooLarge):
        is_isomorphic(empty_graph(13), empty_graph(13))


def test_relabel_rejects_non_permutation():
    with pytest.raises(ArityMismatch):
        relabel(K4MINUS, [0, 0, 1, 2])


def test_twin_quotient_collapses_blowup_parts():
    # blowup of one edge with parts {0,1}, {2,3}, {4,5}
    triples = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    quotient, projection = twin_quotient(build(6, triples))
    assert quotient == build(3, [(0, 1, 2)])
    assert projection.image == (0, 0, 1, 1, 2, 2)
    assert projection.role == 'identification'


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_twin_quotient_projection_is_homomorphism(graph):
    quotient, projection = twin_quotient(graph)
    assert quotient.n <= graph.n
    assert is_homomorphism(projection, graph, quotient)
    assert quotient.num_edges <= graph.num_edges


@settings(max_examples=40, deadline=None)
@given(graphs(3, 5), st.data())
def test_twin_quotient_of_a_blowup_recovers_its_pattern(pattern, data):
    assume(twin_quotient(pattern)[0].n == pattern.n)
    sizes = data.draw(st.lists(st.integers(1, 4), min_size=pattern.n, max_size=pattern.n))
    quotient, projection = twin_quotient(blowup(BlowupSpec(pattern, sizes)))
    assert quotient.n == pattern.n
    assert is_isomorphic(quotient, pattern) is not None
    assert sorted(np.bincount(projection.image).tolist()) == sorted(sizes)


def test_3g_text_roundtrip():
    text = to_3g(K4MINUS)
    assert text == "4 3\n0 1 2\n0 1 3\n0 2 3\n"
    assert parse_3g(text) == K4MINUS


@pytest.mark.parametrize('text', [
    '',
    '4\n',
    '4 2\n0 1 2\n',
    '4 1\n0 2 1\n',
    '4 2\n0 1 3\n0 1 2\n',
    '4 2\n0 1 2\n0 1 2\n',
    '4 1\n0 1 4\n',
    '4 1\n0 1 x\n',
    '# comment\n3 0\n',
    '3 1\n#0 1 2\n',
])
def test_3g_parser_is_strict(text):
    with pytest.raises(ParseError):
        parse_3g(text)
    with pytest.raises(ValueError):
        parse_3g(text)


def test_write_and_read_graph_with_labels(tmp_path):
    path = os.path.join(tmp_path, 'k4.3g')
    written = write_graph(K4MINUS, path, ['a', 'b', 'c', 'd'])
    assert written == [path, os.path.join(tmp_path, 'k4.labels')]
    assert read_graph(path) == K4MINUS
    with open(written[1]) as f:
        assert json.load(f) == {'0': 'a', '1': 'b', '2': 'c', '3': 'd'}
