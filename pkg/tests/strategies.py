"""Hypothesis strategies shared by the test modules."""

from itertools import combinations

from hypothesis import strategies as st

from three_graph import build


@st.composite
def graphs(draw, min_n=3, max_n=7):
    n = draw(st.integers(min_n, max_n))
    triples = list(combinations(range(n), 3))
    chosen = draw(st.lists(st.sampled_from(triples), unique=True, max_size=len(triples)))
    return build(n, chosen)


@st.composite
def graphs_with_permutation(draw, min_n=3, max_n=7):
    graph = draw(graphs(min_n, max_n))
    perm = draw(st.permutations(list(range(graph.n))))
    return graph, list(perm)
