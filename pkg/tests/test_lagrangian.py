#!/usr/bin/env python3
"""
Tests for Lagrange polynomial evaluation, replicator maximization and
density bookkeeping.
"""

import os
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from constructions import BlowupSpec, catalog
from lagrangian import (Weights, blowup_consistency, crossed_weights, density_report, gradient,
                        gradient_check, lagrange_poly, lagrange_poly_raw, maximize)
from tests.strategies import graphs
from three_graph import build, empty_graph
from utils.errors import AlphaOutOfRange, InvalidSpec, LengthMismatch, NegativeWeight

SINGLE_EDGE = build(3, [(0, 1, 2)])
THIRD = Fraction(1, 3)


def test_single_edge_exact_value():
    assert lagrange_poly(SINGLE_EDGE, Weights.exact((THIRD, THIRD, THIRD))) == Fraction(1, 27)


def test_single_edge_maximum():
    result = maximize(SINGLE_EDGE, restarts=8, seed=3)
    assert abs(result.value - 1 / 27) < 1e-9
    np.testing.assert_allclose(result.weights, [1 / 3] * 3, atol=1e-4)
    assert not result.no_edges
    assert result.restarts == 9
    assert result.kind == 'empirical maximum'


@pytest.mark.parametrize('alpha', [Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)])
def test_crossed_family_reaches_one_over_27(alpha):
    assert lagrange_poly(catalog('Rcross'), crossed_weights(alpha)) == Fraction(1, 27)


def test_crossed_weights_validation():
    with pytest.raises(AlphaOutOfRange):
        crossed_weights(Fraction(1, 2))


def test_rcross_maximum_does_not_exceed_one_over_27():
    result = maximize(catalog('Rcross'), restarts=16, seed=5)
    assert result.value <= 1 / 27 + 1e-9
    assert result.value > 1 / 27 - 1e-6


def test_weights_validation():
    with pytest.raises(NegativeWeight):
        Weights.exact((Fraction(-1, 3), Fraction(2, 3), Fraction(2, 3)))
    with pytest.raises(InvalidSpec):
        Weights.exact((THIRD, THIRD, THIRD, THIRD))
    with pytest.raises(InvalidSpec):
        Weights.floating((0.5, 0.4))
    assert len(Weights.floating((0.5, 0.5))) == 2
    with pytest.raises(LengthMismatch):
        lagrange_poly(SINGLE_EDGE, Weights.exact((Fraction(1, 2), Fraction(1, 2))))
    with pytest.raises(NegativeWeight):
        lagrange_poly_raw(SINGLE_EDGE, [0.5, -0.1, 0.6])


@settings(max_examples=40, deadline=None)
@given(graphs(), st.integers(1, 5))
def test_polynomial_is_cubic_homogeneous(graph, scale):
    x = [Fraction(i + 1, 7) for i in range(graph.n)]
    scaled = [scale * v for v in x]
    assert lagrange_poly_raw(graph, scaled) == scale ** 3 * lagrange_poly_raw(graph, x)


def test_float_and_exact_evaluation_agree():
    graph = catalog('R2')
    x = [Fraction(i + 1, 28) for i in range(7)]
    exact = lagrange_poly_raw(graph, x)
    approx = lagrange_poly_raw(graph, [float(v) for v in x])
    assert abs(float(exact) - approx) < 1e-15


def test_gradient():
    grad = gradient(SINGLE_EDGE, [0.2, 0.3, 0.5])
    np.testing.assert_allclose(grad, [0.15, 0.1, 0.06])
    check = gradient_check(catalog('R2'), np.full(7, 1 / 7))
    assert check['ok']
    assert check['max_abs'] < 1e-8


def test_no_edges():
    result = maximize(empty_graph(4))
    assert result.no_edges
    assert result.value == 0.0
    assert result.weights == (0.25,) * 4
    np.testing.assert_array_equal(gradient(empty_graph(2), [0.5, 0.5]), [0.0, 0.0])


def test_density_report():
    spec = BlowupSpec(SINGLE_EDGE, (2, 2, 2))
    report = density_report(spec)
    assert report['edges'] == 8
    assert report['density'] == Fraction(8, 20)
    assert report['asymptotic_density'] == Fraction(6, 27)
    explicit = density_report(catalog('K4minus'))
    assert explicit['density'] == Fraction(3, 4)
    pattern = density_report(SINGLE_EDGE, [THIRD, THIRD, THIRD])
    assert pattern['asymptotic_density'] == Fraction(2, 9)
    with pytest.raises(InvalidSpec):
        density_report('K4minus')


def test_blowup_consistency_bounded_by_edge_count():
    pattern = catalog('Rcross')
    report = blowup_consistency(pattern, crossed_weights(Fraction(1, 4)).x, [12, 24, 48])
    assert report['p'] == Fraction(1, 27)
    assert report['max_constant'] <= 4 * pattern.num_edges
    assert [r['n'] for r in report['rows']] == [12, 24, 48]
