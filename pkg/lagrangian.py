#!/usr/bin/env python3
"""
Lagrange polynomials p_G(x) = sum over edges ijk of x_i x_j x_k, evaluated
exactly (Fractions) or in floating point, and maximized over the simplex
by multiplicative (replicator) ascent from many starting points.

Maximization results are empirical maxima: they certify a lower bound on
the Lagrangian, never an upper bound.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from constructions import BlowupSpec, apportion, blowup, check_alpha
from three_graph import ThreeGraph
from utils.config import parse_fraction, section
from utils.errors import InvalidSpec, LengthMismatch, NegativeWeight
from utils.log import get_logger
from utils.metrics import quadratic_constants
from utils.rng import make_rng

logger = get_logger('lagrangian')

EXACT = 'exact_rational'
FLOAT = 'float'
FLOAT_SUM_TOLERANCE = 1e-12
# replicator steps may lose this much to rounding without counting as a decrease
MONOTONE_SLACK = 1e-13


@dataclass(frozen=True)
class Weights:
    """A point of the simplex, exact or floating."""
    x: tuple
    mode: str = EXACT

    def __post_init__(self):
        if self.mode == EXACT:
            values = tuple(parse_fraction(v) for v in self.x)
            total = sum(values, Fraction(0))
            ok = total == 1
        elif self.mode == FLOAT:
            values = tuple(float(v) for v in self.x)
            total = sum(values)
            ok = abs(total - 1.0) <= FLOAT_SUM_TOLERANCE
        else:
            raise InvalidSpec(f"unknown weight mode {self.mode!r}")
        if any(v < 0 for v in values):
            raise NegativeWeight(f"negative weight in {values}")
        if not ok:
            raise InvalidSpec(f"weights sum to {total}, not 1")
        object.__setattr__(self, 'x', values)

    @classmethod
    def exact(cls, values):
        return cls(tuple(values), EXACT)

    @classmethod
    def floating(cls, values):
        return cls(tuple(values), FLOAT)

    def __len__(self):
        return len(self.x)

    def to_dict(self):
        return {'x': list(self.x), 'mode': self.mode}


@dataclass
class LagrangianResult:
    value: float
    weights: tuple
    restarts: int
    gap_estimate: float
    no_edges: bool = False
    non_convergence: bool = False
    iterations: int = 0
    restart_values: list = field(default_factory=list)
    kind: str = 'empirical maximum'

    def to_dict(self):
        return {
            'value': self.value,
            'weights': list(self.weights),
            'restarts': self.restarts,
            'gap_estimate': self.gap_estimate,
            'no_edges': self.no_edges,
            'non_convergence': self.non_convergence,
            'iterations': self.iterations,
            'kind': self.kind,
        }


def _is_exact(values):
    return any(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values) and \
        not any(isinstance(v, float) for v in values)


def lagrange_poly_raw(G, x):
    """p_G at any nonnegative vector; exact when x holds Fractions/ints."""
    if len(x) != G.n:
        raise LengthMismatch(f"{len(x)} weights for {G.n} vertices")
    if _is_exact(x):
        x = [Fraction(v) for v in x]
        if any(v < 0 for v in x):
            raise NegativeWeight("negative weight")
        return sum((x[a] * x[b] * x[c] for a, b, c in G.edges), Fraction(0))
    arr = np.asarray(x, dtype=float)
    if (arr < 0).any():
        raise NegativeWeight("negative weight")
    if G.num_edges == 0:
        return 0.0
    return float(arr[G.edge_array].prod(axis=1).sum())


def lagrange_poly(G, w):
    if len(w) != G.n:
        raise LengthMismatch(f"{len(w)} weights for {G.n} vertices")
    return lagrange_poly_raw(G, list(w.x))


def gradient(G, x):
    """Partial derivatives dp/dx_i = sum over edges ijk of x_j x_k."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != G.n:
        raise LengthMismatch(f"{x.shape[0]} weights for {G.n} vertices")
    grad = np.zeros(G.n)
    if G.num_edges == 0:
        return grad
    E = G.edge_array
    np.add.at(grad, E[:, 0], x[E[:, 1]] * x[E[:, 2]])
    np.add.at(grad, E[:, 1], x[E[:, 0]] * x[E[:, 2]])
    np.add.at(grad, E[:, 2], x[E[:, 0]] * x[E[:, 1]])
    return grad


def gradient_check(G, x, step=1e-6):
    """Compare the analytic gradient against central differences."""
    x = np.asarray(x, dtype=float)
    analytic = gradient(G, x)
    numeric = np.zeros(G.n)
    for i in range(G.n):
        up = x.copy()
        down = x.copy()
        up[i] += step
        down[i] -= step
        numeric[i] = (_poly_unchecked(G, up) - _poly_unchecked(G, down)) / (2.0 * step)
    close = np.isclose(analytic, numeric, rtol=1e-6, atol=1e-9)
    denom = np.maximum(np.abs(analytic), 1e-12)
    return {
        'max_abs': float(np.max(np.abs(analytic - numeric))) if G.n else 0.0,
        'max_rel': float(np.max(np.abs(analytic - numeric) / denom)) if G.n else 0.0,
        'ok': bool(close.all()),
    }


def _poly_unchecked(G, x):
    # finite differences may step slightly below zero
    if G.num_edges == 0:
        return 0.0
    return float(x[G.edge_array].prod(axis=1).sum())


def _ascend(G, x, tol, max_iter):
    """Replicator ascent x <- x * grad / (3 p) from x; returns (x, p, iterations, converged)."""
    p = _poly_unchecked(G, x)
    for it in range(1, max_iter + 1):
        grad = gradient(G, x)
        x_next = x * grad / (3.0 * p)
        x_next /= x_next.sum()
        p_next = _poly_unchecked(G, x_next)
        assert p_next >= p - MONOTONE_SLACK, f"replicator step decreased p: {p} -> {p_next}"
        if abs(p_next - p) < tol:
            return x_next, p_next, it, True
        x, p = x_next, p_next
    return x, p, max_iter, False


def maximize(G, restarts=None, tol=None, seed=None, max_iter=None):
    """
    Multistart replicator ascent: the barycenter plus `restarts` uniform
    random simplex points. Returns the best point, re-evaluated.
    """
    cfg = section('lagrangian')
    restarts = cfg['restarts'] if restarts is None else restarts
    tol = cfg['tol'] if tol is None else tol
    max_iter = cfg['max_iter'] if max_iter is None else max_iter
    seed = section('certify')['seed'] if seed is None else seed

    if G.n == 0 or G.num_edges == 0:
        weights = tuple([1.0 / G.n] * G.n) if G.n else ()
        return LagrangianResult(0.0, weights, 0, 0.0, no_edges=True)

    rng = make_rng(seed, 'lagrangian', G.n, G.num_edges)
    starts = [np.full(G.n, 1.0 / G.n)]
    starts += [rng.dirichlet(np.ones(G.n)) for _ in range(restarts)]

    best_x, best_p = None, -1.0
    values = []
    converged_values = []
    total_iterations = 0
    all_converged = True
    for x0 in starts:
        x, p, its, converged = _ascend(G, x0, tol, max_iter)
        total_iterations += its
        values.append(p)
        if converged:
            converged_values.append(p)
        else:
            all_converged = False
        if p > best_p:
            best_x, best_p = x, p

    gap = max(converged_values) - min(converged_values) if converged_values else 0.0
    value = lagrange_poly_raw(G, list(best_x))
    if not all_converged:
        logger.warning("replicator ascent did not converge on every restart (max_iter=%d)", max_iter)
    logger.debug("lagrangian of %r: %.12f over %d starts", G, value, len(starts))
    return LagrangianResult(
        value=value,
        weights=tuple(float(v) for v in best_x),
        restarts=len(starts),
        gap_estimate=float(gap),
        non_convergence=not all_converged,
        iterations=total_iterations,
        restart_values=values,
    )


def crossed_weights(alpha):
    """Exact weights on R_x (vertex order A_x, A_y, B00, B10, B01, B11) for one alpha."""
    alpha = check_alpha(alpha)
    third = Fraction(1, 3)
    return Weights.exact((Fraction(1, 6), Fraction(1, 6), alpha * third, (1 - alpha) * third,
                          (1 - alpha) * third, alpha * third))


def density_report(obj, proportions=None):
    """
    Edge density of an explicit graph, or of a BlowupSpec (exact finite
    count plus the asymptotic density 6 p(pattern, proportions)). A
    ThreeGraph with proportions is treated as a blowup pattern.
    """
    if isinstance(obj, BlowupSpec):
        n = obj.n
        edges = obj.expected_edges()
        if proportions is None:
            proportions = [Fraction(s, n) for s in obj.sizes] if n else []
        report = {'n': n, 'edges': edges,
                  'density': Fraction(edges, comb(n, 3)) if n >= 3 else Fraction(0)}
        report['asymptotic_density'] = 6 * lagrange_poly(obj.pattern, Weights.exact(proportions))
        return report
    if not isinstance(obj, ThreeGraph):
        raise InvalidSpec(f"density_report expects a ThreeGraph or BlowupSpec, got {type(obj).__name__}")
    if proportions is not None:
        return {'pattern_n': obj.n, 'pattern_edges': obj.num_edges,
                'asymptotic_density': 6 * lagrange_poly(obj, Weights.exact(proportions))}
    n = obj.n
    return {'n': n, 'edges': obj.num_edges,
            'density': Fraction(obj.num_edges, comb(n, 3)) if n >= 3 else Fraction(0)}


def blowup_consistency(pattern, proportions, ns):
    """
    |E(blowup)| - p n^3 along a ladder, with apportioned part sizes, and the
    fitted constant of the O(n^2) bound.
    """
    proportions = [parse_fraction(p) for p in proportions]
    p = lagrange_poly(pattern, Weights.exact(proportions))
    rows = []
    for n in ns:
        sizes = apportion([q * n for q in proportions], n)
        edges = blowup(BlowupSpec(pattern, sizes)).num_edges
        rows.append({'n': n, 'edges': edges, 'difference': edges - p * n ** 3})
    fit = quadratic_constants(ns, [r['difference'] for r in rows])
    return {'p': p, 'rows': rows, 'constants': fit['constants'],
            'max_constant': fit['max'], 'stable': fit['stable']}
