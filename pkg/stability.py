#!/usr/bin/env python3
"""
Codegree-square statistic Q(H) = sum over pairs of d_H(u, v)^2 and the
finite checks built on it: the Lipschitz bound under edge flips, the
(3 - alpha + alpha^2)/81 law for crossed blowups, edit-distance separation
of G_alpha(n) from G_beta(n), and the pigeonhole report.

All comparisons are exact (Fractions) and use the part sizes actually built.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
import pandas as pd

from constructions import (CROSSED_MIN_N, CROSSED_PARTS, CrossedBlowupSpec, blowup, catalog,
                           check_alpha, crossed_blowup, crossed_blowup_spec, crossed_edge_count,
                           crossed_part_of, crossed_part_sizes)
from hom_solver import HomProblem, hom_exists
from three_graph import build, codegree_table, degrees, is_isomorphic, pack_triple, twin_quotient
from utils.config import parse_fraction, section
from utils.errors import ArityMismatch, EqualParameters, TooLarge
from utils.log import get_logger
from utils.metrics import fit_decay_exponent, is_non_increasing, quadratic_constants
from utils.rng import make_rng

logger = get_logger('stability')

APEX_BOTTOM = 'apex_bottom'
ONE_COORDINATE = 'one_coordinate'
TWO_COORDINATE = 'two_coordinate'
OTHER = 'other'
PAIR_TYPES = (APEX_BOTTOM, ONE_COORDINATE, TWO_COORDINATE, OTHER)


def law_target(alpha):
    alpha = check_alpha(alpha)
    return (3 - alpha + alpha * alpha) / 81


def share_targets(alpha):
    """Asymptotic Q/n^4 contribution of each pair type."""
    alpha = check_alpha(alpha)
    return {
        APEX_BOTTOM: Fraction(2, 81),
        ONE_COORDINATE: alpha * (1 - alpha) / 81,
        TWO_COORDINATE: (alpha * alpha + (1 - alpha) ** 2) / 81,
        OTHER: Fraction(0),
    }


def lipschitz_constant(n):
    return 3 * (2 * n + 1)


def _pair_type(p, q):
    if p == q:
        return OTHER
    apexes = {'A_x', 'A_y'}
    if (p in apexes) != (q in apexes):
        return APEX_BOTTOM
    if p in apexes:
        return OTHER
    differing = sum(1 for i in (1, 2) if p[i] != q[i])
    return ONE_COORDINATE if differing == 1 else TWO_COORDINATE


@dataclass
class QReport:
    n: int
    q_value: int
    q_normalized: Fraction
    breakdown: dict = None
    recomputed: int = None

    def to_dict(self):
        return {'n': self.n, 'q_value': self.q_value, 'q_normalized': self.q_normalized,
                'breakdown': self.breakdown, 'recomputed': self.recomputed}


def _q_from_pairs(H):
    """Independent Q: count pair occurrences directly from the edge list."""
    if H.num_edges == 0:
        return 0
    E = H.edge_array.astype(np.int64)
    keys = np.concatenate([E[:, 0] * H.n + E[:, 1], E[:, 0] * H.n + E[:, 2], E[:, 1] * H.n + E[:, 2]])
    _, counts = np.unique(keys, return_counts=True)
    return int((counts.astype(np.int64) ** 2).sum())


def q_statistic(H, parts=None):
    """
    Exact Q(H), computed from the dense codegree table and again from raw
    pair counts. With `parts` (part name per vertex of a crossed blowup)
    the value is split by pair type.
    """
    limit = section('stability')['q_max_n']
    if H.n > limit:
        raise TooLarge(f"Q uses a dense pair table, limited to n <= {limit}; got {H.n}")
    table = codegree_table(H, limit=limit).astype(np.int64)
    squares = np.triu(table * table, 1)
    q_value = int(squares.sum())
    recomputed = _q_from_pairs(H)
    assert q_value == recomputed, f"Q mismatch: {q_value} vs {recomputed}"

    breakdown = None
    if parts is not None:
        names = list(CROSSED_PARTS)
        pid = np.array([names.index(p) for p in parts], dtype=np.int64)
        type_of = np.empty((len(names), len(names)), dtype=np.int64)
        for i, p in enumerate(names):
            for j, q in enumerate(names):
                type_of[i, j] = PAIR_TYPES.index(_pair_type(p, q))
        pair_types = type_of[pid[:, None], pid[None, :]]
        breakdown = {t: int(squares[pair_types == k].sum()) for k, t in enumerate(PAIR_TYPES)}
        assert sum(breakdown.values()) == q_value

    normalized = Fraction(q_value, H.n ** 4) if H.n else Fraction(0)
    return QReport(H.n, q_value, normalized, breakdown, recomputed)


def crossed_q_formula(sizes):
    """Q(G_alpha(n)) in closed form from the six part sizes (A_x, A_y, B00, B01, B10, B11)."""
    ax, ay, b00, b01, b10, b11 = sizes
    x0, x1 = b00 + b01, b10 + b11        # sides of the x-cut
    y0, y1 = b00 + b10, b01 + b11        # sides of the y-cut
    apex_bottom = ax * (x0 * x1 * x1 + x1 * x0 * x0) + ay * (y0 * y1 * y1 + y1 * y0 * y0)
    one_coordinate = ax * ax * (b00 * b10 + b01 * b11) + ay * ay * (b00 * b01 + b10 * b11)
    two_coordinate = (ax + ay) ** 2 * (b00 * b11 + b01 * b10)
    return {APEX_BOTTOM: apex_bottom, ONE_COORDINATE: one_coordinate,
            TWO_COORDINATE: two_coordinate, OTHER: 0}


def crossed_graph(n, alpha):
    """G_alpha(n) and its part names; below the construction floor the sizes are still apportioned."""
    alpha = check_alpha(alpha)
    if n >= CROSSED_MIN_N:
        graph = crossed_blowup(CrossedBlowupSpec(n, alpha))
    else:
        graph = blowup(crossed_blowup_spec(n, alpha))
    return graph, crossed_part_of(n, alpha)


# ---------------------------------------------------------------------------
# Lipschitz bound
# ---------------------------------------------------------------------------

def lipschitz_check(H, flips=None, seed=None):
    """
    Apply random single-edge additions/deletions and track Q incrementally
    (a pair going from codegree d to d +- 1 changes Q by 2d + 1 or -2d + 1).
    After each prefix of k flips, |Q_k - Q_0| <= 3 (2n + 1) k must hold.
    """
    flips = section('stability')['lipschitz_flips'] if flips is None else flips
    seed = section('certify')['seed'] if seed is None else seed
    n = H.n
    bound = lipschitz_constant(n)
    table = codegree_table(H).astype(np.int64)
    q0 = int(np.triu(table * table, 1).sum())
    q = q0
    base = H.packed
    toggled = set()
    rng = make_rng(seed, 'lipschitz', n, H.num_edges)

    def present(key):
        idx = int(np.searchsorted(base, np.uint64(key)))
        in_base = idx < base.shape[0] and int(base[idx]) == key
        return in_base != (key in toggled)

    worst_step = 0
    worst_prefix = 0.0
    violations = []
    if n >= 3:
        for k in range(1, flips + 1):
            a, b, c = sorted(int(v) for v in rng.choice(n, size=3, replace=False))
            key = pack_triple(a, b, c)
            sign = -1 if present(key) else 1
            delta = 0
            for u, v in ((a, b), (a, c), (b, c)):
                d = int(table[u, v])
                delta += 2 * d + 1 if sign > 0 else -2 * d + 1
                table[u, v] += sign
                table[v, u] += sign
            toggled ^= {key}
            q += delta
            worst_step = max(worst_step, abs(delta))
            ratio = abs(q - q0) / (bound * k)
            worst_prefix = max(worst_prefix, ratio)
            if abs(delta) > bound or abs(q - q0) > bound * k:
                violations.append({'flip': k, 'delta': delta, 'total': q - q0})
    else:
        flips = 0

    # rebuild the final graph and recompute Q from scratch
    final = {int(x) for x in base.tolist()} ^ toggled
    final_graph = build(n, [((key >> 32) & 0xFFFF, (key >> 16) & 0xFFFF, key & 0xFFFF)
                            for key in final])
    recomputed = q_statistic(final_graph).q_value
    return {
        'n': n,
        'flips': flips,
        'lipschitz_constant': bound,
        'q_initial': q0,
        'q_final': q,
        'q_final_recomputed': recomputed,
        'max_step_delta': worst_step,
        'max_step_ratio': worst_step / bound,
        'max_prefix_ratio': worst_prefix,
        'violations': violations[:100],
        'passed': not violations and q == recomputed,
    }


# ---------------------------------------------------------------------------
# Q law, edge law, monotonicity
# ---------------------------------------------------------------------------

def q_law_check(alpha, n_values=None):
    """
    Q(G_alpha(n))/n^4 against (3 - alpha + alpha^2)/81 along an n-ladder,
    with the per-pair-type shares and a fitted decay exponent. Exactly
    apportioned ladders have zero deviation, which counts as exact.
    """
    cfg = section('stability')
    alpha = check_alpha(alpha)
    n_values = list(cfg['law_ladder'] if n_values is None else n_values)
    target = law_target(alpha)
    shares = share_targets(alpha)
    rows = []
    for n in n_values:
        graph = crossed_blowup(CrossedBlowupSpec(n, alpha))
        parts = crossed_part_of(n, alpha)
        report = q_statistic(graph, parts)
        sizes = crossed_part_sizes(n, alpha)
        formula = crossed_q_formula(sizes)
        deviation = report.q_normalized - target
        rows.append({
            'n': n,
            'alpha': alpha,
            'sizes': list(sizes),
            'q_value': report.q_value,
            'q_normalized': report.q_normalized,
            'target': target,
            'deviation': deviation,
            'breakdown': report.breakdown,
            'formula_agrees': formula == report.breakdown,
            'share_deviation': {t: Fraction(report.breakdown[t], n ** 4) - shares[t] for t in PAIR_TYPES},
        })
    fit = fit_decay_exponent(n_values, [r['deviation'] for r in rows])
    decreasing = is_non_increasing([abs(r['deviation']) for r in rows])
    if fit['exact']:
        decay_ok = True
    elif fit['exponent'] is None:
        decay_ok = decreasing
    else:
        decay_ok = fit['exponent'] >= cfg['min_decay_exponent'] and decreasing
    passed = decay_ok and all(r['formula_agrees'] for r in rows)
    logger.info("Q law alpha=%s over n=%s: %s", alpha, n_values, 'pass' if passed else 'fail')
    return {'alpha': alpha, 'target': target, 'rows': rows, 'fit': fit,
            'deviations_non_increasing': decreasing, 'passed': passed}


def edge_law_check(alpha, n_values):
    """|G_alpha(n)| - n^3/27 and the constant C of the C n^2 bound along a ladder."""
    alpha = check_alpha(alpha)
    rows = []
    for n in n_values:
        graph, _ = crossed_graph(n, alpha)
        sizes = crossed_part_sizes(n, alpha)
        rows.append({'n': n, 'edges': graph.num_edges,
                     'closed_form': crossed_edge_count(sizes),
                     'difference': graph.num_edges - Fraction(n ** 3, 27)})
    fit = quadratic_constants(n_values, [r['difference'] for r in rows])
    passed = fit['stable'] and all(r['edges'] == r['closed_form'] for r in rows)
    return {'alpha': alpha, 'rows': rows, 'constants': fit['constants'],
            'max_constant': fit['max'], 'passed': passed}


def monotone_check(alphas, n):
    """
    alpha -> Q(G_alpha(n)) strictly decreasing over the sorted alphas.
    Non-strictness is flagged instead of failed when n < 120 or two alphas
    are closer than 1/20.
    """
    alphas = sorted(check_alpha(a) for a in alphas)
    rows = []
    for alpha in alphas:
        graph, _ = crossed_graph(n, alpha)
        rows.append({'alpha': alpha, 'q_value': q_statistic(graph).q_value})
    strict = all(b['q_value'] < a['q_value'] for a, b in zip(rows, rows[1:]))
    min_gap = min((b - a for a, b in zip(alphas, alphas[1:])), default=None)
    lenient = n < 120 or (min_gap is not None and min_gap < Fraction(1, 20))
    return {'n': n, 'rows': rows, 'strict': strict, 'flagged': not strict and lenient,
            'passed': strict or lenient}


def freeness_check(alpha, n_values):
    """No homomorphism F -> twin_quotient(G_alpha(n)), so G_alpha(n) is F-free."""
    alpha = check_alpha(alpha)
    F = catalog('F')
    r_cross = catalog('Rcross')
    rows = []
    for n in n_values:
        graph, _ = crossed_graph(n, alpha)
        quotient, _ = twin_quotient(graph)
        cert = hom_exists(HomProblem(F, quotient))
        rows.append({'n': n, 'quotient_n': quotient.n, 'quotient_edges': quotient.num_edges,
                     'quotient_is_rcross': is_isomorphic(quotient, r_cross) is not None,
                     'verdict': cert.verdict, 'nodes': cert.nodes_explored})
    passed = all(r['verdict'] == 'exhausted' for r in rows)
    return {'alpha': alpha, 'rows': rows, 'passed': passed}


def ladder_table(reports):
    """Flatten q_law_check reports into a DataFrame for CSV output and plotting."""
    records = []
    for report in reports:
        for row in report['rows']:
            records.append({
                'n': row['n'],
                'alpha': str(row['alpha']),
                'q_normalized': float(row['q_normalized']),
                'target': float(row['target']),
                'deviation': float(row['deviation']),
                'deviation_exact': str(row['deviation']),
            })
    return pd.DataFrame(records, columns=['n', 'alpha', 'q_normalized', 'target',
                                          'deviation', 'deviation_exact'])


# ---------------------------------------------------------------------------
# Edit distance and separation
# ---------------------------------------------------------------------------

def edit_distance(G, H, limit=None):
    """
    min over bijections pi of |E(G) symmetric-difference pi(E(H))|, by
    branch and bound. Lower bounds: mismatches among fully placed triples,
    and a third of the degree discrepancy (placed vertices exactly, the
    rest by sorted matching).
    """
    limit = section('stability')['exact_dist_max_n'] if limit is None else limit
    if G.n != H.n:
        raise ArityMismatch(f"edit distance needs equal vertex counts, got {G.n} and {H.n}")
    if G.n > limit:
        raise TooLarge(f"exact edit distance limited to n <= {limit}")
    n = G.n
    g_edges = G.edge_set
    h_edges = H.edge_set
    deg_g = [int(d) for d in degrees(G)]
    deg_h = [int(d) for d in degrees(H)]
    order = sorted(range(n), key=lambda v: (-deg_h[v], v))
    position = {v: i for i, v in enumerate(order)}
    h_closing = [[e for e in H.incidence[v] if all(position[x] <= position[v] for x in e)]
                 for v in range(n)]

    best = [len(g_edges ^ h_edges)]   # identity bijection
    image = [-1] * n
    preimage = [-1] * n

    def degree_bound(i):
        placed = sum(abs(deg_h[v] - deg_g[image[v]]) for v in order[:i])
        rest_h = sorted(deg_h[v] for v in order[i:])
        rest_g = sorted(deg_g[w] for w in range(n) if preimage[w] < 0)
        return -(-(placed + sum(abs(a - b) for a, b in zip(rest_h, rest_g))) // 3)

    def extend(i, mismatches):
        if i == n:
            best[0] = min(best[0], mismatches)
            return
        v = order[i]
        for w in range(n):
            if preimage[w] >= 0:
                continue
            image[v] = w
            preimage[w] = v
            added = 0
            for e in h_closing[v]:
                if tuple(sorted(image[x] for x in e)) not in g_edges:
                    added += 1
            for e in G.incidence[w]:
                if all(preimage[x] >= 0 for x in e):
                    if tuple(sorted(preimage[x] for x in e)) not in h_edges:
                        added += 1
            total = mismatches + added
            if max(total, degree_bound(i + 1)) < best[0]:
                extend(i + 1, total)
            image[v] = -1
            preimage[w] = -1

    if n:
        extend(0, 0)
    return best[0]


@dataclass
class SeparationReport:
    alpha: Fraction
    beta: Fraction
    n: int
    q_gap: int
    lipschitz_constant: int
    dist_lower_bound: int
    exact_dist: int = None
    normalized_gap: Fraction = None
    asymptotic_gap: Fraction = None
    below_min_n: bool = False

    @property
    def consistent(self):
        return self.exact_dist is None or self.dist_lower_bound <= self.exact_dist

    def to_dict(self):
        return {
            'alpha': self.alpha, 'beta': self.beta, 'n': self.n, 'q_gap': self.q_gap,
            'lipschitz_constant': self.lipschitz_constant,
            'dist_lower_bound': self.dist_lower_bound, 'exact_dist': self.exact_dist,
            'normalized_gap': self.normalized_gap, 'asymptotic_gap': self.asymptotic_gap,
            'below_min_n': self.below_min_n, 'consistent': self.consistent,
        }


def _distinct(alphas):
    alphas = [check_alpha(a) for a in alphas]
    if len(set(alphas)) != len(alphas):
        raise EqualParameters(f"parameters must be distinct, got {[str(a) for a in alphas]}")
    return alphas


def separation(alpha, beta, n):
    """
    Exact Q gap between G_alpha(n) and G_beta(n) and the edit-distance lower
    bound ceil(gap / (3 (2n + 1))); for tiny n also the exact distance.
    """
    alpha, beta = _distinct([alpha, beta])
    g_alpha, _ = crossed_graph(n, alpha)
    g_beta, _ = crossed_graph(n, beta)
    gap = abs(q_statistic(g_alpha).q_value - q_statistic(g_beta).q_value)
    constant = lipschitz_constant(n)
    lower = -(-gap // constant)
    exact = None
    if n <= section('stability')['exact_dist_max_n']:
        exact = edit_distance(g_alpha, g_beta)
    report = SeparationReport(
        alpha=alpha, beta=beta, n=n, q_gap=gap, lipschitz_constant=constant,
        dist_lower_bound=lower, exact_dist=exact,
        normalized_gap=Fraction(gap, n ** 4),
        asymptotic_gap=abs(law_target(alpha) - law_target(beta)),
        below_min_n=n < CROSSED_MIN_N,
    )
    logger.info("separation alpha=%s beta=%s n=%d: gap=%d, dist >= %d%s", alpha, beta, n, gap, lower,
                f", exact {exact}" if exact is not None else '')
    return report


def pigeonhole_report(alphas, n):
    """
    Pairwise edit-distance lower bounds between G_alpha_i(n) and the
    constant c = min bound / n^3. With t + 1 graphs and any t templates,
    two graphs share a nearest template, so template-stability with
    delta < c/3 cannot cover all of them.
    """
    alphas = _distinct(alphas)
    constant = lipschitz_constant(n)
    qs = [q_statistic(crossed_graph(n, a)[0]).q_value for a in alphas]
    k = len(alphas)
    matrix = [[0] * k for _ in range(k)]
    for i, j in combinations(range(k), 2):
        bound = -(-abs(qs[i] - qs[j]) // constant)
        matrix[i][j] = matrix[j][i] = bound
    off_diagonal = [matrix[i][j] for i, j in combinations(range(k), 2)]
    if not off_diagonal:
        return {'alphas': alphas, 'n': n, 'q_values': qs, 'bounds': matrix,
                'c': None, 'trivial': True, 'passed': True}
    c = Fraction(min(off_diagonal), n ** 3)
    return {
        'alphas': alphas,
        'n': n,
        'q_values': qs,
        'bounds': matrix,
        'c': c,
        'trivial': False,
        'statement': {
            'templates': k - 1,
            'graphs': k,
            'pairwise_distance_at_least': f"{c} n^3",
            'fails_for_delta_below': c / 3,
        },
        'passed': c > 0,
    }


def parse_alphas(values):
    return [parse_fraction(v) for v in values]

