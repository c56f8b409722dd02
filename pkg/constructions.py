#!/usr/bin/env python3
"""
Named constructions: categorical products, blowups, F2 cut templates,
crossed blowups G_alpha(n) and the catalog of small graphs.

Vertex conventions
------------------
K4minus  a, b, c, d -> 0..3, edges abc, abd, acd
Fstar    vertex i -> i - 1, edges 123, 124, 345, 156, 257
F5       vertex i -> i - 1, edges 123, 124, 345
F        K4minus x Fstar, (r, i) -> 7 r + (i - 1)
R(U, C)  apex vertices first (form order), then bottoms u in increasing
         bitmask order; bit 0 is the first coordinate and prints first
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np

from three_graph import MAX_VERTICES, ThreeGraph, VertexMap, build
from utils.config import parse_fraction
from utils.errors import (AlphaOutOfRange, ArityMismatch, InvalidSpec, Overflow, ParseError,
                          UnknownName)
from utils.gf2 import (apply_matrix, dual_action, evaluate, express, from_bits, gf2_rank,
                       gf2_solve, independent_subset, invertible_matrices, to_bits)
from utils.log import get_logger

logger = get_logger('constructions')

MAX_DIM = 16
# refuse to materialize more edges than this in one construction
MAX_EDGES = 50_000_000

K4MINUS_EDGES = ((0, 1, 2), (0, 1, 3), (0, 2, 3))
K4MINUS_LABELS = ('a', 'b', 'c', 'd')
FSTAR_EDGES = ((1, 2, 3), (1, 2, 4), (3, 4, 5), (1, 5, 6), (2, 5, 7))
F5_EDGES = ((1, 2, 3), (1, 2, 4), (3, 4, 5))

R2_FORMS = (1, 2, 3)
RCROSS_FORMS = (1, 2)
RANK3_FORMS = (1, 2, 4)

# G_alpha(n) parts in apportionment order; B_st means x = s, y = t
CROSSED_PARTS = ('A_x', 'A_y', 'B00', 'B01', 'B10', 'B11')
# position of each part in R_x = R(F2^2, {x, y}): apexes 0, 1 then bottoms 2 + mask
_CROSSED_VERTEX = {'A_x': 0, 'A_y': 1, 'B00': 2, 'B10': 3, 'B01': 4, 'B11': 5}
CROSSED_MIN_N = 12

_COORDINATE_NAMES = {1: ('x',), 2: ('x', 'y'), 3: ('X', 'Y', 'Z')}


# ---------------------------------------------------------------------------
# Specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutTemplateSpec:
    """F2 dimension plus an ordered tuple of distinct nonzero linear forms."""
    dim: int
    forms: tuple

    def __post_init__(self):
        object.__setattr__(self, 'forms', tuple(int(f) for f in self.forms))
        if not 1 <= self.dim <= MAX_DIM:
            raise InvalidSpec(f"template dimension {self.dim} outside 1..{MAX_DIM}")
        for f in self.forms:
            if not 0 < f < (1 << self.dim):
                raise InvalidSpec(f"form {f} is zero or outside dimension {self.dim}")
        if len(set(self.forms)) != len(self.forms):
            raise InvalidSpec(f"repeated form in {self.forms}")

    @property
    def num_apexes(self):
        return len(self.forms)

    @property
    def num_vertices(self):
        return len(self.forms) + (1 << self.dim)

    def apex(self, i):
        return i

    def bottom(self, u):
        return len(self.forms) + u

    def form_name(self, form):
        names = _COORDINATE_NAMES.get(self.dim)
        if names is None:
            return to_bits(form, self.dim)
        return '+'.join(names[i] for i in range(self.dim) if (form >> i) & 1)

    def to_dict(self):
        return {'dim': self.dim, 'forms': list(self.forms)}

    @classmethod
    def parse(cls, text):
        """
        'DIM:FORM,FORM,...' with forms as integers or bit strings of length
        DIM (coordinate 0 first), e.g. '3:100,010,001' or '2:1,2,3'.
        """
        try:
            dim_text, forms_text = text.split(':', 1)
            dim = int(dim_text)
        except ValueError:
            raise ParseError(f"bad template {text!r}; expected DIM:FORM,FORM,...")
        forms = []
        for token in forms_text.split(','):
            token = token.strip()
            if not token:
                continue
            if len(token) == dim and set(token) <= {'0', '1'}:
                forms.append(from_bits(token))
            else:
                try:
                    forms.append(int(token))
                except ValueError:
                    raise ParseError(f"bad form {token!r} in {text!r}")
        return cls(dim, tuple(forms))


@dataclass(frozen=True)
class BlowupSpec:
    """Pattern graph plus one nonnegative part size per pattern vertex."""
    pattern: ThreeGraph
    sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, 'sizes', tuple(int(s) for s in self.sizes))
        if len(self.sizes) != self.pattern.n:
            raise ArityMismatch(f"{len(self.sizes)} part sizes for a {self.pattern.n}-vertex pattern")
        if any(s < 0 for s in self.sizes):
            raise InvalidSpec(f"negative part size in {self.sizes}")

    @property
    def n(self):
        return sum(self.sizes)

    @property
    def offsets(self):
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.sizes)[:-1]])) if self.sizes else ()

    def expected_edges(self):
        s = self.sizes
        return sum(s[i] * s[j] * s[k] for i, j, k in self.pattern.edges)

    def to_dict(self):
        return {'pattern_n': self.pattern.n, 'pattern_edges': list(self.pattern.edges),
                'sizes': list(self.sizes)}


@dataclass(frozen=True)
class CrossedBlowupSpec:
    n: int
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'alpha', check_alpha(self.alpha))
        if self.n < CROSSED_MIN_N:
            raise InvalidSpec(f"crossed blowup needs n >= {CROSSED_MIN_N}, got {self.n}")

    def to_dict(self):
        return {'n': self.n, 'alpha': self.alpha}


def check_alpha(alpha):
    alpha = parse_fraction(alpha)
    if not 0 < alpha < Fraction(1, 2):
        raise AlphaOutOfRange(f"alpha = {alpha} is not strictly between 0 and 1/2")
    return alpha


# ---------------------------------------------------------------------------
# Products and blowups
# ---------------------------------------------------------------------------

def product(G, H, left_labels=None, right_labels=None):
    """
    Categorical product G x H. Vertex (g, h) is g * |V(H)| + h; a triple is
    an edge iff it pairs an edge of G with an edge of H under one of the
    3! matchings, so |E| = 6 |E(G)| |E(H)|.

    Returns:
        (graph, labels) with labels "(g,h)"
    """
    n = G.n * H.n
    if n > MAX_VERTICES:
        raise Overflow(f"product has {n} vertices, limit is {MAX_VERTICES}")
    left_labels = left_labels or [str(i) for i in range(G.n)]
    right_labels = right_labels or [str(i) for i in range(H.n)]
    labels = [f"({left_labels[g]},{right_labels[h]})" for g in range(G.n) for h in range(H.n)]

    if G.num_edges == 0 or H.num_edges == 0:
        return build(n, []), labels
    EG = G.edge_array
    EH = H.edge_array
    orders = np.array(list(permutations(range(3))), dtype=np.int64)
    matched = EH[:, orders].reshape(-1, 3)                      # every ordering of every H edge
    triples = (EG[:, None, :] * H.n + matched[None, :, :]).reshape(-1, 3)
    return build(n, triples), labels


def projections(G, H):
    """The two coordinate projections of product(G, H) as VertexMaps."""
    n = G.n * H.n
    first = VertexMap(n, G.n, tuple(v // H.n for v in range(n)), 'general', 'projection')
    second = VertexMap(n, H.n, tuple(v % H.n for v in range(n)), 'general', 'projection')
    return first, second


def blowup(spec):
    """
    Replace pattern vertex i by a block of spec.sizes[i] vertices (blocks are
    consecutive, in pattern order) and every pattern edge by the complete
    tripartite 3-graph across its three blocks.
    """
    n = spec.n
    if n > MAX_VERTICES:
        raise Overflow(f"blowup has {n} vertices, limit is {MAX_VERTICES}")
    expected = spec.expected_edges()
    if expected > MAX_EDGES:
        raise Overflow(f"blowup would have {expected} edges, limit is {MAX_EDGES}")
    offsets = spec.offsets
    blocks = []
    for i, j, k in spec.pattern.edges:
        si, sj, sk = spec.sizes[i], spec.sizes[j], spec.sizes[k]
        if not (si and sj and sk):
            continue
        grid = np.meshgrid(np.arange(offsets[i], offsets[i] + si),
                           np.arange(offsets[j], offsets[j] + sj),
                           np.arange(offsets[k], offsets[k] + sk), indexing='ij')
        blocks.append(np.stack(grid, axis=-1).reshape(-1, 3))
    triples = np.concatenate(blocks) if blocks else np.empty((0, 3), dtype=np.int64)
    graph = build(n, triples)
    assert graph.num_edges == expected
    return graph


def blowup_map(spec):
    """VertexMap from the blowup onto its pattern (vertex -> its block)."""
    image = [i for i, s in enumerate(spec.sizes) for _ in range(s)]
    return VertexMap(spec.n, spec.pattern.n, tuple(image), 'general', 'identification')


def blowup_labels(spec, pattern_labels=None):
    pattern_labels = pattern_labels or [str(i) for i in range(spec.pattern.n)]
    return [f"{pattern_labels[i]}#{j}" for i, s in enumerate(spec.sizes) for j in range(s)]


def apportion(targets, total):
    """
    Largest-remainder rounding of exact rational targets summing to total;
    ties go to the lower index.
    """
    targets = [Fraction(t) for t in targets]
    if sum(targets) != total:
        raise InvalidSpec(f"targets sum to {sum(targets)}, not {total}")
    if any(t < 0 for t in targets):
        raise InvalidSpec("negative apportionment target")
    floors = [t.numerator // t.denominator for t in targets]
    missing = total - sum(floors)
    order = sorted(range(len(targets)), key=lambda i: (-(targets[i] - floors[i]), i))
    for i in order[:missing]:
        floors[i] += 1
    return floors


# ---------------------------------------------------------------------------
# Cut templates
# ---------------------------------------------------------------------------

def cut_template(spec):
    """
    R(U, C): edge {a_c, u, v} iff c(u + v) = 1. Every edge has exactly one
    apex, and the link of a_c is the complete bipartite graph across the
    cut of c.

    Returns:
        (graph, labels) with labels "apex:x+y" and "u:101"
    """
    k = spec.num_apexes
    size = 1 << spec.dim
    n = spec.num_vertices
    if n > MAX_VERTICES:
        raise Overflow(f"template has {n} vertices, limit is {MAX_VERTICES}")
    if k * (size // 2) ** 2 > MAX_EDGES:
        raise Overflow(f"template R(F2^{spec.dim}, {k} forms) is too large to materialize")

    labels = [f"apex:{spec.form_name(f)}" for f in spec.forms]
    labels += [f"u:{to_bits(u, spec.dim)}" for u in range(size)]

    us, vs = np.triu_indices(size, 1)
    diff = us ^ vs
    blocks = []
    for i, form in enumerate(spec.forms):
        masked = diff & form
        parity = np.zeros_like(masked)
        while masked.any():
            parity ^= masked & 1
            masked = masked >> 1
        crossing = parity.astype(bool)
        apex = np.full(int(crossing.sum()), i, dtype=np.int64)
        blocks.append(np.stack([apex, k + us[crossing], k + vs[crossing]], axis=1))
    triples = np.concatenate(blocks) if blocks else np.empty((0, 3), dtype=np.int64)
    return build(n, triples), labels


def cut_rank(spec):
    return gf2_rank(list(spec.forms), spec.dim)


def template_automorphisms(spec):
    """
    Automorphisms of R(U, C) induced by affine maps u -> A u + t with
    A in GL(d, F2) permuting the forms under c -> c o A^-1. Each is returned
    as a vertex permutation tuple (identity included).
    """
    k = spec.num_apexes
    index = {f: i for i, f in enumerate(spec.forms)}
    size = 1 << spec.dim
    automorphisms = []
    for columns in invertible_matrices(spec.dim):
        moved = [dual_action(columns, f, spec.dim) for f in spec.forms]
        if any(m not in index for m in moved):
            continue
        apex_part = tuple(index[m] for m in moved)
        linear = [apply_matrix(columns, u) for u in range(size)]
        for t in range(size):
            automorphisms.append(apex_part + tuple(k + (linear[u] ^ t) for u in range(size)))
    return automorphisms


def reduce_template(spec):
    """
    The template obtained by dividing U by the common kernel of the forms:
    dimension rank(C), forms rewritten in a basis of span(C). Its graph is
    the twin quotient of R(U, C).
    """
    basis_idx = independent_subset(list(spec.forms))
    basis = [spec.forms[i] for i in basis_idx]
    reduced = tuple(express(f, basis) for f in spec.forms)
    return CutTemplateSpec(len(basis), reduced)


def reduction_map(spec):
    """VertexMap R(U, C) -> R(reduce_template(spec)); apexes fixed, u -> (b_1(u), ..., b_r(u))."""
    basis = [spec.forms[i] for i in independent_subset(list(spec.forms))]
    k = spec.num_apexes
    image = list(range(k))
    for u in range(1 << spec.dim):
        coords = sum(evaluate(b, u) << j for j, b in enumerate(basis))
        image.append(k + coords)
    return VertexMap(spec.num_vertices, k + (1 << len(basis)), tuple(image), 'general', 'homomorphism')


def section_map(spec):
    """
    Homomorphism R(F2^3, {X, Y, Z}) -> R(U, C) for cut-rank >= 3: pick three
    independent forms c_1, c_2, c_3 and a linear L with c_i o L = i-th
    coordinate (a right inverse of u -> (c_1(u), c_2(u), c_3(u))).
    """
    if cut_rank(spec) < 3:
        raise InvalidSpec(f"section map needs cut-rank >= 3, got {cut_rank(spec)}")
    chosen = independent_subset(list(spec.forms))[:3]
    rows = [spec.forms[i] for i in chosen]
    columns = []
    for j in range(3):
        rhs = [1 if i == j else 0 for i in range(3)]
        columns.append(gf2_solve(rows, rhs, spec.dim))
    k = spec.num_apexes
    image = [chosen[0], chosen[1], chosen[2]]
    image += [k + apply_matrix(columns, w) for w in range(8)]
    return VertexMap(len(RANK3_FORMS) + 8, spec.num_vertices, tuple(image), 'general', 'homomorphism')


def form_set_orbits(dim, max_forms):
    """
    One representative per GL(dim, F2)-orbit of form sets of size
    1..max_forms. Representatives are the lexicographically least sorted
    form tuple in their orbit.
    """
    matrices = list(invertible_matrices(dim))
    nonzero = range(1, 1 << dim)
    seen = set()
    representatives = []
    for size in range(1, max_forms + 1):
        for forms in combinations(nonzero, size):
            if forms in seen:
                continue
            orbit = {tuple(sorted(dual_action(m, f, dim) for f in forms)) for m in matrices}
            seen.update(orbit)
            representatives.append(CutTemplateSpec(dim, min(orbit)))
    return representatives


# ---------------------------------------------------------------------------
# Crossed blowups
# ---------------------------------------------------------------------------

def crossed_part_sizes(n, alpha):
    """
    Sizes of (A_x, A_y, B00, B01, B10, B11) for G_alpha(n): targets n/6,
    n/6, alpha n/3, (1 - alpha) n/3, (1 - alpha) n/3, alpha n/3, rounded by
    largest remainder. Valid for any n >= 1.
    """
    if n < 1:
        raise InvalidSpec(f"crossed blowup needs n >= 1, got {n}")
    return tuple(apportion(list(crossed_targets(n, alpha)), n))


def crossed_targets(n, alpha):
    alpha = check_alpha(alpha)
    third = Fraction(n, 3)
    return (Fraction(n, 6), Fraction(n, 6),
            alpha * third, (1 - alpha) * third, (1 - alpha) * third, alpha * third)


def crossed_blowup_spec(n, alpha):
    """BlowupSpec of R_x realizing G_alpha(n) (any n >= 1)."""
    named = dict(zip(CROSSED_PARTS, crossed_part_sizes(n, alpha)))
    sizes = [0] * len(CROSSED_PARTS)
    for name, size in named.items():
        sizes[_CROSSED_VERTEX[name]] = size
    return BlowupSpec(catalog('Rcross'), tuple(sizes))


def crossed_blowup(spec):
    return blowup(crossed_blowup_spec(spec.n, spec.alpha))


def crossed_edge_count(sizes):
    """|A_x|(|B00|+|B01|)(|B10|+|B11|) + |A_y|(|B00|+|B10|)(|B01|+|B11|)."""
    ax, ay, b00, b01, b10, b11 = sizes
    return ax * (b00 + b01) * (b10 + b11) + ay * (b00 + b10) * (b01 + b11)


def crossed_part_of(n, alpha):
    """Part name of every vertex of G_alpha(n), in vertex order."""
    spec = crossed_blowup_spec(n, alpha)
    by_vertex = {v: name for name, v in _CROSSED_VERTEX.items()}
    return [by_vertex[i] for i, s in enumerate(spec.sizes) for _ in range(s)]


def crossed_labels(n, alpha):
    parts = crossed_part_of(n, alpha)
    counters = {}
    labels = []
    for name in parts:
        j = counters.get(name, 0)
        counters[name] = j + 1
        labels.append(f"{name}#{j}")
    return labels


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

_ALIASES = {
    'k4minus': 'K4minus', 'k4-': 'K4minus',
    'fstar': 'Fstar', 'f*': 'Fstar',
    'f5': 'F5', 'f': 'F',
    'r2': 'R2', 'rcross': 'Rcross', 'rx': 'Rcross', 'rank3': 'Rank3',
}
_S3_PATTERN = re.compile(r'^s3[(:]?(\d+)\)?$')

CATALOG_NAMES = ('K4minus', 'Fstar', 'F5', 'F', 'R2', 'Rcross', 'Rank3', 'S3(n)')

_overrides = {}


def set_catalog_override(name, triples, n=None):
    """Replace a base catalog entry (fault injection in tests and the CLI)."""
    key = canonical_name(name)
    triples = [tuple(t) for t in triples]
    if n is None:
        n = max([len(_base_labels(key))] + [max(t) + 1 for t in triples])
    _overrides[key] = build(n, triples)
    logger.warning("catalog entry %s overridden (%d vertices, %d edges)",
                   key, n, _overrides[key].num_edges)


def clear_catalog_overrides():
    _overrides.clear()


def is_overridden(name):
    return canonical_name(name) in _overrides


def parse_override(text):
    """
    'NAME=TRIPLES': comma-separated triples, each either 0-based 'a-b-c'
    or three label characters (digits are 1-based, letters a.. are 0-based),
    e.g. 'Fstar=123,124,345,156,258'.
    """
    if '=' not in text:
        raise ParseError(f"override {text!r} is not NAME=TRIPLES")
    name, body = text.split('=', 1)
    triples = []
    for token in body.split(','):
        token = token.strip()
        if not token:
            continue
        if '-' in token:
            parts = token.split('-')
            if len(parts) != 3:
                raise ParseError(f"bad triple {token!r}")
            triples.append(tuple(int(p) for p in parts))
        elif len(token) == 3:
            triples.append(tuple(int(ch) - 1 if ch.isdigit() else ord(ch.lower()) - ord('a')
                                 for ch in token))
        else:
            raise ParseError(f"bad triple {token!r}")
    return canonical_name(name), triples


def canonical_name(name):
    key = name.strip()
    lowered = key.lower()
    if lowered in _ALIASES:
        return _ALIASES[lowered]
    match = _S3_PATTERN.match(lowered)
    if match:
        return f"S3({int(match.group(1))})"
    raise UnknownName(f"unknown catalog graph {name!r}; known: {', '.join(CATALOG_NAMES)}")


def _base_labels(key):
    if key == 'K4minus':
        return list(K4MINUS_LABELS)
    if key == 'Fstar':
        return [str(i) for i in range(1, 8)]
    if key == 'F5':
        return [str(i) for i in range(1, 6)]
    return []


def catalog_entry(name):
    """(graph, labels) for a catalog name."""
    key = canonical_name(name)
    if key in _overrides:
        graph = _overrides[key]
        labels = _base_labels(key)
        labels += [str(i + 1) for i in range(len(labels), graph.n)]
        return graph, labels
    if key == 'K4minus':
        return build(4, K4MINUS_EDGES), list(K4MINUS_LABELS)
    if key == 'Fstar':
        return build(7, [(a - 1, b - 1, c - 1) for a, b, c in FSTAR_EDGES]), _base_labels(key)
    if key == 'F5':
        return build(5, [(a - 1, b - 1, c - 1) for a, b, c in F5_EDGES]), _base_labels(key)
    if key == 'F':
        k4, k4_labels = catalog_entry('K4minus')
        fstar, fstar_labels = catalog_entry('Fstar')
        return product(k4, fstar, k4_labels, fstar_labels)
    if key == 'R2':
        return cut_template(CutTemplateSpec(2, R2_FORMS))
    if key == 'Rcross':
        return cut_template(CutTemplateSpec(2, RCROSS_FORMS))
    if key == 'Rank3':
        return cut_template(CutTemplateSpec(3, RANK3_FORMS))
    # S3(n)
    n = int(key[3:-1])
    sizes = apportion([Fraction(n, 3)] * 3, n)
    spec = BlowupSpec(build(3, [(0, 1, 2)]), sizes)
    return blowup(spec), blowup_labels(spec, ['V1', 'V2', 'V3'])


def catalog(name):
    return catalog_entry(name)[0]


def template_spec(name):
    """CutTemplateSpec behind a template catalog entry."""
    key = canonical_name(name)
    specs = {'R2': CutTemplateSpec(2, R2_FORMS), 'Rcross': CutTemplateSpec(2, RCROSS_FORMS),
             'Rank3': CutTemplateSpec(3, RANK3_FORMS)}
    if key not in specs:
        raise UnknownName(f"{name!r} is not a cut template")
    return specs[key]


def documented_edges(name):
    """The literal edge list a catalog entry must have (shape checks compare against it)."""
    key = canonical_name(name)
    if key == 'K4minus':
        return build(4, K4MINUS_EDGES)
    if key == 'Fstar':
        return build(7, [(a - 1, b - 1, c - 1) for a, b, c in FSTAR_EDGES])
    if key == 'F5':
        return build(5, [(a - 1, b - 1, c - 1) for a, b, c in F5_EDGES])
    if key == 'F':
        return product(documented_edges('K4minus'), documented_edges('Fstar'))[0]
    raise UnknownName(f"no documented edge list for {name!r}")


def f_vertex(r, i):
    """Vertex (r, i) of F, r in 'abcd', i in 1..7."""
    return 7 * K4MINUS_LABELS.index(r) + (i - 1)


def reference_f5_embedding():
    """F5 -> F: 1 -> (a,1), 2 -> (d,2), 3 -> (c,3), 4 -> (b,4), 5 -> (a,5)."""
    image = (f_vertex('a', 1), f_vertex('d', 2), f_vertex('c', 3), f_vertex('b', 4), f_vertex('a', 5))
    return VertexMap(5, 28, image, 'injective', 'homomorphism')


# apex form of (a, i) and bottom of (r, i), r in {b, c, d}, for the rank-3 witness
RANK3_APEX_FORMS = ('X', 'X', 'Y', 'Y', 'Z', 'X', 'X')
RANK3_BOTTOMS = ('000', '010', '100', '101', '110', '001', '001')


def reference_rank3_witness():
    """F -> R(F2^3, {X, Y, Z}): (a, i) -> a_{d_i}, (r, i) -> u_i for r in {b, c, d}."""
    apex_index = {'X': 0, 'Y': 1, 'Z': 2}
    k = len(RANK3_FORMS)
    image = []
    for r in K4MINUS_LABELS:
        for i in range(7):
            if r == 'a':
                image.append(apex_index[RANK3_APEX_FORMS[i]])
            else:
                image.append(k + from_bits(RANK3_BOTTOMS[i]))
    return VertexMap(28, k + 8, tuple(image), 'general', 'homomorphism')
