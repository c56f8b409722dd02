#!/usr/bin/env python3
"""
Canonical 3-uniform hypergraphs.

A ThreeGraph is a vertex count n (vertices 0..n-1) plus a sorted array of
packed triples. Each triple a < b < c is stored as one uint64 with three
16-bit fields (a << 32 | b << 16 | c), so numeric order of the packed keys
is lexicographic order of the triples and membership is a binary search.

Also here: shadow, links, codegrees, twin quotients, small-graph
isomorphism and the ".3g" text format.
"""

import json
import os
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from utils.config import section
from utils.errors import (ArityMismatch, Degenerate, InvalidSpec, OutOfRange, ParseError,
                          SameVertex, TooLarge)
from utils.log import get_logger

logger = get_logger('three_graph')

MAX_VERTICES = 1 << 16
_FIELD = 16
_FIELD_MASK = (1 << _FIELD) - 1

MAP_KINDS = ('general', 'injective', 'bijective')


def _pack(arr):
    arr = arr.astype(np.uint64, copy=False)
    return (arr[:, 0] << np.uint64(2 * _FIELD)) | (arr[:, 1] << np.uint64(_FIELD)) | arr[:, 2]


def _unpack(packed):
    packed = packed.astype(np.uint64, copy=False)
    a = (packed >> np.uint64(2 * _FIELD)) & np.uint64(_FIELD_MASK)
    b = (packed >> np.uint64(_FIELD)) & np.uint64(_FIELD_MASK)
    c = packed & np.uint64(_FIELD_MASK)
    return np.stack([a, b, c], axis=1).astype(np.int64)


def pack_triple(a, b, c):
    a, b, c = sorted((int(a), int(b), int(c)))
    return (a << (2 * _FIELD)) | (b << _FIELD) | c


class ThreeGraph:
    """
    Immutable 3-graph. Build instances with build(); the constructor takes
    an already canonical packed array and does not re-check it.
    """

    __slots__ = ('n', '_packed', '_edges', '_edge_array', '_edge_set', '_incidence')

    def __init__(self, n, packed):
        self.n = int(n)
        self._packed = packed
        self._packed.setflags(write=False)
        self._edges = None
        self._edge_array = None
        self._edge_set = None
        self._incidence = None

    @property
    def packed(self):
        return self._packed

    @property
    def edge_array(self):
        """(m, 3) int64 array of sorted triples in canonical order"""
        if self._edge_array is None:
            arr = _unpack(self._packed)
            arr.setflags(write=False)
            self._edge_array = arr
        return self._edge_array

    @property
    def edges(self):
        """Canonical tuple of (a, b, c) triples"""
        if self._edges is None:
            self._edges = tuple(tuple(int(x) for x in row) for row in self.edge_array.tolist())
        return self._edges

    @property
    def edge_set(self):
        if self._edge_set is None:
            self._edge_set = frozenset(self.edges)
        return self._edge_set

    @property
    def incidence(self):
        """incidence[v] = edges containing v"""
        if self._incidence is None:
            inc = [[] for _ in range(self.n)]
            for e in self.edges:
                for v in e:
                    inc[v].append(e)
            self._incidence = tuple(tuple(x) for x in inc)
        return self._incidence

    @property
    def num_edges(self):
        return int(self._packed.shape[0])

    def __len__(self):
        return self.num_edges

    def vertices(self):
        return range(self.n)

    def has_edge(self, a, b, c):
        if len({a, b, c}) < 3 or min(a, b, c) < 0 or max(a, b, c) >= self.n:
            return False
        key = np.uint64(pack_triple(a, b, c))
        idx = int(np.searchsorted(self._packed, key))
        return idx < self.num_edges and self._packed[idx] == key

    def to_bytes(self):
        return self.n.to_bytes(4, 'little') + self._packed.tobytes()

    def __eq__(self, other):
        if not isinstance(other, ThreeGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"ThreeGraph(n={self.n}, m={self.num_edges})"


def build(n, triples):
    """
    Canonical graph on n vertices from any iterable of triples (or an
    (m, 3) integer array). Duplicate triples are merged.

    Raises:
        OutOfRange: a vertex outside 0..n-1, or n outside 0..65536
        Degenerate: a triple with a repeated vertex
    """
    n = int(n)
    if n < 0 or n > MAX_VERTICES:
        raise OutOfRange(f"vertex count {n} outside 0..{MAX_VERTICES}")

    if isinstance(triples, np.ndarray):
        arr = triples.astype(np.int64, copy=False)
        if arr.size == 0:
            arr = arr.reshape(0, 3)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise InvalidSpec(f"expected an (m, 3) array, got shape {arr.shape}")
    else:
        rows = []
        for t in triples:
            t = tuple(t)
            if len(t) != 3:
                raise InvalidSpec(f"triple {t} does not have three entries")
            rows.append(t)
        arr = np.array(rows, dtype=np.int64).reshape(-1, 3)

    if arr.shape[0]:
        bad = (arr < 0) | (arr >= n)
        if bad.any():
            row = arr[np.argmax(bad.any(axis=1))]
            raise OutOfRange(f"triple {tuple(int(x) for x in row)} has a vertex outside 0..{n - 1}")
        arr = np.sort(arr, axis=1)
        degenerate = (arr[:, 0] == arr[:, 1]) | (arr[:, 1] == arr[:, 2])
        if degenerate.any():
            row = arr[np.argmax(degenerate)]
            raise Degenerate(f"triple {tuple(int(x) for x in row)} repeats a vertex")
        packed = np.unique(_pack(arr))
    else:
        packed = np.empty(0, dtype=np.uint64)
    return ThreeGraph(n, packed)


def empty_graph(n):
    return build(n, [])


# ---------------------------------------------------------------------------
# Derived structures
# ---------------------------------------------------------------------------

def degrees(H):
    return np.bincount(H.edge_array.ravel(), minlength=H.n).astype(np.int64)


def degree(H, v):
    _check_vertex(H, v)
    return int(degrees(H)[v])


def codegree_table(H, limit=None):
    """
    Dense symmetric n x n codegree table (int32), zero diagonal.

    Raises:
        TooLarge: n above the dense-table limit (default stability.q_max_n)
    """
    limit = limit if limit is not None else section('stability')['q_max_n']
    if H.n > limit:
        raise TooLarge(f"dense codegree table needs n <= {limit}, got {H.n}")
    n = H.n
    E = H.edge_array
    if n == 0:
        return np.zeros((0, 0), dtype=np.int32)
    flat = np.concatenate([E[:, 0] * n + E[:, 1], E[:, 0] * n + E[:, 2], E[:, 1] * n + E[:, 2]])
    upper = np.bincount(flat, minlength=n * n).reshape(n, n)
    return (upper + upper.T).astype(np.int32)


def codegree(H, u, v):
    """Number of edges containing both u and v."""
    _check_vertex(H, u)
    _check_vertex(H, v)
    if u == v:
        raise SameVertex(f"codegree needs two distinct vertices, got {u} twice")
    E = H.edge_array
    return int(np.count_nonzero((E == u).any(axis=1) & (E == v).any(axis=1)))


@dataclass(frozen=True)
class PairStats:
    pair: tuple
    codegree: int


def pair_stats(H, include_zero=False):
    """PairStats for every pair (only covered pairs unless include_zero)."""
    table = codegree_table(H)
    stats = []
    for u, v in combinations(range(H.n), 2):
        d = int(table[u, v])
        if d or include_zero:
            stats.append(PairStats((u, v), d))
    return stats


def shadow(H):
    """Pairs (u, v), u < v, contained in at least one edge."""
    pairs = set()
    for a, b, c in H.edges:
        pairs.update(((a, b), (a, c), (b, c)))
    return frozenset(pairs)


def link(H, v):
    """Pairs {x, y} with {v, x, y} an edge, as sorted tuples."""
    _check_vertex(H, v)
    return frozenset(tuple(x for x in e if x != v) for e in H.incidence[v])


def induced_subgraph(H, vertices):
    """Subgraph induced on `vertices`, relabelled 0..k-1 in the given order."""
    vertices = list(vertices)
    position = {v: i for i, v in enumerate(vertices)}
    if len(position) != len(vertices):
        raise InvalidSpec("induced_subgraph needs distinct vertices")
    for v in vertices:
        _check_vertex(H, v)
    kept = [(position[a], position[b], position[c]) for a, b, c in H.edges
            if a in position and b in position and c in position]
    return build(len(vertices), kept)


def relabel(H, permutation):
    """Image of H under the bijection v -> permutation[v]."""
    permutation = list(permutation)
    if sorted(permutation) != list(range(H.n)):
        raise ArityMismatch(f"relabel needs a permutation of 0..{H.n - 1}")
    perm = np.asarray(permutation, dtype=np.int64)
    if H.num_edges == 0:
        return empty_graph(H.n)
    return build(H.n, perm[H.edge_array])


def _check_vertex(H, v):
    if not 0 <= v < H.n:
        raise OutOfRange(f"vertex {v} outside 0..{H.n - 1}")


# ---------------------------------------------------------------------------
# Vertex maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexMap:
    """
    Total map between vertex sets. `kind` declares (and is checked against)
    injectivity/bijectivity; `role` is free text such as 'homomorphism',
    'projection', 'identification' or 'relabelling'.
    """
    source_n: int
    target_n: int
    image: tuple
    kind: str = 'general'
    role: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'image', tuple(int(x) for x in self.image))
        if len(self.image) != self.source_n:
            raise ArityMismatch(f"map has {len(self.image)} images for {self.source_n} source vertices")
        if self.kind not in MAP_KINDS:
            raise InvalidSpec(f"unknown map kind {self.kind!r}")
        for x in self.image:
            if not 0 <= x < self.target_n:
                raise OutOfRange(f"image {x} outside 0..{self.target_n - 1}")
        if self.kind in ('injective', 'bijective') and len(set(self.image)) != len(self.image):
            raise InvalidSpec(f"{self.kind} map repeats an image")
        if self.kind == 'bijective' and self.source_n != self.target_n:
            raise InvalidSpec("bijective map between vertex sets of different sizes")

    def __getitem__(self, v):
        return self.image[v]

    def __call__(self, v):
        return self.image[v]

    def then(self, other):
        """Composition: first self, then other."""
        if other.source_n != self.target_n:
            raise ArityMismatch(f"cannot compose: {self.target_n} != {other.source_n}")
        order = {'general': 0, 'injective': 1, 'bijective': 2}
        rank = min(order[self.kind], order[other.kind])
        kind = MAP_KINDS[rank]
        if kind == 'bijective' and self.source_n != other.target_n:
            kind = 'injective'
        return VertexMap(self.source_n, other.target_n,
                         tuple(other.image[x] for x in self.image), kind, other.role or self.role)

    def to_dict(self):
        return {'source_n': self.source_n, 'target_n': self.target_n,
                'image': list(self.image), 'kind': self.kind, 'role': self.role}

    @classmethod
    def from_dict(cls, data):
        return cls(data['source_n'], data['target_n'], tuple(data['image']),
                   data.get('kind', 'general'), data.get('role', ''))


def is_homomorphism(m, G, T):
    """Every edge of G maps to three distinct vertices forming an edge of T."""
    if m.source_n != G.n or m.target_n != T.n:
        return False
    target = T.edge_set
    for a, b, c in G.edges:
        img = tuple(sorted((m.image[a], m.image[b], m.image[c])))
        if img[0] == img[1] or img[1] == img[2] or img not in target:
            return False
    return True


# ---------------------------------------------------------------------------
# Twins and isomorphism
# ---------------------------------------------------------------------------

def twin_quotient(H):
    """
    Collapse twin classes: vertices with identical links (identical links
    already force the pair out of the shadow). Classes are numbered by
    their smallest vertex.

    Returns:
        (T, projection) with projection a VertexMap H -> T
    """
    classes = {}
    image = []
    for v in range(H.n):
        key = link(H, v)
        if key not in classes:
            classes[key] = len(classes)
        image.append(classes[key])
    projection = VertexMap(H.n, len(classes), tuple(image), 'general', 'identification')
    quotient = build(len(classes), [(image[a], image[b], image[c]) for a, b, c in H.edges])
    return quotient, projection


def vertex_invariants(G):
    """(degree, sorted codegree row) per vertex; preserved by isomorphisms."""
    if G.n == 0:
        return []
    table = codegree_table(G)
    deg = degrees(G)
    return [(int(deg[v]), tuple(sorted(table[v].tolist()))) for v in range(G.n)]


def invariant_signature(G):
    """Hashable isomorphism invariant used to bucket graphs before exact tests."""
    return (G.n, G.num_edges, tuple(sorted(vertex_invariants(G))))


def is_isomorphic(G, H, limit=None):
    """
    Bijection G -> H mapping edges onto edges, or None.

    Backtracking over vertices in order of fewest candidates, where
    candidates must share the (degree, codegree multiset) invariant; each
    assignment checks the G-edges it completes. Equal edge counts make the
    edge-to-edge check sufficient.

    Raises:
        TooLarge: either graph above graph.iso_limit vertices
    """
    limit = limit if limit is not None else section('graph')['iso_limit']
    if G.n > limit or H.n > limit:
        raise TooLarge(f"isomorphism test limited to {limit} vertices")
    if G.n != H.n or G.num_edges != H.num_edges:
        return None
    inv_g = vertex_invariants(G)
    inv_h = vertex_invariants(H)
    if sorted(inv_g) != sorted(inv_h):
        return None

    candidates = {v: [w for w in range(H.n) if inv_h[w] == inv_g[v]] for v in range(G.n)}
    order = sorted(range(G.n), key=lambda v: (len(candidates[v]), -inv_g[v][0], v))
    position = {v: i for i, v in enumerate(order)}
    # edges to check when v is placed: those whose other vertices come earlier
    closing = {v: [e for e in G.incidence[v] if all(position[x] <= position[v] for x in e)]
               for v in range(G.n)}
    target = H.edge_set
    image = [-1] * G.n
    used = [False] * H.n

    def place(i):
        if i == len(order):
            return True
        v = order[i]
        for w in candidates[v]:
            if used[w]:
                continue
            image[v] = w
            ok = True
            for a, b, c in closing[v]:
                if tuple(sorted((image[a], image[b], image[c]))) not in target:
                    ok = False
                    break
            if ok:
                used[w] = True
                if place(i + 1):
                    return True
                used[w] = False
        image[v] = -1
        return False

    if not place(0):
        return None
    return VertexMap(G.n, H.n, tuple(image), 'bijective', 'isomorphism')


# ---------------------------------------------------------------------------
# .3g text format
# ---------------------------------------------------------------------------

def to_3g(H):
    lines = [f"{H.n} {H.num_edges}"]
    lines.extend(f"{a} {b} {c}" for a, b, c in H.edges)
    return '\n'.join(lines) + '\n'


def parse_3g(text):
    """
    Strict reader: header `n m`, then exactly m lines `a b c` with
    a < b < c, in strictly increasing lexicographic order.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty .3g input")
    try:
        n, m = (int(x) for x in lines[0].split())
    except ValueError:
        raise ParseError(f"bad header line {lines[0]!r}; expected 'n m'")
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header announces {m} edges, found {len(body)}")
    triples = []
    previous = None
    for lineno, line in enumerate(body, start=2):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected three vertices, got {line!r}")
        try:
            t = tuple(int(x) for x in parts)
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex in {line!r}")
        if not t[0] < t[1] < t[2]:
            raise ParseError(f"line {lineno}: triple {t} is not strictly increasing")
        if t[0] < 0 or t[2] >= n:
            raise ParseError(f"line {lineno}: triple {t} has a vertex outside 0..{n - 1}")
        if previous is not None and t <= previous:
            raise ParseError(f"line {lineno}: triple {t} out of canonical order or duplicated")
        previous = t
        triples.append(t)
    return build(n, triples)


def read_graph(path):
    with open(path) as f:
        return parse_3g(f.read())


def write_graph(H, path, labels=None):
    """Write H as .3g; with labels also write the '<stem>.labels' JSON sidecar."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        f.write(to_3g(H))
    written = [path]
    if labels is not None:
        stem = path[:-3] if path.endswith('.3g') else path
        label_path = stem + '.labels'
        with open(label_path, 'w') as f:
            json.dump({str(i): label for i, label in enumerate(labels)}, f, indent=2)
            f.write('\n')
        written.append(label_path)
    logger.debug("wrote %s", ', '.join(written))
    return written
