#!/usr/bin/env python3
"""
Homomorphism search between small 3-graphs.

One variable per pattern vertex, domains as int bitsets over the target
vertices, and one ternary constraint per pattern edge whose allowed tuples
are all orderings of target edges. Propagation keeps every constraint
generalized-arc-consistent; branching uses dom/wdeg with ascending values.
"""

import time
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian

from constructions import (catalog, cut_rank, cut_template, form_set_orbits, reference_rank3_witness,
                           reduce_template, section_map, template_automorphisms)
from three_graph import VertexMap, build, invariant_signature, is_isomorphic
from utils.certificates import Certificate
from utils.config import section
from utils.errors import ArityMismatch, BudgetExceeded, InvalidSpec, TooLarge
from utils.log import get_logger

logger = get_logger('hom_solver')

MODES = ('general', 'injective', 'surjective')
VERDICT_WITNESS = 'witness'
VERDICT_EXHAUSTED = 'exhausted'
VERDICT_BUDGET = 'budget_exceeded'

PROGRESS_EVERY = 200_000


@dataclass(frozen=True)
class HomProblem:
    pattern: object
    target: object
    mode: str = 'general'
    symmetry_breaking: tuple = None
    budget: int = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidSpec(f"unknown mode {self.mode!r}; expected one of {MODES}")
        limit = section('solver')['max_vertices']
        if self.pattern.n > limit or self.target.n > limit:
            raise TooLarge(f"solver handles at most {limit} vertices per side")
        if self.mode == 'surjective' and self.pattern.n < self.target.n:
            raise InvalidSpec("surjective mode needs at least as many pattern as target vertices")
        if self.symmetry_breaking is not None:
            perms = tuple(tuple(int(x) for x in p) for p in self.symmetry_breaking)
            edges = self.target.edge_set
            for p in perms:
                if sorted(p) != list(range(self.target.n)):
                    raise InvalidSpec("symmetry_breaking entries must permute the target vertices")
                if {tuple(sorted((p[a], p[b], p[c]))) for a, b, c in edges} != edges:
                    raise InvalidSpec(f"symmetry_breaking entry {p} is not an automorphism of the target")
            object.__setattr__(self, 'symmetry_breaking', perms)
        if self.budget is None:
            object.__setattr__(self, 'budget', int(section('solver')['budget']))

    def to_dict(self):
        return {
            'pattern': {'n': self.pattern.n, 'm': self.pattern.num_edges},
            'target': {'n': self.target.n, 'm': self.target.num_edges},
            'mode': self.mode,
            'symmetry_breaking': self.symmetry_breaking is not None,
            'automorphisms': len(self.symmetry_breaking) if self.symmetry_breaking else 0,
            'budget': self.budget,
        }


@dataclass
class SearchCertificate:
    verdict: str
    witness: VertexMap = None
    nodes_explored: int = 0
    propagation_stats: dict = field(default_factory=dict)
    symmetry_breaking: bool = False

    @property
    def found(self):
        return self.verdict == VERDICT_WITNESS

    @property
    def exhausted(self):
        return self.verdict == VERDICT_EXHAUSTED

    def require(self):
        """Definite answer (True = homomorphism exists) or BudgetExceeded."""
        if self.verdict == VERDICT_BUDGET:
            raise BudgetExceeded(f"search stopped after {self.nodes_explored} nodes without a verdict")
        return self.found

    def to_dict(self):
        return {
            'verdict': self.verdict,
            'witness': self.witness.to_dict() if self.witness else None,
            'nodes_explored': self.nodes_explored,
            'propagation_stats': dict(self.propagation_stats),
            'symmetry_breaking': self.symmetry_breaking,
        }


class _Budget(Exception):
    pass


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _orbits(n, perms):
    """Orbits of the group generated by perms on 0..n-1 (union-find)."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for v, w in enumerate(p):
            rv, rw = find(v), find(w)
            if rv != rw:
                parent[max(rv, rw)] = min(rv, rw)
    orbits = {}
    for v in range(n):
        orbits.setdefault(find(v), 0)
        orbits[find(v)] |= 1 << v
    return list(orbits.values())


class _Solver:
    """State for one hom_exists call."""

    def __init__(self, problem):
        self.problem = problem
        G, T = problem.pattern, problem.target
        self.n = G.n
        self.full = (1 << T.n) - 1
        # third[a][b]: targets c with {a, b, c} an edge
        self.third = [[0] * T.n for _ in range(T.n)]
        for a, b, c in T.edges:
            for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
                self.third[x][y] |= 1 << z
                self.third[y][x] |= 1 << z
        self.partner = [0] * T.n
        for a in range(T.n):
            for b in range(T.n):
                if self.third[a][b]:
                    self.partner[a] |= 1 << b
        self.constraints = list(G.edges)
        self.var_constraints = [[] for _ in range(self.n)]
        for ci, e in enumerate(self.constraints):
            for v in e:
                self.var_constraints[v].append(ci)
        self.weights = [1] * len(self.constraints)
        self.nodes = 0
        self.wipeouts = 0
        self.revisions = 0
        self.injective = problem.mode == 'injective'
        self.surjective = problem.mode == 'surjective'

    # -- propagation -------------------------------------------------------

    def _support(self, dx, dy, dz):
        """Values of dx with a supporting (b, c) in dy x dz."""
        third, partner = self.third, self.partner
        kept = 0
        for a in _bits(dx):
            row = third[a]
            for b in _bits(dy & partner[a]):
                if row[b] & dz:
                    kept |= 1 << a
                    break
        return kept

    def _revise(self, ci, domains):
        """Make constraint ci arc consistent; returns the changed variables or None on wipeout."""
        x, y, z = self.constraints[ci]
        changed = set()
        while True:
            self.revisions += 1
            progress = False
            for u, v, w in ((x, y, z), (y, x, z), (z, x, y)):
                du = domains[u]
                kept = self._support(du, domains[v], domains[w])
                if kept != du:
                    if not kept:
                        return None
                    domains[u] = kept
                    changed.add(u)
                    progress = True
            if not progress:
                return changed

    def _all_different(self, domains, fixed):
        """Forward checking for injective mode, cascading through new singletons."""
        pending = list(fixed)
        changed = set()
        while pending:
            v = pending.pop()
            bit = domains[v]
            for u in range(self.n):
                if u != v and domains[u] & bit:
                    domains[u] &= ~bit
                    if not domains[u]:
                        return None
                    changed.add(u)
                    if domains[u] & (domains[u] - 1) == 0:
                        pending.append(u)
        return changed

    def propagate(self, domains, touched):
        queue = deque()
        queued = [False] * len(self.constraints)

        def enqueue(vars_, skip=None):
            for v in vars_:
                for cj in self.var_constraints[v]:
                    if cj != skip and not queued[cj]:
                        queued[cj] = True
                        queue.append(cj)

        if self.injective:
            singles = [v for v in touched if domains[v] & (domains[v] - 1) == 0]
            extra = self._all_different(domains, singles)
            if extra is None:
                self.wipeouts += 1
                return False
            touched = set(touched) | extra
        enqueue(touched)
        while queue:
            ci = queue.popleft()
            queued[ci] = False
            changed = self._revise(ci, domains)
            if changed is None:
                self.weights[ci] += 1
                self.wipeouts += 1
                return False
            if not changed:
                continue
            enqueue(changed, skip=ci)
            if self.injective:
                singles = [v for v in changed if domains[v] & (domains[v] - 1) == 0]
                extra = self._all_different(domains, singles)
                if extra is None:
                    self.wipeouts += 1
                    return False
                enqueue(extra)
        if self.surjective:
            union = 0
            for d in domains:
                union |= d
            if union != self.full:
                self.wipeouts += 1
                return False
        return True

    # -- search ------------------------------------------------------------

    def _choose(self, domains):
        best, best_score = None, None
        for v in range(self.n):
            d = domains[v]
            if d & (d - 1) == 0:
                continue
            wdeg = sum(self.weights[ci] for ci in self.var_constraints[v]) or 1
            score = d.bit_count() / wdeg
            if best_score is None or score < best_score:
                best, best_score = v, score
        return best

    def _values(self, v, domains, root):
        values = list(_bits(domains[v]))
        if root and self.problem.symmetry_breaking:
            reps = set()
            for orbit in _orbits(self.problem.target.n, self.problem.symmetry_breaking):
                inside = orbit & domains[v]
                if inside:
                    reps.add((inside & -inside).bit_length() - 1)
            values = [x for x in values if x in reps]
        return values

    def search(self, domains, root=False):
        self.nodes += 1
        if self.nodes > self.problem.budget:
            raise _Budget()
        if self.nodes % PROGRESS_EVERY == 0:
            logger.debug("hom search: %d nodes, %d wipeouts", self.nodes, self.wipeouts)
        v = self._choose(domains)
        if v is None:
            return domains
        for value in self._values(v, domains, root):
            child = list(domains)
            child[v] = 1 << value
            if self.propagate(child, {v}):
                found = self.search(child)
                if found is not None:
                    return found
        return None

    def run(self):
        domains = [self.full] * self.n
        if self.n == 0:
            return domains if not self.surjective or self.full == 0 else None
        if not self.propagate(domains, set(range(self.n))):
            self.nodes = max(self.nodes, 1)
            return None
        return self.search(domains, root=True)


def hom_exists(problem):
    """
    Decide whether a homomorphism pattern -> target exists under the mode.

    Returns:
        SearchCertificate with verdict 'witness' (the map re-validated edge by
        edge), 'exhausted' (none exists, under the declared symmetry
        reduction) or 'budget_exceeded' (no verdict)
    """
    solver = _Solver(problem)
    start = time.time()
    try:
        domains = solver.run()
        if domains is None:
            verdict, witness = VERDICT_EXHAUSTED, None
        else:
            image = tuple(d.bit_length() - 1 for d in domains)
            kind = 'injective' if problem.mode == 'injective' else 'general'
            witness = VertexMap(problem.pattern.n, problem.target.n, image, kind, 'homomorphism')
            if not verify_map(problem, witness):
                raise AssertionError("solver produced a map that fails verification")
            verdict = VERDICT_WITNESS
    except _Budget:
        verdict, witness = VERDICT_BUDGET, None
        logger.warning("hom search hit the node budget (%d)", problem.budget)
    logger.debug("hom search %s after %d nodes, %d wipeouts (%.2fs)",
                  verdict, solver.nodes, solver.wipeouts, time.time() - start)
    return SearchCertificate(
        verdict=verdict,
        witness=witness,
        nodes_explored=min(solver.nodes, problem.budget),
        propagation_stats={'wipeouts': solver.wipeouts, 'revisions': solver.revisions},
        symmetry_breaking=bool(problem.symmetry_breaking),
    )


def verify_map(problem, m):
    """Direct edge-by-edge check of m against the problem, mode included."""
    G, T = problem.pattern, problem.target
    if m.source_n != G.n or m.target_n != T.n:
        raise ArityMismatch(f"map {m.source_n}->{m.target_n} does not fit {G.n}->{T.n}")
    img = m.image
    for a, b, c in G.edges:
        x, y, z = img[a], img[b], img[c]
        if x == y or y == z or x == z or not T.has_edge(x, y, z):
            return False
    if problem.mode == 'injective' and len(set(img)) != len(img):
        return False
    if problem.mode == 'surjective' and len(set(img)) != T.n:
        return False
    return True


def compose(first, second):
    return first.then(second)


def naive_hom_exists(G, T, mode='general'):
    """Reference oracle: try all |V(T)|^|V(G)| maps."""
    edges = T.edge_set
    for image in cartesian(range(T.n), repeat=G.n):
        if mode == 'injective' and len(set(image)) != G.n:
            continue
        if mode == 'surjective' and len(set(image)) != T.n:
            continue
        ok = True
        for a, b, c in G.edges:
            t = tuple(sorted((image[a], image[b], image[c])))
            if t[0] == t[1] or t[1] == t[2] or t not in edges:
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# Homomorphic images and blowup invariance
# ---------------------------------------------------------------------------

def _edge_safe_partitions(G):
    """Restricted growth strings of partitions with no edge inside a block pair."""
    n = G.n
    closing = [[e for e in G.incidence[v] if max(e) == v] for v in range(n)]
    blocks = [0] * n

    def extend(v, used):
        if v == n:
            yield tuple(blocks)
            return
        for b in range(used + 1):
            blocks[v] = b
            if all(len({blocks[x] for x in e}) == 3 for e in closing[v]):
                yield from extend(v + 1, max(used, b + 1))

    if n == 0:
        yield ()
        return
    yield from extend(0, 0)


def homomorphic_images(G, with_partitions=False):
    """
    All quotients of G by partitions that keep every edge's vertices in
    distinct blocks, up to isomorphism. G itself comes first.
    """
    limit = section('graph')['images_limit']
    if G.n > limit:
        raise TooLarge(f"homomorphic images enumerated only up to {limit} vertices")
    partitions = sorted(_edge_safe_partitions(G), key=lambda rgs: (-len(set(rgs)), rgs))
    buckets = {}
    images = []
    for rgs in partitions:
        k = len(set(rgs))
        quotient = build(k, [(rgs[a], rgs[b], rgs[c]) for a, b, c in G.edges])
        key = invariant_signature(quotient)
        bucket = buckets.setdefault(key, [])
        if any(is_isomorphic(quotient, other) is not None for other in bucket):
            continue
        bucket.append(quotient)
        images.append((quotient, rgs))
    logger.debug("%d edge-safe partitions, %d images up to isomorphism", len(partitions), len(images))
    if with_partitions:
        return images
    return [img for img, _ in images]


def contains_copy(host, member, budget=None):
    """Subgraph containment through an injective homomorphism search."""
    if member.n > host.n:
        return False
    cert = hom_exists(HomProblem(member, host, 'injective', budget=budget))
    return cert.require()


def is_blowup_invariant(family, claim_id='blowup-invariance'):
    """
    Every homomorphic image of every member contains some member. Reports
    the first counterexample (member index and identifying partition).
    """
    limit = section('graph')['images_limit']
    for member in family:
        if member.n > limit:
            raise TooLarge(f"family member with {member.n} vertices exceeds {limit}")
    checked = 0
    counterexample = None
    for idx, member in enumerate(family):
        for image, rgs in homomorphic_images(member, with_partitions=True):
            checked += 1
            if not any(contains_copy(image, other) for other in family):
                counterexample = {'member': idx, 'partition': list(rgs),
                                  'image_edges': list(image.edges), 'image_n': image.n}
                break
        if counterexample:
            break
    verdict = 'fail' if counterexample else 'pass'
    logger.info("blowup invariance of %d graphs: %s (%d images checked)", len(family), verdict, checked)
    return Certificate.make(
        claim_id, verdict,
        inputs={'family': [{'n': g.n, 'edges': list(g.edges)} for g in family]},
        payload={'images_checked': checked, 'counterexample': counterexample},
    )


# ---------------------------------------------------------------------------
# Cut-rank dichotomy
# ---------------------------------------------------------------------------

def lift_witness(spec):
    """The rank-3 witness for F pushed into R(U, C) through the section map."""
    return compose(reference_rank3_witness(), section_map(spec))


def lift_is_valid(spec):
    graph, _ = cut_template(spec)
    return verify_map(HomProblem(catalog('F'), graph), lift_witness(spec))


def rank_dichotomy_sweep(max_dim, max_forms, budget=None, symmetry=True, claim_id='rank-dichotomy'):
    """
    For every form set (up to GL(d, F2)) with d <= max_dim and 1..max_forms
    forms, search F -> R(U, C) on the reduced template and compare with
    cut-rank >= 3. Verdict 'budget' when any search is inconclusive.
    """
    F = catalog('F')
    cache = {}
    rows = []
    for dim in range(1, max_dim + 1):
        for spec in form_set_orbits(dim, max_forms):
            rank = cut_rank(spec)
            reduced = reduce_template(spec)
            key = (reduced.dim, tuple(sorted(reduced.forms)))
            if key not in cache:
                graph, _ = cut_template(reduced)
                autos = template_automorphisms(reduced) if symmetry else None
                cache[key] = hom_exists(HomProblem(F, graph, 'general', autos, budget))
            cert = cache[key]
            row = {'dim': dim, 'forms': list(spec.forms), 'rank': rank,
                   'reduced_forms': list(reduced.forms), 'verdict': cert.verdict,
                   'nodes': cert.nodes_explored}
            if cert.verdict == VERDICT_BUDGET:
                row['agrees'] = None
            else:
                row['agrees'] = cert.found == (rank >= 3)
            if rank >= 3 and row['agrees']:
                row['lifted'] = lift_is_valid(spec)
            rows.append(row)
    if any(r['agrees'] is False or r.get('lifted') is False for r in rows):
        verdict = 'fail'
    elif any(r['agrees'] is None for r in rows):
        verdict = 'budget'
    else:
        verdict = 'pass'
    logger.info("rank dichotomy over %d form-set classes: %s", len(rows), verdict)
    return Certificate.make(claim_id, verdict,
                            inputs={'max_dim': max_dim, 'max_forms': max_forms,
                                    'budget': budget, 'symmetry': symmetry},
                            payload={'classes': rows})
