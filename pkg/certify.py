#!/usr/bin/env python3
"""
Command-line entry point: build constructions, run searches and oracles,
and assemble certificate bundles.

    python certify.py construct F --out graphs/
    python certify.py hom --pattern F --target R2
    python certify.py verify-lemmas
    python certify.py lagrangian --graph Rcross --exact-at 1/6,1/6,1/12,1/4,1/4,1/12
    python certify.py stability law --alpha 1/4 --format csv
    python certify.py certify-all --seed 20260101 --out certificates/

Exit status: 0 when every claim passes, 2 when some search ran out of
budget (and nothing failed), 1 on any failure or error.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from constructions import (CROSSED_PARTS, CrossedBlowupSpec, CutTemplateSpec, canonical_name,
                           catalog, catalog_entry, clear_catalog_overrides, crossed_blowup,
                           crossed_labels, crossed_part_sizes, cut_rank, cut_template,
                           documented_edges, is_overridden, parse_override, product, projections,
                           reference_f5_embedding, reference_rank3_witness, set_catalog_override,
                           template_automorphisms, template_spec)
from hom_solver import (VERDICT_BUDGET, HomProblem, compose, hom_exists, homomorphic_images,
                        is_blowup_invariant, lift_is_valid, rank_dichotomy_sweep, verify_map)
from lagrangian import (Weights, blowup_consistency, crossed_weights, density_report,
                        gradient_check, lagrange_poly, maximize)
from lemma_oracles import (column_type_exclusion, cross_check_apex_patterns,
                           verify_fstar_labelling_infeasible, verify_lemma_four_by_three,
                           verify_lemma_matrix, verify_rank3_table)
from stability import (crossed_graph, edge_law_check, freeness_check, ladder_table,
                       lipschitz_check, monotone_check, pigeonhole_report, q_law_check,
                       q_statistic, separation)
from three_graph import VertexMap, build, is_homomorphism, read_graph, write_graph
from utils.certificates import (Certificate, CertificateBundle, load_certificate, save_to_csv,
                                to_jsonable)
from utils.config import parse_fraction, section, use_config
from utils.errors import HypergraphError
from utils.log import get_logger, set_level
from utils.metrics import relative_error
from utils.rng import describe, make_rng

logger = get_logger('certify')

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCOMPLETE = 2

EXPECTED_SHAPES = {'K4minus': (4, 3), 'Fstar': (7, 5), 'F5': (5, 3), 'F': (28, 90)}
SINGLE_EDGE = build(3, [(0, 1, 2)])


def resolve_graph(value):
    """A catalog name or a path to a .3g file -> (graph, labels)."""
    if value.endswith('.3g') or os.path.sep in value:
        graph = read_graph(value)
        labels_path = value[:-3] + '.labels' if value.endswith('.3g') else None
        labels = [str(i) for i in range(graph.n)]
        if labels_path and os.path.isfile(labels_path):
            with open(labels_path) as f:
                stored = json.load(f)
            labels = [stored.get(str(i), str(i)) for i in range(graph.n)]
        return graph, labels
    return catalog_entry(value)


def _automorphisms_for(name):
    """Template automorphisms for an untouched catalog template, else None."""
    try:
        if is_overridden(name):
            return None
        return template_automorphisms(template_spec(name))
    except HypergraphError:
        return None


def _dump(obj):
    print(json.dumps(to_jsonable(obj), indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Individual claims
# ---------------------------------------------------------------------------

def claim_catalog_shape(name):
    graph = catalog(name)
    documented = documented_edges(name)
    n, m = EXPECTED_SHAPES[name]
    payload = {'n': graph.n, 'm': graph.num_edges, 'expected': [n, m],
               'matches_documented': graph == documented}
    ok = graph.n == n and graph.num_edges == m and graph == documented
    if name == 'F':
        k4, fstar = catalog('K4minus'), catalog('Fstar')
        first, second = projections(k4, fstar)
        payload['projections_are_homomorphisms'] = (is_homomorphism(first, graph, k4)
                                                    and is_homomorphism(second, graph, fstar))
        ok = ok and payload['projections_are_homomorphisms']
    return Certificate.make(f"catalog-{name}", 'pass' if ok else 'fail',
                            inputs={'name': name}, payload=payload)


def _search_claim(claim_id, problem, expect_found, inputs=None, extra=None):
    cert = hom_exists(problem)
    if cert.verdict == VERDICT_BUDGET:
        verdict = 'budget'
    elif cert.found == expect_found:
        verdict = 'witness' if cert.found else 'exhausted'
    else:
        verdict = 'fail'
    payload = cert.to_dict()
    payload.update(extra or {})
    return Certificate.make(claim_id, verdict,
                            inputs={**problem.to_dict(), **(inputs or {}), 'expect_found': expect_found},
                            payload=payload)


def claim_f5_in_f(budget):
    F, F5 = catalog('F'), catalog('F5')
    embedding = reference_f5_embedding()
    reference_ok = verify_map(HomProblem(F5, F, 'injective', budget=budget), embedding)
    cert = hom_exists(HomProblem(F5, F, 'general', budget=budget))
    extra = {'reference_embedding': embedding.to_dict(), 'reference_embedding_valid': reference_ok}
    if cert.found:
        first, second = projections(catalog('K4minus'), catalog('Fstar'))
        to_k4 = compose(cert.witness, first)
        to_fstar = compose(cert.witness, second)
        extra['projected_to_K4minus'] = is_homomorphism(to_k4, F5, catalog('K4minus'))
        extra['projected_to_Fstar'] = is_homomorphism(to_fstar, F5, catalog('Fstar'))
    if cert.verdict == VERDICT_BUDGET:
        verdict = 'budget' if reference_ok else 'fail'
    else:
        ok = reference_ok and cert.found and extra['projected_to_K4minus'] and extra['projected_to_Fstar']
        verdict = 'witness' if ok else 'fail'
    payload = cert.to_dict()
    payload.update(extra)
    return Certificate.make('F5-in-F', verdict,
                            inputs={'pattern': 'F5', 'target': 'F', 'budget': budget}, payload=payload)


def claim_fstar_images():
    images = homomorphic_images(catalog('Fstar'))
    ok = bool(images) and images[0] == catalog('Fstar')
    return Certificate.make('fstar-images', 'pass' if ok else 'fail',
                            inputs={'graph': 'Fstar'},
                            payload={'count': len(images),
                                     'images': [{'n': g.n, 'edges': list(g.edges)} for g in images]})


def claim_blowup_invariance():
    family = [catalog('K4minus')] + homomorphic_images(catalog('Fstar'))
    return is_blowup_invariant(family, claim_id='blowup-invariance')


def claim_column_type_exclusion():
    premises = [verify_lemma_matrix(), verify_lemma_four_by_three(), verify_fstar_labelling_infeasible()]
    return column_type_exclusion(premises)


def claim_reference_apex_patterns():
    return cross_check_apex_patterns(reference_rank3_witness(), 3, claim_id='apex-pattern-cross-check')


def claim_f_not_r2(budget, symmetry):
    R2 = catalog('R2')
    autos = _automorphisms_for('R2') if symmetry else None
    return _search_claim('F-not-hom-R2', HomProblem(catalog('F'), R2, 'general', autos, budget),
                         expect_found=False, inputs={'pattern': 'F', 'target': 'R2'})


def claim_core_smoke(budget):
    """K4minus x F5 against R2, with and without symmetry breaking; the verdicts must agree."""
    core, _ = product(catalog('K4minus'), catalog('F5'))
    R2 = catalog('R2')
    autos = _automorphisms_for('R2')
    with_sym = hom_exists(HomProblem(core, R2, 'general', autos, budget))
    without = hom_exists(HomProblem(core, R2, 'general', None, budget))
    if VERDICT_BUDGET in (with_sym.verdict, without.verdict):
        verdict = 'budget'
    else:
        verdict = 'pass' if with_sym.verdict == without.verdict else 'fail'
    return Certificate.make('core-smoke-R2', verdict,
                            inputs={'pattern': 'K4minus x F5', 'target': 'R2', 'budget': budget},
                            payload={'with_symmetry': with_sym.to_dict(),
                                     'without_symmetry': without.to_dict()})


def _random_rank3_specs(seed, count):
    rng = make_rng(seed, 'lift-samples')
    specs = []
    while len(specs) < count:
        dim = int(rng.integers(3, 5))
        size = int(rng.integers(3, 6))
        forms = rng.choice(range(1, 1 << dim), size=min(size, (1 << dim) - 1), replace=False)
        spec = CutTemplateSpec(dim, tuple(int(f) for f in forms))
        if cut_rank(spec) >= 3:
            specs.append(spec)
    return specs


def claim_f_to_rank3(budget, seed, samples):
    F, rank3 = catalog('F'), catalog('Rank3')
    witness = reference_rank3_witness()
    problem = HomProblem(F, rank3, 'general', None, budget)
    reference_ok = verify_map(problem, witness)
    lifts = [{'spec': spec.to_dict(), 'valid': lift_is_valid(spec)}
             for spec in _random_rank3_specs(seed, samples)]
    cert = hom_exists(problem)
    payload = cert.to_dict()
    payload.update({'reference_witness': witness.to_dict(), 'reference_witness_valid': reference_ok,
                    'lifts': lifts})
    supporting = reference_ok and all(lift['valid'] for lift in lifts)
    if cert.found:
        patterns = cross_check_apex_patterns(cert.witness, 3, claim_id='solver-apex-patterns')
        payload['solver_apex_patterns'] = patterns.payload
        verdict = 'witness' if supporting and patterns.verdict == 'pass' else 'fail'
    elif cert.verdict == VERDICT_BUDGET:
        verdict = 'budget' if supporting else 'fail'
    else:
        verdict = 'fail'
    return Certificate.make('F-hom-Rank3', verdict,
                            inputs={**problem.to_dict(), 'pattern': 'F', 'target': 'Rank3',
                                    'expect_found': True, 'seed': seed, 'lift_samples': samples},
                            payload=payload)


def claim_rank_sweep(budget, max_dim, max_forms, symmetry):
    return rank_dichotomy_sweep(max_dim, max_forms, budget, symmetry, claim_id='rank-dichotomy')


def claim_lambda_single_edge(seed):
    result = maximize(SINGLE_EDGE, seed=seed)
    ok = abs(result.value - 1 / 27) <= 1e-9
    return Certificate.make('lambda-single-edge', 'pass' if ok else 'fail',
                            inputs={'graph': 'single edge', 'seed': seed},
                            payload={'result': result.to_dict(), 'target': Fraction(1, 27)})


def claim_lambda_rcross(seed):
    """
    Lower bound 1/27 exactly along the alpha family; upper bound only as an
    empirical maximum over many restarts.
    """
    r_cross = catalog('Rcross')
    samples = [Fraction(k, 42) for k in range(1, 21)]
    values = [lagrange_poly(r_cross, crossed_weights(a)) for a in samples]
    exact_ok = all(v == Fraction(1, 27) for v in values)
    restarts = section('lagrangian')['upper_check_restarts']
    result = maximize(r_cross, restarts=restarts, seed=seed)
    upper_ok = result.value <= 1 / 27 + 1e-9
    return Certificate.make('lambda-rcross', 'pass' if exact_ok and upper_ok else 'fail',
                            inputs={'alphas': samples, 'restarts': restarts, 'seed': seed},
                            payload={'exact_values': values, 'lower_bound_exact': exact_ok,
                                     'empirical_maximum': result.to_dict(),
                                     'upper_bound_status': 'empirical, non-exhaustive',
                                     'upper_bound_holds': upper_ok})


def claim_gradient(seed, instances=100):
    rng = make_rng(seed, 'gradient-check')
    worst = 0.0
    failures = []
    for k in range(instances):
        n = int(rng.integers(3, 9))
        triples = [(a, b, c) for a in range(n) for b in range(a + 1, n) for c in range(b + 1, n)
                   if rng.random() < 0.5]
        graph = build(n, triples)
        x = rng.dirichlet([1.0] * n)
        check = gradient_check(graph, x)
        worst = max(worst, check['max_abs'])
        if not check['ok']:
            failures.append({'instance': k, 'n': n, **check})
    return Certificate.make('lambda-gradient', 'pass' if not failures else 'fail',
                            inputs={'instances': instances, 'seed': seed, 'step': 1e-6},
                            payload={'max_abs_deviation': worst, 'failures': failures[:100]})


def claim_blowup_consistency(seed):
    """
    |E(blowup)| = p n^3 + O(n^2) on random patterns. Apportioned sizes are
    within 1 of their targets, so each edge is off by at most 3n^2 + 3n + 1
    and the constant can never exceed 4 |E(pattern)| for n >= 30.
    """
    rng = make_rng(seed, 'blowup-consistency')
    ns = [30, 60, 90]
    rows = []
    for _ in range(5):
        m = int(rng.integers(3, 7))
        triples = [(a, b, c) for a in range(m) for b in range(a + 1, m) for c in range(b + 1, m)
                   if rng.random() < 0.6]
        pattern = build(m, triples or [(0, 1, 2)])
        raw = [int(v) for v in rng.integers(1, 6, size=m)]
        proportions = [Fraction(v, sum(raw)) for v in raw]
        report = blowup_consistency(pattern, proportions, ns)
        bound = 4 * pattern.num_edges
        rows.append({'pattern_edges': list(pattern.edges), 'proportions': proportions,
                     'constants': report['constants'], 'bound': bound,
                     'within_bound': report['max_constant'] <= bound,
                     'stable': report['stable']})
    ok = all(r['within_bound'] for r in rows)
    return Certificate.make('lambda-blowup-consistency', 'pass' if ok else 'fail',
                            inputs={'seed': seed, 'ns': ns}, payload={'patterns': rows})


def claim_density():
    s3 = density_report(catalog('S3(60)'))
    crossed = density_report(crossed_blowup(CrossedBlowupSpec(60, Fraction(1, 4))))
    asymptotic = density_report(SINGLE_EDGE, [Fraction(1, 3)] * 3)
    ok = (s3['density'] == Fraction(8000, 34220) and crossed['density'] == s3['density']
          and asymptotic['asymptotic_density'] == Fraction(2, 9))
    return Certificate.make('density-S3-vs-crossed', 'pass' if ok else 'fail',
                            inputs={'n': 60, 'alpha': Fraction(1, 4)},
                            payload={'S3': s3, 'crossed': crossed, 'single_edge_blowups': asymptotic})


def claim_q_law(alphas, ladder):
    reports = [q_law_check(a, ladder) for a in alphas]
    ok = all(r['passed'] for r in reports)
    return Certificate.make('q-law', 'pass' if ok else 'fail',
                            inputs={'alphas': alphas, 'ladder': ladder},
                            payload={'reports': reports})


def claim_edge_law(alphas, ladder):
    reports = [edge_law_check(a, ladder) for a in alphas]
    monotone = monotone_check(alphas, max(ladder))
    ok = all(r['passed'] for r in reports) and monotone['passed']
    return Certificate.make('edge-and-monotone-law', 'pass' if ok else 'fail',
                            inputs={'alphas': alphas, 'ladder': ladder},
                            payload={'edge_law': reports, 'monotone': monotone})


def claim_lipschitz(seed, n, flips):
    graph, _ = crossed_graph(n, Fraction(1, 4))
    report = lipschitz_check(graph, flips, seed)
    return Certificate.make('lipschitz', 'pass' if report['passed'] else 'fail',
                            inputs={'n': n, 'alpha': Fraction(1, 4), 'flips': flips, 'seed': seed},
                            payload=report)


def claim_separation(alpha, beta, n, tolerance, exact_n):
    large = separation(alpha, beta, n)
    small = separation(alpha, beta, exact_n)
    error = relative_error(large.normalized_gap, large.asymptotic_gap)
    ok = error <= tolerance and small.consistent and small.exact_dist is not None
    return Certificate.make('separation', 'pass' if ok else 'fail',
                            inputs={'alpha': alpha, 'beta': beta, 'n': n, 'exact_n': exact_n,
                                    'tolerance': tolerance},
                            payload={'large': large.to_dict(), 'relative_error': error,
                                     'small': small.to_dict()})


def claim_pigeonhole(alphas, n):
    report = pigeonhole_report(alphas, n)
    return Certificate.make('pigeonhole', 'pass' if report['passed'] else 'fail',
                            inputs={'alphas': alphas, 'n': n}, payload=report)


def claim_freeness(alphas, ladder):
    reports = [freeness_check(a, ladder) for a in alphas]
    ok = all(r['passed'] for r in reports)
    return Certificate.make('F-freeness', 'pass' if ok else 'fail',
                            inputs={'alphas': alphas, 'ladder': ladder}, payload={'reports': reports})


# ---------------------------------------------------------------------------
# certify-all
# ---------------------------------------------------------------------------

def _claims(seed, budget, symmetry):
    """(claim_id, thunk) in bundle order."""
    cfg = section('stability')
    ccfg = section('certify')
    alphas = [parse_fraction(a) for a in cfg['law_alphas']]
    return [
        ('catalog-K4minus', lambda: claim_catalog_shape('K4minus')),
        ('catalog-Fstar', lambda: claim_catalog_shape('Fstar')),
        ('catalog-F5', lambda: claim_catalog_shape('F5')),
        ('catalog-F', lambda: claim_catalog_shape('F')),
        ('F5-in-F', lambda: claim_f5_in_f(budget)),
        ('fstar-images', claim_fstar_images),
        ('blowup-invariance', claim_blowup_invariance),
        ('lemma-diagonal-sums', verify_lemma_matrix),
        ('lemma-four-by-three', verify_lemma_four_by_three),
        ('fstar-labelling', verify_fstar_labelling_infeasible),
        ('rank3-table', verify_rank3_table),
        ('column-type-exclusion', claim_column_type_exclusion),
        ('apex-pattern-cross-check', claim_reference_apex_patterns),
        ('F-not-hom-R2', lambda: claim_f_not_r2(budget, symmetry)),
        ('core-smoke-R2', lambda: claim_core_smoke(budget)),
        ('F-hom-Rank3', lambda: claim_f_to_rank3(budget, seed, ccfg['lift_samples'])),
        ('rank-dichotomy', lambda: claim_rank_sweep(budget, ccfg['sweep_max_dim'],
                                                    ccfg['sweep_max_forms'], symmetry)),
        ('lambda-single-edge', lambda: claim_lambda_single_edge(seed)),
        ('lambda-rcross', lambda: claim_lambda_rcross(seed)),
        ('lambda-gradient', lambda: claim_gradient(seed)),
        ('lambda-blowup-consistency', lambda: claim_blowup_consistency(seed)),
        ('density-S3-vs-crossed', claim_density),
        ('q-law', lambda: claim_q_law(alphas, cfg['law_ladder'])),
        ('edge-and-monotone-law', lambda: claim_edge_law(alphas, cfg['law_ladder'])),
        ('lipschitz', lambda: claim_lipschitz(seed, cfg['lipschitz_n'], cfg['lipschitz_flips'])),
        ('separation', lambda: claim_separation(parse_fraction(cfg['separation_alpha']),
                                                parse_fraction(cfg['separation_beta']),
                                                cfg['separation_n'], cfg['separation_tolerance'],
                                                cfg['exact_separation_n'])),
        ('pigeonhole', lambda: claim_pigeonhole([parse_fraction(a) for a in cfg['pigeonhole_alphas']],
                                                cfg['pigeonhole_n'])),
        ('F-freeness', lambda: claim_freeness(alphas, cfg['freeness_ladder'])),
    ]


def _run_claim(claim_id, fn):
    """A claim that raises becomes a failing certificate carrying the error."""
    try:
        return fn()
    except (HypergraphError, AssertionError, ValueError) as e:
        logger.error("%s raised %s: %s", claim_id, type(e).__name__, e)
        return Certificate.make(claim_id, 'fail', payload={'error': type(e).__name__,
                                                           'message': str(e)})


def certify_all(seed=None, budget=None, out_dir=None, parallel=None, symmetry=None, write=True):
    """
    Run every claim in order and collect the certificates. With parallel the
    claims run on a thread pool; the bundle keeps claim order either way.
    """
    ccfg = section('certify')
    seed = ccfg['seed'] if seed is None else seed
    budget = section('solver')['budget'] if budget is None else budget
    out_dir = ccfg['out_dir'] if out_dir is None else out_dir
    parallel = ccfg['parallel'] if parallel is None else parallel
    symmetry = section('solver')['symmetry'] if symmetry is None else symmetry

    bundle = CertificateBundle(out_dir, **describe(seed))
    claims = _claims(seed, budget, symmetry)
    start = time.time()
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda item: _run_claim(*item), claims))
    else:
        results = [_run_claim(*item) for item in claims]
    for cert in results:
        logger.info("%-28s %s", cert.claim_id, cert.verdict)
        bundle.add(cert)

    logger.info("certify-all: %s (%d claims, %.1fs)", bundle.status, len(results), time.time() - start)
    if bundle.first_failure:
        logger.error("first failing claim: %s", bundle.first_failure)
    if write:
        bundle.save_to_json()
        logger.info("certificates written to %s", out_dir)
    return bundle


def exit_code(status):
    return {'pass': EXIT_PASS, 'incomplete': EXIT_INCOMPLETE}.get(status, EXIT_FAIL)


def recheck(cert):
    """
    Re-validate a stored certificate from its own JSON: the content hash,
    and any witness map edge by edge against freshly built catalog graphs.
    No search is run.
    """
    report = {'claim_id': cert.claim_id, 'verdict': cert.verdict,
              'hash_ok': cert.recompute_hash() == cert.content_hash, 'witness_ok': None}
    witness = cert.payload.get('witness')
    pattern_name, target_name = cert.inputs.get('pattern'), cert.inputs.get('target')
    if witness is not None and isinstance(pattern_name, str) and isinstance(target_name, str):
        problem = HomProblem(catalog(pattern_name), catalog(target_name),
                             cert.inputs.get('mode', 'general'))
        report['witness_ok'] = verify_map(problem, VertexMap.from_dict(witness))
    report['ok'] = report['hash_ok'] and report['witness_ok'] is not False
    return report


# ---------------------------------------------------------------------------
# Sub-commands
# ---------------------------------------------------------------------------

def cmd_construct(args):
    if args.crossed is not None:
        n = args.n
        alpha = parse_fraction(args.crossed)
        graph = crossed_blowup(CrossedBlowupSpec(n, alpha))
        labels = crossed_labels(n, alpha)
        name = f"G_{str(alpha).replace('/', '-')}_{n}"
        extra = {'sizes': dict(zip(CROSSED_PARTS, crossed_part_sizes(n, alpha)))}
    elif args.template is not None:
        spec = CutTemplateSpec.parse(args.template)
        graph, labels = cut_template(spec)
        name = f"R_{spec.dim}_{'-'.join(str(f) for f in spec.forms)}"
        extra = {'cut_rank': cut_rank(spec)}
    elif args.name is not None:
        graph, labels = catalog_entry(args.name)
        name = canonical_name(args.name).replace('(', '_').replace(')', '')
        extra = {}
    else:
        raise HypergraphError("construct needs a catalog NAME, --crossed ALPHA --n N or --template")
    path = os.path.join(args.out, f"{name}.3g")
    written = write_graph(graph, path, labels)
    _dump({'name': name, 'n': graph.n, 'm': graph.num_edges, 'files': written, **extra})
    return EXIT_PASS


def cmd_hom(args):
    pattern, _ = resolve_graph(args.pattern)
    target, _ = resolve_graph(args.target)
    autos = None if args.no_symmetry else _automorphisms_for(args.target)
    problem = HomProblem(pattern, target, args.mode, autos, args.budget)
    cert = hom_exists(problem)
    _dump({'problem': problem.to_dict(), 'certificate': cert.to_dict()})
    return EXIT_INCOMPLETE if cert.verdict == VERDICT_BUDGET else EXIT_PASS


def cmd_verify_lemmas(args):
    bundle = CertificateBundle(args.out, **describe(args.seed))
    for fn in (verify_lemma_matrix, verify_lemma_four_by_three, verify_fstar_labelling_infeasible,
               verify_rank3_table, claim_column_type_exclusion, claim_reference_apex_patterns):
        bundle.add(fn())
    bundle.save_to_json()
    _dump(bundle.summary())
    return exit_code(bundle.status)


def cmd_lagrangian(args):
    graph, _ = resolve_graph(args.graph)
    if args.exact_at:
        weights = Weights.exact([parse_fraction(v) for v in args.exact_at.split(',')])
        _dump({'graph': args.graph, 'weights': weights.x, 'value': lagrange_poly(graph, weights)})
        return EXIT_PASS
    result = maximize(graph, args.restarts, args.tol, args.seed)
    _dump({'graph': args.graph, 'result': result.to_dict(), 'density': density_report(graph)})
    return EXIT_PASS


def _stability_graph(args):
    if getattr(args, 'crossed', None) is not None:
        alpha = parse_fraction(args.crossed)
        graph, parts = crossed_graph(args.n, alpha)
        return graph, parts
    graph, _ = resolve_graph(args.graph)
    return graph, None


def cmd_stability(args):
    if args.stability_command == 'q':
        graph, parts = _stability_graph(args)
        _dump(q_statistic(graph, parts))
        return EXIT_PASS
    if args.stability_command == 'lipschitz':
        graph, _ = _stability_graph(args)
        report = lipschitz_check(graph, args.flips, args.seed)
        _dump(report)
        return EXIT_PASS if report['passed'] else EXIT_FAIL
    if args.stability_command == 'law':
        ladder = [int(v) for v in args.ladder.split(',')] if args.ladder else None
        alphas = args.alpha or section('stability')['law_alphas']
        reports = [q_law_check(parse_fraction(a), ladder) for a in alphas]
        if args.format == 'csv':
            path = os.path.join(args.out, 'q_ladder.csv')
            os.makedirs(args.out, exist_ok=True)
            ladder_table(reports).to_csv(path, index=False)
            logger.info("ladder written to %s", path)
        else:
            _dump(reports)
        return EXIT_PASS if all(r['passed'] for r in reports) else EXIT_FAIL
    if args.stability_command == 'separation':
        report = separation(parse_fraction(args.alpha), parse_fraction(args.beta), args.n)
        _dump(report)
        return EXIT_PASS if report.consistent else EXIT_FAIL
    if args.stability_command == 'pigeonhole':
        alphas = [parse_fraction(a) for a in args.alphas.split(',')]
        report = pigeonhole_report(alphas, args.n)
        if args.format == 'csv':
            rows = [{'alpha': str(a), **{f"to_{b}": v for b, v in zip(alphas, row)}}
                    for a, row in zip(alphas, report['bounds'])]
            save_to_csv(rows, os.path.join(args.out, 'pigeonhole.csv'))
        _dump(report)
        return EXIT_PASS if report['passed'] else EXIT_FAIL
    raise HypergraphError(f"unknown stability command {args.stability_command!r}")


def cmd_certify_all(args):
    bundle = certify_all(seed=args.seed, budget=args.budget, out_dir=args.out,
                         parallel=args.parallel or None,
                         symmetry=False if args.no_symmetry else None)
    if args.format == 'csv':
        alphas = section('stability')['law_alphas']
        reports = [q_law_check(parse_fraction(a)) for a in alphas]
        ladder_table(reports).to_csv(os.path.join(args.out, 'q_ladder.csv'), index=False)
    _dump(bundle.summary())
    return exit_code(bundle.status)


def cmd_recheck(args):
    reports = [recheck(load_certificate(path)) for path in args.paths]
    _dump(reports)
    return EXIT_PASS if all(r['ok'] for r in reports) else EXIT_FAIL


def _common_options(default):
    """Flags accepted both before and after the sub-command name."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=default, help='Seed for every random stream')
    common.add_argument('--budget', type=int, default=default,
                        help='Node budget per homomorphism search')
    common.add_argument('--out', type=str, default=default, help='Output directory')
    common.add_argument('--format', choices=['json', 'csv'],
                        default='json' if default is None else default)
    common.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        default='INFO' if default is None else default, help='Set logging level')
    return common


def build_parser():
    parser = argparse.ArgumentParser(description='3-graph constructions, searches and certificates',
                                     parents=[_common_options(None)])
    parser.add_argument('--config', type=str, default=None, help='Path to config file')
    parser.add_argument('--catalog-override', action='append', default=[], metavar='NAME=TRIPLES',
                        help="Replace a catalog graph, e.g. Fstar=123,124,345,156,258 "
                             "(digits 1-based, letters a.. 0-based, or 0-based a-b-c)")
    common = _common_options(argparse.SUPPRESS)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('construct', parents=[common], help='Write a construction as .3g plus .labels')
    p.add_argument('name', nargs='?', help='Catalog name (K4minus, Fstar, F5, F, R2, Rcross, Rank3, S3(n))')
    p.add_argument('--crossed', type=str, default=None, metavar='ALPHA', help='Build G_alpha(n)')
    p.add_argument('--n', type=int, default=60)
    p.add_argument('--template', type=str, default=None, metavar='DIM:FORMS')
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser('hom', parents=[common], help='Decide whether pattern -> target')
    p.add_argument('--pattern', required=True, help='Catalog name or .3g path')
    p.add_argument('--target', required=True, help='Catalog name or .3g path')
    p.add_argument('--mode', choices=['general', 'injective', 'surjective'], default='general')
    p.add_argument('--no-symmetry', action='store_true', help='Disable root symmetry breaking')
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser('verify-lemmas', parents=[common], help='Run the brute-force lemma oracles')
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser('lagrangian', parents=[common],
                       help='Maximize or evaluate a Lagrange polynomial')
    p.add_argument('--graph', required=True)
    p.add_argument('--restarts', type=int, default=None)
    p.add_argument('--tol', type=float, default=None)
    p.add_argument('--exact-at', type=str, default=None, metavar='W1,W2,...')
    p.set_defaults(func=cmd_lagrangian)

    p = sub.add_parser('stability', parents=[common],
                       help='Q statistic, Lipschitz bound, law, separation, pigeonhole')
    ssub = p.add_subparsers(dest='stability_command', required=True)
    q = ssub.add_parser('q', parents=[common])
    q.add_argument('--graph', default='Rcross')
    q.add_argument('--crossed', type=str, default=None, metavar='ALPHA')
    q.add_argument('--n', type=int, default=60)
    q = ssub.add_parser('lipschitz', parents=[common])
    q.add_argument('--graph', default='Rcross')
    q.add_argument('--crossed', type=str, default=None, metavar='ALPHA')
    q.add_argument('--n', type=int, default=60)
    q.add_argument('--flips', type=int, default=None)
    q = ssub.add_parser('law', parents=[common])
    q.add_argument('--alpha', action='append', default=None)
    q.add_argument('--ladder', type=str, default=None, metavar='N1,N2,...')
    q = ssub.add_parser('separation', parents=[common])
    q.add_argument('--alpha', default='1/10')
    q.add_argument('--beta', default='2/5')
    q.add_argument('--n', type=int, default=240)
    q = ssub.add_parser('pigeonhole', parents=[common])
    q.add_argument('--alphas', default='1/10,1/5,3/10,2/5')
    q.add_argument('--n', type=int, default=120)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser('certify-all', parents=[common],
                       help='Run every claim and write a certificate bundle')
    p.add_argument('--parallel', action='store_true')
    p.add_argument('--no-symmetry', action='store_true')
    p.set_defaults(func=cmd_certify_all)

    p = sub.add_parser('recheck', parents=[common],
                       help='Re-validate certificate JSON files without searching')
    p.add_argument('paths', nargs='+', help='Certificate JSON files')
    p.set_defaults(func=cmd_recheck)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    set_level(args.log_level)
    try:
        use_config(args.config)
        clear_catalog_overrides()
        if args.out is None:
            args.out = section('certify')['out_dir']
        if args.seed is None:
            args.seed = section('certify')['seed']
        for override in args.catalog_override:
            name, triples = parse_override(override)
            set_catalog_override(name, triples)
        return args.func(args)
    except (HypergraphError, ValueError, FileNotFoundError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
