#!/usr/bin/env python3
"""
Tests for the certify command line: sub-commands, exit codes, certificate
files and re-checking.
"""

import copy
import json
import logging
import os
import sys

import pandas as pd
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from certify import (EXIT_FAIL, EXIT_INCOMPLETE, EXIT_PASS, certify_all, claim_f5_in_f, exit_code,
                     main, recheck)
from constructions import catalog, parse_override, set_catalog_override
from three_graph import read_graph
from utils.certificates import CertificateBundle, load_certificate
from utils.log import set_level


def _out(tmp_path):
    return os.path.join(tmp_path, 'out')


def test_exit_codes():
    assert exit_code('pass') == EXIT_PASS == 0
    assert exit_code('incomplete') == EXIT_INCOMPLETE == 2
    assert exit_code('fail') == EXIT_FAIL == 1


def test_construct_catalog_graph(tmp_path):
    out = _out(tmp_path)
    assert main(['construct', 'K4minus', '--out', out]) == EXIT_PASS
    assert read_graph(os.path.join(out, 'K4minus.3g')) == catalog('K4minus')
    assert os.path.isfile(os.path.join(out, 'K4minus.labels'))


def test_construct_crossed_blowup_and_template(tmp_path):
    out = _out(tmp_path)
    assert main(['construct', '--crossed', '1/4', '--n', '60', '--out', out]) == EXIT_PASS
    assert read_graph(os.path.join(out, 'G_1-4_60.3g')).num_edges == 8000
    assert main(['construct', '--template', '3:1,2,4', '--out', out]) == EXIT_PASS
    assert read_graph(os.path.join(out, 'R_3_1-2-4.3g')) == catalog('Rank3')


def test_construct_errors(tmp_path):
    out = _out(tmp_path)
    assert main(['construct', '--out', out]) == EXIT_FAIL
    assert main(['construct', 'K5', '--out', out]) == EXIT_FAIL
    assert main(['construct', '--crossed', '1/2', '--n', '60', '--out', out]) == EXIT_FAIL
    assert main(['--config', os.path.join(tmp_path, 'missing.yaml'), 'construct', 'F5']) == EXIT_FAIL
    assert main(['--catalog-override', 'K4minus=12', 'construct', 'K4minus', '--out', out]) == EXIT_FAIL


def test_hom_exit_codes():
    assert main(['hom', '--pattern', 'F5', '--target', 'F']) == EXIT_PASS
    assert main(['hom', '--pattern', 'K4minus', '--target', 'Rcross']) == EXIT_PASS
    assert main(['hom', '--pattern', 'F5', '--target', 'F', '--budget', '1']) == EXIT_INCOMPLETE
    assert main(['--budget', '1', 'hom', '--pattern', 'F5', '--target', 'F']) == EXIT_INCOMPLETE


def _dumped(out):
    """The JSON document printed by a command, skipping log lines around it."""
    start = out.index('{\n')
    return json.JSONDecoder().raw_decode(out[start:])[0]


def test_hom_against_an_overridden_template_drops_its_automorphisms(capsys):
    # the replacement R2 shares none of the real template's symmetries
    override = 'R2=0-1-2,0-2-3,1-2-4,1-3-4'
    assert main(['--catalog-override', override, 'hom', '--pattern', 'K4minus',
                 '--target', 'R2']) == EXIT_PASS
    report = _dumped(capsys.readouterr().out)
    assert report['problem']['symmetry_breaking'] is False
    assert report['certificate']['verdict'] in ('witness', 'exhausted')


def test_log_level_is_accepted_after_the_sub_command():
    try:
        assert main(['hom', '--pattern', 'F5', '--target', 'F', '--log-level', 'WARNING']) == EXIT_PASS
        assert logging.getLogger('certify').level == logging.WARNING
        assert main(['--log-level', 'ERROR', 'hom', '--pattern', 'F5', '--target', 'F']) == EXIT_PASS
        assert logging.getLogger('certify').level == logging.ERROR
    finally:
        set_level('INFO')


def test_float_alphas_in_config_are_rejected_cleanly(tmp_path, capsys):
    path = os.path.join(tmp_path, 'floats.yaml')
    with open(path, 'w') as f:
        f.write("stability:\n  law_alphas: [0.25]\n")
    out = _out(tmp_path)
    assert main(['--config', path, 'certify-all', '--out', out]) == EXIT_FAIL
    assert 'exact rational' in capsys.readouterr().err
    assert not os.path.exists(os.path.join(out, 'bundle.json'))


def test_hom_reads_graph_files(tmp_path):
    out = _out(tmp_path)
    main(['construct', 'F5', '--out', out])
    path = os.path.join(out, 'F5.3g')
    assert main(['hom', '--pattern', path, '--target', 'Fstar', '--no-symmetry']) == EXIT_PASS


def test_verify_lemmas_and_recheck(tmp_path):
    out = _out(tmp_path)
    assert main(['verify-lemmas', '--out', out]) == EXIT_PASS
    with open(os.path.join(out, 'bundle.json')) as f:
        bundle = json.load(f)
    assert bundle['status'] == 'pass'
    assert [c['claim_id'] for c in bundle['claims']][:2] == ['lemma-diagonal-sums',
                                                             'lemma-four-by-three']
    paths = [os.path.join(out, f"{c['claim_id']}.json") for c in bundle['claims']]
    assert main(['recheck'] + paths) == EXIT_PASS


def test_recheck_detects_tampering(tmp_path):
    out = _out(tmp_path)
    main(['verify-lemmas', '--out', out])
    path = os.path.join(out, 'rank3-table.json')
    with open(path) as f:
        data = json.load(f)
    data['verdict'] = 'fail'
    with open(path, 'w') as f:
        json.dump(data, f)
    report = recheck(load_certificate(path))
    assert report['hash_ok'] is False
    assert not report['ok']
    assert main(['recheck', path]) == EXIT_FAIL


def test_recheck_revalidates_witnesses(tmp_path):
    cert = claim_f5_in_f(budget=None)
    assert cert.verdict == 'witness'
    bundle = CertificateBundle(str(tmp_path))
    bundle.add(cert)
    path = bundle.save_to_json()[0]
    report = recheck(load_certificate(path))
    assert report['hash_ok'] and report['witness_ok'] and report['ok']

    # a witness that breaks an edge fails even with a consistent hash
    data = copy.deepcopy(cert.to_dict())
    data['payload']['witness']['image'] = [0] * 5
    forged = type(cert).make(data['claim_id'], data['verdict'], data['inputs'], data['payload'])
    report = recheck(forged)
    assert report['hash_ok']
    assert report['witness_ok'] is False
    assert not report['ok']


def test_stability_commands(tmp_path):
    out = _out(tmp_path)
    assert main(['stability', 'q', '--graph', 'K4minus']) == EXIT_PASS
    assert main(['stability', 'q', '--crossed', '1/4', '--n', '12']) == EXIT_PASS
    assert main(['stability', 'lipschitz', '--graph', 'Fstar', '--flips', '50']) == EXIT_PASS
    assert main(['stability', 'law', '--alpha', '1/4', '--ladder', '12,60',
                 '--format', 'csv', '--out', out]) == EXIT_PASS
    table = pd.read_csv(os.path.join(out, 'q_ladder.csv'))
    assert table['n'].tolist() == [12, 60]
    assert (table['deviation'] == 0).all()
    assert main(['stability', 'pigeonhole', '--alphas', '1/10,2/5', '--n', '60',
                 '--format', 'csv', '--out', out]) == EXIT_PASS
    assert os.path.isfile(os.path.join(out, 'pigeonhole.csv'))
    assert main(['stability', 'pigeonhole', '--alphas', '1/4,1/4', '--n', '60']) == EXIT_FAIL


def test_lagrangian_command():
    assert main(['lagrangian', '--graph', 'K4minus', '--restarts', '4']) == EXIT_PASS
    assert main(['lagrangian', '--graph', 'K4minus', '--exact-at', '1/4,1/4,1/4,1/4']) == EXIT_PASS
    assert main(['lagrangian', '--graph', 'K4minus', '--exact-at', '1/2,1/4,1/4']) == EXIT_FAIL


@pytest.mark.slow
def test_certify_all_is_deterministic(tmp_path):
    first = certify_all(seed=7, out_dir=str(tmp_path), write=True)
    second = certify_all(seed=7, write=False)
    assert first.status == 'pass'
    assert [c.content_hash for c in first.certificates] == [c.content_hash for c in second.certificates]
    assert os.path.isfile(os.path.join(tmp_path, 'bundle.json'))
    for cert in first.certificates:
        assert recheck(load_certificate(os.path.join(tmp_path, f"{cert.claim_id}.json")))['ok']


@pytest.mark.slow
def test_certify_all_parallel_keeps_claim_order():
    serial = certify_all(seed=7, write=False)
    parallel = certify_all(seed=7, parallel=True, write=False)
    assert [c.claim_id for c in parallel.certificates] == [c.claim_id for c in serial.certificates]
    assert [c.content_hash for c in parallel.certificates] == [c.content_hash for c in serial.certificates]


@pytest.mark.slow
def test_certify_all_with_a_tiny_budget_is_incomplete():
    bundle = certify_all(budget=1, write=False)
    assert bundle.status == 'incomplete'
    assert bundle.first_failure is None
    assert exit_code(bundle.status) == EXIT_INCOMPLETE
    verdicts = {c.claim_id: c.verdict for c in bundle.certificates}
    assert verdicts['F5-in-F'] == 'budget'
    assert verdicts['F-not-hom-R2'] in ('budget', 'exhausted')


@pytest.mark.slow
def test_corrupted_fstar_fails_first_at_its_catalog_claim():
    set_catalog_override(*parse_override('Fstar=123,124,345,156,258'))
    bundle = certify_all(write=False)
    assert bundle.status == 'fail'
    assert bundle.first_failure == 'catalog-Fstar'
    assert bundle.certificates[0].verdict == 'pass'
