#!/usr/bin/env python3
"""
Tests for the shared helpers: config, seeded streams, certificates and
GF(2) arithmetic.
"""

import os
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils import config as config_module
from utils.certificates import (Certificate, CertificateBundle, bits_hash, canonical_json,
                                content_hash, load_certificate, save_to_csv, to_jsonable)
from utils.config import DEFAULTS, load_config, parse_fraction, section, use_config
from utils.errors import InvalidSpec
from utils.gf2 import (apply_matrix, dual_action, evaluate, express, from_bits, gf2_rank,
                       gf2_solve, independent_subset, invertible_matrices, to_bits)
from utils.metrics import fit_decay_exponent, is_non_increasing, quadratic_constants
from utils.rng import describe, make_rng


@pytest.fixture
def restore_config():
    yield
    use_config(None)


def test_partial_config_overrides_only_named_keys(tmp_path, restore_config):
    path = os.path.join(tmp_path, 'partial.yaml')
    with open(path, 'w') as f:
        f.write("solver:\n  budget: 1234\n")
    config = load_config(path)
    assert config['solver']['budget'] == 1234
    assert config['solver']['symmetry'] == DEFAULTS['solver']['symmetry']
    assert config['stability'] == DEFAULTS['stability']
    use_config(path)
    assert section('solver')['budget'] == 1234


def test_missing_config(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(os.path.join(tmp_path, 'nope.yaml'))
    with pytest.raises(FileNotFoundError):
        use_config(os.path.join(tmp_path, 'nope.yaml'))


def test_shipped_config_matches_defaults():
    config = load_config(config_module.DEFAULT_CONFIG_PATH)
    assert set(config) == set(DEFAULTS)
    assert config['certify']['seed'] == DEFAULTS['certify']['seed']


def test_parse_fraction():
    assert parse_fraction('1/4') == Fraction(1, 4)
    assert parse_fraction(' 2/5 ') == Fraction(2, 5)
    assert parse_fraction(3) == Fraction(3)
    assert parse_fraction(Fraction(1, 3)) == Fraction(1, 3)
    with pytest.raises(InvalidSpec):
        parse_fraction(0.25)
    with pytest.raises(InvalidSpec):
        parse_fraction('one quarter')
    with pytest.raises(InvalidSpec):
        parse_fraction([1, 4])


def test_streams_are_reproducible_and_independent():
    a = make_rng(7, 'lagrangian', 'R2').random(5)
    b = make_rng(7, 'lagrangian', 'R2').random(5)
    c = make_rng(7, 'lipschitz', 'R2').random(5)
    d = make_rng(8, 'lagrangian', 'R2').random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    assert not np.allclose(a, d)
    assert describe(7) == {'generator': 'philox', 'seed': 7}


def test_to_jsonable():
    assert to_jsonable(Fraction(1, 540)) == '1/540'
    assert to_jsonable({1: (np.int64(2), {3, 1})}) == {'1': [2, [1, 3]]}
    assert to_jsonable(np.array([True, False])) == [True, False]
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_content_hash_ignores_key_order():
    assert content_hash({'a': 1, 'b': [1, 2]}) == content_hash({'b': [1, 2], 'a': 1})
    assert content_hash({'a': 1}) != content_hash({'a': 2})
    assert canonical_json({'b': 1, 'a': Fraction(1, 2)}) == '{"a":"1/2","b":1}'
    assert bits_hash([True, False]) == bits_hash([1, 0])
    assert bits_hash([True, False]) != bits_hash([False, True])


def test_certificate_roundtrip_and_bundle(tmp_path):
    ok = Certificate.make('claim-a', 'pass', inputs={'n': 3}, payload={'value': Fraction(1, 27)})
    assert ok.passed and not ok.incomplete
    assert ok.recompute_hash() == ok.content_hash
    assert Certificate.from_dict(ok.to_dict()) == ok
    with pytest.raises(ValueError):
        Certificate.make('claim-x', 'maybe')

    bundle = CertificateBundle(str(tmp_path), seed=1, generator='philox')
    bundle.add(ok)
    assert bundle.status == 'pass'
    bundle.add(Certificate.make('claim-b', 'budget'))
    assert bundle.status == 'incomplete'
    bundle.add(Certificate.make('claim-c', 'fail'))
    bundle.add(Certificate.make('claim-d', 'fail'))
    assert bundle.status == 'fail'
    assert bundle.first_failure == 'claim-c'
    paths = bundle.save_to_json()
    assert len(paths) == 5
    assert load_certificate(paths[0]) == ok


def test_save_to_csv(tmp_path):
    path = os.path.join(tmp_path, 'rows', 'ladder.csv')
    assert save_to_csv([{'n': 60, 'q': Fraction(1, 3)}], path) == path
    with open(path) as f:
        assert f.read().splitlines() == ['n,q', '60,1/3']
    assert save_to_csv([], path) is None


def test_bits_render_coordinate_zero_first():
    assert to_bits(1, 3) == '100'
    assert from_bits('100') == 1
    assert from_bits('011') == 6
    with pytest.raises(ValueError):
        from_bits('012')


@given(st.integers(0, 255))
def test_bits_roundtrip(vector):
    assert from_bits(to_bits(vector, 8)) == vector


def test_gf2_linear_algebra():
    assert evaluate(0b011, 0b001) == 1
    assert evaluate(0b011, 0b011) == 0
    assert gf2_rank([1, 2, 3], 2) == 2
    assert gf2_rank([1, 2, 4], 3) == 3
    assert independent_subset([1, 2, 3, 4]) == [0, 1, 3]
    assert express(3, [1, 2]) == 0b11
    assert express(4, [1, 2]) is None
    solution = gf2_solve([0b011, 0b110], [1, 0], 3)
    assert solution is not None
    assert evaluate(0b011, solution) == 1 and evaluate(0b110, solution) == 0
    assert gf2_solve([0b1, 0b1], [0, 1], 1) is None


def test_invertible_matrices_and_dual_action():
    matrices = list(invertible_matrices(3))
    assert len(matrices) == 168
    for columns in matrices[:20]:
        for form in range(1, 8):
            image = dual_action(columns, form, 3)
            for u in range(8):
                assert evaluate(image, apply_matrix(columns, u)) == evaluate(form, u)


def test_metrics():
    assert is_non_increasing([3, 2, 2, 1])
    assert not is_non_increasing([1, 2])
    fit = fit_decay_exponent([10, 100, 1000], [1.0, 0.1, 0.01])
    assert fit['exponent'] == pytest.approx(1.0)
    assert fit_decay_exponent([10, 20], [0, 0])['exact']
    constants = quadratic_constants([10, 20], [100, 400])
    assert constants['constants'] == [1.0, 1.0]
    assert constants['stable']
