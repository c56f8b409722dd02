#!/usr/bin/env python3
"""
Tests for the brute-force lemma oracles.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from constructions import FSTAR_EDGES, reference_rank3_witness
from lemma_oracles import (BinaryMatrix, Labelling, apex_patterns, check_diag_condition,
                           column_type_exclusion, cross_check_apex_patterns, labelling_system,
                           lemma_four_by_three_hypothesis, rank3_table, verify_apex_pattern,
                           verify_fstar_labelling_infeasible, verify_lemma_four_by_three,
                           verify_lemma_matrix, verify_rank3_table)
from three_graph import VertexMap
from utils.errors import InvalidSpec, LengthMismatch, WrongShape


def test_binary_matrix():
    M = BinaryMatrix.from_rows([[1, 0, 0], [1, 0, 0], [1, 0, 0]])
    assert M.col_sums() == (3, 0, 0)
    assert M.row_sums() == (1, 1, 1)
    assert BinaryMatrix.from_int(1, 3, 3)[0, 0] == 1
    assert BinaryMatrix.from_int(1 << 5, 3, 3)[1, 2] == 1
    with pytest.raises(WrongShape):
        BinaryMatrix.from_rows([[1, 0], [1]])
    with pytest.raises(WrongShape):
        BinaryMatrix(9, 1, (0,) * 9)
    with pytest.raises(InvalidSpec):
        BinaryMatrix(1, 1, (2,))


def test_diag_condition_examples():
    assert check_diag_condition(BinaryMatrix.from_rows([[1, 1, 1], [0, 0, 0], [0, 0, 0]]))
    assert check_diag_condition(BinaryMatrix.from_rows([[0, 1, 0], [0, 1, 0], [0, 1, 0]]))
    assert not check_diag_condition(BinaryMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    with pytest.raises(WrongShape):
        check_diag_condition(BinaryMatrix(4, 3, (0,) * 12))


def test_diagonal_lemma_has_six_satisfiers():
    cert = verify_lemma_matrix()
    assert cert.verdict == 'pass'
    assert cert.payload['satisfying_count'] == 6
    assert cert.payload['line_sum_shape']
    assert cert.payload['counterexamples'] == []


def test_diagonal_lemma_fails_for_a_wrong_condition():
    def at_most_one_per_diagonal(M):
        return all(M[0, a] + M[1, b] + M[2, c] <= 1
                   for a, b, c in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)))

    cert = verify_lemma_matrix(at_most_one_per_diagonal)
    assert cert.verdict == 'fail'
    assert cert.inputs['condition'] == 'at_most_one_per_diagonal'
    assert cert.payload['counterexamples']


def test_four_by_three_lemma():
    cert = verify_lemma_four_by_three()
    assert cert.verdict == 'pass'
    assert cert.payload['satisfying_count'] == 4
    a_row = BinaryMatrix.from_rows([[1, 1, 1], [0, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert lemma_four_by_three_hypothesis(a_row)
    column = BinaryMatrix.from_rows([[0, 0, 1]] * 4)
    assert lemma_four_by_three_hypothesis(column)
    b_row = BinaryMatrix.from_rows([[0, 0, 0], [1, 1, 1], [0, 0, 0], [0, 0, 0]])
    assert not lemma_four_by_three_hypothesis(b_row)


def test_fstar_has_no_exactly_one_labelling():
    cert = verify_fstar_labelling_infeasible()
    assert cert.verdict == 'pass'
    fstar = cert.payload['fstar']
    assert fstar['labellings'] == 128
    assert fstar['integer_feasible'] == 0
    assert fstar['max_satisfied'] == 4
    # a single edge has three exactly-one labellings
    assert cert.payload['variants']['single_edge']['integer_feasible'] == 3
    assert cert.payload['variants']['F5']['integer_feasible'] > 0


def test_labelling_system_over_f2():
    system = labelling_system(((1, 2, 3),), 3)
    # odd weight labellings: three singletons and the all-ones labelling
    assert system['f2_feasible'] == 4
    with pytest.raises(InvalidSpec):
        Labelling((0, 2))
    with pytest.raises(LengthMismatch):
        Labelling((0, 1)).check_length(3)


def test_rank3_table_is_all_ones():
    rows = rank3_table()
    assert len(rows) == len(FSTAR_EDGES) == 5
    assert sum(cell['value'] for row in rows for cell in row['cells']) == 15
    cert = verify_rank3_table()
    assert cert.verdict == 'pass'
    assert cert.payload['mismatches'] == []


def test_rank3_table_detects_a_bad_bottom():
    rows = rank3_table(bottoms=('000',) * 7)
    assert all(cell['value'] == 0 for row in rows for cell in row['cells'])


def test_apex_patterns_of_the_rank3_witness():
    witness = reference_rank3_witness()
    patterns = apex_patterns(witness, 3)
    assert len(patterns) == 5
    cert = cross_check_apex_patterns(witness, 3)
    assert cert.verdict == 'pass'
    with pytest.raises(LengthMismatch):
        apex_patterns(VertexMap(5, 11, (0, 1, 2, 3, 4)), 3)


def test_verify_apex_pattern_validation():
    M = BinaryMatrix.from_rows([[1, 1, 1], [0, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert verify_apex_pattern((1, 2, 3), M)
    with pytest.raises(InvalidSpec):
        verify_apex_pattern((1, 2, 7), M)
    with pytest.raises(WrongShape):
        verify_apex_pattern((1, 2, 3), BinaryMatrix(3, 3, (0,) * 9))


def test_column_type_exclusion():
    premises = [verify_lemma_matrix(), verify_lemma_four_by_three(),
                verify_fstar_labelling_infeasible()]
    cert = column_type_exclusion(premises)
    assert cert.verdict == 'pass'
    assert cert.payload['reproved'] is False
    assert set(cert.payload['premise_hashes']) == {
        'lemma-diagonal-sums', 'lemma-four-by-three', 'fstar-labelling'}
    missing = column_type_exclusion(premises[:2])
    assert missing.verdict == 'fail'
    assert missing.payload['missing'] == ['fstar-labelling']
