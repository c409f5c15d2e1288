"""Tests for relzkp.commitment"""
from collections import Counter
from itertools import product

import pytest

from hypothesis import given
from hypothesis import strategies as st

from relzkp.bounds import chsh_parallel_quantum_upper
from relzkp.commitment import (
    CommitmentParams,
    CommitmentRecord,
    binding_epsilon,
    commit,
    decode,
    equivocation_outcomes,
    required_bits,
    reveal_verify,
    string_binding_epsilon,
    string_required_bits,
)
from relzkp.errors import InvalidParameter, InvalidQuery, RevealRejected
from relzkp.field import FieldSpec


@pytest.mark.parametrize(
    "epsilon_b, bits",
    [(2.0**-32, 112), (1.0, 16), (2.0**-1, 19), (2.0**-64, 208)],
)
def test_required_bits(epsilon_b, bits):
    assert required_bits(3, 2, epsilon_b) == bits


def test_required_bits_meets_epsilon():
    for exponent in range(0, 80):
        epsilon_b = 2.0**-exponent
        bits = required_bits(3, 2, epsilon_b)
        assert binding_epsilon(3, 2, bits) <= epsilon_b
        assert binding_epsilon(3, 2, bits - 3) > epsilon_b


def test_deployment_width_binds_below_target():
    assert binding_epsilon(3, 2, 112) < 2.0**-32


def test_small_width_is_vacuous():
    assert binding_epsilon(3, 2, 9) == pytest.approx(4 * 648 ** (1 / 3) / 8, rel=1e-12)
    assert binding_epsilon(3, 2, 9) == pytest.approx(4.327, abs=1e-3)
    params = CommitmentParams(Q_bits=9, epsilon_b=1.0)
    assert params.vacuous
    assert not params.binding_certified
    assert params.to_dict()["vacuous"]
    assert not CommitmentParams().vacuous


def test_binding_epsilon_matches_parallel_game_bound():
    grid = list(product([2, 3, 5, 7, 11], [1, 2], [15, 20, 25, 30, 35]))
    assert len(grid) == 50
    for P, D, N in grid:
        upper = chsh_parallel_quantum_upper(P, 2**N, D)
        assert binding_epsilon(P, D, N) == pytest.approx(P**D * (upper - P ** (-D)), rel=1e-12)


def test_binding_epsilon_domain():
    with pytest.raises(InvalidParameter):
        binding_epsilon(3, 2, 1)
    with pytest.raises(InvalidParameter):
        binding_epsilon(1, 2, 10)
    with pytest.raises(InvalidParameter):
        required_bits(3, 2, 0.0)


def test_string_commitment_bound():
    assert string_required_bits(3, 2.0**-32) == 107
    assert string_binding_epsilon(3, 107) <= 2.0**-32
    assert string_binding_epsilon(3, 106) > 2.0**-32


def test_params():
    params = CommitmentParams()
    assert params.binding_certified
    assert params.certify() is params
    assert params.epsilon_log2 == -32
    assert CommitmentParams.for_epsilon(2.0**-32).Q_bits == 112
    assert params.to_dict()["required_bits"] == 112

    with pytest.raises(InvalidParameter):
        CommitmentParams(Q_bits=64).certify()
    with pytest.raises(InvalidParameter):
        CommitmentParams(epsilon_b=0.3)
    with pytest.raises(InvalidParameter):
        CommitmentParams(P=3, Q_bits=1)


def test_perfect_hiding_exhaustive(gf8):
    everything = Counter(range(gf8.order))
    for x in gf8.elements():
        if not x:
            continue
        per_color = []
        for y in (0, 1, 2):
            commitments = Counter(commit(x, y, b).value for b in gf8.elements())
            assert commitments == everything
            per_color.append(commitments)
        assert per_color[0] == per_color[1] == per_color[2]


def test_commit_and_reveal(gf256):
    for x, b in product(list(gf256.elements())[1:40], list(gf256.elements())[::17]):
        for y in (0, 1, 2):
            a = commit(x, y, b)
            assert reveal_verify(x, a, b) == y
            assert reveal_verify(x, a, b, claimed_y=y) == y
            assert CommitmentRecord.create(x, y, b).verify() == y


@given(st.integers(1, 2**112 - 1), st.integers(0, 2**112 - 1), st.sampled_from([0, 1, 2]))
def test_commit_and_reveal_112(x, b, y):
    spec = FieldSpec.preset(112)
    x, b = spec.element(x), spec.element(b)
    assert reveal_verify(x, commit(x, y, b), b) == y


def test_reveal_rejections(gf8):
    x = gf8.element(3)
    b = gf8.element(5)
    a = commit(x, 1, b)
    with pytest.raises(RevealRejected):
        reveal_verify(x, a, b, claimed_y=2)
    # opens to x^-1 * (x * 1 + 6), outside the colors
    bad_key = b + gf8.element(6)
    assert decode(x, a, bad_key).value not in (0, 1, 2)
    with pytest.raises(RevealRejected):
        reveal_verify(x, a, bad_key)


def test_zero_query_rejected(gf8):
    with pytest.raises(InvalidQuery):
        commit(gf8.zero, 0, gf8.one)
    with pytest.raises(InvalidQuery):
        decode(gf8.zero, gf8.one, gf8.one)


@pytest.mark.parametrize("color, target", [(0, 1), (0, 2), (1, 2), (2, 0)])
def test_equivocation_succeeds_for_one_query_only(gf8, color, target):
    third = 3 - color - target
    for guess in list(gf8.elements())[1:]:
        outcomes = equivocation_outcomes(gf8, color, target, guess, key=gf8.element(4))
        assert len(outcomes) == 7
        assert outcomes[guess.value] == target
        decoded = Counter(outcomes.values())
        assert decoded[target] == 1
        assert decoded[third] == 1
        assert decoded[color] == 0
        assert decoded[None] == 5


def test_equivocation_arguments(gf8):
    with pytest.raises(InvalidParameter):
        equivocation_outcomes(gf8, 1, 1, gf8.one)
    with pytest.raises(InvalidQuery):
        equivocation_outcomes(gf8, 1, 2, gf8.zero)
