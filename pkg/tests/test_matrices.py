from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subtractive.exact_core import MapParams, all_shuffles, identity_shuffle, ordered_point, subtractive_step
from subtractive.matrices import (
    MatrixKindError,
    TransitionMatrix,
    check_column_claims,
    column_sums,
    det,
    forward_matrix,
    identity,
    inverse_matrix,
    word_forward,
    word_inverse,
)

from conftest import ordered_points

GRID = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2)]


def test_forward_examples():
    assert forward_matrix((1, 2, 3), MapParams(1, 2)).entries == ((1, 0, 0), (-1, 1, 0), (-1, 0, 1))
    assert forward_matrix((1, 2), MapParams(1, 1)).entries == ((1, 0), (-1, 1))


def test_inverse_examples():
    m = inverse_matrix((1, 2, 3), MapParams(1, 2))
    assert m.entries == ((1, 0, 0), (1, 1, 0), (1, 0, 1))
    assert column_sums(m) == (3, 1, 1)
    mm = m @ m
    assert mm.entries == ((1, 0, 0), (2, 1, 0), (2, 0, 1))
    assert column_sums(mm) == (5, 1, 1)
    assert column_sums(identity(4)) == (1, 1, 1, 1)
    assert m.kind == "inverse" and mm.kind == "product" and identity(3).kind == "identity"


@pytest.mark.parametrize("a,b", GRID)
def test_unimodular_and_inverse_pairs(a, b):
    p = MapParams(a, b)
    n = p.n
    for pi in all_shuffles(p):
        fwd, inv = forward_matrix(pi, p), inverse_matrix(pi, p)
        assert abs(fwd.det()) == 1 and abs(inv.det()) == 1
        assert (fwd @ identity(n)).entries == fwd.entries
        prod = TransitionMatrix(fwd.entries, None) @ TransitionMatrix(inv.entries, None)
        assert prod.entries == identity(n).entries


def test_variant_matrices_invert():
    p = MapParams(3, 2, 2)
    for pi in all_shuffles(p):
        prod = TransitionMatrix(forward_matrix(pi, p).entries, None) @ TransitionMatrix(
            inverse_matrix(pi, p).entries, None
        )
        assert prod.entries == identity(p.n).entries


def test_family_mixing_rejected():
    p = MapParams(1, 2)
    pi = identity_shuffle(3)
    with pytest.raises(MatrixKindError):
        forward_matrix(pi, p) @ inverse_matrix(pi, p)
    with pytest.raises(MatrixKindError):
        column_sums(forward_matrix(pi, p))
    with pytest.raises(MatrixKindError):
        TransitionMatrix(((1, -1), (0, 1)), "M")


def test_bareiss_det():
    assert det(((2, 0, 1), (1, 3, 2), (1, 1, 1))) == 2 * (3 - 2) - 0 + 1 * (1 - 3)
    assert det(((0, 1), (1, 0))) == -1


@given(st.data())
def test_branch_consistency(data):
    a, b = data.draw(st.sampled_from(GRID))
    p = MapParams(a, b)
    y = data.draw(ordered_points(p.n))
    pi = data.draw(st.sampled_from(all_shuffles(p)))
    x = ordered_point(inverse_matrix(pi, p).apply(y))
    out, pi_out = subtractive_step(x, p)
    assert out == y
    if len(set(y)) == p.n:
        assert pi_out == pi
    assert forward_matrix(pi, p).apply(x) == y


@given(st.data())
def test_word_products(data):
    a, b = data.draw(st.sampled_from(GRID))
    p = MapParams(a, b)
    word = data.draw(st.lists(st.sampled_from(all_shuffles(p)), min_size=1, max_size=12))
    m = word_inverse(word, p)
    assert m.length == len(word) and abs(m.det()) == 1
    assert all(v >= 0 for row in m.entries for v in row)
    l = word_forward(word, p)
    assert (TransitionMatrix(l.entries, None) @ TransitionMatrix(m.entries, None)).entries == identity(p.n).entries
    assert check_column_claims(m, p) == (True, True)


@pytest.mark.parametrize("a,b", GRID)
def test_column_claims_single_and_identity(a, b):
    p = MapParams(a, b)
    assert check_column_claims(identity(p.n), p) == (True, True)
    for pi in all_shuffles(p):
        assert check_column_claims(inverse_matrix(pi, p), p) == (True, True)


def test_apply_on_fractions():
    m = inverse_matrix((1, 2, 3), MapParams(1, 2))
    third = Fraction(1, 3)
    assert m.apply((third,) * 3) == (third, Fraction(2, 3), Fraction(2, 3))
