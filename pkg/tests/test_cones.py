from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from subtractive.cones import (
    ROOT,
    ConeBasis,
    ResourceLimitError,
    absorbed_ratio,
    complement_recursion,
    corner_cones,
    corner_recursion,
    decay_bound,
    middle_cone,
    normalized_area,
    subdivide,
    triangle_vertices,
    verify_tree,
)
from subtractive.exact_core import PreconditionError, in_A3_unordered, unordered_step3

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
h = Fraction(1, 2)


def test_subdivide_root():
    kids = subdivide(ROOT)
    assert [k.vectors for k in kids] == [((1, 1, 1), E1, E2), ((1, 1, 1), E2, E3), ((1, 1, 1), E1, E3)]
    assert all(k.det == 1 for k in kids)
    assert triangle_vertices(kids[0])[0] == (Fraction(1, 3),) * 3


def test_middle_cones():
    m = middle_cone(ROOT)
    assert m.vectors == ((1, 1, 0), (0, 1, 1), (1, 0, 1))
    assert set(triangle_vertices(m)) == {(h, h, 0), (0, h, h), (h, 0, h)}
    mm = middle_cone(m)
    assert set(mm.vectors) == {(1, 2, 1), (1, 1, 2), (2, 1, 1)}
    assert mm.det == 4


def test_areas():
    assert normalized_area(ROOT) == 1
    assert normalized_area(middle_cone(ROOT)) == Fraction(1, 4)
    assert normalized_area(middle_cone(middle_cone(ROOT))) == Fraction(1, 16)
    assert sum(normalized_area(c) for c in corner_cones(ROOT)) == Fraction(3, 4)
    assert absorbed_ratio(middle_cone(ROOT)) == Fraction(1, 4)


def test_recursion_values():
    tree = complement_recursion(3)
    assert tree.areas()[:2] == [Fraction(1, 4), Fraction(3, 16)]
    assert decay_bound(1) == Fraction(3, 16)
    assert verify_tree(tree).ok


def test_bad_bases():
    with pytest.raises(PreconditionError):
        ConeBasis(((1, 0, 0), (2, 0, 0), (0, 0, 1)))
    with pytest.raises(PreconditionError):
        ConeBasis(((1, 0, 0), (0, -1, 1), (0, 0, 1)))
    with pytest.raises(ResourceLimitError):
        complement_recursion(13)


@pytest.mark.parametrize("depth", range(7))
def test_matches_corner_oracle(depth):
    ours = {c.key() for c in complement_recursion(depth).levels[depth].complements}
    oracle = {c.key() for c in corner_recursion(depth)[depth]}
    assert ours == oracle


def test_determinant_rules():
    for c in complement_recursion(4).levels[4].cylinders:
        assert c.det == 1
        assert middle_cone(c).det == 2 * c.det
        assert all(k.det == c.det for k in subdivide(c))


def test_depth_two_labels():
    tree = complement_recursion(2)
    verts = {v for c in tree.levels[2].complements for v in triangle_vertices(c)}
    for v in [(1, 2, 3), (2, 1, 3), (3, 2, 1), (2, 3, 1), (3, 1, 2), (1, 3, 2)]:
        assert tuple(Fraction(x, 6) for x in v) in verts


def test_min_absorbed_ratio_sequence():
    mins = verify_tree(complement_recursion(5))["min_absorbed_ratio"]
    assert mins == [Fraction(k + 1, (k + 2) ** 2) for k in range(6)]


bary = st.tuples(*[st.integers(min_value=1, max_value=1000)] * 3)


def _point_in(c, w):
    return tuple(sum(wi * v[j] for wi, v in zip(w, c.vectors)) for j in range(3))


@given(st.integers(min_value=0, max_value=4), st.data())
def test_dynamics_cross_check(depth, data):
    tree = complement_recursion(depth)
    lv = tree.levels[depth]
    idx = data.draw(st.integers(min_value=0, max_value=len(lv.complements) - 1))
    comp = lv.complements[idx]
    w = data.draw(bary)
    x = _point_in(comp, w)
    assert comp.contains(x)
    for _ in range(depth):
        assert not in_A3_unordered(x)
        x = unordered_step3(x)
    assert not in_A3_unordered(x)

    # points of the middle cone of a depth-k complement reach A in k+1 steps
    y = _point_in(middle_cone(comp), w)
    for _ in range(depth + 1):
        y = unordered_step3(y)
    assert in_A3_unordered(y)


def test_barycentric_roundtrip():
    c = middle_cone(subdivide(ROOT)[1])
    x = _point_in(c, (2, 3, 5))
    assert c.barycentric(x) == (2, 3, 5)
    assert not c.contains((1, 0, 0))
