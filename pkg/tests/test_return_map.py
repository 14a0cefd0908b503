import math
import statistics
from fractions import Fraction

import pytest

from subtractive.exact_core import (
    MapParams,
    PreconditionError,
    all_shuffles,
    in_A,
    in_cA,
    in_Gamma,
    in_Theta,
    project_to_simplex,
    step,
)
from subtractive.matrices import identity, inverse_matrix, forward_matrix, word_inverse
from subtractive.return_map import (
    alpha_estimate,
    code_orbit,
    distortion_constant,
    first_return,
    jacobian_shape,
    numeric_jacobian_det,
    projected_step,
    wilson_interval,
)
from subtractive.sampling import derive_rng, ordered_simplex, sample_region, to_fractions

THIRD = Fraction(1, 3)
GRID = [(1, 2), (2, 2), (1, 3), (2, 3)]


def theta_points(p, count, seed):
    rng = derive_rng(seed, p.a, p.b)
    return [to_fractions(sample_region(rng, p, "Theta", "simplex", 40), 40) for _ in range(count)]


def test_first_return_examples():
    p = MapParams(1, 2)
    # (2,2,3) is in Theta, and its image (0,1,2) is already in A
    x = (2, 2, 3)
    assert in_Theta(x, p) and in_Gamma(x, p)
    assert first_return(x, p).status == "gamma"
    # (3,4,6) -> (1,3,3), outside Theta, -> (1,2,2), back in Theta
    x = (3, 4, 6)
    assert in_Theta(x, p) and not in_Gamma(x, p)
    rec = first_return(x, p)
    assert (rec.status, rec.k, rec.end) == ("returned", 2, (1, 2, 2))
    assert rec.word == [(2, 1, 3), (1, 2, 3)]
    assert rec.matrix.apply(x) == rec.end


def test_gamma_is_fixed():
    p = MapParams(1, 2)
    x = next(x for x in theta_points(p, 500, 1) if in_Gamma(x, p))
    rec = first_return(x, p)
    assert (rec.k, rec.word, rec.end, rec.status) == (0, [], x, "gamma")
    code = code_orbit(x, p, 3)
    assert code.blocks == [] and code.absorbed_at == 0


def test_one_step_return_exists():
    p = MapParams(1, 2)
    recs = [first_return(x, p) for x in theta_points(p, 500, 2) if not in_Gamma(x, p)]
    one = [r for r in recs if r.k == 1]
    assert one and all(len(r.word) == 1 for r in one)


def test_precondition():
    with pytest.raises(PreconditionError):
        first_return((1, 2, 5), MapParams(1, 2))


@pytest.mark.parametrize("a,b", GRID)
def test_block_validity(a, b):
    p = MapParams(a, b)
    for x in theta_points(p, 300, 3):
        rec = first_return(x, p)
        if rec.status == "gamma":
            continue
        assert rec.status == "returned"
        assert rec.matrix.apply(x) == rec.end and in_Theta(rec.end, p)
        y = x
        for j, pi in enumerate(rec.word):
            assert j == 0 or not in_Theta(y, p)
            y = step(y, p)
        assert y == rec.end


def test_code_reaching_gamma_after_one_block():
    p = MapParams(1, 2)
    for x in theta_points(p, 2000, 4):
        if in_Gamma(x, p):
            continue
        code = code_orbit(x, p, 5)
        if code.absorbed_at == 1:
            assert len(code.blocks) == 1
            assert in_Gamma(code.end, p)
            return
    pytest.fail("no point of the first pullback of Gamma found")


@pytest.mark.parametrize("a,b", [(1, 2), (2, 2)])
def test_pullback_reproduces_code(a, b):
    p = MapParams(a, b)
    codes = []
    for x in theta_points(p, 400, 5):
        c = code_orbit(x, p, 1)
        if c.blocks and c.complete:
            codes.append(c)
    assert codes
    targets = theta_points(p, 100, 6)
    pairs = 0
    for c in codes[:10]:
        m = word_inverse(c.word(), p)
        for y in targets:
            x = m.apply(y)
            assert in_Theta(x, p)
            again = code_orbit(x, p, 1)
            assert again.word() == c.word() and again.end == y
            pairs += 1
    assert pairs == 1000


def test_equal_codes_share_matrices():
    p = MapParams(1, 2)
    by_word = {}
    for x in theta_points(p, 1500, 7):
        c = code_orbit(x, p, 2)
        if len(c.blocks) == 2 and c.complete:
            key = tuple(c.word())
            if key in by_word:
                assert by_word[key].entries == c.matrix.entries
                return
            by_word[key] = c.matrix
    pytest.fail("no repeated two-block code found")


@pytest.mark.parametrize("a,b", GRID)
def test_large_top_coordinate_stays_outside_A(a, b):
    p = MapParams(a, b)
    rng = derive_rng(8, a, b)
    checked = 0
    while checked < 1000:
        x = sample_region(rng, p, "cA", "simplex", 32)
        if x[-1] >= 2 * x[a - 1]:
            assert in_cA(step(x, p), p)
            checked += 1


@pytest.mark.parametrize("a,b", GRID)
def test_orbits_outside_A_reach_Theta(a, b):
    p = MapParams(a, b)
    rng = derive_rng(9, a, b)
    for _ in range(1000):
        x = sample_region(rng, p, "cA", "simplex", 32)
        for _ in range(10**5):
            if in_A(x, p) or in_Theta(x, p):
                break
            x = step(x, p)
        assert in_Theta(x, p) or in_A(x, p)


def test_projected_step_examples():
    m = inverse_matrix((1, 2, 3), MapParams(1, 2))
    x = (THIRD,) * 3
    assert projected_step(x, identity(3)) == x
    assert projected_step(x, m) == (Fraction(1, 5), Fraction(2, 5), Fraction(2, 5))
    back = projected_step(projected_step(x, m), forward_matrix((1, 2, 3), MapParams(1, 2)))
    assert back == x


def test_jacobian_shape_examples():
    m = inverse_matrix((1, 2, 3), MapParams(1, 2))
    assert jacobian_shape(identity(3), (THIRD,) * 3) == 1
    assert jacobian_shape(m, (THIRD,) * 3) == Fraction(27, 125)


@pytest.mark.parametrize("a,b", [(1, 2), (2, 2)])
def test_jacobian_ratio_is_constant(a, b):
    p = MapParams(a, b)
    rng = derive_rng(10, a, b)
    shuffles = all_shuffles(p)
    for _ in range(5):
        word = [rng.choice(shuffles) for _ in range(rng.randint(1, 8))]
        m = word_inverse(word, p)
        ratios = []
        for _ in range(20):
            x = to_fractions(ordered_simplex(rng, p.n, 30), 30)
            ratios.append(numeric_jacobian_det(m, x) / float(jacobian_shape(m, x)))
        assert statistics.pstdev(ratios) / abs(statistics.fmean(ratios)) < 1e-6


@pytest.mark.parametrize("a,b", GRID)
def test_distortion_bound_on_theta(a, b):
    p = MapParams(a, b)
    pts = [project_to_simplex(x) for x in theta_points(p, 40, 11)]
    rng = derive_rng(12, a, b)
    bound = distortion_constant(p)
    for _ in range(5):
        m = word_inverse([rng.choice(all_shuffles(p)) for _ in range(10)], p)
        vals = [jacobian_shape(m, x) for x in pts]
        assert max(vals) / min(vals) <= bound


def test_alpha_estimate():
    p = MapParams(1, 2)
    est = alpha_estimate(p, 20000, seed=3)
    assert est.gamma_hits <= est.theta_hits
    lo, hi = wilson_interval(est.theta_hits, est.n_samples)
    assert lo <= est.leb_theta <= hi
    assert math.isclose(est.alpha_lower, est.leb_gamma / est.leb_theta / (2 * 1 * 3) ** 3)
    # exact share of Theta in the ordered simplex for (1, 2), by polygon clipping: 1/10
    assert abs(est.leb_theta - 0.1) < 0.01
    with pytest.raises(ValueError):
        alpha_estimate(p, 10, seed=1)
