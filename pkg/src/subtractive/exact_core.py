"""Exact points and the homogeneous subtractive maps.

Points are tuples of exact numbers (``int`` or ``fractions.Fraction``).  The
maps only subtract and compare, so any exact ordered number type works; the
orbit code feeds integer numerators over a common denominator for speed and
converts back to ``Fraction`` on output.

Indices in the public API are 1-based where they name coordinates (``i`` in
:class:`MapParams`, shuffle images); Python sequences are 0-based as usual.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, lcm
from typing import NamedTuple, Optional, Sequence, Tuple

Point = Tuple  # tuple of int | Fraction
Shuffle = Tuple[int, ...]


class ParameterError(ValueError):
    """Map parameters and point/shuffle dimensions do not fit together."""


class DegenerateInputError(ValueError):
    """A projection or normalisation would divide by zero."""


class UnsupportedRegionError(ValueError):
    """A region predicate was requested outside its domain of definition."""


class PreconditionError(ValueError):
    """An operation was called on a point outside its required region."""


class InvariantViolation(RuntimeError):
    """An identity that must hold exactly failed at runtime."""


@dataclass(frozen=True)
class MapParams:
    """Deck sizes ``a``, ``b`` and the subtracted coordinate ``i``.

    ``i`` defaults to ``a`` (the map T_{a,b}); ``1 <= i < a`` selects the
    variant that subtracts ``x_i`` from the last ``b`` coordinates.
    """

    a: int
    b: int
    i: Optional[int] = None

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ParameterError(f"need a >= 1 and b >= 1, got a={self.a}, b={self.b}")
        if self.i is None:
            object.__setattr__(self, "i", self.a)
        if not 1 <= self.i <= self.a:
            raise ParameterError(f"variant index must satisfy 1 <= i <= a, got i={self.i}")

    @property
    def n(self) -> int:
        return self.a + self.b

    @property
    def is_variant(self) -> bool:
        return self.i != self.a

    def __str__(self):
        if self.is_variant:
            return f"T[{self.a},{self.b};i={self.i}]"
        return f"T[{self.a},{self.b}]"


def as_exact(value) -> Fraction | int:
    """Convert ints, Fractions and ``"p/q"`` strings; reject floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"coordinates must be exact (int, Fraction or 'p/q'), got {type(value).__name__}")


def ordered_point(coords: Sequence) -> Point:
    """Validate membership in the nonnegative nondecreasing cone and return a tuple."""
    x = tuple(as_exact(c) for c in coords)
    if not x:
        raise ParameterError("empty point")
    if x[0] < 0:
        raise PreconditionError(f"coordinates must be nonnegative: {x}")
    for u, v in zip(x, x[1:]):
        if u > v:
            raise PreconditionError(f"coordinates must be nondecreasing: {x}")
    return x


def free_point(coords: Sequence) -> Point:
    x = tuple(as_exact(c) for c in coords)
    if any(c < 0 for c in x):
        raise PreconditionError(f"coordinates must be nonnegative: {x}")
    return x


def _check_dim(x: Sequence, p: MapParams) -> None:
    if len(x) != p.n:
        raise ParameterError(f"point of dimension {len(x)} does not fit {p} (n={p.n})")


def sigma(x: Sequence):
    return sum(x)


# ---------------------------------------------------------------------------
# Shuffles
# ---------------------------------------------------------------------------

def is_shuffle(pi: Sequence[int], p: MapParams) -> bool:
    n, a = p.n, p.a
    if len(pi) != n or sorted(pi) != list(range(1, n + 1)):
        return False
    deck_one, deck_two = pi[:a], pi[a:]
    return all(u < v for u, v in zip(deck_one, deck_one[1:])) and all(
        u < v for u, v in zip(deck_two, deck_two[1:])
    )


def check_shuffle(pi: Sequence[int], p: MapParams) -> Shuffle:
    pi = tuple(pi)
    if not is_shuffle(pi, p):
        raise ParameterError(f"{pi} is not a shuffle of decks of sizes {p.a} and {p.b}")
    return pi


def all_shuffles(p: MapParams) -> list[Shuffle]:
    """Every shuffle in the family, ordered by the positions of deck one."""
    n, a = p.n, p.a
    out = []
    for first in combinations(range(1, n + 1), a):
        rest = [k for k in range(1, n + 1) if k not in first]
        out.append(tuple(first) + tuple(rest))
    assert len(out) == comb(n, a)
    return out


def identity_shuffle(n: int) -> Shuffle:
    return tuple(range(1, n + 1))


# ---------------------------------------------------------------------------
# The maps
# ---------------------------------------------------------------------------

def _raw_step(x: Sequence, a: int, i: int) -> list:
    # sorted() is stable, which is exactly the tie-break rule: equal values
    # keep their original relative order.
    s = x[i - 1]
    return sorted([*x[:a], *(v - s for v in x[a:])])


def subtractive_step(x: Sequence, p: MapParams) -> tuple[Point, Shuffle]:
    """One step of the map together with the shuffle of its cylinder.

    The returned shuffle sends the index of each coordinate of
    ``(x_1, ..., x_a, x_{a+1} - x_i, ..., x_{a+b} - x_i)`` to its position
    in the sorted output.  Equal values keep their original relative order.
    """
    _check_dim(x, p)
    s = x[p.i - 1]
    y = [*x[: p.a], *(v - s for v in x[p.a:])]
    order = sorted(range(p.n), key=y.__getitem__)
    pi = [0] * p.n
    for pos, src in enumerate(order):
        pi[src] = pos + 1
    return tuple(y[j] for j in order), tuple(pi)


def step(x: Sequence, p: MapParams) -> Point:
    """The image point only (no shuffle bookkeeping)."""
    _check_dim(x, p)
    return tuple(_raw_step(x, p.a, p.i))


def unordered_step3(x: Sequence) -> Point:
    """The three-dimensional map that keeps coordinates in place.

    The minimal coordinate stays, and is subtracted from the other two.
    Ties resolve to the lowest index.
    """
    if len(x) != 3:
        raise ParameterError(f"unordered_step3 works in dimension 3, got {len(x)}")
    m = min(range(3), key=x.__getitem__)
    s = x[m]
    return tuple(v if k == m else v - s for k, v in enumerate(x))


def project_to_simplex(x: Sequence) -> Point:
    total = sigma(x)
    if total == 0:
        raise DegenerateInputError("cannot normalise a point with zero coordinate sum")
    return tuple(Fraction(v) / total for v in x)


def project_to_B(x: Sequence) -> Point:
    last = x[-1]
    if last == 0:
        raise DegenerateInputError("cannot project a point whose last coordinate is zero")
    return tuple(Fraction(v) / last for v in x[:-1])


def lift_from_B(z: Sequence) -> Point:
    return (*z, 1)


def s_map_step(z: Sequence, p: MapParams) -> Point:
    """The projected map on ``B``: lift by appending 1, step, divide by the last coordinate."""
    if len(z) != p.n - 1:
        raise ParameterError(f"B-point of dimension {len(z)} does not fit {p}")
    if z and (z[-1] > 1 or z[0] < 0):
        raise PreconditionError(f"{z} is not in B")
    return project_to_B(step(lift_from_B(z), p))


def common_denominator(x: Sequence) -> tuple[list[int], int]:
    """Scale an exact point to integers: returns (numerators, denominator)."""
    den = 1
    for v in x:
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    return [int(v * den) for v in x], den


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

def in_A(x: Sequence, p: MapParams) -> bool:
    return sigma(x) <= p.b * x[-1]


def in_cA(x: Sequence, p: MapParams) -> bool:
    return not in_A(x, p)


def in_D(x: Sequence, p: MapParams) -> bool:
    if p.b < 2:
        raise UnsupportedRegionError("the set D is only defined for b >= 2")
    return sum(x[: p.a + 1]) <= x[p.a + 1]


def in_Theta(x: Sequence, p: MapParams) -> bool:
    return in_cA(x, p) and 2 * x[p.a - 1] >= x[-1]


def in_Gamma(x: Sequence, p: MapParams) -> bool:
    return in_cA(x, p) and in_A(step(x, p), p)


class RegionFlags(NamedTuple):
    in_A: bool
    in_D: Optional[bool]
    in_Theta: bool
    in_Gamma: bool


def classify(x: Sequence, p: MapParams, include_D: Optional[bool] = None) -> RegionFlags:
    """Exact membership flags.

    ``in_D`` is ``None`` when ``b == 1`` unless explicitly requested, in which
    case :class:`UnsupportedRegionError` is raised.
    """
    _check_dim(x, p)
    if include_D is None:
        include_D = p.b >= 2
    a_flag = in_A(x, p)
    d_flag = in_D(x, p) if include_D else None
    theta = not a_flag and 2 * x[p.a - 1] >= x[-1]
    gamma = not a_flag and in_A(step(x, p), p)
    return RegionFlags(a_flag, d_flag, theta, gamma)


def in_A3_unordered(x: Sequence) -> bool:
    """Absorbing set of the three-dimensional unordered map."""
    return sigma(x) <= 2 * max(x)
