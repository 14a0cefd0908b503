"""Dyadic random points.

All samplers draw integers of ``bits`` random bits and return integer
numerators; divide by ``2**bits`` (or use :func:`to_fractions`) for the
exact rational point.  Because every map and region in this package is
homogeneous, working on the numerators directly is exact.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact_core import MapParams, UnsupportedRegionError

DEFAULT_BITS = 64
MAX_REJECTIONS = 10_000_000


def derive_rng(seed: int, *keys: int) -> random.Random:
    """A reproducible generator for one worker/chunk of a seeded sweep."""
    ss = np.random.SeedSequence([seed, *keys])
    return random.Random(int.from_bytes(ss.generate_state(4, dtype=np.uint32).tobytes(), "little"))


def to_fractions(x: Sequence[int], bits: int = DEFAULT_BITS) -> tuple:
    den = 1 << bits
    return tuple(Fraction(v, den) for v in x)


def ordered_cube(rng: random.Random, n: int, bits: int = DEFAULT_BITS) -> list[int]:
    """Uniform point of [0, 1)^n, sorted ascending."""
    return sorted(rng.getrandbits(bits) for _ in range(n))


def ordered_simplex(rng: random.Random, n: int, bits: int = DEFAULT_BITS) -> list[int]:
    """Uniform point of the ordered unit simplex: numerators sum to ``2**bits``."""
    cuts = sorted(rng.getrandbits(bits) for _ in range(n - 1))
    edges = [0, *cuts, 1 << bits]
    return sorted(edges[k + 1] - edges[k] for k in range(n))


def free_simplex(rng: random.Random, n: int, bits: int = DEFAULT_BITS) -> list[int]:
    """Uniform point of the unit simplex without reordering."""
    cuts = sorted(rng.getrandbits(bits) for _ in range(n - 1))
    edges = [0, *cuts, 1 << bits]
    return [edges[k + 1] - edges[k] for k in range(n)]


def _region_test(region: str, p: MapParams) -> Callable[[Sequence[int]], bool]:
    a, b = p.a, p.b
    if region == "all":
        return lambda x: True
    if region == "A":
        return lambda x: sum(x) <= b * x[-1]
    if region == "cA":
        return lambda x: sum(x) > b * x[-1]
    if region == "D":
        if b < 2:
            raise UnsupportedRegionError("the set D is only defined for b >= 2")
        return lambda x: sum(x[: a + 1]) <= x[a + 1]
    if region == "Theta":
        return lambda x: sum(x) > b * x[-1] and 2 * x[a - 1] >= x[-1]
    raise ValueError(f"unknown region {region!r}")


def sample_region(
    rng: random.Random,
    p: MapParams,
    region: str = "all",
    base: str = "cube",
    bits: int = DEFAULT_BITS,
) -> list[int]:
    """Rejection sample from ``region`` inside the ordered cube or simplex.

    For ``b == 1`` the set A is the null set {x_1 = ... = x_a = 0}; it is
    sampled directly instead of by rejection.
    """
    draw = ordered_cube if base == "cube" else ordered_simplex
    if region == "A" and p.b == 1:
        top = (1 << bits) if base == "simplex" else rng.getrandbits(bits)
        return [0] * p.a + [top]
    accept = _region_test(region, p)
    for _ in range(MAX_REJECTIONS):
        x = draw(rng, p.n, bits)
        if accept(x):
            return x
    raise RuntimeError(f"rejection sampling of {region} for {p} did not converge")
