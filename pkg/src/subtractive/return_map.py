"""First returns to Theta conditioned on Gamma, cylinder codes, projected branches.

``Theta`` is the part of the complement of A with ``2 x_a >= x_{a+b}``;
``Gamma`` the points of the complement of A mapped into A in one step.  The
return map fixes Gamma and otherwise follows the orbit until it is back in
Theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exact_core import (
    DegenerateInputError,
    MapParams,
    PreconditionError,
    Shuffle,
    in_A,
    in_Gamma,
    in_Theta,
    sigma,
    subtractive_step,
)
from .matrices import TransitionMatrix, column_sums, forward_matrix, identity
from .sampling import DEFAULT_BITS, derive_rng, ordered_simplex

DEFAULT_BLOCK_CAP = 10**5


@dataclass
class ReturnRecord:
    """One block of the return map.

    ``status`` is ``"returned"`` (back in Theta after ``k`` steps),
    ``"gamma"`` (start in Gamma, fixed, k = 0), ``"absorbed"`` (entered A
    before returning, should not happen) or ``"cap"``.
    """

    start: tuple
    end: tuple
    k: int
    word: list[Shuffle]
    matrix: TransitionMatrix
    status: str

    def to_json(self) -> dict:
        return {
            "start": list(self.start),
            "end": list(self.end),
            "return_time": self.k,
            "word": [list(pi) for pi in self.word],
            "matrix": self.matrix.to_json(),
            "status": self.status,
        }


def first_return(x: Sequence, p: MapParams, cap: int = DEFAULT_BLOCK_CAP) -> ReturnRecord:
    x = tuple(x)
    if not in_Theta(x, p):
        raise PreconditionError(f"{x} is not in Theta for {p}")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if in_Gamma(x, p):
        return ReturnRecord(x, x, 0, [], identity(p.n), "gamma")
    word: list[Shuffle] = []
    mat = identity(p.n)
    y = x
    status = "cap"
    for _ in range(cap):
        y, pi = subtractive_step(y, p)
        word.append(pi)
        mat = forward_matrix(pi, p) @ mat
        if in_A(y, p):
            status = "absorbed"
            break
        if in_Theta(y, p):
            status = "returned"
            break
    return ReturnRecord(x, y, len(word), word, mat, status)


@dataclass
class CylinderCode:
    blocks: list[list[Shuffle]] = field(default_factory=list)
    matrix: Optional[TransitionMatrix] = None
    end: tuple = ()
    absorbed_at: Optional[int] = None  # number of completed blocks when Gamma was entered
    cap_exceeded: bool = False

    @property
    def complete(self) -> bool:
        return self.absorbed_at is None and not self.cap_exceeded

    def word(self) -> list[Shuffle]:
        return [pi for blk in self.blocks for pi in blk]


def code_orbit(x: Sequence, p: MapParams, n_returns: int, cap: int = DEFAULT_BLOCK_CAP) -> CylinderCode:
    """Concatenate up to ``n_returns`` return blocks starting from ``x`` in Theta."""
    code = CylinderCode(matrix=identity(p.n), end=tuple(x))
    y = tuple(x)
    for done in range(n_returns):
        rec = first_return(y, p, cap)
        if rec.status == "gamma":
            code.absorbed_at = done
            break
        if rec.status != "returned":
            code.blocks.append(rec.word)
            code.cap_exceeded = rec.status == "cap"
            code.absorbed_at = done if rec.status == "absorbed" else None
            code.matrix = rec.matrix @ code.matrix
            code.end = rec.end
            break
        code.blocks.append(rec.word)
        code.matrix = rec.matrix @ code.matrix
        y = code.end = rec.end
    return code


# ---------------------------------------------------------------------------
# Projected branches and their Jacobians
# ---------------------------------------------------------------------------

def projected_step(x: Sequence, m: TransitionMatrix) -> tuple:
    """Projective action ``m x / sigma(m x)``."""
    y = m.apply(x)
    s = sigma(y)
    if s == 0:
        raise DegenerateInputError("image has zero coordinate sum")
    return tuple(Fraction(v) / s for v in y)


def jacobian_shape(m: TransitionMatrix, x: Sequence) -> Fraction:
    """``1 / (c . x)^n`` with ``c`` the column sums of ``m``; the Jacobian up to a constant."""
    c = column_sums(m)
    cx = sum(ci * Fraction(xi) for ci, xi in zip(c, x))
    assert cx > 0, "c.x must be positive on the simplex"
    return 1 / cx ** len(c)


def numeric_jacobian_det(m: TransitionMatrix, x: Sequence, h: Fraction = Fraction(1, 2**60)) -> float:
    """Central-difference Jacobian determinant of the projected branch on the simplex.

    The simplex is charted by its first n-1 coordinates.  Differences are
    taken in exact arithmetic (so no cancellation), then the matrix goes to
    floats for the determinant.
    """
    n = len(x)
    x = [Fraction(v) for v in x]

    def chart_map(u):
        full = [*u, 1 - sum(u)]
        return projected_step(full, m)[:-1]

    u0 = x[:-1]
    jac = np.empty((n - 1, n - 1))
    for j in range(n - 1):
        up = list(u0)
        dn = list(u0)
        up[j] += h
        dn[j] -= h
        fu, fd = chart_map(up), chart_map(dn)
        for r in range(n - 1):
            jac[r, j] = float((fu[r] - fd[r]) / (2 * h))
    return float(np.linalg.det(jac))


def distortion_constant(p: MapParams) -> int:
    return (2 * p.a * p.n) ** p.n


# ---------------------------------------------------------------------------
# Monte Carlo measures of the projected Theta and Gamma
# ---------------------------------------------------------------------------

def wilson_interval(hits: int, n: int, z: float = 2.5758) -> tuple[float, float]:
    """Wilson score interval (default 99%)."""
    if n == 0:
        return (0.0, 1.0)
    phat = hits / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


@dataclass
class AlphaEstimate:
    params: MapParams
    n_samples: int
    theta_hits: int
    gamma_hits: int
    bits: int

    @property
    def leb_theta(self) -> float:
        return self.theta_hits / self.n_samples

    @property
    def leb_gamma(self) -> float:
        return self.gamma_hits / self.n_samples

    @property
    def inconclusive(self) -> bool:
        return self.theta_hits == 0

    @property
    def gamma_share(self) -> float:
        return self.gamma_hits / self.theta_hits if self.theta_hits else float("nan")

    @property
    def alpha_lower(self) -> float:
        return self.gamma_share / distortion_constant(self.params)

    def gamma_share_interval(self) -> tuple[float, float]:
        return wilson_interval(self.gamma_hits, self.theta_hits)

    def alpha_interval(self) -> tuple[float, float]:
        lo, hi = self.gamma_share_interval()
        k = distortion_constant(self.params)
        return (lo / k, hi / k)

    def to_json(self) -> dict:
        return {
            "a": self.params.a,
            "b": self.params.b,
            "n_samples": self.n_samples,
            "theta_hits": self.theta_hits,
            "gamma_hits": self.gamma_hits,
            "leb_theta": self.leb_theta,
            "leb_theta_ci99": list(wilson_interval(self.theta_hits, self.n_samples)),
            "leb_gamma": self.leb_gamma,
            "leb_gamma_ci99": list(wilson_interval(self.gamma_hits, self.n_samples)),
            "alpha_lower": None if self.inconclusive else self.alpha_lower,
            "alpha_lower_ci99": None if self.inconclusive else list(self.alpha_interval()),
            "inconclusive": self.inconclusive,
        }


def alpha_estimate(p: MapParams, n_samples: int, seed: int, bits: int = DEFAULT_BITS) -> AlphaEstimate:
    """Fractions of the ordered simplex lying in Theta and in Gamma.

    Both measures are relative to the ordered simplex, which cancels in the
    ratio entering the bound.
    """
    if n_samples < 1000:
        raise ValueError("alpha_estimate needs at least 1000 samples")
    rng = derive_rng(seed, 0xA1FA)
    a, b = p.a, p.b
    theta = gamma = 0
    for _ in range(n_samples):
        x = ordered_simplex(rng, p.n, bits)
        total = sum(x)
        if total > b * x[-1] and 2 * x[a - 1] >= x[-1]:
            theta += 1
            s = x[p.i - 1]
            y_last = max(x[a - 1], x[-1] - s)
            if total - b * s <= b * y_last:
                gamma += 1
    return AlphaEstimate(p, n_samples, theta, gamma, bits)
