"""Orbits, limits and the Monte Carlo experiments.

Orbit iteration scales the starting point to integer numerators over a
common denominator and runs on Python ints: homogeneity makes this exact,
and it is far faster than ``Fraction`` arithmetic.  The telescoping identity
for the coordinate sum is asserted at every step.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import NamedTuple, Optional, Sequence

from .exact_core import (
    InvariantViolation,
    MapParams,
    ParameterError,
    PreconditionError,
    DegenerateInputError,
    common_denominator,
    in_D,
    ordered_point,
    s_map_step,
    step,
)
from .sampling import DEFAULT_BITS, derive_rng, ordered_cube, sample_region

DEFAULT_EPS = Fraction(1, 2**40)
DEFAULT_CAP = 10**5
CHUNK = 1000

STOP_REASONS = ("entered_A", "entered_D", "tail_below_eps", "vanished", "fixed", "cap")


@dataclass
class OrbitSummary:
    start: tuple
    params: MapParams
    steps_taken: int
    stop_reason: str
    first_hit_A: Optional[int]
    first_hit_D: Optional[int]
    final: tuple
    limit_estimate: tuple
    partial_sum_xa: Fraction
    trace: Optional[list] = None

    def to_json(self) -> dict:
        return {
            "start": list(self.start),
            "a": self.params.a,
            "b": self.params.b,
            "i": self.params.i,
            "steps_taken": self.steps_taken,
            "stop_reason": self.stop_reason,
            "first_hit_A": self.first_hit_A,
            "first_hit_D": self.first_hit_D,
            "final": list(self.final),
            "limit_estimate": list(self.limit_estimate),
            "partial_sum_xa": self.partial_sum_xa,
        }


class _Run(NamedTuple):
    x: list
    steps: int
    reason: str
    hit_a: Optional[int]
    hit_d: Optional[int]
    psum: int
    trace: Optional[list]


def _run(
    x: list,
    p: MapParams,
    cap: int,
    eps: Optional[Fraction] = DEFAULT_EPS,
    stop_on: Optional[str] = None,
    trace: bool = False,
    strict: bool = False,
    vanish: Optional[Fraction] = None,
) -> _Run:
    """Iterate on integer coordinates.  See :func:`iterate` for the stop rules.

    ``vanish`` additionally stops (reason "vanished") once the largest
    coordinate drops below ``vanish`` times its starting value.
    """
    a, b, i = p.a, p.b, p.i
    track_d = b >= 2
    sig0 = sum(x)
    sig = sig0
    psum = 0
    hit_a = hit_d = None
    if eps is not None:
        eps_num, eps_den = eps.numerator * x[-1], eps.denominator
    if vanish is not None:
        van_num, van_den = vanish.numerator * x[-1], vanish.denominator
    points = [tuple(x)] if trace else None
    k = 0
    while True:
        if hit_a is None and sig <= b * x[-1]:
            hit_a = k
        if track_d and hit_d is None and sum(x[: a + 1]) <= x[a + 1]:
            hit_d = k
        if stop_on == "A" and hit_a is not None:
            reason = "entered_A"
            break
        if stop_on == "D" and hit_d is not None:
            reason = "entered_D"
            break
        if eps is not None and x[a] * eps_den < eps_num:
            reason = "tail_below_eps"
            break
        if vanish is not None and x[-1] * van_den < van_num:
            reason = "vanished"
            break
        s = x[i - 1]
        if s == 0:
            reason = "fixed"
            break
        if k >= cap:
            reason = "cap"
            break
        y = sorted([*x[:a], *(v - s for v in x[a:])])
        psum += s
        sig = sig0 - b * psum
        if sum(y) != sig:
            raise InvariantViolation(f"telescoping sum broken at step {k + 1} of {p} orbit")
        if strict:
            _strict_checks(x, y, p, hit_d is not None)
        x = y
        k += 1
        if trace:
            points.append(tuple(x))
    return _Run(x, k, reason, hit_a, hit_d, psum, points)


def _strict_checks(x: list, y: list, p: MapParams, x_in_d: bool) -> None:
    if any(v > u for u, v in zip(x, y)):
        raise InvariantViolation(f"sorted coordinates increased: {x} -> {y}")
    if x_in_d and not p.is_variant:
        a = p.a
        head = sorted([*x[:a], x[a] - x[a - 1]])
        tail = [v - x[a - 1] for v in x[a + 1:]]
        if y != head + tail:
            raise InvariantViolation(f"orbit in D does not split into Brun part and shifted tail: {x} -> {y}")


def iterate(
    x: Sequence,
    p: MapParams,
    eps: Optional[Fraction] = DEFAULT_EPS,
    cap: int = DEFAULT_CAP,
    stop_on: Optional[str] = None,
    trace: bool = False,
    strict: bool = False,
) -> OrbitSummary:
    """Run an orbit and summarise it.

    Stops, in this order of precedence, when the orbit enters the set named
    by ``stop_on`` ("A" or "D"), when ``x_{a+1} < eps * x_{a+b}`` of the
    starting point (skipped if ``eps`` is None), when the subtracted
    coordinate is zero (the map is then the identity), or after ``cap``
    steps.
    """
    x = ordered_point(x)
    if len(x) != p.n:
        raise ParameterError(f"point of dimension {len(x)} does not fit {p}")
    if eps is not None and eps <= 0:
        raise ValueError("eps must be positive")
    ints, den = common_denominator(x)
    run = _run(ints, p, cap, eps, stop_on, trace, strict)
    return _summary(x, p, run, den)


def _summary(start: tuple, p: MapParams, run: _Run, den: int) -> OrbitSummary:
    final = tuple(Fraction(v, den) for v in run.x)
    if run.reason == "tail_below_eps":
        limit = (Fraction(0),) * (p.a + 1) + final[p.a + 1:]
    else:
        limit = final
    trace = [tuple(Fraction(v, den) for v in pt) for pt in run.trace] if run.trace is not None else None
    return OrbitSummary(
        start, p, run.steps, run.reason, run.hit_a, run.hit_d, final, limit, Fraction(run.psum, den), trace
    )


def limit_closed_form_D(x: Sequence, p: MapParams) -> tuple:
    """Limit of an orbit starting in D, assuming its first a+1 coordinates vanish in the limit."""
    if p.is_variant:
        raise ParameterError("the closed form holds for the maps T_{a,b}, not the variants")
    if p.b < 2 or not in_D(x, p):
        raise PreconditionError(f"{tuple(x)} is not in D for {p}")
    s = sum(x[: p.a + 1])
    return (0,) * (p.a + 1) + tuple(v - s for v in x[p.a + 1:])


def invariant_function(z: Sequence, p: MapParams) -> Fraction:
    """Limit of the last coordinate of the projected orbit, for ``z`` in (projected) D."""
    if len(z) != p.n - 1:
        raise ParameterError(f"B-point of dimension {len(z)} does not fit {p}")
    if p.b < 2 or not in_D((*z, 1), p):
        raise PreconditionError(f"{tuple(z)} is not in D for {p}")
    s = sum(z[: p.a + 1])
    if s == 1:
        raise DegenerateInputError("invariant function undefined where z_1 + ... + z_{a+1} = 1")
    return Fraction(z[-1] - s) / (1 - s)


# ---------------------------------------------------------------------------
# Conjugacy between the Euclid map and the projected T_{1,2}
# ---------------------------------------------------------------------------

EUCLID = MapParams(1, 1)
T12 = MapParams(1, 2)


def phi(x: Sequence) -> tuple:
    d = 1 + x[0] + x[1]
    return (Fraction(x[0]) / d, Fraction(x[1]) / d)


class ConjugacyCheck(NamedTuple):
    ok: bool
    steps_verified: int


def conjugacy_check(x: Sequence, n_steps: int) -> ConjugacyCheck:
    """Compare phi(T_{1,1}^k x) with S_{1,2}^k(phi x) for k = 1..n_steps.

    Stops early (still ``ok``) once the first coordinate is zero, where both
    maps are the identity.
    """
    xs = ordered_point(x)
    if len(xs) != 2 or sum(xs) == 0:
        raise PreconditionError(f"need a nonzero point of the ordered quadrant, got {xs}")
    z = phi(xs)
    for k in range(1, n_steps + 1):
        if xs[0] == 0:
            return ConjugacyCheck(True, k - 1)
        xs = step(xs, EUCLID)
        z = s_map_step(z, T12)
        if phi(xs) != z:
            return ConjugacyCheck(False, k - 1)
    return ConjugacyCheck(True, n_steps)


def random_rational_pair(rng, max_den: int = 2**32, max_num: int = 2**32) -> tuple:
    u = Fraction(rng.randrange(1, max_num), rng.randrange(1, max_den))
    v = Fraction(rng.randrange(1, max_num), rng.randrange(1, max_den))
    return (min(u, v), max(u, v))


@dataclass
class ConjugacySweep:
    n_points: int
    n_steps: int
    seed: int
    failures: list = field(default_factory=list)
    steps_verified: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_steps": self.n_steps,
            "seed": self.seed,
            "steps_verified": self.steps_verified,
            "failures": [list(f) for f in self.failures],
            "all_pass": self.ok,
        }


def conjugacy_sweep(n_points: int, n_steps: int, seed: int) -> ConjugacySweep:
    rng = derive_rng(seed, 0xC0)
    out = ConjugacySweep(n_points, n_steps, seed)
    for _ in range(n_points):
        x = random_rational_pair(rng)
        res = conjugacy_check(x, n_steps)
        out.steps_verified += res.steps_verified
        if not res.ok:
            out.failures.append(x)
    return out


# ---------------------------------------------------------------------------
# Absorption into A and D
# ---------------------------------------------------------------------------

class SampleOutcome(NamedTuple):
    first_hit_A: Optional[int]
    first_hit_D: Optional[int]
    limit: Optional[tuple]  # exact limit on the unit simplex scale, from the D-entry point


def _absorb_one(x: list, p: MapParams, cap: int, bits: int) -> SampleOutcome:
    run = _run(x, p, cap, eps=None, stop_on="A")
    if run.hit_a is None:
        return SampleOutcome(None, None, None)
    hit_a = run.hit_a
    if p.b == 2:
        hit_d, entry = hit_a, run.x
    else:
        run_d = _run(run.x, p, cap, eps=None, stop_on="D")
        if run_d.hit_d is None:
            return SampleOutcome(hit_a, None, None)
        hit_d, entry = hit_a + run_d.hit_d, run_d.x
    den = 1 << bits
    lim = tuple(Fraction(v, den) for v in limit_closed_form_D(entry, p))
    return SampleOutcome(hit_a, hit_d, lim)


def _absorb_chunk(args) -> list[SampleOutcome]:
    p, region, count, cap, seed, chunk, bits = args
    rng = derive_rng(seed, chunk)
    return [_absorb_one(sample_region(rng, p, region, "simplex", bits), p, cap, bits) for _ in range(count)]


def _chunks(n_samples: int):
    for c, start in enumerate(range(0, n_samples, CHUNK)):
        yield c, min(CHUNK, n_samples - start)


def _fan_out(fn, tasks: list, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(fn, tasks))
    else:
        results = [fn(t) for t in tasks]
    return [r for chunk in results for r in chunk]


@dataclass
class AbsorptionReport:
    params: MapParams
    region: str
    cap: int
    seed: int
    bits: int
    outcomes: list[SampleOutcome]

    @property
    def n_samples(self) -> int:
        return len(self.outcomes)

    def absorbed_fraction(self, cap: Optional[int] = None) -> float:
        cap = self.cap if cap is None else min(cap, self.cap)
        hits = sum(1 for o in self.outcomes if o.first_hit_A is not None and o.first_hit_A <= cap)
        return hits / self.n_samples

    @property
    def n_absorbed(self) -> int:
        return sum(1 for o in self.outcomes if o.first_hit_A is not None)

    @property
    def n_unabsorbed(self) -> int:
        return self.n_samples - self.n_absorbed

    @property
    def n_entered_D(self) -> int:
        return sum(1 for o in self.outcomes if o.first_hit_D is not None)

    @property
    def all_absorbed_enter_D(self) -> bool:
        return all(o.first_hit_D is not None for o in self.outcomes if o.first_hit_A is not None)

    def histogram(self) -> list[tuple[int, int]]:
        counts = Counter(o.first_hit_A for o in self.outcomes if o.first_hit_A is not None)
        return sorted(counts.items())

    def d_histogram(self) -> list[tuple[int, int]]:
        counts = Counter(o.first_hit_D for o in self.outcomes if o.first_hit_D is not None)
        return sorted(counts.items())

    def smallest_tail_limits(self) -> list[Fraction]:
        """Empirical x_{a+2} limits (unit-simplex scale), sorted."""
        return sorted(o.limit[self.params.a + 1] for o in self.outcomes if o.limit is not None)

    def to_json(self) -> dict:
        hits = [o.first_hit_A for o in self.outcomes if o.first_hit_A is not None]
        lims = self.smallest_tail_limits()
        q = lambda f: lims[min(len(lims) - 1, int(f * len(lims)))] if lims else None  # noqa: E731
        return {
            "a": self.params.a,
            "b": self.params.b,
            "region": self.region,
            "n_samples": self.n_samples,
            "cap": self.cap,
            "seed": self.seed,
            "bits": self.bits,
            "n_absorbed": self.n_absorbed,
            "n_unabsorbed_at_cap": self.n_unabsorbed,
            "absorbed_fraction": self.absorbed_fraction(),
            "max_first_hit_A": max(hits) if hits else None,
            "n_entered_D": self.n_entered_D,
            "all_absorbed_enter_D": self.all_absorbed_enter_D,
            "first_hit_D_histogram": [list(r) for r in self.d_histogram()],
            "limit_x_a2": {"min": q(0.0), "q01": q(0.01), "median": q(0.5), "max": lims[-1] if lims else None},
        }


def absorption_experiment(
    p: MapParams,
    region: str = "cA",
    n_samples: int = 10_000,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    bits: int = DEFAULT_BITS,
    workers: int = 1,
) -> AbsorptionReport:
    """First hitting times of A (and then D) for samples on the unit simplex.

    Sample ``j`` depends only on ``(seed, j)``, so a run with fewer samples
    is a prefix of a longer one and results do not depend on ``workers``.
    """
    if p.b < 2:
        raise ParameterError("absorption into A and D needs b >= 2")
    if region not in ("cA", "all"):
        raise ValueError(f"region must be 'cA' or 'all', got {region!r}")
    tasks = [(p, region, count, cap, seed, c, bits) for c, count in _chunks(n_samples)]
    return AbsorptionReport(p, region, cap, seed, bits, _fan_out(_absorb_chunk, tasks, workers))


# ---------------------------------------------------------------------------
# Brun (b = 1)
# ---------------------------------------------------------------------------

@dataclass
class BrunReport:
    a: int
    n_samples: int
    eps: Fraction
    cap: int
    converged: int
    steps: list
    gcd_checks: int
    gcd_failures: list

    @property
    def converged_fraction(self) -> float:
        return self.converged / self.n_samples

    def to_json(self) -> dict:
        st = sorted(self.steps)
        return {
            "a": self.a,
            "n_samples": self.n_samples,
            "eps": self.eps,
            "cap": self.cap,
            "converged_fraction": self.converged_fraction,
            "median_steps": st[len(st) // 2] if st else None,
            "max_steps": st[-1] if st else None,
            "gcd_checks": self.gcd_checks,
            "gcd_failures": self.gcd_failures,
        }


def brun_experiment(
    a: int,
    n_samples: int = 1000,
    eps: Fraction = Fraction(1, 2**20),
    cap: int = 10**6,
    seed: int = 0,
    bits: int = DEFAULT_BITS,
    gcd_samples: int = 200,
) -> BrunReport:
    """Orbits of the Brun map shrink to the origin; integer orbits end at (0,...,0,gcd).

    The coordinate-sum identity is asserted along every orbit by the iterator.
    """
    p = MapParams(a, 1)
    rng = derive_rng(seed, 0xB5)
    converged = 0
    steps = []
    for _ in range(n_samples):
        x = ordered_cube(rng, p.n, bits)
        run = _run(x, p, cap, eps=eps)
        if run.reason == "tail_below_eps":
            converged += 1
        steps.append(run.steps)
    failures = []
    for _ in range(gcd_samples):
        x = sorted(rng.randrange(1, 10**6) for _ in range(p.n))
        run = _run(list(x), p, 10**8, eps=None)
        g = 0
        for v in x:
            g = gcd(g, v)
        if run.x != [0] * a + [g]:
            failures.append(x)
    return BrunReport(a, n_samples, eps, cap, converged, steps, gcd_samples, failures)


# ---------------------------------------------------------------------------
# Variants subtracting x_i, i < a
# ---------------------------------------------------------------------------

@dataclass
class VariantReport:
    params: MapParams
    n_samples: int
    forward_failures: int
    reverse_checked: bool
    reverse_failures: int
    absorbing_regime: bool
    orbit_samples: int
    orbit_hit_A: int
    orbit_vanishing: int
    orbit_undecided: int

    @property
    def ok(self) -> bool:
        return self.forward_failures == 0 and self.reverse_failures == 0

    def to_json(self) -> dict:
        p = self.params
        return {
            "a": p.a,
            "b": p.b,
            "i": p.i,
            "n_samples": self.n_samples,
            "forward_invariance_failures": self.forward_failures,
            "reverse_invariance_checked": self.reverse_checked,
            "reverse_invariance_failures": self.reverse_failures,
            "absorbing_regime": self.absorbing_regime,
            "orbit_samples": self.orbit_samples,
            "orbit_hit_A": self.orbit_hit_A,
            "orbit_vanishing": self.orbit_vanishing,
            "orbit_undecided": self.orbit_undecided,
            "checks_pass": self.ok,
        }


def variant_experiment(
    p: MapParams,
    n_samples: int = 10_000,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    bits: int = DEFAULT_BITS,
    orbit_samples: int = 1000,
    vanish_eps: Fraction = Fraction(1, 2**20),
) -> VariantReport:
    """Invariance of A under a variant map, plus orbit statistics.

    Orbits are classified as hitting A, vanishing (largest coordinate below
    ``vanish_eps`` of its start without hitting A) or undecided at ``cap``.
    """
    if not p.is_variant or p.a < 2:
        raise ParameterError(f"variant experiments need a >= 2 and 1 <= i <= a-1, got {p}")
    a, b, i = p.a, p.b, p.i
    rng = derive_rng(seed, 0x8A)
    fwd = 0
    for _ in range(n_samples):
        x = sample_region(rng, p, "A", "cube", bits)
        y = step(x, p)
        if sum(y) > b * y[-1]:
            fwd += 1
    reverse_checked = b <= a + 1 - i
    rev = 0
    if reverse_checked:
        for _ in range(n_samples):
            x = sample_region(rng, p, "cA", "cube", bits)
            y = step(x, p)
            if sum(y) <= b * y[-1]:
                rev += 1
    hit = vanish = undecided = 0
    for _ in range(orbit_samples):
        x = sample_region(rng, p, "all", "simplex", bits)
        run = _run(x, p, cap, eps=None, stop_on="A", vanish=vanish_eps)
        if run.hit_a is not None:
            hit += 1
        elif run.reason in ("vanished", "fixed"):
            vanish += 1
        else:
            undecided += 1
    return VariantReport(p, n_samples, fwd, reverse_checked, rev, b >= a + 3 - i, orbit_samples, hit, vanish, undecided)
