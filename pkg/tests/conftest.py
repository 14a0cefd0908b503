from fractions import Fraction

from hypothesis import settings, strategies as st

from subtractive import MapParams

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

SMALL_PARAMS = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (1, 3), (3, 2)]


@st.composite
def params(draw, grid=SMALL_PARAMS, min_b=1):
    a, b = draw(st.sampled_from([g for g in grid if g[1] >= min_b]))
    return MapParams(a, b)


rationals = st.fractions(min_value=0, max_value=100, max_denominator=1000)


@st.composite
def ordered_points(draw, n):
    return tuple(sorted(draw(st.lists(rationals, min_size=n, max_size=n))))


@st.composite
def params_and_point(draw, grid=SMALL_PARAMS, min_b=1):
    p = draw(params(grid, min_b))
    return p, draw(ordered_points(p.n))


def F(*xs):
    return tuple(Fraction(x) for x in xs)


# --- acceptance bookkeeping ---------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


class criterion:
    """Record PASS/FAIL for one acceptance criterion; failures still propagate."""

    def __init__(self, number: int, title: str):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        import time

        self._t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time

        took = f"{time.perf_counter() - self._t0:.1f}s"
        status = "PASS" if exc_type is None else "FAIL"
        detail = self.detail if exc_type is None else f"{exc_type.__name__}: {exc}".splitlines()[0][:160]
        ACCEPTANCE[self.number] = (status, self.title, f"{detail} [{took}]".strip())
        line = f"criterion {self.number:2d} {status}: {self.title} - {ACCEPTANCE[self.number][2]}"
        print(line)
        return False


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}: {title} - {detail}")
