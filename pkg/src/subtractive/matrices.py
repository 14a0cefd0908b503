"""Integer matrices of the cylinders and their products."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .exact_core import MapParams, ParameterError, Shuffle, check_shuffle

Rows = tuple[tuple[int, ...], ...]


class MatrixKindError(ValueError):
    """Incompatible matrix families were combined, or a sign condition failed."""


def det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    m = [list(r) for r in rows]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _matmul(x: Rows, y: Rows) -> Rows:
    cols = list(zip(*y))
    return tuple(tuple(sum(u * v for u, v in zip(row, col)) for col in cols) for row in x)


@dataclass(frozen=True)
class TransitionMatrix:
    """A unimodular integer matrix tagged with its family.

    ``family`` is ``"L"`` (forward branches), ``"M"`` (inverse branches) or
    ``None`` for the identity; ``length`` counts elementary factors.  Products
    are only formed within one family.
    """

    entries: Rows
    family: Optional[str]
    length: int = 1

    def __post_init__(self):
        if self.family not in ("L", "M", None):
            raise MatrixKindError(f"unknown matrix family {self.family!r}")
        if self.family == "M" and any(v < 0 for row in self.entries for v in row):
            raise MatrixKindError("inverse-branch matrices must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def kind(self) -> str:
        if self.family is None:
            return "identity"
        if self.length > 1:
            return "product"
        return "forward" if self.family == "L" else "inverse"

    def __matmul__(self, other: "TransitionMatrix") -> "TransitionMatrix":
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        if self.family and other.family and self.family != other.family:
            raise MatrixKindError(f"cannot multiply {self.family}-matrix by {other.family}-matrix")
        return TransitionMatrix(
            _matmul(self.entries, other.entries), self.family or other.family, self.length + other.length
        )

    def apply(self, x: Sequence) -> tuple:
        """Matrix times the column vector ``x``."""
        return tuple(sum(c * v for c, v in zip(row, x)) for row in self.entries)

    def det(self) -> int:
        return det(self.entries)

    def to_json(self) -> dict:
        return {"family": self.family, "length": self.length, "rows": [list(r) for r in self.entries]}


def identity(n: int) -> TransitionMatrix:
    return TransitionMatrix(tuple(tuple(int(r == c) for c in range(n)) for r in range(n)), None, 0)


def forward_matrix(pi: Sequence[int], p: MapParams) -> TransitionMatrix:
    """Matrix of the map on the cylinder of ``pi``.

    Row ``pi(k)`` is ``e_k`` for ``k <= a`` and ``e_k - e_i`` for ``k > a``.
    """
    pi = check_shuffle(pi, p)
    n = p.n
    rows = [None] * n
    for k in range(1, n + 1):
        row = [0] * n
        row[k - 1] = 1
        if k > p.a:
            row[p.i - 1] -= 1
        rows[pi[k - 1] - 1] = tuple(row)
    return TransitionMatrix(tuple(rows), "L")


def inverse_matrix(pi: Sequence[int], p: MapParams) -> TransitionMatrix:
    """Inverse branch onto the cylinder of ``pi``.

    Column ``pi(k)`` is ``e_k`` for ``k != i`` and ``e_i + e_{a+1} + ... + e_{a+b}``
    for ``k == i``.
    """
    pi = check_shuffle(pi, p)
    n = p.n
    cols = [None] * n
    for k in range(1, n + 1):
        col = [0] * n
        col[k - 1] = 1
        if k == p.i:
            for j in range(p.a, n):
                col[j] = 1
        cols[pi[k - 1] - 1] = col
    rows = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
    return TransitionMatrix(rows, "M")


def word_forward(word: Sequence[Shuffle], p: MapParams) -> TransitionMatrix:
    """L_{pi_k} ... L_{pi_1} for the word (pi_1, ..., pi_k)."""
    out = identity(p.n)
    for pi in word:
        out = forward_matrix(pi, p) @ out
    return out


def word_inverse(word: Sequence[Shuffle], p: MapParams) -> TransitionMatrix:
    """M_{pi_1} ... M_{pi_k} for the word (pi_1, ..., pi_k)."""
    out = identity(p.n)
    for pi in word:
        out = out @ inverse_matrix(pi, p)
    return out


def column_sums(m: TransitionMatrix) -> tuple[int, ...]:
    if any(v < 0 for row in m.entries for v in row):
        raise MatrixKindError("column sums are only meaningful for nonnegative matrices")
    return tuple(sum(col) for col in zip(*m.entries))


class ColumnClaims(NamedTuple):
    max_property: bool
    prefix_bound: bool


def check_column_claims(m: TransitionMatrix, p: MapParams) -> ColumnClaims:
    """The two column-sum facts for products of inverse branches.

    ``max_property``: the largest column sum sits in columns a..a+b.
    ``prefix_bound``: c_1 + ... + c_{a-1} <= (a-1)(c_a + ... + c_{a+b}).
    """
    if m.n != p.n:
        raise ParameterError(f"matrix of size {m.n} does not fit {p}")
    c = column_sums(m)
    head, tail = c[: p.a - 1], c[p.a - 1:]
    return ColumnClaims(max(c) == max(tail), sum(head) <= (p.a - 1) * sum(tail))
