"""Simplicial cones in the positive octant of R^3 and the complement tree.

A cone is spanned by three nonnegative integer vectors.  Areas are reported
as fractions of the area of the unit simplex, so they are exact rationals:
``|det| / (|f1|_1 |f2|_1 |f3|_1)``.

The tree is grown from the cylinder decomposition: at depth k the octant is
cut into 3^k cones by repeated :func:`subdivide`, and inside each of them the
points not yet absorbed form the :func:`middle_cone`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_core import PreconditionError

Vec = tuple[int, int, int]

MAX_DEPTH = 12
E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


class ResourceLimitError(RuntimeError):
    pass


def _add(*vs: Vec) -> Vec:
    return tuple(sum(c) for c in zip(*vs))


def _det3(f1: Sequence, f2: Sequence, f3: Sequence):
    # columns f1, f2, f3
    return (
        f1[0] * (f2[1] * f3[2] - f3[1] * f2[2])
        - f2[0] * (f1[1] * f3[2] - f3[1] * f1[2])
        + f3[0] * (f1[1] * f2[2] - f2[1] * f1[2])
    )


def l1(v: Sequence) -> int:
    return sum(v)


@dataclass(frozen=True)
class ConeBasis:
    vectors: tuple[Vec, Vec, Vec]
    depth: int = 0

    def __post_init__(self):
        vs = tuple(tuple(int(c) for c in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vs)
        if len(vs) != 3 or any(len(v) != 3 for v in vs):
            raise PreconditionError("a cone basis is three vectors of R^3")
        if any(c < 0 for v in vs for c in v) or any(not any(v) for v in vs):
            raise PreconditionError(f"basis vectors must be nonnegative and nonzero: {vs}")
        if _det3(*vs) == 0:
            raise PreconditionError(f"basis vectors are linearly dependent: {vs}")

    @property
    def det(self) -> int:
        return abs(_det3(*self.vectors))

    @property
    def norms(self) -> tuple[int, int, int]:
        return tuple(l1(v) for v in self.vectors)

    def mutual_ratio(self) -> Fraction:
        """Largest ratio between two of the l1 norms of the basis vectors."""
        ns = self.norms
        return Fraction(max(ns), min(ns))

    def key(self) -> frozenset:
        return frozenset(self.vectors)

    def barycentric(self, x: Sequence) -> tuple[Fraction, Fraction, Fraction]:
        """Coordinates of ``x`` in this basis (exact Cramer's rule)."""
        f1, f2, f3 = self.vectors
        d = Fraction(_det3(f1, f2, f3))
        return (_det3(x, f2, f3) / d, _det3(f1, x, f3) / d, _det3(f1, f2, x) / d)

    def contains(self, x: Sequence) -> bool:
        return all(c >= 0 for c in self.barycentric(x))

    def to_json(self) -> dict:
        return {"depth": self.depth, "vectors": [list(v) for v in self.vectors]}


ROOT = ConeBasis((E1, E2, E3), 0)


def subdivide(c: ConeBasis) -> tuple[ConeBasis, ConeBasis, ConeBasis]:
    """Split a cone by the sum of its generators into three cones of equal determinant."""
    f1, f2, f3 = c.vectors
    s = _add(f1, f2, f3)
    d = c.depth + 1
    return (ConeBasis((s, f1, f2), d), ConeBasis((s, f2, f3), d), ConeBasis((s, f1, f3), d))


def middle_cone(c: ConeBasis) -> ConeBasis:
    f1, f2, f3 = c.vectors
    return ConeBasis((_add(f1, f2), _add(f2, f3), _add(f1, f3)), c.depth)


def corner_cones(c: ConeBasis) -> tuple[ConeBasis, ConeBasis, ConeBasis]:
    """The three cones of ``c`` outside its middle cone (``A`` relative to the basis)."""
    f1, f2, f3 = c.vectors
    d = c.depth + 1
    return (
        ConeBasis((f1, _add(f1, f2), _add(f1, f3)), d),
        ConeBasis((f2, _add(f1, f2), _add(f2, f3)), d),
        ConeBasis((f3, _add(f1, f3), _add(f2, f3)), d),
    )


def normalized_area(c: ConeBasis) -> Fraction:
    n1, n2, n3 = c.norms
    return Fraction(c.det, n1 * n2 * n3)


def triangle_vertices(c: ConeBasis) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x, l1(v)) for x in v) for v in c.vectors)


def absorbed_ratio(c: ConeBasis) -> Fraction:
    """Share of the triangle of ``c`` taken by its middle cone."""
    return normalized_area(middle_cone(c)) / normalized_area(c)


def decay_bound(k: int) -> Fraction:
    """(1/4) * prod_{j<k} (1 - 1/(2(j+2))), the bound on the depth-k complement area."""
    out = Fraction(1, 4)
    for j in range(k):
        out *= 1 - Fraction(1, 2 * (j + 2))
    return out


@dataclass
class Level:
    depth: int
    cylinders: list[ConeBasis]
    complements: list[ConeBasis]
    parents: list[int]
    complement_area: Fraction
    absorbed_area: Fraction  # taken by the middle cones of this level's complements


@dataclass
class SubdivisionTree:
    depth: int
    levels: list[Level] = field(default_factory=list)

    # A itself: three corner cones of the full simplex.
    @property
    def base_absorbed(self) -> list[ConeBasis]:
        return list(corner_cones(ROOT))

    def areas(self) -> list[Fraction]:
        return [lv.complement_area for lv in self.levels]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "levels": [
                {
                    "depth": lv.depth,
                    "complement_area": lv.complement_area,
                    "cones": [
                        {"parent": par, "cylinder": cyl.to_json()["vectors"], "complement": com.to_json()["vectors"]}
                        for cyl, com, par in zip(lv.cylinders, lv.complements, lv.parents)
                    ],
                }
                for lv in self.levels
            ],
        }


def complement_recursion(depth: int) -> SubdivisionTree:
    """Build the complement cones of the preimages of A, depth 0..``depth``."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_DEPTH:
        raise ResourceLimitError(f"depth {depth} needs 3^{depth} cones; the limit is depth {MAX_DEPTH}")
    tree = SubdivisionTree(depth)
    cylinders, parents = [ROOT], [-1]
    for k in range(depth + 1):
        if k:
            parents = [idx for idx in range(len(cylinders)) for _ in range(3)]
            cylinders = [child for cyl in cylinders for child in subdivide(cyl)]
        complements = [middle_cone(c) for c in cylinders]
        area = sum((normalized_area(c) for c in complements), Fraction(0))
        absorbed = sum((normalized_area(middle_cone(c)) for c in complements), Fraction(0))
        tree.levels.append(Level(k, cylinders, complements, parents, area, absorbed))
    return tree


def corner_recursion(depth: int) -> list[list[ConeBasis]]:
    """Independent construction of the complement cones by corner splitting."""
    levels = [[middle_cone(ROOT)]]
    for _ in range(depth):
        levels.append([child for c in levels[-1] for child in corner_cones(c)])
    return levels


class TreeCheck(dict):
    @property
    def ok(self) -> bool:
        return all(v for k, v in self.items() if k.endswith("_ok"))


def verify_tree(tree: SubdivisionTree) -> TreeCheck:
    """Exact checks of the counting, ratio, decay and partition statements."""
    out = TreeCheck()
    out["count_ok"] = all(len(lv.complements) == 3 ** lv.depth for lv in tree.levels)
    out["mutual_ratio_ok"] = all(
        c.mutual_ratio() <= lv.depth + 1 for lv in tree.levels for c in lv.complements
    )
    out["absorbed_ratio_ok"] = all(
        absorbed_ratio(c) >= Fraction(1, 2 * (lv.depth + 2)) for lv in tree.levels for c in lv.complements
    )
    out["decay_ok"] = all(lv.complement_area <= decay_bound(lv.depth) for lv in tree.levels)
    out["strict_decrease_ok"] = all(
        u.complement_area > v.complement_area for u, v in zip(tree.levels, tree.levels[1:])
    )
    base = sum((normalized_area(c) for c in tree.base_absorbed), Fraction(0))
    partition = []
    absorbed_so_far = base
    for lv in tree.levels:
        partition.append(absorbed_so_far + lv.complement_area == 1)
        absorbed_so_far += lv.absorbed_area
    out["partition_ok"] = all(partition)
    out["min_absorbed_ratio"] = [min(absorbed_ratio(c) for c in lv.complements) for lv in tree.levels]
    return out
