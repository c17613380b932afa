"""Built-in arrangements and two standalone numeric checkers.

Builtins are addressed by name, optionally with integer arguments:
``triangle``, ``generic_lines(5)``, ``dual_hesse_conic``,
``tangent_quad(3)``, ``elliptic_triangle``, ``frobenius_triangle(2, 3)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .arrangement import ArrangementSpec, ContactPoint, FiberData, frobenius_pullback, require_valid

__all__ = [
    "BUILTIN_NAMES",
    "builtin",
    "triangle",
    "generic_lines",
    "dual_hesse_conic",
    "dual_hesse_table_choices",
    "tangent_quad",
    "elliptic_triangle",
    "frobenius_triangle",
    "HeightInput",
    "HeightResult",
    "height_check",
    "IncidenceStructure",
    "DeBruijnErdos",
    "de_bruijn_erdos",
    "fano_plane",
    "near_pencil",
    "generic_incidence",
]


def triangle() -> ArrangementSpec:
    """Three general lines seen from a point off them: (P^1, O(1), 3)."""
    fibers = tuple(FiberData.of(ContactPoint.ordinary(pair)) for pair in ((1, 2), (1, 3), (2, 3)))
    return ArrangementSpec(genus=0, degree=1, num_sections=3, fibers=fibers, label="triangle")


def generic_lines(d: int) -> ArrangementSpec:
    """d lines in general position; one node per fiber, C(d, 2) fibers."""
    if d < 3:
        raise ValueError("need at least 3 lines")
    fibers = tuple(FiberData.of(ContactPoint.ordinary(pair)) for pair in itertools.combinations(range(1, d + 1), 2))
    return ArrangementSpec(genus=0, degree=1, num_sections=d, fibers=fibers, label=f"generic_lines({d})")


def _nested(outer: Sequence[int], inner: Sequence[Sequence[int]]) -> ContactPoint:
    """Ordinary point on ``outer`` with each ``inner`` block tangent to order 2."""
    pairs = {}
    for block in inner:
        for i, j in itertools.combinations(sorted(block), 2):
            pairs[(i, j)] = 2
    return ContactPoint.from_pairs(outer, pairs, default=1)


def dual_hesse_conic() -> ArrangementSpec:
    """The 11 sections of F_3 cut out by a conic through five triple points
    of the dual Hesse arrangement.

    The fiber data was derived from the plane configuration: the twelve
    triple points p1..p12, the 21 lines through two or more of them, and
    the conic z^2 x1 x2 + z x1 x3 + x2 x3 = 0 (z a primitive cube root of
    unity) through p4, p9, p10, p11, p12.  p12 plays the zero section.
    A fiber over the conic meets the boundary where the conic crosses a
    line through the points, or at one of its five marked points; the
    colliding sections are the side of the partition without p12.
    Fiber order: F1-F3 lie over p10, p11, p12 (three triple points each);
    F4, F5 over p4, p9 (a 9-fold point with nested tangencies, including
    the lines p2p4 and p2p9 that touch the conic there); F6 is the line
    p1p2p3p12 (an 8-fold point); F7, F8 are the lines p2p5p8p10 and
    p2p6p7p11; F9-F20 are the twelve nodes on the six two-point lines not
    through a marked point.
    """
    fibers = [
        FiberData.of(*(ContactPoint.ordinary(t) for t in ((1, 4, 7), (2, 5, 8), (3, 6, 9)))),
        FiberData.of(*(ContactPoint.ordinary(t) for t in ((1, 5, 9), (2, 6, 7), (3, 4, 8)))),
        FiberData.of(*(ContactPoint.ordinary(t) for t in ((1, 2, 3), (4, 5, 6), (7, 8, 9)))),
        FiberData.of(_nested((1, 2, 3, 4, 7, 8, 9, 10, 11), ((2, 4), (1, 7, 10), (3, 8, 11)))),
        FiberData.of(_nested((1, 2, 3, 4, 5, 6, 9, 10, 11), ((2, 9), (1, 5, 11), (3, 6, 10)))),
        FiberData.of(ContactPoint.ordinary(range(4, 12))),
        FiberData.of(ContactPoint.ordinary((2, 5, 8, 10))),
        FiberData.of(ContactPoint.ordinary((2, 6, 7, 11))),
    ]
    for pair in ((1, 6), (1, 8), (3, 5), (3, 7), (5, 7), (6, 8)):
        fibers += [FiberData.of(ContactPoint.ordinary(pair))] * 2
    return ArrangementSpec(genus=0, degree=3, num_sections=11, fibers=tuple(fibers), label="dual_hesse_conic")


def dual_hesse_table_choices() -> list[tuple[int, ...]]:
    """Removed-fiber sets of the six columns of the published table, in order."""
    return [
        tuple(range(1, 9)),
        (),
        tuple(range(9, 21)),
        tuple(range(7, 21)),
        tuple(range(4, 21)),
        tuple(range(6, 21)),
    ]


def tangent_quad(e: int) -> ArrangementSpec:
    """Four sections, any two tangent to order e, on three fibers.

    Combinatorially valid, but for e >= 2 it breaks the bound that every
    complex arrangement obeys; e = 1 is the Fano plane with a point blown up.
    """
    if e < 1:
        raise ValueError("e must be positive")
    matchings = (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3)))
    fibers = tuple(FiberData.of(*(ContactPoint.tangency(i, j, e) for i, j in m)) for m in matchings)
    return ArrangementSpec(genus=0, degree=e, num_sections=4, fibers=fibers, label=f"tangent_quad({e})")


def elliptic_triangle() -> ArrangementSpec:
    """Three sections over an elliptic curve, e = 2, six nodal fibers."""
    pairs = [(1, 2), (1, 3), (2, 3)] * 2
    fibers = tuple(FiberData.of(ContactPoint.ordinary(pr)) for pr in pairs)
    return ArrangementSpec(genus=1, degree=2, num_sections=3, fibers=fibers, label="elliptic_triangle")


def frobenius_triangle(p: int = 2, r: int = 1) -> ArrangementSpec:
    """The triangle in characteristic p pulled back by Frobenius r times."""
    base = ArrangementSpec(**{**triangle().__dict__, "char_p": p})
    return frobenius_pullback(base, r)


_BUILDERS: dict[str, Callable[..., ArrangementSpec]] = {
    "triangle": triangle,
    "generic_lines": generic_lines,
    "dual_hesse_conic": dual_hesse_conic,
    "tangent_quad": tangent_quad,
    "elliptic_triangle": elliptic_triangle,
    "frobenius_triangle": frobenius_triangle,
}
BUILTIN_NAMES = tuple(_BUILDERS)

_NAME_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(([0-9,\s]*)\))?\s*$")


def builtin(name: str) -> ArrangementSpec:
    """Look up a builtin, e.g. ``builtin("generic_lines(5)")``."""
    m = _NAME_RE.match(name)
    if not m or m.group(1) not in _BUILDERS:
        raise KeyError(f"unknown builtin {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    args = [int(a) for a in re.split(r"[,\s]+", m.group(2) or "") if a]
    try:
        spec = _BUILDERS[m.group(1)](*args)
    except TypeError:
        raise ValueError(f"wrong number of arguments in {name!r}") from None
    require_valid(spec)
    return spec


# ---------------------------------------------------------------------------
# height inequality


@dataclass(frozen=True)
class HeightInput:
    g: int
    delta: int
    omega_sq: int
    d_P: Fraction
    h_K: Fraction

    def __post_init__(self) -> None:
        if self.g < 2:
            raise ValueError("the height inequality needs fiber genus g >= 2")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


@dataclass(frozen=True)
class HeightResult:
    holds: bool
    lhs: Fraction
    rhs: Fraction
    note: str = ""


def height_check(inp: HeightInput) -> HeightResult:
    """Evaluate h_K < (2g - 1)(d(P) + delta) - omega^2 exactly."""
    lhs = Fraction(inp.h_K)
    rhs = (2 * inp.g - 1) * (Fraction(inp.d_P) + inp.delta) - inp.omega_sq
    holds = lhs < rhs
    note = ""
    if not holds:
        note = "inputs inconsistent with a non-isotrivial semi-stable family"
    return HeightResult(holds, lhs, rhs, note)


# ---------------------------------------------------------------------------
# de Bruijn - Erdos


@dataclass(frozen=True)
class IncidenceStructure:
    """Rows are lines, columns are the singular points."""

    incidence: tuple[tuple[bool, ...], ...]

    @classmethod
    def from_sets(cls, lines: Sequence[Sequence[int]], num_points: int | None = None) -> "IncidenceStructure":
        r = num_points if num_points is not None else 1 + max(p for ln in lines for p in ln)
        return cls(tuple(tuple(p in set(ln) for p in range(r)) for ln in lines))

    @property
    def s(self) -> int:
        return len(self.incidence)

    @property
    def r(self) -> int:
        return len(self.incidence[0]) if self.incidence else 0

    def check(self) -> None:
        if self.s < 2 or any(len(row) != self.r for row in self.incidence):
            raise ValueError("malformed incidence matrix")
        for p in range(self.r):
            if sum(row[p] for row in self.incidence) < 2:
                raise ValueError(f"point {p} lies on fewer than two lines")
        for a, b in itertools.combinations(range(self.s), 2):
            common = sum(x and y for x, y in zip(self.incidence[a], self.incidence[b]))
            if common > 1:
                raise ValueError(f"lines {a} and {b} share {common} points")


@dataclass(frozen=True)
class DeBruijnErdos:
    r_ge_s: bool
    r: int
    s: int
    equality: str | None = None


def de_bruijn_erdos(inc: IncidenceStructure) -> DeBruijnErdos:
    """Report r >= s; on equality say which extremal case occurs."""
    inc.check()
    r, s = inc.r, inc.s
    equality = None
    if r == s:
        per_point = [sum(row[p] for row in inc.incidence) for p in range(r)]
        if max(per_point) == s - 1:
            equality = "near-pencil"
        else:
            equality = "projective-plane"
    return DeBruijnErdos(r >= s, r, s, equality)


def fano_plane() -> IncidenceStructure:
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return IncidenceStructure.from_sets(lines, 7)


def near_pencil(s: int) -> IncidenceStructure:
    """s - 1 lines through point 0, plus one line meeting each elsewhere."""
    if s < 3:
        raise ValueError("need at least 3 lines")
    lines = [(0, i) for i in range(1, s)] + [tuple(range(1, s))]
    return IncidenceStructure.from_sets(lines, s)


def generic_incidence(s: int) -> IncidenceStructure:
    pts = {pair: k for k, pair in enumerate(itertools.combinations(range(s), 2))}
    lines = [[k for pair, k in pts.items() if i in pair] for i in range(s)]
    return IncidenceStructure.from_sets(lines, len(pts))
