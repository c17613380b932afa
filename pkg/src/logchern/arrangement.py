"""Combinatorial arrangements of sections of a P^1-bundle over a curve.

An arrangement is recorded by the data (g, e, d) together with the
singular fibers.  Each singular fiber lists the points where two or more
sections meet, and each point carries the symmetric matrix of local
contact orders (S_i . S_j)_P.  Sections are numbered 1..d, fibers 1..delta
in the order given; the zero section S_{d+1} never appears in the data.

Realizability is never decided here; `validate` checks the necessary
combinatorial conditions only.
"""

from __future__ import annotations

import enum
import functools
import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "ContactPoint",
    "FiberData",
    "ArrangementSpec",
    "Cluster",
    "ExtensionChoice",
    "ArrangementClass",
    "ValidationIssue",
    "ValidationReport",
    "InvalidArrangement",
    "InvalidChoice",
    "validate",
    "require_valid",
    "classify",
    "cluster_tree",
    "iter_clusters",
    "tau",
    "tau_point",
    "tau_by_blowups",
    "num_blowups",
    "fiber_stats",
    "is_removable",
    "removable_fibers",
    "check_choice",
    "admissible_choices",
    "frobenius_pullback",
    "etale_pullback",
    "relabel",
    "spec_from_dict",
    "spec_to_dict",
    "load_spec",
    "dump_spec",
]


class InvalidArrangement(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(str(i) for i in report.issues))


class InvalidChoice(ValueError):
    pass


@dataclass(frozen=True)
class ContactPoint:
    """A point where at least two sections meet.

    ``contact`` holds ((i, j), c) for every pair i < j of ``sections``.
    """

    sections: tuple[int, ...]
    contact: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def from_matrix(cls, sections: Sequence[int], matrix: Sequence[Sequence[int]]) -> "ContactPoint":
        """Build from a full symmetric matrix indexed like ``sections``."""
        secs = list(sections)
        n = len(secs)
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ValueError("contact matrix must be square and match the section list")
        pairs = {}
        for a, b in itertools.combinations(range(n), 2):
            if matrix[a][b] != matrix[b][a]:
                raise ValueError(f"contact matrix not symmetric at ({secs[a]}, {secs[b]})")
            i, j = sorted((secs[a], secs[b]))
            pairs[(i, j)] = int(matrix[a][b])
        return cls._make(secs, pairs)

    @classmethod
    def from_pairs(cls, sections: Iterable[int], pairs: Mapping[tuple[int, int], int], default: int | None = None) -> "ContactPoint":
        secs = sorted(set(sections))
        table = {}
        for i, j in itertools.combinations(secs, 2):
            c = pairs.get((i, j), pairs.get((j, i), default))
            if c is None:
                raise ValueError(f"no contact order given for sections {i}, {j}")
            table[(i, j)] = int(c)
        return cls._make(secs, table)

    @classmethod
    def ordinary(cls, sections: Iterable[int]) -> "ContactPoint":
        """Ordinary multiple point: all contacts 1."""
        return cls.from_pairs(sections, {}, default=1)

    @classmethod
    def tangency(cls, i: int, j: int, order: int) -> "ContactPoint":
        return cls.from_pairs((i, j), {(i, j): order})

    @classmethod
    def _make(cls, sections: Iterable[int], pairs: Mapping[tuple[int, int], int]) -> "ContactPoint":
        secs = tuple(sorted(sections))
        if len(set(secs)) != len(secs):
            raise ValueError(f"repeated section in point {secs}")
        return cls(secs, tuple(sorted(pairs.items())))

    def __post_init__(self) -> None:
        if len(self.sections) < 2:
            raise ValueError("a singular point needs at least two sections")

    @functools.cached_property
    def _table(self) -> dict[tuple[int, int], int]:
        return dict(self.contact)

    def contact_of(self, i: int, j: int) -> int:
        """(S_i . S_j)_P; 0 if either section misses the point."""
        if i == j:
            raise ValueError("contact order of a section with itself")
        return self._table.get((min(i, j), max(i, j)), 0)

    def matrix(self) -> list[list[int]]:
        return [[0 if i == j else self.contact_of(i, j) for j in self.sections] for i in self.sections]

    def scaled(self, factor: int) -> "ContactPoint":
        return ContactPoint(self.sections, tuple((k, c * factor) for k, c in self.contact))

    def relabeled(self, perm: Mapping[int, int]) -> "ContactPoint":
        return ContactPoint._make((perm[s] for s in self.sections), {tuple(sorted((perm[i], perm[j]))): c for (i, j), c in self.contact})

    @property
    def max_contact(self) -> int:
        return max(c for _, c in self.contact)


@dataclass(frozen=True)
class FiberData:
    points: tuple[ContactPoint, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("a singular fiber needs at least one singular point")

    @classmethod
    def of(cls, *points: ContactPoint) -> "FiberData":
        return cls(tuple(points))


@dataclass(frozen=True)
class ArrangementSpec:
    genus: int
    degree: int
    num_sections: int
    fibers: tuple[FiberData, ...]
    char_p: int | None = None
    label: str = ""

    @property
    def delta(self) -> int:
        return len(self.fibers)

    @property
    def zero_section(self) -> int:
        return self.num_sections + 1

    def points(self) -> Iterator[tuple[int, int, ContactPoint]]:
        """Yield (fiber number, point number, point), both 1-based."""
        for j, fiber in enumerate(self.fibers, 1):
            for k, pt in enumerate(fiber.points, 1):
                yield j, k, pt

    def fiber(self, index: int) -> FiberData:
        if not 1 <= index <= len(self.fibers):
            raise IndexError(f"fiber {index} out of range 1..{len(self.fibers)}")
        return self.fibers[index - 1]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

    def __bool__(self) -> bool:
        return self.ok


def _is_ultrametric(pt: ContactPoint) -> tuple[int, int, int] | None:
    """Return a triple violating the ultrametric condition, if any."""
    for a, b, c in itertools.combinations(pt.sections, 3):
        vals = sorted((pt.contact_of(a, b), pt.contact_of(a, c), pt.contact_of(b, c)))
        if vals[0] != vals[1]:
            return a, b, c
    return None


@functools.lru_cache(maxsize=4096)
def validate(spec: ArrangementSpec) -> ValidationReport:
    issues: list[ValidationIssue] = []

    def bad(code: str, msg: str) -> None:
        issues.append(ValidationIssue(code, msg))

    g, e, d = spec.genus, spec.degree, spec.num_sections
    if g < 0:
        bad("structure", f"genus {g} is negative")
    if e < 1:
        bad("structure", f"degree {e} must be positive")
    if d < 3:
        bad("structure", f"need at least 3 sections, got {d}")
    if spec.char_p is not None and spec.char_p < 2:
        bad("structure", f"characteristic {spec.char_p} is not a prime")

    min_delta = 3 if g == 0 else 2
    if spec.delta < min_delta:
        bad("delta", f"{spec.delta} singular fibers, need at least {min_delta} for genus {g}")

    pair_sum: dict[tuple[int, int], int] = {}
    for j, k, pt in spec.points():
        where = f"fiber {j} point {k}"
        out = [s for s in pt.sections if not 1 <= s <= d]
        if out:
            bad("structure", f"{where}: section indices {out} outside 1..{d}")
        if len(pt.sections) >= d:
            bad("full-intersection", f"{where}: all {d} sections pass through one point")
        for (a, b), c in pt.contact:
            if not 1 <= c <= e:
                bad("contact-range", f"{where}: contact({a},{b}) = {c} not in 1..{e}")
            pair_sum[(a, b)] = pair_sum.get((a, b), 0) + c
        triple = _is_ultrametric(pt)
        if triple is not None:
            a, b, c = triple
            bad("ultrametric", f"{where}: minimum of contacts among sections {a},{b},{c} attained once")

    for j, fiber in enumerate(spec.fibers, 1):
        seen: set[int] = set()
        for pt in fiber.points:
            twice = seen.intersection(pt.sections)
            if twice:
                bad("fiber", f"fiber {j}: sections {sorted(twice)} meet the fiber at two points")
            seen.update(pt.sections)

    for a, b in itertools.combinations(range(1, d + 1), 2):
        total = pair_sum.get((a, b), 0)
        if total != e:
            bad("pair-sum", f"sections {a},{b} meet with total multiplicity {total}, expected {e}")

    return ValidationReport(tuple(issues))


def require_valid(spec: ArrangementSpec) -> None:
    report = validate(spec)
    if not report.ok:
        raise InvalidArrangement(report)


# ---------------------------------------------------------------------------
# classification and blow-up combinatorics


class ArrangementClass(enum.Enum):
    SIMPLE_CROSSING = "simple-crossing"
    TRANSVERSAL = "transversal"
    GENERAL = "general"


def _point_transversal(pt: ContactPoint) -> bool:
    for i, j in itertools.combinations(pt.sections, 2):
        c = pt.contact_of(i, j)
        if c == 1:
            continue
        if not any(pt.contact_of(i, k) == c - 1 for k in pt.sections if k not in (i, j)):
            return False
    return True


def classify(spec: ArrangementSpec) -> ArrangementClass:
    require_valid(spec)
    pts = [pt for _, _, pt in spec.points()]
    if all(c == 1 for pt in pts for _, c in pt.contact):
        return ArrangementClass.SIMPLE_CROSSING
    if all(_point_transversal(pt) for pt in pts):
        return ArrangementClass.TRANSVERSAL
    return ArrangementClass.GENERAL


@dataclass(frozen=True)
class Cluster:
    """A blow-up center: the sections through it and its depth over P."""

    sections: frozenset[int]
    depth: int
    children: tuple["Cluster", ...] = field(default=())

    def walk(self) -> Iterator["Cluster"]:
        yield self
        for child in self.children:
            yield from child.walk()


def _split(pt: ContactPoint, sections: frozenset[int], level: int) -> list[frozenset[int]]:
    """Classes of ``sections`` under contact >= level (an equivalence by ultrametricity)."""
    classes: list[set[int]] = []
    for s in sorted(sections):
        for cls_ in classes:
            if pt.contact_of(s, next(iter(cls_))) >= level:
                cls_.add(s)
                break
        else:
            classes.append({s})
    return [frozenset(c) for c in classes]


def _build_cluster(pt: ContactPoint, sections: frozenset[int], depth: int) -> Cluster:
    kids = [c for c in _split(pt, sections, depth + 1) if len(c) >= 2]
    kids.sort(key=lambda c: sorted(c))
    return Cluster(sections, depth, tuple(_build_cluster(pt, c, depth + 1) for c in kids))


@functools.lru_cache(maxsize=8192)
def cluster_tree(pt: ContactPoint) -> Cluster:
    """Tree of blow-up centers over a point; only centers with >= 2 sections."""
    return _build_cluster(pt, frozenset(pt.sections), 1)


def iter_clusters(pt: ContactPoint) -> Iterator[Cluster]:
    """Centers over ``pt`` in blow-up order (parents before children)."""
    queue = [cluster_tree(pt)]
    while queue:
        c = queue.pop(0)
        yield c
        queue.extend(c.children)


def tau_point(pt: ContactPoint) -> int:
    return sum(len(c.sections) - 1 for c in cluster_tree(pt).walk())


@functools.lru_cache(maxsize=4096)
def tau(spec: ArrangementSpec) -> int:
    """tau = sum over blow-up centers of (sections through the center - 1)."""
    require_valid(spec)
    return sum(tau_point(pt) for _, _, pt in spec.points())


def tau_by_blowups(pt: ContactPoint) -> tuple[int, int]:
    """(tau, number of centers) by simulating blow-ups on contact matrices.

    Each blow-up lowers every contact through the center by one; sections
    with positive residual contact still share a point on the new
    exceptional curve.  Independent of `cluster_tree`.
    """
    total = 0
    centers = 0
    pending = [(tuple(pt.sections), {k: c for k, c in pt.contact})]
    while pending:
        secs, table = pending.pop()
        centers += 1
        total += len(secs) - 1
        residual = {k: c - 1 for k, c in table.items()}
        groups: list[list[int]] = []
        for s in secs:
            home = None
            for grp in groups:
                if any(residual[(min(s, o), max(s, o))] > 0 for o in grp):
                    home = grp
                    break
            if home is None:
                groups.append([s])
            else:
                home.append(s)
        for grp in groups:
            if len(grp) >= 2:
                pending.append((tuple(grp), {(a, b): residual[(a, b)] for a, b in itertools.combinations(sorted(grp), 2)}))
    return total, centers


def num_blowups(spec: ArrangementSpec) -> int:
    require_valid(spec)
    return sum(sum(1 for _ in cluster_tree(pt).walk()) for _, _, pt in spec.points())


def fiber_stats(spec: ArrangementSpec, index: int) -> tuple[int, int]:
    """(k_o, k): singular points on the fiber, and points of A on it plus one."""
    fiber = spec.fiber(index)
    k_o = len(fiber.points)
    on_fiber = spec.num_sections - sum(len(pt.sections) - 1 for pt in fiber.points)
    k = on_fiber + 1
    assert k <= spec.num_sections, "a fiber meets A in at most d - 1 points"
    return k_o, k


def is_removable(spec: ArrangementSpec, index: int) -> bool:
    """Every singular point on the fiber has two sections with distinct tangents."""
    fiber = spec.fiber(index)
    return all(any(c == 1 for _, c in pt.contact) for pt in fiber.points)


def removable_fibers(spec: ArrangementSpec) -> list[int]:
    return [j for j in range(1, spec.delta + 1) if is_removable(spec, j)]


# ---------------------------------------------------------------------------
# extension choices


@dataclass(frozen=True)
class ExtensionChoice:
    """Fibers (1-based) dropped from the extended arrangement."""

    removed: frozenset[int] = frozenset()

    @classmethod
    def of(cls, fibers: Iterable[int] = ()) -> "ExtensionChoice":
        return cls(frozenset(int(f) for f in fibers))

    @classmethod
    def span(cls, first: int, last: int) -> "ExtensionChoice":
        return cls(frozenset(range(first, last + 1)))

    @property
    def epsilon(self) -> int:
        return len(self.removed)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.removed))

    def label(self) -> str:
        fs = self.sorted()
        if not fs:
            return "{}"
        if fs == tuple(range(fs[0], fs[-1] + 1)) and len(fs) > 2:
            return f"{{F{fs[0]}..F{fs[-1]}}}"
        return "{" + ",".join(f"F{f}" for f in fs) + "}"


def check_choice(spec: ArrangementSpec, choice: ExtensionChoice) -> None:
    require_valid(spec)
    bad = [f for f in choice.removed if not 1 <= f <= spec.delta]
    if bad:
        raise InvalidChoice(f"fibers {sorted(bad)} out of range 1..{spec.delta}")
    if choice.epsilon > spec.delta - 2:
        raise InvalidChoice(f"removing {choice.epsilon} fibers leaves fewer than two (delta = {spec.delta})")
    stuck = [f for f in choice.sorted() if not is_removable(spec, f)]
    if stuck:
        raise InvalidChoice(f"fibers {stuck} have a singular point with all sections sharing a tangent")


def admissible_choices(spec: ArrangementSpec) -> Iterator[ExtensionChoice]:
    """Every admissible choice, by size then lexicographically."""
    require_valid(spec)
    rem = removable_fibers(spec)
    for eps in range(0, min(len(rem), spec.delta - 2) + 1):
        for combo in itertools.combinations(rem, eps):
            yield ExtensionChoice(frozenset(combo))


# ---------------------------------------------------------------------------
# pull-backs


def frobenius_pullback(spec: ArrangementSpec, r: int) -> ArrangementSpec:
    """Pull back along the r-fold Frobenius of the base curve."""
    if spec.char_p is None:
        raise ValueError("Frobenius pull-back needs a positive characteristic")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0:
        return spec
    q = spec.char_p**r
    fibers = tuple(FiberData(tuple(pt.scaled(q) for pt in f.points)) for f in spec.fibers)
    label = f"{spec.label} Frob^{r}" if spec.label else f"Frob^{r}"
    return replace(spec, degree=spec.degree * q, fibers=fibers, label=label)


def etale_pullback(spec: ArrangementSpec, n: int) -> ArrangementSpec:
    """Pull back along an unramified degree-n cover of the base curve."""
    if spec.genus == 0:
        raise ValueError("P^1 has no connected unramified covers of degree > 1")
    if n < 1:
        raise ValueError("degree must be positive")
    if n == 1:
        return spec
    label = f"{spec.label} etale^{n}" if spec.label else f"etale^{n}"
    return replace(
        spec,
        genus=n * (spec.genus - 1) + 1,
        degree=n * spec.degree,
        fibers=spec.fibers * n,
        label=label,
    )


def relabel(spec: ArrangementSpec, section_perm: Mapping[int, int] | None = None, fiber_order: Sequence[int] | None = None) -> ArrangementSpec:
    """Permute section labels and/or reorder fibers (1-based order list)."""
    perm = dict(section_perm or {s: s for s in range(1, spec.num_sections + 1)})
    order = list(fiber_order or range(1, spec.delta + 1))
    fibers = tuple(FiberData(tuple(pt.relabeled(perm) for pt in spec.fiber(j).points)) for j in order)
    return replace(spec, fibers=fibers)


# ---------------------------------------------------------------------------
# JSON


def _matrix_from_json(n: int, raw: Any) -> list[list[int]]:
    """Accept strict lower-triangular rows (with or without the empty first
    row), lower-triangular rows including the diagonal, or a full matrix."""
    rows = [list(r) for r in raw]
    full = [[0] * n for _ in range(n)]
    lengths = [len(r) for r in rows]
    if lengths == list(range(1, n)):
        rows = [[]] + rows
        lengths = [0] + lengths
    if lengths == [n] * n and n > 1:
        for a in range(n):
            for b in range(n):
                if a != b:
                    full[a][b] = int(rows[a][b])
        return full
    if lengths not in (list(range(0, n)), list(range(1, n + 1))):
        raise ValueError(f"cannot read a {n}x{n} contact matrix from row lengths {lengths}")
    for a in range(n):
        for b in range(a):
            full[a][b] = full[b][a] = int(rows[a][b])
    return full


def spec_from_dict(data: Mapping[str, Any]) -> ArrangementSpec:
    fibers = []
    for fi, raw_fiber in enumerate(data["fibers"], 1):
        pts = []
        for pi, raw in enumerate(raw_fiber, 1):
            secs = [int(s) for s in raw["sections"]]
            try:
                if "contact" in raw and raw["contact"] is not None:
                    pts.append(ContactPoint.from_matrix(secs, _matrix_from_json(len(secs), raw["contact"])))
                else:
                    pts.append(ContactPoint.ordinary(secs))
            except ValueError as exc:
                raise ValueError(f"fiber {fi} point {pi}: {exc}") from None
        fibers.append(FiberData(tuple(pts)))
    char_p = data.get("char_p")
    return ArrangementSpec(
        genus=int(data["genus"]),
        degree=int(data["degree"]),
        num_sections=int(data["d"]),
        fibers=tuple(fibers),
        char_p=None if char_p in (None, 0) else int(char_p),
        label=str(data.get("label", "")),
    )


def spec_to_dict(spec: ArrangementSpec) -> dict[str, Any]:
    out: dict[str, Any] = {"label": spec.label, "genus": spec.genus, "degree": spec.degree, "d": spec.num_sections}
    if spec.char_p is not None:
        out["char_p"] = spec.char_p
    out["fibers"] = [
        [
            {
                "sections": list(pt.sections),
                "contact": [[pt.contact_of(a, b) for b in pt.sections[:i]] for i, a in enumerate(pt.sections) if i > 0],
            }
            for pt in fiber.points
        ]
        for fiber in spec.fibers
    ]
    return out


def load_spec(path: str | Path) -> ArrangementSpec:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return spec_from_dict(data)
    except KeyError as exc:
        raise ValueError(f"{path}: missing field {exc}") from None


def dump_spec(spec: ArrangementSpec, path: str | Path | None = None) -> str:
    text = json.dumps(spec_to_dict(spec), indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
