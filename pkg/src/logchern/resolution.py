"""Dual graph of the log resolution of a (partially) extended arrangement.

The resolution is simulated on the intersection form: start from the
ruled surface, where sections meet pairwise in e points, each fiber has
square 0 and meets every section once, and the zero section has square -e.
Blowing up a point with curves T through it subtracts 1 from every square
in T and from every pairwise product in T, and adds an exceptional curve
of square -1 meeting each member of T once.  Centers are visited fiber by
fiber, and within a point parents before children.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from .arrangement import (
    ArrangementSpec,
    Cluster,
    ExtensionChoice,
    check_choice,
    cluster_tree,
    num_blowups,
    require_valid,
)
from .invariants import LogChernPair

__all__ = [
    "Kind",
    "Component",
    "ResolutionGraph",
    "build_resolution",
    "chern_of_Y",
    "log_chern_via_graph",
    "to_dot",
    "audit",
]


class Kind(enum.Enum):
    SECTION = "S"
    ZERO_SECTION = "Z"
    FIBER = "F"
    EXCEPTIONAL = "E"


Key = tuple


@dataclass(frozen=True)
class Component:
    key: Key
    kind: Kind
    self_int: int
    genus: int
    in_divisor: bool
    index: int = 0
    fiber: int = 0
    sections: frozenset[int] = frozenset()
    depth: int = 0
    through: tuple[Key, ...] = ()

    @property
    def label(self) -> str:
        if self.kind is Kind.SECTION:
            return f"S{self.index}"
        if self.kind is Kind.ZERO_SECTION:
            return f"S{self.index}"
        if self.kind is Kind.FIBER:
            return f"F{self.fiber}"
        body = ",".join(map(str, sorted(self.sections)))
        return f"E{self.fiber}[{body}]^{self.depth}"


def _pair(a: Key, b: Key) -> tuple[Key, Key]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class ResolutionGraph:
    spec: ArrangementSpec
    choice: ExtensionChoice
    minimal: bool
    components: tuple[Component, ...]
    intersections: dict[tuple[Key, Key], int]
    s: int
    by_key: dict[Key, Component] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        self.by_key.update((c.key, c) for c in self.components)

    def __getitem__(self, key: Key) -> Component:
        return self.by_key[key]

    @property
    def genus(self) -> int:
        return self.spec.genus

    @property
    def divisor(self) -> list[Component]:
        return [c for c in self.components if c.in_divisor]

    def meet(self, a: Key, b: Key) -> int:
        if a == b:
            return self.by_key[a].self_int
        return self.intersections.get(_pair(a, b), 0)

    def adjacency(self) -> Counter:
        """Node counts between distinct components of D."""
        out: Counter = Counter()
        div = self.by_key
        for (a, b), n in self.intersections.items():
            if div[a].in_divisor and div[b].in_divisor:
                out[(a, b)] = n
        return out

    def nodes(self) -> Iterator[tuple[Component, Component, int]]:
        """(a, b, count) in component order."""
        adj = self.adjacency()
        order = {c.key: i for i, c in enumerate(self.components)}
        for pair, n in sorted(adj.items(), key=lambda kv: sorted(order[k] for k in kv[0])):
            a, b = sorted(pair, key=order.__getitem__)
            yield self.by_key[a], self.by_key[b], n

    @property
    def t2(self) -> int:
        return sum(self.adjacency().values())

    def fiber_total_transform(self, j: int) -> dict[Key, int]:
        """Pull-back of the fiber F_j as a combination of components."""
        out = {("F", j): 1}
        for c in self.components:
            if c.kind is Kind.EXCEPTIONAL and c.fiber == j:
                # every center on the fiber is a smooth point of the pulled-back fiber
                out[c.key] = 1
        return out

    def section_total_transform(self, i: int) -> dict[Key, int]:
        out = {("S", i): 1}
        for c in self.components:
            if c.kind is not Kind.EXCEPTIONAL:
                continue
            # one for each center on the chain down to c that lies on S_i
            mult, node = 0, c
            while node.kind is Kind.EXCEPTIONAL:
                mult += i in node.sections
                node = self.by_key[node.through[0]]
            if mult:
                out[c.key] = mult
        return out

    def product(self, u: dict[Key, int], v: dict[Key, int]) -> int:
        return sum(a * b * self.meet(ka, kb) for ka, a in u.items() for kb, b in v.items())


def _skippable(cluster: Cluster, removed: bool) -> bool:
    # transverse double point on a fiber outside D is already normal crossing
    return removed and len(cluster.sections) == 2 and not cluster.children


def build_resolution(spec: ArrangementSpec, choice: ExtensionChoice | None = None, minimal: bool = False) -> ResolutionGraph:
    """Simulate the blow-ups and record every curve and intersection.

    By default every center of every cluster tree is blown up, also on
    removed fibers.  With ``minimal`` the transverse double points lying on
    removed fibers are left alone; they stay as section-section nodes.
    """
    require_valid(spec)
    choice = choice or ExtensionChoice()
    check_choice(spec, choice)
    g, e, d = spec.genus, spec.degree, spec.num_sections
    zero = ("S", d + 1)

    square: dict[Key, int] = {}
    meet: Counter = Counter()
    info: dict[Key, dict] = {}

    for i in range(1, d + 1):
        square[("S", i)] = e
        info[("S", i)] = dict(kind=Kind.SECTION, genus=g, in_divisor=True, index=i)
        for j in range(1, i):
            meet[_pair(("S", j), ("S", i))] = e
    square[zero] = -e
    info[zero] = dict(kind=Kind.ZERO_SECTION, genus=g, in_divisor=True, index=d + 1)
    for j in range(1, spec.delta + 1):
        fk = ("F", j)
        square[fk] = 0
        info[fk] = dict(kind=Kind.FIBER, genus=0, in_divisor=j not in choice.removed, fiber=j)
        meet[_pair(fk, zero)] = 1
        for i in range(1, d + 1):
            meet[_pair(fk, ("S", i))] = 1

    blowups = 0

    def blow_up(cluster: Cluster, j: int, carrier: Key) -> None:
        nonlocal blowups
        through = (carrier,) + tuple(("S", i) for i in sorted(cluster.sections))
        ek = ("E", blowups + 1)
        for a in through:
            square[a] -= 1
            meet[_pair(a, ek)] += 1
        for a, b in itertools.combinations(through, 2):
            meet[_pair(a, b)] -= 1
        square[ek] = -1
        info[ek] = dict(
            kind=Kind.EXCEPTIONAL,
            genus=0,
            in_divisor=True,
            fiber=j,
            sections=frozenset(cluster.sections),
            depth=cluster.depth,
            through=through,
        )
        blowups += 1
        for child in cluster.children:
            blow_up(child, j, ek)

    for j in range(1, spec.delta + 1):
        removed = j in choice.removed
        for pt in spec.fiber(j).points:
            root = cluster_tree(pt)
            if minimal and _skippable(root, removed):
                continue
            blow_up(root, j, ("F", j))

    for (a, b), n in meet.items():
        if n < 0:
            raise AssertionError(f"negative intersection between {a} and {b}")
    components = tuple(Component(key=k, self_int=square[k], **info[k]) for k in square)
    inter = {p: n for p, n in meet.items() if n}
    return ResolutionGraph(spec, choice, minimal, components, inter, blowups)


def chern_of_Y(graph: ResolutionGraph, g: int | None = None) -> tuple[int, int]:
    """(c1^2, c2) of the blown-up ruled surface."""
    g = graph.genus if g is None else g
    return 8 * (1 - g) - graph.s, 4 * (1 - g) + graph.s


def log_chern_via_graph(graph: ResolutionGraph) -> LogChernPair:
    c1sq_y, c2_y = chern_of_Y(graph)
    divisor = graph.divisor
    sq = sum(c.self_int for c in divisor)
    gen = sum(c.genus - 1 for c in divisor)
    t2 = graph.t2
    return LogChernPair(c1sq_y - sq + 2 * t2 + 4 * gen, c2_y + t2 + 2 * gen)


def audit(graph: ResolutionGraph) -> list[str]:
    """Intersection-form sanity checks; returns a list of failures."""
    spec = graph.spec
    problems = []
    if not graph.minimal and graph.s != num_blowups(spec):
        problems.append(f"{graph.s} blow-ups, expected {num_blowups(spec)}")
    for c in graph.components:
        if c.kind is Kind.EXCEPTIONAL and c.self_int > -1:
            problems.append(f"{c.label} has square {c.self_int}")
    for j in range(1, spec.delta + 1):
        fj = graph.fiber_total_transform(j)
        if graph.product(fj, fj) != 0:
            problems.append(f"pulled-back F{j} has nonzero square")
    for i in range(1, spec.num_sections + 1):
        si = graph.section_total_transform(i)
        if graph.product(si, si) != spec.degree:
            problems.append(f"pulled-back S{i} has square != e")
        for j in range(1, spec.delta + 1):
            if graph.product(si, graph.fiber_total_transform(j)) != 1:
                problems.append(f"pulled-back S{i}.F{j} != 1")
    return problems


def to_dot(graph: ResolutionGraph, name: str = "resolution") -> str:
    """Graphviz dump; dashed nodes are curves outside D."""
    lines = [f"graph {name} {{"]
    ids = {c.key: f"c{n}" for n, c in enumerate(graph.components)}
    for c in graph.components:
        style = "" if c.in_divisor else ", style=dashed"
        lines.append(f'  {ids[c.key]} [label="{c.label}\\n{c.self_int}, g={c.genus}"{style}];')
    for a, b, n in graph.nodes():
        attr = f' [label="{n}", weight={n}]' if n > 1 else ""
        lines.append(f"  {ids[a.key]} -- {ids[b.key]}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
