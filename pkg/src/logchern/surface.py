"""Chern numbers of p-th root covers branched along the log resolution.

A solution of  sum_i e x_i + sum_j y_j = p  (all terms positive, one y per
kept fiber) fixes a divisor D = sum x_i S_i + x_{d+1} S_{d+1} + sum y_j F_j
with x_{d+1} = p - sum x_i.  Its total transform on the resolution has a
multiplicity nu on each component, and each node of the reduced boundary
contributes a Dedekind-sum and a continued-fraction error term.
"""

from __future__ import annotations

import enum
import math
import random
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate
from typing import Iterable, Iterator, Mapping, Sequence

from .arrangement import ArrangementSpec, ExtensionChoice, check_choice, require_valid
from .invariants import LogChernPair, log_chern_partial
from .numtheory import c_value, hj_length, is_bad, is_prime, mod_inverse
from .resolution import Component, Kind, ResolutionGraph, build_resolution, chern_of_Y

__all__ = [
    "NoSolution",
    "IntegralityError",
    "MultiplicityError",
    "UnclassifiedNode",
    "PartitionSolution",
    "SolutionCount",
    "count_solutions",
    "enumerate_solutions",
    "sample_solution",
    "MultiplicityAssignment",
    "assign_multiplicities",
    "NodeType",
    "NodeRecord",
    "classify_nodes",
    "ccf_lcf",
    "SurfaceInvariants",
    "leading_terms",
    "chern_of_X",
    "ConvergenceRow",
    "converge",
]


class NoSolution(ValueError):
    pass


class IntegralityError(ArithmeticError):
    pass


class MultiplicityError(ValueError):
    pass


class UnclassifiedNode(AssertionError):
    pass


# ---------------------------------------------------------------------------
# the weighted partition equation


@dataclass(frozen=True)
class PartitionSolution:
    p: int
    x: tuple[int, ...]
    y: tuple[int, ...]
    kept: tuple[int, ...]

    @property
    def x_last(self) -> int:
        return self.p - sum(self.x)

    def check(self, e: int) -> None:
        if any(v <= 0 for v in self.x + self.y):
            raise ValueError("all x and y must be positive")
        if e * sum(self.x) + sum(self.y) != self.p:
            raise ValueError("solution does not add up to p")
        if len(self.y) != len(self.kept):
            raise ValueError("one y per kept fiber")
        if not 0 < self.x_last < self.p:
            raise ValueError("x_{d+1} out of range")


def _kept(spec: ArrangementSpec, choice: ExtensionChoice) -> tuple[int, ...]:
    return tuple(j for j in range(1, spec.delta + 1) if j not in choice.removed)


def _check_prime(spec: ArrangementSpec, p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if spec.char_p is not None and p == spec.char_p:
        raise ValueError(f"p = {p} equals the characteristic")


@lru_cache(maxsize=64)
def _x_weights(p: int, d: int, m: int, e: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Values of X = sum x_i and cumulative solution counts up to each."""
    xs, weights = [], []
    for big_x in range(d, (p - m) // e + 1):
        rest = p - e * big_x
        xs.append(big_x)
        weights.append(math.comb(big_x - 1, d - 1) * math.comb(rest - 1, m - 1))
    return tuple(xs), tuple(accumulate(weights))


@dataclass(frozen=True)
class SolutionCount:
    exact: int
    estimate: Fraction

    @property
    def relative_error(self) -> float:
        return float(abs(self.estimate - self.exact) / self.exact) if self.exact else math.inf


def count_solutions(spec: ArrangementSpec, choice: ExtensionChoice | None, p: int) -> SolutionCount:
    """Exact number of positive solutions and the leading-order estimate."""
    choice = choice or ExtensionChoice()
    d, e = spec.num_sections, spec.degree
    m = spec.delta - choice.epsilon
    _, cum = _x_weights(p, d, m, e)
    n = d + m - 1
    estimate = Fraction(p**n, math.factorial(n) * e**d)
    return SolutionCount(cum[-1] if cum else 0, estimate)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_solutions(
    spec: ArrangementSpec, choice: ExtensionChoice | None, p: int, budget: int = 1_000_000
) -> Iterator[PartitionSolution]:
    """Every positive solution, by brute force.  Raises once ``budget`` is exceeded."""
    choice = choice or ExtensionChoice()
    d, e = spec.num_sections, spec.degree
    kept = _kept(spec, choice)
    m = len(kept)
    produced = 0
    for big_x in range(d, (p - m) // e + 1):
        for x in _compositions(big_x, d):
            for y in _compositions(p - e * big_x, m):
                produced += 1
                if produced > budget:
                    raise RuntimeError(f"enumeration budget of {budget} exceeded")
                yield PartitionSolution(p, x, y, kept)


def _random_composition(rng: random.Random, total: int, parts: int) -> tuple[int, ...]:
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return tuple(b - a for a, b in zip(bounds, bounds[1:]))


def sample_solution(spec: ArrangementSpec, choice: ExtensionChoice | None, p: int, seed: int | str = 0) -> PartitionSolution:
    """Uniformly random positive solution; the same seed gives the same solution.

    X = sum x_i is drawn with probability proportional to the number of
    solutions having that X, then x and y are uniform compositions.
    """
    require_valid(spec)
    choice = choice or ExtensionChoice()
    check_choice(spec, choice)
    _check_prime(spec, p)
    d, e = spec.num_sections, spec.degree
    kept = _kept(spec, choice)
    m = len(kept)
    xs, cum = _x_weights(p, d, m, e)
    if not cum:
        raise NoSolution(f"p = {p} is below the smallest admissible value {d * e + m}")
    rng = random.Random(f"{seed}/{p}")
    big_x = xs[bisect_right(cum, rng.randrange(cum[-1]))]
    x = _random_composition(rng, big_x, d)
    y = _random_composition(rng, p - e * big_x, m)
    return PartitionSolution(p, x, y, kept)


# ---------------------------------------------------------------------------
# multiplicities and node types

# a linear form in the variables ("x", i) and ("y", j)
Form = Mapping[tuple[str, int], int]


def _add(*forms: Form) -> dict[tuple[str, int], int]:
    out: dict[tuple[str, int], int] = {}
    for f in forms:
        for k, v in f.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class MultiplicityAssignment:
    p: int
    values: dict[tuple, int]
    forms: dict[tuple, dict[tuple[str, int], int]]

    def __getitem__(self, key: tuple) -> int:
        return self.values[key]


def _forms(graph: ResolutionGraph) -> dict[tuple, dict[tuple[str, int], int]]:
    forms: dict[tuple, dict] = {}
    for c in graph.components:
        if c.kind in (Kind.SECTION, Kind.ZERO_SECTION):
            forms[c.key] = {("x", c.index): 1}
        elif c.kind is Kind.FIBER:
            forms[c.key] = {("y", c.fiber): 1} if c.in_divisor else {}
        else:
            forms[c.key] = _add(*(forms[k] for k in c.through))
    return forms


def assign_multiplicities(graph: ResolutionGraph, solution: PartitionSolution) -> MultiplicityAssignment:
    """Multiplicities of the total transform of D on each boundary component."""
    d = graph.spec.num_sections
    if len(solution.x) != d or solution.kept != _kept(graph.spec, graph.choice):
        raise ValueError("solution does not belong to this arrangement and choice")
    env = {("x", i + 1): v for i, v in enumerate(solution.x)}
    env[("x", d + 1)] = solution.x_last
    env.update({("y", j): v for j, v in zip(solution.kept, solution.y)})
    forms = _forms(graph)
    values = {}
    for c in graph.divisor:
        nu = sum(coef * env[var] for var, coef in forms[c.key].items())
        if not 0 < nu < solution.p:
            raise MultiplicityError(f"multiplicity {nu} of {c.label} is outside (0, {solution.p})")
        values[c.key] = nu
    return MultiplicityAssignment(solution.p, values, {c.key: forms[c.key] for c in graph.divisor})


class NodeType(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"


@dataclass(frozen=True)
class NodeRecord:
    a: Component
    b: Component
    nu_a: int
    nu_b: int
    type: NodeType
    count: int


def node_argument(nu_a: int, nu_b: int, p: int) -> int:
    r = (-mod_inverse(nu_a, p) * nu_b) % p
    assert r != 0
    return r


def _xs(form: Form) -> dict[int, int]:
    return {i: v for (t, i), v in form.items() if t == "x"}


def _ys(form: Form) -> dict[int, int]:
    return {j: v for (t, j), v in form.items() if t == "y"}


def _fits_iv(exc: Form, sec: Form, d: int, e: int) -> bool:
    xs, ys = _xs(exc), _ys(exc)
    (k,) = _xs(sec)
    return (
        d + 1 not in xs
        and all(0 <= v <= e for v in xs.values())
        and len(ys) <= 1
        and all(v == 1 for v in ys.values())
        and xs.get(k, 0) != 0
    )


def _fits_v(lo: Form, hi: Form, e: int) -> bool:
    """hi = sum_K x_k + lo and lo = n sum_K x_k + z, z != 0 free of K, 0 <= n < e."""
    diff = _add(hi, {k: -v for k, v in lo.items()})
    if not diff or any(t != "x" or v != 1 for (t, _), v in diff.items()):
        return False
    ks = [i for _, i in diff]
    ns = {lo.get(("x", i), 0) for i in ks}
    if len(ns) != 1:
        return False
    n = ns.pop()
    z = _add(lo, {("x", i): -n for i in ks})
    return 0 <= n < e and bool(z) and all(v > 0 for v in z.values())


def _classify(a: Component, b: Component, fa: Form, fb: Form, d: int, e: int) -> tuple[NodeType, bool]:
    """Type of the node and whether (a, b) must be swapped to match the template."""
    kinds = {a.kind, b.kind}
    if kinds == {Kind.SECTION}:
        return NodeType.I, False
    if kinds == {Kind.FIBER, Kind.SECTION}:
        return NodeType.II, a.kind is not Kind.FIBER
    if kinds == {Kind.FIBER, Kind.ZERO_SECTION}:
        return NodeType.III, a.kind is not Kind.FIBER
    if kinds == {Kind.EXCEPTIONAL, Kind.SECTION}:
        swap = a.kind is not Kind.EXCEPTIONAL
        exc, sec = (fb, fa) if swap else (fa, fb)
        if _fits_iv(exc, sec, d, e):
            return NodeType.IV, swap
    elif kinds <= {Kind.EXCEPTIONAL, Kind.FIBER} and Kind.EXCEPTIONAL in kinds:
        if _fits_v(fa, fb, e):
            return NodeType.V, False
        if _fits_v(fb, fa, e):
            return NodeType.V, True
    raise UnclassifiedNode(f"node {a.label} - {b.label} matches no template")


def classify_nodes(graph: ResolutionGraph, assignment: MultiplicityAssignment) -> list[NodeRecord]:
    """Tag every node of the boundary with its type, oriented as in the table."""
    d, e = graph.spec.num_sections, graph.spec.degree
    out = []
    for a, b, n in graph.nodes():
        kind, swap = _classify(a, b, assignment.forms[a.key], assignment.forms[b.key], d, e)
        if swap:
            a, b = b, a
        out.append(NodeRecord(a, b, assignment[a.key], assignment[b.key], kind, n))
    return out


def ccf_lcf(nodes: Iterable[NodeRecord], p: int) -> tuple[Fraction, int]:
    """(CCF, LCF): node-weighted sums of c and l at p - nu_a' nu_b."""
    ccf, lcf = Fraction(0), 0
    for node in nodes:
        q = node_argument(node.nu_a, node.nu_b, p)
        ccf += node.count * c_value(q, p)
        lcf += node.count * hj_length(q, p)
    return ccf, lcf


# ---------------------------------------------------------------------------
# invariants of the cover


@dataclass(frozen=True)
class SurfaceInvariants:
    p: int
    c1sq: int
    c2: int
    ccf: Fraction
    lcf: int
    good: bool
    bad_nodes: int
    num_nodes: int
    log_chern: LogChernPair
    chern_y: tuple[int, int]

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.c1sq, self.c2)


def leading_terms(log: LogChernPair, chern_y: tuple[int, int], p: int) -> tuple[Fraction, Fraction]:
    """(c1^2, c2) of the cover without the node error terms."""
    c1sq_y, c2_y = chern_y
    c1 = log.c1sq * p + 2 * (c2_y - log.c2) + Fraction(c1sq_y - log.c1sq + 2 * log.c2 - 2 * c2_y, p)
    c2 = log.c2 * p + (c2_y - log.c2)
    return Fraction(c1), Fraction(c2)


def chern_of_X(
    spec: ArrangementSpec,
    choice: ExtensionChoice | None,
    solution: PartitionSolution,
    minimal: bool = True,
    graph: ResolutionGraph | None = None,
) -> SurfaceInvariants:
    """Chern numbers of the p-th root cover for one solution.

    ``minimal`` selects the resolution in which transverse double points on
    removed fibers are kept as section-section nodes.
    """
    choice = choice or ExtensionChoice()
    _check_prime(spec, solution.p)
    solution.check(spec.degree)
    p = solution.p
    if graph is None:
        graph = build_resolution(spec, choice, minimal=minimal)
    log = log_chern_partial(spec, choice)
    chern_y = chern_of_Y(graph)
    nodes = classify_nodes(graph, assign_multiplicities(graph, solution))
    ccf, lcf = ccf_lcf(nodes, p)
    bad = sum(is_bad(node_argument(n.nu_a, n.nu_b, p), p) for n in nodes)
    lead1, lead2 = leading_terms(log, chern_y, p)
    c1 = lead1 - ccf
    c2 = lead2 + lcf
    if c1.denominator != 1 or c2.denominator != 1:
        raise IntegralityError(f"non-integral Chern numbers {c1}, {c2} at p = {p}")
    c1i, c2i = int(c1), int(c2)
    if (c1i + c2i) % 12:
        raise IntegralityError(f"c1^2 + c2 = {c1i + c2i} is not divisible by 12 at p = {p}")
    return SurfaceInvariants(p, c1i, c2i, ccf, lcf, bad == 0, bad, sum(n.count for n in nodes), log, chern_y)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class ConvergenceRow:
    p: int
    seed: int
    attempt: int
    good: bool
    c1sq: int | None
    c2: int | None
    ccf: Fraction | None
    lcf: int | None
    error: str = ""

    @property
    def ratio(self) -> Fraction | None:
        return None if self.c2 is None else Fraction(self.c1sq, self.c2)


def _run_prime(args: tuple) -> ConvergenceRow:
    spec, choice, p, seed, retries, minimal = args
    try:
        graph = build_resolution(spec, choice, minimal=minimal)
        best: tuple | None = None
        for attempt in range(max(retries, 1)):
            sol = sample_solution(spec, choice, p, seed=f"{seed}/{attempt}")
            inv = chern_of_X(spec, choice, sol, graph=graph)
            score = (inv.bad_nodes, abs(inv.ccf) + inv.lcf)
            if best is None or score < best[0]:
                best = (score, attempt, inv)
            if inv.good:
                break
        _, attempt, inv = best
        return ConvergenceRow(p, seed, attempt, inv.good, inv.c1sq, inv.c2, inv.ccf, inv.lcf)
    except (NoSolution, ValueError) as exc:
        return ConvergenceRow(p, seed, -1, False, None, None, None, None, str(exc))


def converge(
    spec: ArrangementSpec,
    choice: ExtensionChoice | None,
    primes: Sequence[int],
    seed: int = 0,
    retries: int = 64,
    workers: int = 1,
    minimal: bool = True,
) -> list[ConvergenceRow]:
    """One row per prime: the first good sample, or the least bad one."""
    require_valid(spec)
    choice = choice or ExtensionChoice()
    check_choice(spec, choice)
    jobs = [(spec, choice, p, seed, retries, minimal) for p in primes if is_prime(p)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_prime, jobs))
    return [_run_prime(j) for j in jobs]
