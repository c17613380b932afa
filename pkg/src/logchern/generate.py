"""Random arrangements for property tests.

Two sources.  ``random_spec`` draws combinatorial data satisfying every
validation rule; such data need not come from actual curves, so it can
break inequalities that hold over the complex numbers.  ``random_lines``
and ``random_realizable`` only produce arrangements that exist: plane
lines seen from a point off them, optionally pulled back by t -> t^n.
"""

from __future__ import annotations

import itertools
import math
import random

from .arrangement import ArrangementSpec, ContactPoint, FiberData, validate

__all__ = ["random_spec", "random_lines", "base_change", "random_realizable"]


def _ultrametric_point(rng: random.Random, sections: list[int], room: dict, depth: int) -> ContactPoint:
    """Contacts from random words: 1 + length of the common prefix."""
    words = {s: tuple(rng.randrange(2) for _ in range(depth)) for s in sections}
    pairs = {}
    for i, j in itertools.combinations(sorted(sections), 2):
        shared = 0
        while shared < depth and words[i][shared] == words[j][shared]:
            shared += 1
        pairs[(i, j)] = min(1 + shared, room[(i, j)])
    pt = ContactPoint.from_pairs(sections, pairs)
    if validate_point(pt):
        return pt
    return ContactPoint.ordinary(sections)


def validate_point(pt: ContactPoint) -> bool:
    for a, b, c in itertools.combinations(pt.sections, 3):
        vals = sorted((pt.contact_of(a, b), pt.contact_of(a, c), pt.contact_of(b, c)))
        if vals[0] != vals[1]:
            return False
    return True


def random_spec(
    rng: random.Random,
    max_d: int = 8,
    max_e: int = 4,
    max_delta: int = 10,
    genera: tuple[int, ...] = (0, 0, 1, 2),
    tries: int = 200,
) -> ArrangementSpec:
    """A valid combinatorial arrangement with d <= max_d, e <= max_e, delta <= max_delta."""
    for _ in range(tries):
        g = rng.choice(genera)
        e = rng.randint(1, max_e)
        d = rng.randint(3, max_d)
        room = {pair: e for pair in itertools.combinations(range(1, d + 1), 2)}
        fibers: list[list[ContactPoint]] = []
        for _ in range(rng.randint(0, max_delta)):
            free = list(range(1, d + 1))
            rng.shuffle(free)
            points = []
            while len(free) >= 2 and rng.random() < 0.7:
                size = rng.randint(2, min(len(free), d - 1))
                secs, free = free[:size], free[size:]
                if any(room[p] == 0 for p in itertools.combinations(sorted(secs), 2)):
                    continue
                pt = _ultrametric_point(rng, secs, room, rng.randint(0, e - 1))
                for pair, c in pt.contact:
                    room[pair] -= c
                points.append(pt)
            if points:
                fibers.append(points)
        # leftover contact goes into two-section points, packed first-fit
        for (i, j), left in room.items():
            while left:
                c = rng.randint(1, left)
                left -= c
                pt = ContactPoint.tangency(i, j, c)
                order = list(range(len(fibers) + 1))
                rng.shuffle(order)
                for k in order:
                    if k == len(fibers):
                        fibers.append([pt])
                        break
                    used = {s for q in fibers[k] for s in q.sections}
                    if i not in used and j not in used:
                        fibers[k].append(pt)
                        break
        spec = ArrangementSpec(g, e, d, tuple(FiberData(tuple(f)) for f in fibers), label="random")
        if spec.delta <= max_delta and validate(spec).ok:
            return spec
    raise RuntimeError("no valid arrangement found; loosen the limits")


def _normalize(w: tuple[int, ...]) -> tuple[int, ...]:
    g = math.gcd(*w)
    w = tuple(c // g for c in w)
    first = next(c for c in w if c)
    return tuple(-c for c in w) if first < 0 else w


def _cross(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    return _normalize((u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]))


def random_lines(rng: random.Random, d: int, coeff: int = 2, tries: int = 500) -> ArrangementSpec:
    """d plane lines with small integer coefficients, projected from a point off them.

    The pencil through the point makes the lines sections of degree 1 over
    P^1; each line of the pencil through a multiple point is a singular fiber.
    """
    for _ in range(tries):
        lines: list[tuple[int, int, int]] = []
        while len(lines) < d:
            v = tuple(rng.randint(-coeff, coeff) for _ in range(3))
            if any(v[:2]):
                n = _normalize(v)
                if n not in lines:
                    lines.append(n)
        points: dict[tuple[int, int, int], set[int]] = {}
        for a, b in itertools.combinations(range(d), 2):
            q = _cross(lines[a], lines[b])
            points.setdefault(q, set()).update((a + 1, b + 1))
        if any(len(s) == d for s in points.values()):
            continue
        centre = tuple(rng.randint(-50, 50) for _ in range(2)) + (1,)
        if any(sum(x * y for x, y in zip(ln, centre)) == 0 for ln in lines):
            continue
        fibers: dict[tuple[int, int, int], list[ContactPoint]] = {}
        for q, secs in points.items():
            fibers.setdefault(_cross(centre, q), []).append(ContactPoint.ordinary(secs))
        spec = ArrangementSpec(0, 1, d, tuple(FiberData(tuple(f)) for f in fibers.values()), label="lines")
        if validate(spec).ok:
            return spec
    raise RuntimeError("could not place the lines")


def base_change(spec: ArrangementSpec, n: int, branch: tuple[int, ...] = ()) -> ArrangementSpec:
    """Pull back along t -> t^n of P^1, branched over the fibers in ``branch``.

    At most two branch fibers; they keep one copy with contacts times n,
    every other singular fiber appears n times.
    """
    if spec.genus != 0:
        raise ValueError("base change t -> t^n needs base P^1")
    if len(branch) > 2 or len(set(branch)) != len(branch):
        raise ValueError("t -> t^n is branched over two points")
    fibers = []
    for j, fiber in enumerate(spec.fibers, 1):
        if j in branch:
            fibers.append(FiberData(tuple(pt.scaled(n) for pt in fiber.points)))
        else:
            fibers.extend([fiber] * n)
    return ArrangementSpec(0, spec.degree * n, spec.num_sections, tuple(fibers), spec.char_p, f"{spec.label} t^{n}")


def random_realizable(rng: random.Random, max_d: int = 7, max_n: int = 3) -> ArrangementSpec:
    """A line arrangement, possibly pulled back by a cyclic cover of the base."""
    spec = random_lines(rng, rng.randint(3, max_d))
    n = rng.randint(1, max_n)
    if n == 1:
        return spec
    branch = tuple(rng.sample(range(1, spec.delta + 1), rng.randint(0, min(2, spec.delta))))
    return base_change(spec, n, branch)
