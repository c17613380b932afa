"""Closed-form log Chern numbers of extended and partially extended arrangements.

All arithmetic is in integers and `fractions.Fraction`.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .arrangement import (
    ArrangementSpec,
    ExtensionChoice,
    admissible_choices,
    check_choice,
    fiber_stats,
    removable_fibers,
    require_valid,
    tau,
)

__all__ = [
    "LogChernPair",
    "InequalityCheck",
    "InequalityReport",
    "ScanResult",
    "log_chern_extended",
    "log_chern_partial",
    "check_inequalities",
    "frobenius_ratio",
    "ratio_scan",
    "format_ratio",
    "table_rows",
    "render_table",
]


@dataclass(frozen=True)
class LogChernPair:
    c1sq: int
    c2: int

    @property
    def ratio(self) -> Fraction:
        if self.c2 == 0:
            raise ZeroDivisionError("c2 vanishes; the ratio is undefined")
        return Fraction(self.c1sq, self.c2)


def log_chern_extended(spec: ArrangementSpec) -> LogChernPair:
    g, e, d, delta = spec.genus, spec.degree, spec.num_sections, spec.delta
    c1sq = (d - 1) * (2 * delta + 4 * (g - 1) - e) + tau(spec)
    c2 = (d - 1) * (2 * (g - 1) + delta)
    return LogChernPair(c1sq, c2)


def log_chern_partial(spec: ArrangementSpec, choice: ExtensionChoice | None = None) -> LogChernPair:
    """Log Chern numbers after dropping the fibers in ``choice``."""
    base = log_chern_extended(spec)
    if choice is None or not choice.removed:
        return base
    check_choice(spec, choice)
    stats = [fiber_stats(spec, j) for j in choice.sorted()]
    sum_ko = sum(ko for ko, _ in stats)
    sum_k = sum(k for _, k in stats)
    eps = choice.epsilon
    return LogChernPair(base.c1sq - sum_ko - 2 * sum_k + 4 * eps, base.c2 - sum_k + 2 * eps)


# ---------------------------------------------------------------------------
# inequalities


@dataclass(frozen=True)
class InequalityCheck:
    name: str
    holds: bool
    lhs: Fraction
    rhs: Fraction
    applicable: bool = True
    note: str = ""

    @property
    def violated(self) -> bool:
        return self.applicable and not self.holds


@dataclass(frozen=True)
class InequalityReport:
    checks: tuple[InequalityCheck, ...]

    @property
    def ok(self) -> bool:
        return not any(c.violated for c in self.checks)

    def __getitem__(self, name: str) -> InequalityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]


def check_inequalities(spec: ArrangementSpec, choice: ExtensionChoice | None = None) -> InequalityReport:
    """Evaluate every numeric bound on the log Chern numbers.

    Characteristic-zero statements are evaluated on positive-characteristic
    input too, but flagged not applicable.  The bound ratio > 2 is only
    guaranteed for the extended arrangement; for a partial one it is
    reported as information.
    """
    require_valid(spec)
    choice = choice or ExtensionChoice()
    g, e, d, delta = spec.genus, spec.degree, spec.num_sections, spec.delta
    char0 = spec.char_p is None
    note_p = "" if char0 else f"characteristic {spec.char_p}: complex-only statement"
    t = tau(spec)
    ext = log_chern_extended(spec)
    part = log_chern_partial(spec, choice)
    F = Fraction
    tau_bound = (d - 1) * (delta + 2 * (g - 1) + e)
    checks = [
        InequalityCheck("tau > e(d-1)", t > e * (d - 1), F(t), F(e * (d - 1))),
        InequalityCheck("ext c1^2 >= 2d-1", ext.c1sq >= 2 * d - 1, F(ext.c1sq), F(2 * d - 1)),
        InequalityCheck("ext c2 >= d-1", ext.c2 >= d - 1, F(ext.c2), F(d - 1)),
        InequalityCheck("ext ratio > 2", ext.c1sq > 2 * ext.c2, ext.ratio if ext.c2 else F(ext.c1sq), F(2)),
        InequalityCheck("ext c1^2 < 3 c2", ext.c1sq < 3 * ext.c2, F(ext.c1sq), F(3 * ext.c2), char0, note_p),
        InequalityCheck("tau < (d-1)(delta+2(g-1)+e)", t < tau_bound, F(t), F(tau_bound), char0, note_p),
        InequalityCheck("tau <= (d-1)(delta+2(g-1)+e)", t <= tau_bound, F(t), F(tau_bound), char0, note_p),
        InequalityCheck("partial c1^2 >= 2", part.c1sq >= 2, F(part.c1sq), F(2)),
        InequalityCheck("partial c2 >= 1", part.c2 >= 1, F(part.c2), F(1)),
        InequalityCheck("partial c1^2 < 3 c2", part.c1sq < 3 * part.c2, F(part.c1sq), F(3 * part.c2), char0, note_p),
    ]
    if choice.removed:
        ratio = part.ratio if part.c2 else F(part.c1sq)
        checks.append(
            InequalityCheck("partial ratio > 2", part.c1sq > 2 * part.c2, ratio, F(2), False, "not guaranteed for partial arrangements")
        )
    is_lines = g == 0 and e == 1
    hs_note = "" if is_lines else "only for line arrangements (g = 0, e = 1)"
    if is_lines and not char0:
        hs_note = note_p
    checks.append(
        InequalityCheck(
            "partial c1^2 <= 8/3 c2",
            3 * part.c1sq <= 8 * part.c2,
            F(part.c1sq),
            F(8 * part.c2, 3),
            is_lines and char0,
            hs_note,
        )
    )
    return InequalityReport(tuple(checks))


def frobenius_ratio(spec: ArrangementSpec, r: int) -> Fraction:
    """2 + p^r (ratio - 2): extended ratio after r Frobenius pull-backs."""
    if spec.char_p is None:
        raise ValueError("Frobenius ratio needs a positive characteristic")
    base = log_chern_extended(spec).ratio
    return 2 + spec.char_p**r * (base - 2)


# ---------------------------------------------------------------------------
# ratio scan


@dataclass(frozen=True)
class ScanResult:
    best: ExtensionChoice
    ratio: Fraction
    pair: LogChernPair
    evaluated: int
    exhaustive: bool


def _score(args: tuple[ArrangementSpec, ExtensionChoice]) -> tuple[Fraction, tuple[int, ...], LogChernPair]:
    spec, choice = args
    pair = log_chern_partial(spec, choice)
    return pair.ratio, choice.sorted(), pair


def ratio_scan(
    spec: ArrangementSpec,
    budget: int | None = None,
    candidates: Iterable[ExtensionChoice] | None = None,
    seed: int = 0,
    workers: int = 1,
) -> ScanResult:
    """Largest partial-extended ratio over extension choices.

    With ``candidates`` only those are scored.  Otherwise all admissible
    choices are scored when there are at most ``budget`` of them (or budget
    is None), else ``budget`` random ones besides the extended arrangement.
    Ties go to the lexicographically smallest removed set.  Exploratory: no
    claim of optimality when sampling.
    """
    require_valid(spec)
    exhaustive = False
    if candidates is not None:
        pool = list(candidates)
    else:
        rem = removable_fibers(spec)
        cap = min(len(rem), spec.delta - 2)
        total = sum(math.comb(len(rem), k) for k in range(cap + 1))
        if budget is None or total <= budget:
            pool = list(admissible_choices(spec))
            exhaustive = True
        else:
            rng = random.Random(seed)
            pool = [ExtensionChoice()]
            for _ in range(budget):
                k = rng.randint(1, cap) if cap > 0 else 0
                pool.append(ExtensionChoice.of(rng.sample(rem, k)))
    for c in pool:
        check_choice(spec, c)
    jobs = [(spec, c) for c in dict.fromkeys(pool)]
    if workers > 1 and len(jobs) > 64:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            scored = list(ex.map(_score, jobs, chunksize=32))
    else:
        scored = [_score(j) for j in jobs]
    ratio = max(r for r, _, _ in scored)
    _, best_key, pair = min((t for t in scored if t[0] == ratio), key=lambda t: t[1])
    return ScanResult(ExtensionChoice.of(best_key), ratio, pair, len(scored), exhaustive)


# ---------------------------------------------------------------------------
# rendering


def format_ratio(x: Fraction, max_period: int = 6, digits: int = 4, overline: bool = False) -> str:
    """Decimal form; a short repetend is shown in parentheses, e.g. 2.21(6),
    or with combining overlines when ``overline`` is set.

    Long periods are truncated to ``digits`` places followed by '...'.
    """
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole, rem = divmod(x.numerator, x.denominator)
    den = x.denominator
    out: list[str] = []
    seen: dict[int, int] = {}
    while rem and rem not in seen:
        seen[rem] = len(out)
        rem *= 10
        out.append(str(rem // den))
        rem %= den
    if not out:
        return f"{sign}{whole}"
    if not rem:
        return f"{sign}{whole}.{''.join(out)}"
    start = seen[rem]
    period = len(out) - start
    if period <= max_period:
        head, rep = "".join(out[:start]), out[start:]
        if overline:
            return f"{sign}{whole}.{head}" + "".join(ch + "\u0305" for ch in rep)
        return f"{sign}{whole}.{head}({''.join(rep)})"
    while len(out) < digits:
        rem_digits = out[start:]
        out.extend(rem_digits)
    return f"{sign}{whole}.{''.join(out[:digits])}..."


def table_rows(spec: ArrangementSpec, choices: Sequence[ExtensionChoice]) -> list[dict]:
    rows = []
    for c in choices:
        pair = log_chern_partial(spec, c)
        rows.append(
            {
                "xi": list(c.sorted()),
                "label": c.label(),
                "c1sq": pair.c1sq,
                "c2": pair.c2,
                "ratio": str(pair.ratio),
                "decimal": format_ratio(pair.ratio),
            }
        )
    return rows


def render_table(spec: ArrangementSpec, choices: Sequence[ExtensionChoice]) -> str:
    """Aligned text table: one column per choice, rows c1^2, c2, ratio."""
    rows = table_rows(spec, choices)
    header = ["Xi"] + [r["label"] if r["xi"] else "{}" for r in rows]
    lines = [
        header,
        ["c1^2"] + [str(r["c1sq"]) for r in rows],
        ["c2"] + [str(r["c2"]) for r in rows],
        ["c1^2/c2"] + [r["decimal"] for r in rows],
    ]
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(" | ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in lines)
