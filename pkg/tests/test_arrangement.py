import json
import math
import random

import pytest

from logchern.arrangement import (
    ArrangementClass,
    ArrangementSpec,
    ContactPoint,
    ExtensionChoice,
    FiberData,
    InvalidArrangement,
    InvalidChoice,
    admissible_choices,
    check_choice,
    classify,
    cluster_tree,
    dump_spec,
    etale_pullback,
    fiber_stats,
    frobenius_pullback,
    is_removable,
    load_spec,
    num_blowups,
    relabel,
    removable_fibers,
    require_valid,
    spec_from_dict,
    spec_to_dict,
    tau,
    tau_by_blowups,
    tau_point,
    validate,
)
from logchern.catalog import builtin, generic_lines, triangle
from logchern.generate import random_spec


def node(i, j):
    return FiberData.of(ContactPoint.ordinary((i, j)))


def test_triangle_is_valid():
    t = triangle()
    assert validate(t).ok
    assert t.delta == 3 and tau(t) == 3
    assert classify(t) is ArrangementClass.SIMPLE_CROSSING


def test_pair_sum_violation():
    spec = ArrangementSpec(0, 1, 3, (node(1, 2), node(1, 3), node(2, 3), node(1, 2)))
    report = validate(spec)
    assert "pair-sum" in report.codes()
    with pytest.raises(InvalidArrangement) as info:
        require_valid(spec)
    assert info.value.report == report


def test_ultrametric_violation():
    pt = ContactPoint.from_pairs((1, 2, 3), {(1, 2): 2, (1, 3): 2, (2, 3): 1})
    spec = ArrangementSpec(0, 2, 3, (FiberData.of(pt), node(2, 3), node(1, 2)))
    assert "ultrametric" in validate(spec).codes()


def test_other_validation_codes():
    full = ArrangementSpec(0, 1, 3, (FiberData.of(ContactPoint.ordinary((1, 2, 3))), node(1, 2), node(2, 3)))
    assert "full-intersection" in validate(full).codes()
    few = ArrangementSpec(0, 1, 3, (node(1, 2), FiberData.of(ContactPoint.ordinary((1, 3)), ContactPoint.ordinary((2, 3)))))
    assert "delta" in validate(few).codes()
    assert "delta" not in validate(ArrangementSpec(1, 1, 3, few.fibers)).codes()
    big = ArrangementSpec(0, 1, 3, (FiberData.of(ContactPoint.tangency(1, 2, 2)), node(1, 3), node(2, 3)))
    assert "contact-range" in validate(big).codes()
    twice = ArrangementSpec(0, 2, 3, (FiberData.of(ContactPoint.ordinary((1, 2)), ContactPoint.ordinary((1, 3))), node(2, 3), node(1, 2), node(1, 3), node(2, 3)))
    assert "fiber" in validate(twice).codes()
    outside = ArrangementSpec(0, 1, 3, (node(1, 4), node(1, 3), node(2, 3)))
    assert "structure" in validate(outside).codes()
    with pytest.raises(ValueError):
        ContactPoint.ordinary((1,))
    with pytest.raises(ValueError):
        FiberData.of()


def _transversal_example():
    pt = ContactPoint.from_pairs((1, 2, 3), {(1, 2): 2, (1, 3): 1, (2, 3): 1})
    fibers = (
        FiberData.of(pt),
        FiberData.of(ContactPoint.ordinary((1, 3)), ContactPoint.ordinary((2, 4))),
        FiberData.of(ContactPoint.ordinary((2, 3)), ContactPoint.ordinary((1, 4))),
        node(1, 4),
        node(2, 4),
        node(3, 4),
        node(3, 4),
    )
    return ArrangementSpec(0, 2, 4, fibers)


def test_classify_transversal_and_general():
    assert classify(_transversal_example()) is ArrangementClass.TRANSVERSAL
    tangent = ArrangementSpec(0, 2, 3, (FiberData.of(ContactPoint.tangency(1, 2, 2)), node(1, 3), node(1, 3), node(2, 3), node(2, 3)))
    assert classify(tangent) is ArrangementClass.GENERAL
    assert classify(builtin("dual_hesse_conic")) is ArrangementClass.TRANSVERSAL


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_tau_of_tangency_is_order(m):
    pt = ContactPoint.tangency(1, 2, m)
    assert tau_point(pt) == m
    assert tau_by_blowups(pt) == (m, m)


@pytest.mark.parametrize("m", [2, 3, 6])
def test_tau_of_ordinary_point(m):
    pt = ContactPoint.ordinary(range(1, m + 1))
    assert tau_point(pt) == m - 1
    assert tau_by_blowups(pt) == (m - 1, 1)


def test_cluster_tree_shape():
    pt = ContactPoint.from_pairs((1, 2, 3, 4), {(1, 2): 3, (3, 4): 2}, default=1)
    root = cluster_tree(pt)
    assert root.depth == 1 and root.sections == {1, 2, 3, 4}
    assert [c.sections for c in root.children] == [frozenset({1, 2}), frozenset({3, 4})]
    assert [(c.sections, c.depth) for c in root.walk()] == [
        ({1, 2, 3, 4}, 1),
        ({1, 2}, 2),
        ({1, 2}, 3),
        ({3, 4}, 2),
    ]
    assert tau_point(pt) == 3 + 1 + 1 + 1


def test_dual_hesse_tau_and_fiber_stats():
    s = builtin("dual_hesse_conic")
    assert (s.genus, s.degree, s.num_sections, s.delta, tau(s)) == (0, 3, 11, 20, 69)
    stats = [fiber_stats(s, j) for j in range(1, 21)]
    assert all(st == (1, 11) for st in stats[8:])
    assert stats[6] == stats[7] == (1, 9)
    assert stats[5] == (1, 5)
    assert stats[3] == stats[4] == (1, 4)
    assert sum(k_o for k_o, _ in stats[:3]) == 9
    assert sum(k for _, k in stats[:3]) == 18
    assert stats[0] == (3, 6)


def test_fiber_stats_triangle():
    assert [fiber_stats(triangle(), j) for j in (1, 2, 3)] == [(1, 3)] * 3


def test_removability():
    t = triangle()
    assert is_removable(t, 1)
    tangent = ArrangementSpec(
        0,
        2,
        3,
        (
            FiberData.of(ContactPoint.tangency(1, 2, 2)),
            node(1, 3),
            node(1, 3),
            node(2, 3),
            node(2, 3),
        ),
    )
    assert not is_removable(tangent, 1)
    assert removable_fibers(tangent) == [2, 3, 4, 5]
    mixed = ArrangementSpec(
        0,
        2,
        4,
        (
            FiberData.of(ContactPoint.ordinary((1, 2)), ContactPoint.tangency(3, 4, 2)),
            node(1, 2),
            node(1, 3),
            node(1, 3),
            node(1, 4),
            node(1, 4),
            node(2, 3),
            node(2, 3),
            node(2, 4),
            node(2, 4),
        ),
    )
    assert validate(mixed).ok
    assert not is_removable(mixed, 1)


def test_choice_labels_and_checks():
    assert ExtensionChoice.span(9, 20).label() == "{F9..F20}"
    assert ExtensionChoice().label() == "{}"
    assert ExtensionChoice.of([3, 1]).label() == "{F1,F3}"
    t = triangle()
    check_choice(t, ExtensionChoice.of([2]))
    with pytest.raises(InvalidChoice):
        check_choice(t, ExtensionChoice.of([1, 2]))
    with pytest.raises(InvalidChoice):
        check_choice(t, ExtensionChoice.of([4]))


def test_admissible_choices_order():
    t = triangle()
    assert [c.sorted() for c in admissible_choices(t)] == [(), (1,), (2,), (3,)]
    g4 = generic_lines(4)
    choices = list(admissible_choices(g4))
    assert len(choices) == sum(math.comb(6, k) for k in range(5))
    sizes = [c.epsilon for c in choices]
    assert sizes == sorted(sizes)


def test_frobenius_pullback():
    base = ArrangementSpec(**{**triangle().__dict__, "char_p": 2})
    up = frobenius_pullback(base, 1)
    assert up.degree == 2 and tau(up) == 6
    assert all(c == 2 for _, _, pt in up.points() for _, c in pt.contact)
    assert frobenius_pullback(base, 0) is base
    assert [fiber_stats(up, j) for j in (1, 2, 3)] == [fiber_stats(base, j) for j in (1, 2, 3)]
    assert removable_fibers(up) == []
    with pytest.raises(ValueError):
        frobenius_pullback(triangle(), 1)
    hesse = ArrangementSpec(**{**builtin("dual_hesse_conic").__dict__, "char_p": 3})
    assert tau(frobenius_pullback(hesse, 1)) == 207


def test_etale_pullback():
    spec = builtin("elliptic_triangle")
    up = etale_pullback(spec, 2)
    assert (up.genus, up.degree, up.delta) == (1, 4, 12)
    assert validate(up).ok
    assert etale_pullback(spec, 1) is spec
    with pytest.raises(ValueError):
        etale_pullback(triangle(), 2)


def test_random_specs_valid_and_tau_agrees():
    rng = random.Random(11)
    for _ in range(200):
        spec = random_spec(rng)
        assert validate(spec).ok
        assert spec.num_sections <= 8 and spec.degree <= 4 and spec.delta <= 10
        assert tau(spec) > spec.degree * (spec.num_sections - 1)
        by_sim = [tau_by_blowups(pt) for _, _, pt in spec.points()]
        assert sum(t for t, _ in by_sim) == tau(spec)
        assert sum(n for _, n in by_sim) == num_blowups(spec)


def test_relabel_invariance():
    rng = random.Random(3)
    for _ in range(50):
        spec = random_spec(rng)
        perm = list(range(1, spec.num_sections + 1))
        rng.shuffle(perm)
        order = list(range(1, spec.delta + 1))
        rng.shuffle(order)
        other = relabel(spec, dict(zip(range(1, spec.num_sections + 1), perm)), order)
        assert validate(other).ok
        assert tau(other) == tau(spec)
        assert classify(other) == classify(spec)
        assert other.delta == spec.delta


def test_json_roundtrip(tmp_path):
    for name in ("triangle", "dual_hesse_conic", "tangent_quad(3)", "frobenius_triangle(2,2)"):
        spec = builtin(name)
        path = tmp_path / "a.json"
        dump_spec(spec, path)
        back = load_spec(path)
        assert back == spec


def test_json_matrix_forms():
    full = {"genus": 0, "degree": 2, "d": 3, "fibers": [[{"sections": [1, 2, 3], "contact": [[0, 2, 1], [2, 0, 1], [1, 1, 0]]}]]}
    lower = {"genus": 0, "degree": 2, "d": 3, "fibers": [[{"sections": [1, 2, 3], "contact": [[2], [1, 1]]}]]}
    padded = {"genus": 0, "degree": 2, "d": 3, "fibers": [[{"sections": [1, 2, 3], "contact": [[], [2], [1, 1]]}]]}
    diag = {"genus": 0, "degree": 2, "d": 3, "fibers": [[{"sections": [1, 2, 3], "contact": [[0], [2, 0], [1, 1, 0]]}]]}
    pts = {spec_from_dict(d).fibers[0].points[0] for d in (full, lower, padded, diag)}
    assert len(pts) == 1
    (pt,) = pts
    assert pt.contact_of(1, 2) == 2 and pt.contact_of(3, 1) == 1
    ordinary = {"genus": 0, "degree": 1, "d": 3, "fibers": [[{"sections": [1, 2]}], [{"sections": [1, 3]}], [{"sections": [2, 3]}]]}
    assert spec_from_dict(ordinary) == ArrangementSpec(0, 1, 3, triangle().fibers)
    assert spec_to_dict(triangle())["fibers"][0] == [{"sections": [1, 2], "contact": [[1]]}]


def test_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"genus": 0,\n "degree": }')
    with pytest.raises(ValueError, match="line 2"):
        load_spec(bad)
    bad.write_text(json.dumps({"genus": 0, "d": 3, "fibers": []}))
    with pytest.raises(ValueError, match="degree"):
        load_spec(bad)
    bad.write_text(json.dumps({"genus": 0, "degree": 1, "d": 3, "fibers": [[{"sections": [1, 2], "contact": [[1, 2, 3]]}]]}))
    with pytest.raises(ValueError, match="fiber 1 point 1"):
        load_spec(bad)
