import dataclasses
import random

import pytest

from logchern.arrangement import ArrangementSpec, ContactPoint, ExtensionChoice, FiberData, admissible_choices
from logchern.catalog import BUILTIN_NAMES, builtin, dual_hesse_table_choices, triangle
from logchern.generate import random_spec
from logchern.invariants import log_chern_partial
from logchern.resolution import Kind, audit, build_resolution, chern_of_Y, log_chern_via_graph, to_dot

SAMPLES = ["triangle", "generic_lines(5)", "dual_hesse_conic", "tangent_quad(3)", "elliptic_triangle", "frobenius_triangle(2,2)"]


def test_triangle_graph():
    g = build_resolution(triangle())
    assert len(g.components) == 10
    assert g.s == 3 and g.t2 == 15
    assert all(c.self_int == -1 for c in g.components if c.kind is not Kind.ZERO_SECTION)
    assert g[("S", 4)].self_int == -1
    assert chern_of_Y(g) == (5, 7)
    assert log_chern_via_graph(g).c1sq == 5


def test_triangle_partial_graph():
    g = build_resolution(triangle(), ExtensionChoice.of([1]))
    assert not g[("F", 1)].in_divisor
    assert log_chern_via_graph(g) == log_chern_partial(triangle(), ExtensionChoice.of([1]))
    assert (log_chern_via_graph(g).c1sq, log_chern_via_graph(g).c2) == (2, 1)


def test_minimal_keeps_double_points_on_removed_fibers():
    g = build_resolution(triangle(), ExtensionChoice.of([1]), minimal=True)
    assert g.s == 2
    assert g.meet(("S", 1), ("S", 2)) == 1
    assert log_chern_via_graph(g) == log_chern_partial(triangle(), ExtensionChoice.of([1]))


def test_tangency_chain():
    pt = ContactPoint.tangency(1, 2, 2)
    ordinary = lambda i, j: FiberData.of(ContactPoint.ordinary((i, j)))
    spec = ArrangementSpec(0, 2, 3, (FiberData.of(pt), ordinary(1, 3), ordinary(1, 3), ordinary(2, 3), ordinary(2, 3)))
    g = build_resolution(spec)
    chain = [c for c in g.components if c.kind is Kind.EXCEPTIONAL and c.fiber == 1]
    assert [c.self_int for c in chain] == [-2, -1]
    assert [c.depth for c in chain] == [1, 2]
    assert g[("F", 1)].self_int == -1
    assert g.meet(chain[0].key, chain[1].key) == 1
    assert g.meet(("S", 1), ("S", 2)) == 0
    assert g.section_total_transform(1)[chain[1].key] == 2
    assert not audit(g)


def test_chern_of_Y_without_blowups():
    g = dataclasses.replace(build_resolution(triangle()), s=0)
    assert chern_of_Y(g) == (8, 4)
    assert chern_of_Y(g, g=2) == (-8, -4)


def test_labels():
    g = build_resolution(builtin("tangent_quad(2)"))
    labels = {c.label for c in g.components}
    assert {"S1", "S5", "F1", "E1[1,2]^1", "E1[1,2]^2"} <= labels


@pytest.mark.parametrize("name", SAMPLES)
@pytest.mark.parametrize("minimal", [False, True])
def test_audit_on_builtins(name, minimal):
    spec = builtin(name)
    choices = [ExtensionChoice()]
    if name == "dual_hesse_conic":
        choices += [ExtensionChoice.of(xi) for xi in dual_hesse_table_choices()]
    else:
        choices = list(admissible_choices(spec))[:40]
    for choice in choices:
        g = build_resolution(spec, choice, minimal=minimal)
        assert audit(g) == []
        assert log_chern_via_graph(g) == log_chern_partial(spec, choice)


def test_names_cover_builtins():
    assert set(n.split("(")[0] for n in SAMPLES) == set(BUILTIN_NAMES)


def test_random_specs_oracle_equal():
    rng = random.Random(21)
    for _ in range(40):
        spec = random_spec(rng, max_d=6, max_e=3, max_delta=7)
        for choice in list(admissible_choices(spec))[:30]:
            for minimal in (False, True):
                g = build_resolution(spec, choice, minimal=minimal)
                assert not audit(g)
                assert log_chern_via_graph(g) == log_chern_partial(spec, choice)


def test_dot_output():
    dot = to_dot(build_resolution(triangle(), ExtensionChoice.of([2])), name="tri")
    assert dot.startswith("graph tri {")
    assert dot.rstrip().endswith("}")
    assert dot.count("style=dashed") == 1
    assert dot.count(" -- ") == len(list(build_resolution(triangle(), ExtensionChoice.of([2])).nodes()))
