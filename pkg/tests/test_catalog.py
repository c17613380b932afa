from fractions import Fraction

import pytest

from cases import HEIGHT_CASES, projective_plane
from logchern.arrangement import classify, tau, validate
from logchern.catalog import (
    BUILTIN_NAMES,
    HeightInput,
    IncidenceStructure,
    builtin,
    de_bruijn_erdos,
    fano_plane,
    generic_incidence,
    generic_lines,
    height_check,
    near_pencil,
)


@pytest.mark.parametrize("g,delta,omega_sq,d_P,h_K,rhs,holds", HEIGHT_CASES)
def test_height_table(g, delta, omega_sq, d_P, h_K, rhs, holds):
    res = height_check(HeightInput(g, delta, omega_sq, Fraction(d_P), Fraction(h_K)))
    assert res.rhs == Fraction(rhs)
    assert res.lhs == Fraction(h_K)
    assert res.holds is holds
    assert bool(res.note) is not holds


def test_height_table_has_boundary_failures():
    boundary = [row for row in HEIGHT_CASES if Fraction(row[4]) == Fraction(row[5])]
    assert len(boundary) >= 5 and not any(row[-1] for row in boundary)


def test_height_input_checks():
    with pytest.raises(ValueError):
        HeightInput(1, 0, 0, Fraction(0), Fraction(0))
    with pytest.raises(ValueError):
        HeightInput(2, -1, 0, Fraction(0), Fraction(0))


@pytest.mark.parametrize("s", range(4, 9))
def test_generic_incidence_strict(s):
    res = de_bruijn_erdos(generic_incidence(s))
    assert res.r_ge_s and res.r > res.s and res.equality is None


def test_three_lines_are_a_near_pencil():
    assert de_bruijn_erdos(generic_incidence(3)).equality == "near-pencil"


def test_fano_equality():
    res = de_bruijn_erdos(fano_plane())
    assert (res.r, res.s, res.equality) == (7, 7, "projective-plane")


@pytest.mark.parametrize("q", [2, 3, 5])
def test_projective_planes(q):
    n = q * q + q + 1
    res = de_bruijn_erdos(IncidenceStructure.from_sets(projective_plane(q), n))
    assert (res.r, res.s, res.equality) == (n, n, "projective-plane")


@pytest.mark.parametrize("s", range(3, 9))
def test_near_pencils(s):
    res = de_bruijn_erdos(near_pencil(s))
    assert (res.r, res.s, res.equality) == (s, s, "near-pencil")


def test_malformed_incidence():
    with pytest.raises(ValueError):
        de_bruijn_erdos(IncidenceStructure.from_sets([(0, 1), (0, 1)], 2))
    with pytest.raises(ValueError):
        de_bruijn_erdos(IncidenceStructure.from_sets([(0, 1), (1, 2)], 3))
    with pytest.raises(ValueError):
        near_pencil(2)


@pytest.mark.parametrize(
    "name",
    ["triangle", "generic_lines(6)", "dual_hesse_conic", "tangent_quad(2)", "elliptic_triangle", "frobenius_triangle(3,2)", " generic_lines( 4 ) "],
)
def test_builtins_parse_and_validate(name):
    spec = builtin(name)
    assert validate(spec).ok
    assert tau(spec) > spec.degree * (spec.num_sections - 1)


def test_builtin_details():
    assert builtin("generic_lines(5)") == generic_lines(5)
    assert generic_lines(5).delta == 10
    assert classify(builtin("generic_lines(5)")).value == "simple-crossing"
    assert builtin("frobenius_triangle(3,2)").degree == 9
    assert set(BUILTIN_NAMES) >= {"triangle", "dual_hesse_conic", "tangent_quad"}


@pytest.mark.parametrize("name", ["nothing", "triangle(", "generic_lines(x)", ""])
def test_unknown_builtin(name):
    with pytest.raises(KeyError):
        builtin(name)


def test_builtin_argument_count():
    with pytest.raises(ValueError):
        builtin("generic_lines()")
    with pytest.raises(ValueError):
        builtin("triangle(3)")
