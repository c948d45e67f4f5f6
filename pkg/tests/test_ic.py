"""Interval domains and the linear constraint solver."""

import math
from fractions import Fraction
from random import Random

import pytest

from clpkernel import make_engine
from clpkernel.errors import (InstantiationError, TypeError_,
                              UncertaintyError, UnsupportedError)
from clpkernel.ic import (Domain, ensure_domain, exclude_value, format_domain,
                          get_domain, impose_integrality, impose_max,
                          impose_min)
from clpkernel.terms import Var, deref

from brute import feasible_points


def hx(s):
    return float.fromhex(s)


# ----------------------------------------------------------------------
# the domain record itself

def test_format_domain_texts():
    assert format_domain(Domain(1, 5, integral=True)) == "{1..5}"
    assert format_domain(Domain(3, 3, integral=True)) == "{3..3}"
    assert format_domain(Domain(0.5, 2.5)) == "{0.5..2.5}"
    assert format_domain(Domain(-math.inf, math.inf)) == "{-inf..inf}"
    # holes split an integer domain into segments
    assert (format_domain(Domain(1, 10, integral=True, holes=frozenset({4})))
            == "{[1..3, 5..10]}")
    assert (format_domain(Domain(2, 9, integral=True,
                                 holes=frozenset({3, 4, 7})))
            == "{[2, 5..6, 8..9]}")


def test_impose_min_integral_rounds_up():
    e = make_engine()
    x = Var()
    d = ensure_domain(e, x)
    assert impose_integrality(e, x)
    assert impose_min(e, x, Fraction(7, 2))
    assert d.lo == 4
    assert impose_max(e, x, 9.2)
    assert d.hi == 9
    # tightening past the other end fails without touching the domain
    assert not impose_min(e, x, 10)
    assert (d.lo, d.hi) == (4, 9)


def test_impose_bounds_skip_holes():
    e = make_engine()
    x = Var()
    d = ensure_domain(e, x)
    impose_integrality(e, x)
    impose_min(e, x, 1)
    impose_max(e, x, 9)
    assert exclude_value(e, x, 7)
    assert d.holes == frozenset({7})
    # floor(7.5) = 7 sits in a hole, so the bound slides to 6
    assert impose_max(e, x, Fraction(15, 2))
    assert d.hi == 6
    assert d.holes == frozenset()


def test_continuous_bounds_round_outward():
    e = make_engine()
    x = Var()
    d = ensure_domain(e, x)
    assert impose_min(e, x, Fraction(1, 3))
    assert d.lo == hx("0x1.5555555555555p-2")
    y = Var()
    dy = ensure_domain(e, y)
    assert impose_max(e, y, Fraction(1, 3))
    assert dy.hi == hx("0x1.5555555555556p-2")
    # both floats bracket the exact rational
    assert d.lo < Fraction(1, 3) < dy.hi


def test_exclude_value_variants():
    e = make_engine()
    x = Var()
    ensure_domain(e, x)
    impose_integrality(e, x)
    impose_min(e, x, 1)
    impose_max(e, x, 9)
    d = get_domain(x)
    assert exclude_value(e, x, 5)
    assert d.holes == frozenset({5})
    # excluding an endpoint moves the bound instead of punching a hole
    assert exclude_value(e, x, 1)
    assert d.lo == 2
    assert exclude_value(e, x, 9)
    assert d.hi == 8
    # values that cannot be in an integer domain anyway are no-ops
    assert exclude_value(e, x, 20)
    assert exclude_value(e, x, 2.5)
    assert exclude_value(e, x, math.inf)
    assert d.holes == frozenset({5})


def test_exclude_from_continuous_raises():
    e = make_engine()
    x = Var()
    ensure_domain(e, x)
    with pytest.raises(TypeError_):
        exclude_value(e, x, 1)


def test_singleton_domain_instantiates():
    e = make_engine()
    x = Var()
    ensure_domain(e, x)
    impose_integrality(e, x)
    impose_min(e, x, 3)
    assert isinstance(deref(x), Var)
    impose_max(e, x, 3)
    assert deref(x) == 3
    # with the variable gone, further imposes test the value
    assert impose_min(e, x, 2)
    assert not impose_min(e, x, 4)
    assert not exclude_value(e, x, 3)
    assert exclude_value(e, x, 7)


# ----------------------------------------------------------------------
# posting domains from goals

def test_domain_posting_display(first, fmt):
    a = first("X :: 1..5")
    assert fmt(a["X"]) == "_{1..5}"
    b = first("X :: [1, 3, 5, 6]")
    assert fmt(b["X"]) == "_{[1, 3, 5..6]}"
    c = first("X :: 0.5..2.5")
    assert fmt(c["X"]) == "_{0.5..2.5}"


def test_breal_endpoints_widen_the_domain(first, fmt):
    a = first("X :: 0.99__1.01..2.0")
    assert fmt(a["X"]) == "_{0.99..2.0}"


def test_domain_posting_over_lists_and_arrays(engine, first):
    a = first("[X, Y] :: 1..3")
    for n in "XY":
        d = get_domain(deref(a[n]))
        assert (d.lo, d.hi, d.integral) == (1, 3, True)
    b = first("dim(M, [2]), M :: 1..4")
    m = deref(b["M"])
    assert m.name == "[]" and m.arity == 2
    for cell in m.args:
        d = get_domain(deref(cell))
        assert (d.lo, d.hi) == (1, 4)


def test_singleton_range_binds_immediately(first):
    a = first("X :: 3..3")
    assert a["X"] == 3


# ----------------------------------------------------------------------
# arithmetic relations

def test_relations_narrow_bounds(first, fmt):
    assert fmt(first("X :: 1..9, X #>= 5")["X"]) == "_{5..9}"
    assert fmt(first("X :: 1..5, X #> 3")["X"]) == "_{4..5}"
    assert fmt(first("X :: 1..5, X #< 3")["X"]) == "_{1..2}"
    assert fmt(first("X :: 1..5, X #=< 2")["X"]) == "_{1..2}"


def test_relations_impose_integrality(first, fmt):
    a = first("X :: 0.0..3.5, X #=< 9")
    assert fmt(a["X"]) == "_{0..3}"


def test_single_variable_constraint_needs_no_suspension(first, fmt):
    a = first("X :: 1..5, X #>= 3")
    assert fmt(a["X"]) == "_{3..5}"
    assert a.delayed == []


def test_eq_propagates_both_ways(first, fmt):
    a = first("X :: 0..10, Y :: 0..10, X + Y #= 4")
    assert fmt(a["X"]) == "_{0..4}"
    assert fmt(a["Y"]) == "_{0..4}"
    assert a.delayed == ["_{0..4} + _{0..4} + -4 #= 0"]


def test_eq_with_coefficients(first, fmt):
    # 2X + 3Y = 6 over 0..10 squeezes to X =< 3, Y =< 2
    a = first("X :: 0..10, Y :: 0..10, 2 * X + 3 * Y #= 6")
    assert fmt(a["X"]) == "_{0..3}"
    assert fmt(a["Y"]) == "_{0..2}"


def test_neq_punches_holes_until_instantiation(first, fmt):
    a = first("X :: 1..5, X #\\= 3")
    assert fmt(a["X"]) == "_{[1..2, 4..5]}"
    b = first("X :: 1..3, X #\\= 2, X #\\= 1")
    assert b["X"] == 3


def test_entailed_constraint_leaves_nothing_delayed(first):
    a = first("X :: 0..10, Y :: 0..10, X + Y #=< 100")
    assert a.delayed == []


def test_unsatisfiable_relation_fails(ask):
    assert ask("X :: 1..3, X #> 5") == []
    assert ask("X :: 1..2, Y :: 1..2, X + Y #= 9") == []


def test_nonlinear_terms_are_rejected(engine):
    with pytest.raises(UnsupportedError):
        engine.once("X :: 1..5, Y :: 1..5, X * Y #= 6")


def test_backtracking_restores_bounds(first):
    a = first("X :: 1..9, ( X #>= 5, fail ; true ), get_bounds(X, L, H)")
    assert (a["L"], a["H"]) == (1, 9)


# ----------------------------------------------------------------------
# what a domain variable may be bound to

def test_instantiation_checks_membership(ask, first):
    assert first("X :: 1..5, X = 3")["X"] == 3
    assert ask("X :: 1..5, X = 7") == []
    assert ask("X :: 1..5, X = 2.5") == []
    assert first("X :: 0.5..2.5, X = 1")["X"] == 1


def test_breal_inside_continuous_domain_is_fine(first, fmt):
    a = first("X :: 0.5..2.5, X = 0.75__1.25")
    assert fmt(a["X"]) == "0.75__1.25"


def test_breal_outside_domain_fails(ask):
    assert ask("X :: 0.5..2.5, X = 3.5__4.0") == []


def test_breal_straddling_a_bound_is_undecidable(engine):
    with pytest.raises(UncertaintyError) as e:
        engine.once("X :: 0.5..2.5, X = 2.0__3.0")
    assert "partially overlaps" in str(e.value)


def test_aliasing_merges_domains(ask, first, fmt):
    a = first("X :: 1..5, Y :: 3..8, X = Y")
    assert fmt(a["X"]) == "_{3..5}"
    assert fmt(a["Y"]) == "_{3..5}"
    assert ask("X :: 1..2, Y :: 5..6, X = Y") == []


def test_aliasing_keeps_holes_from_both_sides(first, fmt):
    a = first("X :: 1..5, X #\\= 3, Y :: 2..9, Y #\\= 7, X = Y")
    assert fmt(a["X"]) == "_{[2, 4..5]}"


# ----------------------------------------------------------------------
# alldifferent

def test_alldifferent_ground_duplicates_fail(ask):
    assert ask("alldifferent([1, 2, 1])") == []
    assert ask("X :: 1..5, alldifferent([X, X])") == []


def test_alldifferent_excludes_ground_values(first, fmt):
    a = first("X :: 1..3, alldifferent([X, 2])")
    assert fmt(a["X"]) == "_{[1, 3]}"


def test_alldifferent_reacts_to_instantiation(first, fmt):
    a = first("X :: 1..3, Y :: 1..3, alldifferent([X, Y]), X = 2")
    assert fmt(a["Y"]) == "_{[1, 3]}"


def test_alldifferent_is_not_pigeonhole_complete(ask, first):
    # forward checking alone leaves the inconsistency to the search
    a = first("X :: 1..2, Y :: 1..2, Z :: 1..2, alldifferent([X, Y, Z])")
    assert a.delayed == ["alldifferent([_{1..2}, _{1..2}, _{1..2}])"]
    assert ask("X :: 1..2, Y :: 1..2, Z :: 1..2, "
               "alldifferent([X, Y, Z]), labeling([X, Y, Z])") == []


# ----------------------------------------------------------------------
# the user-level geq/2 from the library prelude

def test_geq_propagates_and_stays_suspended(first):
    a = first("X :: 1..5, Y :: 2..6, geq(X, Y)")
    assert a.delayed == ["geq(_{2..5}, _{2..5})"]


def test_geq_dies_once_entailed(first):
    a = first("X :: 1..5, Y :: 2..6, geq(X, Y), X #>= 5")
    assert a["X"] == 5
    assert a.delayed == []


# ----------------------------------------------------------------------
# reading bounds back

def test_bounds_builtins(first):
    a = first("X :: 2..7, get_min(X, L), get_max(X, H), get_bounds(X, L2, H2)")
    assert (a["L"], a["H"]) == (2, 7)
    assert (a["L2"], a["H2"]) == (2, 7)


def test_bounds_builtins_on_numbers(first):
    a = first("get_bounds(4, L, H)")
    assert (a["L"], a["H"]) == (4, 4)


def test_bounds_need_a_domain(engine):
    with pytest.raises(InstantiationError):
        engine.once("get_min(X, L)")


def test_get_min_reports_rounded_continuous_bound(first):
    a = first("X :: 0.0..1.0, impose_min(X, 1_3), get_min(X, L)")
    assert a["L"] == hx("0x1.5555555555555p-2")


# ----------------------------------------------------------------------
# propagation never loses a solution

def _answer_values(ans, name):
    v = deref(ans[name])
    if isinstance(v, Var):
        d = get_domain(v)
        return set(range(d.lo, d.hi + 1)) - set(d.holes or ())
    return {v}


def test_propagation_sound_against_enumeration():
    rng = Random(20240813)
    names = ["A", "B", "C"]
    for _ in range(40):
        n = rng.randint(2, 3)
        doms = []
        for _i in range(n):
            lo = rng.randint(0, 4)
            doms.append((lo, lo + rng.randint(0, 4)))
        cons = []
        con_txt = []
        for _c in range(rng.randint(1, 2)):
            rel = rng.choice(["#=", "#=<", "#\\="])
            pairs = [(i, rng.choice([-2, -1, 1, 2]))
                     for i in range(n) if rng.random() < 0.8]
            if not pairs:
                pairs = [(0, 1)]
            k = rng.randint(-6, 6)
            txt = ""
            for i, c in pairs:
                if txt:
                    txt += " + " if c > 0 else " - "
                    txt += "%d * %s" % (abs(c), names[i])
                else:
                    txt = "%d * %s" % (c, names[i])
            txt += (" + %d" % k) if k >= 0 else (" - %d" % -k)
            con_txt.append("%s %s 0" % (txt, rel))
            cons.append(({"#=": "=", "#=<": "=<", "#\\=": "\\="}[rel],
                         k, pairs))
        query = ", ".join("%s :: %d..%d" % (names[i], lo, hi)
                          for i, (lo, hi) in enumerate(doms))
        query += ", " + ", ".join(con_txt)

        eng = make_engine()
        ans = eng.once(query)
        pts = feasible_points([set(range(lo, hi + 1)) for lo, hi in doms],
                              cons)
        if ans is None:
            assert pts == [], query
        else:
            for i in range(n):
                need = {p[i] for p in pts}
                assert need <= _answer_values(ans, names[i]), query
