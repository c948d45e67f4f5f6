"""Labeling search: indomain, labeling/1,2, count_solutions."""

import pytest

from clpkernel.errors import DomainError, FlounderingError, TypeError_
from clpkernel.terms import Var, deref, proper_list

from brute import queens_brute


def as_ints(t):
    return [deref(x) for x in proper_list(t)]


def test_indomain_enumerates_ascending(ask):
    assert [a["X"] for a in ask("X :: 3..7, indomain(X)")] == [3, 4, 5, 6, 7]


def test_indomain_skips_holes(ask):
    got = [a["X"] for a in
           ask("X :: 1.0..9.0, X #\\= 4, X #\\= 5, indomain(X)")]
    assert got == [1, 2, 3, 6, 7, 8, 9]


def test_indomain_on_an_integer_is_a_noop(ask):
    assert len(ask("indomain(5)")) == 1


def test_indomain_rejects_other_values(engine):
    with pytest.raises(TypeError_):
        engine.once("indomain(2.5)")


def test_indomain_needs_finite_bounds(engine):
    with pytest.raises(DomainError):
        engine.once("X #>= 1, indomain(X)")


def test_indomain_undoes_rejected_values(ask):
    got = ask("X :: 1..3, indomain(X), X #>= 3")
    assert [a["X"] for a in got] == [3]


def test_labeling_input_order_is_lexicographic(ask):
    got = [(a["X"], a["Y"]) for a in
           ask("X :: 1..2, Y :: 1..2, labeling([X, Y])")]
    assert got == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_labeling_interleaves_with_propagation(ask):
    got = [(a["X"], a["Y"]) for a in
           ask("X :: 1..3, Y :: 1..3, X #< Y, labeling([X, Y])")]
    assert got == [(1, 2), (1, 3), (2, 3)]


def test_labeling_accepts_ground_members(ask):
    assert len(ask("labeling([1, 2, 3])")) == 1
    got = ask("X :: 1..2, labeling([1, X, 2])")
    assert [a["X"] for a in got] == [1, 2]


def test_labeling2_strategies_agree_on_the_solution_set(ask):
    q = "X :: 1..3, Y :: 1..2, labeling(%s, [X, Y])"
    in_order = [(a["X"], a["Y"]) for a in ask(q % "input_order")]
    ff = [(a["X"], a["Y"]) for a in ask(q % "first_fail")]
    assert in_order == [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]
    # first_fail grabs Y (two values) before X (three), so Y varies slowest
    assert ff == [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2)]
    assert set(ff) == set(in_order)
    assert [(a["X"], a["Y"]) for a in ask(q % "ff")] == ff


def test_labeling2_bad_arguments(engine):
    with pytest.raises(DomainError):
        engine.once("X :: 1..2, labeling(cleverest_first, [X])")
    with pytest.raises(TypeError_):
        engine.once("X :: 1..2, labeling(7, [X])")
    with pytest.raises(TypeError_):
        engine.once("X :: 1..2, labeling(ff, foo)")


def test_labeling_empty_list(ask):
    assert len(ask("labeling([])")) == 1
    assert len(ask("labeling(ff, [])")) == 1


def test_count_solutions_counts_without_binding(first):
    a = first("count_solutions(member(X, [a, b, c]), N)")
    assert a["N"] == 3
    assert isinstance(deref(a["X"]), Var)


def test_count_solutions_restores_domains(first):
    a = first("X :: 1..5, count_solutions((X #>= 2, indomain(X)), N), "
              "get_bounds(X, L, H)")
    assert a["N"] == 4
    assert (a["L"], a["H"]) == (1, 5)


def test_count_solutions_refuses_delayed_goals(engine):
    with pytest.raises(FlounderingError) as e:
        engine.once("count_solutions(dif(X, a), N)")
    assert any("dif" in g for g in e.value.goals)
    with pytest.raises(FlounderingError):
        engine.once("X :: 0..3, Y :: 0..3, count_solutions(X + Y #= 4, N)")


QUEENS_SRC = """
queens(N, Qs) :-
    length(Qs, N),
    Qs :: 1..N,
    ( fromto(Qs, [Q|Rest], Rest, []) do
        ( foreach(R, Rest), count(D, 1, _), param(Q) do
            Q #\\= R,
            Q + D #\\= R,
            Q - D #\\= R
        )
    ),
    alldifferent(Qs),
    labeling(Qs).
"""


def test_queens_matches_exhaustive_search(engine, ask):
    engine.load(QUEENS_SRC)
    for n in (4, 5):
        got = [tuple(as_ints(a["Qs"])) for a in ask("queens(%d, Qs)" % n)]
        assert got == sorted(got)
        assert got == queens_brute(n)
