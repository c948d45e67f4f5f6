"""The suspension scheduler: priority buckets, demons, kill and revive."""

import pytest

from clpkernel.errors import DomainError
from clpkernel.store import Store
from clpkernel.susp import (EXECUTED, MAIN_PRIORITY, NUM_PRIORITIES, SCHEDULED,
                            SUSPENDED, Scheduler, Suspension)
from clpkernel.terms import Atom, Struct, deref


def test_priority_range_enforced():
    Suspension(1, Atom("g"), 1, None)
    Suspension(2, Atom("g"), NUM_PRIORITIES, None)
    with pytest.raises(DomainError):
        Suspension(3, Atom("g"), 0, None)
    with pytest.raises(DomainError):
        Suspension(4, Atom("g"), NUM_PRIORITIES + 1, None)


def test_twelve_levels_main_weaker_than_all():
    assert NUM_PRIORITIES == 12
    assert MAIN_PRIORITY == 13


def test_pop_runnable_is_strictly_below_the_limit():
    st = Store()
    sched = Scheduler()
    s = Suspension(1, Atom("g"), 5, None)
    sched.schedule([s], st)
    assert sched.pop_runnable(5) is None  # own priority does not interrupt
    assert sched.pop_runnable(6) is s


def test_urgency_order_and_fifo_within_a_bucket():
    st = Store()
    sched = Scheduler()
    a = Suspension(1, Atom("a"), 7, None)
    b = Suspension(2, Atom("b"), 2, None)
    c = Suspension(3, Atom("c"), 7, None)
    for s in (a, b, c):
        sched.schedule([s], st)
    order = []
    s = sched.pop_runnable(MAIN_PRIORITY)
    while s is not None:
        order.append(s)
        st.set_slot(s, "state", EXECUTED)
        s = sched.pop_runnable(MAIN_PRIORITY)
    assert order == [b, a, c]


def test_redundant_waking_is_harmless():
    st = Store()
    sched = Scheduler()
    s = Suspension(1, Atom("g"), 3, None)
    sched.schedule([s], st)
    sched.schedule([s], st)
    assert sched.pop_runnable(MAIN_PRIORITY) is s
    st.set_slot(s, "state", EXECUTED)
    assert sched.pop_runnable(MAIN_PRIORITY) is None


def test_backtracking_unschedules_and_queue_skips_stale_entries():
    st = Store()
    sched = Scheduler()
    s = Suspension(1, Atom("g"), 3, None)
    m = st.push_choicepoint()
    sched.schedule([s], st)
    assert s.state == SCHEDULED
    st.backtrack_to(m)
    assert s.state == SUSPENDED  # the state change was trailed
    assert sched.pop_runnable(MAIN_PRIORITY) is None  # stale entry dropped
    sched.schedule([s], st)
    assert sched.pop_runnable(MAIN_PRIORITY) is s


def test_waking_is_two_stage(engine):
    runs = []

    def bi(eng, args, module):
        runs.append(1)
        return True

    engine.add_builtin(engine.main, "tick", 0, bi)
    s = engine.make_suspension(Atom("tick"), 5)
    engine.wake([s])
    assert runs == []  # only moved to the queue
    assert s.state == SCHEDULED
    assert engine.drain()
    assert runs == [1]
    assert s.state == EXECUTED


def test_demon_goes_back_to_suspended_and_fires_repeatedly(engine):
    runs = []

    def bi(eng, args, module):
        runs.append(1)
        return True

    pred = engine.add_builtin(engine.main, "tick", 0, bi)
    pred.demon = True
    s = engine.make_suspension(Atom("tick"), 4)
    assert s.demon
    for _ in range(5):
        engine.wake([s])
        assert engine.drain()
        assert s.state == SUSPENDED
    assert len(runs) == 5
    engine.kill_suspension(s)
    engine.wake([s])
    assert engine.drain()
    assert len(runs) == 5  # killed demons never run again


def test_kill_is_undone_by_backtracking(engine):
    st = engine.store
    s = engine.make_suspension(Atom("true"), 6)
    m = st.push_choicepoint()
    engine.kill_suspension(s)
    assert s.state == EXECUTED
    st.backtrack_to(m)
    assert s.state == SUSPENDED


def test_suspension_record_is_undone_by_backtracking(engine):
    st = engine.store
    m = st.push_choicepoint()
    s = engine.make_suspension(Atom("true"), 6)
    assert s.sid in engine.suspensions
    st.backtrack_to(m)
    assert s.sid not in engine.suspensions


def test_more_urgent_wakings_interrupt_a_running_goal(engine):
    events = []
    susps = {}

    def bi_emit(eng, args, module):
        events.append(deref(args[0]).name)
        return True

    def bi_kick(eng, args, module):
        eng.wake([susps[deref(args[0]).name]])
        return True

    engine.add_builtin(engine.main, "emit", 1, bi_emit)
    engine.add_builtin(engine.main, "kick", 1, bi_kick)
    engine.load("mid :- emit(mid1), kick(hi), kick(lazy), emit(mid2).")
    susps["hi"] = engine.make_suspension(Struct("emit", [Atom("hi")]), 2)
    susps["lazy"] = engine.make_suspension(Struct("emit", [Atom("lazy")]), 11)
    s_mid = engine.make_suspension(Atom("mid"), 8)
    engine.wake([s_mid])
    assert engine.drain()
    # hi (prio 2) cut in while mid (prio 8) was running; lazy (prio 11) waited
    assert events == ["mid1", "hi", "mid2", "lazy"]


def test_woken_goal_commits_to_its_first_solution(engine):
    engine.load("pick(1).\npick(2).")
    st = engine.store
    x = st.new_var()
    s = engine.make_suspension(Struct("pick", [x]), 5)
    engine.wake([s])
    assert engine.drain()
    assert deref(x) == 1


def test_drain_reports_waking_failure(engine):
    s = engine.make_suspension(Atom("fail"), 5)
    engine.wake([s])
    assert not engine.drain()


def test_suspend_goal_runs_on_instantiation(first):
    got = first("suspend(Y = done, 3, [X -> inst]), X = go")
    assert got is not None
    assert got["Y"].name == "done"
    assert got.delayed == []


def test_delayed_goal_reported_when_never_woken(first):
    got = first("suspend(true, 3, [X -> inst])")
    assert got is not None
    assert got.delayed == ["true"]
