"""Suspensions and the priority scheduler.

A suspension is a goal taken out of the active resolvent.  It moves
through three states:

    suspended --(waking event)--> scheduled --(drain)--> executed

Demons go back to ``suspended`` instead of ``executed`` when they are
picked for execution, so the same suspension keeps living in its
suspension lists and can fire again.  All state changes go through the
store's value trail, so backtracking revives killed suspensions and
un-schedules scheduled ones.

Waking is two-stage on purpose: events only move suspensions into the
priority queue; the queued goals actually run at the next drain point,
most urgent bucket first (priority 1 is the most urgent of the 12
levels), FIFO within a bucket.  The queue itself is not trailed; stale
entries (whose state was restored by backtracking) are skipped when
popped.
"""

from __future__ import annotations

from collections import deque

from .errors import DomainError

SUSPENDED = "suspended"
SCHEDULED = "scheduled"
EXECUTED = "executed"

NUM_PRIORITIES = 12
#: priority of the main resolvent: weaker than every suspension priority,
#: so a toplevel drain point runs everything that is scheduled
MAIN_PRIORITY = NUM_PRIORITIES + 1


class Suspension:
    """A suspended goal.  ``conditions`` records the attach specs for
    display; ``payload`` is free for propagators to cache data in."""

    __slots__ = ("sid", "goal", "priority", "module", "state", "demon",
                 "payload", "conditions", "_stamps")

    def __init__(self, sid, goal, priority, module, demon=False):
        if not isinstance(priority, int) or not 1 <= priority <= NUM_PRIORITIES:
            raise DomainError("suspension priority must be in 1..%d, got %r"
                              % (NUM_PRIORITIES, priority))
        self.sid = sid
        self.goal = goal
        self.priority = priority
        self.module = module
        self.state = SUSPENDED
        self.demon = demon
        self.payload = None
        self.conditions = []
        self._stamps = None

    def __repr__(self):
        return "<susp %d prio %d %s>" % (self.sid, self.priority, self.state)


class Scheduler:
    """Twelve FIFO buckets of scheduled suspensions."""

    def __init__(self):
        self.buckets = [deque() for _ in range(NUM_PRIORITIES + 1)]  # index 1..12

    def schedule(self, susps, store):
        """Move suspended suspensions into the queue.  Already-scheduled and
        executed ones are skipped (redundant waking is harmless)."""
        for s in susps:
            if s.state == SUSPENDED:
                store.set_slot(s, "state", SCHEDULED)
                self.buckets[s.priority].append(s)

    def pop_runnable(self, priority_limit):
        """Most urgent scheduled suspension with priority < priority_limit,
        or None.  Skips stale queue entries (state reverted by
        backtracking or killed while queued)."""
        top = min(priority_limit, NUM_PRIORITIES + 1)
        for p in range(1, top):
            bucket = self.buckets[p]
            while bucket:
                s = bucket.popleft()
                if s.state == SCHEDULED:
                    return s
        return None

    def has_runnable(self, priority_limit):
        top = min(priority_limit, NUM_PRIORITIES + 1)
        for p in range(1, top):
            for s in self.buckets[p]:
                if s.state == SCHEDULED:
                    return True
        return False

    def pending(self):
        return [s for b in self.buckets for s in b if s.state == SCHEDULED]
