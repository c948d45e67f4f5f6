"""The mutable store: bindings, destructive updates, trailing, backtracking.

Three kinds of trail entries:

* ('bind', var)                  -- reset var.ref to None on unwind
* ('val', owner, slot, old)      -- restore a slot to its old value
* ('undo', closure)              -- run an arbitrary undo action

Value entries carry timestamp-based deduplication: a slot is trailed at
most once per choicepoint segment.  Timestamps are a plain monotone
counter, bumped on every choicepoint push, so stamps of dead (popped or
cut) choicepoints are never reused and a simple equality test decides
"already trailed in this segment".  Undo entries are never deduplicated:
the closures may be non-idempotent.

An integer slot means ``owner.args[slot]`` (struct arguments); a string
slot means ``setattr(owner, slot, ...)``.  Owners participating in value
trailing carry a ``_stamps`` dict mapping slot -> stamp of the last trail
entry; the dict entry is dropped again when the entry is unwound, so a
later update in the same (restarted) segment re-trails correctly.

Unification lives here too, because it is the operation that creates most
trail entries and triggers waking.  The store is usable standalone; the
engine injects a scheduler hook (called with lists of suspensions to
schedule) and an attribute registry (consulted when attributed variables
are bound).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InternalError, RangeError, TypeError_
from .terms import Atom, Breal, Struct, Var, deref


class Mark:
    """A choicepoint handle: trail length + unique timestamp."""

    __slots__ = ("trail_len", "stamp", "index", "alive")

    def __init__(self, trail_len, stamp, index):
        self.trail_len = trail_len
        self.stamp = stamp
        self.index = index
        self.alive = True

    def __repr__(self):
        return "<cp #%d stamp=%d trail=%d%s>" % (
            self.index, self.stamp, self.trail_len, "" if self.alive else " dead")


class Store:
    def __init__(self):
        self.trail = []
        self.choicepoints = []
        self._stamp_counter = 0
        # engine hooks; no-ops when unset so the store works standalone
        self.scheduler = None        # callable(list_of_suspensions)
        self.attr_registry = None    # AttributeRegistry

    # ------------------------------------------------------------------
    # variables

    def new_var(self, name=None):
        return Var(name)

    # ------------------------------------------------------------------
    # choicepoints and timestamps

    def current_stamp(self):
        cps = self.choicepoints
        return cps[-1].stamp if cps else 0

    def push_choicepoint(self):
        self._stamp_counter += 1
        m = Mark(len(self.trail), self._stamp_counter, len(self.choicepoints))
        self.choicepoints.append(m)
        return m

    def _check_live(self, mark):
        cps = self.choicepoints
        if not mark.alive or mark.index >= len(cps) or cps[mark.index] is not mark:
            raise InternalError("dead or foreign choicepoint mark: %r" % (mark,))

    def backtrack_to(self, mark):
        """Unwind the trail to the mark and discard younger choicepoints.
        The mark itself stays live and becomes the top choicepoint."""
        self._check_live(mark)
        self._unwind(mark.trail_len)
        cps = self.choicepoints
        while len(cps) > mark.index + 1:
            cps.pop().alive = False

    def commit_to(self, mark):
        """Discard the mark and everything above it without unwinding
        (the cut operation: keep bindings, drop alternatives)."""
        self._check_live(mark)
        cps = self.choicepoints
        while len(cps) > mark.index:
            cps.pop().alive = False

    def drop_to(self, mark):
        """backtrack_to followed by removing the mark itself: restores the
        state at push time and leaves the choicepoint stack as it was."""
        self.backtrack_to(mark)
        self.choicepoints.pop().alive = False

    def _unwind(self, length):
        trail = self.trail
        while len(trail) > length:
            entry = trail.pop()
            kind = entry[0]
            if kind == "bind":
                entry[1].ref = None
            elif kind == "val":
                _, owner, slot, old = entry
                if isinstance(slot, int):
                    owner.args[slot] = old
                else:
                    setattr(owner, slot, old)
                stamps = owner._stamps
                if stamps is not None:
                    stamps.pop(slot, None)
            else:  # undo closure
                entry[1]()

    # ------------------------------------------------------------------
    # trailing primitives

    def trail_value(self, owner, slot, old):
        """Record the old value of owner/slot, at most once per segment."""
        cur = self.current_stamp()
        stamps = owner._stamps
        if stamps is None:
            stamps = {}
            owner._stamps = stamps
        elif stamps.get(slot) == cur:
            return
        stamps[slot] = cur
        self.trail.append(("val", owner, slot, old))

    def set_slot(self, owner, slot, new):
        old = getattr(owner, slot)
        if old is new:
            return
        self.trail_value(owner, slot, old)
        setattr(owner, slot, new)

    def register_undo(self, closure):
        self.trail.append(("undo", closure))

    def set_arg(self, i, struct, new):
        """setarg/3: destructively update argument i (1-based), trailed."""
        struct = deref(struct)
        if type(struct) is not Struct:
            raise TypeError_("setarg: not a compound term: %r" % (struct,))
        if not isinstance(i, int) or isinstance(i, bool):
            raise TypeError_("setarg: index must be an integer: %r" % (i,))
        if not 1 <= i <= len(struct.args):
            raise RangeError("setarg: index %d out of range for %s/%d"
                             % (i, struct.name, len(struct.args)))
        self.trail_value(struct, i - 1, struct.args[i - 1])
        struct.args[i - 1] = new

    # ------------------------------------------------------------------
    # binding and waking

    def _schedule(self, susps):
        if susps and self.scheduler is not None:
            self.scheduler(susps)

    def _append_list(self, var, slot, extra):
        if extra:
            self.set_slot(var, slot, getattr(var, slot) + tuple(extra))

    def bind(self, var, value):
        """Bind an unbound variable, run attribute handlers, wake lists.

        Returns False when an attribute handler vetoes the binding.  The
        partial state is left in place; the caller is expected to hold a
        choicepoint and backtrack on failure.
        """
        if var.ref is not None:
            raise InternalError("bind: variable already bound")
        var.ref = value
        self.trail.append(("bind", var))

        value = deref(value)
        aliasing = type(value) is Var

        if aliasing:
            # merge suspension lists into the surviving variable, then wake
            # the bound/constrained lists of both (not inst: no instantiation)
            wake = var.wake_bound + var.wake_constrained \
                + value.wake_bound + value.wake_constrained
            self._append_list(value, "wake_inst", var.wake_inst)
            self._append_list(value, "wake_bound", var.wake_bound)
            self._append_list(value, "wake_constrained", var.wake_constrained)
        else:
            wake = var.wake_inst + var.wake_bound + var.wake_constrained

        if var.attrs and self.attr_registry is not None:
            for name, payload in var.attrs:
                spec = self.attr_registry.lookup(name)
                if spec is not None and spec.unify is not None:
                    if not spec.unify(value, payload, var):
                        self._schedule(wake)
                        return False
        self._schedule(wake)
        return True

    # ------------------------------------------------------------------
    # unification

    def unify(self, a, b):
        """Structural unification, no occurs check.

        On failure, bindings already made are *not* undone here; backtrack
        to a mark taken before the call to restore them.
        """
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            x = deref(x)
            y = deref(y)
            if x is y:
                continue
            tx, ty = type(x), type(y)
            if tx is Var:
                if ty is Var:
                    # keep the older variable: bind the younger one to it
                    if x.serial < y.serial:
                        x, y = y, x
                if not self.bind(x, y):
                    return False
                continue
            if ty is Var:
                if not self.bind(y, x):
                    return False
                continue
            if tx is not ty:
                return False
            if tx is Struct:
                if x.name != y.name or len(x.args) != len(y.args):
                    return False
                stack.extend(zip(x.args, y.args))
            elif tx is Atom:
                return False  # distinct interned atoms never unify
            elif tx is int or tx is float or tx is Fraction or tx is str:
                if x != y:
                    return False
            elif tx is Breal:
                if x.lo != y.lo or x.hi != y.hi:
                    return False
            else:
                return False  # opaque values unify only by identity
        return True

    def unifiable(self, a, b):
        """Non-destructive unifiability test."""
        mark = self.push_choicepoint()
        ok = self.unify(a, b)
        self.drop_to(mark)
        return ok

    # ------------------------------------------------------------------
    # introspection (used by tests and the toplevel)

    def trail_length(self):
        return len(self.trail)

    def trail_kind_counts(self, since=0):
        counts = {"bind": 0, "val": 0, "undo": 0}
        for entry in self.trail[since:]:
            counts[entry[0]] += 1
        return counts

    def value_entry_locations(self, since=0):
        """(id(owner), slot) of every value entry above ``since``."""
        return [(id(e[1]), e[2]) for e in self.trail[since:] if e[0] == "val"]
