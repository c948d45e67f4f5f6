"""Attributed variables: named payloads plus handler hooks.

An attribute is registered once, globally, with a bundle of handlers:

* unify(value, payload, var) -> bool
      invoked immediately after ``var`` (which carried ``payload``) was
      bound to ``value`` -- the variable already dereferences to its new
      value.  Returning False vetoes the unification.  For variable-
      variable unification ``value`` is the surviving variable and the
      handler is responsible for merging payloads (e.g. intersecting
      domains).
* copy(payload, fresh_var)
      invoked by copy_term for each attributed variable; typically
      attaches a copy of the payload (minus suspension lists) to the
      fresh variable.
* bounds_get(var, payload) -> (lo, hi) floats or None
* bounds_set(var, payload, lo, hi) -> bool
      generic numeric-bounds access: get intersects over all
      bounds-capable attributes, set broadcasts to all of them.
* get_list(engine, var, list_name) -> (owner, slot) or None
      resolves a solver-defined suspension list (e.g. ic's min/max/
      hole/type) to a trailable location so that generic attach code
      can append to it.
* portray(var, payload) -> str or None
      a print hook for the writer ("_{1..5}" and friends).

Attributes without handlers are inert: they ride along on the variable,
can be read back, and vanish when the variable is instantiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import InstantiationError, RegistrationError, UnsupportedError
from .terms import Breal, Var, deref, is_number


@dataclass
class AttributeSpec:
    name: str
    unify: Optional[Callable] = None
    copy: Optional[Callable] = None
    bounds_get: Optional[Callable] = None
    bounds_set: Optional[Callable] = None
    get_list: Optional[Callable] = None
    portray: Optional[Callable] = None
    list_names: tuple = field(default_factory=tuple)


class AttributeRegistry:
    def __init__(self):
        self._specs = {}

    def register(self, spec):
        if spec.name in self._specs:
            raise RegistrationError("attribute %r already registered" % spec.name)
        self._specs[spec.name] = spec

    def lookup(self, name):
        return self._specs.get(name)

    def specs(self):
        """Registration order, which is also handler invocation order."""
        return list(self._specs.values())


def get_attr(var, name):
    var = deref(var)
    if type(var) is not Var:
        return None
    for n, payload in var.attrs:
        if n == name:
            return payload
    return None


def add_attr(store, var, name, payload):
    """Attach (or replace) an attribute.  The change is trailed."""
    var = deref(var)
    if type(var) is not Var:
        raise InstantiationError("add_attr: not an unbound variable: %r" % (var,))
    kept = tuple((n, p) for n, p in var.attrs if n != name)
    store.set_slot(var, "attrs", kept + ((name, payload),))
    return var


def init_attr(var, name, payload):
    """Attach an attribute to a freshly created variable without trailing.
    Newborn variables (copy_term output, renamed clause variables) have no
    prior state to restore, and their attributes must survive a backtrack
    past the point of copying."""
    var.attrs = var.attrs + ((name, payload),)


def notify_constrained(engine, var):
    """Signal a generic 'became more constrained' event on var."""
    var = deref(var)
    if type(var) is Var and var.wake_constrained:
        engine.wake(var.wake_constrained)


def _point_bounds(value):
    if type(value) is Breal:
        return value.lo, value.hi
    return float(value), float(value)


def get_var_bounds(registry, v):
    """(lo, hi) as floats: the intersection over all bounds-capable
    attributes; numbers give a point interval; a plain variable is
    unbounded."""
    v = deref(v)
    if is_number(v):
        return _point_bounds(v)
    lo, hi = -math.inf, math.inf
    if type(v) is Var:
        for name, payload in v.attrs:
            spec = registry.lookup(name)
            if spec is not None and spec.bounds_get is not None:
                got = spec.bounds_get(v, payload)
                if got is not None:
                    lo = max(lo, got[0])
                    hi = min(hi, got[1])
    return lo, hi


def set_var_bounds(registry, v, lo, hi):
    """Broadcast a bounds restriction to every bounds-capable attribute.
    Returns False on failure (empty intersection).  A number succeeds iff
    it lies within [lo, hi]; a variable without any bounds-capable
    attribute is an error."""
    v = deref(v)
    if is_number(v):
        plo, phi = _point_bounds(v)
        return lo <= plo and phi <= hi
    if type(v) is not Var:
        raise UnsupportedError("set_var_bounds: not a variable or number: %r" % (v,))
    handlers = []
    for name, payload in v.attrs:
        spec = registry.lookup(name)
        if spec is not None and spec.bounds_set is not None:
            handlers.append((spec, payload))
    if not handlers:
        raise UnsupportedError("set_var_bounds: variable has no bounds-capable attribute")
    for spec, payload in handlers:
        if not spec.bounds_set(v, payload, lo, hi):
            return False
    return True
