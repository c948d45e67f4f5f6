"""The resolution engine.

Goals are solved by recursive generators: each `solve` call yields once
per solution, with bindings in place while the caller consumes the
solution, and restores the store to its entry state before finishing.

Mark discipline: every construct that creates alternatives (a predicate
call, a builtin invocation, if-then-else) pushes its own choicepoint mark
and is responsible for it.  Constructs that abandon a partially-consumed
inner generator (once, if-then-else, woken goals) clean up with
``commit_to``/``drop_to`` on their *own* mark, which also disposes of any
marks the abandoned generator left above it.  For that reason none of the
generators here use ``finally`` for store cleanup -- when a generator is
closed early the enclosing frame's mark already covers its state, and a
late ``close()`` from the garbage collector must not touch the store.

Suspended goals are woken through a two-stage scheme: events move
suspensions into the scheduler's priority queues, and `drain` runs them
after every resolution step.  While a woken goal runs, `running_priority`
is lowered to its priority, so more urgent wakings interrupt it at its
own resolution steps but less urgent ones wait.  Woken goals run
semi-deterministically: their first solution is committed.
"""

from __future__ import annotations

import logging
from types import GeneratorType

from .errors import (EngineError, ExistenceError, ExpansionError, Halt,
                     InstantiationError, ReaderError, TypeError_)
from .expand import (ExpandContext, expand_clause, install_kernel_macros,
                     mk_conj, parse_struct_decl)
from .reader import Ops, Parser, standard_ops, tokenize
from .store import Store
from .susp import (EXECUTED, MAIN_PRIORITY, SCHEDULED, SUSPENDED, Scheduler,
                   Suspension)
from .terms import (Atom, Struct, Var, copy_term, deref, is_callable_term,
                    list_parts, term_vars)
from .attvar import AttributeRegistry
from .writer import write_term

log = logging.getLogger("clpkernel")


class CutBarrier:
    """Cut target: '!' sets hit, the owning clause stops taking alternatives."""

    __slots__ = ("hit",)

    def __init__(self):
        self.hit = False


class Clause:
    __slots__ = ("head", "body", "key")

    def __init__(self, head, body):
        self.head = head
        self.body = body
        self.key = None
        h = deref(head)
        if isinstance(h, Struct) and h.args:
            self.key = index_key(h.args[0])


def index_key(t):
    """A coarse first-argument index key; None matches anything."""
    t = deref(t)
    if isinstance(t, Var):
        return None
    if isinstance(t, Atom):
        return ("a", t.name)
    if isinstance(t, Struct):
        return ("f", t.name, t.arity)
    if isinstance(t, str):
        return ("s", t)
    return ("n",)  # numbers index together


class Pred:
    __slots__ = ("name", "arity", "module", "clauses", "builtin", "exported",
                 "demon", "no_warn")

    def __init__(self, name, arity, module):
        self.name = name
        self.arity = arity
        self.module = module
        self.clauses = []
        self.builtin = None
        self.exported = False
        self.demon = False
        self.no_warn = False

    @property
    def indicator(self):
        return "%s/%d" % (self.name, self.arity)


class Module:
    def __init__(self, name, engine, imports=()):
        self.name = name
        self.engine = engine
        self.imports = list(imports)
        self.ops = Ops(parents=[m.ops for m in self.imports])
        self.preds = {}
        self.term_macros = {}
        self.goal_macros = {}
        self.output_macros = {}
        self.structs = {}
        self.aux_n = 0

    def __repr__(self):
        return "<module %s>" % self.name

    def add_import(self, module):
        if module is self or module in self.imports:
            return
        self.imports.append(module)
        self.ops.parents.append(module.ops)

    # -- predicates -----------------------------------------------------

    def ensure_pred(self, name, arity):
        p = self.preds.get((name, arity))
        if p is None:
            p = Pred(name, arity, self)
            self.preds[(name, arity)] = p
        return p

    def lookup_pred(self, name, arity):
        p = self.preds.get((name, arity))
        if p is not None:
            return p
        for m in self.imports:
            p = m.preds.get((name, arity))
            if p is not None and p.exported:
                return p
        return None

    # -- macro / struct visibility ---------------------------------------

    def add_term_macro(self, name, arity, fn, exported=False):
        self.term_macros[(name, arity)] = (fn, exported)

    def add_goal_macro(self, name, arity, fn, exported=False):
        self.goal_macros[(name, arity)] = (fn, exported)

    def add_output_macro(self, name, arity, fn, exported=False):
        self.output_macros[(name, arity)] = (fn, exported)

    def _macro_lookup(self, attr, key):
        got = getattr(self, attr).get(key)
        if got is not None:
            return got[0]
        for m in self.imports:
            got = getattr(m, attr).get(key)
            if got is not None and got[1]:
                return got[0]
        return None

    def lookup_term_macro(self, name, arity):
        return self._macro_lookup("term_macros", (name, arity))

    def lookup_goal_macro(self, name, arity):
        return self._macro_lookup("goal_macros", (name, arity))

    def lookup_output_macro(self, name, arity):
        return self._macro_lookup("output_macros", (name, arity))

    def declare_struct(self, decl, exported=False):
        self.structs[decl.name] = (decl, exported)

    def lookup_struct(self, name):
        got = self.structs.get(name)
        if got is not None:
            return got[0]
        for m in self.imports:
            got = m.structs.get(name)
            if got is not None and got[1]:
                return got[0]
        return None

    def next_aux_name(self):
        self.aux_n += 1
        return "do__%d" % self.aux_n

    def term_macro_hook(self):
        def hook(t):
            fn = self.lookup_term_macro(t.name, t.arity)
            if fn is not None:
                return fn(self, t)
            return t
        return hook


class Answer:
    """One solution of a query, snapshotted so it survives backtracking."""

    def __init__(self, bindings, delayed):
        self.bindings = bindings    # name -> copied term
        self.delayed = delayed      # list of formatted goal strings

    def __getitem__(self, name):
        return self.bindings[name]

    def __repr__(self):
        return "Answer(%r, delayed=%r)" % (self.bindings, self.delayed)


class Engine:
    def __init__(self, out=None):
        import sys
        self.out = out if out is not None else sys.stdout
        self.store = Store()
        self.sched = Scheduler()
        self.registry = AttributeRegistry()
        self.store.attr_registry = self.registry
        self.store.scheduler = self._wake_hook
        self.suspensions = {}
        self._sid = 0
        self.event_log = []
        self.running_priority = MAIN_PRIORITY
        self.current_suspension = None
        self.modules = {}

        self.kernel = self.new_module("kernel", imports=())
        self.kernel.ops = standard_ops()
        from . import builtins as _builtins
        _builtins.install(self)
        install_kernel_macros(self.kernel)
        self.load(_KERNEL_PRELUDE, module=self.kernel, filename="<kernel>")

        from . import ic as _ic
        self.ic = self.new_module("ic", imports=(self.kernel,))
        _ic.install(self)
        from . import search as _search
        _search.install(self)

        self.main = self.new_module("main", imports=(self.kernel, self.ic))

    # ------------------------------------------------------------------
    # modules and registration

    def new_module(self, name, imports=None):
        if name in self.modules:
            return self.modules[name]
        if imports is None:
            imports = (self.kernel, self.ic)
        m = Module(name, self, imports)
        self.modules[name] = m
        return m

    def add_builtin(self, module, name, arity, fn, exported=True):
        p = module.ensure_pred(name, arity)
        if p.clauses:
            raise EngineError("%s already has clauses" % p.indicator)
        p.builtin = fn
        p.exported = exported
        return p

    def _wake_hook(self, susps):
        self.sched.schedule(susps, self.store)

    def wake(self, susps):
        self.sched.schedule(susps, self.store)

    # ------------------------------------------------------------------
    # suspensions

    def make_suspension(self, goal, priority, module=None):
        module = module or self.main
        g = deref(goal)
        if not is_callable_term(g):
            if isinstance(g, Var):
                raise InstantiationError("suspension goal is unbound")
            raise TypeError_("suspension goal must be callable: %s"
                             % self.format_term(g))
        demon = False
        name, arity = _functor_of(g)
        pred = module.lookup_pred(name, arity)
        if pred is not None:
            demon = pred.demon
        self._sid += 1
        s = Suspension(self._sid, g, priority, module, demon=demon)
        self.suspensions[s.sid] = s
        sid = s.sid
        self.store.register_undo(lambda: self.suspensions.pop(sid, None))
        return s

    def attach_suspension(self, susp, var, cond):
        slot = {"inst": "wake_inst", "bound": "wake_bound",
                "constrained": "wake_constrained"}.get(cond)
        if slot is None:
            from .errors import DomainError
            raise DomainError("unknown waking condition: %r" % (cond,))
        self.store.set_slot(var, slot, getattr(var, slot) + (susp,))
        susp.conditions.append((cond, var))

    def attach_to_list(self, susp, owner, slot, label=None):
        self.store.set_slot(owner, slot, getattr(owner, slot) + (susp,))
        susp.conditions.append((label or slot, owner))

    def kill_suspension(self, susp):
        if susp.state != EXECUTED:
            self.store.set_slot(susp, "state", EXECUTED)

    def delayed_goals(self):
        return [s for s in self.suspensions.values()
                if s.state in (SUSPENDED, SCHEDULED)]

    # ------------------------------------------------------------------
    # waking

    def drain(self):
        """Run scheduled goals more urgent than the current priority.
        Returns False as soon as one of them fails."""
        s = self.sched.pop_runnable(self.running_priority)
        while s is not None:
            if s.demon:
                self.store.set_slot(s, "state", SUSPENDED)
            else:
                self.store.set_slot(s, "state", EXECUTED)
            prev_p = self.running_priority
            prev_s = self.current_suspension
            self.running_priority = s.priority
            self.current_suspension = s
            try:
                ok = self.run_goal_once(s.goal, s.module)
            finally:
                self.running_priority = prev_p
                self.current_suspension = prev_s
            if not ok:
                return False
            s = self.sched.pop_runnable(self.running_priority)
        return True

    def run_goal_once(self, goal, module):
        """Solve deterministically: commit to the first solution."""
        mark = self.store.push_choicepoint()
        for _ in self.solve(goal, module, CutBarrier()):
            self.store.commit_to(mark)
            return True
        self.store.drop_to(mark)
        return False

    # ------------------------------------------------------------------
    # the solver

    def solve(self, goal, module, barrier):
        goal = deref(goal)
        if isinstance(goal, Var):
            raise InstantiationError("unbound goal")
        if isinstance(goal, Atom):
            name, arity, args = goal.name, 0, ()
        elif isinstance(goal, Struct):
            name, arity, args = goal.name, goal.arity, goal.args
        else:
            raise TypeError_("goal is not callable: %s" % self.format_term(goal))

        if arity == 2:
            if name == ",":
                yield from self._conj(args[0], args[1], module, barrier)
                return
            if name == ";":
                left = deref(args[0])
                if isinstance(left, Struct) and left.name == "->" and left.arity == 2:
                    yield from self._ite(left.args[0], left.args[1], args[1],
                                         module, barrier)
                    return
                yield from self.solve(args[0], module, barrier)
                if barrier.hit:
                    return
                yield from self.solve(args[1], module, barrier)
                return
            if name == "->":
                yield from self._ite(args[0], args[1], None, module, barrier)
                return
        elif arity == 0:
            if name == "true":
                yield
                return
            if name in ("fail", "false"):
                return
            if name == "!":
                barrier.hit = True
                yield
                return

        pred = module.lookup_pred(name, arity)
        if pred is None:
            macro = module.lookup_goal_macro(name, arity)
            if macro is not None:
                ctx = ExpandContext(module, self)
                g2, aux = macro(ctx, goal)
                for head, body in aux:
                    self.add_clause(module, head, body)
                yield from self.solve(g2, module, barrier)
                return
            raise ExistenceError("procedure %s/%d is not defined in module %s"
                                 % (name, arity, module.name))
        if pred.builtin is not None:
            yield from self._run_builtin(pred, args, module)
            return
        yield from self._call_user(pred, goal, module)

    def _conj(self, a, b, module, barrier):
        for _ in self.solve(a, module, barrier):
            yield from self.solve(b, module, barrier)
            if barrier.hit:
                break

    def _ite(self, cond, then_g, else_g, module, barrier):
        mark = self.store.push_choicepoint()
        got = False
        for _ in self.solve(cond, module, CutBarrier()):
            got = True
            break
        if got:
            yield from self.solve(then_g, module, barrier)
            self.store.drop_to(mark)
        else:
            self.store.drop_to(mark)
            if else_g is not None:
                yield from self.solve(else_g, module, barrier)

    def _run_builtin(self, pred, args, module):
        mark = self.store.push_choicepoint()
        res = pred.builtin(self, args, module)
        if isinstance(res, GeneratorType):
            for _ in res:
                if self.drain():
                    yield
                # on waking failure the builtin's own backtracking undoes
                # the woken goals' bindings before the next alternative
        else:
            if res:
                if self.drain():
                    yield
        self.store.drop_to(mark)

    def _call_user(self, pred, goal, module):
        mark = self.store.push_choicepoint()
        barrier = CutBarrier()
        goal_key = None
        g = deref(goal)
        if isinstance(g, Struct):
            goal_key = index_key(g.args[0])
        for clause in list(pred.clauses):
            if (clause.key is not None and goal_key is not None
                    and clause.key != goal_key):
                continue
            self.store.backtrack_to(mark)
            renamed = copy_term(Struct(":-", [clause.head, clause.body]),
                                attr_hook=self._copy_attr_hook)
            if not self.store.unify(renamed.args[0], g):
                continue
            if not self.drain():
                continue
            yield from self.solve(renamed.args[1], pred.module, barrier)
            if barrier.hit:
                break
        self.store.drop_to(mark)

    def _copy_attr_hook(self, old, fresh):
        for name, payload in old.attrs:
            spec = self.registry.lookup(name)
            if spec is not None and spec.copy is not None:
                spec.copy(payload, fresh)

    # ------------------------------------------------------------------
    # program loading

    def add_clause(self, module, head, body):
        h = deref(head)
        if isinstance(h, Atom):
            name, arity = h.name, 0
        elif isinstance(h, Struct):
            name, arity = h.name, h.arity
        else:
            raise TypeError_("clause head is not callable: %s"
                             % self.format_term(h))
        pred = module.ensure_pred(name, arity)
        if pred.builtin is not None:
            raise EngineError("cannot add clauses to builtin %s" % pred.indicator)
        pred.clauses.append(Clause(h, deref(body)))
        return pred

    def load(self, text, module=None, filename=None):
        """Load program text: directives are executed, clauses compiled."""
        self._load_module = module or self.main
        tokens = tokenize(text, filename)
        parser = Parser(tokens, self._load_module.ops,
                        macro_hook=self._live_hook, filename=filename)
        last_pred = None
        while not parser.at_eof():
            parser.ops = self._load_module.ops
            try:
                term, _varmap, pos = parser.read_clause()
                last_pred = self._load_term(term, pos, filename, last_pred)
            except (ReaderError, Halt):
                raise
            except EngineError as e:
                raise _position_error(e, filename, parser.peek().line)
        return self._load_module

    def _live_hook(self, t):
        fn = self._load_module.lookup_term_macro(t.name, t.arity)
        if fn is not None:
            return fn(self._load_module, t)
        return t

    def _load_term(self, term, pos, filename, last_pred):
        module = self._load_module
        t = deref(term)
        if isinstance(t, Struct) and t.name == ":-" and t.arity == 1:
            self._directive(t.args[0], module, pos, filename)
            return last_pred
        ctx = ExpandContext(module, self)
        head, body, aux = expand_clause(ctx, t)
        pred = self.add_clause(module, head, body)
        for h, b in aux:
            self.add_clause(module, h, b)
        if (last_pred is not None and pred is not last_pred
                and len(pred.clauses) > 1 and not pred.no_warn):
            log.warning("%s: clauses of %s are not contiguous",
                        filename or "<text>", pred.indicator)
        return pred

    def _directive(self, d, module, pos, filename):
        d = deref(d)
        if isinstance(d, Struct):
            name, args = d.name, d.args
            if name == "module" and len(args) == 1:
                mname = _atom_name(args[0], "module name")
                self._load_module = self.new_module(mname)
                return
            if name == "import" and len(args) == 1:
                for item in _conj_items(args[0]):
                    mname = _atom_name(item, "import")
                    target = self.modules.get(mname)
                    if target is None:
                        raise ExistenceError("module %s does not exist" % mname)
                    module.add_import(target)
                return
            if name == "export" and len(args) == 1:
                for item in _conj_items(args[0]):
                    self._export_item(module, item)
                return
            if name == "local" and len(args) == 1:
                for item in _conj_items(args[0]):
                    self._local_item(module, item)
                return
            if name == "op" and len(args) == 3:
                self._op_directive(module, args, exported=False)
                return
            if name == "demon" and len(args) == 1:
                for item in _conj_items(args[0]):
                    n, a = _pred_indicator(item)
                    module.ensure_pred(n, a).demon = True
                return
            if name in ("dynamic", "discontiguous") and len(args) == 1:
                for item in _conj_items(args[0]):
                    n, a = _pred_indicator(item)
                    module.ensure_pred(n, a).no_warn = True
                return
        # anything else: run it as a goal at load time
        if not self.run_goal_once(d, module):
            log.warning("%s:%s: directive failed: %s",
                        filename or "<text>", pos[0], self.format_term(d, module))

    def _export_item(self, module, item):
        item = deref(item)
        if isinstance(item, Struct) and item.name == "op" and item.arity == 3:
            self._op_directive(module, item.args, exported=True)
            return
        if isinstance(item, Struct) and item.name == "struct" and item.arity == 1:
            module.declare_struct(parse_struct_decl(item.args[0]), exported=True)
            return
        n, a = _pred_indicator(item)
        module.ensure_pred(n, a).exported = True

    def _local_item(self, module, item):
        item = deref(item)
        if isinstance(item, Struct) and item.name == "op" and item.arity == 3:
            self._op_directive(module, item.args, exported=False)
            return
        if isinstance(item, Struct) and item.name == "struct" and item.arity == 1:
            module.declare_struct(parse_struct_decl(item.args[0]), exported=False)
            return
        n, a = _pred_indicator(item)
        module.ensure_pred(n, a)

    def _op_directive(self, module, args, exported):
        prio = deref(args[0])
        if not isinstance(prio, int):
            raise TypeError_("operator priority must be an integer: %r" % (prio,))
        typ = _atom_name(args[1], "operator type")
        names = deref(args[2])
        items, tail = list_parts(names)
        if not (items and isinstance(deref(tail), Atom)
                and deref(tail).name == "[]"):
            items = [names]
        for it in items:
            module.ops.declare(prio, typ, _atom_name(it, "operator name"),
                               exported=exported)

    def load_file(self, path):
        with open(path, "r", encoding="utf-8") as fh:
            return self.load(fh.read(), filename=path)

    # ------------------------------------------------------------------
    # queries

    def parse_goal(self, text, module=None):
        module = module or self.main
        tokens = tokenize(text)
        self._load_module = module
        parser = Parser(tokens, module.ops, macro_hook=self._live_hook)
        goal, _ = parser.parse(1200)
        t = parser.next()
        if t.kind not in ("eof", "end"):
            parser.error("unexpected trailing input", t)
        return goal, parser.varmap

    def solutions(self, goal, module=None):
        """Top-level solution generator; restores the store when done or
        when closed."""
        module = module or self.main
        mark = self.store.push_choicepoint()
        try:
            yield from self.solve(goal, module, CutBarrier())
        finally:
            self.store.drop_to(mark)

    def ask(self, text, module=None, limit=None):
        """Run a query; returns a list of Answer snapshots."""
        module = module or self.main
        goal, varmap = self.parse_goal(text, module)
        answers = []
        for _ in self.solutions(goal, module):
            bindings = {}
            for name, var in varmap.items():
                bindings[name] = copy_term(var, attr_hook=self._copy_attr_hook)
            delayed = [self.format_goal(s, module) for s in self.delayed_goals()]
            answers.append(Answer(bindings, delayed))
            if limit is not None and len(answers) >= limit:
                break
        return answers

    def once(self, text, module=None):
        got = self.ask(text, module, limit=1)
        return got[0] if got else None

    # ------------------------------------------------------------------
    # formatting

    def format_term(self, t, module=None, names=None, canonical=False,
                    quoted=False):
        module = module or self.main
        return write_term(t, ops=module.ops, quoted=quoted, canonical=canonical,
                          names=names, registry=self.registry,
                          transforms=module.lookup_output_macro)

    def format_goal(self, susp, module=None, names=None):
        return self.format_term(susp.goal, module, names=names)


def _functor_of(g):
    g = deref(g)
    if isinstance(g, Atom):
        return g.name, 0
    return g.name, g.arity


def _atom_name(t, what):
    t = deref(t)
    if isinstance(t, Atom):
        return t.name
    raise TypeError_("%s must be an atom: %r" % (what, t))


def _conj_items(t):
    """Split a ','-conjunction or a list into items."""
    t = deref(t)
    items, tail = list_parts(t)
    if items and isinstance(deref(tail), Atom) and deref(tail).name == "[]":
        return items
    out = []
    stack = [t]
    while stack:
        x = deref(stack.pop())
        if isinstance(x, Struct) and x.name == "," and x.arity == 2:
            stack.append(x.args[1])
            stack.append(x.args[0])
        else:
            out.append(x)
    return out


def _pred_indicator(t):
    t = deref(t)
    if (isinstance(t, Struct) and t.name == "/" and t.arity == 2
            and isinstance(deref(t.args[0]), Atom)
            and isinstance(deref(t.args[1]), int)):
        return deref(t.args[0]).name, deref(t.args[1])
    raise TypeError_("expected a Name/Arity predicate indicator: %r" % (t,))


def _position_error(e, filename, line):
    try:
        return type(e)("%s:%s: %s" % (filename or "<text>", line, e))
    except Exception:
        return e


_KERNEL_PRELUDE = """
:- export(member/2).
:- export(append/3).
:- export(length/2).

member(X, [X|_]).
member(X, [_|T]) :- member(X, T).

append([], L, L).
append([H|T], L, [H|R]) :- append(T, L, R).

length(L, N) :-
    ( integer(N) ->
        length_fixed(L, N)
    ;
        length_count(L, 0, N)
    ).
length_fixed([], 0).
length_fixed([_|T], N) :- N > 0, N1 is N - 1, length_fixed(T, N1).
length_count([], N, N).
length_count([_|T], N0, N) :- N1 is N0 + 1, length_count(T, N1, N).
"""


def make_engine(out=None):
    return Engine(out=out)
