"""Core AST: terms, programs, weak contexts, substitutions, coherence.

Terms and programs are immutable; all operations are pure functions.
Binder type annotations (``ann``) are metadata filled in by the type
checker and excluded from equality and hashing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

OK = "Ok"

# Prefix reserved for machine-generated names (canonicalization).  The
# concrete syntax never produces identifiers starting with '%', so
# canonical names cannot collide with source names.
_CANON_PREFIX = "%"


class LamuError(Exception):
    """Base class for errors raised by this package."""


class NotAValueError(LamuError):
    pass


class CoherenceError(LamuError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Cons(Term):
    name: str


@dataclass(frozen=True)
class Abs(Term):
    """Unallocated abstraction; not a value until allocated."""
    var: str
    body: "Program"
    ann: Optional[object] = field(default=None, compare=False)


@dataclass(frozen=True)
class AbsLoc(Term):
    """Allocated abstraction (runtime closure at a location)."""
    loc: int
    var: str
    body: "Program"
    ann: Optional[object] = field(default=None, compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Fresh(Term):
    var: str
    body: Term
    ann: Optional[object] = field(default=None, compare=False)


@dataclass(frozen=True)
class Guard(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Unif(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Hole(Term):
    """The hole of a weak context.  A weak context is a Term containing
    exactly one Hole, never under Abs, AbsLoc, or Fresh."""


HOLE = Hole()

_BINARY = (App, Guard, Unif)


@dataclass(frozen=True)
class Program:
    """Ordered sequence of threads; the empty program is fail."""
    threads: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "threads", tuple(self.threads))

    @property
    def is_fail(self):
        return not self.threads

    def __add__(self, other: "Program") -> "Program":
        return Program(self.threads + other.threads)

    def __iter__(self):
        return iter(self.threads)

    def __len__(self):
        return len(self.threads)


FAIL = Program(())


def singleton(t: Term) -> Program:
    return Program((t,))


# ---------------------------------------------------------------------------
# Structural queries

def _children(t: Term):
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, Guard):
        return (t.left, t.right)
    if isinstance(t, Unif):
        return (t.left, t.right)
    return ()


def subterms(x: Union[Term, Program]) -> Iterator[Term]:
    """All subterms, entering binders."""
    stack = list(x.threads) if isinstance(x, Program) else [x]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, (Abs, AbsLoc)):
            stack.extend(t.body.threads)
        elif isinstance(t, Fresh):
            stack.append(t.body)
        else:
            stack.extend(_children(t))


def free_vars(x: Union[Term, Program]) -> frozenset:
    if isinstance(x, Program):
        out = frozenset()
        for t in x:
            out |= free_vars(t)
        return out
    if isinstance(x, Var):
        return frozenset((x.name,))
    if isinstance(x, (Cons, Hole)):
        return frozenset()
    if isinstance(x, (Abs, AbsLoc)):
        return free_vars(x.body) - {x.var}
    if isinstance(x, Fresh):
        return free_vars(x.body) - {x.var}
    out = frozenset()
    for c in _children(x):
        out |= free_vars(c)
    return out


def locations(x: Union[Term, Program]) -> frozenset:
    out = set()
    for t in subterms(x):
        if isinstance(t, AbsLoc):
            out.add(t.loc)
    return frozenset(out)


def all_names(x: Union[Term, Program]) -> frozenset:
    """Every variable name occurring in x, free or bound."""
    out = set()
    for t in subterms(x):
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, (Abs, AbsLoc, Fresh)):
            out.add(t.var)
    return frozenset(out)


def spine(t: Term):
    """Decompose t = h a1 ... an into (h, [a1, ..., an])."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def make_spine(head: Term, args: Iterable[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def is_value(t: Term) -> bool:
    if isinstance(t, (Var, AbsLoc)):
        return True
    head, args = spine(t)
    return isinstance(head, Cons) and all(is_value(a) for a in args)


def is_structure(t: Term) -> bool:
    head, _ = spine(t)
    return isinstance(head, Cons) and is_value(t)


# ---------------------------------------------------------------------------
# Substitution

class Substitution:
    """Finite map from variable names to values, identity elsewhere."""

    __slots__ = ("_map",)

    def __init__(self, mapping=None):
        m = {}
        for name, v in (mapping or {}).items():
            if isinstance(v, Var) and v.name == name:
                continue
            if not is_value(v):
                raise NotAValueError(f"substitution binds {name} to a non-value")
            m[name] = v
        self._map = m

    def __call__(self, name: str) -> Term:
        return self._map.get(name, Var(name))

    @property
    def support(self) -> frozenset:
        return frozenset(self._map)

    def items(self):
        return self._map.items()

    def __bool__(self):
        return bool(self._map)

    def __repr__(self):
        inner = ", ".join(f"{k} -> {v!r}" for k, v in sorted(self._map.items()))
        return f"Substitution({{{inner}}})"

    def apply(self, x):
        return subst_apply(x, self)

    def compose(self, other: "Substitution") -> "Substitution":
        """(self . other)(x) = other applied to self(x)."""
        out = {}
        for name, v in self._map.items():
            out[name] = subst_apply(v, other)
        for name, v in other._map.items():
            out.setdefault(name, v)
        return Substitution(out)

    def range_values(self):
        return list(self._map.values())


IDENTITY = Substitution()


def _pick_fresh(base: str, forbidden) -> str:
    candidate = base + "'"
    while candidate in forbidden:
        candidate += "'"
    return candidate


def _subst_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (Cons, Hole)):
        return t
    if isinstance(t, App):
        return App(_subst_term(t.fn, mapping), _subst_term(t.arg, mapping))
    if isinstance(t, Guard):
        return Guard(_subst_term(t.left, mapping), _subst_term(t.right, mapping))
    if isinstance(t, Unif):
        return Unif(_subst_term(t.left, mapping), _subst_term(t.right, mapping))
    if isinstance(t, (Abs, AbsLoc, Fresh)):
        body_fv = free_vars(t.body if isinstance(t, (Abs, AbsLoc)) else t.body)
        inner = {k: v for k, v in mapping.items()
                 if k != t.var and k in body_fv}
        if not inner:
            return t
        var = t.var
        body = t.body
        captured = set()
        for v in inner.values():
            captured |= free_vars(v)
        if var in captured:
            forbidden = captured | body_fv | set(inner)
            new = _pick_fresh(var, forbidden)
            rename = {var: Var(new)}
            if isinstance(t, Fresh):
                body = _subst_term(body, rename)
            else:
                body = _subst_program(body, rename)
            var = new
        if isinstance(t, Abs):
            return Abs(var, _subst_program(body, inner), t.ann)
        if isinstance(t, AbsLoc):
            return AbsLoc(t.loc, var, _subst_program(body, inner), t.ann)
        return Fresh(var, _subst_term(body, inner), t.ann)
    raise TypeError(f"unexpected term {t!r}")


def _subst_program(p: Program, mapping: dict) -> Program:
    return Program(tuple(_subst_term(t, mapping) for t in p))


def subst_apply(x, sigma: Substitution):
    """Simultaneous capture-avoiding substitution; holes map to holes."""
    mapping = dict(sigma.items())
    if isinstance(x, Program):
        return _subst_program(x, mapping)
    return _subst_term(x, mapping)


def subst_single(x, name: str, value: Term):
    if not is_value(value):
        raise NotAValueError(f"cannot substitute non-value for {name}")
    return subst_apply(x, Substitution({name: value}))


def subst_loc(x, old: int, new: int):
    """Replace every location decoration old by new."""
    if isinstance(x, Program):
        return Program(tuple(subst_loc(t, old, new) for t in x))
    t = x
    if isinstance(t, (Var, Cons, Hole)):
        return t
    if isinstance(t, Abs):
        return Abs(t.var, subst_loc(t.body, old, new), t.ann)
    if isinstance(t, AbsLoc):
        loc = new if t.loc == old else t.loc
        return AbsLoc(loc, t.var, subst_loc(t.body, old, new), t.ann)
    if isinstance(t, Fresh):
        return Fresh(t.var, subst_loc(t.body, old, new), t.ann)
    if isinstance(t, App):
        return App(subst_loc(t.fn, old, new), subst_loc(t.arg, old, new))
    if isinstance(t, Guard):
        return Guard(subst_loc(t.left, old, new), subst_loc(t.right, old, new))
    return Unif(subst_loc(t.left, old, new), subst_loc(t.right, old, new))


# ---------------------------------------------------------------------------
# Weak contexts

def plug_term(w: Term, t: Term) -> Term:
    if isinstance(w, Hole):
        return t
    if isinstance(w, (Var, Cons)):
        return w
    if isinstance(w, App):
        return App(plug_term(w.fn, t), plug_term(w.arg, t))
    if isinstance(w, Guard):
        return Guard(plug_term(w.left, t), plug_term(w.right, t))
    if isinstance(w, Unif):
        return Unif(plug_term(w.left, t), plug_term(w.right, t))
    # weak contexts never place the hole under a binder
    return w


def plug(w: Term, x):
    """Plug a term or program into a weak context; programs distribute
    thread-wise and fail maps to fail."""
    if isinstance(x, Program):
        return Program(tuple(plug_term(w, t) for t in x))
    return plug_term(w, x)


def is_weak_context(w: Term) -> bool:
    def count(t):
        if isinstance(t, Hole):
            return 1
        if isinstance(t, _BINARY):
            return sum(count(c) for c in _children(t))
        return 0
    return count(w) == 1


# ---------------------------------------------------------------------------
# Alpha equivalence and canonical forms

def _canon_term(t, bound, free_map, loc_map, counters, rename_free, rename_locs):
    if isinstance(t, Var):
        if t.name in bound:
            return Var(bound[t.name])
        if rename_free:
            if t.name not in free_map:
                free_map[t.name] = f"{_CANON_PREFIX}v{len(free_map)}"
            return Var(free_map[t.name])
        return t
    if isinstance(t, (Cons, Hole)):
        return t
    if isinstance(t, (Abs, AbsLoc, Fresh)):
        new = f"{_CANON_PREFIX}b{counters[0]}"
        counters[0] += 1
        inner = dict(bound)
        inner[t.var] = new
        if isinstance(t, Fresh):
            body = _canon_term(t.body, inner, free_map, loc_map, counters,
                               rename_free, rename_locs)
            return Fresh(new, body)
        body = _canon_program(t.body, inner, free_map, loc_map, counters,
                              rename_free, rename_locs)
        if isinstance(t, Abs):
            return Abs(new, body)
        loc = t.loc
        if rename_locs:
            if loc not in loc_map:
                loc_map[loc] = len(loc_map)
            loc = loc_map[loc]
        return AbsLoc(loc, new, body)
    if isinstance(t, App):
        return App(
            _canon_term(t.fn, bound, free_map, loc_map, counters, rename_free, rename_locs),
            _canon_term(t.arg, bound, free_map, loc_map, counters, rename_free, rename_locs))
    if isinstance(t, Guard):
        return Guard(
            _canon_term(t.left, bound, free_map, loc_map, counters, rename_free, rename_locs),
            _canon_term(t.right, bound, free_map, loc_map, counters, rename_free, rename_locs))
    if isinstance(t, Unif):
        return Unif(
            _canon_term(t.left, bound, free_map, loc_map, counters, rename_free, rename_locs),
            _canon_term(t.right, bound, free_map, loc_map, counters, rename_free, rename_locs))
    raise TypeError(f"unexpected term {t!r}")


def _canon_program(p, bound, free_map, loc_map, counters, rename_free, rename_locs):
    return Program(tuple(
        _canon_term(t, bound, free_map, loc_map, counters, rename_free, rename_locs)
        for t in p))


def canonicalize(x, rename_free=False, rename_locs=False):
    """Rename binders in traversal order; optionally also rename free
    variables and locations by first occurrence."""
    counters = [0]
    if isinstance(x, Program):
        return _canon_program(x, {}, {}, {}, counters, rename_free, rename_locs)
    return _canon_term(x, {}, {}, {}, counters, rename_free, rename_locs)


def alpha_eq(a, b) -> bool:
    """Equality up to renaming of bound variables."""
    if isinstance(a, Program) != isinstance(b, Program):
        return False
    return canonicalize(a) == canonicalize(b)


# ---------------------------------------------------------------------------
# Coherence

def _abslocs_with_bound(t: Term, bound: frozenset, out: list):
    if isinstance(t, (Var, Cons, Hole)):
        return
    if isinstance(t, Abs):
        for th in t.body:
            _abslocs_with_bound(th, bound | {t.var}, out)
        return
    if isinstance(t, AbsLoc):
        out.append((t, bound))
        for th in t.body:
            _abslocs_with_bound(th, bound | {t.var}, out)
        return
    if isinstance(t, Fresh):
        _abslocs_with_bound(t.body, bound | {t.var}, out)
        return
    for c in _children(t):
        _abslocs_with_bound(c, bound, out)


def coherence_witness(terms: Iterable[Term]):
    """None if the set of terms is coherent, else a description of the
    violated condition."""
    occurrences = []
    for t in terms:
        _abslocs_with_bound(t, frozenset(), occurrences)
    by_loc = {}
    for node, bound in occurrences:
        captured = free_vars(node) & bound
        if captured:
            return ("captured-variable", node, sorted(captured))
        by_loc.setdefault(node.loc, []).append(node)
    for loc, nodes in by_loc.items():
        first = nodes[0]
        for other in nodes[1:]:
            if not alpha_eq(AbsLoc(loc, first.var, first.body),
                            AbsLoc(loc, other.var, other.body)):
                return ("location-mismatch", loc, first, other)
    return None


def coherent(x) -> bool:
    if isinstance(x, Program):
        return all(coherence_witness([t]) is None for t in x)
    return coherence_witness([x]) is None


def check_coherent(p: Program):
    for i, t in enumerate(p):
        w = coherence_witness([t])
        if w is not None:
            raise CoherenceError(f"thread {i} violates coherence: {w[0]}", w)


def subst_equal(a: Substitution, b: Substitution) -> bool:
    """Extensional equality of substitutions, up to alpha."""
    if a.support != b.support:
        return False
    return all(alpha_eq(a(x), b(x)) for x in a.support)


# ---------------------------------------------------------------------------
# Fresh-name and location supplies

class Session:
    """Per-evaluation supplies of fresh variable names and locations.

    Names are never re-issued; the avoid set should contain every name
    occurring in the program under evaluation.
    """

    def __init__(self, avoid=(), first_loc=1):
        self._used = set(avoid)
        self._var_n = 0
        self._loc_n = first_loc

    @classmethod
    def for_program(cls, p: Program) -> "Session":
        locs = locations(p)
        first = (max(locs) + 1) if locs else 1
        return cls(avoid=all_names(p), first_loc=first)

    def fresh_var(self, stem="v") -> str:
        while True:
            name = f"{stem}{self._var_n}"
            self._var_n += 1
            if name not in self._used:
                self._used.add(name)
                return name

    def fresh_loc(self) -> int:
        loc = self._loc_n
        self._loc_n += 1
        return loc
