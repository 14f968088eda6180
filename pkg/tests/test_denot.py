"""Tests for the finite denotational semantics: models, enumeration,
unitary constructors, denotation clauses, and soundness along steps."""

import pytest

from lamu.concrete import parse_program
from lamu.denot import (
    DenotError, Model, TooLarge, denote, denote_toplevel,
    is_unitary, soundness_check,
)
from lamu.generator import Generator, GeneratorConfig
from lamu.syntax import (
    AbsLoc, Cons, Fresh, Guard, Program, Unif, Var, singleton,
)
from lamu.typecheck import (
    Arrow, Base, ambient_context, base_names_used, default_signature,
    infer,
)

I = Base("i")
# the signature must be stratified: constructor images in a base type
# never feed back into an argument type, or the closure diverges
SIG = default_signature({"C": I, "D": I})
PAIR = Base("pair")
STRATIFIED = default_signature(
    {"C": I, "D": I, "S": Arrow(I, Base("s1")),
     "P": Arrow(I, Arrow(I, PAIR))})


def model(sizes=None, sig=SIG, cap=4096):
    return Model(sizes if sizes is not None else {}, sig, cap=cap)


def annotate(text, sig=SIG, gamma=None):
    p = parse_program(text)
    typing = infer(gamma if gamma is not None else ambient_context(p), sig, p)
    return typing


def test_base_closure_constructor_images():
    m = Model({}, STRATIFIED)
    names = {repr(a) for a in m.enum_type(I)}
    assert names == {"C", "D"}
    assert {repr(a) for a in m.enum_type(Base("s1"))} == {"S(C)", "S(D)"}
    assert repr(sorted(map(repr, m.enum_type(PAIR)))[0]) is not None
    assert len(m.enum_type(PAIR)) == 4


def test_recursive_signature_hits_cap():
    with pytest.raises(TooLarge):
        Model({}, default_signature({"Z": I, "S": Arrow(I, I)}), cap=32)


def test_declared_atoms_plus_images():
    m = Model({"n": 2}, default_signature({"W": Arrow(Base("n"), Base("m"))}))
    assert len(m.enum_type(Base("n"))) == 2
    assert len(m.enum_type(Base("m"))) == 2  # one image per n atom


def test_empty_base_rejected():
    with pytest.raises(DenotError):
        Model({"n": 0}, default_signature())


def test_arrow_enumeration_count():
    m = Model({"n": 1}, default_signature())
    # (2^1)^1 functions from one atom to subsets of one atom
    assert len(m.enum_type(Arrow(Base("n"), Base("n")))) == 2
    with pytest.raises(TooLarge):
        Model({"n": 3}, default_signature(), cap=64).enum_type(
            Arrow(Base("n"), Arrow(Base("n"), Base("n"))))


def test_constructors_are_unitary_and_injective():
    m = Model({}, STRATIFIED, cap=4096)
    p = m.cons_interp("P")
    assert is_unitary(p, Arrow(I, Arrow(I, PAIR)), m)
    c, d = m.cons_interp("C"), m.cons_interp("D")
    (pc,) = p(c)
    (pd,) = p(d)
    assert pc(c) != pd(c)       # injective in the first argument
    assert pc(c) != pc(d)       # and in the second


def test_denote_variable_and_constructor():
    m = model()
    c = m.cons_interp("C")
    assert denote(Var("x"), {"x": c}, m) == frozenset((c,))
    assert denote(Cons("D"), {}, m) == frozenset((m.cons_interp("D"),))


def test_denote_unif_intersection():
    m = model()
    assert denote(Unif(Cons("C"), Cons("C")), {}, m) == frozenset((m.ok,))
    assert denote(Unif(Cons("C"), Cons("D")), {}, m) == frozenset()


def test_denote_guard():
    m = model()
    t = Guard(Unif(Cons("C"), Cons("C")), Cons("D"))
    assert denote(t, {}, m) == frozenset((m.cons_interp("D"),))
    dead = Guard(Unif(Cons("C"), Cons("D")), Cons("D"))
    assert denote(dead, {}, m) == frozenset()


def test_denote_fresh_unions_over_domain():
    m = model()
    t = Fresh("x", Var("x"), ann=I)
    assert denote(t, {}, m) == frozenset(m.enum_type(I))


def test_denote_program_unions_threads():
    typing = annotate("C | D")
    m = model()
    sem = denote_toplevel(typing.node, m, typing.gamma)
    assert sem == frozenset((m.cons_interp("C"), m.cons_interp("D")))
    assert denote(Program(()), {}, m) == frozenset()


def test_denote_abstraction_application():
    typing = annotate(r"(\x. x) C")
    m = model()
    assert denote_toplevel(typing.node, m, typing.gamma) == \
        frozenset((m.cons_interp("C"),))


def test_denote_toplevel_enumerates_free_variables():
    typing = annotate("x =:= C")
    m = model()
    # for exactly one choice of x the unification holds
    assert denote_toplevel(typing.node, m, typing.gamma) == frozenset((m.ok,))


def test_located_closures_denote_alike():
    # the naive semantics ignores locations
    a = AbsLoc(1, "x", singleton(Var("x")), ann=I)
    b = AbsLoc(2, "x", singleton(Var("x")), ann=I)
    m = model()
    assert denote(a, {}, m) == denote(b, {}, m)


def test_strict_inclusion_witness():
    a = AbsLoc(1, "x", singleton(Var("x")), ann=I)
    b = AbsLoc(2, "x", singleton(Var("x")), ann=I)
    m = model()
    assert denote(Unif(a, b), {}, m) == frozenset((m.ok,))
    assert denote(Program(()), {}, m) == frozenset()


def test_soundness_along_five_rule_trace():
    sig = default_signature({"C": I, "D": I,
                             "P": Arrow(I, Arrow(I, PAIR))})
    p = parse_program(r"(\x. fresh y. ((x =:= P C y); y)) (P C D)")
    m = Model({}, sig, cap=4096)
    verdict = soundness_check(p, m)
    assert verdict.ok
    rules = [s.rule for s in verdict.steps]
    assert rules == ["alloc", "beta", "fresh", "unif", "guard"]
    assert all(s.equal for s in verdict.steps)
    assert verdict.final_denotation == frozenset((m.cons_interp("D"),))


def test_soundness_fail_step_may_shrink():
    p = parse_program("C =:= D | C =:= C")
    m = model()
    verdict = soundness_check(p, m)
    assert verdict.ok
    fail_steps = [s for s in verdict.steps if s.rule == "fail"]
    assert fail_steps
    # here the dropped thread was denotationally empty, so no shrinkage
    assert all(s.equal for s in fail_steps)


def test_soundness_on_samples():
    config = GeneratorConfig(seed=53, max_depth=3, allow_absloc=False,
                             well_typed=True,
                             signature=dict(STRATIFIED))
    del config.signature["Ok"]
    gen = Generator(config)
    stream = gen.programs()
    sig = default_signature(config.signature)
    checked = 0
    while checked < 60:
        p = next(stream)
        try:
            typing = infer(ambient_context(p), sig, p)
            sizes = {name: 2 for name in base_names_used(typing)
                     if name != "unit"}
            m = Model(sizes, sig, cap=600)
            verdict = soundness_check(p, m, fuel=60)
        except (TooLarge, DenotError):
            continue
        checked += 1
        assert verdict.ok, (p, [s for s in verdict.steps if not s.ok])
