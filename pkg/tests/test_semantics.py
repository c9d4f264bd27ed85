import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chulog.models import model_by_id
from chulog.semantics import (
    LAW_INDEX, LAWS, EvalError, Structure, StructureError, check_law, check_structure, classify,
    compile_formula, evaluate, holds_sequent, law_suite, laws_in, random_formula, random_signature,
    replay_witness, search_countermodel, table_algebra,
)
from chulog.syntax import (
    App, Atom, Bang, Bot, Exists, Forall, Liff, Limp, Neg, Par, Plus, Tensor, Top, Var, WhyNot,
    With, parse_sequent, parse_theory,
)


def naive(f, m, preds, dom, env):
    """Straight recursive evaluation using only the model's public operations."""
    if isinstance(f, Atom):
        key = tuple(env[a.name] if isinstance(a, Var) else "d0" for a in f.args)
        return preds[f.pred][key]
    if isinstance(f, Top):
        return m.top
    if isinstance(f, Bot):
        return m.bot
    if isinstance(f, Liff):
        a, b = naive(f.left, m, preds, dom, env), naive(f.right, m, preds, dom, env)
        return m.with_(m.limp(a, b), m.limp(b, a))
    ops = {Tensor: m.tensor, Par: m.par, With: m.with_, Plus: m.plus, Limp: m.limp}
    if type(f) in ops:
        return ops[type(f)](naive(f.left, m, preds, dom, env), naive(f.right, m, preds, dom, env))
    un = {Neg: m.neg, Bang: m.bang, WhyNot: m.whynot}
    if type(f) in un:
        return un[type(f)](naive(f.body, m, preds, dom, env))
    vals = [naive(f.body, m, preds, dom, {**env, f.var: d}) for d in dom]
    acc = m.top if isinstance(f, Forall) else m.bot
    for v in vals:
        acc = m.with_(acc, v) if isinstance(f, Forall) else m.plus(acc, v)
    return acc


def _random_structure(m, rng):
    dom = ["d0", "d1"]
    preds = {p: {(d,): rng.choice(m.elements()) for d in dom} for p in "pqrs"}
    return Structure(m, {"D": dom}, preds, {}, {"o": "d0"}), preds, dom


@pytest.mark.parametrize("mid", ["chu0:chain3", "chu0:bool2", "chu1:chain2", "int:3pt", "luk:grid5"])
def test_evaluate_matches_naive(mid):
    m = model_by_id(mid)
    rng = random.Random(mid)
    for seed in range(150):
        f = random_formula(seed, 5)
        s, preds, dom = _random_structure(m, rng)
        assert evaluate(f, s) == naive(f, m, preds, dom, {})


@pytest.mark.parametrize("mid", ["chu0:downset:N", "chu1:bool2", "int:sierpinski"])
def test_table_algebra_matches_direct(mid):
    m = model_by_id(mid)
    alg = table_algebra(m)
    rng = random.Random(7)
    for seed in range(150):
        f = random_formula(seed, 6)
        s, preds, dom = _random_structure(m, rng)
        encoded = Structure(m, s.domains, {p: {k: alg.encode(v) for k, v in t.items()}
                                           for p, t in preds.items()}, {}, s.consts)
        got = alg.decode(compile_formula(f, alg, encoded)({}))
        assert got == evaluate(f, s)


def test_sequent_holds_brute_force():
    th = parse_theory("theory t\nsort A\npred eq(A,A) dual neq\n"
                      "axiom trans: [x:A, y:A, z:A] eq(x,y) * eq(y,z) |- eq(x,z)\n")
    m = model_by_id("luk:grid5")
    dom = ["a", "b", "c"]
    rng = random.Random(3)
    for _ in range(40):
        table = {(x, y): rng.choice(m.elements()) for x in dom for y in dom}
        s = Structure(m, {"A": dom}, {"eq": table})
        want = all(max(Fraction(0), table[x, y] + table[y, z] - 1) <= table[x, z]
                   for x, y, z in itertools.product(dom, repeat=3))
        assert holds_sequent(th.axiom("trans").sequent, s, th).holds == want


def test_structure_validation():
    th = parse_theory("theory t\nsort A\npred U(A) affirmative\nfun f(A): A\nconst c: A\n")
    obj = {"model": "chu0:chain2", "domains": {"A": ["a", "b"]},
           "preds": {"U": {"a": "T", "b": "F"}}, "funcs": {"f": {"a": "b", "b": "a"}},
           "consts": {"c": "a"}}
    s = Structure.from_json(obj, theory=th)
    assert Structure.from_json(s.to_json(), theory=th).to_json() == s.to_json()
    for broken in (
        {**obj, "preds": {"U": {"a": "N", "b": "F"}}},      # not affirmative
        {**obj, "preds": {"U": {"a": "T"}}},                # missing entry
        {**obj, "funcs": {"f": {"a": "z", "b": "a"}}},      # outside the domain
        {**obj, "consts": {}},
        {k: v for k, v in obj.items() if k != "model"},
    ):
        with pytest.raises(StructureError):
            Structure.from_json(broken, theory=th)


def test_check_structure_reports_witness():
    th = parse_theory("theory t\nsort A\npred eq(A,A) dual neq\n"
                      "axiom trans: [x:A, y:A, z:A] eq(x,y) & eq(y,z) |- eq(x,z)\n")
    m = model_by_id("luk:grid5")
    d = {("a", "b"): Fraction(1, 2), ("b", "c"): Fraction(1, 2), ("a", "c"): Fraction(3, 4)}
    table = {}
    for x, y in itertools.product("abc", repeat=2):
        dist = 0 if x == y else d.get((x, y), d.get((y, x)))
        table[x, y] = 1 - Fraction(dist)
    s = Structure(m, {"A": list("abc")}, {"eq": table})
    [(name, res)] = check_structure(th, s)
    assert name == "trans" and not res.holds
    assert res.witness == {"x": "a", "y": "b", "z": "c"}
    assert (res.lhs, res.rhs) == ("1/2", "1/4")


def test_unbound_names_raise():
    s = Structure(model_by_id("chu0:chain2"), {"D": ["d0"]}, {"p": {("d0",): "T"}})
    with pytest.raises(EvalError):
        evaluate(Atom("p", (Var("x"),)), s)
    with pytest.raises(EvalError):
        evaluate(Atom("p", (App("k", ()),)), s)
    with pytest.raises(EvalError):
        evaluate(Atom("zz", ()), s)


def test_law_catalogue_shape():
    assert {law.suite for law in LAWS} >= {"core", "chu-special", "exponential"}
    assert len(laws_in("chu-special")) == 7
    assert laws_in("seely") == [LAW_INDEX["seely"]]
    for law in LAWS:
        assert set(law.slots) <= {"P", "Q", "R", "A(d0)", "A(d1)"}


@pytest.mark.parametrize("mid", ["chu0:chain3", "chu1:chain2", "luk:grid5", "int:3pt", "int:discrete2"])
def test_no_unexpected_law_failures(mid):
    report = law_suite("all", [mid])
    assert report.ok, [r.to_json() for r in report.results if r.unexpected]
    for r in report.results:
        if r.status == "FAILED":
            assert replay_witness(LAW_INDEX[r.law], mid, r.witness)


def test_documented_failures():
    r = check_law(LAW_INDEX["bang-squaring"], "luk:grid5")
    assert r.status == "FAILED" and r.expected == "fails"
    assert r.witness == {"P": "3/4"}
    r = check_law(LAW_INDEX["mix-units"], "chu1:chain2")
    assert r.status == "HOLDS"


def test_parallel_report_is_identical():
    ids = ["chu0:chain2", "chu0:bool2", "luk:grid5"]
    assert law_suite("core", ids, jobs=2).to_json() == law_suite("core", ids, jobs=1).to_json()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_luk_laws_are_seed_stable(seed):
    a = check_law(LAW_INDEX["adjunction"], "luk:grid5", seed=seed, samples=50)
    b = check_law(LAW_INDEX["adjunction"], "luk:grid5", seed=seed, samples=50)
    assert a == b and a.status == "HOLDS"


def test_classify():
    m = model_by_id("chu0:chain2")
    t, f, n = m.top, m.bot, m.from_json("N")
    assert classify(t, m) == {"affirmative": True, "refutative": True, "decidable": True}
    assert classify(n, m) == {"affirmative": False, "refutative": False, "decidable": False}


def test_search_law_and_sequent():
    res = search_countermodel(LAW_INDEX["plus-excluded-middle"], "chu0:chain2")
    assert res.found and res.witness == {"P": "N"}
    res = search_countermodel(LAW_INDEX["par-excluded-middle"], "chu0:chain2")
    assert not res.found and res.message.startswith("none up to bound")
    res = search_countermodel(parse_sequent("[x:D] p(x) |- /\\y:D. p(y)"), "chu0:chain2")
    assert res.found
    s = res.structure
    assert not holds_sequent(parse_sequent("[x:D] p(x) |- /\\y:D. p(y)"), s).holds
    assert len(s.domains["D"]) == 2


def test_search_theory_axiom_respects_others():
    th = parse_theory("theory t\nsort A\npred eq(A,A) dual neq\n"
                      "axiom refl: [x:A] |- eq(x,x)\n"
                      "axiom sym: [x:A, y:A] eq(x,y) |- eq(y,x)\n")
    res = search_countermodel("sym", "chu0:chain2", theory=th, max_domain=2)
    assert res.found
    assert holds_sequent(th.axiom("refl").sequent, res.structure, th).holds
    assert not holds_sequent(th.axiom("sym").sequent, res.structure, th).holds


def test_search_cap():
    seq = parse_sequent("[x:D, y:D] p(x,y) * q(y) |- p(y,x)")
    res = search_countermodel(seq, "chu0:bool2", cap=3)
    assert res.capped and not res.found and res.examined == 3
    res = search_countermodel(seq, "chu0:bool2")
    assert res.found and not res.capped
    assert not holds_sequent(seq, res.structure).holds
    res = search_countermodel(parse_sequent("[x:D] p(x) |- p(x) + q(x)"), "chu0:chain2", cap=5)
    assert res.capped and not res.found


def test_random_formula_determinism():
    assert random_formula(5, 6) == random_formula(5, 6)
    th = random_signature()
    assert th.preds["p"].dual == "np"
    assert random_signature(affirmative=("s",)).preds["s"].affirmative
    with pytest.raises(ValueError):
        random_formula(0, 9)
