import pytest
from hypothesis import given, settings, strategies as st

from chulog.syntax import (
    And, App, Atom, Bang, Bot, Exists, Forall, IAtom, IExists, IFalse, IForall, Imp, ITrue, Liff,
    Limp, Neg, Not, Or, ParseError, Par, Plus, Tensor, Top, Var, WhyNot, With, desugar,
    dump_linear, parse_int, parse_linear, parse_sequent, parse_theory, print_int, print_linear,
)

VARS = ("x", "y")
terms = st.sampled_from([Var("x"), Var("y"), App("f", (Var("x"),)), App("g", (Var("y"), Var("x")))])


def _atom(pred):
    return st.builds(lambda args: Atom(pred, tuple(args)), st.lists(terms, max_size=2))


linear_leaves = st.one_of(_atom("p"), _atom("q"), _atom("r"), st.just(Top()), st.just(Bot()))


def _linear_step(children):
    return st.one_of(
        st.builds(Tensor, children, children), st.builds(Par, children, children),
        st.builds(With, children, children), st.builds(Plus, children, children),
        st.builds(Limp, children, children), st.builds(Liff, children, children),
        st.builds(Neg, children), st.builds(Bang, children), st.builds(WhyNot, children),
        st.builds(Forall, st.sampled_from(VARS), st.just("D"), children),
        st.builds(Exists, st.sampled_from(VARS), st.just("D"), children),
    )


linear = st.recursive(linear_leaves, _linear_step, max_leaves=12)

int_leaves = st.one_of(
    st.builds(lambda p, args: IAtom(p, tuple(args)), st.sampled_from("pqr"), st.lists(terms, max_size=2)),
    st.just(ITrue()), st.just(IFalse()),
)


def _int_step(children):
    return st.one_of(
        st.builds(lambda xs: And(tuple(xs)), st.lists(children, min_size=2, max_size=3)),
        st.builds(lambda xs: Or(tuple(xs)), st.lists(children, min_size=2, max_size=3)),
        st.builds(Imp, children, children), st.builds(Not, children),
        st.builds(IForall, st.sampled_from(VARS), st.just("D"), children),
        st.builds(IExists, st.sampled_from(VARS), st.just("D"), children),
    )


intf = st.recursive(int_leaves, _int_step, max_leaves=10)


@settings(max_examples=400)
@given(linear)
def test_linear_round_trip(f):
    assert parse_linear(print_linear(f)) == f


@settings(max_examples=300)
@given(intf)
def test_int_round_trip(f):
    assert parse_int(print_int(f)) == f


@given(linear)
def test_desugar_removes_liff(f):
    assert "o-o" not in print_linear(desugar(f))
    assert "liff" not in dump_linear(desugar(f))


def test_precedence():
    assert parse_linear("p * q -o r") == Limp(Tensor(Atom("p", ()), Atom("q", ())), Atom("r", ()))
    assert parse_linear("p -o q -o r") == Limp(Atom("p", ()), Limp(Atom("q", ()), Atom("r", ())))
    assert parse_linear("~p * q") == Tensor(Neg(Atom("p", ())), Atom("q", ()))
    assert parse_linear("/\\x:D. p(x) * q") == Forall("x", "D", Tensor(Atom("p", (Var("x"),)), Atom("q", ())))
    assert dump_linear(parse_linear("p * ~p")) == "(tensor (atom p) (neg (atom p)))"


@pytest.mark.parametrize("text,col", [
    ("p * q + r", 7),
    ("p @ q & r", 7),
    ("p * (q", 7),
    ("p $ q", 3),
    ("p *", 4),
])
def test_parse_errors_report_column(text, col):
    with pytest.raises(ParseError) as info:
        parse_linear(text)
    assert info.value.line == 1
    assert info.value.col == col


def test_mixing_message():
    with pytest.raises(ParseError) as info:
        parse_linear("p * q + r")
    assert "requires parentheses" in info.value.message
    assert str(info.value).startswith("line 1, column 7:")


THEORY = """\
# a comment
theory demo
sort A
pred eq(A,A) dual neq
pred U(A) affirmative
fun f(A): A
const c: A
axiom refl: [x:A] |- eq(x,x)
axiom sub: [x:A, y:A] eq(x,y) * U(x) |- U(y)
axiom neg: [x:A] neq(x,x) |- F
"""


def test_theory_parse():
    th = parse_theory(THEORY)
    assert th.name == "demo"
    assert th.sorts == ["A"]
    assert th.preds["eq"].dual == "neq"
    assert th.preds["U"].affirmative
    assert [a.name for a in th.axioms] == ["refl", "sub", "neg"]
    seq = th.axiom("sub").sequent
    assert seq.context == (("x", "A"), ("y", "A"))
    assert len(seq.hypotheses) == 2
    # the dual name parses as the negation of its base
    assert th.axiom("neg").sequent.hypotheses[0] == Neg(Atom("eq", (Var("x"), Var("x"))))


@pytest.mark.parametrize("bad,line", [
    ("theory t\nsort A\npred p(B)\n", 3),
    ("theory t\nsort A\npred p(A)\npred p(A)\n", 4),
    ("theory t\nsort A\npred p(A)\naxiom a: [x:A] |- p(y)\n", 4),
    ("theory t\nsort A\npred p(A)\naxiom a: [x:A] |- p(x,x)\n", 4),
    ("theory t\nsort A\nfrobnicate\n", 3),
])
def test_theory_errors(bad, line):
    with pytest.raises(ParseError) as info:
        parse_theory(bad)
    assert info.value.line == line


def test_parse_sequent_without_theory():
    seq = parse_sequent("[x:D] p(x) * q |- r")
    assert seq.context == (("x", "D"),)
    assert len(seq.hypotheses) == 2
    assert parse_sequent("|- p @ ~p").hypotheses == ()
    with pytest.raises(ParseError) as info:
        parse_sequent("|- p * q + r")
    assert info.value.col == 10
