"""Evaluation over finite structures, law suites and countermodel search.

Formulas are compiled to closures over an *algebra*: either the model's own
operations (:class:`DirectAlgebra`) or, for enumerable carriers, dense
integer tables (:class:`TableAlgebra`) which make exhaustive sweeps cheap.
"""

from __future__ import annotations

import itertools
import random
import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Sequence

from .lattice import FiniteHeyting
from .models import AffineModel, ModelError, model_by_id
from .syntax import (
    And, App, Atom, Bang, Binary, Bot, Exists, Forall, IAtom, IExists, IFalse, IForall,
    IFormula, Imp, ITrue, LFormula, Liff, Limp, Neg, Not, Or, Par, Plus, PredSym, Quant,
    Sequent, Tensor, Term, Theory, Top, Unary, Var, WhyNot, With, desugar, parse_linear,
)


class EvalError(ValueError):
    pass


class StructureError(ValueError):
    pass


# -- algebras ----------------------------------------------------------------

_BIN = {Tensor: "tensor", Par: "par", With: "with", Plus: "plus", Limp: "limp"}
_UN = {Neg: "neg", Bang: "bang", WhyNot: "whynot"}


class DirectAlgebra:
    """Values are the model's own carrier elements."""

    tabled = False

    def __init__(self, model: AffineModel):
        self.model = model
        self.top, self.bot, self.unit = model.top, model.bot, model.unit
        self._bin = {"tensor": model.tensor, "par": model.par, "with": model.with_,
                     "plus": model.plus, "limp": model.limp}
        self._un = {"neg": model.neg, "bang": model.bang, "whynot": model.whynot}

    def binop(self, op: str) -> Callable:
        return self._bin[op]

    def unop(self, op: str) -> Callable:
        return self._un[op]

    def leq(self, a, b) -> bool:
        return self.model.leq(a, b)

    def forall(self, values):
        return self.model.forall(values)

    def exists(self, values):
        return self.model.exists(values)

    def encode(self, v):
        return v

    def decode(self, v):
        return v

    def elements(self) -> list:
        return self.model.elements()


class TableAlgebra:
    """Values are indices into ``model.elements()``; every operation is a lookup."""

    tabled = True

    def __init__(self, model: AffineModel):
        self.model = model
        els = model.elements()
        index = {e: i for i, e in enumerate(els)}
        if len(index) != len(els):
            raise ModelError(f"{model.model_id}: duplicate carrier elements")
        self._els, self._index = els, index

        def idx(v):
            try:
                return index[v]
            except KeyError:
                raise ModelError(f"{model.model_id}: carrier is not closed ({v!r})") from None

        n = range(len(els))
        self.tables = {op: [[idx(fn(els[a], els[b])) for b in n] for a in n]
                       for op, fn in DirectAlgebra(model)._bin.items()}
        self.unary = {op: [idx(fn(els[a])) for a in n] for op, fn in DirectAlgebra(model)._un.items()}
        self.le = [[model.leq(els[a], els[b]) for b in n] for a in n]
        self.top, self.bot, self.unit = idx(model.top), idx(model.bot), idx(model.unit)

    def binop(self, op: str) -> Callable:
        t = self.tables[op]
        return lambda a, b: t[a][b]

    def unop(self, op: str) -> Callable:
        return self.unary[op].__getitem__

    def leq(self, a, b) -> bool:
        return self.le[a][b]

    def forall(self, values):
        t, acc = self.tables["with"], self.top
        for v in values:
            acc = t[acc][v]
        return acc

    def exists(self, values):
        t, acc = self.tables["plus"], self.bot
        for v in values:
            acc = t[acc][v]
        return acc

    def encode(self, v) -> int:
        return self._index[v]

    def decode(self, i: int):
        return self._els[i]

    def elements(self) -> list[int]:
        return list(range(len(self._els)))


_ALGEBRAS: dict[str, TableAlgebra] = {}


def table_algebra(model: AffineModel) -> TableAlgebra:
    alg = _ALGEBRAS.get(model.model_id)
    if alg is None or alg.model is not model:
        alg = _ALGEBRAS[model.model_id] = TableAlgebra(model)
    return alg


# -- structures --------------------------------------------------------------

def _key_text(key: tuple[str, ...]) -> str:
    return ",".join(key)


def _text_key(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",")) if text.strip() else ()


@dataclass
class Structure:
    """A finite first-order structure valued in an affine model."""

    model: AffineModel
    domains: dict[str, list[str]] = field(default_factory=dict)
    preds: dict[str, dict[tuple[str, ...], Any]] = field(default_factory=dict)
    funcs: dict[str, dict[tuple[str, ...], str]] = field(default_factory=dict)
    consts: dict[str, str] = field(default_factory=dict)

    def validate(self, theory: Theory | None = None) -> None:
        """Check totality of every declared table and affirmativity of flagged predicates."""
        if theory is None:
            return
        for sort in theory.sorts:
            if sort not in self.domains:
                raise StructureError(f"no domain for sort {sort}")
        for name, sym in theory.preds.items():
            table = self.preds.get(name)
            if table is None:
                raise StructureError(f"no table for predicate {name}")
            for key in itertools.product(*(self.domains[s] for s in sym.arg_sorts)):
                if key not in table:
                    raise StructureError(f"table for {name} is missing {_key_text(key) or '()'}")
                value = table[key]
                if sym.affirmative and self.model.bang(value) != value:
                    raise StructureError(
                        f"{name}({_key_text(key)}) = {self.model.fmt(value)} is not affirmative "
                        f"(! gives {self.model.fmt(self.model.bang(value))})")
        for name, fn in theory.funcs.items():
            table = self.funcs.get(name)
            if table is None:
                raise StructureError(f"no table for function {name}")
            for key in itertools.product(*(self.domains[s] for s in fn.arg_sorts)):
                if key not in table:
                    raise StructureError(f"table for {name} is missing {_key_text(key)}")
                if table[key] not in self.domains[fn.result]:
                    raise StructureError(f"{name}({_key_text(key)}) = {table[key]} is outside {fn.result}")
        for name, sort in theory.consts.items():
            if self.consts.get(name) not in self.domains[sort]:
                raise StructureError(f"constant {name} has no value in {sort}")

    def to_json(self) -> dict:
        m = self.model
        return {
            "schema": "chulog.structure/1",
            "model": m.model_id,
            "domains": {s: list(d) for s, d in self.domains.items()},
            "preds": {p: {_key_text(k): m.to_json(v) for k, v in t.items()} for p, t in self.preds.items()},
            "funcs": {f: {_key_text(k): v for k, v in t.items()} for f, t in self.funcs.items()},
            "consts": dict(self.consts),
        }

    @classmethod
    def from_json(cls, obj: Mapping, model: AffineModel | None = None,
                  theory: Theory | None = None) -> "Structure":
        if not isinstance(obj, Mapping):
            raise StructureError("a structure must be a JSON object")
        if model is None:
            if "model" not in obj:
                raise StructureError("structure names no model")
            model = model_by_id(obj["model"])
        try:
            s = cls(
                model=model,
                domains={str(k): [str(x) for x in v] for k, v in obj.get("domains", {}).items()},
                preds={p: {_text_key(k): model.from_json(v) for k, v in t.items()}
                       for p, t in obj.get("preds", {}).items()},
                funcs={f: {_text_key(k): str(v) for k, v in t.items()} for f, t in obj.get("funcs", {}).items()},
                consts={str(k): str(v) for k, v in obj.get("consts", {}).items()},
            )
        except (ModelError, AttributeError, TypeError) as exc:
            raise StructureError(str(exc)) from exc
        s.validate(theory)
        return s


# -- compilation -------------------------------------------------------------

Env = dict


def _compile_term(t: Term, view) -> Callable[[Env], str]:
    if isinstance(t, Var):
        name = t.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                raise EvalError(f"unbound variable {name}") from None
        return var
    fn, args = t.fn, [_compile_term(a, view) for a in t.args]
    if not args:
        consts, funcs = view.consts, view.funcs

        def const(env):
            if fn in consts:
                return consts[fn]
            if fn in env:
                return env[fn]
            if () in funcs.get(fn, {}):
                return funcs[fn][()]
            raise EvalError(f"no value for constant {fn}")
        return const
    funcs = view.funcs

    def app(env):
        key = tuple(a(env) for a in args)
        try:
            return funcs[fn][key]
        except KeyError:
            raise EvalError(f"function table {fn} has no entry for {_key_text(key)}") from None
    return app


def compile_formula(f: LFormula, alg, view) -> Callable[[Env], Any]:
    """Closure evaluating ``f`` under a variable environment.

    ``view`` supplies ``domains``, ``preds``, ``funcs`` and ``consts``;
    tables are read at call time, so mutating them re-targets the closure.
    """
    if isinstance(f, Atom):
        name, args = f.pred, [_compile_term(a, view) for a in f.args]
        preds = view.preds

        def atom(env):
            key = tuple(a(env) for a in args)
            try:
                return preds[name][key]
            except KeyError:
                raise EvalError(f"predicate table {name} has no entry for ({_key_text(key)})") from None
        return atom
    if isinstance(f, Top):
        top = alg.top
        return lambda env: top
    if isinstance(f, Bot):
        bot = alg.bot
        return lambda env: bot
    if isinstance(f, Liff):
        return compile_formula(desugar(f), alg, view)
    if isinstance(f, Binary):
        left, right = compile_formula(f.left, alg, view), compile_formula(f.right, alg, view)
        if alg.tabled:
            t = alg.tables[_BIN[type(f)]]
            return lambda env: t[left(env)][right(env)]
        op = alg.binop(_BIN[type(f)])
        return lambda env: op(left(env), right(env))
    if isinstance(f, Unary):
        body = compile_formula(f.body, alg, view)
        if alg.tabled:
            t = alg.unary[_UN[type(f)]]
            return lambda env: t[body(env)]
        op = alg.unop(_UN[type(f)])
        return lambda env: op(body(env))
    if isinstance(f, Quant):
        var, sort, body = f.var, f.sort, compile_formula(f.body, alg, view)
        fold = alg.forall if isinstance(f, Forall) else alg.exists
        domains = view.domains

        def quant(env):
            try:
                dom = domains[sort]
            except KeyError:
                raise EvalError(f"no domain for sort {sort}") from None
            values = []
            for d in dom:
                inner = dict(env)
                inner[var] = d
                values.append(body(inner))
            return fold(values)
        return quant
    raise EvalError(f"cannot evaluate {f!r}")


def evaluate(f: LFormula, s: Structure, valuation: Mapping[str, str] | None = None):
    """Value of ``f`` in ``s`` under ``valuation`` (variable -> domain element)."""
    return compile_formula(f, DirectAlgebra(s.model), s)(dict(valuation or {}))


# -- sequents ----------------------------------------------------------------

@dataclass
class SequentResult:
    holds: bool
    witness: dict[str, str] | None = None
    lhs: str | None = None
    rhs: str | None = None
    checked: int = 0


def existence_hypotheses(seq: Sequent, theory: Theory | None) -> list[LFormula]:
    """``E_S(x)`` for every context variable whose sort has an existence predicate."""
    if theory is None:
        return []
    return [Atom(f"E_{sort}", (Var(v),)) for v, sort in seq.context if theory.existence_pred(sort)]


class _SequentChecker:
    def __init__(self, seq: Sequent, alg, view, theory: Theory | None = None):
        self.alg = alg
        self.view = view
        self.context = list(seq.context)
        hyps = existence_hypotheses(seq, theory) + list(seq.hypotheses)
        self.hyps = [compile_formula(h, alg, view) for h in hyps]
        self.concl = compile_formula(seq.conclusion, alg, view)
        self._tensor = alg.binop("tensor")

    def first_failure(self) -> SequentResult:
        alg, view = self.alg, self.view
        names = [v for v, _ in self.context]
        try:
            doms = [view.domains[s] for _, s in self.context]
        except KeyError as exc:
            raise EvalError(f"no domain for sort {exc.args[0]}") from None
        checked = 0
        for values in itertools.product(*doms):
            env = dict(zip(names, values))
            acc = alg.unit
            for h in self.hyps:
                acc = self._tensor(acc, h(env))
            rhs = self.concl(env)
            checked += 1
            if not alg.leq(acc, rhs):
                m = alg.model
                return SequentResult(False, env, m.fmt(alg.decode(acc)), m.fmt(alg.decode(rhs)), checked)
        return SequentResult(True, checked=checked)


def holds_sequent(seq: Sequent, s: Structure, theory: Theory | None = None) -> SequentResult:
    """Check ``⊗hyps ≤ conclusion`` for every valuation of the context.

    The empty tensor is the model's tensor unit.  With a theory, context
    variables of a sort carrying an existence predicate get ``E_S(x)`` as an
    extra hypothesis.
    """
    return _SequentChecker(seq, DirectAlgebra(s.model), s, theory).first_failure()


def check_structure(theory: Theory, s: Structure) -> list[tuple[str, SequentResult]]:
    s.validate(theory)
    return [(ax.name, holds_sequent(ax.sequent, s, theory)) for ax in theory.axioms]


# -- classification ----------------------------------------------------------

def classify(p, model: AffineModel) -> dict[str, bool]:
    return {
        "affirmative": model.bang(p) == p,
        "refutative": model.whynot(p) == p,
        "decidable": model.leq(model.top, model.plus(p, model.neg(p))),
    }


# -- law catalogue -----------------------------------------------------------

LAW_DOMAIN = ("d0", "d1")
UNIT_ATOM = "I"
FAMILY = "A"
MODEL_KINDS = ("chu0", "chu1", "luk", "int")
SUITES = ("core", "chu-special", "exponential")


@dataclass(frozen=True)
class Clause:
    relation: str              # "equiv", "entails" or "iff"
    sides: tuple[LFormula, ...]

    def text(self) -> str:
        s = [str(x) for x in self.sides]
        if self.relation == "equiv":
            return f"{s[0]} = {s[1]}"
        if self.relation == "entails":
            return f"{s[0]} |- {s[1]}"
        return f"{s[0]} |- {s[1]}  iff  {s[2]} |- {s[3]}"


@dataclass(frozen=True)
class LawSchema:
    """A law over metavariables ``P``, ``Q``, ``R`` and a family ``A(x)``, ``x:D``.

    The atom ``I`` stands for the tensor unit of the model.  ``expect`` maps a
    model kind, or a full model id, to "holds" or "fails"; models not
    listed make no claim.
    """

    name: str
    suite: str
    description: str
    clauses: tuple[Clause, ...]
    expect: tuple[tuple[str, str], ...]
    only: tuple[str, ...] | None = None
    skip_reason: str = ""

    @property
    def slots(self) -> tuple[str, ...]:
        atoms: set[str] = set()
        for c in self.clauses:
            for f in c.sides:
                atoms |= _atoms(f)
        atoms.discard(UNIT_ATOM)
        out = sorted(a for a in atoms if a != FAMILY)
        if FAMILY in atoms:
            out += [f"{FAMILY}({d})" for d in LAW_DOMAIN]
        return tuple(out)

    def expected(self, model_id: str) -> str | None:
        table = dict(self.expect)
        if model_id in table:
            return table[model_id]
        return table.get(model_id.split(":", 1)[0])

    def text(self) -> str:
        return "; ".join(c.text() for c in self.clauses)


def _atoms(f: LFormula) -> set[str]:
    if isinstance(f, Atom):
        return {f.pred}
    if isinstance(f, Binary):
        return _atoms(f.left) | _atoms(f.right)
    if isinstance(f, (Unary, Quant)):
        return _atoms(f.body)
    return set()


def _clause(text: str) -> Clause:
    if " iff " in text:
        left, right = text.split(" iff ")
        a, b = left.split("|-")
        c, d = right.split("|-")
        return Clause("iff", tuple(parse_linear(x) for x in (a, b, c, d)))
    if "|-" in text:
        a, b = text.split("|-")
        return Clause("entails", (parse_linear(a), parse_linear(b)))
    a, b = text.split(" = ")
    return Clause("equiv", (parse_linear(a), parse_linear(b)))


def _law(name, suite, description, *clauses, fails=(), unclaimed=(), only=None, skip_reason=""):
    expect = tuple((k, "fails" if k in fails else "holds") for k in MODEL_KINDS
                   if k not in unclaimed and (only is None or k in only))
    expect += tuple((mid, "fails") for mid in fails if ":" in mid)
    return LawSchema(name, suite, description, tuple(_clause(c) for c in clauses), expect, only, skip_reason)


# chu1 is not affine: its tensor unit (1,1) differs from top, so laws that
# collapse the two units or discard hypotheses fail there.
_AFFINE = ("chu1",)
_CHU0_ONLY_SPECIAL = ("chu1",)
# interior-model failures depend on the space: none at all on a discrete one
_SPACE_DEPENDENT = ("chu1", "int")

LAWS: tuple[LawSchema, ...] = (
    _law("involution", "core", "linear negation is an involution", "~~P = P"),
    _law("de-morgan-tensor", "core", "negation exchanges tensor and par", "~(P * Q) = ~P @ ~Q"),
    _law("de-morgan-with", "core", "negation exchanges with and plus", "~(P & Q) = ~P + ~Q"),
    _law("de-morgan-forall", "core", "negation exchanges the two quantifiers",
         "~/\\x:D. A(x) = \\/x:D. ~A(x)"),
    _law("de-morgan-exists", "core", "negation exchanges the two quantifiers",
         "~\\/x:D. A(x) = /\\x:D. ~A(x)"),
    _law("adjunction", "core", "tensor is left adjoint to linear implication",
         "P * Q |- R iff P |- Q -o R"),
    _law("limp-par", "core", "linear implication is par with a negated antecedent",
         "P -o Q = ~P @ Q"),
    _law("tensor-comm", "core", "tensor is commutative", "P * Q = Q * P"),
    _law("tensor-assoc", "core", "tensor is associative", "(P * Q) * R = P * (Q * R)"),
    _law("par-assoc", "core", "par is associative", "(P @ Q) @ R = P @ (Q @ R)"),
    _law("tensor-top", "core", "affine unit collapse: top is the tensor unit", "P * T = P", fails=_AFFINE),
    _law("with-top", "core", "top is the unit of with", "P & T = P"),
    _law("plus-bot", "core", "bottom is the unit of plus", "P + F = P"),
    _law("par-bot", "core", "affine unit collapse: bottom is the par unit", "P @ F = P", fails=_AFFINE),
    _law("weakening", "core", "a tensor entails each factor", "P * Q |- P", fails=_AFFINE),
    _law("par-excluded-middle", "core", "multiplicative excluded middle", "I |- P @ ~P"),
    _law("frobenius-tensor-exists", "core", "tensor distributes over the existential",
         "P * \\/x:D. A(x) = \\/x:D. P * A(x)"),
    _law("frobenius-par-forall", "core", "par distributes over the universal",
         "P @ /\\x:D. A(x) = /\\x:D. P @ A(x)"),
    _law("additive-frobenius", "core",
         "with distributes over the existential: valid here, invalid proof-theoretically",
         "P & \\/x:D. A(x) = \\/x:D. P & A(x)"),
    _law("mix-units", "core", "the tensor unit is also the par unit",
         "P * I = P", "P @ I = P", only=("chu1",),
         skip_reason="affine model: the tensor unit is top and the par unit is bottom"),
    _law("additive-distributivity", "chu-special", "with distributes over plus",
         "P & (Q + R) = (P & Q) + (P & R)"),
    _law("tensor-idempotent-cube", "chu-special", "P*P*P equals P*P",
         "P * P * P = P * P", fails=("luk",), unclaimed=_CHU0_ONLY_SPECIAL),
    _law("bang-squaring", "chu-special", "!P equals P*P",
         "!P = P * P", fails=("luk", "int:3pt", "int:sierpinski"), unclaimed=_SPACE_DEPENDENT),
    _law("whynot-limp-bang", "chu-special", "?(P -o !P) is provable",
         "I |- ?(P -o !P)", unclaimed=_CHU0_ONLY_SPECIAL),
    _law("whynot-bang-below-bang-whynot", "chu-special", "?!P entails !?P",
         "?!P |- !?P", fails=("int:3pt",), unclaimed=_SPACE_DEPENDENT),
    _law("bang-plus", "chu-special", "! preserves plus",
         "!(P + Q) = !P + !Q", fails=("int:3pt", "int:sierpinski"),
         unclaimed=_SPACE_DEPENDENT),
    _law("bang-exists", "chu-special", "! preserves the existential",
         "!\\/x:D. A(x) = \\/x:D. !A(x)", fails=("int:3pt", "int:sierpinski"),
         unclaimed=_SPACE_DEPENDENT),
    _law("seely", "exponential", "Seely condition: ! turns with into tensor", "!(P & Q) = !P * !Q",
         unclaimed=("chu1",)),
    _law("bang-idempotent", "exponential", "!!P equals !P", "!!P = !P"),
    _law("bang-counit", "exponential", "!P entails P", "!P |- P", unclaimed=("chu1",)),
    _law("whynot-unit", "exponential", "P entails ?P", "P |- ?P", unclaimed=("chu1",)),
    _law("whynot-idempotent", "exponential", "??P equals ?P", "??P = ?P"),
    _law("bang-top", "exponential", "!T equals T", "!T = T"),
    _law("bang-monotone", "exponential", "! is monotone", "!(P & Q) |- !P"),
    _law("plus-excluded-middle", "extra", "additive excluded middle (decidability)",
         "I |- P + ~P", fails=("chu0", "luk"), unclaimed=("chu1", "int")),
)

LAW_INDEX = {law.name: law for law in LAWS}


def laws_in(suite: str) -> list[LawSchema]:
    if suite == "all":
        return [law for law in LAWS if law.suite in SUITES]
    if suite in LAW_INDEX:
        return [LAW_INDEX[suite]]
    out = [law for law in LAWS if law.suite == suite]
    if not out:
        raise ModelError(f"unknown law suite {suite!r}")
    return out


# -- law checking ------------------------------------------------------------

@dataclass
class LawResult:
    law: str
    model: str
    status: str                  # HOLDS, FAILED or SKIPPED
    protocol: str
    expected: str | None = None
    witness: dict[str, Any] | None = None
    checked: int = 0
    reason: str = ""

    @property
    def unexpected(self) -> bool:
        return self.expected == "holds" and self.status == "FAILED"

    def to_json(self) -> dict:
        out: dict[str, Any] = {"law": self.law, "model": self.model, "status": self.status,
                               "protocol": self.protocol, "expected": self.expected,
                               "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        return out


class _LawView:
    def __init__(self, unit):
        self.domains = {"D": list(LAW_DOMAIN)}
        self.preds: dict[str, dict] = {UNIT_ATOM: {(): unit}}
        self.funcs: dict = {}
        self.consts: dict = {}

    def assign(self, slots: Sequence[str], values: Sequence) -> None:
        preds = self.preds
        for slot, v in zip(slots, values):
            if slot.startswith(FAMILY + "("):
                preds.setdefault(FAMILY, {})[(slot[len(FAMILY) + 1:-1],)] = v
            else:
                preds[slot] = {(): v}


class _LawRunner:
    def __init__(self, law: LawSchema, alg):
        self.law, self.alg = law, alg
        self.view = _LawView(alg.unit)
        self.slots = law.slots
        self.clauses = [(c.relation, [compile_formula(f, alg, self.view) for f in c.sides])
                        for c in law.clauses]

    def violated(self, values: Sequence) -> bool:
        self.view.assign(self.slots, values)
        leq = self.alg.leq
        for rel, fs in self.clauses:
            vals = [f({}) for f in fs]
            if rel == "equiv":
                ok = leq(vals[0], vals[1]) and leq(vals[1], vals[0])
            elif rel == "entails":
                ok = leq(vals[0], vals[1])
            else:
                ok = leq(vals[0], vals[1]) == leq(vals[2], vals[3])
            if not ok:
                return True
        return False

    def witness(self, values: Sequence) -> dict[str, Any]:
        m = self.alg.model
        return {slot: m.to_json(self.alg.decode(v)) for slot, v in zip(self.slots, values)}


def protocol_id(model: AffineModel, samples: int, seed: int) -> str:
    if model.exhaustive:
        return f"exhaustive/1:domain={len(LAW_DOMAIN)}"
    return f"grid{len(model.elements())}+random{samples}/1:seed={seed}:domain={len(LAW_DOMAIN)}"


def check_law(law: LawSchema, model: AffineModel | str, *, seed: int = 0,
              samples: int = 1000) -> LawResult:
    """Check ``law`` on every assignment of the model's sweep protocol.

    Enumerable carriers are swept exhaustively.  Łukasiewicz sweeps its
    grid exhaustively and then ``samples`` seeded random assignments.  The
    witness is the first failing assignment in sweep order.
    """
    if isinstance(model, str):
        model = model_by_id(model)
    protocol = protocol_id(model, samples, seed)
    expected = law.expected(model.model_id)
    kind = model.model_id.split(":", 1)[0]
    if law.only is not None and kind not in law.only:
        return LawResult(law.name, model.model_id, "SKIPPED", protocol, None, reason=law.skip_reason)
    alg = table_algebra(model) if model.exhaustive else DirectAlgebra(model)
    runner = _LawRunner(law, alg)
    checked = 0
    for values in itertools.product(alg.elements(), repeat=len(runner.slots)):
        checked += 1
        if runner.violated(values):
            return LawResult(law.name, model.model_id, "FAILED", protocol, expected,
                             runner.witness(values), checked)
    if not model.exhaustive:
        rng = random.Random(f"{seed}:{law.name}")
        for _ in range(samples):
            values = [model.sample(rng) for _ in runner.slots]
            checked += 1
            if runner.violated(values):
                return LawResult(law.name, model.model_id, "FAILED", protocol, expected,
                                 runner.witness(values), checked)
    return LawResult(law.name, model.model_id, "HOLDS", protocol, expected, None, checked)


def replay_witness(law: LawSchema, model: AffineModel | str, witness: Mapping[str, Any]) -> bool:
    """True when ``witness`` really violates ``law`` in ``model``."""
    if isinstance(model, str):
        model = model_by_id(model)
    runner = _LawRunner(law, DirectAlgebra(model))
    values = [model.from_json(witness[slot]) for slot in runner.slots]
    return runner.violated(values)


@dataclass
class LawReport:
    seed: int
    results: list[LawResult]

    @property
    def ok(self) -> bool:
        return not any(r.unexpected for r in self.results)

    def to_json(self) -> dict:
        return {"schema": "chulog.laws/1", "seed": self.seed,
                "results": [r.to_json() for r in self.results]}


def _check_job(args: tuple[str, str, int, int]) -> LawResult:
    name, model_id, seed, samples = args
    return check_law(LAW_INDEX[name], model_id, seed=seed, samples=samples)


def law_suite(suite: str, models: Sequence[str], *, seed: int = 0, samples: int = 1000,
              jobs: int = 1) -> LawReport:
    """Check every law of ``suite`` on every model; rows ordered by model, then law."""
    jobs_list = [(law.name, mid, seed, samples) for mid in models for law in laws_in(suite)]
    for mid in models:
        model_by_id(mid)
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_check_job, jobs_list))
    else:
        results = [_check_job(j) for j in jobs_list]
    return LawReport(seed, results)


# -- countermodel search -----------------------------------------------------

@dataclass
class SearchResult:
    found: bool
    structure: Structure | None = None
    witness: dict[str, Any] | None = None
    examined: int = 0
    bound: int = 0
    capped: bool = False
    message: str = ""

    def to_json(self) -> dict:
        out: dict[str, Any] = {"schema": "chulog.search/1", "found": self.found,
                               "examined": self.examined, "max_domain": self.bound,
                               "capped": self.capped}
        if self.structure is not None:
            out["structure"] = self.structure.to_json()
        if self.witness is not None:
            out["witness"] = self.witness
        if self.message:
            out["message"] = self.message
        return out


def _formula_sigs(f: LFormula, scope: dict[str, str], out: dict[str, tuple[str, ...]]) -> None:
    if isinstance(f, Atom):
        sorts = []
        for t in f.args:
            if not isinstance(t, Var) or t.name not in scope:
                raise EvalError(f"cannot infer a signature for {f}: arguments must be bound variables")
            sorts.append(scope[t.name])
        prev = out.setdefault(f.pred, tuple(sorts))
        if prev != tuple(sorts):
            raise EvalError(f"predicate {f.pred} is used with inconsistent sorts")
    elif isinstance(f, Binary):
        _formula_sigs(f.left, scope, out)
        _formula_sigs(f.right, scope, out)
    elif isinstance(f, Unary):
        _formula_sigs(f.body, scope, out)
    elif isinstance(f, Quant):
        _formula_sigs(f.body, {**scope, f.var: f.sort}, out)


def infer_signature(seq: Sequent) -> Theory:
    """The theory of predicate symbols used by a theory-free sequent."""
    sigs: dict[str, tuple[str, ...]] = {}
    scope = dict(seq.context)
    for f in list(seq.hypotheses) + [seq.conclusion]:
        _formula_sigs(f, scope, sigs)
    th = Theory(name="inferred")
    sorts: list[str] = []
    for _, s in seq.context:
        if s not in sorts:
            sorts.append(s)
    for args in sigs.values():
        for s in args:
            if s not in sorts:
                sorts.append(s)

    def collect(f):
        if isinstance(f, Quant):
            if f.sort not in sorts:
                sorts.append(f.sort)
            collect(f.body)
        elif isinstance(f, Binary):
            collect(f.left)
            collect(f.right)
        elif isinstance(f, Unary):
            collect(f.body)

    for f in list(seq.hypotheses) + [seq.conclusion]:
        collect(f)
    th.sorts = sorts
    th.preds = {p: PredSym(p, args) for p, args in sigs.items()}
    return th


def _top_first(model: AffineModel, values: list) -> list:
    rest = [v for v in values if v != model.top]
    return ([model.top] if model.top in values else []) + rest


def domain_names(n: int) -> list[str]:
    return list(string.ascii_lowercase[:n])


def search_countermodel(target: Sequent | LawSchema | str, model: AffineModel | str, *,
                        theory: Theory | None = None, max_domain: int = 3,
                        cap: int = 200_000) -> SearchResult:
    """Find the first finite structure falsifying ``target``.

    ``target`` is a law schema, a theory-free sequent, or (with ``theory``)
    the name of an axiom to refute while every other axiom holds.  Domains
    of size 1..``max_domain`` are tried in turn, every sort getting the same
    size; predicate values are enumerated top first, then in carrier order.
    """
    if isinstance(model, str):
        model = model_by_id(model)
    if max_domain < 1 or max_domain > 3:
        raise EvalError("max_domain must be between 1 and 3")
    if isinstance(target, LawSchema):
        result = check_law(target, model, samples=0)
        if result.status != "FAILED":
            return SearchResult(False, examined=result.checked, bound=len(LAW_DOMAIN),
                                message=f"none up to bound ({result.protocol})")
        runner = _LawRunner(target, DirectAlgebra(model))
        values = [model.from_json(result.witness[s]) for s in runner.slots]
        runner.view.assign(runner.slots, values)
        s = Structure(model, dict(runner.view.domains),
                      {p: dict(t) for p, t in runner.view.preds.items() if p != UNIT_ATOM})
        return SearchResult(True, s, result.witness, result.checked, len(LAW_DOMAIN))
    if isinstance(target, str):
        if theory is None:
            raise EvalError("an axiom name needs a theory")
        goal = theory.axiom(target).sequent
        assumptions = [ax.sequent for ax in theory.axioms if ax.name != target]
    else:
        goal, assumptions = target, []
        if theory is None:
            theory = infer_signature(target)
    return _search(theory, goal, assumptions, model, max_domain, cap)


def _search(theory: Theory, goal: Sequent, assumptions: list[Sequent], model: AffineModel,
            max_domain: int, cap: int) -> SearchResult:
    alg = DirectAlgebra(model)
    carrier = _top_first(model, model.elements())
    affirmative = [v for v in carrier if model.bang(v) == v]
    examined = 0
    # without sorts every domain size gives the same structures
    sizes = range(1, max_domain + 1) if theory.sorts else range(1, 2)
    for n in sizes:
        names = domain_names(n)
        s = Structure(model, {sort: list(names) for sort in theory.sorts})
        slots: list[tuple[str, str, tuple, list]] = []
        for c, sort in theory.consts.items():
            slots.append(("const", c, (), s.domains[sort]))
        for f, sym in theory.funcs.items():
            s.funcs[f] = {}
            for key in itertools.product(*(s.domains[x] for x in sym.arg_sorts)):
                slots.append(("func", f, key, s.domains[sym.result]))
        for p, sym in theory.preds.items():
            s.preds[p] = {}
            for key in itertools.product(*(s.domains[x] for x in sym.arg_sorts)):
                slots.append(("pred", p, key, affirmative if sym.affirmative else carrier))
        goal_check = _SequentChecker(goal, alg, s, theory)
        checks = [_SequentChecker(a, alg, s, theory) for a in assumptions]
        for combo in itertools.product(*(choices for *_, choices in slots)):
            examined += 1
            if examined > cap:
                return SearchResult(False, examined=examined - 1, bound=max_domain, capped=True,
                                    message=f"resource cap of {cap} structures exceeded at domain size {n}")
            for (kind, name, key, _), value in zip(slots, combo):
                if kind == "pred":
                    s.preds[name][key] = value
                elif kind == "func":
                    s.funcs[name][key] = value
                else:
                    s.consts[name] = value
            failure = goal_check.first_failure()
            if failure.holds:
                continue
            if all(c.first_failure().holds for c in checks):
                found = Structure(model, {k: list(v) for k, v in s.domains.items()},
                                  {p: dict(t) for p, t in s.preds.items()},
                                  {f: dict(t) for f, t in s.funcs.items()}, dict(s.consts))
                return SearchResult(True, found, failure.witness, examined, max_domain)
    return SearchResult(False, examined=examined, bound=max_domain,
                        message=f"none up to bound (domain size {sizes[-1]})")


# -- random formulas ---------------------------------------------------------

RANDOM_SORT = "D"
RANDOM_CONST = "o"
RANDOM_ATOMS = ("p", "q", "r", "s")
CONNECTIVE_KINDS = ("tensor", "par", "with", "plus", "limp", "liff", "neg", "bang",
                    "whynot", "forall", "exists")
_LEAF_WEIGHTS = (("atom", 4), ("top", 1), ("bot", 1))
_BUILD = {"tensor": Tensor, "par": Par, "with": With, "plus": Plus, "limp": Limp, "liff": Liff,
          "neg": Neg, "bang": Bang, "whynot": WhyNot, "forall": Forall, "exists": Exists}


def random_formula(seed: int | random.Random, depth: int, atoms: Sequence[str] = RANDOM_ATOMS) -> LFormula:
    """A seeded random formula of depth at most ``depth``.

    Every atom is a unary predicate over the sort ``D``.  Its argument is a
    uniformly chosen variable bound at that point or the constant ``o``.
    An inner node is a leaf with probability 6/17 and otherwise one of the
    eleven connectives, uniformly; a leaf is an atom with probability 2/3,
    else ``T`` or ``F``.  Depth 0 always gives a leaf.
    """
    if not 0 <= depth <= 8:
        raise ValueError("depth must be between 0 and 8")
    if not atoms:
        raise ValueError("need at least one atom")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return _random(rng, depth, list(atoms), [])


def _leaf(rng: random.Random, atoms: list[str], bound: list[str]) -> LFormula:
    kind = rng.choices([k for k, _ in _LEAF_WEIGHTS], [w for _, w in _LEAF_WEIGHTS])[0]
    if kind == "top":
        return Top()
    if kind == "bot":
        return Bot()
    arg = rng.choice(bound + [RANDOM_CONST])
    term = Var(arg) if arg in bound else App(RANDOM_CONST, ())
    return Atom(rng.choice(atoms), (term,))


def _random(rng: random.Random, depth: int, atoms: list[str], bound: list[str]) -> LFormula:
    if depth == 0 or rng.random() < 6 / 17:
        return _leaf(rng, atoms, bound)
    kind = rng.choice(CONNECTIVE_KINDS)
    node = _BUILD[kind]
    if kind in ("forall", "exists"):
        var = f"x{len(bound)}"
        return node(var, RANDOM_SORT, _random(rng, depth - 1, atoms, bound + [var]))
    if kind in ("neg", "bang", "whynot"):
        return node(_random(rng, depth - 1, atoms, bound))
    return node(_random(rng, depth - 1, atoms, bound), _random(rng, depth - 1, atoms, bound))


def random_signature(atoms: Sequence[str] = RANDOM_ATOMS, affirmative: Sequence[str] = ()) -> Theory:
    """Theory for :func:`random_formula` output: atom ``p`` gets dual ``np`` unless affirmative."""
    th = Theory(name="random", sorts=[RANDOM_SORT], consts={RANDOM_CONST: RANDOM_SORT})
    for a in atoms:
        if a in affirmative:
            th.preds[a] = PredSym(a, (RANDOM_SORT,), None, True)
        else:
            th.preds[a] = PredSym(a, (RANDOM_SORT,), f"n{a}", False)
    return th


def connective_kinds(f: LFormula) -> set[str]:
    names = {cls: name for name, cls in _BUILD.items()}
    out: set[str] = set()

    def walk(g):
        if type(g) in names:
            out.add(names[type(g)])
        if isinstance(g, Binary):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Unary, Quant)):
            walk(g.body)
    walk(f)
    return out


# -- intuitionistic evaluation -----------------------------------------------

def eval_int(f: IFormula, h: FiniteHeyting, preds: Mapping[str, Mapping[tuple, int]],
             domains: Mapping[str, Sequence[str]], consts: Mapping[str, str] | None = None,
             env: Mapping[str, str] | None = None) -> int:
    """Value of an intuitionistic formula in the Heyting algebra ``h``."""
    consts = consts or {}

    def term(t: Term, env: dict) -> str:
        name = t.name if isinstance(t, Var) else t.fn
        if isinstance(t, Var) and name in env:
            return env[name]
        if isinstance(t, Var) or not t.args:
            if name in consts:
                return consts[name]
            raise EvalError(f"unbound variable {name}")
        raise EvalError(f"cannot evaluate term {t}")

    def go(g: IFormula, env: dict) -> int:
        if isinstance(g, IAtom):
            key = tuple(term(a, env) for a in g.args)
            try:
                return preds[g.pred][key]
            except KeyError:
                raise EvalError(f"no value for {g.pred}({_key_text(key)})") from None
        if isinstance(g, ITrue):
            return h.top
        if isinstance(g, IFalse):
            return h.bot
        if isinstance(g, And):
            acc = h.top
            for a in g.args:
                acc = h.meet[acc][go(a, env)]
            return acc
        if isinstance(g, Or):
            acc = h.bot
            for a in g.args:
                acc = h.join[acc][go(a, env)]
            return acc
        if isinstance(g, Imp):
            return h.imp[go(g.left, env)][go(g.right, env)]
        if isinstance(g, Not):
            return h.neg[go(g.body, env)]
        if isinstance(g, (IForall, IExists)):
            universal = isinstance(g, IForall)
            acc = h.top if universal else h.bot
            for d in domains[g.sort]:
                v = go(g.body, {**env, g.var: d})
                acc = h.meet[acc][v] if universal else h.join[acc][v]
            return acc
        raise EvalError(f"cannot evaluate {g!r}")

    return go(f, dict(env or {}))
