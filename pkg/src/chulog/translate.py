"""The standard interpretation as a syntactic translation.

A linear formula splits into a pair of intuitionistic formulas, what
counts as a proof and what counts as a refutation.  A linear sequent
``H1 * ... * Hn |- C`` expands into the proof sequent ``H1+, ..., Hn+ |- C+``
and, for each i, the contrapositive ``C-, {Hj+ : j != i} |- Hi-``.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .chu import ChuModel, ChuProp, chu_canon
from .lattice import FiniteHeyting
from .syntax import (
    And, App, Atom, Bang, Binary, Bot, Exists, Forall, IAtom, IExists, IFalse, IForall,
    IFormula, Imp, IQuant, ITrue, LFormula, Liff, Limp, Neg, Not, Or, Par, ParseError, Plus,
    PredSym, Quant, Sequent, Tensor, Term, Theory, Top, Unary, Var, WhyNot, With, conj, desugar,
    disj, parse_int_sequent, print_int, rename_term, tensor_all,
)
from .semantics import RANDOM_SORT, Structure, eval_int, evaluate, infer_signature


class TranslateError(ValueError):
    pass


@dataclass(frozen=True)
class ChuSplit:
    pf: IFormula
    rf: IFormula


@dataclass(frozen=True)
class TranslatedSequent:
    hypotheses: tuple[IFormula, ...]
    conclusion: IFormula
    axiom: str
    clause: str

    @property
    def label(self) -> str:
        return f"{self.axiom}.{self.clause}"

    def body(self) -> str:
        hyps = ", ".join(print_int(h) for h in self.hypotheses)
        return f"{hyps + ' ' if hyps else ''}|- {print_int(self.conclusion)}"

    def __str__(self) -> str:
        return f"{self.label}: {self.body()}"

    def to_json(self) -> dict:
        return {"label": self.label, "hypotheses": [print_int(h) for h in self.hypotheses],
                "conclusion": print_int(self.conclusion)}


# -- splitting ---------------------------------------------------------------

def chu_split(f: LFormula, theory: Theory) -> ChuSplit:
    """Proof and refutation parts of a desugared linear formula."""
    if isinstance(f, Atom):
        sym = theory.preds.get(f.pred)
        if sym is None:
            raise TranslateError(f"unknown predicate {f.pred}")
        atom = IAtom(f.pred, f.args)
        if sym.affirmative:
            return ChuSplit(atom, Not(atom))
        if sym.dual is None:
            raise TranslateError(f"predicate {f.pred} is neither affirmative nor paired with a dual")
        return ChuSplit(atom, IAtom(sym.dual, f.args))
    if isinstance(f, Top):
        return ChuSplit(ITrue(), IFalse())
    if isinstance(f, Bot):
        return ChuSplit(IFalse(), ITrue())
    if isinstance(f, Neg):
        s = chu_split(f.body, theory)
        return ChuSplit(s.rf, s.pf)
    if isinstance(f, Bang):
        s = chu_split(f.body, theory)
        return ChuSplit(s.pf, Not(s.pf))
    if isinstance(f, WhyNot):
        s = chu_split(f.body, theory)
        return ChuSplit(Not(s.rf), s.rf)
    if isinstance(f, Liff):
        raise TranslateError("desugar o-o before splitting")
    if isinstance(f, Par):
        return chu_split(Neg(Tensor(Neg(f.left), Neg(f.right))), theory)
    if isinstance(f, Binary):
        p, q = chu_split(f.left, theory), chu_split(f.right, theory)
        if isinstance(f, Tensor):
            return ChuSplit(conj(p.pf, q.pf), conj(Imp(p.pf, q.rf), Imp(q.pf, p.rf)))
        if isinstance(f, With):
            return ChuSplit(conj(p.pf, q.pf), disj(p.rf, q.rf))
        if isinstance(f, Plus):
            return ChuSplit(disj(p.pf, q.pf), conj(p.rf, q.rf))
        if isinstance(f, Limp):
            return ChuSplit(conj(Imp(p.pf, q.pf), Imp(q.rf, p.rf)), conj(p.pf, q.rf))
    if isinstance(f, Forall):
        s = chu_split(f.body, theory)
        return ChuSplit(IForall(f.var, f.sort, s.pf), IExists(f.var, f.sort, s.rf))
    if isinstance(f, Exists):
        s = chu_split(f.body, theory)
        return ChuSplit(IExists(f.var, f.sort, s.pf), IForall(f.var, f.sort, s.rf))
    raise TranslateError(f"cannot split {f!r}")


# -- normalisation -----------------------------------------------------------

def simplify(f: IFormula) -> IFormula:
    """Flatten nested conjunctions/disjunctions and drop their units."""
    if isinstance(f, (And, Or)):
        cls, unit = (And, ITrue) if isinstance(f, And) else (Or, IFalse)
        args: list[IFormula] = []
        for a in f.args:
            a = simplify(a)
            if isinstance(a, cls):
                args.extend(a.args)
            elif not isinstance(a, unit):
                args.append(a)
        if not args:
            return unit()
        return args[0] if len(args) == 1 else cls(tuple(args))
    if isinstance(f, Imp):
        return Imp(simplify(f.left), simplify(f.right))
    if isinstance(f, Not):
        return Not(simplify(f.body))
    if isinstance(f, IQuant):
        return type(f)(f.var, f.sort, simplify(f.body))
    return f


def normalize_int(items: Iterable[tuple[Sequence[IFormula], IFormula, str]]
                  ) -> list[tuple[tuple[IFormula, ...], IFormula, str]]:
    """Rewrite raw ``(hypotheses, conclusion, label)`` triples to tabulated form.

    Conjunctive conclusions split (labels gain ``.1``, ``.2``...), implications
    in the conclusion are curried, conjunctive hypotheses are flattened, true
    hypotheses and sequents with a true conclusion are dropped, and a false
    conclusion becomes the negation of the hypotheses.  Hypotheses keep
    source order with duplicates removed.
    """
    work = [(list(h), c, label) for h, c, label in items]
    out: list[tuple[tuple[IFormula, ...], IFormula, str]] = []
    while work:
        hyps, concl, label = work.pop(0)
        flat: list[IFormula] = []
        for h in map(simplify, hyps):
            for part in (h.args if isinstance(h, And) else (h,)):
                if not isinstance(part, ITrue) and part not in flat:
                    flat.append(part)
        concl = simplify(concl)
        if isinstance(concl, And):
            work[0:0] = [(flat, c, f"{label}.{k}") for k, c in enumerate(concl.args, start=1)]
        elif isinstance(concl, Imp):
            work.insert(0, (flat + [concl.left], concl.right, label))
        elif isinstance(concl, ITrue):
            continue
        elif isinstance(concl, IFalse) and flat:
            out.append(((), Not(conj(*flat)), label))
        else:
            out.append((tuple(flat), concl, label))
    return out


# -- sequents and theories ---------------------------------------------------

def sequent_split(seq: Sequent, theory: Theory, name: str = "axiom") -> list[TranslatedSequent]:
    """The proof sequent plus one contrapositive per hypothesis.

    A hypothesis built with ``&`` yields a single disjunctive refutation
    clause labelled ``strong``.  Existence predicates of context sorts are
    part of the context and produce no clauses.  With no hypotheses only
    the proof sequent is emitted: the refutation of the conclusion is then
    already excluded by the disjointness row of its predicate.
    """
    hyps = [desugar(h) for h in seq.hypotheses]
    parts = [chu_split(h, theory) for h in hyps]
    concl = chu_split(desugar(seq.conclusion), theory)
    raw: list[tuple[list[IFormula], IFormula, str]] = [([p.pf for p in parts], concl.pf, "proof")]
    n = len(parts)
    for i, part in enumerate(parts):
        kind = "strong" if isinstance(hyps[i], With) else "contra"
        label = kind if n == 1 else f"{kind}{i + 1}"
        others = [parts[j].pf for j in range(n) if j != i]
        raw.append(([concl.rf] + others, part.rf, label))
    return [TranslatedSequent(h, c, name, label) for h, c, label in normalize_int(raw)]


def disjointness_rows(theory: Theory) -> list[TranslatedSequent]:
    """``|- ~(p(x1..) /\\ pbar(x1..))`` for every dual-paired predicate."""
    rows = []
    for sym in theory.preds.values():
        if sym.dual is None:
            continue
        args = tuple(Var(f"x{k}") for k in range(1, len(sym.arg_sorts) + 1))
        body = Not(And((IAtom(sym.name, args), IAtom(sym.dual, args))))
        rows.append(TranslatedSequent((), body, sym.name, "disjoint"))
    return rows


def translate_theory(theory: Theory) -> list[TranslatedSequent]:
    out: list[TranslatedSequent] = []
    for ax in theory.axioms:
        out.extend(sequent_split(ax.sequent, theory, ax.name))
    return out + disjointness_rows(theory)


def format_iseq(theory: Theory, rows: Sequence[TranslatedSequent]) -> str:
    lines = [f"# standard interpretation of theory {theory.name}"]
    lines += [str(r) for r in rows]
    return "\n".join(lines) + "\n"


def format_json(theory: Theory, rows: Sequence[TranslatedSequent]) -> str:
    obj = {"schema": "chulog.iseq/1", "theory": theory.name, "sequents": [r.to_json() for r in rows]}
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- golden files ------------------------------------------------------------

_LABEL_RE = re.compile(r"^(\s*)([^\s:#]+)\s*:\s?")


def parse_iseq(text: str, theory: Theory | None = None) -> list[TranslatedSequent]:
    """Read ``name.clause: h1, h2 |- c`` lines; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _LABEL_RE.match(line)
        if not m:
            raise ParseError("expected 'label: hypotheses |- conclusion'", lineno, 1)
        label = m.group(2)
        hyps, concl = parse_int_sequent(line[m.end():], theory, line=lineno, col0=m.end())
        axiom, _, clause = label.partition(".")
        rows.append(TranslatedSequent(tuple(hyps), concl, axiom, clause))
    return rows


def _free_int(f: IFormula, bound: frozenset = frozenset()) -> list[str]:
    """Free variables in order of first occurrence."""
    out: list[str] = []

    def term(t: Term, bound):
        if isinstance(t, Var):
            if t.name not in bound and t.name not in out:
                out.append(t.name)
        else:
            for a in t.args:
                term(a, bound)

    def walk(g, bound):
        if isinstance(g, IAtom):
            for a in g.args:
                term(a, bound)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a, bound)
        elif isinstance(g, Imp):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, IQuant):
            walk(g.body, bound | {g.var})

    walk(f, bound)
    return out


def _canon(f: IFormula, names: Mapping[str, str], depth: int = 0) -> str:
    """Printed form with variables renamed and conjunct/disjunct order sorted."""
    if isinstance(f, IAtom):
        args = ",".join(str(rename_term(a, names)) for a in f.args)
        return f"{f.pred}({args})"
    if isinstance(f, ITrue):
        return "1"
    if isinstance(f, IFalse):
        return "0"
    if isinstance(f, (And, Or)):
        op = "&" if isinstance(f, And) else "|"
        return "(" + op.join(sorted(_canon(a, names, depth) for a in f.args)) + ")"
    if isinstance(f, Imp):
        return f"({_canon(f.left, names, depth)}->{_canon(f.right, names, depth)})"
    if isinstance(f, Not):
        return f"~{_canon(f.body, names, depth)}"
    if isinstance(f, IQuant):
        inner = dict(names)
        inner[f.var] = f"_b{depth}"
        word = "A" if isinstance(f, IForall) else "E"
        return f"{word}{f.sort}.{_canon(f.body, inner, depth + 1)}"
    raise TypeError(f"not an intuitionistic formula: {f!r}")


MAX_RENAMING_VARS = 7


def sequent_key(hyps: Sequence[IFormula], concl: IFormula) -> tuple:
    """Key that is equal for two sequents iff they agree up to renaming.

    Hypotheses are compared as a set and conjunctions/disjunctions up to
    order.  The minimum over all renamings is exact up to seven free
    variables; beyond that variables are numbered by first occurrence.
    """
    hyps = [simplify(h) for h in hyps]
    concl = simplify(concl)
    free: list[str] = []
    for f in list(hyps) + [concl]:
        for v in _free_int(f):
            if v not in free:
                free.append(v)
    perms = (itertools.permutations(range(len(free))) if len(free) <= MAX_RENAMING_VARS
             else [tuple(range(len(free)))])
    best = None
    for perm in perms:
        names = {v: f"v{perm[k]}" for k, v in enumerate(free)}
        key = (tuple(sorted({_canon(h, names) for h in hyps})), _canon(concl, names))
        if best is None or key < best:
            best = key
    return best


@dataclass
class DiffResult:
    missing: list[TranslatedSequent]     # in the golden file, not produced
    unexpected: list[TranslatedSequent]  # produced, not in the golden file

    @property
    def ok(self) -> bool:
        return not self.missing and not self.unexpected

    def lines(self) -> list[str]:
        return ([f"- {r}" for r in self.missing] + [f"+ {r}" for r in self.unexpected])


def diff_sequents(produced: Sequence[TranslatedSequent], golden: Sequence[TranslatedSequent]) -> DiffResult:
    """Symmetric difference of two sequent sets, ignoring labels and variable names."""
    want = {sequent_key(r.hypotheses, r.conclusion): r for r in golden}
    got = {sequent_key(r.hypotheses, r.conclusion): r for r in produced}
    return DiffResult([r for k, r in want.items() if k not in got],
                      [r for k, r in got.items() if k not in want])


# -- embedding ---------------------------------------------------------------

def embed_int(f: IFormula, theory: Theory | None = None) -> LFormula:
    """Embed intuitionistic logic into the affirmative propositions.

    Atoms become ``!atom``, conjunction ``*``, disjunction ``+`` and
    implication ``!(A -o B)``; negation is ``!~A``.  The universal needs an
    outer ``!`` while the existential of affirmatives is already affirmative.
    A dual predicate name embeds as the negation of its base predicate.
    """
    duals = theory.dual_names() if theory else {}
    if isinstance(f, IAtom):
        if f.pred in duals:
            return Bang(Neg(Atom(duals[f.pred], f.args)))
        return Bang(Atom(f.pred, f.args))
    if isinstance(f, ITrue):
        return Top()
    if isinstance(f, IFalse):
        return Bot()
    if isinstance(f, And):
        return _fold(Tensor, [embed_int(a, theory) for a in f.args])
    if isinstance(f, Or):
        return _fold(Plus, [embed_int(a, theory) for a in f.args])
    if isinstance(f, Imp):
        return Bang(Limp(embed_int(f.left, theory), embed_int(f.right, theory)))
    if isinstance(f, Not):
        return Bang(Neg(embed_int(f.body, theory)))
    if isinstance(f, IForall):
        return Bang(Forall(f.var, f.sort, embed_int(f.body, theory)))
    if isinstance(f, IExists):
        return Exists(f.var, f.sort, embed_int(f.body, theory))
    raise TranslateError(f"cannot embed {f!r}")


def _fold(node, parts: list[LFormula]) -> LFormula:
    out = parts[0]
    for p in parts[1:]:
        out = node(out, p)
    return out


# -- semantic agreement ------------------------------------------------------

VERIFY_DOMAIN = ("d0", "d1")


@dataclass
class TranslationReport:
    trials: int
    agree: int
    mismatches: list[dict]

    @property
    def ok(self) -> bool:
        return self.trials == self.agree


def default_signature(f: LFormula) -> Theory:
    """Give every predicate of ``f`` a dual named ``n<pred>``."""
    th = infer_signature(Sequent((), (), f))
    th.preds = {p: PredSym(p, s.arg_sorts, f"n{p}") for p, s in th.preds.items()}
    return th


def _consts_of(f: LFormula, out: set[str]) -> set[str]:
    def term(t):
        if isinstance(t, App):
            if not t.args:
                out.add(t.fn)
            for a in t.args:
                term(a)
    if isinstance(f, Atom):
        for a in f.args:
            term(a)
    elif isinstance(f, Binary):
        _consts_of(f.left, out)
        _consts_of(f.right, out)
    elif isinstance(f, (Unary, Quant)):
        _consts_of(f.body, out)
    return out


def verify_translation(f: LFormula, h: FiniteHeyting, trials: int | None = None, *,
                       seed: int | random.Random = 0, theory: Theory | None = None) -> TranslationReport:
    """Compare Chu(H,0) evaluation of ``f`` with evaluation of its split.

    Each trial assigns every predicate entry a canonical pair ``(a+, a-)``;
    affirmative predicates get ``(a, ¬a)``.  Chu evaluation must equal the
    canonical form of the Heyting values of the proof and refutation
    formulas, where ``p`` denotes ``a+`` and its dual ``a-``.  With
    ``trials=None`` every assignment is tried.
    """
    f = desugar(f)
    theory = theory or default_signature(f)
    split = chu_split(f, theory)
    model = ChuModel(h, strict=True)
    sorts = set(theory.sorts) | {RANDOM_SORT}
    domains = {s: list(VERIFY_DOMAIN) for s in sorts}
    consts = {c: VERIFY_DOMAIN[0] for c in set(theory.consts) | _consts_of(f, set())}
    slots = [(p, key) for p, sym in theory.preds.items()
             for key in itertools.product(*(domains[s] for s in sym.arg_sorts))]
    pairs = model.elements()
    affirm = [ChuProp(a, h.neg[a]) for a in h.elements()]
    choices = [affirm if theory.preds[p].affirmative else pairs for p, _ in slots]
    if trials is None:
        assignments: Iterable = itertools.product(*choices)
    else:
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        assignments = ([rng.choice(c) for c in choices] for _ in range(trials))
    report = TranslationReport(0, 0, [])
    for values in assignments:
        report.trials += 1
        chu_tables: dict[str, dict] = {p: {} for p in theory.preds}
        int_tables: dict[str, dict] = {}
        for (p, key), v in zip(slots, values):
            chu_tables[p][key] = v
            int_tables.setdefault(p, {})[key] = v.pf
            dual = theory.preds[p].dual
            if dual:
                int_tables.setdefault(dual, {})[key] = v.rf
        s = Structure(model, domains, chu_tables, {}, consts)
        linear = evaluate(f, s)
        pf = eval_int(split.pf, h, int_tables, domains, consts)
        rf = eval_int(split.rf, h, int_tables, domains, consts)
        canon = chu_canon(model, (pf, rf))
        if linear == canon:
            report.agree += 1
        elif len(report.mismatches) < 10:
            report.mismatches.append({
                "assignment": {f"{p}({','.join(k)})": model.fmt(v) for (p, k), v in zip(slots, values)},
                "linear": model.fmt(linear), "split": model.fmt(canon)})
    return report
