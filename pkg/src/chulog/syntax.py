"""ASTs, parsers and printers for linear and intuitionistic formulas.

Linear ASCII syntax::

    *  tensor     @  par       &  with      +  plus
    -o linear implication      o-o  linear biconditional (sugar)
    ~  linear negation         !  ?  exponentials
    T  top        F  bottom    /\\x:S. body   \\/x:S. body

Prefix operators bind tightest, then the four binary connectives, then
``-o``/``o-o`` (right-associative).  Chains of one binary connective are
left-associative; putting two different ones side by side without
parentheses is rejected.  A quantifier body extends as far right as
possible.

Intuitionistic syntax uses ``/\\  \\/  ->  ~  1  0`` and the keywords
``forall x:S.`` and ``exists x:S.``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class TheoryError(ValueError):
    pass


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.fn
        return f"{self.fn}({','.join(map(str, self.args))})"


Term = Union[Var, App]


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def subst_term(t: Term, var: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == var else t
    return App(t.fn, tuple(subst_term(a, var, value) for a in t.args))


def rename_term(t: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    return App(t.fn, tuple(rename_term(a, mapping) for a in t.args))


# -- linear formulas ---------------------------------------------------------

class LFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_linear(self)


@dataclass(frozen=True, repr=False)
class Atom(LFormula):
    pred: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        return f"Atom({self.pred}{'(' + ','.join(map(str, self.args)) + ')' if self.args else ''})"


@dataclass(frozen=True)
class Top(LFormula):
    pass


@dataclass(frozen=True)
class Bot(LFormula):
    pass


@dataclass(frozen=True)
class Binary(LFormula):
    left: LFormula
    right: LFormula


class Tensor(Binary):
    pass


class Par(Binary):
    pass


class With(Binary):
    pass


class Plus(Binary):
    pass


class Limp(Binary):
    pass


class Liff(Binary):
    pass


@dataclass(frozen=True)
class Unary(LFormula):
    body: LFormula


class Neg(Unary):
    pass


class Bang(Unary):
    pass


class WhyNot(Unary):
    pass


@dataclass(frozen=True)
class Quant(LFormula):
    var: str
    sort: str
    body: LFormula


class Forall(Quant):
    pass


class Exists(Quant):
    pass


# -- intuitionistic formulas -------------------------------------------------

class IFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_int(self)


@dataclass(frozen=True, repr=False)
class IAtom(IFormula):
    pred: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        return f"IAtom({self.pred}{'(' + ','.join(map(str, self.args)) + ')' if self.args else ''})"


@dataclass(frozen=True)
class ITrue(IFormula):
    pass


@dataclass(frozen=True)
class IFalse(IFormula):
    pass


@dataclass(frozen=True)
class And(IFormula):
    args: tuple[IFormula, ...]


@dataclass(frozen=True)
class Or(IFormula):
    args: tuple[IFormula, ...]


@dataclass(frozen=True)
class Imp(IFormula):
    left: IFormula
    right: IFormula


@dataclass(frozen=True)
class Not(IFormula):
    body: IFormula


@dataclass(frozen=True)
class IQuant(IFormula):
    var: str
    sort: str
    body: IFormula


class IForall(IQuant):
    pass


class IExists(IQuant):
    pass


def conj(*xs: IFormula) -> IFormula:
    return xs[0] if len(xs) == 1 else And(tuple(xs))


def disj(*xs: IFormula) -> IFormula:
    return xs[0] if len(xs) == 1 else Or(tuple(xs))


# -- signatures, sequents, theories ------------------------------------------

@dataclass(frozen=True)
class PredSym:
    name: str
    arg_sorts: tuple[str, ...] = ()
    dual: str | None = None
    affirmative: bool = False


@dataclass(frozen=True)
class FuncSym:
    name: str
    arg_sorts: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class Sequent:
    context: tuple[tuple[str, str], ...]
    hypotheses: tuple[LFormula, ...]
    conclusion: LFormula

    def __str__(self) -> str:
        ctx = ", ".join(f"{v}:{s}" for v, s in self.context)
        hyps = " * ".join(_wrap_hyp(h) for h in self.hypotheses)
        return f"[{ctx}] {hyps + ' ' if hyps else ''}|- {print_linear(self.conclusion)}"


def _wrap_hyp(h: LFormula) -> str:
    text = print_linear(h)
    return f"({text})" if isinstance(h, (Binary, Quant)) else text


@dataclass(frozen=True)
class Axiom:
    name: str
    sequent: Sequent


@dataclass
class Theory:
    name: str = "anonymous"
    sorts: list[str] = field(default_factory=list)
    preds: dict[str, PredSym] = field(default_factory=dict)
    funcs: dict[str, FuncSym] = field(default_factory=dict)
    consts: dict[str, str] = field(default_factory=dict)
    axioms: list[Axiom] = field(default_factory=list)

    def dual_names(self) -> dict[str, str]:
        return {p.dual: p.name for p in self.preds.values() if p.dual}

    def existence_pred(self, sort: str) -> PredSym | None:
        p = self.preds.get(f"E_{sort}")
        if p is not None and p.affirmative and p.arg_sorts == (sort,):
            return p
        return None

    def axiom(self, name: str) -> Axiom:
        for ax in self.axioms:
            if ax.name == name:
                return ax
        raise TheoryError(f"theory {self.name} has no axiom {name!r}")

    def symbol_names(self) -> set[str]:
        names = set(self.preds) | set(self.funcs) | set(self.consts)
        return names | set(self.dual_names())


# -- lexer -------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_LINEAR_TOKENS = [
    ("LIFF", r"o-o"), ("LIMP", r"-o"), ("TURN", r"\|-"), ("ALL", r"/\\"), ("EX", r"\\/"),
    ("IN", r"in!"), ("OP", r"[*@&+]"), ("PRE", r"[~!?]"),
]
_INT_TOKENS = [
    ("IMP", r"->"), ("TURN", r"\|-"), ("OP", r"/\\|\\/"), ("PRE", r"~"), ("CONST", r"[01](?![A-Za-z0-9_'])"),
]
_COMMON = [
    ("IDENT", _IDENT), ("LP", r"\("), ("RP", r"\)"), ("COMMA", r","), ("COLON", r":"),
    ("DOT", r"\."), ("LB", r"\["), ("RB", r"\]"), ("WS", r"[ \t\r]+"),
]


def _lexer(spec: list[tuple[str, str]]) -> re.Pattern:
    return re.compile("|".join(f"(?P<{k}>{p})" for k, p in spec + _COMMON))


_LINEAR_RE = _lexer(_LINEAR_TOKENS)
_INT_RE = _lexer(_INT_TOKENS)


def tokenize(text: str, intuitionistic: bool = False, line: int = 1, col0: int = 0) -> list[Token]:
    pattern = _INT_RE if intuitionistic else _LINEAR_RE
    out: list[Token] = []
    pos = 0
    while pos < len(text):
        m = pattern.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        if m.lastgroup != "WS":
            out.append(Token(m.lastgroup, m.group(), line, col0 + pos + 1))
        pos = m.end()
    out.append(Token("EOF", "", line, col0 + len(text) + 1))
    return out


# -- parser ------------------------------------------------------------------

_LBIN = {"*": Tensor, "@": Par, "&": With, "+": Plus}
_LPRE = {"~": Neg, "!": Bang, "?": WhyNot}
_KEYWORDS = {"T", "F"}
_INT_KEYWORDS = {"forall", "exists"}


class _Parser:
    def __init__(self, tokens: list[Token], theory: Theory | None,
                 context: Mapping[str, str] | None, intuitionistic: bool):
        self.toks = tokens
        self.i = 0
        self.theory = theory
        self.strict = theory is not None and context is not None
        self.scopes: list[dict[str, str | None]] = [dict(context or {})]
        self.intuitionistic = intuitionistic
        self.duals = theory.dual_names() if theory else {}

    # token helpers
    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind.lower()
            got = tok.text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        return self.next()

    def at_end(self) -> bool:
        return self.peek().kind == "EOF"

    # scopes
    def lookup(self, name: str) -> tuple[bool, str | None]:
        for scope in reversed(self.scopes):
            if name in scope:
                return True, scope[name]
        return False, None

    # terms
    def term(self) -> tuple[Term, str | None]:
        tok = self.expect("IDENT")
        name = tok.text
        th = self.theory
        if self.peek().kind == "LP":
            self.next()
            args = [self.term()]
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.term())
            self.expect("RP")
            return self.application(tok, name, args)
        bound, sort = self.lookup(name)
        if bound:
            return Var(name), sort
        if th is not None and name in th.consts:
            return App(name, ()), th.consts[name]
        if th is not None and name in th.funcs:
            raise self.error(f"function {name} needs arguments", tok)
        if self.strict:
            raise self.error(f"unbound variable {name}", tok)
        return Var(name), None

    def application(self, tok: Token, name: str, args: list) -> tuple[Term, str | None]:
        th = self.theory
        terms = tuple(a for a, _ in args)
        if th is None:
            return App(name, terms), None
        fn = th.funcs.get(name)
        if fn is None:
            raise self.error(f"unknown function {name}", tok)
        self.check_args(tok, name, fn.arg_sorts, args)
        return App(name, terms), fn.result

    def check_args(self, tok: Token, name: str, sorts: tuple[str, ...], args: list) -> None:
        if len(sorts) != len(args):
            raise self.error(f"{name} expects {len(sorts)} argument(s), got {len(args)}", tok)
        for want, (_, got) in zip(sorts, args):
            if got is not None and got != want:
                raise self.error(f"{name}: argument of sort {got} where {want} is expected", tok)

    # linear formulas
    def linear(self) -> LFormula:
        left = self.chain()
        tok = self.peek()
        if tok.kind in ("LIMP", "LIFF"):
            self.next()
            right = self.linear()
            return Limp(left, right) if tok.kind == "LIMP" else Liff(left, right)
        return left

    def chain(self) -> LFormula:
        left = self.prefix()
        op: str | None = None
        while self.peek().kind == "OP":
            tok = self.peek()
            if op is None:
                op = tok.text
            elif tok.text != op:
                raise self.error(f"mixing {op!r} and {tok.text!r} requires parentheses", tok)
            self.next()
            left = _LBIN[op](left, self.prefix())
        return left

    def prefix(self) -> LFormula:
        tok = self.peek()
        if tok.kind == "PRE":
            self.next()
            return _LPRE[tok.text](self.prefix())
        return self.primary()

    def quantifier(self, binder: Token) -> tuple[str, str]:
        var = self.expect("IDENT").text
        self.expect("COLON")
        sort_tok = self.expect("IDENT")
        sort = sort_tok.text
        if self.theory is not None and sort not in self.theory.sorts:
            raise self.error(f"undeclared sort {sort}", sort_tok)
        self.expect("DOT")
        return var, sort

    def primary(self) -> LFormula:
        tok = self.peek()
        if tok.kind == "LP":
            self.next()
            f = self.linear()
            self.expect("RP")
            return f
        if tok.kind in ("ALL", "EX"):
            self.next()
            var, sort = self.quantifier(tok)
            self.scopes.append({var: sort})
            body = self.linear()
            self.scopes.pop()
            return (Forall if tok.kind == "ALL" else Exists)(var, sort, body)
        if tok.kind == "IDENT" and tok.text in _KEYWORDS:
            self.next()
            return Top() if tok.text == "T" else Bot()
        if tok.kind == "IDENT":
            return self.atom()
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def atom_parts(self) -> tuple[Token, list]:
        tok = self.expect("IDENT")
        args: list = []
        if self.peek().kind == "LP":
            self.next()
            args.append(self.term())
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.term())
            self.expect("RP")
        return tok, args

    def atom(self) -> LFormula:
        start = self.i
        tok, args = self.atom_parts()
        if self.peek().kind == "IN":
            # `t in! S` abbreviates the existence predicate E_S(t)
            self.i = start
            subject, sort_of = self.term()
            self.next()
            sort_tok = self.expect("IDENT")
            name = f"E_{sort_tok.text}"
            if self.theory is not None and self.theory.existence_pred(sort_tok.text) is None:
                raise self.error(f"sort {sort_tok.text} has no affirmative existence predicate {name}", sort_tok)
            if sort_of is not None and sort_of != sort_tok.text:
                raise self.error(f"term of sort {sort_of} cannot be in! {sort_tok.text}", sort_tok)
            return Atom(name, (subject,))
        return self.resolve_atom(tok, args)

    def resolve_atom(self, tok: Token, args: list) -> LFormula:
        name = tok.text
        terms = tuple(a for a, _ in args)
        th = self.theory
        if th is None:
            return Atom(name, terms)
        if name in th.preds:
            self.check_args(tok, name, th.preds[name].arg_sorts, args)
            return Atom(name, terms)
        if name in self.duals:
            base = th.preds[self.duals[name]]
            self.check_args(tok, name, base.arg_sorts, args)
            return Neg(Atom(base.name, terms))
        raise self.error(f"unknown predicate {name}", tok)

    # intuitionistic formulas
    def intf(self) -> IFormula:
        left = self.ichain()
        if self.peek().kind == "IMP":
            self.next()
            return Imp(left, self.intf())
        return left

    def ichain(self) -> IFormula:
        first = self.iprefix()
        items = [first]
        op: str | None = None
        while self.peek().kind == "OP":
            tok = self.peek()
            if op is None:
                op = tok.text
            elif tok.text != op:
                raise self.error(f"mixing {op!r} and {tok.text!r} requires parentheses", tok)
            self.next()
            items.append(self.iprefix())
        if op is None:
            return first
        return And(tuple(items)) if op == "/\\" else Or(tuple(items))

    def iprefix(self) -> IFormula:
        if self.peek().kind == "PRE":
            self.next()
            return Not(self.iprefix())
        return self.iprimary()

    def iprimary(self) -> IFormula:
        tok = self.peek()
        if tok.kind == "LP":
            self.next()
            f = self.intf()
            self.expect("RP")
            return f
        if tok.kind == "CONST":
            self.next()
            return ITrue() if tok.text == "1" else IFalse()
        if tok.kind == "IDENT" and tok.text in _INT_KEYWORDS:
            self.next()
            var, sort = self.quantifier(tok)
            self.scopes.append({var: sort})
            body = self.intf()
            self.scopes.pop()
            return (IForall if tok.text == "forall" else IExists)(var, sort, body)
        if tok.kind == "IDENT":
            tok, args = self.atom_parts()
            th = self.theory
            if th is not None:
                known = th.preds.get(tok.text)
                if known is not None:
                    self.check_args(tok, tok.text, known.arg_sorts, args)
                elif tok.text in self.duals:
                    self.check_args(tok, tok.text, th.preds[self.duals[tok.text]].arg_sorts, args)
                else:
                    raise self.error(f"unknown predicate {tok.text}", tok)
            return IAtom(tok.text, tuple(a for a, _ in args))
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


def parse_linear(text: str, theory: Theory | None = None,
                 context: Mapping[str, str] | None = None) -> LFormula:
    """Parse one linear formula.

    With a theory, symbols are resolved and sorts checked; dual predicate
    names parse as the linear negation of their base predicate.  If a
    context is also given, every free variable must be declared in it.
    """
    p = _Parser(tokenize(text), theory, context, intuitionistic=False)
    f = p.linear()
    if not p.at_end():
        raise p.error(f"unexpected {p.peek().text!r}")
    return f


def parse_int(text: str, theory: Theory | None = None,
              context: Mapping[str, str] | None = None) -> IFormula:
    p = _Parser(tokenize(text, intuitionistic=True), theory, context, intuitionistic=True)
    f = p.intf()
    if not p.at_end():
        raise p.error(f"unexpected {p.peek().text!r}")
    return f


def parse_int_sequent(text: str, theory: Theory | None = None,
                      line: int = 1, col0: int = 0) -> tuple[list[IFormula], IFormula]:
    """Parse ``h1, h2 |- c`` in the intuitionistic syntax."""
    p = _Parser(tokenize(text, intuitionistic=True, line=line, col0=col0), theory, None, True)
    hyps: list[IFormula] = []
    if p.peek().kind != "TURN":
        hyps.append(p.intf())
        while p.peek().kind == "COMMA":
            p.next()
            hyps.append(p.intf())
    p.expect("TURN")
    concl = p.intf()
    if not p.at_end():
        raise p.error(f"unexpected {p.peek().text!r}")
    return hyps, concl


# -- theory files ------------------------------------------------------------

_DECL_RE = re.compile(rf"^({_IDENT})\s*(?:\(([^)]*)\))?\s*(.*)$")


def _split_sorts(text: str | None) -> list[str]:
    if not text or not text.strip():
        return []
    return [s.strip() for s in text.split(",")]


def parse_theory(text: str) -> Theory:
    """Parse a ``.llt`` theory file."""
    th = Theory()
    seen_theory = False

    def fail(msg: str, line: int, col: int = 1) -> ParseError:
        return ParseError(msg, line, col)

    def declare(name: str, line: int) -> None:
        if name in th.symbol_names() or name in _KEYWORDS:
            raise fail(f"duplicate or reserved name {name}", line)

    def need_sort(s: str, line: int) -> None:
        if s not in th.sorts:
            raise fail(f"undeclared sort {s}", line)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.strip()
        if not stripped:
            continue
        indent = len(body) - len(body.lstrip())
        keyword, _, rest = stripped.partition(" ")
        rest = rest.strip()
        if keyword == "theory":
            if seen_theory:
                raise fail("theory name given twice", lineno)
            if not re.fullmatch(r"[A-Za-z0-9_.\-]+", rest):
                raise fail("theory needs a name", lineno)
            th.name, seen_theory = rest, True
        elif keyword == "sort":
            if not re.fullmatch(_IDENT, rest):
                raise fail(f"bad sort name {rest!r}", lineno)
            if rest in th.sorts:
                raise fail(f"duplicate sort {rest}", lineno)
            th.sorts.append(rest)
        elif keyword == "pred":
            m = _DECL_RE.match(rest)
            if not m:
                raise fail("malformed pred declaration", lineno)
            name, sorts, tail = m.group(1), _split_sorts(m.group(2)), m.group(3).split()
            declare(name, lineno)
            for s in sorts:
                need_sort(s, lineno)
            dual, affirmative = None, False
            while tail:
                word = tail.pop(0)
                if word == "dual" and tail and dual is None:
                    dual = tail.pop(0)
                    if dual == name:
                        raise fail(f"{name} cannot be its own dual", lineno)
                    declare(dual, lineno)
                elif word == "affirmative" and not affirmative:
                    affirmative = True
                else:
                    raise fail(f"unexpected {word!r} in pred declaration", lineno)
            if dual and affirmative:
                raise fail(f"affirmative predicate {name} cannot declare a dual", lineno)
            th.preds[name] = PredSym(name, tuple(sorts), dual, affirmative)
        elif keyword == "fun":
            m = re.fullmatch(rf"({_IDENT})\s*\(([^)]*)\)\s*:\s*({_IDENT})", rest)
            if not m:
                raise fail("malformed fun declaration", lineno)
            name, sorts, result = m.group(1), _split_sorts(m.group(2)), m.group(3)
            declare(name, lineno)
            for s in sorts + [result]:
                need_sort(s, lineno)
            th.funcs[name] = FuncSym(name, tuple(sorts), result)
        elif keyword == "const":
            m = re.fullmatch(rf"({_IDENT})\s*:\s*({_IDENT})", rest)
            if not m:
                raise fail("malformed const declaration", lineno)
            declare(m.group(1), lineno)
            need_sort(m.group(2), lineno)
            th.consts[m.group(1)] = m.group(2)
        elif keyword == "axiom":
            th.axioms.append(_parse_axiom(th, rest, lineno, indent + len("axiom ") +
                                          (len(stripped) - len("axiom ") - len(rest))))
        else:
            raise fail(f"unknown directive {keyword!r}", lineno)
    return th


def _parse_axiom(th: Theory, rest: str, lineno: int, offset: int, resolve: bool = True) -> Axiom:
    m = re.match(rf"({_IDENT})\s*:\s*", rest)
    if not m:
        raise ParseError("axiom needs a name followed by ':'", lineno, offset + 1)
    name = m.group(1)
    if any(ax.name == name for ax in th.axioms):
        raise ParseError(f"duplicate axiom {name}", lineno, offset + 1)
    pos = m.end()
    context: list[tuple[str, str]] = []
    if rest[pos:].startswith("["):
        close = rest.find("]", pos)
        if close < 0:
            raise ParseError("unterminated context", lineno, offset + pos + 1)
        for item in _split_sorts(rest[pos + 1:close]):
            cm = re.fullmatch(rf"({_IDENT})\s*:\s*({_IDENT})", item)
            if not cm:
                raise ParseError(f"malformed context entry {item!r}", lineno, offset + pos + 1)
            var, sort = cm.groups()
            if sort not in th.sorts:
                raise ParseError(f"undeclared sort {sort}", lineno, offset + pos + 1)
            if any(v == var for v, _ in context):
                raise ParseError(f"variable {var} declared twice", lineno, offset + pos + 1)
            context.append((var, sort))
        pos = close + 1
    turn = rest.find("|-", pos)
    if turn < 0:
        raise ParseError("axiom needs '|-'", lineno, offset + pos + 1)
    ctx = dict(context)
    hyp_text, concl_text = rest[pos:turn], rest[turn + 2:]
    hyps: list[LFormula] = []
    if hyp_text.strip():
        p = _Parser(tokenize(hyp_text, line=lineno, col0=offset + pos), th if resolve else None, ctx, False)
        hyp = p.linear()
        if not p.at_end():
            raise p.error(f"unexpected {p.peek().text!r}")
        hyps = flatten_tensor(hyp)
    p = _Parser(tokenize(concl_text, line=lineno, col0=offset + turn + 2), th if resolve else None, ctx, False)
    concl = p.linear()
    if not p.at_end():
        raise p.error(f"unexpected {p.peek().text!r}")
    return Axiom(name, Sequent(tuple(context), tuple(hyps), concl))


def parse_sequent(text: str, theory: Theory | None = None) -> Sequent:
    """Parse ``[x:S, ...] h1 * h2 |- c``; without a theory any sort is accepted."""
    th = theory
    if th is None:
        th = Theory(name="inline")
        m = re.match(r"\s*\[([^\]]*)\]", text)
        for item in _split_sorts(m.group(1) if m else None):
            sort = item.partition(":")[2].strip()
            if sort and sort not in th.sorts:
                th.sorts.append(sort)
    prefix = "sequent: "
    return _parse_axiom(th, prefix + text.strip(), 1, -len(prefix), resolve=theory is not None).sequent


def flatten_tensor(f: LFormula) -> list[LFormula]:
    if isinstance(f, Tensor):
        return flatten_tensor(f.left) + flatten_tensor(f.right)
    return [f]


# -- printing ----------------------------------------------------------------

_LSYM = {Tensor: "*", Par: "@", With: "&", Plus: "+", Limp: "-o", Liff: "o-o"}
_LPRESYM = {Neg: "~", Bang: "!", WhyNot: "?"}


def _atom_text(pred: str, args: tuple[Term, ...]) -> str:
    return f"{pred}({','.join(map(str, args))})" if args else pred


def print_linear(f: LFormula, rightmost: bool = True) -> str:
    """Print with the fewest parentheses that still parse back to ``f``."""
    if isinstance(f, Atom):
        return _atom_text(f.pred, f.args)
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Unary):
        body = f.body
        if isinstance(body, Binary) or (isinstance(body, Quant) and not rightmost):
            inner = f"({print_linear(body)})"
        else:
            inner = print_linear(body, rightmost)
        return _LPRESYM[type(f)] + inner
    if isinstance(f, Quant):
        binder = "/\\" if isinstance(f, Forall) else "\\/"
        return f"{binder}{f.var}:{f.sort}. {print_linear(f.body)}"
    if isinstance(f, (Limp, Liff)):
        left = f.left
        lt = f"({print_linear(left)})" if isinstance(left, (Limp, Liff, Quant)) else print_linear(left, False)
        right = f.right
        rt = f"({print_linear(right)})" if isinstance(right, Quant) and not rightmost else print_linear(right, rightmost)
        return f"{lt} {_LSYM[type(f)]} {rt}"
    if isinstance(f, Binary):
        left, right = f.left, f.right
        if isinstance(left, (Limp, Liff, Quant)) or (isinstance(left, Binary) and type(left) is not type(f)):
            lt = f"({print_linear(left)})"
        else:
            lt = print_linear(left, False)
        if isinstance(right, Binary) or (isinstance(right, Quant) and not rightmost):
            rt = f"({print_linear(right)})"
        else:
            rt = print_linear(right, rightmost)
        return f"{lt} {_LSYM[type(f)]} {rt}"
    raise TypeError(f"not a linear formula: {f!r}")


def print_int(f: IFormula, rightmost: bool = True) -> str:
    if isinstance(f, IAtom):
        return _atom_text(f.pred, f.args)
    if isinstance(f, ITrue):
        return "1"
    if isinstance(f, IFalse):
        return "0"
    if isinstance(f, Not):
        body = f.body
        if isinstance(body, (And, Or, Imp)) or (isinstance(body, IQuant) and not rightmost):
            return f"~({print_int(body)})"
        return "~" + print_int(body, rightmost)
    if isinstance(f, IQuant):
        word = "forall" if isinstance(f, IForall) else "exists"
        return f"{word} {f.var}:{f.sort}. {print_int(f.body)}"
    if isinstance(f, Imp):
        left = f.left
        lt = f"({print_int(left)})" if isinstance(left, (Imp, IQuant)) else print_int(left, False)
        right = f.right
        rt = f"({print_int(right)})" if isinstance(right, IQuant) and not rightmost else print_int(right, rightmost)
        return f"{lt} -> {rt}"
    if isinstance(f, (And, Or)):
        sym = " /\\ " if isinstance(f, And) else " \\/ "
        parts = []
        last = len(f.args) - 1
        for k, a in enumerate(f.args):
            tail = rightmost and k == last
            if isinstance(a, (And, Or, Imp)) or (isinstance(a, IQuant) and not tail):
                parts.append(f"({print_int(a)})")
            else:
                parts.append(print_int(a, tail))
        return sym.join(parts)
    raise TypeError(f"not an intuitionistic formula: {f!r}")


def dump_linear(f: LFormula) -> str:
    """Fully parenthesised prefix dump of the AST, one node per call."""
    if isinstance(f, Atom):
        return f"(atom {_atom_text(f.pred, f.args)})"
    if isinstance(f, (Top, Bot)):
        return f"({type(f).__name__.lower()})"
    if isinstance(f, Unary):
        return f"({type(f).__name__.lower()} {dump_linear(f.body)})"
    if isinstance(f, Quant):
        return f"({type(f).__name__.lower()} {f.var}:{f.sort} {dump_linear(f.body)})"
    if isinstance(f, Binary):
        return f"({type(f).__name__.lower()} {dump_linear(f.left)} {dump_linear(f.right)})"
    raise TypeError(f"not a linear formula: {f!r}")


# -- traversals --------------------------------------------------------------

def desugar(f: LFormula) -> LFormula:
    """Replace every ``P o-o Q`` by ``(P -o Q) & (Q -o P)``."""
    if isinstance(f, Liff):
        left, right = desugar(f.left), desugar(f.right)
        return With(Limp(left, right), Limp(right, left))
    if isinstance(f, Binary):
        return type(f)(desugar(f.left), desugar(f.right))
    if isinstance(f, Unary):
        return type(f)(desugar(f.body))
    if isinstance(f, Quant):
        return type(f)(f.var, f.sort, desugar(f.body))
    return f


def free_vars(f: LFormula | IFormula) -> set[str]:
    if isinstance(f, (Atom, IAtom)):
        out: set[str] = set()
        for t in f.args:
            out |= term_vars(t)
        return out
    if isinstance(f, Binary) or isinstance(f, Imp):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Unary, Not)):
        return free_vars(f.body)
    if isinstance(f, (Quant, IQuant)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (And, Or)):
        out = set()
        for a in f.args:
            out |= free_vars(a)
        return out
    return set()


def _fresh(name: str, avoid: set[str]) -> str:
    candidate = name + "'"
    while candidate in avoid:
        candidate += "'"
    return candidate


def substitute(f: LFormula, var: str, term: Term, *, theory: Theory | None = None,
               sorts: Mapping[str, str] | None = None) -> LFormula:
    """Capture-avoiding ``f[var := term]``.

    When ``sorts`` gives the sort of ``var`` and the theory can sort
    ``term``, a mismatch raises :class:`TheoryError`.
    """
    if theory is not None and sorts is not None and var in sorts:
        got = term_sort(term, theory, sorts)
        if got is not None and got != sorts[var]:
            raise TheoryError(f"cannot substitute a term of sort {got} for {var}:{sorts[var]}")
    return _subst(f, var, term, term_vars(term))


def _subst(f: LFormula, var: str, term: Term, tvars: set[str]) -> LFormula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, var, term) for a in f.args))
    if isinstance(f, Binary):
        return type(f)(_subst(f.left, var, term, tvars), _subst(f.right, var, term, tvars))
    if isinstance(f, Unary):
        return type(f)(_subst(f.body, var, term, tvars))
    if isinstance(f, Quant):
        if f.var == var or var not in free_vars(f.body):
            return f
        if f.var in tvars:
            new = _fresh(f.var, tvars | free_vars(f.body) | {var})
            body = _subst(f.body, f.var, Var(new), {new})
            return type(f)(new, f.sort, _subst(body, var, term, tvars))
        return type(f)(f.var, f.sort, _subst(f.body, var, term, tvars))
    return f


def term_sort(t: Term, theory: Theory, sorts: Mapping[str, str]) -> str | None:
    if isinstance(t, Var):
        return sorts.get(t.name)
    if not t.args and t.fn in theory.consts:
        return theory.consts[t.fn]
    fn = theory.funcs.get(t.fn)
    return fn.result if fn else None


def subformulas(f: LFormula) -> Iterator[LFormula]:
    yield f
    if isinstance(f, Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Unary, Quant)):
        yield from subformulas(f.body)


def atoms_of(f: LFormula) -> list[str]:
    """Predicate names in order of first occurrence."""
    seen: list[str] = []
    for g in subformulas(f):
        if isinstance(g, Atom) and g.pred not in seen:
            seen.append(g.pred)
    return seen


def tensor_all(fs: Iterable[LFormula]) -> LFormula:
    """Left-nested tensor of ``fs``; ``T`` when empty."""
    out: LFormula | None = None
    for f in fs:
        out = f if out is None else Tensor(out, f)
    return Top() if out is None else out
