"""Chu(H,0) and Chu(H,1) over a finite Heyting algebra.

A proposition is a pair ``(pf, rf)`` of elements of H: what counts as a
proof and what counts as a refutation.  In the strict variant the two
parts are disjoint and every result is put back into canonical form
``(pf, rf ∧ ¬pf)``; the Chu(H,1) variant uses the same formulas on
arbitrary pairs.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .lattice import FiniteHeyting, LatticeError
from .models import AffineModel, ModelError

BINOPS = ("tensor", "par", "with", "plus", "limp")
UNOPS = ("neg", "bang", "whynot")


class ChuProp(NamedTuple):
    pf: int
    rf: int


class ChuModel(AffineModel):
    def __init__(self, base: FiniteHeyting, strict: bool = True):
        self.base = base
        self.strict = strict
        self.model_id = f"{'chu0' if strict else 'chu1'}:{base.name}"
        self._elements: list[ChuProp] | None = None

    @property
    def top(self) -> ChuProp:
        return ChuProp(self.base.top, self.base.bot)

    @property
    def bot(self) -> ChuProp:
        return ChuProp(self.base.bot, self.base.top)

    @property
    def unit(self) -> ChuProp:
        if self.strict:
            return self.top
        # the tensor unit of Chu(H,1) is (1,1), which is also the par unit
        return ChuProp(self.base.top, self.base.top)

    def canon(self, p: int, r: int) -> ChuProp:
        return chu_canon(self, (p, r))

    def tensor(self, a, b):
        return chu_binop(self, "tensor", a, b)

    def par(self, a, b):
        return chu_binop(self, "par", a, b)

    def with_(self, a, b):
        return chu_binop(self, "with", a, b)

    def plus(self, a, b):
        return chu_binop(self, "plus", a, b)

    def limp(self, a, b):
        return chu_binop(self, "limp", a, b)

    def neg(self, a):
        return ChuProp(a.rf, a.pf)

    def bang(self, a):
        return chu_unop(self, "bang", a)

    def whynot(self, a):
        return chu_unop(self, "whynot", a)

    def leq(self, a, b):
        return chu_leq(self, a, b)

    def forall(self, values: Iterable[ChuProp]) -> ChuProp:
        return chu_quant(self, "forall", list(values))

    def exists(self, values: Iterable[ChuProp]) -> ChuProp:
        return chu_quant(self, "exists", list(values))

    def elements(self) -> list[ChuProp]:
        if self._elements is None:
            self._elements = chu_enumerate(self)
        return list(self._elements)

    def _three_valued(self) -> bool:
        return self.strict and self.base.size == 2

    def fmt(self, a: ChuProp) -> str:
        if self._three_valued():
            return {self.top: "T", self.bot: "F"}.get(a, "N")
        return f"({self.base.label(a.pf)},{self.base.label(a.rf)})"

    def to_json(self, a: ChuProp):
        if self._three_valued():
            return self.fmt(a)
        return [self.base.label(a.pf), self.base.label(a.rf)]

    def from_json(self, obj) -> ChuProp:
        if obj == "T":
            return self.top
        if obj == "F":
            return self.bot
        if obj == "N" and self._three_valued():
            return ChuProp(self.base.bot, self.base.bot)
        if not (isinstance(obj, list) and len(obj) == 2):
            raise ModelError(f"{self.model_id}: expected [proof, refutation], got {obj!r}")
        try:
            p, r = (self.base.element(str(x)) for x in obj)
        except LatticeError as exc:
            raise ModelError(str(exc)) from exc
        if self.strict and self.base.meet[p][r] != self.base.bot:
            raise ModelError(f"{self.model_id}: {obj!r} is not a disjoint pair")
        return ChuProp(p, r)


def chu_canon(m: ChuModel, pair: tuple[int, int]) -> ChuProp:
    p, r = pair
    if not m.strict:
        return ChuProp(p, r)
    h = m.base
    return ChuProp(p, h.meet[r][h.neg[p]])


def chu_leq(m: ChuModel, a: ChuProp, b: ChuProp) -> bool:
    le = m.base.leq
    return le[a.pf][b.pf] and le[b.rf][a.rf]


def chu_binop(m: ChuModel, op: str, a: ChuProp, b: ChuProp) -> ChuProp:
    h = m.base
    meet, join, imp = h.meet, h.join, h.imp
    if op == "with":
        return chu_canon(m, (meet[a.pf][b.pf], join[a.rf][b.rf]))
    if op == "plus":
        return chu_canon(m, (join[a.pf][b.pf], meet[a.rf][b.rf]))
    if op == "tensor":
        return chu_canon(m, (meet[a.pf][b.pf], meet[imp[a.pf][b.rf]][imp[b.pf][a.rf]]))
    if op == "limp":
        return chu_canon(m, (meet[imp[a.pf][b.pf]][imp[b.rf][a.rf]], meet[a.pf][b.rf]))
    if op == "par":
        # P ⅋ Q is defined as ~(~P ⊗ ~Q)
        return m.neg(chu_binop(m, "tensor", m.neg(a), m.neg(b)))
    raise ModelError(f"unknown binary connective {op!r}")


def chu_unop(m: ChuModel, op: str, a: ChuProp) -> ChuProp:
    h = m.base
    if op == "neg":
        return ChuProp(a.rf, a.pf)
    if op == "bang":
        return chu_canon(m, (a.pf, h.neg[a.pf]))
    if op == "whynot":
        return chu_canon(m, (h.neg[a.rf], a.rf))
    raise ModelError(f"unknown unary connective {op!r}")


def chu_quant(m: ChuModel, op: str, family: list[ChuProp]) -> ChuProp:
    h = m.base
    if op == "forall":
        p, r = h.top, h.bot
        for a in family:
            p, r = h.meet[p][a.pf], h.join[r][a.rf]
    elif op == "exists":
        p, r = h.bot, h.top
        for a in family:
            p, r = h.join[p][a.pf], h.meet[r][a.rf]
    else:
        raise ModelError(f"unknown quantifier {op!r}")
    return chu_canon(m, (p, r))


def chu_enumerate(m: ChuModel) -> list[ChuProp]:
    h = m.base
    return [ChuProp(p, r) for p in h.elements() for r in h.elements()
            if not m.strict or h.meet[p][r] == h.bot]
