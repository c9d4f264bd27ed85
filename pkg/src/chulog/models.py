"""The affine-model interface and the two non-Chu instances.

``LukasiewiczModel`` is the unit interval of exact rationals with the
Łukasiewicz connectives; ``InteriorModel`` is the powerset of a finite
space with the interior operator as its comonad.  :func:`model_by_id`
resolves every model id, including the Chu models.
"""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .lattice import LatticeError, TopSpaceSpec, set_label, space_by_id


class ModelError(ValueError):
    pass


class AffineModel(ABC):
    """A semicartesian *-autonomous lattice with a Seely comonad ``!``.

    Nothing here is assumed: the law suites in :mod:`chulog.semantics`
    check each property against the concrete operations.
    """

    model_id: str
    #: whether :meth:`elements` lists the whole carrier
    exhaustive: bool = True

    @property
    @abstractmethod
    def top(self) -> Any: ...

    @property
    @abstractmethod
    def bot(self) -> Any: ...

    @property
    def unit(self) -> Any:
        """Unit of the tensor; equal to ``top`` in an affine model."""
        return self.top

    @abstractmethod
    def tensor(self, a, b): ...

    @abstractmethod
    def with_(self, a, b): ...

    @abstractmethod
    def plus(self, a, b): ...

    @abstractmethod
    def limp(self, a, b): ...

    @abstractmethod
    def neg(self, a): ...

    @abstractmethod
    def bang(self, a): ...

    @abstractmethod
    def leq(self, a, b) -> bool: ...

    @abstractmethod
    def elements(self) -> list: ...

    @abstractmethod
    def fmt(self, a) -> str: ...

    @abstractmethod
    def to_json(self, a) -> Any: ...

    @abstractmethod
    def from_json(self, obj: Any) -> Any: ...

    def par(self, a, b):
        return self.neg(self.tensor(self.neg(a), self.neg(b)))

    def whynot(self, a):
        return self.neg(self.bang(self.neg(a)))

    def forall(self, values: Iterable) -> Any:
        acc = self.top
        for v in values:
            acc = self.with_(acc, v)
        return acc

    def exists(self, values: Iterable) -> Any:
        acc = self.bot
        for v in values:
            acc = self.plus(acc, v)
        return acc

    def sample(self, rng: random.Random) -> Any:
        return rng.choice(self.elements())

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.model_id}>"


# -- Łukasiewicz -------------------------------------------------------------

_ZERO, _ONE = Fraction(0), Fraction(1)


def _check_unit(*args: Fraction) -> None:
    for a in args:
        if not _ZERO <= a <= _ONE:
            raise ModelError(f"{a} is outside [0,1]")


LUK_OPS = ("tensor", "par", "with", "plus", "limp", "neg", "bang", "whynot")


def luk_op(op: str, *args: Fraction) -> Fraction:
    """Łukasiewicz connective ``op`` on exact rationals in [0,1]."""
    args = tuple(Fraction(a) for a in args)
    _check_unit(*args)
    if op == "tensor":
        a, b = args
        return max(_ZERO, a + b - 1)
    if op == "par":
        a, b = args
        return min(_ONE, a + b)
    if op == "with":
        return min(args)
    if op == "plus":
        return max(args)
    if op == "limp":
        a, b = args
        return min(_ONE, 1 - a + b)
    if op == "neg":
        (a,) = args
        return 1 - a
    if op == "bang":
        (a,) = args
        return _ONE if a == 1 else _ZERO
    if op == "whynot":
        (a,) = args
        return _ZERO if a == 0 else _ONE
    raise ModelError(f"unknown Łukasiewicz operation {op!r}")


class LukasiewiczModel(AffineModel):
    """Łukasiewicz logic on [0,1] ∩ ℚ; ``elements`` is a finite symmetric grid."""

    exhaustive = False

    def __init__(self, steps: int = 4, model_id: str | None = None):
        if steps < 1:
            raise ModelError("a Łukasiewicz grid needs at least one step")
        self.steps = steps
        self.model_id = model_id or f"luk:grid{steps}"
        self.grid = [Fraction(i, steps) for i in range(steps + 1)]

    top = _ONE
    bot = _ZERO

    def tensor(self, a, b):
        return max(_ZERO, a + b - 1)

    def par(self, a, b):
        return min(_ONE, a + b)

    def with_(self, a, b):
        return min(a, b)

    def plus(self, a, b):
        return max(a, b)

    def limp(self, a, b):
        return min(_ONE, 1 - a + b)

    def neg(self, a):
        return 1 - a

    def bang(self, a):
        return _ONE if a == 1 else _ZERO

    def whynot(self, a):
        return _ZERO if a == 0 else _ONE

    def leq(self, a, b):
        return a <= b

    def forall(self, values):
        return min(values, default=_ONE)

    def exists(self, values):
        return max(values, default=_ZERO)

    def elements(self):
        return list(self.grid)

    def sample(self, rng: random.Random) -> Fraction:
        """A random rational in [0,1] with denominator at most 12, or an endpoint."""
        if rng.random() < 0.15:
            return rng.choice((_ZERO, _ONE))
        den = rng.randint(1, 12)
        return Fraction(rng.randint(0, den), den)

    def fmt(self, a):
        return str(a)

    def to_json(self, a):
        return str(a)

    def from_json(self, obj):
        try:
            value = Fraction(str(obj))
        except (ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"not a rational: {obj!r}") from exc
        if not _ZERO <= value <= _ONE:
            raise ModelError(f"{value} is outside [0,1]")
        return value


# -- interior model ----------------------------------------------------------

class InteriorModel(AffineModel):
    """Powerset of a finite space: ⊗ = & = ∩, ⅋ = ⊕ = ∪, ``!`` = interior."""

    def __init__(self, space: TopSpaceSpec, space_id: str):
        self.space = space
        self.model_id = f"int:{space_id}"
        self.points = tuple(space.points)
        self.full = frozenset(self.points)
        self.opens = tuple(space.opens)

    @property
    def top(self):
        return self.full

    @property
    def bot(self):
        return frozenset()

    def tensor(self, a, b):
        return a & b

    def par(self, a, b):
        return a | b

    def with_(self, a, b):
        return a & b

    def plus(self, a, b):
        return a | b

    def limp(self, a, b):
        return (self.full - a) | b

    def neg(self, a):
        return self.full - a

    def bang(self, a):
        """Interior: the largest open set contained in ``a``."""
        best = frozenset()
        for u in self.opens:
            if u <= a and len(u) > len(best):
                best = u
        return best

    def closure(self, a):
        """Smallest closed superset, computed directly from the closed sets."""
        closed = [self.full - u for u in self.opens]
        return min((c for c in closed if a <= c), key=len)

    def leq(self, a, b):
        return a <= b

    def elements(self):
        return [frozenset(c) for k in range(len(self.points) + 1)
                for c in itertools.combinations(self.points, k)]

    def fmt(self, a):
        return set_label(a, self.points)

    def to_json(self, a):
        return [p for p in self.points if p in a]

    def from_json(self, obj):
        if isinstance(obj, str):
            obj = [p for p in obj.strip("{}").split(",") if p]
        if not isinstance(obj, list):
            raise ModelError(f"expected a list of points, got {obj!r}")
        value = frozenset(map(str, obj))
        if not value <= self.full:
            raise ModelError(f"{sorted(value)} is not a subset of {list(self.points)}")
        return value


# -- registry ----------------------------------------------------------------

_MODELS: dict[str, AffineModel] = {}


def model_by_id(model_id: str) -> AffineModel:
    """Resolve ``chu0:<lat>``, ``chu1:<lat>``, ``luk:grid<n>`` or ``int:<space>``."""
    if model_id in _MODELS:
        return _MODELS[model_id]
    kind, _, arg = model_id.partition(":")
    try:
        if kind in ("chu0", "chu1"):
            from .chu import ChuModel
            from .lattice import lattice_by_id
            model: AffineModel = ChuModel(lattice_by_id(arg), strict=(kind == "chu0"))
        elif kind == "luk":
            if not arg.startswith("grid") or not arg[4:].isdigit():
                raise ModelError(f"unknown Łukasiewicz grid {arg!r}")
            # grid5 is the named default {0, 1/4, 1/2, 3/4, 1}; grid<n> has n+1 points
            n = int(arg[4:])
            steps = 4 if n == 5 else n
            if steps < 1:
                raise ModelError("a Łukasiewicz grid needs at least one step")
            model = LukasiewiczModel(steps, model_id)
        elif kind == "int":
            model = InteriorModel(space_by_id(arg), arg)
        else:
            raise ModelError(f"unknown model id {model_id!r}")
    except LatticeError as exc:
        raise ModelError(str(exc)) from exc
    _MODELS[model_id] = model
    return model


# -- three-valued check ------------------------------------------------------

@dataclass
class Chu3Report:
    checked: int = 0
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def restrict_chu3_check() -> Chu3Report:
    """Compare every connective of Chu(2,0) with Łukasiewicz on {0, 1/2, 1}."""
    from .chu import ChuModel, ChuProp, chu_binop, chu_unop
    from .lattice import heyting_chain

    m = ChuModel(heyting_chain(2), strict=True)
    to_luk = {ChuProp(1, 0): Fraction(1), ChuProp(0, 0): Fraction(1, 2), ChuProp(0, 1): Fraction(0)}
    report = Chu3Report()
    if sorted(to_luk) != sorted(m.elements()):
        report.mismatches.append(f"carrier is {m.elements()}, expected three elements")
        return report
    for op in ("tensor", "par", "with", "plus", "limp"):
        for p, q in itertools.product(to_luk, repeat=2):
            report.checked += 1
            got = to_luk[chu_binop(m, op, p, q)]
            want = luk_op(op, to_luk[p], to_luk[q])
            if got != want:
                report.mismatches.append(f"{op}({m.fmt(p)},{m.fmt(q)}) = {got}, Łukasiewicz gives {want}")
    for op in ("neg", "bang", "whynot"):
        for p in to_luk:
            report.checked += 1
            got = to_luk[chu_unop(m, op, p)]
            want = luk_op(op, to_luk[p])
            if got != want:
                report.mismatches.append(f"{op}({m.fmt(p)}) = {got}, Łukasiewicz gives {want}")
    return report


def all_model_ids() -> list[str]:
    """Every builtin model: both Chu variants over the zoo, the default grid, each space."""
    from .lattice import SPACES, ZOO
    return ([f"chu0:{z}" for z in ZOO] + [f"chu1:{z}" for z in ZOO] + ["luk:grid5"]
            + [f"int:{s}" for s in SPACES])


def describe_models(ids: Sequence[str]) -> list[dict]:
    rows = []
    for mid in ids:
        m = model_by_id(mid)
        rows.append({"id": mid, "elements": len(m.elements()), "exhaustive": m.exhaustive})
    return rows
