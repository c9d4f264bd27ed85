"""Finite Heyting algebras with precomputed operation tables.

Elements are dense integer indices.  Every builder goes through
:meth:`FiniteHeyting.from_order`, which derives meet and join as greatest
lower / least upper bounds and implication as the residuation maximum.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

MAX_SIZE = 32


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteHeyting:
    name: str
    labels: tuple[str, ...]
    leq: tuple[tuple[bool, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    imp: tuple[tuple[int, ...], ...]
    neg: tuple[int, ...]
    top: int
    bot: int
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def elements(self) -> range:
        return range(len(self.labels))

    def label(self, a: int) -> str:
        return self.labels[a]

    def element(self, label: str) -> int:
        index = self._index
        if index is None:
            index = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_index", index)
        try:
            return index[label]
        except KeyError:
            raise LatticeError(f"{self.name}: no element labelled {label!r}") from None

    @classmethod
    def from_order(cls, name: str, labels: Sequence[str],
                   leq: Sequence[Sequence[bool]]) -> "FiniteHeyting":
        """Build the algebra of a finite partial order, which must be a Heyting lattice."""
        n = len(labels)
        if n == 0:
            raise LatticeError("a Heyting algebra needs at least one element")
        if n > MAX_SIZE:
            raise LatticeError(f"{name}: {n} elements exceeds the cap of {MAX_SIZE}")
        if len(set(labels)) != n:
            raise LatticeError(f"{name}: duplicate element labels")
        le = tuple(tuple(bool(leq[i][j]) for j in range(n)) for i in range(n))
        for i in range(n):
            if not le[i][i]:
                raise LatticeError(f"{name}: order is not reflexive at {labels[i]}")
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    raise LatticeError(f"{name}: order is not antisymmetric")
                for k in range(n):
                    if le[i][j] and le[j][k] and not le[i][k]:
                        raise LatticeError(f"{name}: order is not transitive")

        def greatest(candidates: list[int]) -> int | None:
            for c in candidates:
                if all(le[d][c] for d in candidates):
                    return c
            return None

        def least(candidates: list[int]) -> int | None:
            for c in candidates:
                if all(le[c][d] for d in candidates):
                    return c
            return None

        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                lower = [x for x in range(n) if le[x][a] and le[x][b]]
                upper = [x for x in range(n) if le[a][x] and le[b][x]]
                m, j = greatest(lower), least(upper)
                if m is None or j is None:
                    raise LatticeError(f"{name}: {labels[a]} and {labels[b]} have no meet or join")
                meet[a][b], join[a][b] = m, j
        top = greatest(list(range(n)))
        bot = least(list(range(n)))

        imp = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                # residuation maximum: join of every x with x /\ a <= b
                acc = bot
                for x in range(n):
                    if le[meet[x][a]][b]:
                        acc = join[acc][x]
                if not le[meet[acc][a]][b]:
                    raise LatticeError(
                        f"{name}: no implication {labels[a]} -> {labels[b]}; lattice is not distributive")
                imp[a][b] = acc
        neg = tuple(imp[a][bot] for a in range(n))
        return cls(name=name, labels=tuple(labels), leq=le,
                   meet=tuple(map(tuple, meet)), join=tuple(map(tuple, join)),
                   imp=tuple(map(tuple, imp)), neg=neg, top=top, bot=bot)


@dataclass(frozen=True)
class PosetSpec:
    points: tuple[str, ...]
    covers: tuple[tuple[str, str], ...]  # (lower, upper)


@dataclass(frozen=True)
class TopSpaceSpec:
    points: tuple[str, ...]
    opens: tuple[frozenset, ...]


def set_label(s: Iterable[str], order: Sequence[str]) -> str:
    members = [p for p in order if p in set(s)]
    return "{" + ",".join(members) + "}"


def _from_family(name: str, family: list[frozenset], order: Sequence[str]) -> FiniteHeyting:
    family = sorted(set(family), key=lambda s: (len(s), sorted(order.index(p) for p in s)))
    labels = [set_label(s, order) for s in family]
    leq = [[a <= b for b in family] for a in family]
    return FiniteHeyting.from_order(name, labels, leq)


def heyting_chain(n: int) -> FiniteHeyting:
    """The n-element chain 0 < 1/(n-1) < ... < 1."""
    if n < 1:
        raise LatticeError("a chain needs at least one element")
    if n > MAX_SIZE:
        raise LatticeError(f"chain of {n} exceeds the cap of {MAX_SIZE}")
    labels = ["0"] if n == 1 else [str(Fraction(i, n - 1)) for i in range(n)]
    leq = [[i <= j for j in range(n)] for i in range(n)]
    return FiniteHeyting.from_order(f"chain{n}", labels, leq)


def heyting_boolean(n: int) -> FiniteHeyting:
    """Powerset of an n-element set of points a, b, c, ..."""
    if n < 0 or 2 ** n > MAX_SIZE:
        raise LatticeError(f"bool{n}: carrier 2^{n} exceeds the cap of {MAX_SIZE}")
    points = [chr(ord("a") + i) for i in range(n)]
    family = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(points, k)]
    return _from_family(f"bool{n}", family, points)


def _check_acyclic(p: PosetSpec) -> dict[str, set[str]]:
    below: dict[str, set[str]] = {x: {x} for x in p.points}
    for lo, hi in p.covers:
        if lo not in below or hi not in below:
            raise LatticeError(f"cover ({lo},{hi}) names an unknown point")
    changed = True
    while changed:
        changed = False
        for lo, hi in p.covers:
            new = below[lo] - below[hi]
            if new:
                below[hi] |= new
                changed = True
    for x in p.points:
        for y in p.points:
            if x != y and x in below[y] and y in below[x]:
                raise LatticeError(f"covering relation has a cycle through {x} and {y}")
    return below


def heyting_from_downsets(p: PosetSpec, name: str = "downset") -> FiniteHeyting:
    if len(p.points) > 6:
        raise LatticeError("downset algebras are limited to posets of at most 6 points")
    below = _check_acyclic(p)
    family = []
    for k in range(len(p.points) + 1):
        for c in itertools.combinations(p.points, k):
            s = frozenset(c)
            if all(below[x] <= s for x in s):
                family.append(s)
    return _from_family(name, family, p.points)


def check_topology(t: TopSpaceSpec) -> None:
    full = frozenset(t.points)
    opens = set(t.opens)
    if frozenset() not in opens or full not in opens:
        raise LatticeError("a topology must contain the empty set and the whole space")
    for u in opens:
        if not u <= full:
            raise LatticeError(f"open set {sorted(u)} is not a subset of the space")
        for v in opens:
            if u | v not in opens or u & v not in opens:
                raise LatticeError("open sets are not closed under finite unions and intersections")


def heyting_opens(t: TopSpaceSpec, name: str = "opens") -> FiniteHeyting:
    if len(t.points) > 5:
        raise LatticeError("open-set algebras are limited to spaces of at most 5 points")
    check_topology(t)
    return _from_family(name, list(t.opens), t.points)


@dataclass
class HeytingReport:
    algebra: str
    failures: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_heyting(h: FiniteHeyting) -> HeytingReport:
    """Exhaustively re-check every table of ``h`` against its order."""
    report = HeytingReport(h.name)
    n, le, lab = h.size, h.leq, h.labels

    def fail(kind: str, *elems: int) -> None:
        report.failures.append((kind, tuple(lab[e] for e in elems)))

    for a in range(n):
        if not le[a][a]:
            fail("reflexivity", a)
        if not le[h.bot][a]:
            fail("bottom", a)
        if not le[a][h.top]:
            fail("top", a)
        if h.neg[a] != h.imp[a][h.bot]:
            fail("negation", a)
        for b in range(n):
            if a != b and le[a][b] and le[b][a]:
                fail("antisymmetry", a, b)
            m, j = h.meet[a][b], h.join[a][b]
            if not (le[m][a] and le[m][b]) or any(
                    le[x][a] and le[x][b] and not le[x][m] for x in range(n)):
                fail("meet", a, b)
            if not (le[a][j] and le[b][j]) or any(
                    le[a][x] and le[b][x] and not le[j][x] for x in range(n)):
                fail("join", a, b)
            for x in range(n):
                if le[a][b] and le[b][x] and not le[a][x]:
                    fail("transitivity", a, b, x)
                if le[h.meet[x][a]][b] != le[x][h.imp[a][b]]:
                    fail("residuation", x, a, b)
    return report


# -- the builtin zoo ---------------------------------------------------------

POSETS: dict[str, PosetSpec] = {
    "point": PosetSpec(("a",), ()),
    "chain2": PosetSpec(("a", "b"), (("a", "b"),)),
    "V": PosetSpec(("a", "b", "c"), (("a", "c"), ("b", "c"))),
    "Lambda": PosetSpec(("a", "b", "c"), (("a", "b"), ("a", "c"))),
    "N": PosetSpec(("a", "b", "c", "d"), (("a", "c"), ("b", "c"), ("b", "d"))),
}


def _space(points: str, *opens: str) -> TopSpaceSpec:
    return TopSpaceSpec(tuple(points), tuple(frozenset(o) for o in opens))


SPACES: dict[str, TopSpaceSpec] = {
    "point": _space("a", "", "a"),
    "sierpinski": _space("ab", "", "a", "ab"),
    "discrete2": _space("ab", "", "a", "b", "ab"),
    "3pt": _space("abc", "", "a", "c", "ac", "abc"),
    "3chain": _space("abc", "", "a", "ab", "abc"),
}


def load_spec(path: str | Path) -> PosetSpec | TopSpaceSpec:
    """Read a poset (``covers``) or finite space (``opens``) from JSON."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LatticeError(f"cannot read {path}: {exc}") from exc
    points = tuple(str(p) for p in data.get("points", []))
    if "covers" in data:
        return PosetSpec(points, tuple((str(a), str(b)) for a, b in data["covers"]))
    if "opens" in data:
        return TopSpaceSpec(points, tuple(frozenset(map(str, o)) for o in data["opens"]))
    raise LatticeError(f"{path}: expected a 'covers' or an 'opens' field")


def space_by_id(space_id: str) -> TopSpaceSpec:
    if space_id.startswith("json:"):
        spec = load_spec(space_id[5:])
        if not isinstance(spec, TopSpaceSpec):
            raise LatticeError(f"{space_id} does not describe a topological space")
        check_topology(spec)
        return spec
    try:
        return SPACES[space_id]
    except KeyError:
        raise LatticeError(f"unknown space {space_id!r}") from None


_CACHE: dict[str, FiniteHeyting] = {}


def lattice_by_id(lattice_id: str) -> FiniteHeyting:
    """Resolve a zoo id such as ``chain3``, ``bool2``, ``downset:V`` or ``opens:3pt``."""
    if lattice_id in _CACHE:
        return _CACHE[lattice_id]
    kind, _, arg = lattice_id.partition(":")
    if kind.startswith("chain") and kind[5:].isdigit() and not arg:
        h = heyting_chain(int(kind[5:]))
    elif kind.startswith("bool") and kind[4:].isdigit() and not arg:
        h = heyting_boolean(int(kind[4:]))
    elif kind == "downset":
        if arg.startswith("json:"):
            spec = load_spec(arg[5:])
            if not isinstance(spec, PosetSpec):
                raise LatticeError(f"{lattice_id} does not describe a poset")
        elif arg in POSETS:
            spec = POSETS[arg]
        else:
            raise LatticeError(f"unknown poset {arg!r}")
        h = heyting_from_downsets(spec, lattice_id)
    elif kind == "opens":
        h = heyting_opens(space_by_id(arg), lattice_id)
    else:
        raise LatticeError(f"unknown lattice id {lattice_id!r}")
    h = replace(h, name=lattice_id, _index=None)
    _CACHE[lattice_id] = h
    return h


ZOO: tuple[str, ...] = (
    "chain2", "chain3", "chain4", "chain5",
    "bool1", "bool2", "bool3",
    "downset:V", "downset:Lambda", "downset:N",
    "opens:sierpinski", "opens:discrete2", "opens:3pt", "opens:3chain",
)
