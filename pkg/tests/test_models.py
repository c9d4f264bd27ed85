import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chulog.lattice import SPACES
from chulog.models import (
    LukasiewiczModel, ModelError, all_model_ids, luk_op, model_by_id, restrict_chu3_check,
)

unit = st.fractions(min_value=0, max_value=1, max_denominator=60)


@given(unit, unit, unit)
def test_luk_residuation(a, b, c):
    assert (luk_op("tensor", a, b) <= c) == (a <= luk_op("limp", b, c))


@given(unit, unit)
def test_luk_de_morgan(a, b):
    neg = lambda x: luk_op("neg", x)
    assert neg(luk_op("tensor", a, b)) == luk_op("par", neg(a), neg(b))
    assert neg(luk_op("with", a, b)) == luk_op("plus", neg(a), neg(b))
    assert luk_op("whynot", a) == neg(luk_op("bang", neg(a)))


def test_luk_values():
    q = Fraction(3, 4)
    assert luk_op("tensor", q, q) == Fraction(1, 2)
    assert luk_op("bang", q) == 0
    assert luk_op("limp", Fraction(1, 2), Fraction(1, 4)) == Fraction(3, 4)
    with pytest.raises(ModelError):
        luk_op("tensor", Fraction(3, 2), 0)


def test_luk_grid_and_json():
    m = model_by_id("luk:grid5")
    assert m.elements() == [Fraction(i, 4) for i in range(5)]
    assert m.from_json("3/4") == Fraction(3, 4)
    assert m.to_json(Fraction(3, 4)) == "3/4"
    assert len(model_by_id("luk:grid10").elements()) == 11
    assert not m.exhaustive


def test_chu_three_valued_matches_luk():
    report = restrict_chu3_check()
    assert report.ok, report.mismatches
    assert report.checked == 5 * 9 + 3 * 3


def _interior_oracle(opens, a):
    out = frozenset()
    for u in opens:
        if u <= a:
            out |= u
    return out


@pytest.mark.parametrize("sid", list(SPACES))
def test_interior_and_closure(sid):
    m = model_by_id(f"int:{sid}")
    opens = SPACES[sid].opens
    for a in m.elements():
        assert m.bang(a) == _interior_oracle(opens, a)
        assert m.whynot(a) == m.full - _interior_oracle(opens, m.full - a)
        assert m.whynot(a) == m.closure(a)


def test_interior_3pt_fails_whynot_bang():
    m = model_by_id("int:3pt")
    a = frozenset("a")
    assert m.whynot(m.bang(a)) == frozenset("ab")
    assert m.bang(m.whynot(a)) == frozenset("a")
    assert not m.leq(m.whynot(m.bang(a)), m.bang(m.whynot(a)))
    p, q = frozenset("ab"), frozenset("bc")
    assert m.bang(m.plus(p, q)) != m.plus(m.bang(p), m.bang(q))


def test_registry():
    ids = all_model_ids()
    assert "chu0:chain2" in ids and "chu1:bool3" in ids
    assert "luk:grid5" in ids and "int:3pt" in ids
    assert len(ids) == len(set(ids))
    assert model_by_id("chu0:chain3") is model_by_id("chu0:chain3")
    for bad in ("xyz:1", "chu0:nope", "luk:five", "luk:grid0", "int:nowhere"):
        with pytest.raises(ModelError):
            model_by_id(bad)


@pytest.mark.parametrize("mid", ["chu0:bool2", "chu1:chain3", "luk:grid5", "int:3pt"])
def test_json_round_trip(mid):
    m = model_by_id(mid)
    for a in m.elements():
        assert m.from_json(m.to_json(a)) == a


@pytest.mark.parametrize("mid", ["chu0:downset:N", "luk:grid5", "int:3chain"])
def test_generic_laws(mid):
    m = model_by_id(mid)
    els = m.elements()
    for a, b in itertools.product(els, repeat=2):
        assert m.neg(m.neg(a)) == a
        assert m.neg(m.par(a, b)) == m.tensor(m.neg(a), m.neg(b))
        assert m.leq(m.with_(a, b), a)
        assert m.leq(a, m.plus(a, b))


def test_luk_sample_is_in_range():
    import random
    m = LukasiewiczModel(4)
    rng = random.Random(1)
    for _ in range(50):
        x = m.sample(rng)
        assert 0 <= x <= 1
