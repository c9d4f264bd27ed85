import itertools
import json

import pytest
from hypothesis import given, strategies as st

from chulog.lattice import (
    MAX_SIZE, SPACES, ZOO, FiniteHeyting, LatticeError, heyting_chain, lattice_by_id,
    space_by_id, verify_heyting,
)


def _family(h):
    """Decode set-labelled elements ("{a,b}") back into frozensets."""
    return [frozenset(x for x in lab.strip("{}").split(",") if x) for lab in h.labels]


def _imp_oracle(family, a, b):
    # largest member c of the family with c & a <= b
    cands = [c for c in family if c & a <= b]
    best = max(cands, key=len)
    assert all(c <= best for c in cands)
    return best


@pytest.mark.parametrize("lid", ZOO)
def test_zoo_is_heyting(lid):
    h = lattice_by_id(lid)
    assert verify_heyting(h).ok
    assert h.size <= MAX_SIZE


@pytest.mark.parametrize("lid", [z for z in ZOO if z.startswith(("bool", "opens", "downset"))])
def test_set_lattices_against_set_operations(lid):
    h = lattice_by_id(lid)
    fam = _family(h)
    for i, j in itertools.product(h.elements(), repeat=2):
        a, b = fam[i], fam[j]
        assert fam[h.meet[i][j]] == a & b
        assert fam[h.join[i][j]] == a | b
        assert fam[h.imp[i][j]] == _imp_oracle(fam, a, b)
        assert h.leq[i][j] == (a <= b)


def test_zoo_sizes():
    sizes = {z: lattice_by_id(z).size for z in ZOO}
    assert sizes == {
        "chain2": 2, "chain3": 3, "chain4": 4, "chain5": 5,
        "bool1": 2, "bool2": 4, "bool3": 8,
        "downset:V": 5, "downset:Lambda": 5, "downset:N": 8,
        "opens:sierpinski": 3, "opens:discrete2": 4, "opens:3pt": 5, "opens:3chain": 4,
    }


@given(st.integers(min_value=1, max_value=12))
def test_chain_implication(n):
    h = heyting_chain(n)
    for a, b in itertools.product(range(n), repeat=2):
        assert h.imp[a][b] == (n - 1 if a <= b else b)
        assert h.meet[a][b] == min(a, b)
        assert h.join[a][b] == max(a, b)


def test_chain_labels():
    assert heyting_chain(3).labels == ("0", "1/2", "1")
    assert lattice_by_id("chain5").element("3/4") == 3


def test_non_distributive_lattice_rejected():
    # the diamond M3 is a lattice but not distributive
    labels = ["0", "a", "b", "c", "1"]
    below = {"0": set(labels), "a": {"a", "1"}, "b": {"b", "1"}, "c": {"c", "1"}, "1": {"1"}}
    leq = [[y in below[x] for y in labels] for x in labels]
    with pytest.raises(LatticeError):
        FiniteHeyting.from_order("M3", labels, leq)


def test_errors():
    with pytest.raises(LatticeError):
        lattice_by_id("chain99")
    with pytest.raises(LatticeError):
        lattice_by_id("bool6")
    with pytest.raises(LatticeError):
        lattice_by_id("nope")
    with pytest.raises(LatticeError):
        lattice_by_id("chain3").element("7")
    with pytest.raises(LatticeError):
        space_by_id("nowhere")


def test_json_poset_and_space(tmp_path):
    p = tmp_path / "v.json"
    p.write_text(json.dumps({"points": ["a", "b", "c"], "covers": [["a", "c"], ["b", "c"]]}))
    h = lattice_by_id(f"downset:json:{p}")
    assert h.size == lattice_by_id("downset:V").size
    s = tmp_path / "s.json"
    s.write_text(json.dumps({"points": ["a", "b"], "opens": [[], ["a"], ["a", "b"]]}))
    assert lattice_by_id(f"opens:json:{s}").size == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"points": ["a", "b"], "opens": [["a"], ["a", "b"]]}))
    with pytest.raises(LatticeError):
        space_by_id(f"json:{bad}")


def test_spaces_are_topologies():
    for spec in SPACES.values():
        opens = set(spec.opens)
        full = frozenset(spec.points)
        assert frozenset() in opens and full in opens
        for u, v in itertools.product(opens, repeat=2):
            assert u | v in opens and u & v in opens
