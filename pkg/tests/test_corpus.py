from pathlib import Path

import pytest

import chulog
from chulog.syntax import parse_theory
from chulog.translate import diff_sequents, format_iseq, parse_iseq, translate_theory

CORPUS = Path(chulog.__file__).parent / "corpus"
THEORIES = sorted(p.stem for p in CORPUS.glob("*.llt"))


def test_corpus_is_complete():
    assert len(THEORIES) == 28
    assert sorted(p.stem for p in CORPUS.glob("*.iseq")) == THEORIES


@pytest.mark.parametrize("name", THEORIES)
def test_translation_matches_golden(name):
    theory = parse_theory((CORPUS / f"{name}.llt").read_text())
    assert theory.name == name
    golden = parse_iseq((CORPUS / f"{name}.iseq").read_text(), theory)
    d = diff_sequents(translate_theory(theory), golden)
    assert d.ok, "\n".join(d.lines())


@pytest.mark.parametrize("name", THEORIES)
def test_formatted_output_reparses(name):
    theory = parse_theory((CORPUS / f"{name}.llt").read_text())
    rows = translate_theory(theory)
    back = parse_iseq(format_iseq(theory, rows), theory)
    assert [str(r) for r in back] == [str(r) for r in rows]


def test_strong_variants_differ_only_in_refutation_rows():
    def rows(name):
        th = parse_theory((CORPUS / f"{name}.llt").read_text())
        return {r.label: r.body() for r in translate_theory(th)}

    plain, strong = rows("set-equality"), rows("strong-set")
    assert plain["trans.proof"] == strong["trans.proof"]
    assert "trans.strong" in strong and "trans.strong" not in plain
    assert "\\/" in strong["trans.strong"]
