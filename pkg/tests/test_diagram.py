import json

import pytest

from discopile.corpus import builtin_corpus
from discopile.diagram import (
    CopySpider,
    Cup,
    Diagram,
    Wiring,
    WordBox,
    compose_two_sentence,
    copy_noun,
    diagram_from_sentence,
    validate,
)
from discopile.errors import NotANoun, NotGrammatical, TypeMismatch
from discopile.pregroup import S, builtin_lexicon, reduce, ty, type_of_sentence

LEX = builtin_lexicon()


def dog_broke_vase():
    return diagram_from_sentence(["dog", "broke", "vase"], LEX)


def test_alice_plays_guitar_structure():
    d = diagram_from_sentence(["Alice", "plays", "guitar"], LEX)
    assert [w.token for w in d.words] == ["Alice", "plays", "guitar"]
    assert [(c.left, c.right) for c in d.wiring.cups] == [(0, 1), (3, 4)]
    assert d.wiring.open == ((2, S),)
    assert validate(d) == []


def test_single_noun_is_not_grammatical():
    with pytest.raises(NotGrammatical):
        diagram_from_sentence(["Alice"], LEX)


@pytest.mark.parametrize("tokens,label", builtin_corpus().sentences)
def test_round_trip_cups_match_reduction(tokens, label):
    d = diagram_from_sentence(tokens, LEX)
    trace = reduce(type_of_sentence(tokens, LEX))
    assert tuple((c.left, c.right) for c in d.wiring.cups) == trace.cups
    assert validate(d) == []


def test_copy_noun_adds_one_open_wire_and_keeps_cups():
    d = dog_broke_vase()
    c = copy_noun(d, 0)
    assert len(c.wiring.open) == len(d.wiring.open) + 1
    assert c.wiring.cups == d.wiring.cups
    assert c.wiring.spiders == (CopySpider(0, 5),)
    assert validate(c) == []
    cc = copy_noun(c, 2)
    assert len(cc.wiring.open) == len(d.wiring.open) + 2
    assert validate(cc) == []


def test_copy_noun_rejects_non_nouns():
    with pytest.raises(NotANoun):
        copy_noun(dog_broke_vase(), 1)
    with pytest.raises(NotANoun):
        copy_noun(dog_broke_vase(), 7)


@pytest.mark.parametrize("word_index", [0, 2])
def test_compose_two_sentences(word_index):
    d1 = copy_noun(dog_broke_vase(), word_index)
    d2 = diagram_from_sentence(["dog", "was", "clumsy"], LEX)
    copy_wire = d1.wiring.open[-1][0]
    out = compose_two_sentence(d1, d2, [(copy_wire, 0)])
    assert validate(out) == []
    assert [t for _, t in out.wiring.open] == [S, S]
    assert [w.token for w in out.words] == ["dog", "broke", "vase", "was", "clumsy"]
    assert Cup(copy_wire, 6) in out.wiring.cups


def test_compose_rejects_sentence_wire():
    d1 = dog_broke_vase()
    d2 = diagram_from_sentence(["dog", "was", "clumsy"], LEX)
    with pytest.raises(TypeMismatch):
        compose_two_sentence(d1, d2, [(2, 0)])
    with pytest.raises(TypeMismatch):
        compose_two_sentence(copy_noun(d1, 0), d2, [(5, 1)])


def test_validate_reports_dangling_and_crossing():
    words = (WordBox("a", ty("n"), (0,)), WordBox("v", ty("n.r@s@n.l"), (1, 2, 3)), WordBox("b", ty("n"), (4,)))
    bad = Diagram(words, Wiring((Cup(0, 1), Cup(3, 9)), ((2, S),)))
    problems = validate(bad)
    assert any("missing wire 9" in p for p in problems)
    assert any("dangling" in p or "wire 4" in p for p in problems)
    words = (WordBox("x", ty("n@n"), (0, 1)), WordBox("y", ty("n.r@n.r"), (2, 3)))
    crossing = Diagram(words, Wiring((Cup(0, 2), Cup(1, 3)), ()))
    assert any("cross" in p for p in validate(crossing))


def test_json_round_trip():
    d = copy_noun(dog_broke_vase(), 0)
    data = json.loads(d.dumps())
    assert set(data) >= {"words", "cups", "spiders", "open"}
    assert Diagram.loads(d.dumps()) == d
