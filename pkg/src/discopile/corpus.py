"""The sixteen-sentence food/people dataset and its cross-category pairs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

from .ansatz import AnsatzConfig
from .errors import ParseError

FOOD = "food"
PEOPLE = "people"

# Two IQP layers: with one, the copula's sentence amplitude factorises over
# subject and adjective and the label table (an XOR of categories) is out of reach.
EXPERIMENT_ANSATZ = AnsatzConfig(layers=2)

Sentence = tuple[str, ...]


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[tuple[Sentence, bool], ...]
    categories: Mapping[str, str] = field(default_factory=dict)
    agreement: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "sentences", tuple((tuple(toks), bool(lab)) for toks, lab in self.sentences)
        )
        object.__setattr__(self, "categories", dict(self.categories))
        object.__setattr__(self, "agreement", dict(self.agreement))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[tuple[Sentence, bool]]:
        return iter(self.sentences)

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self.sentences == other.sentences

    __hash__ = None

    def label(self, tokens) -> bool:
        tokens = tuple(tokens)
        for toks, lab in self.sentences:
            if toks == tokens:
                return lab
        raise KeyError(" ".join(tokens))

    def vocabulary(self) -> list[str]:
        seen: dict[str, None] = {}
        for toks, _ in self.sentences:
            for t in toks:
                seen.setdefault(t, None)
        return list(seen)

    def nouns(self, category: str | None = None) -> list[str]:
        return [n for n, c in self.categories.items() if category is None or c == category]

    def adjectives(self) -> list[str]:
        seen: dict[str, None] = {}
        for toks, _ in self.sentences:
            seen.setdefault(toks[-1], None)
        return list(seen)


_ROWS = [
    ("pancakes are hungry", False), ("pancakes are starving", False),
    ("pancakes are tasty", True), ("pancakes are delicious", True),
    ("pasta is hungry", False), ("pasta is starving", False),
    ("pasta is tasty", True), ("pasta is delicious", True),
    ("women are tasty", False), ("women are delicious", False),
    ("women are starving", True), ("women are hungry", True),
    ("men are tasty", False), ("men are delicious", False),
    ("men are starving", True), ("men are hungry", True),
]


def builtin_corpus() -> Corpus:
    return Corpus(
        tuple((tuple(s.split()), lab) for s, lab in _ROWS),
        {"pancakes": FOOD, "pasta": FOOD, "women": PEOPLE, "men": PEOPLE},
        {"pancakes": "are", "pasta": "is", "women": "are", "men": "are"},
    )


@dataclass(frozen=True)
class Pair:
    true_sentence: Sentence
    false_sentence: Sentence
    nouns: tuple[str, str]
    adjective: str


def cross_category_pairs(c: Corpus) -> list[Pair]:
    """Every food/people noun pair crossed with every adjective.

    Each pair holds the True and the False sentence sharing the adjective.
    Ordering follows the corpus vocabulary, so it is stable.
    """
    out = []
    for food, person in itertools.product(c.nouns(FOOD), c.nouns(PEOPLE)):
        for adj in c.adjectives():
            s_food = (food, c.agreement[food], adj)
            s_person = (person, c.agreement[person], adj)
            l_food, l_person = c.label(s_food), c.label(s_person)
            if l_food == l_person:
                continue
            t, f = (s_food, s_person) if l_food else (s_person, s_food)
            out.append(Pair(t, f, (food, person), adj))
    return out


def dumps_corpus(c: Corpus) -> str:
    return "".join(f"{' '.join(toks)}\t{lab}\n" for toks, lab in c.sentences)


def loads_corpus(text: str) -> Corpus:
    rows = []
    for i, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) != 2 or parts[1] not in ("True", "False") or not parts[0].split():
            raise ParseError(f"expected 'tokens<TAB>True|False', got {line!r}", i)
        rows.append((tuple(parts[0].split()), parts[1] == "True"))
    builtin = builtin_corpus()
    vocab = {t for toks, _ in rows for t in toks}
    cats = {n: c for n, c in builtin.categories.items() if n in vocab}
    agree = {n: c for n, c in builtin.agreement.items() if n in vocab}
    return Corpus(tuple(rows), cats, agree)


def load_corpus(path: str | Path) -> Corpus:
    return loads_corpus(Path(path).read_text(encoding="utf-8"))


def save_corpus(c: Corpus, path: str | Path) -> None:
    Path(path).write_bytes(dumps_corpus(c).encode("utf-8"))
