"""String-diagram IR: word boxes on typed wires joined by cups, copy spiders and swaps."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import NotANoun, NotGrammatical, TypeMismatch
from .pregroup import (
    Base,
    Lexicon,
    PregroupType,
    SimpleType,
    cups_cross,
    reduce,
    type_of_sentence,
)


@dataclass(frozen=True)
class WordBox:
    token: str
    type: PregroupType
    output_wires: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "output_wires", tuple(self.output_wires))


@dataclass(frozen=True)
class Cup:
    left: int
    right: int


@dataclass(frozen=True)
class CopySpider:
    """Frobenius copy on wire ``src``: ``src`` carries on and ``dst`` is the new copy."""

    src: int
    dst: int


@dataclass(frozen=True)
class Swap:
    a: int
    b: int


Generator = Union[Cup, CopySpider, Swap]


@dataclass(frozen=True)
class Wiring:
    generators: tuple[Generator, ...] = ()
    open: tuple[tuple[int, SimpleType], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "open", tuple(self.open))

    @property
    def cups(self) -> tuple[Cup, ...]:
        return tuple(g for g in self.generators if isinstance(g, Cup))

    @property
    def spiders(self) -> tuple[CopySpider, ...]:
        return tuple(g for g in self.generators if isinstance(g, CopySpider))

    @property
    def swaps(self) -> tuple[Swap, ...]:
        return tuple(g for g in self.generators if isinstance(g, Swap))


@dataclass(frozen=True)
class Diagram:
    words: tuple[WordBox, ...] = ()
    wiring: Wiring = field(default_factory=Wiring)

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))

    def wire_types(self) -> dict[int, SimpleType]:
        """Types of every wire: word outputs first, then spider copies."""
        types: dict[int, SimpleType] = {}
        for w in self.words:
            for wire, f in zip(w.output_wires, w.type.factors):
                types[wire] = f
        for sp in self.wiring.spiders:
            if sp.src in types:
                types[sp.dst] = types[sp.src]
        return types

    @property
    def n_wires(self) -> int:
        types = self.wire_types()
        return max(types) + 1 if types else 0

    def owner(self, wire: int) -> WordBox | None:
        for w in self.words:
            if wire in w.output_wires:
                return w
        return None

    def to_dict(self) -> dict:
        return {
            "words": [
                {"token": w.token, "type": str(w.type), "wires": list(w.output_wires)}
                for w in self.words
            ],
            "cups": [[c.left, c.right] for c in self.wiring.cups],
            "spiders": [{"src": s.src, "dst": s.dst} for s in self.wiring.spiders],
            "swaps": [[s.a, s.b] for s in self.wiring.swaps],
            "open": [{"wire": i, "type": str(t)} for i, t in self.wiring.open],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> Diagram:
        words = tuple(
            WordBox(w["token"], PregroupType.parse(w["type"]), tuple(w["wires"]))
            for w in data["words"]
        )
        gens: list[Generator] = [Cup(a, b) for a, b in data.get("cups", [])]
        gens += [CopySpider(s["src"], s["dst"]) for s in data.get("spiders", [])]
        gens += [Swap(a, b) for a, b in data.get("swaps", [])]
        open_ = tuple(
            (o["wire"], PregroupType.parse(o["type"]).factors[0]) for o in data.get("open", [])
        )
        return cls(words, Wiring(tuple(gens), open_))

    @classmethod
    def loads(cls, text: str) -> Diagram:
        return cls.from_dict(json.loads(text))


def diagram_from_sentence(tokens: Sequence[str], lex: Lexicon) -> Diagram:
    t = type_of_sentence(tokens, lex)
    trace = reduce(t)
    if len(trace.leftovers) != 1 or t.factors[trace.leftovers[0]] != SimpleType(Base.S):
        raise NotGrammatical(f"{' '.join(tokens)!r} reduces to {trace.residue.pretty()}, not s")
    words, start = [], 0
    for token in tokens:
        wt = lex[token]
        words.append(WordBox(lex.canonical(token), wt, tuple(range(start, start + len(wt)))))
        start += len(wt)
    cups = tuple(Cup(i, j) for i, j in trace.cups)
    open_ = tuple((i, t.factors[i]) for i in trace.leftovers)
    return Diagram(tuple(words), Wiring(cups, open_))


def _plain_noun_wire(d: Diagram, word_index: int) -> int:
    try:
        word = d.words[word_index]
    except IndexError:
        raise NotANoun(f"no word at index {word_index}") from None
    for wire, f in zip(word.output_wires, word.type.factors):
        if f.base is Base.N and f.is_plain:
            return wire
    raise NotANoun(f"{word.token!r} has no plain n wire (type {word.type.pretty()})")


def copy_noun(d: Diagram, word_index: int) -> Diagram:
    """Attach a copy spider to the word's noun wire; the copy becomes a new open wire."""
    src = _plain_noun_wire(d, word_index)
    dst = d.n_wires
    wiring = Wiring(
        d.wiring.generators + (CopySpider(src, dst),),
        d.wiring.open + ((dst, d.wire_types()[src]),),
    )
    return Diagram(d.words, wiring)


def compose_two_sentence(
    d1: Diagram, d2: Diagram, bridges: Sequence[tuple[int, int]]
) -> Diagram:
    """Feed open noun wires of ``d1`` into noun word positions of ``d2``.

    Each bridge ``(wire, word_index)`` removes word ``word_index`` from ``d2``
    and reroutes whatever consumed its wire onto ``wire`` of ``d1``.
    """
    types1 = d1.wire_types()
    open1 = dict(d1.wiring.open)
    replaced: dict[int, int] = {}
    for wire, word_index in bridges:
        t = types1.get(wire)
        if t is None or t.base is not Base.N or not t.is_plain or wire not in open1:
            raise TypeMismatch(f"bridge source wire {wire} is not an open n wire of the first diagram")
        if not 0 <= word_index < len(d2.words):
            raise TypeMismatch(f"no word at index {word_index} in the second diagram")
        box = d2.words[word_index]
        if len(box.type) != 1 or box.type.factors[0] != SimpleType(Base.N):
            raise TypeMismatch(f"bridge target {box.token!r} is not a single n box")
        replaced[word_index] = wire

    n1 = d1.n_wires
    remap: dict[int, int] = {}
    nxt = n1
    replaced_wires = {d2.words[i].output_wires[0]: w for i, w in replaced.items()}
    for old in sorted(d2.wire_types()):
        if old in replaced_wires:
            remap[old] = replaced_wires[old]
        else:
            remap[old] = nxt
            nxt += 1

    words = list(d1.words)
    for i, w in enumerate(d2.words):
        if i in replaced:
            continue
        words.append(WordBox(w.token, w.type, tuple(remap[x] for x in w.output_wires)))

    gens = list(d1.wiring.generators)
    for g in d2.wiring.generators:
        if isinstance(g, Cup):
            a, b = remap[g.left], remap[g.right]
            gens.append(Cup(min(a, b), max(a, b)))
        elif isinstance(g, CopySpider):
            gens.append(CopySpider(remap[g.src], remap[g.dst]))
        else:
            gens.append(Swap(remap[g.a], remap[g.b]))
    used = set(replaced.values())
    open_ = [(w, t) for w, t in d1.wiring.open if w not in used]
    open_ += [(remap[w], t) for w, t in d2.wiring.open]
    return Diagram(tuple(words), Wiring(tuple(gens), tuple(open_)))


def validate(d: Diagram) -> list[str]:
    """Every structural violation found; an empty list means the diagram is sound."""
    problems: list[str] = []
    types: dict[int, SimpleType] = {}
    for w in d.words:
        if len(w.output_wires) != len(w.type):
            problems.append(f"word {w.token!r}: {len(w.output_wires)} wires for {len(w.type)} factors")
        for wire, f in zip(w.output_wires, w.type.factors):
            if wire in types:
                problems.append(f"wire {wire} produced twice")
            types[wire] = f
    for sp in d.wiring.spiders:
        if sp.src not in types:
            problems.append(f"spider source wire {sp.src} does not exist")
            continue
        if types[sp.src].base is not Base.N:
            problems.append(f"spider on wire {sp.src} copies a non-noun type {types[sp.src].pretty()}")
        if sp.dst in types:
            problems.append(f"spider output wire {sp.dst} already exists")
        types[sp.dst] = types[sp.src]

    cup_use: dict[int, int] = {}
    cups = d.wiring.cups
    for c in cups:
        for end in (c.left, c.right):
            if end not in types:
                problems.append(f"cup {(c.left, c.right)} references missing wire {end}")
            cup_use[end] = cup_use.get(end, 0) + 1
        if c.left >= c.right:
            problems.append(f"cup {(c.left, c.right)} is not ordered left < right")
        elif c.left in types and c.right in types and not types[c.left].cancels_with(types[c.right]):
            problems.append(
                f"cup {(c.left, c.right)} joins incompatible {types[c.left].pretty()} and {types[c.right].pretty()}"
            )
    for wire, count in sorted(cup_use.items()):
        if count > 1:
            problems.append(f"wire {wire} is consumed by {count} cups")
    for a_i in range(len(cups)):
        for b_i in range(a_i + 1, len(cups)):
            a, b = cups[a_i], cups[b_i]
            if cups_cross((a.left, a.right), (b.left, b.right)):
                problems.append(f"cups {(a.left, a.right)} and {(b.left, b.right)} cross")
    for s in d.wiring.swaps:
        for end in (s.a, s.b):
            if end not in types:
                problems.append(f"swap references missing wire {end}")

    open_wires = [w for w, _ in d.wiring.open]
    for w, t in d.wiring.open:
        if w not in types:
            problems.append(f"open wire {w} does not exist")
        elif types[w] != t:
            problems.append(f"open wire {w} declared {t.pretty()} but carries {types[w].pretty()}")
        if w in cup_use:
            problems.append(f"open wire {w} is also cupped")
    if len(set(open_wires)) != len(open_wires):
        problems.append("open wire listed twice")
    legs = {sp.src for sp in d.wiring.spiders} | {sp.dst for sp in d.wiring.spiders}
    for wire in sorted(types):
        if wire not in cup_use and wire not in legs and wire not in open_wires:
            problems.append(f"wire {wire} is dangling")
    return problems
