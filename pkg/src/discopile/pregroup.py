"""Pregroup types, lexicons and reduction by adjacent cancellation.

A simple type is a base (``n`` or ``s``) with an integer winding: ``-1`` is
the left adjoint, ``+1`` the right adjoint. Two adjacent factors ``x · y``
cancel when they share a base and ``x.adjoint == y.adjoint - 1``, which covers
both ``nˡ · n → 1`` and ``n · nʳ → 1``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import AdjointDepthError, ParseError, UnknownToken

MAX_ADJOINT = 2


class Base(enum.Enum):
    N = "n"
    S = "s"


@dataclass(frozen=True, order=True)
class SimpleType:
    base: Base
    adjoint: int = 0

    def __post_init__(self):
        if abs(self.adjoint) > MAX_ADJOINT:
            raise AdjointDepthError(
                f"adjoint depth {self.adjoint} exceeds the supported |z| <= {MAX_ADJOINT}"
            )

    @property
    def l(self) -> SimpleType:
        return SimpleType(self.base, self.adjoint - 1)

    @property
    def r(self) -> SimpleType:
        return SimpleType(self.base, self.adjoint + 1)

    @property
    def is_plain(self) -> bool:
        return self.adjoint == 0

    def cancels_with(self, right: SimpleType) -> bool:
        """True when ``self · right → 1``."""
        return self.base == right.base and self.adjoint == right.adjoint - 1

    def __str__(self) -> str:
        suffix = ".l" * -self.adjoint if self.adjoint < 0 else ".r" * self.adjoint
        return self.base.value + suffix

    def pretty(self) -> str:
        marks = "ˡ" * -self.adjoint if self.adjoint < 0 else "ʳ" * self.adjoint
        return self.base.value + marks


N = SimpleType(Base.N)
S = SimpleType(Base.S)


@dataclass(frozen=True)
class PregroupType:
    """An ordered product of simple types; the empty product is the unit."""

    factors: tuple[SimpleType, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def __matmul__(self, other: PregroupType | SimpleType) -> PregroupType:
        if isinstance(other, SimpleType):
            other = PregroupType((other,))
        return PregroupType(self.factors + other.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[SimpleType]:
        return iter(self.factors)

    def __getitem__(self, i):
        return self.factors[i]

    @property
    def is_unit(self) -> bool:
        return not self.factors

    def __str__(self) -> str:
        return "@".join(str(f) for f in self.factors) if self.factors else "1"

    def pretty(self) -> str:
        return "·".join(f.pretty() for f in self.factors) if self.factors else "1"

    @classmethod
    def parse(cls, text: str) -> PregroupType:
        """Parse ``n.r@s@n.l`` style strings (``1`` or empty is the unit)."""
        text = text.strip()
        if text in ("", "1"):
            return cls()
        return cls(tuple(_parse_simple(part) for part in text.split("@")))


def _parse_simple(text: str) -> SimpleType:
    head, *suffixes = text.strip().split(".")
    try:
        base = Base(head)
    except ValueError:
        raise ParseError(f"unknown base type {head!r} in {text!r}") from None
    adjoint = 0
    for suffix in suffixes:
        if suffix == "l":
            adjoint -= 1
        elif suffix == "r":
            adjoint += 1
        else:
            raise ParseError(f"unknown adjoint suffix {suffix!r} in {text!r}")
    return SimpleType(base, adjoint)


def ty(text: str) -> PregroupType:
    return PregroupType.parse(text)


@dataclass(frozen=True)
class Lexicon:
    """Token to type table. Lookup falls back to a case-insensitive match."""

    entries: Mapping[str, PregroupType] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))
        folded = {}
        for token in self.entries:
            folded.setdefault(token.casefold(), token)
        object.__setattr__(self, "_folded", folded)

    def __hash__(self) -> int:
        return hash(tuple(sorted((k, str(v)) for k, v in self.entries.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, Lexicon) and self.entries == other.entries

    def __contains__(self, token: str) -> bool:
        return token in self.entries or token.casefold() in self._folded

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def canonical(self, token: str) -> str:
        if token in self.entries:
            return token
        try:
            return self._folded[token.casefold()]
        except KeyError:
            raise UnknownToken(token) from None

    def __getitem__(self, token: str) -> PregroupType:
        return self.entries[self.canonical(token)]

    def items(self):
        return self.entries.items()

    def restrict(self, tokens: Iterable[str]) -> Lexicon:
        return Lexicon({self.canonical(t): self[t] for t in tokens})

    @classmethod
    def parse(cls, text: str) -> Lexicon:
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = raw.rstrip("\r\n").split("\t")
            if len(parts) != 2 or not parts[0].strip():
                raise ParseError("expected 'token<TAB>type'", lineno)
            try:
                entries[parts[0].strip()] = PregroupType.parse(parts[1])
            except (ParseError, AdjointDepthError) as exc:
                raise ParseError(str(exc), lineno) from None
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path) -> Lexicon:
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def dumps(self) -> str:
        return "".join(f"{tok}\t{t}\n" for tok, t in self.entries.items())


@lru_cache(maxsize=None)
def builtin_lexicon() -> Lexicon:
    text = resources.files("discopile").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
    return Lexicon.parse(text)


def type_of_sentence(tokens: Sequence[str], lex: Lexicon) -> PregroupType:
    out = PregroupType()
    for token in tokens:
        if token not in lex:
            raise UnknownToken(token)
        out = out @ lex[token]
    return out


@dataclass(frozen=True)
class ReductionTrace:
    """Cups as index pairs into the flattened factor sequence, plus survivors."""

    cups: tuple[tuple[int, int], ...]
    leftovers: tuple[int, ...]
    factors: tuple[SimpleType, ...] = ()

    @property
    def residue(self) -> PregroupType:
        return PregroupType(tuple(self.factors[i] for i in self.leftovers))


def reduce(t: PregroupType) -> ReductionTrace:
    """Search adjacent cancellations for a reduction to ``s``.

    Cancellations are tried leftmost first, depth first, backtracking when a
    branch cannot reach a single ``s``. If no branch does, the branch with the
    shortest residue (first found) is returned.
    """
    factors = t.factors
    best: list = [None]
    seen: set[tuple[int, ...]] = set()

    def search(alive: tuple[int, ...], cups: tuple[tuple[int, int], ...]) -> bool:
        if alive in seen:
            return False
        seen.add(alive)
        if best[0] is None or len(alive) < len(best[0][0]):
            best[0] = (alive, cups)
        if len(alive) == 1 and factors[alive[0]] == S:
            best[0] = (alive, cups)
            return True
        for pos in range(len(alive) - 1):
            i, j = alive[pos], alive[pos + 1]
            if factors[i].cancels_with(factors[j]):
                rest = alive[:pos] + alive[pos + 2:]
                if search(rest, cups + ((i, j),)):
                    return True
        return False

    search(tuple(range(len(factors))), ())
    alive, cups = best[0]
    return ReductionTrace(tuple(sorted(cups)), alive, factors)


def is_grammatical(t: PregroupType) -> bool:
    trace = reduce(t)
    return len(trace.leftovers) == 1 and t.factors[trace.leftovers[0]] == S


def replay(trace: ReductionTrace) -> tuple[int, ...]:
    """Remove cupped factors from the sequence and return the survivors.

    Cups are checked to be adjacent at the moment they are removed, in an
    order consistent with nesting (inner cups first).
    """
    alive = list(range(len(trace.factors)))
    pending = sorted(trace.cups, key=lambda c: c[1] - c[0])
    for i, j in pending:
        pos = alive.index(i)
        if pos + 1 >= len(alive) or alive[pos + 1] != j:
            raise ValueError(f"cup {(i, j)} is not adjacent after inner cancellations")
        if not trace.factors[i].cancels_with(trace.factors[j]):
            raise ValueError(f"cup {(i, j)} pairs incompatible factors")
        del alive[pos:pos + 2]
    return tuple(alive)


def cups_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    (i, j), (k, l) = sorted([a, b])
    return i < k < j < l
