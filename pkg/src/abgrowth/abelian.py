"""Presentations of finitely generated abelian groups and exact element arithmetic.

A presentation lists an ordered symmetric alphabet and relators.  The group
is always read as the *abelian* group presented: the relators are
abelianized into an integer matrix whose Smith normal form yields the rank,
the torsion invariants and canonical coordinates for every letter.

Text format::

    gens a,A,b,B,c,C     # letters in shortlex order
    inv  a~A, b~B, c~C   # inverse pairs (x~x for an involution)
    rel  abAB            # relator words, letters matched greedily
    rel  c=ab            # an equation u=v is read as the relator u v^-1

Statements may also be separated by ``;``.  When ``inv`` is omitted every
generator ``x`` receives an inverse ``x.swapcase()`` placed right after it.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .smith import diagonal, smith_normal_form

Word = tuple[int, ...]
Element = tuple[int, ...]


class PresentationError(ValueError):
    """Malformed or inconsistent presentation text."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Letter:
    symbol: str
    inverse: str
    rank_in_order: int


@dataclass(frozen=True)
class OrderedAlphabet:
    letters: tuple[Letter, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {x.symbol: i for i, x in enumerate(self.letters)}
        if len(index) != len(self.letters):
            raise PresentationError("duplicate letter in alphabet")
        for i, x in enumerate(self.letters):
            if x.rank_in_order != i:
                raise PresentationError("letter ranks must be 0..n-1 in order")
            if x.inverse not in index:
                raise PresentationError(f"inverse of {x.symbol!r} is not in the alphabet")
            if self.letters[index[x.inverse]].inverse != x.symbol:
                raise PresentationError(f"inverse pairing of {x.symbol!r} is not an involution")
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_pairs(cls, order: Sequence[str], pairs: Iterable[tuple[str, str]]) -> "OrderedAlphabet":
        inverse: dict[str, str] = {}
        for x, y in pairs:
            for s in (x, y):
                if s not in order:
                    raise PresentationError(f"inverse pair mentions undeclared letter {s!r}")
            if inverse.get(x, y) != y or inverse.get(y, x) != x:
                raise PresentationError(f"conflicting inverse for {x!r}/{y!r}")
            inverse[x] = y
            inverse[y] = x
        missing = [s for s in order if s not in inverse]
        if missing:
            raise PresentationError(
                "alphabet not closed under inverse: no inverse for " + ", ".join(missing)
            )
        return cls(tuple(Letter(s, inverse[s], i) for i, s in enumerate(order)))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    @property
    def symbols(self) -> list[str]:
        return [x.symbol for x in self.letters]

    def index(self, symbol: str) -> int:
        return self._index[symbol]

    def inv(self, i: int) -> int:
        return self._index[self.letters[i].inverse]

    def invert(self, word: Word) -> Word:
        return tuple(self.inv(i) for i in reversed(word))

    def parse_word(self, text: str, offset: int = 0) -> Word:
        """Split ``text`` into letters, longest symbol first."""
        symbols = sorted(self._index, key=len, reverse=True)
        out = []
        pos = 0
        while pos < len(text):
            for s in symbols:
                if text.startswith(s, pos):
                    out.append(self._index[s])
                    pos += len(s)
                    break
            else:
                raise PresentationError(
                    f"undeclared letter in word {text!r}", offset + pos
                )
        return tuple(out)

    def format_word(self, word: Word, empty: str = "e") -> str:
        if not word:
            return empty
        syms = [self.letters[i].symbol for i in word]
        sep = "" if all(len(s) == 1 for s in syms) else " "
        return sep.join(syms)


@dataclass(frozen=True)
class GroupSpec:
    alphabet: OrderedAlphabet
    relators: tuple[Word, ...]

    def __post_init__(self):
        for w in self.relators:
            if not w:
                raise PresentationError("empty relator")


_STATEMENT = re.compile(r"\s*(gens|inv|rel)\b(.*)", re.S)


def parse_group_spec(text: str) -> GroupSpec:
    """Parse the line-oriented text format or the JSON document format."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    gens: list[str] | None = None
    pairs: list[tuple[str, str]] | None = None
    rel_sources: list[tuple[str, int]] = []
    pos = 0
    for raw_line in text.splitlines(keepends=True):
        line = raw_line.split("#", 1)[0]
        start = 0
        for chunk in line.split(";"):
            offset = pos + start
            start += len(chunk) + 1
            if not chunk.strip():
                continue
            m = _STATEMENT.match(chunk)
            if m is None:
                raise PresentationError(f"expected gens/inv/rel, got {chunk.strip()!r}", offset)
            kind, body = m.group(1), m.group(2)
            body_offset = offset + m.start(2)
            if kind == "gens":
                if gens is not None:
                    raise PresentationError("duplicate gens statement", offset)
                gens = [s.strip() for s in body.split(",") if s.strip()]
                if not gens or any(re.search(r"[\s~=]", s) for s in gens):
                    raise PresentationError("bad generator list", body_offset)
            elif kind == "inv":
                pairs = pairs or []
                for item in body.split(","):
                    if not item.strip():
                        continue
                    parts = [p.strip() for p in item.split("~")]
                    if len(parts) != 2 or not all(parts):
                        raise PresentationError(f"bad inverse pair {item.strip()!r}", body_offset)
                    pairs.append((parts[0], parts[1]))
            else:
                word = body.strip()
                if not word or re.search(r"\s", word):
                    raise PresentationError("relator must be a single whitespace-free word", body_offset)
                rel_sources.append((word, body_offset + body.index(word)))
        pos += len(raw_line)
    if gens is None:
        raise PresentationError("missing gens statement")
    if pairs is None:
        alphabet = _default_alphabet(gens)
    else:
        alphabet = OrderedAlphabet.from_pairs(gens, pairs)
    relators = []
    for word, offset in rel_sources:
        if word.count("=") > 1:
            raise PresentationError("at most one '=' per relation", offset)
        if "=" in word:
            lhs, rhs = word.split("=")
            w = alphabet.parse_word(lhs, offset) + alphabet.invert(
                alphabet.parse_word(rhs, offset + len(lhs) + 1)
            )
        else:
            w = alphabet.parse_word(word, offset)
        if not w:
            raise PresentationError("empty relator", offset)
        relators.append(w)
    return GroupSpec(alphabet, tuple(relators))


def _default_alphabet(gens: list[str]) -> OrderedAlphabet:
    order: list[str] = []
    pairs = []
    for g in gens:
        inv = g.swapcase()
        if inv == g:
            raise PresentationError(f"cannot derive an inverse symbol for {g!r}; add an inv statement")
        order += [g, inv]
        pairs.append((g, inv))
    return OrderedAlphabet.from_pairs(order, pairs)


def _parse_json(text: str) -> GroupSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationError(f"invalid JSON: {exc.msg}", exc.pos) from None
    try:
        gens = [str(s) for s in doc["generators"]]
        pairs = [(str(x), str(y)) for x, y in doc["inverses"]]
        rels = doc.get("relators", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise PresentationError(f"bad JSON presentation: {exc}") from None
    alphabet = OrderedAlphabet.from_pairs(gens, pairs)
    relators = []
    for rel in rels:
        try:
            relators.append(tuple(alphabet.index(str(s)) for s in rel))
        except KeyError as exc:
            raise PresentationError(f"undeclared letter {exc.args[0]!r} in relator") from None
    return GroupSpec(alphabet, tuple(relators))


def generator_columns(alphabet: OrderedAlphabet) -> tuple[list[int], list[int], list[int]]:
    """Column layout of the relation matrix.

    Returns ``(column_of, sign_of, involution_columns)``: each letter maps to
    the column of its inverse pair with sign +1 for the earlier letter of the
    pair and -1 for the later one.
    """
    column_of = [-1] * len(alphabet)
    sign_of = [0] * len(alphabet)
    involutions = []
    ncol = 0
    for i in range(len(alphabet)):
        if column_of[i] >= 0:
            continue
        j = alphabet.inv(i)
        column_of[i] = column_of[j] = ncol
        sign_of[i] = 1
        if j == i:
            involutions.append(ncol)
        else:
            sign_of[j] = -1
        ncol += 1
    return column_of, sign_of, involutions


def relation_matrix(spec: GroupSpec) -> list[list[int]]:
    """One row of net exponent sums per relator, then ``2 e_i`` per involution."""
    column_of, sign_of, involutions = generator_columns(spec.alphabet)
    ncol = max(column_of, default=-1) + 1
    rows = []
    for w in spec.relators:
        row = [0] * ncol
        for i in w:
            row[column_of[i]] += sign_of[i]
        rows.append(row)
    for c in involutions:
        row = [0] * ncol
        row[c] = 2
        rows.append(row)
    return rows


@dataclass(frozen=True)
class AbelianStructure:
    """Canonical coordinates ``Z^rank x Z/d_1 x ... x Z/d_k`` for a presentation.

    Elements are plain tuples: the free part followed by the torsion residues.
    """

    alphabet: OrderedAlphabet
    rank: int
    invariant_factors: tuple[int, ...]
    letter_image: tuple[Element, ...]

    @property
    def ncoords(self) -> int:
        return self.rank + len(self.invariant_factors)

    @property
    def identity(self) -> Element:
        return (0,) * self.ncoords

    def reduce(self, e: Sequence[int]) -> Element:
        r = self.rank
        return tuple(e[:r]) + tuple(x % d for x, d in zip(e[r:], self.invariant_factors))

    def add(self, e: Element, f: Element) -> Element:
        return self.reduce([x + y for x, y in zip(e, f)])

    def sub(self, e: Element, f: Element) -> Element:
        return self.reduce([x - y for x, y in zip(e, f)])

    def scale(self, k: int, e: Element) -> Element:
        return self.reduce([k * x for x in e])

    def evaluate(self, word: Iterable[int]) -> Element:
        acc = [0] * self.ncoords
        for i in word:
            for c, x in enumerate(self.letter_image[i]):
                acc[c] += x
        return self.reduce(acc)

    def split(self, e: Element) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return e[: self.rank], e[self.rank:]

    def describe(self) -> str:
        torsion = "[" + ", ".join(map(str, self.invariant_factors)) + "]" if self.invariant_factors else "none"
        return f"rank {self.rank}, torsion {torsion}"


def derive_structure(spec: GroupSpec) -> AbelianStructure:
    column_of, sign_of, _ = generator_columns(spec.alphabet)
    ncol = max(column_of, default=-1) + 1
    m = relation_matrix(spec)
    d, _, v = smith_normal_form(m, ncol)
    diag = diagonal(d, ncol)
    free = [i for i, x in enumerate(diag) if x == 0]
    torsion = [i for i, x in enumerate(diag) if x > 1]
    factors = tuple(diag[i] for i in torsion)
    images = []
    for i in range(len(spec.alphabet)):
        row = v[column_of[i]]
        s = sign_of[i]
        coords = [s * row[c] for c in free] + [(s * row[c]) % diag[c] for c in torsion]
        images.append(tuple(coords))
    return AbelianStructure(spec.alphabet, len(free), factors, tuple(images))


def evaluate(structure: AbelianStructure, word: Iterable[int]) -> Element:
    return structure.evaluate(word)


def mu(spec: GroupSpec) -> int:
    """Total length of the declared relators."""
    return sum(len(w) for w in spec.relators)


def load_group(text: str) -> tuple[GroupSpec, AbelianStructure]:
    spec = parse_group_spec(text)
    return spec, derive_structure(spec)
