"""Cross-checks between the acceptor, the series layer and the oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .abelian import AbelianStructure
from .acceptor import FAILURE, Acceptor
from .oracle import BallTable
from .series import expand, profiles, state_growth, walk_count_table
from .subgraph import Subgraph, _validated


@dataclass
class LanguageResult:
    max_length: int
    words_covered: int
    mismatches: int
    first: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def language_check(structure: AbelianStructure, acceptor: Acceptor, max_length: int,
                   table: BallTable | None = None) -> LanguageResult:
    """Compare acceptance with oracle shortlex-ness on every word of length
    at most ``max_length``.

    A word ``wx`` is a normal form exactly when ``w`` is one, ``wx`` is
    geodesic and BFS reached its element last through ``x``.  Once a word is
    not a normal form and the acceptor has failed, every extension is both
    rejected and non-normal, so the subtree is counted without visiting it.
    """
    table = table if table is not None else BallTable(structure, max_length)
    images = structure.letter_image
    nletters = len(images)
    trans = acceptor.trans.tolist()
    subtree = [0] * (max_length + 2)
    for k in range(max_length, -1, -1):
        subtree[k] = 1 + nletters * subtree[k + 1] if k < max_length else 1
    result = LanguageResult(max_length, 0, 0)

    # (word, element, state, is_nf)
    stack = [((), structure.identity, acceptor.start, True)]
    while stack:
        word, elem, state, is_nf = stack.pop()
        n = len(word)
        if (state != FAILURE) != is_nf:
            result.mismatches += 1
            if result.first is None:
                result.first = word
        if not is_nf and state == FAILURE:
            result.words_covered += subtree[n]
            continue
        result.words_covered += 1
        if n == max_length:
            continue
        for x in range(nletters):
            e = structure.add(elem, images[x])
            idx = table.encode(e)
            nf = is_nf and int(table.dist[idx]) == n + 1 and int(table.last[idx]) == x
            st = trans[state][x] if state != FAILURE else FAILURE
            stack.append((word + (x,), e, st, nf))
    return result


def partition_check(acceptor: Acceptor, table: BallTable, upto: int) -> int | None:
    """First ``j`` where walks of length ``j`` miss the sphere count, or None."""
    spheres = table.sphere_counts()
    walks = walk_count_table(acceptor, upto)
    for j in range(min(upto, table.radius) + 1):
        if sum(walks[j]) != spheres[j]:
            return j
    return None


def closed_form_check(acceptor: Acceptor, upto: int) -> int | None:
    """First state whose closed-form growth disagrees with walk counts."""
    walks = walk_count_table(acceptor, upto)
    for prof in profiles(acceptor):
        k = prof.state
        if expand(state_growth(prof), upto) != [walks[j][k] for j in range(upto + 1)]:
            return k
    return None


def random_subgraph(structure: AbelianStructure, rng: random.Random, max_vertices: int = 5) -> Subgraph:
    """Grow a connected subgraph from ``e`` by random Cayley edges, then add
    a few random extra edges between vertices already present."""
    images = structure.letter_image
    nletters = len(images)
    alphabet = structure.alphabet
    vertices = [structure.identity]
    words = [()]
    edges: set[tuple[int, int, int]] = set()
    target = rng.randint(1, max_vertices)
    attempts = 0
    while len(vertices) < target and attempts < 100:
        attempts += 1
        u = rng.randrange(len(vertices))
        x = rng.randrange(nletters)
        v = structure.add(vertices[u], images[x])
        if v in vertices:
            continue
        vertices.append(v)
        words.append(words[u] + (x,))
        edges.add((u, x, len(vertices) - 1))
    for u in range(len(vertices)):
        for x in range(nletters):
            v = structure.add(vertices[u], images[x])
            if v in vertices and rng.random() < 0.3:
                edges.add((u, x, vertices.index(v)))
    names = [alphabet.format_word(w) for w in words]
    return _validated(structure, vertices, sorted(edges), names, 0)


@dataclass
class SuiteResult:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def first_failure(self) -> str | None:
        return next((name for name, ok, _ in self.checks if not ok), None)
