"""Minimal relations and the gamma-canonical shortlex word acceptor.

Shortlex words of an abelian group are sorted words ``a_1^r_1 ... a_n^r_n``
and are identified with their exponent tuples.  A tuple fails to be
shortlex exactly when it contains (componentwise) the greater side of some
minimal relation, so the acceptor is built from that finite pattern set
without enumerating group elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .abelian import AbelianStructure, OrderedAlphabet, Word, generator_columns

FAILURE = -1

NormalForm = tuple[int, ...]


def shortlex_key(nf: NormalForm) -> tuple:
    """Sort key of the sorted word of an exponent tuple in shortlex order.

    Among sorted words of equal length the one with the larger exponent at
    the first differing letter comes first.
    """
    return (sum(nf), tuple(-x for x in nf))


def nf_word(nf: NormalForm) -> Word:
    return tuple(i for i, r in enumerate(nf) for _ in range(r))


def word_nf(word: Iterable[int], n: int) -> NormalForm:
    out = [0] * n
    for i in word:
        out[i] += 1
    return tuple(out)


def contained(small: NormalForm, big: NormalForm) -> bool:
    return all(a <= b for a, b in zip(small, big))


@dataclass(frozen=True, order=True)
class MinimalRelation:
    lhs: NormalForm
    rhs: NormalForm

    def format(self, alphabet: OrderedAlphabet) -> str:
        return f"{alphabet.format_word(nf_word(self.lhs))} ~ {alphabet.format_word(nf_word(self.rhs))}"


def _relation_lattice_points(structure: AbelianStructure, bound: int) -> Iterable[tuple[int, ...]]:
    """Net exponent vectors (one entry per inverse pair) that evaluate to the
    identity, with every entry in ``[-2*bound, 2*bound]``."""
    from .oracle import _lattice

    lat = _lattice(structure)
    ncol = len(lat.gen_images)
    basis = lat.kernel
    if not basis:
        yield (0,) * ncol
        return
    from .oracle import _inverse, _pivot_columns

    cols = _pivot_columns(basis)
    inv = _inverse([[Fraction(w[c]) for c in cols] for w in basis])
    q = len(basis)
    # |t_J| <= 2*bound entrywise, so ||t_J||_1 <= 2*bound*q
    lim = 2 * bound * q
    bounds = [int(lim * max(abs(inv[r][c]) for r in range(q))) for c in range(q)]
    for z in product(*(range(-b, b + 1) for b in bounds)):
        t = [0] * ncol
        for zi, w in zip(z, basis):
            if zi:
                for j in range(ncol):
                    t[j] += zi * w[j]
        if all(abs(x) <= 2 * bound for x in t):
            yield tuple(t)


def minimal_relations(structure: AbelianStructure, exponent_bound: int) -> list[MinimalRelation]:
    """All minimal relations whose sides have exponents at most ``exponent_bound``.

    A relation ``v ~ v'`` is minimal when no relation ``w ~ w'`` with
    ``w <= v`` and ``w' <= v'`` (componentwise) exists besides itself; such
    pairs have disjoint supports, so they are the conformally minimal
    vectors ``v - v'`` of the lattice of exponent vectors evaluating to the
    identity.  Each is returned with its shortlex-greater side as ``lhs``.
    """
    alphabet = structure.alphabet
    n = len(alphabet)
    bound = exponent_bound
    column_of, sign_of, _ = generator_columns(alphabet)
    ncol = max(column_of, default=-1) + 1
    members: list[list[int]] = [[] for _ in range(ncol)]
    for i in range(n):
        members[column_of[i]].append(i)

    candidates: set[tuple[int, ...]] = set()
    # cancellation x x^-1 ~ e for each genuine inverse pair
    for col in members:
        if len(col) == 2 and bound >= 1:
            v = [0] * n
            v[col[0]] = v[col[1]] = 1
            candidates.add(tuple(v))

    for net in _relation_lattice_points(structure, bound):
        if not any(net):
            continue
        # split each net exponent between a letter and its inverse without
        # using both with the same sign (that would contain a cancellation)
        per_col = []
        for j, col in enumerate(members):
            rho = net[j]
            if len(col) == 1:
                per_col.append([((col[0], rho),)] if abs(rho) <= bound else [])
                continue
            x, xbar = col if sign_of[col[0]] == 1 else col[::-1]
            opts = []
            # t_x - t_xbar = rho with t_x * t_xbar <= 0
            for tx in range(-bound, bound + 1):
                txbar = tx - rho
                if abs(txbar) <= bound and tx * txbar <= 0:
                    opts.append(((x, tx), (xbar, txbar)))
            per_col.append(opts)
        if any(not o for o in per_col):
            continue
        for choice in product(*per_col):
            v = [0] * n
            for part in choice:
                for i, t in part:
                    v[i] = t
            # orient so the first nonzero entry is positive; sign is irrelevant
            first = next(x for x in v if x)
            if first < 0:
                v = [-x for x in v]
            candidates.add(tuple(v))

    graver: list[tuple[int, ...]] = []
    for v in sorted(candidates, key=lambda t: (sum(map(abs, t)), t)):
        if not any(_conformal_le(g, v) or _conformal_le(tuple(-x for x in g), v) for g in graver):
            graver.append(v)

    out = []
    for g in graver:
        pos = tuple(max(x, 0) for x in g)
        neg = tuple(max(-x, 0) for x in g)
        lhs, rhs = (pos, neg) if shortlex_key(pos) > shortlex_key(neg) else (neg, pos)
        out.append(MinimalRelation(lhs, rhs))
    return sorted(out, key=lambda r: (shortlex_key(r.lhs), shortlex_key(r.rhs)))


def _conformal_le(g: Sequence[int], v: Sequence[int]) -> bool:
    return all(a == 0 or (a * b > 0 and abs(a) <= abs(b)) for a, b in zip(g, v))


def forbidden_patterns(minrels: Iterable[MinimalRelation]) -> list[NormalForm]:
    """Containment-minimal greater sides: a tuple is shortlex iff it
    contains none of these."""
    lhs = sorted({r.lhs for r in minrels}, key=sum)
    out: list[NormalForm] = []
    for p in lhs:
        if not any(contained(q, p) for q in out):
            out.append(p)
    return out


def fellow_traveller_constant(minrels: Iterable[MinimalRelation]) -> int:
    """Largest exponent-vector gap between equal-length prefixes of the two
    sides of a minimal relation (the shorter side held at its end), at least 1."""
    kappa = 1
    for rel in minrels:
        n = len(rel.lhs)
        u, v = nf_word(rel.lhs), nf_word(rel.rhs)
        for t in range(max(len(u), len(v)) + 1):
            a = word_nf(u[:t], n)
            b = word_nf(v[:t], n)
            kappa = max(kappa, sum(abs(x - y) for x, y in zip(a, b)))
    return kappa


@dataclass(frozen=True)
class LetterClass:
    """``kind`` is "infinite", "finite" or "never"; ``bound`` is the maximal
    number of repetitions for the finite case."""

    kind: str
    bound: int = 0

    def __repr__(self) -> str:
        return f"Finite({self.bound})" if self.kind == "finite" else self.kind.capitalize()


INFINITE = LetterClass("infinite")
NEVER = LetterClass("never")


class ShortlexTest:
    """Decides shortlex-ness of exponent tuples by pattern containment."""

    def __init__(self, minrels: Iterable[MinimalRelation]):
        minrels = list(minrels)
        self.patterns = forbidden_patterns(minrels)
        self.saturation = max([max(p) for p in self.patterns] + [1])
        self._cache: dict[tuple, LetterClass] = {}

    def is_shortlex(self, nf: NormalForm) -> bool:
        return not any(contained(p, nf) for p in self.patterns)

    def classify(self, prefix: NormalForm, letter: int) -> LetterClass:
        top = max((i for i, r in enumerate(prefix) if r), default=-1)
        if letter < top:
            return NEVER
        sat = self.saturation
        key = (tuple(min(r, sat) for r in prefix), letter)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        cur = list(key[0])
        k = 0
        while k < sat:
            cur[letter] += 1
            if not self.is_shortlex(tuple(cur)):
                break
            k += 1
        if k == sat:
            cls = INFINITE
        elif k == 0:
            cls = NEVER
        else:
            cls = LetterClass("finite", k)
        self._cache[key] = cls
        return cls


def classify_letter(structure: AbelianStructure, minrels: Iterable[MinimalRelation],
                    prefix: NormalForm, letter: int) -> LetterClass:
    return ShortlexTest(minrels).classify(prefix, letter)


@dataclass(frozen=True)
class StatePathProfile:
    state: int
    path_length: int
    loop_count_plus_one: int
    loop_positions: tuple[int, ...]


@dataclass(eq=False)
class Acceptor:
    """The gamma-canonical word acceptor.

    Accept states are ``0 .. m-1`` with the start state at 0; ``trans[s, x]``
    is the target of letter ``x`` from ``s`` or ``FAILURE``.  Removing loops
    and the failure state leaves a tree: ``parent[s]``/``label[s]`` give each
    non-start state's unique incoming arrow.
    """

    alphabet: OrderedAlphabet
    gamma: int
    trans: np.ndarray
    parent: np.ndarray
    label: np.ndarray
    depth: np.ndarray
    has_loop: np.ndarray
    exponents: list[NormalForm] = field(repr=False)

    @property
    def num_states(self) -> int:
        return len(self.parent)

    @property
    def start(self) -> int:
        return 0

    def path(self, k: int) -> list[int]:
        out = [k]
        while k != 0:
            k = int(self.parent[k])
            out.append(k)
        return out[::-1]


def build_acceptor(structure: AbelianStructure, minrels: Iterable[MinimalRelation], gamma: int,
                   mu: int | None = None) -> Acceptor:
    """Grow the tree of lines described by the canonical construction.

    For each added state and each letter other than its incoming label:
    an unboundedly repeatable letter gets a line of ``gamma`` states ending
    in a loop, a letter repeatable at most ``g`` times gets a line of ``g``
    states whose last state sends the letter to failure, and any other
    letter goes straight to failure.
    """
    test = minrels if isinstance(minrels, ShortlexTest) else ShortlexTest(minrels)
    if mu is not None and gamma <= mu:
        raise ValueError(f"gamma must exceed mu = {mu} (got {gamma})")
    if gamma < test.saturation:
        raise ValueError(f"gamma must be at least the largest relation exponent {test.saturation}")
    n = len(structure.alphabet)
    trans: list[list[int]] = [[FAILURE] * n]
    parent = [-1]
    label = [-1]
    depth = [0]
    has_loop = [False]
    exps: list[NormalForm] = [(0,) * n]

    def add_state(src: int, x: int) -> int:
        s = len(parent)
        trans.append([FAILURE] * n)
        parent.append(src)
        label.append(x)
        depth.append(depth[src] + 1)
        has_loop.append(False)
        e = list(exps[src])
        e[x] += 1
        exps.append(tuple(e))
        trans[src][x] = s
        return s

    queue = [0]
    head = 0
    while head < len(queue):
        sigma = queue[head]
        head += 1
        alpha = label[sigma]
        for x in range(n):
            if x == alpha:
                continue
            cls = test.classify(exps[sigma], x)
            if cls.kind == "never":
                trans[sigma][x] = FAILURE
                continue
            length = gamma if cls.kind == "infinite" else cls.bound
            end = sigma
            for _ in range(length):
                end = add_state(end, x)
                queue.append(end)
            if cls.kind == "infinite":
                trans[end][x] = end
                has_loop[end] = True
            else:
                trans[end][x] = FAILURE

    acc = Acceptor(
        alphabet=structure.alphabet,
        gamma=gamma,
        trans=np.asarray(trans, dtype=np.int32).reshape(len(parent), n),
        parent=np.asarray(parent, dtype=np.int64),
        label=np.asarray(label, dtype=np.int64),
        depth=np.asarray(depth, dtype=np.int64),
        has_loop=np.asarray(has_loop, dtype=bool),
        exponents=exps,
    )
    for arr in (acc.trans, acc.parent, acc.label, acc.depth, acc.has_loop):
        arr.flags.writeable = False
    return acc


def run(acceptor: Acceptor, word: Iterable[int]) -> int:
    s = 0
    for x in word:
        s = int(acceptor.trans[s, x])
        if s == FAILURE:
            return FAILURE
    return s


def accepts(acceptor: Acceptor, word: Iterable[int]) -> bool:
    return run(acceptor, word) != FAILURE


def transition_matrix(acceptor: Acceptor) -> np.ndarray:
    """Dense accept-state adjacency counts (arrows plus loops)."""
    m = acceptor.num_states
    a = np.zeros((m, m), dtype=np.int64)
    for s in range(m):
        for t in acceptor.trans[s]:
            if t != FAILURE:
                a[s, t] += 1
    return a


def path_profile(acceptor: Acceptor, k: int) -> StatePathProfile:
    """Length of the tree path to ``k`` and the looped states along it."""
    path = acceptor.path(k)
    loops = tuple(i for i, s in enumerate(path) if acceptor.has_loop[s])
    return StatePathProfile(k, len(path) - 1, len(loops) + 1, loops)


def export_dot(acceptor: Acceptor, include_failure: bool = True) -> str:
    sym = acceptor.alphabet.symbols
    m = acceptor.num_states
    lines = ["digraph W {", "  rankdir=LR;", '  node [shape=circle];', '  s0 [shape=doublecircle];']
    for s in range(1, m):
        lines.append(f"  s{s};")
    if include_failure:
        lines.append('  fail [shape=box, label="failure"];')
    for s in range(m):
        for x, t in enumerate(acceptor.trans[s].tolist()):
            if t == FAILURE:
                if include_failure:
                    lines.append(f'  s{s} -> fail [label="{sym[x]}"];')
            else:
                lines.append(f'  s{s} -> s{t} [label="{sym[x]}"];')
    if include_failure:
        for x in sym:
            lines.append(f'  fail -> fail [label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(acceptor: Acceptor) -> str:
    sym = acceptor.alphabet.symbols
    m = acceptor.num_states
    arrows, loops, failures = [], [], []
    for s in range(m):
        for x, t in enumerate(acceptor.trans[s].tolist()):
            if t == FAILURE:
                failures.append([s, sym[x]])
            elif t == s:
                loops.append([s, sym[x]])
            else:
                arrows.append([s, sym[x], t])
    doc = {
        "alphabet": sym,
        "gamma": acceptor.gamma,
        "start": 0,
        "failure": m,
        "states": m,
        "arrows": arrows,
        "loops": loops,
        "failure_arrows": failures,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
