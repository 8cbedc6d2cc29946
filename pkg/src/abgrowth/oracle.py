"""Brute-force ground truth from breadth-first enumeration of Cayley balls.

Nothing here consults the word acceptor: normal forms come from the order in
which BFS discovers elements, and distances outside a table come from an
exact lattice search over exponent vectors.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

import numpy as np

from . import kernels
from .abelian import AbelianStructure, Element, Word, generator_columns
from .kernels import CapExceeded
from .smith import determinant, smith_normal_form

DEFAULT_MAX_ELEMENTS = 10**7
DEFAULT_MAX_BOX = 6 * 10**7


def max_elements() -> int:
    return int(os.environ.get("ABGROWTH_MAX_ELEMENTS", DEFAULT_MAX_ELEMENTS))


def max_box() -> int:
    return int(os.environ.get("ABGROWTH_MAX_BOX", DEFAULT_MAX_BOX))


class OutsideTable(KeyError):
    """The element lies beyond the enumerated radius."""


class BallTable:
    """All elements within ``radius`` of the identity with distance and
    shortlex normal form.

    Storage is a dense box in canonical coordinates; ``order`` lists the
    ball's flat indices in shortlex order of their normal forms.
    """

    def __init__(self, structure: AbelianStructure, radius: int, trans=None,
                 start_state: int = 0, cap: int | None = None):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        self.structure = structure
        self.radius = radius
        r = structure.rank
        images = structure.letter_image
        bounds = [radius * max((abs(img[i]) for img in images), default=0) for i in range(r)]
        self.extents = [2 * b + 1 for b in bounds] + list(structure.invariant_factors)
        self.shift = bounds + [0] * len(structure.invariant_factors)
        self.wrap = [0] * r + [1] * len(structure.invariant_factors)
        self._strides = [1] * len(self.extents)
        for i in range(len(self.extents) - 2, -1, -1):
            self._strides[i] = self._strides[i + 1] * self.extents[i + 1]
        size = int(np.prod(self.extents, dtype=object)) if self.extents else 1
        if size > max_box():
            raise CapExceeded(f"radius-{radius} box needs {size} cells (cap {max_box()})")
        steps = [list(img) for img in images]
        self.dist, self.last, self.state, self.order, self.layer_ends = kernels.bfs_ball(
            self.extents, self.shift, self.wrap, steps, radius, trans, start_state,
            cap if cap is not None else max_elements(),
        )

    def __len__(self) -> int:
        return len(self.order)

    def encode(self, e: Element) -> int:
        idx = 0
        for c, x in enumerate(e):
            x += self.shift[c]
            if self.wrap[c]:
                x %= self.extents[c]
            elif not 0 <= x < self.extents[c]:
                return -1
            idx += x * self._strides[c]
        return idx

    def decode(self, idx: int) -> Element:
        out = []
        for c, s in enumerate(self._strides):
            q, idx = divmod(idx, s)
            out.append(q - self.shift[c])
        return tuple(out)

    def __contains__(self, e: Element) -> bool:
        idx = self.encode(e)
        return idx >= 0 and self.dist[idx] >= 0

    def distance(self, e: Element) -> int | None:
        idx = self.encode(e)
        if idx < 0 or self.dist[idx] < 0:
            return None
        return int(self.dist[idx])

    def nf(self, e: Element) -> Word:
        idx = self.encode(e)
        if idx < 0 or self.dist[idx] < 0:
            raise OutsideTable(e)
        word = []
        images = self.structure.letter_image
        while self.dist[idx] > 0:
            x = int(self.last[idx])
            word.append(x)
            e = self.structure.sub(e, images[x])
            idx = self.encode(e)
        return tuple(reversed(word))

    def final_state(self, e: Element) -> int:
        if self.state is None:
            raise ValueError("table was built without acceptor tracking")
        idx = self.encode(e)
        if idx < 0 or self.dist[idx] < 0:
            raise OutsideTable(e)
        return int(self.state[idx])

    def elements(self) -> Iterator[Element]:
        """Ball elements in shortlex order of their normal forms."""
        for idx in self.order.tolist():
            yield self.decode(idx)

    def sphere_counts(self) -> list[int]:
        ends = self.layer_ends.tolist()
        return [ends[0]] + [b - a for a, b in zip(ends, ends[1:])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        st = self.structure
        w.writerow([f"x{i}" for i in range(st.rank)] + [f"t{i}" for i in range(len(st.invariant_factors))]
                   + ["distance", "nf"])
        for e in self.elements():
            w.writerow(list(e) + [self.distance(e), st.alphabet.format_word(self.nf(e), empty="")])
        return buf.getvalue()


def enumerate_ball(structure: AbelianStructure, n: int, cap: int | None = None) -> BallTable:
    return BallTable(structure, n, cap=cap)


def geodesic_length(table: BallTable, e: Element, search_cap: int | None = None) -> int | None:
    """Distance from the identity; ``None`` outside the table unless a
    ``search_cap`` allows the exact lattice search."""
    d = table.distance(e)
    if d is None and search_cap is not None:
        return lattice_distance(table.structure, e, search_cap)
    return d


def shortlex_nf(table: BallTable, e: Element) -> Word:
    return table.nf(e)


def is_shortlex(table: BallTable, w: Word) -> bool:
    e = table.structure.evaluate(w)
    if e not in table:
        raise OutsideTable(e)
    return table.nf(e) == tuple(w)


def sphere_counts(table: BallTable) -> list[int]:
    return table.sphere_counts()


@dataclass(frozen=True)
class _Lattice:
    """Exponent vectors over inverse-pair columns: a particular-solution
    builder and a basis of the relation lattice."""

    gen_images: tuple[Element, ...]
    p: list[list[int]]
    q: list[list[int]]
    diag: list[int]
    kernel: list[list[int]]


_lattice_cache: dict[AbelianStructure, _Lattice] = {}


def _lattice(structure: AbelianStructure) -> _Lattice:
    cached = _lattice_cache.get(structure)
    if cached is not None:
        return cached
    alphabet = structure.alphabet
    column_of, sign_of, _ = generator_columns(alphabet)
    ncol = max(column_of, default=-1) + 1
    gens = [None] * ncol
    for i in range(len(alphabet)):
        if sign_of[i] == 1:
            gens[column_of[i]] = structure.letter_image[i]
    r, k = structure.rank, len(structure.invariant_factors)
    rows = [list(g) for g in gens]
    for i, d in enumerate(structure.invariant_factors):
        row = [0] * (r + k)
        row[r + i] = d
        rows.append(row)
    d, p, q = smith_normal_form(rows, r + k)
    nrows = len(rows)
    diag = [d[i][i] if i < r + k else 0 for i in range(nrows)]
    kernel = [p[i][:ncol] for i in range(nrows) if diag[i] == 0]
    lat = _Lattice(tuple(gens), p, q, diag, kernel)
    _lattice_cache[structure] = lat
    return lat


def lattice_distance(structure: AbelianStructure, e: Element, cap: int = 10**6) -> int:
    """Exact word length of ``e``: the minimum of ``sum |t_j|`` over integer
    exponent vectors ``t`` (one entry per inverse pair) representing ``e``.

    Solutions form a coset ``t0 + R`` of the relation lattice; the optimum is
    found by enumerating ``R``-coefficients inside a provable bounding box.
    Raises ``CapExceeded`` if that box holds more than ``cap`` points.
    """
    lat = _lattice(structure)
    ncol = len(lat.gen_images)
    # particular solution of x N = e with N = [images; torsion moduli]
    eq = [sum(e[i] * lat.q[i][j] for i in range(len(e))) for j in range(len(lat.q[0]) if lat.q else 0)]
    y = [0] * len(lat.p)
    for j, dj in enumerate(lat.diag):
        if dj:
            if eq[j] % dj:
                raise ValueError(f"{e} is not in the span of the generators")
            y[j] = eq[j] // dj
    t0 = [sum(y[i] * lat.p[i][j] for i in range(len(y))) for j in range(ncol)]
    basis = lat.kernel
    if not basis:
        return sum(map(abs, t0))

    def norm(t):
        return sum(map(abs, t))

    # greedy descent shrinks t0 and hence the box
    improved = True
    while improved:
        improved = False
        for w in basis:
            for s in (1, -1):
                cand = [a + s * b for a, b in zip(t0, w)]
                if norm(cand) < norm(t0):
                    t0, improved = cand, True
    base = norm(t0)
    qdim = len(basis)
    cols = _pivot_columns(basis)
    sub = [[Fraction(w[c]) for c in cols] for w in basis]
    inv = _inverse(sub)
    # z = (t*_J - t0_J) W_J^{-1}, ||t*_J - t0_J||_1 <= 2 * base
    bounds = [int(2 * base * max(abs(inv[rr][cc]) for rr in range(qdim))) for cc in range(qdim)]
    count = 1
    for b in bounds:
        count *= 2 * b + 1
    if count > cap:
        raise CapExceeded(f"lattice search needs {count} points (cap {cap})")
    best = base
    for z in product(*(range(-b, b + 1) for b in bounds)):
        t = list(t0)
        for zi, w in zip(z, basis):
            if zi:
                for j in range(ncol):
                    t[j] += zi * w[j]
        n = norm(t)
        if n < best:
            best = n
    return best


def _pivot_columns(rows: list[list[int]]) -> list[int]:
    """Columns of a full-row-rank integer matrix forming an invertible minor."""
    chosen: list[int] = []
    for c in range(len(rows[0])):
        trial = chosen + [c]
        if _rank(rows, trial) == len(trial):
            chosen = trial
        if len(chosen) == len(rows):
            break
    if len(chosen) != len(rows) or determinant([[r[j] for j in chosen] for r in rows]) == 0:
        raise ArithmeticError("relation lattice basis is not of full row rank")
    return chosen


def _rank(rows, cols) -> int:
    m = [[Fraction(r[j]) for j in cols] for r in rows]
    rank = 0
    for c in range(len(cols)):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]
