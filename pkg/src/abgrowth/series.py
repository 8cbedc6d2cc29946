"""Exact generating functions with denominators restricted to powers of (1 - z).

Also walk counting in the word acceptor and the closed forms for per-state
growth and tail sums.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .acceptor import FAILURE, Acceptor, StatePathProfile, path_profile


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = [int(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPoly":
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __call__(self, z: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "IntPoly") -> "IntPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self[i] + other[i] for i in range(n)))

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return self + (-other)

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        if isinstance(other, int):
            return IntPoly(tuple(other * c for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def shift(self, k: int) -> "IntPoly":
        return IntPoly((0,) * k + self.coeffs) if self.coeffs else self

    def truncate(self, n: int) -> "IntPoly":
        """Terms of degree below ``n``."""
        return IntPoly(self.coeffs[:n])

    def times_one_minus_z(self, k: int = 1) -> "IntPoly":
        c = list(self.coeffs)
        for _ in range(k):
            c = [a - b for a, b in zip(c + [0], [0] + c)]
        return IntPoly(tuple(c))

    def div_one_minus_z(self) -> "IntPoly":
        """Exact quotient by ``1 - z``; requires ``p(1) == 0``."""
        if self(1) != 0:
            raise ArithmeticError("(1 - z) does not divide the polynomial")
        out, acc = [], 0
        for c in self.coeffs[:-1]:
            acc += c
            out.append(acc)
        return IntPoly(tuple(out))

    def to_text(self, var: str = "z") -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            mag = abs(c)
            body = str(mag) if (mag != 1 or not mono) else ""
            body = body + mono
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class RationalGF:
    """``numerator / (1 - z)^denom_power`` in canonical (reduced) form."""

    numerator: IntPoly
    denom_power: int = 0

    def __post_init__(self):
        num, k = self.numerator, self.denom_power
        if not isinstance(num, IntPoly):
            num = IntPoly(tuple(num))
        if k < 0:
            raise ValueError("denominator power must be non-negative")
        if not num:
            k = 0
        while k > 0 and num(1) == 0:
            num = num.div_one_minus_z()
            k -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denom_power", k)

    @classmethod
    def poly(cls, coeffs: Sequence[int]) -> "RationalGF":
        return cls(IntPoly(tuple(coeffs)), 0)

    def __add__(self, other: "RationalGF | IntPoly | int") -> "RationalGF":
        return gf_add(self, other)

    def __sub__(self, other: "RationalGF") -> "RationalGF":
        return gf_add(self, gf_scale(other, -1))

    def __mul__(self, other: "RationalGF | IntPoly | int") -> "RationalGF":
        return gf_mul(self, other)

    def expand(self, n: int) -> list[int]:
        return expand(self, n)

    def to_text(self) -> str:
        num = self.numerator.to_text()
        if self.denom_power == 0:
            return num
        den = "(1 - z)" if self.denom_power == 1 else f"(1 - z)^{self.denom_power}"
        return f"({num}) / {den}"

    def to_latex(self) -> str:
        num = self.numerator.to_text().replace("*", "")
        num = _latex_powers(num)
        if self.denom_power == 0:
            return num
        den = "(1-z)" if self.denom_power == 1 else f"(1-z)^{{{self.denom_power}}}"
        return f"\\frac{{{num}}}{{{den}}}"


def _latex_powers(text: str) -> str:
    import re

    return re.sub(r"\^(\d+)", r"^{\1}", text)


def _as_gf(x: "RationalGF | IntPoly | int") -> RationalGF:
    if isinstance(x, RationalGF):
        return x
    if isinstance(x, IntPoly):
        return RationalGF(x, 0)
    if isinstance(x, int):
        return RationalGF(IntPoly((x,)), 0)
    raise TypeError(f"cannot treat {type(x).__name__} as a generating function")


def gf_add(f, g) -> RationalGF:
    f, g = _as_gf(f), _as_gf(g)
    k = max(f.denom_power, g.denom_power)
    num = f.numerator.times_one_minus_z(k - f.denom_power) + g.numerator.times_one_minus_z(k - g.denom_power)
    return RationalGF(num, k)


def gf_mul(f, g) -> RationalGF:
    f, g = _as_gf(f), _as_gf(g)
    return RationalGF(f.numerator * g.numerator, f.denom_power + g.denom_power)


def gf_scale(f, c) -> RationalGF:
    """Multiply by an integer or a polynomial."""
    return gf_mul(f, c)


def gf_sum(terms: Iterable[RationalGF]) -> RationalGF:
    """Sum many terms over one common denominator."""
    by_power: dict[int, IntPoly] = {}
    for t in terms:
        by_power[t.denom_power] = by_power.get(t.denom_power, IntPoly()) + t.numerator
    if not by_power:
        return RationalGF(IntPoly())
    k = max(by_power)
    num = IntPoly()
    for p, poly in by_power.items():
        num = num + poly.times_one_minus_z(k - p)
    return RationalGF(num, k)


def inverse_power_coeff(k: int, j: int) -> int:
    """Coefficient of ``z^j`` in ``1 / (1 - z)^k``."""
    if j < 0:
        return 0
    if k == 0:
        return int(j == 0)
    return comb(j + k - 1, k - 1)


def expand(gf: RationalGF, n: int) -> list[int]:
    """Taylor coefficients ``c_0 .. c_n``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    num = gf.numerator.coeffs
    k = gf.denom_power
    base = [inverse_power_coeff(k, j) for j in range(n + 1)]
    out = [0] * (n + 1)
    for i, a in enumerate(num[: n + 1]):
        if a:
            for j in range(n + 1 - i):
                out[i + j] += a * base[j]
    return out


def from_coefficients(coeffs: Sequence[int]) -> RationalGF:
    return RationalGF.poly(coeffs)


def state_growth(profile: StatePathProfile) -> RationalGF:
    """Generating function of walks from the start state to the profiled state."""
    return RationalGF(IntPoly.monomial(profile.path_length), profile.loop_count_plus_one - 1)


def tail_series(eta1: int, eta2: int, profile: StatePathProfile) -> RationalGF:
    """``sum_{j >= eta1} z^eta2 * (walks of length j to the state) * z^j``.

    Uses the reduced chain of looped states: after ``s`` forced steps the
    chain's start row of ``B^s`` is ``C(s-1, i-2)``, giving terms
    ``C(s-1, m-p) z^q / (1-z)^p`` with a leading coefficient of 1 at
    ``p = m``.
    """
    if eta1 < 1:
        raise ValueError("eta1 must be at least 1")
    l = profile.path_length
    m = profile.loop_count_plus_one - 1
    if m == 0:
        return RationalGF(IntPoly.monomial(l + eta2) if l >= eta1 else IntPoly())
    offset = l - m  # eliminated loopless states
    s = eta1 - offset
    if s <= 0:
        return RationalGF(IntPoly.monomial(eta2 + l), m)
    terms = []
    for p in range(1, m + 1):
        c = comb(s - 1, m - p)
        if c:
            terms.append(RationalGF(IntPoly.monomial(eta2 + offset + s + p - 1, c), p))
    return gf_sum(terms)


def walk_count(a, j: int, k: int) -> int:
    """Number of ``j``-walks from the start state to state ``k``.

    ``a`` is an :class:`Acceptor` or a square integer matrix; in the matrix
    case the start state is row 0 and the count is built by repeated
    vector-matrix products.
    """
    if isinstance(a, Acceptor):
        return walk_count_table(a, j)[j][k]
    rows = [list(map(int, r)) for r in a]
    m = len(rows)
    v = [0] * m
    v[0] = 1
    for _ in range(j):
        nv = [0] * m
        for s, vs in enumerate(v):
            if vs:
                for t, c in enumerate(rows[s]):
                    if c:
                        nv[t] += vs * c
        v = nv
    return v[k]


def walk_count_table(acceptor: Acceptor, n: int) -> list[list[int]]:
    """``table[j][k]`` = number of ``j``-walks from the start to state ``k``.

    Every non-start accept state has one incoming arrow (from its tree
    parent) and possibly a loop, so one step is a gather plus a diagonal term.
    """
    parent = acceptor.parent.copy()
    parent[0] = 0
    loop = acceptor.has_loop
    m = acceptor.num_states
    v = np.zeros(m, dtype=object)
    v[0] = 1
    out = [v.tolist()]
    for _ in range(n):
        nv = v[parent]
        nv[loop] += v[loop]
        nv[0] = 0
        out.append(nv.tolist())
        v = nv
    return out


def vertex_growth(acceptor: Acceptor) -> RationalGF:
    """Sum of per-state growth over all accept states."""
    counts = Counter()
    for k in range(acceptor.num_states):
        prof = path_profile(acceptor, k)
        counts[(prof.path_length, prof.loop_count_plus_one - 1)] += 1
    return gf_sum(RationalGF(IntPoly.monomial(l, c), m) for (l, m), c in counts.items())


def profiles(acceptor: Acceptor) -> list[StatePathProfile]:
    """Path profiles of all accept states in one pass over the tree."""
    out: list[StatePathProfile] = []
    loops_on_path: list[tuple[int, ...]] = []
    depth = acceptor.depth.tolist()
    parent = acceptor.parent.tolist()
    has_loop = acceptor.has_loop.tolist()
    for k in range(acceptor.num_states):
        base = loops_on_path[parent[k]] if k else ()
        here = base + ((depth[k],) if has_loop[k] else ())
        loops_on_path.append(here)
        out.append(StatePathProfile(k, depth[k], len(here) + 1, here))
    return out


def format_coefficients(coeffs: Sequence[int]) -> str:
    return "(" + ", ".join(str(c) for c in coeffs) + ")"


__all__ = [
    "FAILURE",
    "IntPoly",
    "RationalGF",
    "expand",
    "format_coefficients",
    "from_coefficients",
    "gf_add",
    "gf_mul",
    "gf_scale",
    "gf_sum",
    "profiles",
    "state_growth",
    "tail_series",
    "vertex_growth",
    "walk_count",
    "walk_count_table",
]
