"""Growth functions C(S, z) for finite connected labelled subgraphs S.

Morphisms of a connected S into the Cayley graph of an abelian group are
the translates ``v -> g + (v - p)``, one per choice ``g`` of image of the
base point.  ``c_n(S)`` therefore counts the ``g`` whose farthest translated
vertex lies at distance exactly ``n``.  Three routes to C(S, z) are offered:
raw counts, the exact acceptor-based assembly, and a fit of the
``(1 - z)^rank`` ansatz that is checked against every computed coefficient.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .abelian import AbelianStructure, Element, GroupSpec, mu as relator_mu
from .acceptor import Acceptor, ShortlexTest, StatePathProfile, build_acceptor, fellow_traveller_constant, minimal_relations
from .kernels import CapExceeded
from .oracle import BallTable, OutsideTable, lattice_distance
from .series import IntPoly, RationalGF, expand, gf_sum, profiles, tail_series


class SubgraphError(ValueError):
    """Invalid subgraph description."""


class ConsistencyError(RuntimeError):
    """Internal cross-check failed (a bug or undersized bounds)."""


class Inconclusive(RuntimeError):
    """The fit did not stabilize within the resource cap."""


@dataclass(frozen=True)
class Subgraph:
    """Vertices as group elements (base point first) and labelled edges
    ``(source index, letter, target index)``."""

    vertices: tuple[Element, ...]
    edges: tuple[tuple[int, int, int], ...]
    names: tuple[str, ...] = ()
    base: int = 0


def offsets(structure: AbelianStructure, s: Subgraph) -> list[Element]:
    p = s.vertices[s.base]
    return [structure.sub(v, p) for v in s.vertices]


def _validated(structure: AbelianStructure, vertices, edges, names, base) -> Subgraph:
    if not vertices:
        raise SubgraphError("empty subgraph")
    if len(set(vertices)) != len(vertices):
        raise SubgraphError("two vertices denote the same group element")
    for u, x, v in edges:
        if structure.add(vertices[u], structure.letter_image[x]) != vertices[v]:
            raise SubgraphError(
                f"edge {names[u]} -{structure.alphabet.letters[x].symbol}-> {names[v]} "
                "is inconsistent with its endpoints"
            )
    adj = defaultdict(set)
    for u, _, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {base}
    stack = [base]
    while stack:
        u = stack.pop()
        for w in adj[u] - seen:
            seen.add(w)
            stack.append(w)
    if len(seen) != len(vertices):
        raise SubgraphError("subgraph is disconnected")
    return Subgraph(tuple(vertices), tuple(edges), tuple(names), base)


def path_subgraph(structure: AbelianStructure, letters: Sequence[str]) -> Subgraph:
    alphabet = structure.alphabet
    word: list[int] = []
    vertices = [structure.identity]
    names = ["e"]
    edges = []
    for i, sym in enumerate(letters):
        try:
            x = alphabet.index(sym)
        except KeyError:
            raise SubgraphError(f"unknown letter {sym!r} in path") from None
        word.append(x)
        vertices.append(structure.evaluate(word))
        names.append(alphabet.format_word(tuple(word)))
        edges.append((i, x, i + 1))
    return _validated(structure, vertices, edges, names, 0)


def vertex_subgraph(structure: AbelianStructure) -> Subgraph:
    return Subgraph((structure.identity,), (), ("e",), 0)


def load_subgraph(text: str, structure: AbelianStructure) -> Subgraph:
    """Parse ``vertex``, ``path: a,b,c`` or the JSON forms
    ``{"path": [...]}`` / ``{"base": w, "vertices": [...], "edges": [...]}``."""
    src = text.strip()
    if src.startswith("{"):
        try:
            doc = json.loads(src)
        except json.JSONDecodeError as exc:
            raise SubgraphError(f"invalid JSON: {exc.msg}") from None
        if "path" in doc:
            return path_subgraph(structure, [str(x) for x in doc["path"]])
        return _explicit(structure, doc)
    if src == "vertex":
        return vertex_subgraph(structure)
    if src.startswith("path"):
        body = src[4:].lstrip(" :")
        letters = [x.strip() for x in body.split(",") if x.strip()]
        if not letters:
            return vertex_subgraph(structure)
        return path_subgraph(structure, letters)
    raise SubgraphError(f"unrecognized subgraph description {src[:40]!r}")


def _explicit(structure: AbelianStructure, doc: dict) -> Subgraph:
    alphabet = structure.alphabet
    try:
        words = [str(w) for w in doc["vertices"]]
        base_word = str(doc.get("base", words[0] if words else ""))
        raw_edges = doc.get("edges", [])
    except (KeyError, TypeError) as exc:
        raise SubgraphError(f"bad subgraph document: {exc}") from None
    if not words:
        raise SubgraphError("empty subgraph")

    def elem(w: str) -> Element:
        if w in ("", "e"):
            return structure.identity
        try:
            return structure.evaluate(alphabet.parse_word(w))
        except ValueError as exc:
            raise SubgraphError(str(exc)) from None

    vertices = [elem(w) for w in words]
    index = {}
    for i, e in enumerate(vertices):
        if e in index:
            raise SubgraphError(f"vertices {words[index[e]]!r} and {words[i]!r} denote the same element")
        index[e] = i
    b = elem(base_word)
    if b not in index:
        raise SubgraphError("base point is not a vertex")
    edges = []
    for item in raw_edges:
        try:
            u, x, v = item
            xi = alphabet.index(str(x))
        except (ValueError, TypeError, KeyError):
            raise SubgraphError(f"bad edge {item!r}") from None
        eu, ev = elem(str(u)), elem(str(v))
        if eu not in index or ev not in index:
            raise SubgraphError(f"edge {item!r} touches a non-vertex")
        edges.append((index[eu], xi, index[ev]))
    return _validated(structure, vertices, edges, words, index[b])


def diameter(structure: AbelianStructure, s: Subgraph) -> int:
    """Largest Cayley-graph distance between two vertices of ``s``."""
    best = 0
    for i, u in enumerate(s.vertices):
        for v in s.vertices[i + 1:]:
            best = max(best, lattice_distance(structure, structure.sub(v, u)))
    return best


class MorphismCounts:
    """Translation counting over one enumerated ball.

    ``far[i]`` is the largest distance of a translated vertex when the base
    point goes to the ``i``-th ball element, or -1 beyond the ball.
    """

    def __init__(self, structure: AbelianStructure, s: Subgraph, table: BallTable):
        self.structure = structure
        self.subgraph = s
        self.table = table
        self.far = kernels.max_offset_distance(
            table.dist, table.extents, table.shift, table.wrap, table.order,
            [list(o) for o in offsets(structure, s)],
        )

    @property
    def radius(self) -> int:
        return self.table.radius

    def c_series(self, n: int | None = None) -> list[int]:
        n = self.radius if n is None else n
        if n > self.radius:
            raise OutsideTable(f"need radius {n}, table has {self.radius}")
        hit = self.far[(self.far >= 0) & (self.far <= n)]
        return np.bincount(hit, minlength=n + 1).tolist()

    def b(self, n: int) -> int:
        return sum(self.c_series(n))

    def by_final_state(self, n: int) -> Counter:
        if self.table.state is None:
            raise ValueError("table was built without acceptor tracking")
        if n > self.radius:
            raise OutsideTable(f"need radius {n}, table has {self.radius}")
        states = self.table.state[self.table.order]
        sel = self.far == n
        uniq, cnt = np.unique(states[sel], return_counts=True)
        return Counter(dict(zip(uniq.tolist(), cnt.tolist())))

    def state_histogram(self, n_max: int) -> dict[int, Counter]:
        """``{n: Counter(state -> count)}`` for all ``n <= n_max``."""
        states = self.table.state[self.table.order]
        sel = (self.far >= 0) & (self.far <= n_max)
        keys = self.far[sel].astype(np.int64) * (int(states.max(initial=0)) + 1) + states[sel]
        uniq, cnt = np.unique(keys, return_counts=True)
        width = int(states.max(initial=0)) + 1
        out: dict[int, Counter] = defaultdict(Counter)
        for k, c in zip(uniq.tolist(), cnt.tolist()):
            out[k // width][k % width] = c
        return out


def count_morphisms(structure: AbelianStructure, s: Subgraph, n: int, table: BallTable) -> int:
    """``b_n(S)``: morphisms of ``S`` into the ball of radius ``n``."""
    return MorphismCounts(structure, s, table).b(n)


def c_series(structure: AbelianStructure, s: Subgraph, n: int, table: BallTable | None = None) -> list[int]:
    table = table if table is not None else BallTable(structure, n)
    return MorphismCounts(structure, s, table).c_series(n)


def count_by_final_state(structure: AbelianStructure, s: Subgraph, n: int, table: BallTable) -> Counter:
    return MorphismCounts(structure, s, table).by_final_state(n)


def backtrack_morphisms(structure: AbelianStructure, s: Subgraph, n: int, table: BallTable) -> int:
    """Count morphisms into the radius-``n`` ball by direct search: choose the
    base image, then extend along edges through matching Cayley edges."""
    if n > table.radius:
        raise OutsideTable(f"need radius {n}, table has {table.radius}")
    images = structure.letter_image
    nletters = len(images)
    adj = defaultdict(list)
    for u, x, v in s.edges:
        adj[u].append((x, v, +1))
        adj[v].append((x, u, -1))

    def in_ball(e) -> bool:
        d = table.distance(e)
        return d is not None and d <= n

    def extend(assign: dict[int, Element]) -> int:
        # pick an edge with exactly one assigned end, or check closure
        for u, x, v in s.edges:
            if u in assign and v in assign:
                if structure.add(assign[u], images[x]) != assign[v]:
                    return 0
        pending = [(u, x, v, sgn) for u in assign for (x, v, sgn) in adj[u] if v not in assign]
        if not pending:
            return 1 if len(assign) == len(s.vertices) else 0
        u, x, v, sgn = pending[0]
        total = 0
        for y in range(nletters):
            if y != x:
                continue
            # the Cayley edge labelled y at assign[u], followed forwards or backwards
            cand = structure.add(assign[u], images[y]) if sgn > 0 else structure.sub(assign[u], images[y])
            if in_ball(cand):
                assign[v] = cand
                total += extend(assign)
                del assign[v]
        return total

    count = 0
    for g in table.elements():
        if table.distance(g) > n:
            break
        count += extend({s.base: g})
    return count


def b_from_c(gf: RationalGF) -> RationalGF:
    """Ball series from sphere series: ``B = C / (1 - z)``."""
    return RationalGF(gf.numerator, gf.denom_power + 1)


def c_from_b(gf: RationalGF) -> RationalGF:
    return RationalGF(gf.numerator.times_one_minus_z(), gf.denom_power)


@dataclass
class GrowthContext:
    """Everything the exact assembly needs for one (group, subgraph) pair."""

    structure: AbelianStructure
    subgraph: Subgraph
    mu: int
    kappa: int
    diameter: int
    gamma: int
    acceptor: Acceptor

    @property
    def threshold(self) -> int:
        """``gamma * |Sigma| + d``: beyond it counts follow acceptor walks."""
        return self.gamma * len(self.structure.alphabet) + self.diameter

    @property
    def gamma_required(self) -> int:
        return self.diameter * self.kappa + self.mu + 1


def default_gamma(d: int, kappa: int, mu: int) -> int:
    return d * kappa + mu + 1


def prepare(spec: GroupSpec, structure: AbelianStructure, s: Subgraph, gamma: int | None = None,
            exponent_bound: int | None = None) -> GrowthContext:
    m = relator_mu(spec)
    rels = minimal_relations(structure, exponent_bound if exponent_bound is not None else m + 1)
    kappa = fellow_traveller_constant(rels)
    d = diameter(structure, s)
    test = ShortlexTest(rels)
    g = gamma if gamma is not None else max(default_gamma(d, kappa, m), test.saturation)
    acc = build_acceptor(structure, test, g, mu=m)
    return GrowthContext(structure, s, m, kappa, d, g, acc)


def delta_offsets(ctx: GrowthContext, table: BallTable, search_cap: int = 10**6) -> dict[int, int]:
    """Per-state offset between the farthest translated vertex and the base
    point, read off a pumped witness for every state whose tree path carries
    a loop.  Loop-free states never host morphisms beyond the threshold and
    are omitted."""
    st = ctx.structure
    acc = ctx.acceptor
    offs = offsets(st, ctx.subgraph)
    target = ctx.threshold + 1
    out: dict[int, int] = {}

    def dist(e):
        d = table.distance(e)
        return d if d is not None else lattice_distance(st, e, search_cap)

    for prof in profiles(acc):
        m = prof.loop_count_plus_one - 1
        if m == 0:
            continue
        k = prof.state
        extra = max(0, -(-(target - prof.path_length) // m))
        exps = list(acc.exponents[k])
        for pos in prof.loop_positions:
            exps[int(acc.label[acc.path(k)[pos]])] += extra
        g = st.evaluate(i for i, r in enumerate(exps) for _ in range(r))
        length = prof.path_length + m * extra
        dg = dist(g)
        if dg != length:
            raise ConsistencyError(
                f"witness for state {k} has word length {length} but distance {dg}"
            )
        far = max(dist(st.add(g, o)) for o in offs)
        out[k] = far - dg
    return out


@dataclass
class ExactResult:
    gf: RationalGF
    threshold: int
    deltas: dict[int, int]
    window_checked: int
    counts: list[int]


def growth_exact(ctx: GrowthContext, window: int = 2, table: BallTable | None = None) -> ExactResult:
    """Assemble C(S, z) from brute-force counts up to the threshold plus one
    tail sum per acceptor state, then confirm the tails on a window of
    further radii."""
    st = ctx.structure
    n0 = ctx.threshold
    radius = n0 + max(window, ctx.diameter + st.rank + 1)
    if table is None or table.radius < radius or table.state is None:
        table = BallTable(st, radius, trans=ctx.acceptor.trans)
    mc = MorphismCounts(st, ctx.subgraph, table)
    if np.any(table.state[table.order] < 0):
        raise ConsistencyError("acceptor rejects a shortlex normal form")
    counts = mc.c_series(n0 + window)
    deltas = delta_offsets(ctx, table)
    profs = profiles(ctx.acceptor)

    head = RationalGF(IntPoly(tuple(counts[: n0 + 1])))
    groups = Counter()
    for k, delta in deltas.items():
        p = profs[k]
        groups[(p.path_length, p.loop_count_plus_one, delta)] += 1
    tails = []
    for (l, kp, delta), mult in groups.items():
        t = tail_series(n0 + 1 - delta, delta, StatePathProfile(-1, l, kp, ()))
        tails.append(t * mult)
    gf = gf_sum([head] + tails)

    # window: c_j(state) must equal walks of length j - delta into the state
    hist = mc.state_histogram(n0 + window)
    for j in range(n0 + 1, n0 + window + 1):
        observed = hist.get(j, Counter())
        for k, c in observed.items():
            if k not in deltas:
                raise ConsistencyError(f"radius {j}: loop-free state {k} hosts {c} morphisms")
        for k, delta in deltas.items():
            p = profs[k]
            mloops = p.loop_count_plus_one - 1
            steps = j - delta - p.path_length
            predicted = math.comb(steps + mloops - 1, mloops - 1) if steps >= 0 else 0
            if observed.get(k, 0) != predicted:
                raise ConsistencyError(
                    f"radius {j}, state {k}: {observed.get(k, 0)} morphisms, "
                    f"{predicted} walks of length {j - delta}"
                )
    expected = expand(gf, n0 + window)
    if expected != counts:
        first = next(i for i, (a, b) in enumerate(zip(expected, counts)) if a != b)
        raise ConsistencyError(f"assembled series disagrees with counts at z^{first}")
    _check_shape(gf, st.rank)
    return ExactResult(gf, n0, deltas, window, counts)


def _check_shape(gf: RationalGF, rank: int) -> None:
    if gf.denom_power != rank:
        raise ConsistencyError(f"denominator (1 - z)^{gf.denom_power}, expected (1 - z)^{rank}")
    if gf.denom_power and gf.numerator(1) <= 0:
        raise ConsistencyError("numerator does not stay positive at z = 1")


@dataclass
class FitResult:
    gf: RationalGF
    onset: int
    computed: int
    counts: list[int]


def growth_fit(structure: AbelianStructure, s: Subgraph, window: int | None = None,
               start: int = 8, max_radius: int | None = None) -> FitResult:
    """Fit ``P(z) / (1 - z)^rank`` to brute-force counts.

    Radii double until the last ``window`` coefficients of
    ``(1 - z)^rank * C(z)`` vanish; the numerator is then the truncated
    product and is checked to reproduce every computed coefficient.
    """
    r = structure.rank
    window = window if window is not None else 2 * r + 4
    n = max(start, window + 1)
    while True:
        if max_radius is not None and n > max_radius:
            raise Inconclusive(f"no stabilization up to radius {max_radius}")
        try:
            counts = c_series(structure, s, n)
        except CapExceeded as exc:
            raise Inconclusive(f"no stabilization before the resource cap ({exc})") from None
        num = IntPoly(tuple(counts)).times_one_minus_z(r).coeffs[: n + 1]
        num = list(num) + [0] * (n + 1 - len(num))
        if not any(num[n + 1 - window:]):
            numerator = IntPoly(tuple(num))
            gf = RationalGF(numerator, r)
            if expand(gf, n) != counts:
                raise ConsistencyError("fitted numerator does not reproduce the counts")
            onset = int(numerator.degree) + 1 if numerator else 0
            return FitResult(gf, onset, n, counts)
        n *= 2


@dataclass
class GrowthReport:
    group: str
    rank: int
    subgraph: str
    mu: int
    kappa: int
    diameter: int
    gamma: int
    gamma_required: int
    threshold: int
    methods: dict[str, str] = field(default_factory=dict)
    coefficients: list[int] = field(default_factory=list)
    agreement_upto: int = -1
    denominator_power: int = -1
    numerator_at_one: int = 0
    realizable_states: int = 0
    passed: bool = False
    failure: str | None = None
    first_mismatch: int | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [
            f"group: {self.group}",
            f"subgraph: {self.subgraph}",
            f"mu = {self.mu}, kappa = {self.kappa}, d = {self.diameter}, "
            f"gamma = {self.gamma} (needs > d*kappa + mu = {self.gamma_required - 1})",
        ]
        for name, text in self.methods.items():
            lines.append(f"C(S,z) [{name}] = {text}")
        lines.append("coefficients: " + "(" + ", ".join(map(str, self.coefficients)) + ")")
        verdict = "PASS" if self.passed else f"FAIL: {self.failure}"
        lines.append(f"denominator (1 - z)^{self.denominator_power}, rank {self.rank}: {verdict}")
        return "\n".join(lines) + "\n"


def verify_main_theorem(spec: GroupSpec, structure: AbelianStructure, s: Subgraph, *,
                        exact: bool = True, gamma: int | None = None,
                        window: int | None = None, name: str = "S") -> GrowthReport:
    """Run every available method and check that they agree coefficientwise
    and that the reduced denominator is ``(1 - z)^rank``."""
    ctx = prepare(spec, structure, s, gamma=gamma) if exact else None
    m = relator_mu(spec)
    d = diameter(structure, s)
    report = GrowthReport(
        group=structure.describe(), rank=structure.rank, subgraph=name, mu=m,
        kappa=ctx.kappa if ctx else fellow_traveller_constant(minimal_relations(structure, m + 1)),
        diameter=d, gamma=ctx.gamma if ctx else 0,
        gamma_required=ctx.gamma_required if ctx else 0,
        threshold=ctx.threshold if ctx else 0,
    )
    gfs: dict[str, RationalGF] = {}
    try:
        fit = growth_fit(structure, s, window=window)
        gfs["fit"] = fit.gf
        if ctx is not None:
            ex = growth_exact(ctx)
            gfs["exact"] = ex.gf
            report.realizable_states = len(ex.deltas)
        check_n = max(3 * fit.onset, fit.computed, report.threshold + 2)
        raw = c_series(structure, s, check_n)
    except (ConsistencyError, Inconclusive) as exc:
        report.failure = str(exc)
        return report
    report.coefficients = raw
    for k, gf in gfs.items():
        report.methods[k] = gf.to_text()
    report.agreement_upto = check_n
    for k, gf in gfs.items():
        got = expand(gf, check_n)
        if got != raw:
            report.first_mismatch = next(i for i, (a, b) in enumerate(zip(got, raw)) if a != b)
            report.failure = f"{k} disagrees with brute force at z^{report.first_mismatch}"
            return report
    if len(set(gfs.values())) > 1:
        report.failure = "methods give different closed forms"
        return report
    gf = gfs["fit"]
    report.denominator_power = gf.denom_power
    report.numerator_at_one = gf.numerator(1)
    try:
        _check_shape(gf, structure.rank)
    except ConsistencyError as exc:
        report.failure = str(exc)
        return report
    report.passed = True
    return report
