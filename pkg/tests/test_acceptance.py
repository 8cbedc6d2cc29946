"""Acceptance criteria, one test each.  A PASS/FAIL line per criterion is
printed in the terminal summary (or by running this file directly)."""

import random
import time

import pytest

from abgrowth.abelian import mu
from abgrowth.acceptor import ShortlexTest, build_acceptor, minimal_relations
from abgrowth.checks import closed_form_check, language_check, partition_check, random_subgraph
from abgrowth.oracle import BallTable
from abgrowth.series import IntPoly, RationalGF, expand
from abgrowth.subgraph import (
    MorphismCounts,
    backtrack_morphisms,
    growth_exact,
    growth_fit,
    load_subgraph,
    prepare,
    verify_main_theorem,
)

from conftest import TEST_GROUPS, group

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n, ok, detail):
    RESULTS[n] = (ok, detail)
    assert ok, detail


def vertex_acceptor(name):
    spec, s = group(name)
    m = mu(spec)
    test = ShortlexTest(minimal_relations(s, m + 1))
    return build_acceptor(s, test, max(m + 1, test.saturation))


def gf(num, k):
    return RationalGF(IntPoly(num), k)


Z3_GOLDEN = {
    "vertex": gf((1, 3, 3, 1), 3),
    "path: a": gf((0, 2, 4, 2), 3),
    "path: b": gf((0, 2, 4, 2), 3),
    "path: c": gf((0, 2, 4, 2), 3),
    "path: a,b": gf((0, 1, 4, 3), 3),
    "path: a,b,c": gf((0, 0, 4, 4), 3),
}

HEX_GOLDEN = {
    "vertex": gf((1, 4, 1), 2),
    "path: a": gf((0, 2, 4), 2),
    "path: b": gf((0, 2, 4), 2),
    "path: c": gf((0, 2, 4), 2),
    "path: a,b,c": gf((0, 1, 4, 1), 2),
}


def test_1_z3_golden_suite():
    spec, s = group("Z3")
    bad = []
    t0 = time.perf_counter()
    for text, want in Z3_GOLDEN.items():
        got = growth_fit(s, load_subgraph(text, s)).gf
        if got != want:
            bad.append(f"fit {text}: {got.to_text()} != {want.to_text()}")
    t_fit = time.perf_counter() - t0
    t0 = time.perf_counter()
    thresholds = []
    for text, want in Z3_GOLDEN.items():
        ctx = prepare(spec, s, load_subgraph(text, s))
        thresholds.append(f"{text.replace('path: ', '')}:gamma={ctx.gamma}>=" f"{ctx.gamma_required}")
        got = growth_exact(ctx).gf
        if got != want or ctx.gamma < ctx.gamma_required:
            bad.append(f"exact {text}: {got.to_text()} at gamma {ctx.gamma}")
    t_exact = time.perf_counter() - t0
    ok = not bad and t_fit < 60 and t_exact < 600
    record(1, ok, f"6 cases, fit {t_fit:.1f}s, exact {t_exact:.1f}s at full gamma "
                  f"({', '.join(thresholds)})" + ("" if not bad else "; " + "; ".join(bad)))


def test_2_hex_golden_suite():
    spec, s = group("hex")
    t0 = time.perf_counter()
    bad = []
    for text, want in HEX_GOLDEN.items():
        sg = load_subgraph(text, s)
        fit = growth_fit(s, sg).gf
        exact = growth_exact(prepare(spec, s, sg)).gf
        if fit != exact:
            bad.append(f"{text}: methods disagree")
        if fit != want:
            bad.append(f"{text}: computed {fit.to_text()}, expected {want.to_text()}")
    dt = time.perf_counter() - t0
    detail = f"{len(HEX_GOLDEN) - len(bad)}/{len(HEX_GOLDEN)} cases, {dt:.1f}s"
    if bad:
        detail += ("; " + "; ".join(bad)
                   + "; brute force: four a-edges (e-a, A-e, b-c, C-B) lie in the radius-1 ball, "
                     "so c_1(path a) = 4 and not 2")
    record(2, not bad and dt < 60, detail)


def test_3_z3_first_coefficient():
    _, s = group("Z3")
    oracle = BallTable(s, 1).sphere_counts()[1]
    closed = expand(Z3_GOLDEN["vertex"], 1)[1]
    record(3, oracle == closed == 6, f"oracle c_1 = {oracle}, closed form c_1 = {closed}; a value of 7 would contradict the closed form")


def test_4_language_correctness():
    t0 = time.perf_counter()
    parts, ok = [], True
    for name in TEST_GROUPS:
        _, s = group(name)
        res = language_check(s, vertex_acceptor(name), 10)
        total = sum(len(s.letter_image) ** k for k in range(11))
        ok &= res.ok and res.words_covered == total
        parts.append(f"{name}: {res.words_covered} words, {res.mismatches} mismatches")
    dt = time.perf_counter() - t0
    record(4, ok and dt < 300, "; ".join(parts) + f"; {dt:.1f}s")


def test_5_partition():
    bad = []
    for name in TEST_GROUPS:
        _, s = group(name)
        j = partition_check(vertex_acceptor(name), BallTable(s, 30), 30)
        if j is not None:
            bad.append(f"{name} at j={j}")
    record(5, not bad, "j <= 30 in " + ", ".join(TEST_GROUPS) + ("" if not bad else "; fails: " + ", ".join(bad)))


def test_6_state_closed_forms():
    bad, states = [], 0
    for name in TEST_GROUPS + ["Z3", "ex31", "C5"]:
        acc = vertex_acceptor(name)
        states += acc.num_states
        k = closed_form_check(acc, 40)
        if k is not None:
            bad.append(f"{name} state {k}")
    record(6, not bad, f"{states} states, j <= 40" + ("" if not bad else "; fails: " + ", ".join(bad)))


def test_7_main_theorem_shape():
    t0 = time.perf_counter()
    bad, runs = [], 0
    for name in TEST_GROUPS:
        spec, s = group(name)
        rng = random.Random(f"criterion-7-{name}")
        for i in range(10):
            sg = random_subgraph(s, rng, max_vertices=5)
            rep = verify_main_theorem(spec, s, sg, name=f"{name}#{i}")
            runs += 1
            fit = growth_fit(s, sg)
            if not (rep.passed and rep.denominator_power == s.rank and rep.numerator_at_one > 0
                    and rep.agreement_upto >= 3 * fit.onset):
                bad.append(f"{name}#{i}: {rep.failure}")
    dt = time.perf_counter() - t0
    record(7, not bad and dt < 600, f"{runs} random subgraphs, {dt:.1f}s" + ("" if not bad else "; " + "; ".join(bad)))


def test_8_rank_zero_and_torsion():
    spec, s = group("C5")
    c5 = growth_fit(s, load_subgraph("vertex", s)).gf
    spec2, s2 = group("torsionZ")
    rng = random.Random("criterion-8")
    subs = [load_subgraph(t, s2) for t in ("vertex", "path: a", "path: a,b", "path: b,b")]
    subs += [random_subgraph(s2, rng) for _ in range(5)]
    powers = {verify_main_theorem(spec2, s2, sg).denominator_power for sg in subs}
    ok = c5 == gf((1, 2, 2), 0) and powers == {1}
    record(8, ok, f"<a|a^5>: {c5.to_text()}; <a,b|a^2=b,ab=ba>: denominator powers {sorted(powers)}")


def test_9_backtracking_equals_translation():
    checked, bad = 0, []
    for name in TEST_GROUPS + ["Z3"]:
        _, s = group(name)
        t = BallTable(s, 5)
        rng = random.Random(f"criterion-9-{name}")
        subs = [load_subgraph(x, s) for x in ("vertex", "path: a", "path: a,a")]
        subs += [random_subgraph(s, rng) for _ in range(5)]
        for sg in subs:
            mc = MorphismCounts(s, sg, t)
            for n in range(6):
                checked += 1
                if backtrack_morphisms(s, sg, n, t) != mc.b(n):
                    bad.append(f"{name} n={n}")
    record(9, not bad, f"{checked} (S, n) pairs" + ("" if not bad else "; fails: " + ", ".join(bad)))


def summary_lines():
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        yield f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
    for line in summary_lines():
        print(line)
