import json
import re

import numpy as np
import pytest

from abgrowth.acceptor import (
    FAILURE,
    INFINITE,
    NEVER,
    LetterClass,
    ShortlexTest,
    accepts,
    build_acceptor,
    export_dot,
    export_json,
    fellow_traveller_constant,
    forbidden_patterns,
    minimal_relations,
    path_profile,
    run,
    transition_matrix,
)
from abgrowth.abelian import mu

from conftest import group


def acceptor(name, gamma=None):
    spec, s = group(name)
    m = mu(spec)
    rels = minimal_relations(s, m + 1)
    test = ShortlexTest(rels)
    g = gamma if gamma is not None else max(m + 1, test.saturation)
    return s, build_acceptor(s, test, g)


def word(name, text):
    return group(name)[0].alphabet.parse_word(text)


def test_hex_minimal_relations():
    spec, s = group("hex")
    rels = {r.format(spec.alphabet) for r in minimal_relations(s, 8)}
    assert {"ab ~ c", "abC ~ e", "aA ~ e"} <= rels
    assert len(rels) == 11


def test_free_abelian_relations_are_cancellations():
    spec, s = group("Z2")
    rels = minimal_relations(s, 5)
    assert {r.format(spec.alphabet) for r in rels} == {"aA ~ e", "bB ~ e"}
    assert fellow_traveller_constant(rels) == 2


def test_kappa_floor():
    assert fellow_traveller_constant([]) == 1


def test_minimal_relations_are_equal_and_distinct(any_group):
    _, spec, s = any_group
    for r in minimal_relations(s, mu(spec) + 1):
        assert r.lhs != r.rhs
        lw = [i for i, k in enumerate(r.lhs) for _ in range(k)]
        rw = [i for i, k in enumerate(r.rhs) for _ in range(k)]
        assert s.evaluate(lw) == s.evaluate(rw)
        assert (sum(r.rhs), tuple(-x for x in r.rhs)) < (sum(r.lhs), tuple(-x for x in r.lhs))


def test_forbidden_patterns_are_antichain():
    _, s = group("hex")
    pats = forbidden_patterns(minimal_relations(s, 8))
    for p in pats:
        for q in pats:
            if p != q:
                assert not all(a <= b for a, b in zip(p, q))


def test_classification():
    _, s = group("Z2")
    t = ShortlexTest(minimal_relations(s, 5))
    assert t.classify((0, 0, 0, 0), 0) == INFINITE
    assert t.classify((2, 0, 0, 0), 1) == NEVER
    _, s = group("ex31")
    t = ShortlexTest(minimal_relations(s, 8))
    assert t.classify((0,) * 6, 0) == LetterClass("finite", 1)
    assert t.classify((0,) * 6, 2) == INFINITE


def test_gamma_must_exceed_mu():
    spec, s = group("hex")
    with pytest.raises(ValueError):
        build_acceptor(s, minimal_relations(s, 8), 7, mu=mu(spec))


@pytest.mark.parametrize("name", ["Z", "Z2", "hex", "ex31", "torsionZ", "C5"])
def test_cancellation_rejected(name):
    spec, s = group(name)
    _, acc = acceptor(name)
    for i in range(len(spec.alphabet)):
        assert run(acc, (i, spec.alphabet.inv(i))) == FAILURE
    assert run(acc, ()) == 0


def test_z2_words():
    _, acc = acceptor("Z2")
    assert accepts(acc, word("Z2", "aab"))
    assert not accepts(acc, word("Z2", "ba"))


def test_z_gamma_two():
    _, acc = acceptor("Z", gamma=2)
    assert acc.num_states == 5
    a = transition_matrix(acc)
    assert a.shape == (5, 5)
    assert a[0, 1] == a[0, 3] == 1
    assert a[2, 2] == a[4, 4] == 1
    assert a.sum() == 6
    prof = path_profile(acc, 2)
    assert (prof.path_length, prof.loop_count_plus_one) == (2, 2)
    assert (path_profile(acc, 0).path_length, path_profile(acc, 0).loop_count_plus_one) == (0, 1)


def test_single_loop_matrix():
    _, acc = acceptor("Z", gamma=1)
    sub = transition_matrix(acc)[1:2, 1:2]
    assert sub.tolist() == [[1]]


@pytest.mark.parametrize("name", ["Z", "Z2", "Z3", "hex", "ex31", "torsionZ", "C5"])
def test_tree_with_loops(name):
    _, acc = acceptor(name)
    incoming = np.zeros(acc.num_states, dtype=int)
    for s in range(acc.num_states):
        loops = 0
        for x, t in enumerate(acc.trans[s].tolist()):
            if t == s:
                loops += 1
                assert acc.label[s] == x
            elif t != FAILURE:
                incoming[t] += 1
                assert acc.parent[t] == s and acc.label[t] == x
        assert loops == int(acc.has_loop[s]) <= 1
    assert incoming[0] == 0 and (incoming[1:] == 1).all()


def test_loop_count_bounded_by_rank():
    s, acc = acceptor("Z3", gamma=3)
    worst = max(path_profile(acc, k).loop_count_plus_one - 1 for k in range(acc.num_states))
    assert worst == s.rank


def test_figure_shape():
    """Positive letters only: a single a-step, then b- and c-lines of length
    gamma ending in loops, with a c-line hanging off every b-state."""
    spec, s = group("ex31")
    for gamma in (8, 9):
        acc = build_acceptor(s, minimal_relations(s, 8), gamma)
        a, b, c = (spec.alphabet.index(x) for x in "abc")
        one_a = acc.trans[0, a]
        assert acc.trans[one_a, a] == FAILURE
        for x in (b, c):
            k = 0
            for _ in range(gamma):
                k = acc.trans[k, x]
            assert acc.trans[k, x] == k
        seen, stack = {0}, [0]
        while stack:
            u = stack.pop()
            for x in (a, b, c):
                v = int(acc.trans[u, x])
                if v != FAILURE and v not in seen:
                    seen.add(v)
                    stack.append(v)
        assert len(seen) == 2 + 4 * gamma + 2 * gamma * gamma


def test_dot_export_counts():
    _, acc = acceptor("Z", gamma=2)
    dot = export_dot(acc)
    nodes = re.findall(r"^\s*(s\d+|fail)\s*(?:\[|;)", dot, re.M)
    edges = re.findall(r"->", dot)
    assert len([n for n in nodes if n != "fail"]) == 5 and "fail" in nodes
    assert len(edges) == 5 * 2 + 2
    assert dot.startswith("digraph") and dot.rstrip().endswith("}")
    assert "fail" not in export_dot(acc, include_failure=False)


def test_json_export_deterministic():
    _, a1 = acceptor("hex")
    _, a2 = acceptor("hex")
    assert export_json(a1) == export_json(a2)
    doc = json.loads(export_json(a1))
    assert doc["states"] == a1.num_states
    assert len(doc["arrows"]) == a1.num_states - 1
