import csv
import io
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abgrowth.kernels import CapExceeded
from abgrowth.oracle import (
    BallTable,
    OutsideTable,
    geodesic_length,
    is_shortlex,
    lattice_distance,
    shortlex_nf,
    sphere_counts,
)

from conftest import GROUPS, group


def table(name, n):
    return BallTable(group(name)[1], n)


@pytest.mark.parametrize("name, n, counts", [
    ("Z", 4, [1, 2, 2, 2, 2]),
    ("hex", 3, [1, 6, 12, 18]),
    ("Z3", 3, [1, 6, 18, 38]),
    ("C5", 4, [1, 2, 2, 0, 0]),
    ("torsionZ", 3, [1, 4, 4, 4]),
])
def test_sphere_counts(name, n, counts):
    assert sphere_counts(table(name, n)) == counts


def test_z_ball():
    t = table("Z", 3)
    assert len(t) == 7
    assert sorted(t.distance(e) for e in t.elements()) == [0, 1, 1, 2, 2, 3, 3]


@pytest.mark.parametrize("name, word, d", [
    ("hex", "", 0), ("hex", "ab", 1), ("Z3", "ab", 2), ("ex31", "aa", 1), ("Z2", "aaBB", 4),
])
def test_geodesic_length(name, word, d):
    spec, s = group(name)
    t = BallTable(s, 5)
    assert geodesic_length(t, s.evaluate(spec.alphabet.parse_word(word))) == d


@pytest.mark.parametrize("name, word, nf", [
    ("hex", "ab", "c"), ("Z2", "ba", "ab"), ("ex31", "aa", "b"), ("Z3", "cba", "abc"),
])
def test_shortlex_nf(name, word, nf):
    spec, s = group(name)
    t = BallTable(s, 4)
    p = spec.alphabet.parse_word
    assert shortlex_nf(t, s.evaluate(p(word))) == p(nf)


def test_is_shortlex():
    spec, s = group("Z2")
    t = BallTable(s, 3)
    assert is_shortlex(t, ())
    assert not is_shortlex(t, spec.alphabet.parse_word("ba"))
    spec, s = group("ex31")
    assert not is_shortlex(BallTable(s, 3), spec.alphabet.parse_word("aa"))


def exhaustive_nfs(name, length):
    """Independent oracle: the shortlex-least word per element, by listing
    every word in shortlex order."""
    spec, s = group(name)
    n = len(spec.alphabet)
    best = {}
    for k in range(length + 1):
        for w in product(range(n), repeat=k):
            best.setdefault(s.evaluate(w), w)
    return s, best


@pytest.mark.parametrize("name, length", [
    ("Z", 6), ("Z2", 5), ("hex", 4), ("ex31", 4), ("torsionZ", 5), ("C5", 5),
])
def test_nf_matches_exhaustive_search(name, length):
    s, best = exhaustive_nfs(name, length)
    t = BallTable(s, length)
    inside = {e: w for e, w in best.items() if len(w) <= length}
    assert {e: t.nf(e) for e in t.elements()} == inside
    # shortlex order of elements() follows the normal forms
    words = [t.nf(e) for e in t.elements()]
    assert words == sorted(words, key=lambda w: (len(w), w))


@pytest.mark.parametrize("name", ["Z2", "hex", "ex31", "torsionZ"])
def test_prefix_closure(name):
    t = table(name, 5)
    for e in t.elements():
        w = t.nf(e)
        for k in range(len(w)):
            assert is_shortlex(t, w[:k])


def test_balls_nest():
    small, big = table("hex", 3), table("hex", 6)
    for e in small.elements():
        assert big.distance(e) == small.distance(e)
        assert big.nf(e) == small.nf(e)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["Z2", "hex", "ex31", "torsionZ", "Z3"]), st.data())
def test_triangle_inequality(name, data):
    _, s = group(name)
    t = BallTable(s, 8)
    n = len(s.letter_image)
    w1 = data.draw(st.lists(st.integers(0, n - 1), max_size=4))
    w2 = data.draw(st.lists(st.integers(0, n - 1), max_size=4))
    g, h = s.evaluate(w1), s.evaluate(w2)
    assert t.distance(s.add(g, h)) <= t.distance(g) + t.distance(h)
    assert t.distance(g) <= len(w1)
    assert t.distance(s.sub(s.identity, g)) == t.distance(g)


@pytest.mark.parametrize("name", ["Z", "Z2", "Z3", "hex", "ex31", "torsionZ", "C5"])
def test_lattice_distance_agrees_with_bfs(name):
    _, s = group(name)
    t = BallTable(s, 6)
    for e in t.elements():
        assert lattice_distance(s, e) == t.distance(e)


def test_geodesic_length_outside_table():
    spec, s = group("hex")
    t = BallTable(s, 2)
    e = s.evaluate(spec.alphabet.parse_word("aaaaabbb"))
    assert geodesic_length(t, e) is None
    assert geodesic_length(t, e, search_cap=10**5) == 5
    with pytest.raises(OutsideTable):
        t.nf(e)


def test_cap_exceeded():
    _, s = group("Z3")
    with pytest.raises(CapExceeded):
        BallTable(s, 10, cap=50)


def test_csv_dump():
    t = table("Z2", 2)
    rows = list(csv.reader(io.StringIO(t.to_csv())))
    assert rows[0] == ["x0", "x1", "distance", "nf"]
    assert len(rows) == 1 + 13
    assert rows[1][-2:] == ["0", ""]
    assert [r[-1] for r in rows[2:6]] == ["a", "A", "b", "B"]
