from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from aromatree.linear import LinComb
from aromatree.trees import (
    LEAF,
    PlanarTree,
    canonical_encode,
    enumerate_np_trees,
    enumerate_trees,
    forget_planarity,
    graft_at,
    left_graft_tree,
    parse_tree,
    tree,
)


@lru_cache(maxsize=None)
def catalan(n: int) -> int:
    # independent oracle: C(0)=1, C(n+1) = sum C(i) C(n-i)
    if n == 0:
        return 1
    return sum(catalan(i) * catalan(n - 1 - i) for i in range(n))


@lru_cache(maxsize=None)
def rooted_tree_count(n: int) -> int:
    # independent oracle: OEIS-style recurrence via the sum-of-divisors convolution
    # a(1)=1, n*a(n+1) = sum_{k=1..n} ( sum_{d|k} d*a(d) ) * a(n-k+1)
    if n <= 1:
        return 1 if n == 1 else 0
    total = 0
    for k in range(1, n):
        inner = sum(d * rooted_tree_count(d) for d in range(1, k + 1) if k % d == 0)
        total += inner * rooted_tree_count(n - k)
    assert total % (n - 1) == 0
    return total // (n - 1)


CHAIN2 = parse_tree("*[*]")


def test_encode_basics():
    assert canonical_encode(LEAF) == "*"
    assert canonical_encode(CHAIN2) == "*[*]"
    left = parse_tree("*[* *[*]]")
    right = parse_tree("*[*[*] *]")
    assert left != right  # planarity is order sensitive


def test_parse_roundtrip():
    for s in ["*", "*[*]", "*[* *]", "*[*[*] * *[* *]]", "a[b c[a]]"]:
        assert canonical_encode(parse_tree(s)) == s


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_tree("*[*")
    with pytest.raises(ValueError):
        parse_tree("*]")
    with pytest.raises(ValueError):
        parse_tree("")


@st.composite
def planar_trees(draw, max_size=5):
    n = draw(st.integers(min_value=1, max_value=max_size))
    pool = enumerate_trees(n)
    return draw(st.sampled_from(pool))


@given(planar_trees())
def test_encode_parse_identity(t):
    assert parse_tree(canonical_encode(t)) == t


def test_enumerate_counts_catalan():
    assert len(enumerate_trees(1)) == 1
    assert [canonical_encode(t) for t in enumerate_trees(3)] == ["*[* *]", "*[*[*]]"]
    assert len(enumerate_trees(5)) == 14
    for n in range(1, 9):
        assert len(enumerate_trees(n)) == catalan(n - 1)
    assert enumerate_trees(0) == ()


def test_enumerate_no_duplicates():
    for n in range(1, 7):
        ts = enumerate_trees(n)
        assert len(set(ts)) == len(ts)
        assert all(t.size == n for t in ts)


def test_left_graft_examples():
    assert left_graft_tree(LEAF, LEAF) == LinComb.single(CHAIN2)
    got = left_graft_tree(LEAF, CHAIN2)
    assert got == LinComb({parse_tree("*[* *]"): 1, parse_tree("*[*[*]]"): 1})
    got = left_graft_tree(CHAIN2, CHAIN2)
    assert got == LinComb({parse_tree("*[*[*] *]"): 1, parse_tree("*[*[*[*]]]"): 1})


@given(planar_trees(max_size=3), planar_trees(max_size=4))
def test_left_graft_term_count(t1, t2):
    total = sum(left_graft_tree(t1, t2).terms.values())
    assert total == t2.size


def test_graft_at_positions():
    assert graft_at(LEAF, LEAF, (), 1) == CHAIN2
    got = graft_at(LEAF, CHAIN2, (), 2)
    assert canonical_encode(got) == "*[* *]"
    with pytest.raises(ValueError):
        graft_at(LEAF, LEAF, (), 2)
    with pytest.raises(ValueError):
        graft_at(LEAF, LEAF, (3,), 1)


@given(planar_trees(max_size=3), planar_trees(max_size=4))
def test_graft_at_leftmost_sum_is_left_graft(t1, t2):
    total = LinComb((graft_at(t1, t2, v, 1), 1) for v in t2.vertices())
    assert total == left_graft_tree(t1, t2)


def test_forget_planarity():
    a = parse_tree("*[* *[*]]")
    b = parse_tree("*[*[*] *]")
    assert forget_planarity(a) == forget_planarity(b)
    assert forget_planarity(LEAF).enc == "*"


def test_np_counts_match_independent_recurrence():
    # distinct images of all 14 planar 5-vertex trees -> 9 non-planar trees
    assert len({forget_planarity(t) for t in enumerate_trees(5)}) == 9
    for n in range(1, 9):
        assert len(enumerate_np_trees(n)) == rooted_tree_count(n)
