import random

from aromatree.apt import (
    APTKey,
    apt_bracket,
    apt_graft,
    apt_of_lie,
    apt_of_sa_lie,
    apt_of_tree,
    curvature,
    double_bracket,
    nabla_torsion,
    rho_apt,
    torsion,
    u_graft_apt,
)
from aromatree.aromas import LOOP, MA_UNIT, MultiAroma, Spoke, PlanarAroma, multiaroma_mul
from aromatree.freelie import LyndonWord, postlie_graft_lie
from aromatree.linear import LinComb
from aromatree.samples import random_apt, random_lie, random_sa
from aromatree.trees import LEAF, parse_tree

T2 = parse_tree("*[*]")
STAR = apt_of_tree(LEAF)


def test_bracket_examples():
    assert apt_bracket(STAR, STAR) == LinComb.zero()
    a = MultiAroma((LOOP,))
    x = LinComb.single(APTKey(a, LyndonWord((LEAF,))))
    y = apt_of_tree(T2)
    got = apt_bracket(x, y)
    expect = LinComb.single(APTKey(a, LyndonWord((LEAF, T2))))
    assert got == expect


def test_bracket_jacobi_random():
    rng = random.Random(31)
    for _ in range(8):
        x = random_apt(rng, max_degree=3)
        y = random_apt(rng, max_degree=3)
        z = random_apt(rng, max_degree=3)
        jac = (
            apt_bracket(x, apt_bracket(y, z))
            + apt_bracket(y, apt_bracket(z, x))
            + apt_bracket(z, apt_bracket(x, y))
        )
        assert jac == LinComb.zero()


def test_bracket_is_sa_bilinear():
    rng = random.Random(37)
    for _ in range(6):
        s = random_sa(rng, max_degree=2, terms=1)
        x = random_apt(rng, max_degree=2)
        y = random_apt(rng, max_degree=2)
        scaled = apt_of_sa_lie(s, LinComb.zero())  # zero stays zero
        assert not scaled
        lhs = apt_bracket(_sa_mul(s, x), y)
        rhs = _sa_mul(s, apt_bracket(x, y))
        assert lhs == rhs


def _sa_mul(s, x):
    out = LinComb.zero()
    for k, c in x.terms.items():
        for m, cm in s.terms.items():
            out = out + LinComb.single(APTKey(k.aromas.mul(m), k.lie), c * cm)
    return out


def test_graft_restricts_to_free_postlie():
    rng = random.Random(41)
    for _ in range(6):
        x = random_lie(rng, max_degree=3)
        y = random_lie(rng, max_degree=3)
        assert apt_graft(apt_of_lie(x), apt_of_lie(y)) == apt_of_lie(
            postlie_graft_lie(x, y)
        )


def test_graft_example_with_loop():
    # * |> {loop}*  =  {cyc(@2[*])}* + {loop}(*|>*)
    x = STAR
    y = LinComb.single(APTKey(MultiAroma((LOOP,)), LyndonWord((LEAF,))))
    got = apt_graft(x, y)
    grown = PlanarAroma((Spoke("*", 2, (LEAF,)),))
    expect = LinComb.single(APTKey(MultiAroma((grown,)), LyndonWord((LEAF,)))) + LinComb.single(
        APTKey(MultiAroma((LOOP,)), LyndonWord((T2,)))
    )
    assert got == expect


def test_graft_zero():
    assert apt_graft(STAR, LinComb.zero()) == LinComb.zero()


def test_postlie_axioms_on_apt():
    rng = random.Random(43)
    for _ in range(6):
        x = random_apt(rng, max_degree=3, terms=1)
        y = random_apt(rng, max_degree=3, terms=1)
        z = random_apt(rng, max_degree=3, terms=1)
        lhs = apt_graft(x, apt_bracket(y, z))
        rhs = apt_bracket(apt_graft(x, y), z) + apt_bracket(y, apt_graft(x, z))
        assert lhs == rhs
        lhs = apt_graft(apt_bracket(x, y), z)
        rhs = (
            apt_graft(x, apt_graft(y, z))
            - apt_graft(apt_graft(x, y), z)
            - apt_graft(y, apt_graft(x, z))
            + apt_graft(apt_graft(y, x), z)
        )
        assert lhs == rhs


def test_double_bracket_properties():
    rng = random.Random(47)
    for _ in range(6):
        x = random_apt(rng, max_degree=3)
        assert double_bracket(x, x) == LinComb.zero()
    for _ in range(4):
        x = random_apt(rng, max_degree=2)
        y = random_apt(rng, max_degree=2)
        a = random_sa(rng, max_degree=2, terms=1)
        # Leibniz: [[x, a y]] = rho(x)(a) y + a [[x,y]]
        lhs = double_bracket(x, apt_of_sa_lie(a, LinComb.zero()) + _sa_mul(a, y))
        rhs = _apt_from_sa_times(rho_apt(x, a), y) + _sa_mul(a, double_bracket(x, y))
        assert lhs == rhs


def _apt_from_sa_times(s, y):
    out = LinComb.zero()
    for k, c in y.terms.items():
        for m, cm in s.terms.items():
            out = out + LinComb.single(APTKey(m.mul(k.aromas), k.lie), c * cm)
    return out


def test_rho_is_second_bracket_morphism():
    rng = random.Random(53)
    for _ in range(5):
        x = random_apt(rng, max_degree=2)
        y = random_apt(rng, max_degree=2)
        a = random_sa(rng, max_degree=2)
        lhs = rho_apt(double_bracket(x, y), a)
        rhs = rho_apt(x, rho_apt(y, a)) - rho_apt(y, rho_apt(x, a))
        assert lhs == rhs


def test_torsion_and_curvature():
    rng = random.Random(59)
    for _ in range(5):
        x = random_apt(rng, max_degree=3)
        y = random_apt(rng, max_degree=3)
        z = random_apt(rng, max_degree=2)
        assert torsion(x, x) == LinComb.zero()
        assert torsion(x, y) == -apt_bracket(x, y)
        assert curvature(x, y, z) == LinComb.zero()
        assert curvature(x, x, z) == LinComb.zero()
        assert nabla_torsion(z, x, y) == LinComb.zero()
    assert curvature(LinComb.zero(), random_apt(rng), random_apt(rng)) == LinComb.zero()


def test_u_graft_apt_matches_go_rule():
    rng = random.Random(61)
    from aromatree.samples import random_tree

    for _ in range(8):
        x, y = random_tree(rng, 2), random_tree(rng, 2)
        z = random_apt(rng, max_degree=2, terms=1)
        lhs = u_graft_apt((x, y), z)
        rhs = apt_graft(apt_of_tree(x), u_graft_apt((y,), z)) - u_graft_apt_elem(
            postlie_graft_lie_tree(x, y), z
        )
        assert lhs == rhs


def postlie_graft_lie_tree(x, y):
    from aromatree.trees import left_graft_tree

    return left_graft_tree(x, y)


def u_graft_apt_elem(trees_lc, z):
    out = LinComb.zero()
    for t, c in trees_lc.terms.items():
        out = out + u_graft_apt((t,), z).scale(c)
    return out
