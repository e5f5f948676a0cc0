from fractions import Fraction

from hypothesis import given, strategies as st

from aromatree.linear import LinComb, bilinear_extend


def lc(**kw):
    return LinComb({k: Fraction(v) for k, v in kw.items()})


def test_cancellation():
    assert lc(t=1) + lc(t=-1) == LinComb.zero()
    assert not (lc(t=1) + lc(t=-1))


def test_half_plus_half():
    assert LinComb({"t": Fraction(1, 2)}) + LinComb({"t": Fraction(1, 2)}) == lc(t=1)


def test_disjoint_keys():
    assert lc(t1=1) + lc(t2=2) == LinComb({"t1": 1, "t2": 2})


def test_scale():
    assert lc(t=5).scale(0) == LinComb.zero()
    a = lc(t=3, s=-2)
    assert a.scale(1) == a
    assert lc(t=3).scale(Fraction(2, 3)) == lc(t=2)


def test_zero_terms_never_stored():
    a = LinComb({"x": 0, "y": 2})
    assert "x" not in a.terms
    assert a == lc(y=2)


coeffs = st.fractions(min_value=-50, max_value=50, max_denominator=9)
combs = st.dictionaries(st.sampled_from("abcde"), coeffs, max_size=4).map(LinComb)


@given(combs, combs, combs)
def test_add_associative_commutative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a


@given(coeffs, combs, combs)
def test_scale_distributes(c, a, b):
    assert (a + b).scale(c) == a.scale(c) + b.scale(c)


@given(combs)
def test_normalization_idempotent(a):
    assert LinComb(a.terms) == a
    assert LinComb(LinComb(a.terms).terms) == a


def test_bilinear_extension():
    f = bilinear_extend(lambda x, y: LinComb.single(x + y))
    assert f(lc(a=1), lc(b=1)) == lc(ab=1)
    assert f(LinComb.zero(), lc(b=1)) == LinComb.zero()
    assert f(lc(a=1, b=1), lc(c=2)) == lc(ac=2, bc=2)
