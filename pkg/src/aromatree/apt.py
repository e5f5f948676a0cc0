"""The algebra of aromatic planar trees: S(PA) tensor Lie(PT).

Basis keys pair a multi-aroma monomial with a Lyndon bracket.  The
structure maps:

    [a1 t1, a2 t2] = a1 a2 [t1, t2]                  (tensorial bracket)
    a1 t1 |> a2 t2 = a1 rho(t1)(a2) t2 + a1 a2 (t1 |> t2)
    [[x, y]]       = x|>y - y|>x + [x, y]            (second bracket)

Torsion and curvature are the usual connection expressions; on this
algebra the curvature vanishes identically and the torsion is -[x,y].
"""

from __future__ import annotations

from fractions import Fraction

from .aromas import (
    MA_UNIT,
    MultiAroma,
    SAElement,
    multiaroma_mul,
    rho_apply,
)
from .freelie import LieElement, LyndonWord, lie_bracket, lie_of_tree, postlie_graft_lie
from .linear import LinComb, bilinear_extend
from .trees import PlanarTree


class APTKey:
    """Basis element of APT: a multi-aroma times a Lyndon bracket."""

    __slots__ = ("aromas", "lie", "enc", "degree", "_hash")

    def __init__(self, aromas: MultiAroma, lie: LyndonWord):
        self.aromas = aromas
        self.lie = lie
        self.enc = lie.enc if aromas.is_unit() else aromas.enc + " " + lie.enc
        self.degree = aromas.size + lie.degree
        self._hash = hash(("apt", self.enc))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, APTKey) and self.enc == other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc


APTElement = LinComb


def apt_of_tree(t: PlanarTree) -> APTElement:
    return LinComb.single(APTKey(MA_UNIT, LyndonWord((t,))))


def apt_of_lie(x: LieElement, aromas: MultiAroma = MA_UNIT) -> APTElement:
    return x.map_keys(lambda k: LinComb.single(APTKey(aromas, k)))


def apt_of_sa_lie(s: SAElement, x: LieElement) -> APTElement:
    out: APTElement = LinComb.zero()
    for m, c in s.terms.items():
        out = out + apt_of_lie(x, m).scale(c)
    return out


def lie_part(x: APTElement, aromas: MultiAroma) -> LieElement:
    """Coefficient of a multi-aroma monomial, as a Lie element."""
    out: LieElement = LinComb.zero()
    for k, c in x.terms.items():
        if k.aromas == aromas:
            out = out + LinComb.single(k.lie, c)
    return out


def apt_degree(x: APTElement) -> int:
    return max((k.degree for k in x.terms), default=0)


def _bracket_keys(a: APTKey, b: APTKey) -> APTElement:
    br = lie_bracket(LinComb.single(a.lie), LinComb.single(b.lie))
    return apt_of_lie(br, a.aromas.mul(b.aromas))


def apt_bracket(x: APTElement, y: APTElement) -> APTElement:
    return bilinear_extend(_bracket_keys)(x, y)


def rho_apt(x: APTElement, s: SAElement) -> SAElement:
    """Anchor of an aromatic element: rho(a t) = a rho(t)."""
    out: SAElement = LinComb.zero()
    for k, c in x.terms.items():
        acted = rho_apply(LinComb.single(k.lie), s)
        out = out + multiaroma_mul(LinComb.single(k.aromas), acted).scale(c)
    return out


def _graft_keys(a: APTKey, b: APTKey) -> APTElement:
    # a1 t1 |> a2 t2 = a1 rho(t1)(a2) t2  +  a1 a2 (t1 |> t2)
    anchor = rho_apply(LinComb.single(a.lie), LinComb.single(b.aromas))
    first = apt_of_sa_lie(
        multiaroma_mul(LinComb.single(a.aromas), anchor), LinComb.single(b.lie)
    )
    grafted = postlie_graft_lie(LinComb.single(a.lie), LinComb.single(b.lie))
    second = apt_of_lie(grafted, a.aromas.mul(b.aromas))
    return first + second


def apt_graft(x: APTElement, y: APTElement) -> APTElement:
    return bilinear_extend(_graft_keys)(x, y)


def double_bracket(x: APTElement, y: APTElement) -> APTElement:
    """Second Lie bracket [[x,y]] = x|>y - y|>x + [x,y]."""
    return apt_graft(x, y) - apt_graft(y, x) + apt_bracket(x, y)


def torsion(x: APTElement, y: APTElement) -> APTElement:
    """T(x,y) = x|>y - y|>x - [[x,y]]; identically -[x,y] here."""
    return apt_graft(x, y) - apt_graft(y, x) - double_bracket(x, y)


def curvature(x: APTElement, y: APTElement, z: APTElement) -> APTElement:
    """R(x,y,z) = x|>(y|>z) - y|>(x|>z) - [[x,y]]|>z; identically zero here."""
    return (
        apt_graft(x, apt_graft(y, z))
        - apt_graft(y, apt_graft(x, z))
        - apt_graft(double_bracket(x, y), z)
    )


def nabla_torsion(z: APTElement, x: APTElement, y: APTElement) -> APTElement:
    """(nabla_z T)(x,y) = z|>T(x,y) - T(z|>x,y) - T(x,z|>y)."""
    return (
        apt_graft(z, torsion(x, y))
        - torsion(apt_graft(z, x), y)
        - torsion(x, apt_graft(z, y))
    )


def u_graft_apt(letters: tuple[PlanarTree, ...], x: APTElement) -> APTElement:
    """Guin-Oudom action of a word of trees on an aromatic element.

    (s A) |> x = s |> (A |> x) - (s |> A) |> x, with the tree base case
    the APT graft; used for the elementary-endomorphism cross-checks.
    """
    if not letters:
        return x
    from .freelie import LinComb as _LC  # same class; keep import local
    from .freelie import Word, go_graft, u_of_tree

    s, rest = letters[0], letters[1:]
    inner = u_graft_apt(rest, x)
    first = apt_graft(apt_of_tree(s), inner)
    if not rest:
        return first
    shifted = go_graft(u_of_tree(s), LinComb.single(Word(rest)))
    out = first
    for w, c in shifted.terms.items():
        out = out - u_graft_apt(w.letters, x).scale(c)
    return out
