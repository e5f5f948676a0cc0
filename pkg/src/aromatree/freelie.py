"""The free post-Lie algebra on planar trees and its enveloping word algebra.

Lie elements are kept in a canonical normal form: linear combinations of
Lyndon words over the tree alphabet (trees ordered by canonical encoding),
where each Lyndon word stands for its standard right-factorisation
bracketing.  The enveloping algebra is spanned by plain words of trees
under concatenation, with deshuffle as coproduct.

The left grafting product of trees extends to Lie elements through the
post-Lie axioms (derivation in the right slot, the second axiom in the
left slot), and to the whole word algebra through the Guin-Oudom rules:

    1 |> A = A
    (x A) |> y = x |> (A |> y) - (x |> A) |> y
    A |> (B C) = (A_(1) |> B)(A_(2) |> C)

from which the Grossman-Larson product is A * B = A_(1) (A_(2) |> B).
"""

from __future__ import annotations

from functools import lru_cache

from .linear import LinComb, bilinear_extend, linear_sum
from .trees import PlanarTree, left_graft_tree


class Word:
    """A word in the tree alphabet; the empty word is the unit of U."""

    __slots__ = ("letters", "enc", "degree", "_hash")

    def __init__(self, letters: tuple[PlanarTree, ...] = ()):
        self.letters = tuple(letters)
        self.enc = ".".join(t.enc for t in self.letters) if self.letters else "1"
        self.degree = sum(t.size for t in self.letters)
        self._hash = hash(("w", self.enc))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.letters)

    def __repr__(self) -> str:
        return self.enc


EMPTY_WORD = Word()

# UElement: LinComb[Word].  LieElement: LinComb[LyndonWord].
UElement = LinComb
LieElement = LinComb

U_ONE: UElement = LinComb.single(EMPTY_WORD)


def word(*letters: PlanarTree) -> Word:
    return Word(letters)


def u_of_tree(t: PlanarTree) -> UElement:
    return LinComb.single(Word((t,)))


def concat(a: Word, b: Word) -> Word:
    return Word(a.letters + b.letters)


def concat_product(a: UElement, b: UElement) -> UElement:
    return bilinear_extend(lambda x, y: LinComb.single(concat(x, y)))(a, b)


def counit(a: UElement) -> "LinComb":
    """Coefficient of the empty word."""
    from fractions import Fraction

    return a[EMPTY_WORD] if EMPTY_WORD in a else Fraction(0)


@lru_cache(maxsize=None)
def _deshuffle_word(w: Word) -> LinComb:
    """Sum over all splits of the letter sequence into two complementary subwords."""
    out: dict[tuple[Word, Word], int] = {}
    n = len(w.letters)
    for mask in range(1 << n):
        left = tuple(w.letters[i] for i in range(n) if mask >> i & 1)
        right = tuple(w.letters[i] for i in range(n) if not mask >> i & 1)
        key = (Word(left), Word(right))
        out[key] = out.get(key, 0) + 1
    return LinComb(out.items())


def deshuffle(u: UElement) -> LinComb:
    """Deshuffle coproduct on U; keys are (Word, Word) pairs."""
    return u.map_keys(_deshuffle_word)


def is_primitive(u: UElement) -> tuple[bool, object]:
    """Friedrichs criterion: Delta(u) = u x 1 + 1 x u, exactly.

    Returns (True, None) or (False, offending (Word, Word) component).
    """
    defect = deshuffle(u)
    for w in u:
        c = u[w]
        defect = defect - LinComb((((w, EMPTY_WORD), c), ((EMPTY_WORD, w), c)))
    if defect:
        return False, defect.keys()[0]
    return True, None


class LyndonWord:
    """A Lyndon word of trees; stands for its standard-factorisation bracketing."""

    __slots__ = ("letters", "enc", "degree", "_hash")

    def __init__(self, letters: tuple[PlanarTree, ...]):
        if not is_lyndon(letters):
            raise ValueError(f"not a Lyndon word: {letters}")
        self.letters = tuple(letters)
        self.enc = bracket_string(self.letters)
        self.degree = sum(t.size for t in self.letters)
        self._hash = hash(("ly", self.letters))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LyndonWord) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.letters)

    def __repr__(self) -> str:
        return self.enc


def _word_key(letters: tuple[PlanarTree, ...]) -> tuple[str, ...]:
    return tuple(t.enc for t in letters)


def is_lyndon(letters: tuple[PlanarTree, ...]) -> bool:
    """True iff the word is strictly smaller than each of its proper suffixes."""
    if not letters:
        return False
    key = _word_key(letters)
    return all(key < key[i:] for i in range(1, len(letters)))


def std_factorization(
    letters: tuple[PlanarTree, ...]
) -> tuple[tuple[PlanarTree, ...], tuple[PlanarTree, ...]]:
    """Standard factorisation w = uv, v the lexicographically least proper suffix."""
    assert len(letters) >= 2
    key = _word_key(letters)
    best = 1
    for i in range(2, len(letters)):
        if key[i:] < key[best:]:
            best = i
    return letters[:best], letters[best:]


def bracket_string(letters: tuple[PlanarTree, ...]) -> str:
    if len(letters) == 1:
        return letters[0].enc
    u, v = std_factorization(letters)
    return "[" + bracket_string(u) + "," + bracket_string(v) + "]"


def lie_of_tree(t: PlanarTree) -> LieElement:
    return LinComb.single(LyndonWord((t,)))


@lru_cache(maxsize=None)
def _embed_letters(letters: tuple[PlanarTree, ...]) -> UElement:
    """Word expansion of the standard bracketing: [u,v] -> uv - vu recursively."""
    if len(letters) == 1:
        return LinComb.single(Word(letters))
    u, v = std_factorization(letters)
    eu, ev = _embed_letters(u), _embed_letters(v)
    return concat_product(eu, ev) - concat_product(ev, eu)


def embed(x: LieElement) -> UElement:
    """Embedding of a Lie element into the word algebra; result is primitive."""
    return x.map_keys(lambda k: _embed_letters(k.letters))


def lie_normal_form(u: UElement) -> LieElement:
    """The unique Lyndon-basis expansion of a primitive word-algebra element.

    Rejects non-primitive input, reporting an offending deshuffle component.
    Works by triangularity: the lexicographically least word of an embedded
    Lyndon bracket is the Lyndon word itself, with coefficient 1.
    """
    ok, witness = is_primitive(u)
    if not ok:
        raise ValueError(f"not primitive under deshuffle; offending component {witness}")
    rem = u
    out: LieElement = LinComb.zero()
    while rem:
        w = min(rem.keys(), key=lambda w: _word_key(w.letters))
        if not is_lyndon(w.letters):
            raise ValueError(f"primitive element with non-Lyndon least word {w}")
        c = rem[w]
        key = LyndonWord(w.letters)
        out = out + LinComb.single(key, c)
        rem = rem - _embed_letters(key.letters).scale(c)
    return out


def lie_bracket(a: LieElement, b: LieElement) -> LieElement:
    ea, eb = embed(a), embed(b)
    return lie_normal_form(concat_product(ea, eb) - concat_product(eb, ea))


@lru_cache(maxsize=None)
def _graft_keys(x: LyndonWord, y: LyndonWord) -> LieElement:
    if len(x) == 1:
        if len(y) == 1:
            return left_graft_tree(x.letters[0], y.letters[0]).map_keys(
                lambda t: LinComb.single(LyndonWord((t,)))
            )
        # x |> [u,v] = [x |> u, v] + [u, x |> v]
        u, v = std_factorization(y.letters)
        lu = _lyndon_elt(u)
        lv = _lyndon_elt(v)
        xe = LinComb.single(x)
        return lie_bracket(postlie_graft_lie(xe, lu), lv) + lie_bracket(
            lu, postlie_graft_lie(xe, lv)
        )
    # [p,q] |> y = p |> (q |> y) - (p |> q) |> y - q |> (p |> y) + (q |> p) |> y
    p, q = std_factorization(x.letters)
    lp = _lyndon_elt(p)
    lq = _lyndon_elt(q)
    ye = LinComb.single(y)
    return (
        postlie_graft_lie(lp, postlie_graft_lie(lq, ye))
        - postlie_graft_lie(postlie_graft_lie(lp, lq), ye)
        - postlie_graft_lie(lq, postlie_graft_lie(lp, ye))
        + postlie_graft_lie(postlie_graft_lie(lq, lp), ye)
    )


def _lyndon_elt(letters: tuple[PlanarTree, ...]) -> LieElement:
    return LinComb.single(LyndonWord(letters))


def postlie_graft_lie(a: LieElement, b: LieElement) -> LieElement:
    """Left grafting extended to Lie elements via the post-Lie axioms."""
    return bilinear_extend(lambda x, y: _graft_keys(x, y))(a, b)


@lru_cache(maxsize=None)
def _go_graft_words(a: Word, b: Word) -> UElement:
    if not a.letters:
        return LinComb.single(b)
    if not b.letters:
        return LinComb.zero()
    if len(b) == 1:
        x, rest = a.letters[0], Word(a.letters[1:])
        if not rest.letters:
            return left_graft_tree(x, b.letters[0]).map_keys(
                lambda t: LinComb.single(Word((t,)))
            )
        # (x A) |> y = x |> (A |> y) - (x |> A) |> y
        inner = _go_graft_words(rest, b)
        first = go_graft(LinComb.single(Word((x,))), inner)
        shifted = go_graft(go_graft(LinComb.single(Word((x,))), LinComb.single(rest)), LinComb.single(b))
        return first - shifted
    # A |> (y C) = (A_(1) |> y)(A_(2) |> C)
    y = Word(b.letters[:1])
    c = Word(b.letters[1:])
    out: UElement = LinComb.zero()
    for (a1, a2), m in _deshuffle_word(a).terms.items():
        left = _go_graft_words(a1, y)
        right = _go_graft_words(a2, c)
        out = out + concat_product(left, right).scale(m)
    return out


def go_graft(a: UElement, b: UElement) -> UElement:
    """The Guin-Oudom extension of left grafting to the word algebra."""
    return bilinear_extend(lambda x, y: _go_graft_words(x, y))(a, b)


@lru_cache(maxsize=None)
def _gl_words(a: Word, b: Word) -> UElement:
    out: UElement = LinComb.zero()
    for (a1, a2), m in _deshuffle_word(a).terms.items():
        out = out + concat_product(
            LinComb.single(a1), _go_graft_words(a2, b)
        ).scale(m)
    return out


def gl_product(a: UElement, b: UElement) -> UElement:
    """Grossman-Larson product A * B = A_(1) (A_(2) |> B)."""
    return bilinear_extend(lambda x, y: _gl_words(x, y))(a, b)


def second_bracket(a: LieElement, b: LieElement) -> LieElement:
    """The sub-adjacent Lie bracket  [[a,b]] = a|>b - b|>a + [a,b]."""
    return postlie_graft_lie(a, b) - postlie_graft_lie(b, a) + lie_bracket(a, b)


@lru_cache(maxsize=None)
def enumerate_lyndon_words(
    degree: int, labels: tuple[str, ...] = ("*",)
) -> tuple[LyndonWord, ...]:
    """All Lyndon words of trees with total vertex count == degree."""
    from .trees import enumerate_trees

    def extend(prefix: tuple[PlanarTree, ...], remaining: int, acc: list):
        if remaining == 0:
            if is_lyndon(prefix):
                acc.append(LyndonWord(prefix))
            return
        for s in range(1, remaining + 1):
            for t in enumerate_trees(s, labels):
                extend(prefix + (t,), remaining - s, acc)

    acc: list[LyndonWord] = []
    extend((), degree, acc)
    acc.sort(key=lambda k: k.enc)
    return tuple(acc)
