"""Exact-rational linear combinations over arbitrary ordered basis keys.

Every vector space in this package is realised as a finite ``LinComb``:
a map from canonical basis keys to nonzero ``fractions.Fraction``
coefficients.  Keys are ordered by their canonical string encoding
(attribute ``enc``), which gives one deterministic total order reused
everywhere.  Floats never appear; all equalities are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Generic, Hashable, Iterable, Iterator, Mapping, TypeVar

K = TypeVar("K", bound=Hashable)
K2 = TypeVar("K2", bound=Hashable)

Q = Fraction


def sort_key(k):
    """Sort key for a basis key: its canonical encoding, recursively for tuples."""
    enc = getattr(k, "enc", None)
    if enc is not None:
        return enc
    if isinstance(k, tuple):
        return tuple(sort_key(i) for i in k)
    return k


class LinComb(Generic[K]):
    """Immutable finite Q-linear combination; zero coefficients are dropped."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[K, Q] | Iterable[tuple[K, Q]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[K, Fraction] = {}
        for k, c in items:
            if not isinstance(c, Fraction):
                c = Fraction(c)
            if c:
                prev = acc.get(k)
                if prev is None:
                    acc[k] = c
                else:
                    s = prev + c
                    if s:
                        acc[k] = s
                    else:
                        del acc[k]
        self.terms = acc
        self._hash: int | None = None

    @staticmethod
    def zero() -> "LinComb[K]":
        return _ZERO

    @staticmethod
    def single(key: K, coeff: Q | int = 1) -> "LinComb[K]":
        return LinComb(((key, Fraction(coeff)),))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, key: K) -> bool:
        return key in self.terms

    def __getitem__(self, key: K) -> Fraction:
        return self.terms.get(key, Fraction(0))

    def items(self) -> list[tuple[K, Fraction]]:
        """Terms sorted by the canonical key order."""
        return sorted(self.terms.items(), key=lambda kv: sort_key(kv[0]))

    def keys(self) -> list[K]:
        return [k for k, _ in self.items()]

    def __iter__(self) -> Iterator[K]:
        return iter(self.keys())

    def __add__(self, other: "LinComb[K]") -> "LinComb[K]":
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for k, c in other.terms.items():
            prev = acc.get(k)
            if prev is None:
                acc[k] = c
            else:
                s = prev + c
                if s:
                    acc[k] = s
                else:
                    del acc[k]
        out = LinComb.__new__(LinComb)
        out.terms = acc
        out._hash = None
        return out

    def __sub__(self, other: "LinComb[K]") -> "LinComb[K]":
        return self + (-other)

    def __neg__(self) -> "LinComb[K]":
        return self.scale(Fraction(-1))

    def scale(self, c: Q | int) -> "LinComb[K]":
        if not isinstance(c, Fraction):
            c = Fraction(c)
        if not c:
            return _ZERO
        if c == 1:
            return self
        out = LinComb.__new__(LinComb)
        out.terms = {k: c * v for k, v in self.terms.items()}
        out._hash = None
        return out

    def __rmul__(self, c: Q | int) -> "LinComb[K]":
        return self.scale(c)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinComb):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.items():
            ks = getattr(k, "enc", None) or repr(k)
            parts.append(f"{c}*{ks}")
        return " + ".join(parts)

    def map_keys(self, f: Callable[[K], "LinComb[K2]"]) -> "LinComb[K2]":
        """Linear extension of a key-to-combination map."""
        out: LinComb[K2] = _ZERO
        for k, c in self.terms.items():
            out = out + f(k).scale(c)
        return out


_ZERO: LinComb = LinComb()


def linear_sum(parts: Iterable[LinComb[K]]) -> LinComb[K]:
    acc: LinComb[K] = _ZERO
    for p in parts:
        acc = acc + p
    return acc


def bilinear_extend(
    f: Callable[[K, K2], LinComb],
) -> Callable[[LinComb[K], LinComb[K2]], LinComb]:
    """The unique bilinear extension of a map defined on basis pairs."""

    def ext(a: LinComb[K], b: LinComb[K2]) -> LinComb:
        out: LinComb = _ZERO
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                out = out + f(ka, kb).scale(ca * cb)
        return out

    return ext
