"""Planar (ordered) rooted trees and their non-planar shadows.

Canonical string grammar (also consumed by the CLI parser):

    tree     := label children?
    label    := "*" | identifier
    children := "[" tree (" " tree)* "]"

Child order is semantically significant for ``PlanarTree``; mirror-image
trees encode differently.  ``NonPlanarTree`` erases the order by keeping
children sorted by their canonical encoding.

Vertex addresses are tuples of 1-based child indices from the root; the
empty tuple addresses the root.  Insertion positions are 1-based: grafting
at position n makes the new edge the n-th outgoing edge, shifting existing
edges at >= n to the right.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterator

from .linear import LinComb

Address = tuple[int, ...]

ROOT: Address = ()

_LABEL_RE = re.compile(r"\*|[A-Za-z_][A-Za-z_0-9]*")


class PlanarTree:
    """Rooted tree with totally ordered children; immutable and hashable."""

    __slots__ = ("label", "children", "enc", "size", "_hash")

    def __init__(self, label: str = "*", children: tuple["PlanarTree", ...] = ()):
        if not _LABEL_RE.fullmatch(label):
            raise ValueError(f"bad vertex label: {label!r}")
        self.label = label
        self.children = tuple(children)
        if self.children:
            self.enc = label + "[" + " ".join(c.enc for c in self.children) + "]"
        else:
            self.enc = label
        self.size = 1 + sum(c.size for c in self.children)
        self._hash = hash(self.enc)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PlanarTree) and self.enc == other.enc

    def __lt__(self, other: "PlanarTree") -> bool:
        return self.enc < other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc

    def subtree(self, addr: Address) -> "PlanarTree":
        node = self
        for i in addr:
            if not 1 <= i <= len(node.children):
                raise ValueError(f"address {addr} invalid in {self.enc}")
            node = node.children[i - 1]
        return node

    def vertices(self) -> Iterator[Address]:
        """All vertex addresses in preorder (root first, children left to right)."""
        yield ()
        for i, c in enumerate(self.children, start=1):
            for sub in c.vertices():
                yield (i,) + sub

    def out_degree(self, addr: Address) -> int:
        return len(self.subtree(addr).children)


LEAF = PlanarTree("*")


def tree(label: str = "*", *children: PlanarTree) -> PlanarTree:
    return PlanarTree(label, tuple(children))


def canonical_encode(t: PlanarTree) -> str:
    return t.enc


def parse_tree(s: str) -> PlanarTree:
    """Parse a canonical tree string; raises ValueError with position on error."""
    t, pos = _parse_tree_at(s, 0)
    pos = _skip_ws(s, pos)
    if pos != len(s):
        raise ValueError(f"trailing input at column {pos + 1}: {s[pos:]!r}")
    return t


def _skip_ws(s: str, pos: int) -> int:
    while pos < len(s) and s[pos] == " ":
        pos += 1
    return pos


def _parse_tree_at(s: str, pos: int) -> tuple[PlanarTree, int]:
    pos = _skip_ws(s, pos)
    m = _LABEL_RE.match(s, pos)
    if not m:
        raise ValueError(f"expected vertex label at column {pos + 1}")
    label = m.group(0)
    pos = m.end()
    children: list[PlanarTree] = []
    if pos < len(s) and s[pos] == "[":
        pos += 1
        pos = _skip_ws(s, pos)
        while pos < len(s) and s[pos] != "]":
            c, pos = _parse_tree_at(s, pos)
            children.append(c)
            pos = _skip_ws(s, pos)
        if pos >= len(s):
            raise ValueError("unterminated '[' in tree")
        pos += 1
    return PlanarTree(label, tuple(children)), pos


def _replace_at(t: PlanarTree, addr: Address, new: PlanarTree) -> PlanarTree:
    if not addr:
        return new
    i = addr[0]
    kids = list(t.children)
    kids[i - 1] = _replace_at(kids[i - 1], addr[1:], new)
    return PlanarTree(t.label, tuple(kids))


def graft_at(t1: PlanarTree, host: PlanarTree, addr: Address, n: int) -> PlanarTree:
    """Insert t1 so the new edge is the n-th outgoing edge of the vertex at addr."""
    target = host.subtree(addr)
    k = len(target.children)
    if not 1 <= n <= k + 1:
        raise ValueError(f"position {n} out of range 1..{k + 1} at {addr}")
    kids = target.children[: n - 1] + (t1,) + target.children[n - 1 :]
    return _replace_at(host, addr, PlanarTree(target.label, kids))


@lru_cache(maxsize=None)
def left_graft_tree(t1: PlanarTree, t2: PlanarTree) -> LinComb[PlanarTree]:
    """Sum over all vertices of t2 of inserting t1 as the new leftmost child."""
    return LinComb((graft_at(t1, t2, v, 1), 1) for v in t2.vertices())


@lru_cache(maxsize=None)
def enumerate_trees(n: int, labels: tuple[str, ...] = ("*",)) -> tuple[PlanarTree, ...]:
    """All planar rooted trees with exactly n vertices, in canonical order."""
    if n <= 0:
        return ()
    out = [
        PlanarTree(lab, forest)
        for lab in labels
        for forest in enumerate_forests(n - 1, labels)
    ]
    out.sort(key=lambda t: t.enc)
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_forests(
    n: int, labels: tuple[str, ...] = ("*",)
) -> tuple[tuple[PlanarTree, ...], ...]:
    """All ordered forests with total vertex count n."""
    if n == 0:
        return ((),)
    out: list[tuple[PlanarTree, ...]] = []
    for head_size in range(1, n + 1):
        for head in enumerate_trees(head_size, labels):
            for rest in enumerate_forests(n - head_size, labels):
                out.append((head,) + rest)
    return tuple(out)


class NonPlanarTree:
    """Rooted tree with unordered children, canonically sorted by encoding."""

    __slots__ = ("label", "children", "enc", "size", "_hash")

    def __init__(self, label: str = "*", children: tuple["NonPlanarTree", ...] = ()):
        self.label = label
        self.children = tuple(sorted(children, key=lambda c: c.enc))
        if self.children:
            self.enc = label + "[" + " ".join(c.enc for c in self.children) + "]"
        else:
            self.enc = label
        self.size = 1 + sum(c.size for c in self.children)
        self._hash = hash(("np", self.enc))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NonPlanarTree) and self.enc == other.enc

    def __lt__(self, other: "NonPlanarTree") -> bool:
        return self.enc < other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc

    def subtree(self, addr: Address) -> "NonPlanarTree":
        node = self
        for i in addr:
            node = node.children[i - 1]
        return node

    def vertices(self) -> Iterator[Address]:
        yield ()
        for i, c in enumerate(self.children, start=1):
            for sub in c.vertices():
                yield (i,) + sub


NP_LEAF = NonPlanarTree("*")


def forget_planarity(t: PlanarTree) -> NonPlanarTree:
    return NonPlanarTree(t.label, tuple(forget_planarity(c) for c in t.children))


@lru_cache(maxsize=None)
def enumerate_np_trees(n: int, labels: tuple[str, ...] = ("*",)) -> tuple[NonPlanarTree, ...]:
    """All non-planar rooted trees with n vertices (distinct images of planar ones)."""
    seen = sorted({forget_planarity(t) for t in enumerate_trees(n, labels)}, key=lambda t: t.enc)
    return tuple(seen)
