"""Planar aromas, multi-aromas, the anchor action, and non-planar shadows.

A planar aroma is a directed cycle of "spokes" with planar trees hanging
off each cycle vertex.  Spoke i's cycle edge targets spoke i-1
(cyclically), matching right-to-left cycle pictures.  Each spoke records
the planar position of its cycle edge among the vertex's outgoing edges,
which is what distinguishes embeddings ("inside" versus "outside" trees).

Grammar:

    aroma      := "cyc(" spoke (" | " spoke)* ")"
    spoke      := label? "@" position "[" tree (" " tree)* "]"
    multiaroma := "{" aroma ("," aroma)* "}"

Aromas are stored in the canonical rotation: the one whose spoke-encoding
sequence is lexicographically minimal.  Multi-aromas are commutative
monomials, stored sorted.

Vertex addresses inside an aroma: ``(i,)`` is spoke vertex i; a longer
address ``(i, j, p...)`` descends into child j of spoke i and then along
the tree path p.  Insertion positions at a spoke vertex count the cycle
edge as an outgoing edge.
"""

from __future__ import annotations

from functools import lru_cache

from .linear import LinComb, linear_sum
from .trees import (
    Address,
    NonPlanarTree,
    PlanarTree,
    enumerate_trees,
    enumerate_np_trees,
    forget_planarity,
    graft_at,
)


class Spoke:
    """One cycle vertex: label, cycle-edge planar position, hanging trees."""

    __slots__ = ("label", "cycle_pos", "children", "enc", "size", "_hash")

    def __init__(self, label: str, cycle_pos: int, children: tuple[PlanarTree, ...] = ()):
        children = tuple(children)
        if not 1 <= cycle_pos <= len(children) + 1:
            raise ValueError(
                f"cycle position {cycle_pos} out of range 1..{len(children) + 1}"
            )
        self.label = label
        self.cycle_pos = cycle_pos
        self.children = children
        head = "" if label == "*" else label
        self.enc = f"{head}@{cycle_pos}[" + " ".join(c.enc for c in children) + "]"
        self.size = 1 + sum(c.size for c in children)
        self._hash = hash(("spoke", self.enc))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Spoke) and self.enc == other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc


def canonicalize_spokes(spokes: tuple[Spoke, ...]) -> tuple[tuple[Spoke, ...], int]:
    """Rotation with lexicographically minimal encoding sequence.

    Returns (canonical, shift) with canonical[i] == spokes[(i + shift) % m].
    """
    if not spokes:
        raise ValueError("an aroma needs at least one spoke")
    m = len(spokes)
    best = 0
    best_key = tuple(s.enc for s in spokes)
    for shift in range(1, m):
        key = tuple(spokes[(i + shift) % m].enc for i in range(m))
        if key < best_key:
            best_key = key
            best = shift
    return tuple(spokes[(i + best) % m] for i in range(m)), best


class PlanarAroma:
    """One-cycle planar digraph, stored in canonical rotation."""

    __slots__ = ("spokes", "enc", "size", "_hash")

    def __init__(self, spokes: tuple[Spoke, ...]):
        self.spokes, _ = canonicalize_spokes(tuple(spokes))
        self.enc = "cyc(" + " | ".join(s.enc for s in self.spokes) + ")"
        self.size = sum(s.size for s in self.spokes)
        self._hash = hash(("aroma", self.enc))

    @staticmethod
    def from_raw(spokes: tuple[Spoke, ...]) -> tuple["PlanarAroma", int]:
        """Canonicalize, also returning the rotation shift for address fixup."""
        canonical, shift = canonicalize_spokes(tuple(spokes))
        a = PlanarAroma.__new__(PlanarAroma)
        a.spokes = canonical
        a.enc = "cyc(" + " | ".join(s.enc for s in canonical) + ")"
        a.size = sum(s.size for s in canonical)
        a._hash = hash(("aroma", a.enc))
        return a, shift

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PlanarAroma) and self.enc == other.enc

    def __lt__(self, other: "PlanarAroma") -> bool:
        return self.enc < other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc

    def vertices(self):
        """All vertex addresses: spoke vertices and vertices of hanging trees."""
        for i, s in enumerate(self.spokes):
            yield (i,)
            for j, c in enumerate(s.children, start=1):
                for sub in c.vertices():
                    yield (i, j) + sub

    def out_degree(self, addr: Address) -> int:
        s = self.spokes[addr[0]]
        if len(addr) == 1:
            return len(s.children) + 1  # cycle edge counts
        return len(s.children[addr[1] - 1].subtree(addr[2:]).children)


LOOP = PlanarAroma((Spoke("*", 1),))


def graft_into_spokes(
    t: PlanarTree, spokes: tuple[Spoke, ...], addr: Address, slot: int
) -> tuple[Spoke, ...]:
    """Graft t at (addr, slot) into a raw spoke tuple, preserving rotation."""
    i = addr[0]
    s = spokes[i]
    if len(addr) == 1:
        k = len(s.children)
        if not 1 <= slot <= k + 2:
            raise ValueError(f"slot {slot} out of range 1..{k + 2} at spoke {i}")
        if slot <= s.cycle_pos:
            new_pos = s.cycle_pos + 1
            child_idx = slot
        else:
            new_pos = s.cycle_pos
            child_idx = slot - 1
        kids = s.children[: child_idx - 1] + (t,) + s.children[child_idx - 1 :]
        new_spoke = Spoke(s.label, new_pos, kids)
    else:
        j = addr[1]
        kids = list(s.children)
        kids[j - 1] = graft_at(t, kids[j - 1], addr[2:], slot)
        new_spoke = Spoke(s.label, s.cycle_pos, tuple(kids))
    return spokes[:i] + (new_spoke,) + spokes[i + 1 :]


def graft_into_aroma(t: PlanarTree, a: PlanarAroma, addr: Address, slot: int) -> PlanarAroma:
    return PlanarAroma(graft_into_spokes(t, a.spokes, addr, slot))


class MultiAroma:
    """Commutative monomial of planar aromas; the empty product is the unit."""

    __slots__ = ("factors", "enc", "size", "_hash")

    def __init__(self, factors: tuple[PlanarAroma, ...] = ()):
        self.factors = tuple(sorted(factors, key=lambda a: a.enc))
        self.enc = "{" + ",".join(a.enc for a in self.factors) + "}" if self.factors else "1"
        self.size = sum(a.size for a in self.factors)
        self._hash = hash(("ma", self.enc))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultiAroma) and self.enc == other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc

    def is_unit(self) -> bool:
        return not self.factors

    def mul(self, other: "MultiAroma") -> "MultiAroma":
        return MultiAroma(self.factors + other.factors)


MA_UNIT = MultiAroma()

# SAElement: LinComb[MultiAroma]
SAElement = LinComb

SA_ONE: SAElement = LinComb.single(MA_UNIT)


def sa_of_aroma(a: PlanarAroma) -> SAElement:
    return LinComb.single(MultiAroma((a,)))


def multiaroma_mul(a: SAElement, b: SAElement) -> SAElement:
    from .linear import bilinear_extend

    return bilinear_extend(lambda x, y: LinComb.single(x.mul(y)))(a, b)


@lru_cache(maxsize=None)
def rho_tree_on_aroma(t: PlanarTree, a: PlanarAroma) -> LinComb:
    """Leftmost grafting of t at every vertex of the aroma."""
    return LinComb((graft_into_aroma(t, a, v, 1), 1) for v in a.vertices())


def rho_tree_on_multiaroma(t: PlanarTree, m: MultiAroma) -> SAElement:
    """Derivation across the factors of a multi-aroma monomial."""
    out: SAElement = LinComb.zero()
    for i, factor in enumerate(m.factors):
        rest = m.factors[:i] + m.factors[i + 1 :]
        out = out + rho_tree_on_aroma(t, factor).map_keys(
            lambda a2: LinComb.single(MultiAroma(rest + (a2,)))
        )
    return out


def rho_apply(x: LinComb, s: SAElement) -> SAElement:
    """Anchor action of a Lie element on S(PA).

    Trees graft leftmost onto every vertex of every factor; Lie brackets
    recurse through the second post-Lie axiom pattern:

        rho([u,v]) = rho(u)rho(v) - rho(u|>v) - rho(v)rho(u) + rho(v|>u).
    """
    from .freelie import LyndonWord, postlie_graft_lie, std_factorization

    out: SAElement = LinComb.zero()
    for key, c in x.terms.items():
        if len(key) == 1:
            part = s.map_keys(lambda m: rho_tree_on_multiaroma(key.letters[0], m))
        else:
            u, v = std_factorization(key.letters)
            eu = LinComb.single(LyndonWord(u))
            ev = LinComb.single(LyndonWord(v))
            part = (
                rho_apply(eu, rho_apply(ev, s))
                - rho_apply(postlie_graft_lie(eu, ev), s)
                - rho_apply(ev, rho_apply(eu, s))
                + rho_apply(postlie_graft_lie(ev, eu), s)
            )
        out = out + part.scale(c)
    return out


class NonPlanarAroma:
    """Aroma with child order and cycle-edge position erased; rotation canonical."""

    __slots__ = ("spokes", "enc", "size", "_hash")

    def __init__(self, spokes: tuple[tuple[str, tuple[NonPlanarTree, ...]], ...]):
        normal = tuple(
            (label, tuple(sorted(kids, key=lambda t: t.enc))) for label, kids in spokes
        )
        m = len(normal)
        if m == 0:
            raise ValueError("an aroma needs at least one spoke")
        encs = [self._spoke_enc(sp) for sp in normal]
        best = min(range(m), key=lambda r: tuple(encs[(i + r) % m] for i in range(m)))
        self.spokes = tuple(normal[(i + best) % m] for i in range(m))
        self.enc = "cyc(" + " | ".join(self._spoke_enc(sp) for sp in self.spokes) + ")"
        self.size = sum(1 + sum(t.size for t in kids) for _, kids in self.spokes)
        self._hash = hash(("npa", self.enc))

    @staticmethod
    def _spoke_enc(sp: tuple[str, tuple[NonPlanarTree, ...]]) -> str:
        label, kids = sp
        head = "" if label == "*" else label
        return head + "@[" + " ".join(t.enc for t in kids) + "]"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NonPlanarAroma) and self.enc == other.enc

    def __lt__(self, other: "NonPlanarAroma") -> bool:
        return self.enc < other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc


def forget_planarity_aroma(a: PlanarAroma) -> NonPlanarAroma:
    return NonPlanarAroma(
        tuple(
            (s.label, tuple(forget_planarity(c) for c in s.children))
            for s in a.spokes
        )
    )


@lru_cache(maxsize=None)
def enumerate_spokes(size: int, labels: tuple[str, ...] = ("*",)) -> tuple[Spoke, ...]:
    out = []
    for t in enumerate_trees(size, labels):
        for p in range(1, len(t.children) + 2):
            out.append(Spoke(t.label, p, t.children))
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_aromas(n: int, labels: tuple[str, ...] = ("*",)) -> tuple[PlanarAroma, ...]:
    """All planar aromas with exactly n vertices."""
    if n <= 0:
        return ()
    seen: set[PlanarAroma] = set()

    def build(remaining: int, acc: tuple[Spoke, ...]):
        if remaining == 0:
            if acc:
                seen.add(PlanarAroma(acc))
            return
        for s in range(1, remaining + 1):
            for sp in enumerate_spokes(s, labels):
                build(remaining - s, acc + (sp,))

    build(n, ())
    return tuple(sorted(seen, key=lambda a: a.enc))


@lru_cache(maxsize=None)
def enumerate_np_aromas(n: int, labels: tuple[str, ...] = ("*",)) -> tuple[NonPlanarAroma, ...]:
    """All non-planar aromas with exactly n vertices."""
    return tuple(
        sorted({forget_planarity_aroma(a) for a in enumerate_aromas(n, labels)},
               key=lambda a: a.enc)
    )
