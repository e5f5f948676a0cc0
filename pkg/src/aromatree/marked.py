"""Marked aromatic planar trees: the elementary endomorphism algebra.

A marked element is an aromatic planar tree carrier (multi-aroma times a
planar tree) with one marked vertex and a 1-based insertion slot.  It
represents the S(PA)-linear endomorphism "graft the argument's tree part
into the marked vertex at that slot".  Marks live either on the tree part
(addresses ``("t", path)``) or inside an aroma factor
(``("a", factor_index, aroma_address)``).

Text form of an address: ``r`` / ``r.1.2`` for tree vertices,
``c2.1`` / ``c2.1.3`` for factor 2, spoke 1 (and a path into its trees).

The subalgebra generated by the maps ``delta(x): z -> z |> x`` closes on
marked elements; composition follows the functional contract

    apply(compose(m1, m2), z) == apply(m1, apply(m2, z))

which makes compose "graft the right factor's carrier tree into the left
factor's carrier at the left factor's mark, keep the right factor's mark".
The trace ``tau`` closes the mark into a cycle, producing an aroma.

``Endo`` is the symbolic layer: linear combinations of composition chains
in the generators ``delta(x)`` and ``tilde_delta(x)``.  A chain whose
leftmost atom is a ``delta`` materialises into marked elements (that is
the elementary algebra); a leading ``tilde_delta`` does not.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .apt import APTElement, APTKey, apt_bracket, apt_graft
from .aromas import (
    MA_UNIT,
    MultiAroma,
    PlanarAroma,
    SAElement,
    Spoke,
    canonicalize_spokes,
    graft_into_spokes,
)
from .freelie import LyndonWord, Word, embed, go_graft, u_of_tree
from .linear import LinComb, bilinear_extend
from .trees import Address, PlanarTree, graft_at

TREE_MARK = "TREE-MARK"
AROMA_MARK = "AROMA-MARK"
COMPOSITE = "COMPOSITE"


def _aut_min_addr(spokes: tuple[Spoke, ...], addr: Address) -> Address:
    """Minimal image of an aroma address under the rotation automorphisms."""
    m = len(spokes)
    encs = tuple(s.enc for s in spokes)
    best = addr
    for r in range(1, m):
        if tuple(encs[(i + r) % m] for i in range(m)) == encs:
            cand = ((addr[0] - r) % m,) + addr[1:]
            if cand < best:
                best = cand
    return best


def canonical_aroma_and_addr(
    raw_spokes: tuple[Spoke, ...], addr: Address
) -> tuple[PlanarAroma, Address]:
    aroma, shift = PlanarAroma.from_raw(raw_spokes)
    fixed = ((addr[0] - shift) % len(raw_spokes),) + addr[1:]
    return aroma, _aut_min_addr(aroma.spokes, fixed)


class MarkedElement:
    """Carrier (multi-aroma, planar tree) plus a marked vertex and slot."""

    __slots__ = ("aromas", "tree", "mark", "slot", "enc", "degree", "_hash")

    def __init__(
        self,
        aromas: MultiAroma,
        tree: PlanarTree,
        mark: tuple,
        slot: int,
    ):
        self.aromas = aromas
        self.tree = tree
        self.mark = mark
        out_deg = self._out_degree(aromas, tree, mark)
        if not 1 <= slot <= out_deg + 1:
            raise ValueError(f"slot {slot} out of range 1..{out_deg + 1} at {mark}")
        self.slot = slot
        carrier = tree.enc if aromas.is_unit() else aromas.enc + " " + tree.enc
        self.enc = f"({format_mark(mark)},{slot},{carrier})"
        self.degree = aromas.size + tree.size
        self._hash = hash(("mk", self.enc))

    @staticmethod
    def _out_degree(aromas: MultiAroma, tree: PlanarTree, mark: tuple) -> int:
        if mark[0] == "t":
            return len(tree.subtree(mark[1]).children)
        _, fi, addr = mark
        if not 0 <= fi < len(aromas.factors):
            raise ValueError(f"no aroma factor {fi} in {aromas.enc}")
        return aromas.factors[fi].out_degree(addr)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MarkedElement) and self.enc == other.enc

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return self.enc

    def classify(self) -> str:
        if self.mark[0] == "t":
            return TREE_MARK
        return AROMA_MARK if len(self.mark[2]) == 1 else COMPOSITE


def format_mark(mark: tuple) -> str:
    if mark[0] == "t":
        return "r" + "".join(f".{i}" for i in mark[1])
    _, fi, addr = mark
    return f"c{fi + 1}" + "".join(f".{i + 1 if n == 0 else i}" for n, i in enumerate(addr))


def parse_mark(s: str) -> tuple:
    """Inverse of format_mark (factor and spoke indices are printed 1-based)."""
    if s == "r" or s.startswith("r."):
        parts = s.split(".")[1:]
        return ("t", tuple(int(p) for p in parts))
    if s.startswith("c"):
        parts = s.split(".")
        fi = int(parts[0][1:]) - 1
        nums = [int(p) for p in parts[1:]]
        if not nums:
            raise ValueError(f"aroma address needs a spoke index: {s!r}")
        addr = (nums[0] - 1,) + tuple(nums[1:])
        return ("a", fi, addr)
    raise ValueError(f"bad mark address: {s!r}")


def make_marked(
    factors: tuple[PlanarAroma, ...],
    tree: PlanarTree,
    mark: tuple,
    slot: int,
) -> MarkedElement:
    """Canonical marked element: sorted factors, automorphism-minimal mark."""
    if mark[0] == "t":
        return MarkedElement(MultiAroma(factors), tree, mark, slot)
    _, fi, addr = mark
    marked_factor = factors[fi]
    addr = _aut_min_addr(marked_factor.spokes, addr)
    ordered = sorted(factors, key=lambda a: a.enc)
    new_fi = next(i for i, a in enumerate(ordered) if a.enc == marked_factor.enc)
    return MarkedElement(MultiAroma(tuple(ordered)), tree, ("a", new_fi, addr), slot)


def _tree_insert_block(
    tree: PlanarTree, path: Address, slot: int, letters: tuple[PlanarTree, ...]
) -> PlanarTree:
    node = tree.subtree(path)
    k = len(node.children)
    if not 1 <= slot <= k + 1:
        raise ValueError(f"slot {slot} out of range 1..{k + 1}")
    out = tree
    for j, t in enumerate(letters):
        out = graft_at(t, out, path, slot + j)
    return out


def _spokes_insert_block(
    spokes: tuple[Spoke, ...], addr: Address, slot: int, letters: tuple[PlanarTree, ...]
) -> tuple[Spoke, ...]:
    out = spokes
    for j, t in enumerate(letters):
        out = graft_into_spokes(t, out, addr, slot + j)
    return out


def apply_marked_word(m: MarkedElement, letters: tuple[PlanarTree, ...]) -> APTKey:
    """Insert a word's letters at consecutive slots starting at the mark slot."""
    if m.mark[0] == "t":
        new_tree = _tree_insert_block(m.tree, m.mark[1], m.slot, letters)
        return APTKey(m.aromas, LyndonWord((new_tree,)))
    _, fi, addr = m.mark
    factor = m.aromas.factors[fi]
    new_spokes = _spokes_insert_block(factor.spokes, addr, m.slot, letters)
    rest = m.aromas.factors[:fi] + m.aromas.factors[fi + 1 :]
    new_factors = rest + (PlanarAroma(new_spokes),)
    return APTKey(MultiAroma(new_factors), LyndonWord((m.tree,)))


def apply_marked(m: MarkedElement, x: APTElement) -> APTElement:
    """Evaluate the endomorphism on an aromatic element (S(PA)-linear)."""
    out: APTElement = LinComb.zero()
    for k, c in x.terms.items():
        for w, cw in embed(LinComb.single(k.lie)).terms.items():
            base = apply_marked_word(m, w.letters)
            key = APTKey(base.aromas.mul(k.aromas), base.lie)
            out = out + LinComb.single(key, c * cw)
    return out


# Omega elements: linear combinations of marked elements.
OmegaElement = LinComb


def omega_apply(o: OmegaElement, x: APTElement) -> APTElement:
    out: APTElement = LinComb.zero()
    for m, c in o.terms.items():
        out = out + apply_marked(m, x).scale(c)
    return out


def compose_marked(m1: MarkedElement, m2: MarkedElement) -> MarkedElement:
    """Functional composition: apply(compose(m1,m2), z) = apply(m1, apply(m2, z))."""
    if m1.mark[0] == "t":
        new_tree = graft_at(m2.tree, m1.tree, m1.mark[1], m1.slot)
        root_addr = m1.mark[1] + (m1.slot,)
        factors = m1.aromas.factors + m2.aromas.factors
        if m2.mark[0] == "t":
            mark = ("t", root_addr + m2.mark[1])
            return make_marked(factors, new_tree, mark, m2.slot)
        _, fj, addr2 = m2.mark
        mark = ("a", len(m1.aromas.factors) + fj, addr2)
        return make_marked(factors, new_tree, mark, m2.slot)
    # m1's mark sits in an aroma factor: m2's tree is swallowed by that factor
    _, fi, addr = m1.mark
    factor = m1.aromas.factors[fi]
    spoke = factor.spokes[addr[0]]
    if len(addr) == 1:
        child_idx = m1.slot if m1.slot <= spoke.cycle_pos else m1.slot - 1
        root_addr = (addr[0], child_idx)
    else:
        root_addr = addr + (m1.slot,)
    raw_spokes = graft_into_spokes(m2.tree, factor.spokes, addr, m1.slot)
    rest1 = m1.aromas.factors[:fi] + m1.aromas.factors[fi + 1 :]
    if m2.mark[0] == "t":
        # mark lands inside the enlarged factor (the composite class)
        enlarged, fixed = canonical_aroma_and_addr(raw_spokes, root_addr + m2.mark[1])
        factors = rest1 + m2.aromas.factors + (enlarged,)
        mark = ("a", len(factors) - 1, fixed)
        return make_marked(factors, m1.tree, mark, m2.slot)
    # both marks on aromas: the enlarged factor closes into a plain scalar factor
    enlarged = PlanarAroma(raw_spokes)
    _, fj, addr2 = m2.mark
    factors = rest1 + (enlarged,) + m2.aromas.factors
    mark = ("a", len(rest1) + 1 + fj, addr2)
    return make_marked(factors, m1.tree, mark, m2.slot)


def omega_compose(o1: OmegaElement, o2: OmegaElement) -> OmegaElement:
    return bilinear_extend(
        lambda a, b: LinComb.single(compose_marked(a, b))
    )(o1, o2)


def tau_marked(m: MarkedElement) -> MultiAroma:
    """Close the mark: tree marks wrap the root path into a new cycle,
    aroma marks swallow the carrier tree into the marked factor."""
    if m.mark[0] == "t":
        path = m.mark[1]
        t = m.tree
        chain: list[tuple[PlanarTree, int]] = []  # (vertex, child index taken)
        node = t
        for i in path:
            chain.append((node, i))
            node = node.children[i - 1]
        spokes = [Spoke(node.label, m.slot, node.children)]
        for vertex, i in reversed(chain):
            kids = vertex.children[: i - 1] + vertex.children[i:]
            spokes.append(Spoke(vertex.label, i, kids))
        aroma = PlanarAroma(tuple(spokes))
        return MultiAroma(m.aromas.factors + (aroma,))
    _, fi, addr = m.mark
    factor = m.aromas.factors[fi]
    new_spokes = graft_into_spokes(m.tree, factor.spokes, addr, m.slot)
    rest = m.aromas.factors[:fi] + m.aromas.factors[fi + 1 :]
    return MultiAroma(rest + (PlanarAroma(new_spokes),))


def tau(o: OmegaElement | MarkedElement) -> SAElement:
    if isinstance(o, MarkedElement):
        return LinComb.single(tau_marked(o))
    out: SAElement = LinComb.zero()
    for m, c in o.terms.items():
        out = out + LinComb.single(tau_marked(m), c)
    return out


def open_cycle(a: PlanarAroma, edge: int) -> MarkedElement:
    """Remove spoke ``edge``'s cycle edge; the inverse image of tau on aromas."""
    m = len(a.spokes)
    order = [(edge - 1 - j) % m for j in range(m)]  # root first, down to `edge`
    root_idx = order[0]

    def build(pos: int) -> PlanarTree:
        s = a.spokes[order[pos]]
        if pos == m - 1:
            return PlanarTree(s.label, s.children)
        child = build(pos + 1)
        kids = s.children[: s.cycle_pos - 1] + (child,) + s.children[s.cycle_pos - 1 :]
        return PlanarTree(s.label, kids)

    tree = build(0)
    path = tuple(a.spokes[order[j]].cycle_pos for j in range(m - 1))
    slot = a.spokes[edge].cycle_pos
    return MarkedElement(MA_UNIT, tree, ("t", path), slot)


def tau_preimages(a: PlanarAroma) -> list[MarkedElement]:
    return [open_cycle(a, i) for i in range(len(a.spokes))]


def _carrier_vertices(m: MarkedElement):
    """All (mark-location, is_marked) pairs of the carrier, trees and aromas."""
    for path in m.tree.vertices():
        yield ("t", path)
    for fi, factor in enumerate(m.aromas.factors):
        for addr in factor.vertices():
            yield ("a", fi, addr)


def _leftmost_graft_marked(t: PlanarTree, m: MarkedElement, loc: tuple) -> MarkedElement:
    """Graft t leftmost at the carrier vertex loc, relocating the mark."""
    slot = m.slot
    mark = m.mark
    if loc[0] == "t":
        new_tree = graft_at(t, m.tree, loc[1], 1)
        if mark[0] == "t":
            if mark[1] == loc[1]:
                slot += 1
            mark = ("t", _shift_path(mark[1], loc[1]))
        return make_marked(m.aromas.factors, new_tree, mark, slot)
    _, fi, addr = loc
    factor = m.aromas.factors[fi]
    raw = graft_into_spokes(t, factor.spokes, addr, 1)
    if mark[0] == "a" and mark[1] == fi:
        new_addr = _shift_aroma_addr(mark[2], addr)
        if mark[2] == addr:
            slot += 1
        enlarged, new_addr = canonical_aroma_and_addr(raw, new_addr)
        factors = (
            m.aromas.factors[:fi] + m.aromas.factors[fi + 1 :] + (enlarged,)
        )
        return make_marked(factors, m.tree, ("a", len(factors) - 1, new_addr), slot)
    enlarged = PlanarAroma(raw)
    rest = m.aromas.factors[:fi] + m.aromas.factors[fi + 1 :]
    if mark[0] == "a":
        mj = mark[1] if mark[1] < fi else mark[1] - 1
        factors = rest + (enlarged,)
        return make_marked(factors, m.tree, ("a", mj, mark[2]), slot)
    return make_marked(rest + (enlarged,), m.tree, mark, slot)


def _shift_path(mark_path: Address, insert_path: Address) -> Address:
    """Leftmost insertion at insert_path pushes sibling indices right."""
    d = len(insert_path)
    if len(mark_path) > d and mark_path[:d] == insert_path:
        return insert_path + (mark_path[d] + 1,) + mark_path[d + 1 :]
    return mark_path


def _shift_aroma_addr(mark_addr: Address, insert_addr: Address) -> Address:
    if mark_addr[0] != insert_addr[0]:
        return mark_addr
    if len(insert_addr) == 1:
        # insertion at the spoke vertex shifts its hanging-tree indices
        if len(mark_addr) > 1:
            return (mark_addr[0], mark_addr[1] + 1) + mark_addr[2:]
        return mark_addr
    # insertion inside a hanging tree
    d = len(insert_addr)
    if len(mark_addr) > d and mark_addr[:d] == insert_addr:
        return insert_addr + (mark_addr[d] + 1,) + mark_addr[d + 1 :]
    return mark_addr


def _tree_module_graft(t: PlanarTree, m: MarkedElement) -> OmegaElement:
    """x |> (v,n,c) = sum over carrier vertices w of (v, n + [w = v], x |>_w c)."""
    out: OmegaElement = LinComb.zero()
    for loc in _carrier_vertices(m):
        out = out + LinComb.single(_leftmost_graft_marked(t, m, loc))
    return out


def _word_module_graft(letters: tuple[PlanarTree, ...], m: MarkedElement) -> OmegaElement:
    if not letters:
        return LinComb.single(m)
    if len(letters) == 1:
        return _tree_module_graft(letters[0], m)
    head, rest = letters[0], letters[1:]
    inner = _word_module_graft(rest, m)
    first: OmegaElement = LinComb.zero()
    for mm, c in inner.terms.items():
        first = first + _tree_module_graft(head, mm).scale(c)
    shifted = go_graft(u_of_tree(head), LinComb.single(Word(rest)))
    out = first
    for w, c in shifted.terms.items():
        out = out - _word_module_graft(w.letters, m).scale(c)
    return out


def _add_factors(m: MarkedElement, extra: MultiAroma) -> MarkedElement:
    if extra.is_unit():
        return m
    if m.mark[0] == "t":
        return make_marked(m.aromas.factors + extra.factors, m.tree, m.mark, m.slot)
    _, fi, addr = m.mark
    factors = m.aromas.factors + extra.factors
    return make_marked(factors, m.tree, ("a", fi, addr), m.slot)


def module_graft(x: APTElement, m: MarkedElement | OmegaElement) -> OmegaElement:
    """The APT-module action on marked elements."""
    if isinstance(m, LinComb):
        out: OmegaElement = LinComb.zero()
        for mm, c in m.terms.items():
            out = out + module_graft(x, mm).scale(c)
        return out
    out = LinComb.zero()
    for k, c in x.terms.items():
        part: OmegaElement = LinComb.zero()
        for w, cw in embed(LinComb.single(k.lie)).terms.items():
            part = part + _word_module_graft(w.letters, m).scale(cw)
        for mm, cm in part.terms.items():
            out = out + LinComb.single(_add_factors(mm, k.aromas), c * cm)
    return out


def delta_omega(k: APTKey) -> OmegaElement:
    """delta(a t) as a marked sum: one slot-1 mark per carrier vertex."""
    if len(k.lie) != 1:
        raise ValueError(
            f"delta of a bracket-valued element is not a marked sum: {k.enc}"
        )
    t = k.lie.letters[0]
    out: OmegaElement = LinComb.zero()
    for path in t.vertices():
        out = out + LinComb.single(
            MarkedElement(k.aromas, t, ("t", path), 1)
        )
    for fi, factor in enumerate(k.aromas.factors):
        for addr in factor.vertices():
            out = out + LinComb.single(
                make_marked(k.aromas.factors, t, ("a", fi, addr), 1)
            )
    return out


# ---------------------------------------------------------------------------
# Symbolic endomorphisms: chains of delta / tilde-delta generators.

D = "d"
DT = "dt"

Atom = tuple  # (D | DT, APTKey)
Chain = tuple  # tuple[Atom, ...]


class Endo:
    """Linear combination of composition chains of delta / tilde-delta atoms."""

    __slots__ = ("chains",)

    def __init__(self, chains: LinComb):
        self.chains = chains

    @staticmethod
    def delta(x: APTElement) -> "Endo":
        return Endo(x.map_keys(lambda k: LinComb.single(((D, k),))))

    @staticmethod
    def tilde_delta(x: APTElement) -> "Endo":
        return Endo(x.map_keys(lambda k: LinComb.single(((DT, k),))))

    def compose(self, other: "Endo") -> "Endo":
        return Endo(
            bilinear_extend(lambda c1, c2: LinComb.single(c1 + c2))(
                self.chains, other.chains
            )
        )

    def __add__(self, other: "Endo") -> "Endo":
        return Endo(self.chains + other.chains)

    def __sub__(self, other: "Endo") -> "Endo":
        return Endo(self.chains - other.chains)

    def scale(self, c) -> "Endo":
        return Endo(self.chains.scale(c))

    def apply(self, z: APTElement) -> APTElement:
        out: APTElement = LinComb.zero()
        for chain, c in self.chains.terms.items():
            val = z
            for kind, key in reversed(chain):
                elt = LinComb.single(key)
                grafted = apt_graft(val, elt)
                if kind == DT:
                    grafted = grafted + apt_bracket(val, elt)
                val = grafted
            out = out + val.scale(c)
        return out

    def to_omega(self) -> OmegaElement:
        """Materialise into marked elements; requires a delta-leading chain."""
        out: OmegaElement = LinComb.zero()
        for chain, c in self.chains.terms.items():
            kind, key = chain[0]
            if kind != D:
                raise ValueError(
                    "chain does not start with a delta generator; "
                    "not an elementary endomorphism"
                )
            acc = delta_omega(key)
            for kind, key in chain[1:]:
                nxt = delta_omega(key)
                composed = omega_compose(acc, nxt)
                if kind == DT:
                    composed = composed + _omega_compose_bracket(acc, key)
                acc = composed
            out = out + acc.scale(c)
        return out


def _marked_compose_bracket(m: MarkedElement, k: APTKey) -> OmegaElement:
    """m o (z -> [z, x]) for a basis x = (aromas, lie), as marked elements."""
    out: OmegaElement = LinComb.zero()
    for w, cw in embed(LinComb.single(k.lie)).terms.items():
        letters = w.letters
        length = len(letters)
        # both terms put the letters where the mark sits; the argument slot
        # decides whether the argument lands left (z y) or right (y z) of them
        right = _insert_block_keep_mark(m, letters, m.slot, m.slot)
        left = _insert_block_keep_mark(m, letters, m.slot, m.slot + length)
        out = out + LinComb.single(_add_factors(right, k.aromas), cw)
        out = out - LinComb.single(_add_factors(left, k.aromas), cw)
    return out


def _insert_block_keep_mark(
    m: MarkedElement, letters: tuple[PlanarTree, ...], at: int, new_slot: int
) -> MarkedElement:
    if m.mark[0] == "t":
        new_tree = _tree_insert_block(m.tree, m.mark[1], at, letters)
        return MarkedElement(m.aromas, new_tree, m.mark, new_slot)
    _, fi, addr = m.mark
    factor = m.aromas.factors[fi]
    raw = _spokes_insert_block(factor.spokes, addr, at, letters)
    enlarged, fixed = canonical_aroma_and_addr(raw, addr)
    rest = m.aromas.factors[:fi] + m.aromas.factors[fi + 1 :]
    factors = rest + (enlarged,)
    return make_marked(factors, m.tree, ("a", len(factors) - 1, fixed), new_slot)


def _omega_compose_bracket(o: OmegaElement, k: APTKey) -> OmegaElement:
    out: OmegaElement = LinComb.zero()
    for m, c in o.terms.items():
        out = out + _marked_compose_bracket(m, k).scale(c)
    return out


def delta(x: APTElement) -> Endo:
    """z -> z |> x  (right grafting by x)."""
    return Endo.delta(x)


def tilde_delta(x: APTElement) -> Endo:
    """z -> z |> x + [z, x]  (the sub-adjacent delta)."""
    return Endo.tilde_delta(x)


def divergence(x: APTElement) -> SAElement:
    """Div = tau o delta."""
    return tau(delta(x).to_omega())


# ---------------------------------------------------------------------------
# Expressing tree-marked elements in the delta generators.


class Expr:
    """Expression tree over delta / tilde-delta, composition, module grafts."""

    __slots__ = ()


class ExDelta(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: APTElement):
        self.arg = arg

    def __repr__(self):
        return f"d({self.arg!r})"


class ExTilde(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: APTElement):
        self.arg = arg

    def __repr__(self):
        return f"dt({self.arg!r})"


class ExCompose(Expr):
    __slots__ = ("left", "right")

    def __init__(self, left: Expr, right: Expr):
        self.left = left
        self.right = right

    def __repr__(self):
        return f"({self.left!r} o {self.right!r})"


class ExGraft(Expr):
    __slots__ = ("vector", "sub")

    def __init__(self, vector: APTElement, sub: Expr):
        self.vector = vector
        self.sub = sub

    def __repr__(self):
        return f"({self.vector!r} |> {self.sub!r})"


class ExSum(Expr):
    __slots__ = ("parts",)

    def __init__(self, parts: tuple[tuple[Fraction, Expr], ...]):
        self.parts = parts

    def __repr__(self):
        return " + ".join(f"{c}*{e!r}" for c, e in self.parts)


def flatten(e: Expr) -> LinComb:
    """Rewrite into delta/tilde-delta composition chains.

    Module grafts are eliminated with the Leibniz rule and the identities

        y |> delta(x)  = delta(y |> x) - delta(x) o tilde_delta(y)
        y |> tdelta(x) = tdelta(y |> x) - delta(x) o tilde_delta(y)
    """
    if isinstance(e, ExDelta):
        return e.arg.map_keys(lambda k: LinComb.single(((D, k),)))
    if isinstance(e, ExTilde):
        return e.arg.map_keys(lambda k: LinComb.single(((DT, k),)))
    if isinstance(e, ExCompose):
        return bilinear_extend(lambda c1, c2: LinComb.single(c1 + c2))(
            flatten(e.left), flatten(e.right)
        )
    if isinstance(e, ExSum):
        out = LinComb.zero()
        for c, sub in e.parts:
            out = out + flatten(sub).scale(c)
        return out
    if isinstance(e, ExGraft):
        out = LinComb.zero()
        for chain, c in flatten(e.sub).terms.items():
            out = out + _graft_into_chain(e.vector, chain).scale(c)
        return out
    raise TypeError(f"unknown expression node {e!r}")


def _graft_atom(y: APTElement, atom: Atom) -> LinComb:
    kind, k = atom
    grafted = apt_graft(y, LinComb.single(k))
    head = grafted.map_keys(lambda k2: LinComb.single(((kind, k2),)))
    correction = y.map_keys(
        lambda ky: LinComb.single(((D, k), (DT, ky)))
    )
    return head - correction


def _graft_into_chain(y: APTElement, chain: Chain) -> LinComb:
    out = LinComb.zero()
    for i in range(len(chain)):
        for repl, c in _graft_atom(y, chain[i]).terms.items():
            out = out + LinComb.single(chain[:i] + repl + chain[i + 1 :], c)
    return out


def is_delta_leftmost(chains: LinComb) -> bool:
    return all(chain[0][0] == D for chain in chains.terms)


def eval_chains(chains: LinComb) -> OmegaElement:
    return Endo(chains).to_omega()


def express_marked(m: MarkedElement) -> Expr:
    """A delta-generator expression reproducing a tree-marked element.

    Only defined for carriers without aroma factors and marks on the tree
    part; the recursion follows the generation procedure: peel non-root
    marks by composition, reach root marks through delta, and walk the
    slot down by grafting the leftmost branch.
    """
    if m.mark[0] != "t":
        raise ValueError("express_marked needs the mark on the tree part")
    if not m.aromas.is_unit():
        raise ValueError("express_marked needs a carrier without aroma factors")
    return _express(m.tree, m.mark[1], m.slot)


@lru_cache(maxsize=None)
def _express(t: PlanarTree, path: Address, slot: int) -> Expr:
    if path:
        parent_path, idx = path[:-1], path[-1]
        parent = t.subtree(parent_path)
        sub = parent.children[idx - 1]
        kids = parent.children[: idx - 1] + parent.children[idx:]
        rest = _replace_subtree(t, parent_path, PlanarTree(parent.label, kids))
        return ExCompose(_express(rest, parent_path, idx), _express(sub, (), slot))
    if slot == 1:
        if t.size == 1:
            return ExDelta(apt_of_tree_local(t))
        parts: list[tuple[Fraction, Expr]] = [(Fraction(1), ExDelta(apt_of_tree_local(t)))]
        for v in t.vertices():
            if v:
                parts.append((Fraction(-1), _express(t, v, 1)))
        return ExSum(tuple(parts))
    # root mark, slot q > 1: walk down using the leftmost branch
    t1 = t.children[0]
    rest = PlanarTree(t.label, t.children[1:])
    parts = [(Fraction(1), ExGraft(apt_of_tree_local(t1), _express(rest, (), slot - 1)))]
    for v in rest.vertices():
        if v:
            parts.append((Fraction(-1), _express(graft_at(t1, rest, v, 1), (), slot - 1)))
    return ExSum(tuple(parts))


def _replace_subtree(t: PlanarTree, path: Address, new: PlanarTree) -> PlanarTree:
    if not path:
        return new
    kids = list(t.children)
    kids[path[0] - 1] = _replace_subtree(kids[path[0] - 1], path[1:], new)
    return PlanarTree(t.label, tuple(kids))


def apt_of_tree_local(t: PlanarTree) -> APTElement:
    return LinComb.single(APTKey(MA_UNIT, LyndonWord((t,))))


@lru_cache(maxsize=None)
def enumerate_marked_trees(n: int) -> tuple[MarkedElement, ...]:
    """All tree-carrier marked elements with exactly n vertices."""
    from .trees import enumerate_trees

    out = []
    for t in enumerate_trees(n):
        for path in t.vertices():
            for slot in range(1, len(t.subtree(path).children) + 2):
                out.append(MarkedElement(MA_UNIT, t, ("t", path), slot))
    return tuple(out)
