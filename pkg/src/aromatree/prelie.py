"""Independent pre-Lie-Rinehart oracle on non-planar aromatic trees.

This module re-implements the torsion-free story from scratch: non-planar
grafting, marked trees as endomorphisms, the closing trace, and the
constructive generation of every aromatic tree from single-vertex
generators.  The abelianization bridge projects the planar post-Lie world
here: Lie brackets of length >= 2 die, child order and cycle-edge
positions are erased.

Marked non-planar trees are stored as decorated trees: the marked vertex
carries a ``!`` suffix on its label.  Canonical child sorting then gives a
canonical form for free, including tree automorphisms (decorating two
symmetric vertices yields the same decorated tree, with multiplicity
handled by the linear combinations).
"""

from __future__ import annotations

from functools import lru_cache

from .apt import APTElement
from .aromas import MultiAroma, NonPlanarAroma, forget_planarity_aroma
from .linear import LinComb, bilinear_extend
from .trees import Address, NonPlanarTree, forget_planarity

NPSpoke = tuple[str, tuple[NonPlanarTree, ...]]


class NPMultiAroma:
    """Commutative monomial of non-planar aromas."""

    __slots__ = ("factors", "enc", "size", "_hash")

    def __init__(self, factors: tuple[NonPlanarAroma, ...] = ()):
        self.factors = tuple(sorted(factors, key=lambda a: a.enc))
        self.enc = "{" + ",".join(a.enc for a in self.factors) + "}" if self.factors else "1"
        self.size = sum(a.size for a in self.factors)
        self._hash = hash(("npma", self.enc))

    def __eq__(self, other):
        return isinstance(other, NPMultiAroma) and self.enc == other.enc

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.enc

    def is_unit(self):
        return not self.factors

    def mul(self, other: "NPMultiAroma") -> "NPMultiAroma":
        return NPMultiAroma(self.factors + other.factors)


NPMA_UNIT = NPMultiAroma()


class ATKey:
    """Basis aromatic tree: non-planar multi-aroma times non-planar tree."""

    __slots__ = ("aromas", "tree", "enc", "degree", "_hash")

    def __init__(self, aromas: NPMultiAroma, tree: NonPlanarTree):
        self.aromas = aromas
        self.tree = tree
        self.enc = tree.enc if aromas.is_unit() else aromas.enc + " " + tree.enc
        self.degree = aromas.size + tree.size
        self._hash = hash(("at", self.enc))

    def __eq__(self, other):
        return isinstance(other, ATKey) and self.enc == other.enc

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.enc


ATElement = LinComb


def at_of_tree(t: NonPlanarTree) -> ATElement:
    return LinComb.single(ATKey(NPMA_UNIT, t))


def _np_graft_vertex(t1: NonPlanarTree, host: NonPlanarTree, addr: Address) -> NonPlanarTree:
    if not addr:
        return NonPlanarTree(host.label, host.children + (t1,))
    kids = list(host.children)
    kids[addr[0] - 1] = _np_graft_vertex(t1, kids[addr[0] - 1], addr[1:])
    return NonPlanarTree(host.label, tuple(kids))


@lru_cache(maxsize=None)
def np_graft_tree(t1: NonPlanarTree, t2: NonPlanarTree) -> LinComb:
    """Sum over vertices of t2 of adding an edge from the vertex to t1's root."""
    return LinComb((_np_graft_vertex(t1, t2, v), 1) for v in t2.vertices())


def _np_graft_into_aroma(
    t1: NonPlanarTree, a: NonPlanarAroma
) -> LinComb:
    out: dict[NonPlanarAroma, int] = {}
    for i, (label, kids) in enumerate(a.spokes):
        grown = a.spokes[:i] + ((label, kids + (t1,)),) + a.spokes[i + 1 :]
        key = NonPlanarAroma(grown)
        out[key] = out.get(key, 0) + 1
        for j, child in enumerate(kids):
            for t2, c in np_graft_tree(t1, child).terms.items():
                new_kids = kids[:j] + (t2,) + kids[j + 1 :]
                key = NonPlanarAroma(a.spokes[:i] + ((label, new_kids),) + a.spokes[i + 1 :])
                out[key] = out.get(key, 0) + c
    return LinComb(out.items())


def _np_graft_keys(x: ATKey, y: ATKey) -> ATElement:
    out: ATElement = LinComb.zero()
    aromas = x.aromas.mul(y.aromas)
    for t, c in np_graft_tree(x.tree, y.tree).terms.items():
        out = out + LinComb.single(ATKey(aromas, t), c)
    for i, factor in enumerate(y.aromas.factors):
        rest = y.aromas.factors[:i] + y.aromas.factors[i + 1 :]
        for a2, c in _np_graft_into_aroma(x.tree, factor).terms.items():
            ma = NPMultiAroma(rest + (a2,)).mul(x.aromas)
            out = out + LinComb.single(ATKey(ma, y.tree), c)
    return out


def np_graft(x: ATElement, y: ATElement) -> ATElement:
    """The pre-Lie grafting product on aromatic trees."""
    return bilinear_extend(_np_graft_keys)(x, y)


def np_rho(x: ATElement, s: LinComb) -> LinComb:
    """Anchor: graft tree parts onto every vertex of every aroma factor."""
    out: LinComb = LinComb.zero()
    for k, c in x.terms.items():
        for m, cm in s.terms.items():
            for i, factor in enumerate(m.factors):
                rest = m.factors[:i] + m.factors[i + 1 :]
                for a2, c2 in _np_graft_into_aroma(k.tree, factor).terms.items():
                    ma = NPMultiAroma(rest + (a2,)).mul(k.aromas)
                    out = out + LinComb.single(ma, c * cm * c2)
    return out


def np_sa_mul(a: LinComb, b: LinComb) -> LinComb:
    return bilinear_extend(lambda x, y: LinComb.single(x.mul(y)))(a, b)


# -- marked non-planar trees --------------------------------------------------

MARK_SUFFIX = "!"


def decorate(t: NonPlanarTree, addr: Address) -> NonPlanarTree:
    if not addr:
        return NonPlanarTree(t.label + MARK_SUFFIX, t.children)
    kids = list(t.children)
    kids[addr[0] - 1] = decorate(kids[addr[0] - 1], addr[1:])
    return NonPlanarTree(t.label, tuple(kids))


def undecorate(t: NonPlanarTree) -> NonPlanarTree:
    label = t.label[:-1] if t.label.endswith(MARK_SUFFIX) else t.label
    return NonPlanarTree(label, tuple(undecorate(c) for c in t.children))


def find_mark(t: NonPlanarTree) -> Address:
    if t.label.endswith(MARK_SUFFIX):
        return ()
    for i, c in enumerate(t.children, start=1):
        try:
            return (i,) + find_mark(c)
        except ValueError:
            continue
    raise ValueError("no marked vertex")


class NPMarked:
    """Marked non-planar aromatic tree; the tree part carries the decoration."""

    __slots__ = ("aromas", "tree", "enc", "degree", "_hash")

    def __init__(self, aromas: NPMultiAroma, tree: NonPlanarTree):
        find_mark(tree)  # validates exactly-one-decoration on the main path
        self.aromas = aromas
        self.tree = tree
        self.enc = tree.enc if aromas.is_unit() else aromas.enc + " " + tree.enc
        self.degree = aromas.size + tree.size
        self._hash = hash(("npm", self.enc))

    @staticmethod
    def at(tree: NonPlanarTree, addr: Address, aromas: NPMultiAroma = NPMA_UNIT) -> "NPMarked":
        return NPMarked(aromas, decorate(tree, addr))

    def __eq__(self, other):
        return isinstance(other, NPMarked) and self.enc == other.enc

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.enc


def np_delta(t: NonPlanarTree) -> LinComb:
    """delta(t) = sum of marks over all vertices (automorphic marks merge)."""
    return LinComb((NPMarked.at(t, v), 1) for v in t.vertices())


def _replace_marked(t: NonPlanarTree, new_subtrees: tuple[NonPlanarTree, ...]) -> NonPlanarTree:
    """Attach subtrees below the marked vertex and clear its decoration."""
    if t.label.endswith(MARK_SUFFIX):
        return NonPlanarTree(t.label[: -len(MARK_SUFFIX)], t.children + new_subtrees)
    kids = list(t.children)
    for i, c in enumerate(kids):
        try:
            find_mark(c)
        except ValueError:
            continue
        kids[i] = _replace_marked(c, new_subtrees)
        return NonPlanarTree(t.label, tuple(kids))
    raise ValueError("no marked vertex")


def np_compose(m1: NPMarked, m2: NPMarked) -> NPMarked:
    """Functional composition: (m1 o m2)(s) = m1(m2(s))."""
    new_tree = _replace_marked(m1.tree, (m2.tree,))
    return NPMarked(m1.aromas.mul(m2.aromas), new_tree)


def np_apply(m: NPMarked, x: ATElement) -> ATElement:
    """Evaluate the endomorphism: graft the argument's tree at the mark."""
    out: ATElement = LinComb.zero()
    for k, c in x.terms.items():
        new_tree = undecorate(_replace_marked(m.tree, (k.tree,)))
        out = out + LinComb.single(
            ATKey(m.aromas.mul(k.aromas), new_tree), c
        )
    return out


def np_tau(m: NPMarked) -> NPMultiAroma:
    """Close the mark into the root, producing an aroma."""
    t = m.tree
    path = find_mark(t)
    chain: list[tuple[str, tuple[NonPlanarTree, ...]]] = []
    node = t
    for i in path:
        rest = node.children[: i - 1] + node.children[i:]
        chain.append((node.label, tuple(undecorate(c) for c in rest)))
        node = node.children[i - 1]
    label = node.label[: -len(MARK_SUFFIX)]
    spokes = [(label, tuple(undecorate(c) for c in node.children))]
    spokes.extend(reversed(chain))
    return NPMultiAroma(m.aromas.factors + (NonPlanarAroma(tuple(spokes)),))


def np_tau_lin(v: LinComb) -> LinComb:
    out: LinComb = LinComb.zero()
    for m, c in v.terms.items():
        out = out + LinComb.single(np_tau(m), c)
    return out


def np_divergence(x: ATElement) -> LinComb:
    """tau o delta computed entirely on the non-planar side.

    Tree-vertex marks close into a new cycle; aroma-vertex marks swallow
    the tree part into the marked factor.
    """
    out: LinComb = LinComb.zero()
    for k, c in x.terms.items():
        for v in k.tree.vertices():
            closed = np_tau(NPMarked(k.aromas, decorate(k.tree, v)))
            out = out + LinComb.single(closed, c)
        for i, factor in enumerate(k.aromas.factors):
            rest = k.aromas.factors[:i] + k.aromas.factors[i + 1 :]
            for a2, c2 in _np_graft_into_aroma(k.tree, factor).terms.items():
                out = out + LinComb.single(NPMultiAroma(rest + (a2,)), c * c2)
    return out


def np_open_cycle(a: NonPlanarAroma, edge: int) -> NPMarked:
    """Inverse of np_tau: remove spoke ``edge``'s cycle edge."""
    m = len(a.spokes)
    order = [(edge - 1 - j) % m for j in range(m)]

    def build(pos: int) -> NonPlanarTree:
        label, kids = a.spokes[order[pos]]
        if pos == m - 1:
            return NonPlanarTree(label + MARK_SUFFIX, kids)
        return NonPlanarTree(label, kids + (build(pos + 1),))

    return NPMarked(NPMA_UNIT, build(0))


def np_tau_preimages(a: NonPlanarAroma) -> list[NPMarked]:
    return [np_open_cycle(a, i) for i in range(len(a.spokes))]


# -- abelianization bridge ----------------------------------------------------


def ab_multiaroma(m: MultiAroma) -> NPMultiAroma:
    return NPMultiAroma(tuple(forget_planarity_aroma(a) for a in m.factors))


def abelianize(x: APTElement) -> ATElement:
    """Project onto bracket length 1, then erase all planar structure."""
    out: ATElement = LinComb.zero()
    for k, c in x.terms.items():
        if len(k.lie) == 1:
            key = ATKey(ab_multiaroma(k.aromas), forget_planarity(k.lie.letters[0]))
            out = out + LinComb.single(key, c)
    return out


def ab_sa(s: LinComb) -> LinComb:
    return s.map_keys(lambda m: LinComb.single(ab_multiaroma(m)))


def ab_marked(pm) -> NPMarked:
    """Image of a tree-marked planar element (the slot is erased)."""
    if pm.mark[0] != "t":
        raise ValueError("abelianization of marks is defined on tree marks")
    from .trees import PlanarTree

    def walk(t: PlanarTree, addr: Address) -> NonPlanarTree:
        kids = tuple(
            walk(c, addr[1:]) if addr and addr[0] == i else forget_planarity(c)
            for i, c in enumerate(t.children, start=1)
        )
        label = t.label + MARK_SUFFIX if not addr else t.label
        return NonPlanarTree(label, kids)

    return NPMarked(ab_multiaroma(pm.aromas), walk(pm.tree, pm.mark[1]))


# -- generation of aromatic trees from the single-vertex generators -----------


class NExpr:
    __slots__ = ()


class NGen(NExpr):
    __slots__ = ("label",)

    def __init__(self, label: str):
        self.label = label

    def __repr__(self):
        return self.label


class NGraft(NExpr):
    __slots__ = ("left", "right")

    def __init__(self, left: NExpr, right: NExpr):
        self.left = left
        self.right = right

    def __repr__(self):
        return f"({self.left!r} -> {self.right!r})"


class NSum(NExpr):
    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)

    def __repr__(self):
        return "(" + " + ".join(f"{c}*{e!r}" for c, e in self.parts) + ")"


class NDelta(NExpr):
    __slots__ = ("sub",)

    def __init__(self, sub: NExpr):
        self.sub = sub

    def __repr__(self):
        return f"d({self.sub!r})"


class NCompose(NExpr):
    __slots__ = ("left", "right")

    def __init__(self, left: NExpr, right: NExpr):
        self.left = left
        self.right = right

    def __repr__(self):
        return f"({self.left!r} o {self.right!r})"


class NTau(NExpr):
    __slots__ = ("sub",)

    def __init__(self, sub: NExpr):
        self.sub = sub

    def __repr__(self):
        return f"tau({self.sub!r})"


class NModMul(NExpr):
    __slots__ = ("ring", "sub")

    def __init__(self, ring: NExpr, sub: NExpr):
        self.ring = ring
        self.sub = sub

    def __repr__(self):
        return f"({self.ring!r} . {self.sub!r})"


def np_eval(e: NExpr):
    """Evaluate to a tagged value: ("at" | "sa" | "v", LinComb)."""
    if isinstance(e, NGen):
        return ("at", at_of_tree(NonPlanarTree(e.label)))
    if isinstance(e, NGraft):
        ta, va = np_eval(e.left)
        tb, vb = np_eval(e.right)
        if ta != "at" or tb != "at":
            raise TypeError("grafting needs aromatic-tree values")
        return ("at", np_graft(va, vb))
    if isinstance(e, NSum):
        acc = None
        tag = None
        for c, sub in e.parts:
            t, v = np_eval(sub)
            if tag is None:
                tag, acc = t, v.scale(c)
            else:
                if t != tag:
                    raise TypeError("mixed sorts in a sum")
                acc = acc + v.scale(c)
        return (tag or "at", acc if acc is not None else LinComb.zero())
    if isinstance(e, NDelta):
        t, v = np_eval(e.sub)
        if t != "at":
            raise TypeError("delta needs an aromatic-tree value")
        out: LinComb = LinComb.zero()
        for k, c in v.terms.items():
            if not k.aromas.is_unit():
                raise TypeError("delta in generated expressions stays on pure trees")
            out = out + np_delta(k.tree).scale(c)
        return ("v", out)
    if isinstance(e, NCompose):
        ta, va = np_eval(e.left)
        tb, vb = np_eval(e.right)
        if ta != "v" or tb != "v":
            raise TypeError("composition needs endomorphism values")
        comp = bilinear_extend(lambda a, b: LinComb.single(np_compose(a, b)))
        return ("v", comp(va, vb))
    if isinstance(e, NTau):
        t, v = np_eval(e.sub)
        if t != "v":
            raise TypeError("tau needs an endomorphism value")
        return ("sa", np_tau_lin(v))
    if isinstance(e, NModMul):
        tr, vr = np_eval(e.ring)
        ts, vs = np_eval(e.sub)
        if tr != "sa":
            raise TypeError("module action needs a ring value on the left")
        if ts == "sa":
            return ("sa", np_sa_mul(vr, vs))
        if ts == "at":
            out: LinComb = LinComb.zero()
            for m, cm in vr.terms.items():
                for k, c in vs.terms.items():
                    out = out + LinComb.single(
                        ATKey(m.mul(k.aromas), k.tree), c * cm
                    )
            return ("at", out)
        out = LinComb.zero()
        for m, cm in vr.terms.items():
            for k, c in vs.terms.items():
                out = out + LinComb.single(NPMarked(m.mul(k.aromas), k.tree), c * cm)
        return ("v", out)
    raise TypeError(f"unknown expression {e!r}")


@lru_cache(maxsize=None)
def express_np_tree(t: NonPlanarTree) -> NExpr:
    """Free pre-Lie decomposition of a tree into generators and grafts."""
    if t.size == 1:
        return NGen(t.label)
    c1 = t.children[0]
    rest = NonPlanarTree(t.label, t.children[1:])
    parts = [(1, NGraft(express_np_tree(c1), express_np_tree(rest)))]
    for v in rest.vertices():
        if v:
            parts.append((-1, express_np_tree(_np_graft_vertex(c1, rest, v))))
    return NSum(parts)


def _detach_marked_child(t: NonPlanarTree) -> tuple[NonPlanarTree, NonPlanarTree]:
    """Remove the marked subtree, decorating its parent in the same pass.

    Addresses are useless across rebuilds (children re-sort), so the walk
    carries the decoration with it.  Returns (remainder, marked subtree).
    """
    for i, c in enumerate(t.children):
        try:
            p = find_mark(c)
        except ValueError:
            continue
        if not p:
            kids = t.children[:i] + t.children[i + 1 :]
            return NonPlanarTree(t.label + MARK_SUFFIX, kids), c
        rest_c, sub = _detach_marked_child(c)
        kids = list(t.children)
        kids[i] = rest_c
        return NonPlanarTree(t.label, tuple(kids)), sub
    raise ValueError("no marked vertex below the root")


@lru_cache(maxsize=None)
def express_np_marked(m: NPMarked) -> NExpr:
    """Marked trees through delta and composition (the generation induction)."""
    if not m.aromas.is_unit():
        raise ValueError("expression recursion runs on pure tree carriers")
    path = find_mark(m.tree)
    if not path:
        plain = undecorate(m.tree)
        if plain.size == 1:
            return NDelta(express_np_tree(plain))
        parts = [(1, NDelta(express_np_tree(plain)))]
        for v in plain.vertices():
            if v:
                parts.append((-1, express_np_marked(NPMarked.at(plain, v))))
        return NSum(parts)
    rest, sub = _detach_marked_child(m.tree)
    outer = NPMarked(NPMA_UNIT, rest)
    inner = NPMarked(NPMA_UNIT, sub)
    return NCompose(express_np_marked(outer), express_np_marked(inner))


def generate_expression(x: ATElement) -> NExpr:
    """An expression over generators and operators that re-evaluates to x."""
    parts = []
    for k, c in x.items():
        expr: NExpr = express_np_tree(k.tree)
        for a in k.aromas.factors:
            ring = NTau(express_np_marked(np_open_cycle(a, 0)))
            expr = NModMul(ring, expr)
        parts.append((c, expr))
    return NSum(parts)


@lru_cache(maxsize=None)
def enumerate_np_multiaromas(n: int) -> tuple[NPMultiAroma, ...]:
    from .aromas import enumerate_np_aromas

    out = [NPMA_UNIT] if n == 0 else []

    def extend(prefix, remaining):
        for size in range(1, remaining + 1):
            for a in enumerate_np_aromas(size):
                cur = prefix + (a,)
                if sum(x.size for x in cur) == n:
                    out.append(NPMultiAroma(cur))
                extend(cur, remaining - size)

    extend((), n)
    return tuple(dict.fromkeys(out))


def enumerate_aromatic_trees(n: int) -> tuple[ATKey, ...]:
    """All non-planar aromatic trees of total degree n."""
    from .trees import enumerate_np_trees

    out = []
    for a_deg in range(0, n):
        for ma in enumerate_np_multiaromas(a_deg):
            for t in enumerate_np_trees(n - a_deg):
                out.append(ATKey(ma, t))
    return tuple(out)
