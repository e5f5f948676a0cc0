"""Concrete tracial post-Lie-Rinehart targets and the universal morphism.

A target is a Lie algebra L of square rational matrices with a bracket, a
graft (connection), a zero anchor over the ring Q, and the matrix trace on
endomorphism representations.  Two targets are provided:

  * ``matrix-ad``:   bracket [x,y] = -(xy-yx), graft x|>y = xy-yx.
    This pair is post-Lie for every Lie algebra, with a genuinely nonzero
    graft; commutator endomorphisms are trace free, so the trace axioms
    hold with a zero anchor.
  * ``matrix-zero``: bracket = commutator, graft = 0.

The universal morphism (zeta, gamma, beta) evaluates aromatic planar
trees, aroma coefficients, and elementary endomorphisms into the target:
zeta is the free post-Lie morphism, gamma sends an aroma through a
tau-preimage and the target trace, and beta is built by the same
recursion that expresses marked elements in delta generators.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .apt import APTElement
from .aromas import MultiAroma, PlanarAroma, SAElement
from .freelie import LyndonWord, std_factorization
from .linear import LinComb
from .marked import MarkedElement, OmegaElement, open_cycle
from .trees import Address, PlanarTree, graft_at, left_graft_tree

Mat = tuple[tuple[Fraction, ...], ...]


def mat(rows) -> Mat:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def mat_zero(n: int, m: int | None = None) -> Mat:
    m = n if m is None else m
    return tuple((Fraction(0),) * m for _ in range(n))


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c: Fraction, a: Mat) -> Mat:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_comm(a: Mat, b: Mat) -> Mat:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_trace(a: Mat) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def solve_coords(basis: tuple[Mat, ...], v: Mat) -> tuple[Fraction, ...]:
    """Exact coordinates of v in the given matrix basis."""
    rows = len(v) * len(v[0])
    cols = len(basis)
    aug = [
        [Fraction(b[i][j]) for b in basis] + [Fraction(v[i][j])]
        for i in range(len(v))
        for j in range(len(v[0]))
    ]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if aug[i][c]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    coords = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        coords[c] = aug[i][-1]
    for i in range(r, rows):
        if aug[i][-1]:
            raise ValueError("vector outside the span of the target basis")
    # consistency: residual must vanish (flags a non-basis input)
    for i in range(rows):
        lhs = sum(aug_row_coord(basis, i, k) * coords[k] for k in range(cols))
        if lhs != flat_entry(v, i):
            raise ValueError("vector outside the span of the target basis")
    return tuple(coords)


def aug_row_coord(basis: tuple[Mat, ...], flat: int, k: int) -> Fraction:
    return flat_entry(basis[k], flat)


def flat_entry(m: Mat, flat: int) -> Fraction:
    ncols = len(m[0])
    return m[flat // ncols][flat % ncols]


_E = mat([[0, 1], [0, 0]])
_F = mat([[0, 0], [1, 0]])
_H = mat([[1, 0], [0, -1]])


class MatrixTarget:
    """Finite-dimensional tracial post-Lie-Rinehart target with zero anchor."""

    def __init__(self, kind: str, basis: tuple[Mat, ...] = (_E, _F, _H)):
        if kind not in ("ad", "zero"):
            raise ValueError(f"unknown matrix target kind {kind!r}")
        self.kind = kind
        self.basis = basis
        self.dim = len(basis)
        self.name = f"matrix-{kind}"

    def bracket(self, x: Mat, y: Mat) -> Mat:
        if self.kind == "ad":
            return mat_scale(Fraction(-1), mat_comm(x, y))
        return mat_comm(x, y)

    def graft(self, x: Mat, y: Mat) -> Mat:
        if self.kind == "ad":
            return mat_comm(x, y)
        return mat_zero(len(x), len(x[0]))

    def anchor(self, x: Mat, r: Fraction) -> Fraction:
        return Fraction(0)

    def coords(self, v: Mat) -> tuple[Fraction, ...]:
        return solve_coords(self.basis, v)

    def endo_matrix(self, f: Callable[[Mat], Mat]) -> Mat:
        cols = [self.coords(f(b)) for b in self.basis]
        return tuple(
            tuple(cols[j][i] for j in range(self.dim)) for i in range(self.dim)
        )

    def left_mult(self, x: Mat) -> Mat:
        """Matrix of z -> x |> z on the basis."""
        return self.endo_matrix(lambda z: self.graft(x, z))

    def delta_matrix(self, y: Mat) -> Mat:
        """Matrix of z -> z |> y on the basis."""
        return self.endo_matrix(lambda z: self.graft(z, y))

    def graft_endo(self, x: Mat, m: Mat) -> Mat:
        """(x |> M)(z) = x |> M(z) - M(x |> z)."""
        lx = self.left_mult(x)
        return mat_sub(mat_mul(lx, m), mat_mul(m, lx))

    def trace_endo(self, m: Mat) -> Fraction:
        return mat_trace(m)


class Evaluator:
    """The universal morphism (zeta, gamma, beta) for one assignment."""

    def __init__(
        self,
        target: MatrixTarget,
        assignment: dict[str, Mat],
        reverse_sums: bool = False,
    ):
        self.target = target
        self.assignment = dict(assignment)
        self.reverse_sums = reverse_sums
        self._zeta_tree_cache: dict[PlanarTree, Mat] = {}
        self._beta_cache: dict[tuple, Mat] = {}
        self._gamma_cache: dict[PlanarAroma, Fraction] = {}

    def _order(self, items):
        items = list(items)
        return list(reversed(items)) if self.reverse_sums else items

    # -- zeta ---------------------------------------------------------------

    def zeta_tree(self, t: PlanarTree) -> Mat:
        cached = self._zeta_tree_cache.get(t)
        if cached is not None:
            return cached
        base = self.assignment.get(t.label)
        if base is None:
            raise ValueError(f"no assignment for generator label {t.label!r}")
        out = self._forest_graft(t.children, base)
        self._zeta_tree_cache[t] = out
        return out

    def _forest_graft(self, forest: tuple[PlanarTree, ...], y: Mat) -> Mat:
        # evaluates (s1 ... sk) |> y in the target via the Guin-Oudom rules
        if not forest:
            return y
        s, rest = forest[0], forest[1:]
        out = self.target.graft(self.zeta_tree(s), self._forest_graft(rest, y))
        for i in self._order(range(len(rest))):
            for t2, c in left_graft_tree(s, rest[i]).items():
                repl = rest[:i] + (t2,) + rest[i + 1 :]
                out = mat_sub(out, mat_scale(c, self._forest_graft(repl, y)))
        return out

    def zeta_lyndon(self, k: LyndonWord) -> Mat:
        if len(k) == 1:
            return self.zeta_tree(k.letters[0])
        u, v = std_factorization(k.letters)
        return self.target.bracket(
            self.zeta_lyndon(LyndonWord(u)), self.zeta_lyndon(LyndonWord(v))
        )

    def zeta(self, x: APTElement) -> Mat:
        n = len(self.target.basis[0])
        out = mat_zero(n, len(self.target.basis[0][0]))
        for key, c in self._order(x.items()):
            val = mat_scale(c * self.gamma_multiaroma(key.aromas), self.zeta_lyndon(key.lie))
            out = mat_add(out, val)
        return out

    # -- gamma --------------------------------------------------------------

    def gamma_aroma(self, a: PlanarAroma) -> Fraction:
        cached = self._gamma_cache.get(a)
        if cached is None:
            # tau-preimage at the canonical rotation's first cycle edge
            cached = self.target.trace_endo(self.beta_marked(open_cycle(a, 0)))
            self._gamma_cache[a] = cached
        return cached

    def gamma_multiaroma(self, m: MultiAroma) -> Fraction:
        out = Fraction(1)
        for a in m.factors:
            out *= self.gamma_aroma(a)
        return out

    def gamma(self, s: SAElement) -> Fraction:
        return sum(
            (c * self.gamma_multiaroma(m) for m, c in s.items()), Fraction(0)
        )

    # -- beta ---------------------------------------------------------------

    def beta_marked(self, m: MarkedElement) -> Mat:
        scale = self.gamma_multiaroma(m.aromas)
        if m.mark[0] != "t":
            # zero-anchor target: the Guin-Oudom anchor action of a word on a
            # ring element vanishes, so the Psi part of beta is zero
            return mat_zero(self.target.dim)
        return mat_scale(scale, self._beta_tree(m.tree, m.mark[1], m.slot))

    def _beta_tree(self, t: PlanarTree, path: Address, slot: int) -> Mat:
        key = (t, path, slot)
        cached = self._beta_cache.get(key)
        if cached is not None:
            return cached
        if path:
            parent_path, idx = path[:-1], path[-1]
            parent = t.subtree(parent_path)
            sub = parent.children[idx - 1]
            kids = parent.children[: idx - 1] + parent.children[idx:]
            rest = _replace(t, parent_path, PlanarTree(parent.label, kids))
            out = mat_mul(
                self._beta_tree(rest, parent_path, idx), self._beta_tree(sub, (), slot)
            )
        elif slot == 1:
            out = self.target.delta_matrix(self.zeta_tree(t))
            for v in self._order(t.vertices()):
                if v:
                    out = mat_sub(out, self._beta_tree(t, v, 1))
        else:
            t1 = t.children[0]
            rest = PlanarTree(t.label, t.children[1:])
            out = self.target.graft_endo(
                self.zeta_tree(t1), self._beta_tree(rest, (), slot - 1)
            )
            for v in self._order(rest.vertices()):
                if v:
                    out = mat_sub(
                        out, self._beta_tree(graft_at(t1, rest, v, 1), (), slot - 1)
                    )
        self._beta_cache[key] = out
        return out

    def beta(self, o: OmegaElement | MarkedElement) -> Mat:
        if isinstance(o, MarkedElement):
            return self.beta_marked(o)
        out = mat_zero(self.target.dim)
        for m, c in self._order(o.items()):
            out = mat_add(out, mat_scale(c, self.beta_marked(m)))
        return out


def _replace(t: PlanarTree, path: Address, new: PlanarTree) -> PlanarTree:
    if not path:
        return new
    kids = list(t.children)
    kids[path[0] - 1] = _replace(kids[path[0] - 1], path[1:], new)
    return PlanarTree(t.label, tuple(kids))


DEFAULT_ASSIGNMENT: dict[str, Mat] = {
    "*": mat([[1, 2], [3, -1]]),
    "a": _E,
    "b": _F,
    "c": _H,
}


def get_target(name: str) -> MatrixTarget:
    if name == "matrix-ad":
        return MatrixTarget("ad")
    if name == "matrix-zero":
        return MatrixTarget("zero")
    raise ValueError(f"unknown target {name!r} (matrix-ad or matrix-zero)")


# -- axiom suite --------------------------------------------------------------


def run_target_axiom_suite(target, samples: int, seed: int) -> list[tuple[str, bool, str]]:
    """Sampled post-Lie and trace axioms; returns (name, ok, witness) rows."""
    import random

    rng = random.Random(seed)

    def rand_elt() -> Mat:
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in target.basis]
        out = mat_zero(len(target.basis[0]), len(target.basis[0][0]))
        for c, b in zip(coeffs, target.basis):
            out = mat_add(out, mat_scale(c, b))
        return out

    checks: list[tuple[str, bool, str]] = []

    def record(name: str, fn: Callable[[Mat, Mat, Mat], Mat]):
        for _ in range(samples):
            x, y, z = rand_elt(), rand_elt(), rand_elt()
            defect = fn(x, y, z)
            if any(any(v for v in row) for row in defect):
                checks.append((name, False, f"x={x} y={y} z={z}"))
                return
        checks.append((name, True, ""))

    br, gr = target.bracket, target.graft

    record("bracket-antisymmetry", lambda x, y, z: mat_add(br(x, y), br(y, x)))
    record(
        "bracket-jacobi",
        lambda x, y, z: mat_add(
            mat_add(br(x, br(y, z)), br(y, br(z, x))), br(z, br(x, y))
        ),
    )
    record(
        "post-lie-axiom-1",
        lambda x, y, z: mat_sub(
            gr(x, br(y, z)), mat_add(br(gr(x, y), z), br(y, gr(x, z)))
        ),
    )
    record(
        "post-lie-axiom-2",
        lambda x, y, z: mat_sub(
            gr(br(x, y), z),
            mat_add(
                mat_sub(gr(x, gr(y, z)), gr(gr(x, y), z)),
                mat_sub(gr(gr(y, x), z), gr(y, gr(x, z))),
            ),
        ),
    )

    # trace axioms on endomorphism representations
    ok = True
    witness = ""
    for _ in range(samples):
        x, y = rand_elt(), rand_elt()
        a = target.delta_matrix(x)
        b = target.delta_matrix(y)
        if mat_trace(mat_mul(a, b)) != mat_trace(mat_mul(b, a)):
            ok, witness = False, f"x={x} y={y}"
            break
        nabla = target.graft_endo(x, b)
        if mat_trace(nabla) != target.anchor(x, mat_trace(b)):
            ok, witness = False, f"x={x} y={y}"
            break
    checks.append(("trace-axioms", ok, witness))
    return checks
