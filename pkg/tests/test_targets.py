import random
from fractions import Fraction

import pytest

from aromatree.apt import apt_bracket, apt_graft, apt_of_tree
from aromatree.aromas import LOOP, MultiAroma, enumerate_aromas, sa_of_aroma
from aromatree.linear import LinComb
from aromatree.marked import (
    delta,
    enumerate_marked_trees,
    module_graft,
    omega_apply,
    omega_compose,
    open_cycle,
    tau,
    tau_preimages,
)
from aromatree.samples import random_apt, random_apt_tree_part, random_tree
from aromatree.targets import (
    DEFAULT_ASSIGNMENT,
    Evaluator,
    MatrixTarget,
    get_target,
    mat,
    mat_comm,
    mat_mul,
    mat_sub,
    mat_trace,
    mat_zero,
    run_target_axiom_suite,
    solve_coords,
)
from aromatree.trees import LEAF, parse_tree

E = mat([[0, 1], [0, 0]])
F = mat([[0, 0], [1, 0]])
H = mat([[1, 0], [0, -1]])

AD = get_target("matrix-ad")
ZERO = get_target("matrix-zero")


def evaluators():
    return [Evaluator(AD, DEFAULT_ASSIGNMENT), Evaluator(ZERO, DEFAULT_ASSIGNMENT)]


def test_solve_coords():
    v = mat([[2, 3], [5, -2]])
    coords = solve_coords((E, F, H), v)
    assert coords == (Fraction(3), Fraction(5), Fraction(2))
    with pytest.raises(ValueError, match="outside the span"):
        solve_coords((E, F, H), mat([[1, 0], [0, 1]]))


def test_axiom_suite_passes_for_both_targets():
    for target in (AD, ZERO):
        report = run_target_axiom_suite(target, samples=40, seed=5)
        assert all(ok for _, ok, _ in report), report


def test_axiom_suite_detects_corruption():
    class Corrupt(MatrixTarget):
        def bracket(self, x, y):
            return mat_comm(x, y)  # sign dropped relative to the ad target

        def graft(self, x, y):
            return mat_comm(x, y)

    report = run_target_axiom_suite(Corrupt("ad"), samples=60, seed=1)
    failed = [row for row in report if not row[1]]
    assert failed and all(row[2] != "" for row in failed)


def test_zeta_self_graft_vanishes():
    # zeta(*[*]) = M |> M = [M, M] = 0 for the commutator graft
    ev = Evaluator(AD, DEFAULT_ASSIGNMENT)
    assert ev.zeta(apt_of_tree(parse_tree("*[*]"))) == mat_zero(2)


def test_zeta_two_generator_example():
    ev = Evaluator(AD, {"a": E, "b": F})
    got = ev.zeta(apt_of_tree(parse_tree("b[a]")))  # a |> b = ef - fe = h
    assert got == H


def test_zeta_zero():
    for ev in evaluators():
        assert ev.zeta(LinComb.zero()) == mat_zero(2)


def test_zeta_is_postlie_morphism():
    rng = random.Random(111)
    for ev in evaluators():
        for _ in range(10):
            x = random_apt(rng, max_degree=3)
            y = random_apt(rng, max_degree=3)
            assert ev.zeta(apt_graft(x, y)) == ev.target.graft(ev.zeta(x), ev.zeta(y))
            assert ev.zeta(apt_bracket(x, y)) == ev.target.bracket(
                ev.zeta(x), ev.zeta(y)
            )


def test_gamma_loop_is_zero_for_ad():
    # trace of z -> z |> h is the trace of -ad_h, which vanishes
    ev = Evaluator(AD, {"*": H})
    assert ev.gamma(sa_of_aroma(LOOP)) == 0


def test_gamma_two_cycle_nonzero():
    # the 2-cycle closes delta(*[*])-type endomorphisms; Killing-form values
    ev = Evaluator(AD, DEFAULT_ASSIGNMENT)
    values = [ev.gamma_aroma(a) for a in enumerate_aromas(2)]
    assert any(v != 0 for v in values)


def test_gamma_unit():
    for ev in evaluators():
        from aromatree.aromas import SA_ONE

        assert ev.gamma(SA_ONE) == 1


def test_gamma_independent_of_preimage():
    for ev in evaluators():
        for n in range(1, 5):
            for a in enumerate_aromas(n):
                traces = {
                    ev.target.trace_endo(ev.beta_marked(p)) for p in tau_preimages(a)
                }
                assert len(traces) == 1, (a, traces)


def test_beta_delta_diagram():
    # beta(delta(x)) = delta_target(zeta(x))
    rng = random.Random(113)
    for ev in evaluators():
        for _ in range(8):
            x = random_apt_tree_part(rng, max_degree=3, terms=1)
            lhs = ev.beta(delta(x).to_omega())
            rhs = ev.target.delta_matrix(ev.zeta(x))
            assert lhs == rhs


def test_beta_is_algebra_morphism():
    rng = random.Random(127)
    pool = [m for n in range(1, 4) for m in enumerate_marked_trees(n)]
    for ev in evaluators():
        for _ in range(12):
            m1, m2 = rng.choice(pool), rng.choice(pool)
            lhs = ev.beta(omega_compose(LinComb.single(m1), LinComb.single(m2)))
            rhs = mat_mul(ev.beta_marked(m1), ev.beta_marked(m2))
            assert lhs == rhs


def test_freeness_identity_12():
    # beta(phi)(zeta(x)) = zeta(phi(x))
    rng = random.Random(131)
    pool = [m for n in range(1, 4) for m in enumerate_marked_trees(n)]
    for ev in evaluators():
        for _ in range(10):
            m = rng.choice(pool)
            x = random_apt(rng, max_degree=3, terms=1)
            zx = ev.zeta(x)
            coords = ev.target.coords(zx)
            bm = ev.beta_marked(m)
            image = mat_zero(2)
            from aromatree.targets import mat_add, mat_scale

            col = [
                sum(bm[i][j] * coords[j] for j in range(ev.target.dim))
                for i in range(ev.target.dim)
            ]
            for ci, b in zip(col, ev.target.basis):
                image = mat_add(image, mat_scale(ci, b))
            from aromatree.marked import apply_marked

            assert image == ev.zeta(apply_marked(m, x))


def test_freeness_identity_13():
    # beta(x |> phi) = zeta(x) |> beta(phi)
    rng = random.Random(137)
    pool = [m for n in range(1, 3) for m in enumerate_marked_trees(n)]
    for ev in evaluators():
        for _ in range(10):
            m = rng.choice(pool)
            x = random_apt_tree_part(rng, max_degree=2, terms=1)
            lhs = ev.beta(module_graft(x, m))
            rhs = ev.target.graft_endo(ev.zeta(x), ev.beta_marked(m))
            assert lhs == rhs


def test_trace_diagram_commutes():
    # gamma(tau(phi)) = trace(beta(phi)) on tree-marked elements
    rng = random.Random(139)
    pool = [m for n in range(1, 5) for m in enumerate_marked_trees(n)]
    for ev in evaluators():
        for _ in range(20):
            m = rng.choice(pool)
            assert ev.gamma(tau(m)) == ev.target.trace_endo(ev.beta_marked(m))


def test_uniqueness_probe_order_independent():
    rng = random.Random(149)
    for target in (AD, ZERO):
        ev1 = Evaluator(target, DEFAULT_ASSIGNMENT, reverse_sums=False)
        ev2 = Evaluator(target, DEFAULT_ASSIGNMENT, reverse_sums=True)
        for _ in range(8):
            x = random_apt(rng, max_degree=3)
            assert ev1.zeta(x) == ev2.zeta(x)
        for a in enumerate_aromas(3):
            assert ev1.gamma_aroma(a) == ev2.gamma_aroma(a)


def test_unassigned_generator_rejected():
    ev = Evaluator(AD, {"a": E})
    with pytest.raises(ValueError, match="no assignment"):
        ev.zeta(apt_of_tree(LEAF))
