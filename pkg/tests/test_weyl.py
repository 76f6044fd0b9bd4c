import itertools

import numpy as np
import pytest

from fellquant.errors import BaseMismatch, NotInIpiB, NotNormalizer, SizeLimit
from fellquant.examples import random_unitary, unit_context, z2_normalizer
from fellquant.groupoid import discrete_groupoid, is_effective, is_isomorphic, pair_groupoid
from fellquant.maxa import StarAlgebra, qmul, qstar
from fellquant.weyl import (SubalgebraContext, close_under_products, comparison_map, germ_equal_by_search,
                            germ_groupoid_B, in_ipi_B, is_normalizer, sample_normalizers,
                            sigma_hat, signature_normalizers, spectrum_action, weyl_groupoid)

from conftest import suite_map

M2 = StarAlgebra.full_matrix(2)


def diag_ctx(A, n):
    return SubalgebraContext(A, A.element_of_matrices([np.diag(np.eye(n)[i]) for i in range(n)]))


def mat_unit(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1
    return m


def test_normalizer_examples():
    ctx = diag_ctx(M2, 2)
    assert is_normalizer(ctx, M2.from_matrix(mat_unit(2, 0, 0)))
    assert not is_normalizer(ctx, M2.from_matrix(np.array([[1, 1], [0, 0]])))
    M3 = StarAlgebra.full_matrix(3)
    ctx3 = diag_ctx(M3, 3)
    perm = mat_unit(3, 0, 1) + 2j * mat_unit(3, 2, 0)
    assert is_normalizer(ctx3, M3.from_matrix(perm))
    with pytest.raises(NotNormalizer):
        sigma_hat(ctx, M2.from_matrix(np.ones((2, 2))))


def test_in_ipi_b_examples():
    ctx = diag_ctx(M2, 2)
    assert in_ipi_B(ctx, ctx.b)
    assert not in_ipi_B(ctx, M2.element_of_matrices([mat_unit(2, 0, 0) + mat_unit(2, 0, 1)]))
    assert in_ipi_B(ctx, sigma_hat(ctx, M2.from_matrix(mat_unit(2, 1, 0))))


def test_spectrum_action_examples():
    M3 = StarAlgebra.full_matrix(3)
    ctx = diag_ctx(M3, 3)
    act = spectrum_action(ctx, M3.element_of_matrices([mat_unit(3, 0, 1)]))
    assert act.mapping == (-1, 0, -1)
    assert spectrum_action(ctx, ctx.b).mapping == (0, 1, 2)
    with pytest.raises(NotInIpiB):
        spectrum_action(ctx, M3.whole)


def test_z2_context():
    p = suite_map("Z2")
    ctx = unit_context(p)
    n = z2_normalizer(p)
    V = sigma_hat(ctx, n)
    assert V.dim == 1 and V == p.A.element([n])
    assert spectrum_action(ctx, V).mapping == (0,)
    res = germ_groupoid_B(ctx, [p.A.element([n])])
    assert res.groupoid.arrow_count == 4  # n^2 is i delta_1, so the closure has four lines
    assert weyl_groupoid(ctx, [V]).arrow_count == 1
    comp = comparison_map(ctx, p, res)
    assert comp.k_surjective and not comp.k_injective and not comp.is_iso


@pytest.mark.parametrize("n", [2, 3])
def test_diagonal_reconstruction(n):
    p = suite_map(f"pair{n}")
    ctx = unit_context(p)
    gens = [sigma_hat(ctx, m) for m in signature_normalizers(ctx)]
    res = germ_groupoid_B(ctx, gens)
    assert is_isomorphic(res.groupoid, pair_groupoid(n))
    comp = comparison_map(ctx, p, res)
    assert comp.is_iso and comp.triangle_commutes
    assert is_isomorphic(weyl_groupoid(ctx, gens), pair_groupoid(n))


def test_ideal_generators_give_discrete_groupoid():
    p = suite_map("pair3")
    ctx = unit_context(p)
    ideals = [I for _, I in ctx.spectrum.ideal_lattice()]
    assert is_isomorphic(germ_groupoid_B(ctx, ideals).groupoid, discrete_groupoid(3))


def test_germ_equality_matches_definition():
    p = suite_map("pair3")
    ctx = unit_context(p)
    gens = [p.p_star(u) for u in p.bisections[1:12]]
    for V, W in itertools.combinations(gens, 2):
        for x in range(3):
            by_point = qmul(V, ctx.e(x)) == qmul(W, ctx.e(x))
            assert by_point == germ_equal_by_search(ctx, V, W, x)


def test_sigma_hat_laws():
    p = suite_map("pair3")
    ctx = unit_context(p)
    ns = sample_normalizers(ctx, 30, seed=1)
    A = p.A
    for m, n in zip(ns, ns[1:]):
        mn = A.mul(m, n)
        if np.linalg.norm(mn) < 1e-9:
            continue
        assert sigma_hat(ctx, mn) == qmul(sigma_hat(ctx, m), sigma_hat(ctx, n))
        assert qstar(sigma_hat(ctx, m)) == sigma_hat(ctx, A.star(m))
        am = spectrum_action(ctx, sigma_hat(ctx, m))
        an = spectrum_action(ctx, sigma_hat(ctx, n))
        assert spectrum_action(ctx, sigma_hat(ctx, mn)) == am.after(an)


def test_normalizer_sum():
    p = suite_map("pair3")
    ctx = unit_context(p)
    rng = np.random.default_rng(2)
    for m in signature_normalizers(ctx)[:15]:
        b = rng.standard_normal(ctx.b.dim) @ ctx.b.basis
        n = p.A.mul(m, b + 5 * p.A.unit)  # same nB as m
        if qmul(p.A.element([m]), ctx.b) == qmul(p.A.element([n]), ctx.b):
            assert is_normalizer(ctx, m + n)


def test_weyl_groupoid_effective_and_scalar_case():
    A = StarAlgebra.full_matrix(2)
    ctx = SubalgebraContext(A, A.element_of_matrices([np.eye(2)]))
    rng = np.random.default_rng(0)
    us = [A.from_matrix(random_unitary(2, rng)) for _ in range(4)]
    assert all(is_normalizer(ctx, u) for u in us)
    W = weyl_groupoid(ctx, [sigma_hat(ctx, u) for u in us])
    assert W.arrow_count == 1 and is_effective(W)


def test_closure_cap():
    # powers of a generic unitary never repeat, so the closure runs into the cap
    A = StarAlgebra.full_matrix(2)
    ctx = SubalgebraContext(A, A.element_of_matrices([np.eye(2)]))
    u = A.from_matrix(np.diag([1, np.exp(1j * np.sqrt(2))]) @ random_unitary(2, np.random.default_rng(1)))
    with pytest.raises(SizeLimit):
        close_under_products([sigma_hat(ctx, u)], limit=40)


def test_comparison_needs_matching_base():
    p = suite_map("pair2")
    ctx = SubalgebraContext(p.A, p.p_star(1))  # only the unit at object 0
    res = germ_groupoid_B(ctx, [ctx.b])
    with pytest.raises(BaseMismatch):
        comparison_map(ctx, p, res)
