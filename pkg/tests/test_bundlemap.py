import json

import numpy as np
import pytest

from fellquant.bundlemap import (adjunction_cross_check, check_ipi_stable, check_quantic_bundle,
                                 check_semiopen_laws, check_stable, check_surjection,
                                 check_weakly_open)
from fellquant.examples import z2_normalizer
from fellquant.groupoid import members, oq_mul
from fellquant.maxa import qleq, qmul, qstar

from conftest import LINE_NAMES, suite_map


def test_empty_and_zero():
    p = suite_map("pair2")
    assert p.p_star(0).dim == 0 and p.p_shriek(p.A.zero) == 0
    assert p.p_star(1 << 1).dim == 1 and p.names(1 << 1) == ["0<-1"]


def test_z2_normalizer_support_and_strict_product_inequality():
    p = suite_map("Z2")
    V = p.A.element([z2_normalizer(p)])
    assert p.p_shriek(V) == 0b11
    lhs = p.p_shriek(qmul(qstar(V), V))
    rhs = oq_mul(p.G, p.p_shriek(qstar(V)), p.p_shriek(V))
    assert lhs == 0b01 and rhs == 0b11


def test_adjunction_on_structured_and_random(suite, rng):
    p = suite
    subsets = range(1 << p.G.arrow_count) if p.G.arrow_count <= 9 else p.bisections
    spaces = [p.A.element([p.bundle.random_section(rng, u)]) for u in p.bisections if u]
    spaces += [p.A.element([p.bundle.random_section(rng) for _ in range(2)]) for _ in range(20)]
    for V in spaces:
        sv = p.p_shriek(V)
        for u in subsets:
            assert (sv & ~u == 0) == qleq(V, p.p_star(u))


def test_support_independent_of_spanning_set(suite, rng):
    p = suite
    V = p.A.element([p.bundle.random_section(rng, u) for u in p.bisections[1:4]])
    mix = (rng.standard_normal((V.dim, V.dim)) + 1j * rng.standard_normal((V.dim, V.dim))) @ V.basis
    assert p.support(mix) == p.p_shriek(V)


@pytest.mark.parametrize("name", LINE_NAMES)
def test_line_bundle_supports_multiply(name, rng):
    p = suite_map(name)
    for u in p.bisections[1:]:
        for v in p.bisections[1:]:
            s, t = p.bundle.random_section(rng, u), p.bundle.random_section(rng, v)
            prod = qmul(p.A.element([s]), p.A.element([t]))
            assert p.p_shriek(prod) == oq_mul(p.G, u, v)


def test_p_star_is_a_star_homomorphism():
    p = suite_map("pair3")
    for u in p.bisections:
        for v in p.bisections[::3]:
            assert qmul(p.p_star(u), p.p_star(v)) == p.p_star(oq_mul(p.G, u, v))
        assert qstar(p.p_star(u)) == p.p_star(sum(1 << p.G.inv[g] for g in members(u)))


def test_cross_check_with_finite_lattice_adjoint():
    p = suite_map("Z2")
    sigma, shriek = adjunction_cross_check(p, [p.A.element([z2_normalizer(p)])])
    assert sigma == shriek


def test_surjection_and_semiopen(suite):
    assert check_surjection(suite).verdict == "holds-exhaustive"
    assert check_semiopen_laws(suite, samples=100).verdict == "holds-exhaustive"


@pytest.mark.parametrize("name", LINE_NAMES)
def test_line_bundles_weakly_open_and_quantic(name):
    p = suite_map(name)
    assert check_weakly_open(p, samples=100).verdict == "holds-exhaustive"
    assert check_quantic_bundle(p, samples=100).verdict == "holds-exhaustive"


def test_one_point_matrix_fiber_weakly_open():
    from fellquant.bundlemap import QuantaleMapP
    from fellquant.convalg import FellBundleSpec, ProductBundle
    from fellquant.groupoid import discrete_groupoid
    from conftest import full_fiber
    p = QuantaleMapP(FellBundleSpec(discrete_groupoid(1), ProductBundle(full_fiber(2))))
    assert check_weakly_open(p, samples=50).verdict == "holds-exhaustive"


def test_c2_fiber_quantic_witness():
    p = suite_map("C2 fiber")
    rep = check_quantic_bundle(p, samples=0)
    assert rep.failed
    w = rep.witness
    assert w["lhs_support"] == [] and w["rhs_support"] == ["0<-0"]
    a, b = np.array(w["V_basis"])[0], np.array(w["W_basis"])[0]
    assert np.count_nonzero(a[:, 0]) == 1 and np.count_nonzero(b[:, 0]) == 1
    assert np.flatnonzero(a[:, 0]) != np.flatnonzero(b[:, 0])


def test_stable_examples():
    assert check_stable(suite_map("pair2"), samples=1000).verdict == "holds-exhaustive"
    rep = check_stable(suite_map("Z2"), samples=10)
    assert rep.failed and rep.witness["U"] == ["0"]
    assert rep.witness["V_basis"] == [[[1.0, 0.0], [1.0, 0.0]]]
    assert rep.witness["W_basis"] == [[[-1.0, 0.0], [1.0, 0.0]]]


def test_ipi_examples():
    assert check_ipi_stable(suite_map("pair3"), samples=50).verdict == "verified-by-theorem"
    assert check_ipi_stable(suite_map("Z2 free on 2"), samples=50).verdict == "verified-by-theorem"
    assert check_ipi_stable(suite_map("Z3"), samples=50).failed


def test_reports_are_deterministic_json():
    p = suite_map("Z2")
    a = json.dumps(check_stable(p, samples=20, seed=3).to_dict(), sort_keys=True)
    b = json.dumps(check_stable(p, samples=20, seed=3).to_dict(), sort_keys=True)
    assert a == b
