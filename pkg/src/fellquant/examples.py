"""Worked examples with known outcomes, runnable as a golden corpus."""
from __future__ import annotations

import itertools

import numpy as np

from .bundlemap import QuantaleMapP, check_ipi_stable, check_quantic_bundle, check_stable
from .convalg import FellBundleSpec, ProductBundle
from .groupoid import (cyclic_group, discrete_groupoid, group_groupoid, is_isomorphic, isotropy,
                       pair_groupoid)
from .maxa import StarAlgebra, qmul
from .weyl import (SubalgebraContext, comparison_map, germ_groupoid_B, is_normalizer,
                   sample_normalizers, sigma_hat, signature_normalizers, weyl_groupoid)

REPRODUCED = "reproduced"
UNCONFIRMED = "unconfirmed"
MISMATCH = "mismatch"


def z2_map() -> QuantaleMapP:
    return QuantaleMapP(FellBundleSpec(group_groupoid(cyclic_group(2))))


def z2_normalizer(p: QuantaleMapP) -> np.ndarray:
    """(delta_1 + i delta_0) / sqrt 2: a unitary whose support is the whole group."""
    b = p.bundle
    return (b.delta(1) + 1j * b.delta(0)) / np.sqrt(2)


def unit_context(p: QuantaleMapP, seed: int = 0) -> SubalgebraContext:
    return SubalgebraContext(p.A, p.p_star(p.G.units_mask), seed)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _status(ok: bool) -> str:
    return REPRODUCED if ok else MISMATCH


def case_z2(samples: int = 1000, seed: int = 0) -> dict:
    p = z2_map()
    A, b = p.A, p.bundle
    n = z2_normalizer(p)
    ctx = unit_context(p, seed)
    ns = A.star(n)
    err_nsn = float(np.linalg.norm(A.mul(ns, n) - b.delta(0)))
    err_nns = float(np.linalg.norm(A.mul(n, ns) - b.delta(0)))
    nb_support = p.p_shriek(qmul(A.element([n]), ctx.b))
    ipi = check_ipi_stable(p, normalizers=[n], samples=samples, seed=seed)
    stable = check_stable(p, samples=samples, seed=seed)
    germs = germ_groupoid_B(ctx, [A.element([n])])
    ok = (err_nsn < 1e-9 and err_nns < 1e-9 and is_normalizer(ctx, n)
          and nb_support == p.G.full_mask and ipi.failed and stable.failed)
    return {"case": "Z2", "status": _status(ok), "values": {
        "n*n - delta_0": err_nsn, "n n* - delta_0": err_nns,
        "is_normalizer": is_normalizer(ctx, n), "support of nB": p.names(nb_support),
        "ipi_stable": ipi.to_dict(), "stable": stable.to_dict(),
        "generated germ groupoid arrows": germs.groupoid.arrow_count}}


def case_diagonal(n: int, samples: int = 1000, seed: int = 0) -> dict:
    p = QuantaleMapP(FellBundleSpec(pair_groupoid(n)))
    ctx = unit_context(p, seed)
    gens = [sigma_hat(ctx, m) for m in signature_normalizers(ctx, seed)]
    germs = germ_groupoid_B(ctx, gens)
    comp = comparison_map(ctx, p, germs)
    ipi = check_ipi_stable(p, samples=samples, seed=seed)
    quantic = check_quantic_bundle(p, samples=samples, seed=seed)
    stable = check_stable(p, samples=samples, seed=seed)
    weyl = weyl_groupoid(ctx, gens)
    ok = (is_isomorphic(germs.groupoid, pair_groupoid(n)) and comp.is_iso and comp.triangle_commutes
          and ipi.verdict == "verified-by-theorem" and ipi.details["violations"] == 0
          and quantic.verdict == stable.verdict == "holds-exhaustive"
          and weyl.arrow_count == germs.groupoid.arrow_count)
    return {"case": f"diagonal M{n}", "status": _status(ok), "values": {
        "signature normalizers": len(gens), "G_B arrows": germs.groupoid.arrow_count,
        "G_B is pair groupoid": is_isomorphic(germs.groupoid, pair_groupoid(n)),
        "comparison iso": comp.is_iso, "triangle": comp.triangle_commutes,
        "ipi_stable": ipi.to_dict(), "quantic": quantic.verdict, "stable": stable.verdict,
        "Weyl groupoid arrows": weyl.arrow_count}}


def case_sigma_hat_counterexample() -> dict:
    """In M_2: (A X)(Y A) vanishes while A X A Y A contains E_12."""
    A = StarAlgebra.full_matrix(2)
    e11, e12, e22 = (A.from_matrix(np.outer(np.eye(2)[i], np.eye(2)[j])) for i, j in
                     ((0, 0), (0, 1), (1, 1)))
    X, Y, W = A.element([e11]), A.element([e22]), A.whole
    axya = qmul(qmul(qmul(W, X), Y), W)
    axaya = qmul(qmul(qmul(qmul(W, X), W), Y), W)
    residual = float(np.linalg.norm(e12 - axaya.space.project(e12)))
    xa, axa = qmul(X, W), qmul(qmul(W, X), W)
    ok = axya.dim == 0 and residual < 1e-9 and xa.dim < axa.dim
    return {"case": "sigma-hat counterexample", "status": _status(ok), "values": {
        "dim AXYA": axya.dim, "E12 residual in AXAYA": residual,
        "dim XA": xa.dim, "dim AXA": axa.dim}}


def case_mixed_spectrum(n: int = 3, seed: int = 0) -> dict:
    """B = span{diag(I_n, 0), diag(0, 1)} in M_{n+1}."""
    A = StarAlgebra.full_matrix(n + 1)
    p1 = np.diag([1.0] * n + [0.0])
    p2 = np.diag([0.0] * n + [1.0])
    B = A.element_of_matrices([p1, p2])
    ctx = SubalgebraContext(A, B, seed)
    gens = []
    for perm in itertools.permutations(range(n)):
        m = np.zeros((n + 1, n + 1))
        m[list(perm), list(range(n))] = 1
        m[n, n] = 1
        gens.append(sigma_hat(ctx, A.from_matrix(m)))
    germs = germ_groupoid_B(ctx, gens)
    G = germs.groupoid
    sizes = sorted((len(isotropy(G, x)) for x in range(G.object_count)), reverse=True)
    weyl = weyl_groupoid(ctx, gens)
    rng = np.random.default_rng(seed)
    u = np.zeros((n + 1, n + 1), dtype=complex)
    u[:n, :n] = random_unitary(n, rng)
    u[n, n] = 1
    generic_accepted = is_normalizer(ctx, A.from_matrix(u))
    ok = ctx.points == 2 and sizes == [len(gens), 1] and weyl.arrow_count == 2
    return {"case": f"mixed spectrum M{n + 1}", "status": _status(ok), "values": {
        "points": ctx.points, "isotropy sizes": sizes, "Weyl groupoid arrows": weyl.arrow_count,
        "non-permutation unitary block accepted as normalizer": generic_accepted}}


def case_c2_fiber() -> dict:
    fiber = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], dtype=complex)
    p = QuantaleMapP(FellBundleSpec(discrete_groupoid(1), ProductBundle(fiber)))
    rep = check_quantic_bundle(p, samples=0)
    return {"case": "abelian C^2 fiber", "status": _status(rep.failed), "values": {
        "quantic": rep.to_dict()}}


def case_scalar_subalgebra(n: int = 3, seed: int = 0) -> dict:
    """B = C.I in M_n: the claim under test is that only scaled permutation matrices normalize."""
    A = StarAlgebra.full_matrix(n)
    ctx = SubalgebraContext(A, A.element_of_matrices([np.eye(n)]), seed)
    rng = np.random.default_rng(seed)
    trials = [A.from_matrix(random_unitary(n, rng)) for _ in range(20)]
    accepted = sum(is_normalizer(ctx, u) for u in trials)
    sampled = sample_normalizers(ctx, 5, seed)
    weyl = weyl_groupoid(ctx, [sigma_hat(ctx, m) for m in sampled])
    status = UNCONFIRMED if accepted == len(trials) else MISMATCH
    return {"case": f"scalar subalgebra of M{n}", "status": status, "values": {
        "random unitaries accepted": f"{accepted}/{len(trials)}",
        "Weyl groupoid arrows": weyl.arrow_count,
        "note": "normalizers are all scalar multiples of unitaries, not only of permutations"}}


def paper_examples(samples: int = 1000, seed: int = 0) -> list[dict]:
    return [case_z2(samples, seed), case_diagonal(2, samples, seed), case_diagonal(3, samples, seed),
            case_sigma_hat_counterexample(), case_mixed_spectrum(3, seed), case_c2_fiber(),
            case_scalar_subalgebra(3, seed)]
