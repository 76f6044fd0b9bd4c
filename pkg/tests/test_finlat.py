import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fellquant.errors import JoinNotPreserved, NotMonotone
from fellquant.finlat import (FiniteSupLattice, MonotoneMap, is_adjoint_pair, is_join_preserving,
                              join_violation, left_adjoint, right_adjoint)


def brute_right_adjoint(f: MonotoneMap) -> list[int]:
    src, tgt = f.source, f.target
    out = []
    for y in range(tgt.element_count):
        below = [x for x in range(src.element_count) if tgt.leq[f(x), y]]
        top = [x for x in below if all(src.leq[z, x] for z in below)]
        out.append(top[0])
    return out


def test_powerset_and_chain_shapes():
    P = FiniteSupLattice.powerset(3)
    assert P.element_count == 8 and P.bottom == 0 and P.top == 7
    assert P.join(1, 2) == 3 and P.meet(3, 6) == 2
    C = FiniteSupLattice.chain(4)
    assert C.join(1, 3) == 3 and C.meet(1, 3) == 1


def test_rejects_non_lattice():
    leq = np.array([[1, 0, 1, 1], [0, 1, 1, 1], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=bool)
    with pytest.raises(ValueError):
        FiniteSupLattice(leq)


def test_non_monotone_map_rejected():
    C = FiniteSupLattice.chain(2)
    with pytest.raises(NotMonotone):
        MonotoneMap(C, C, (1, 0))


@given(st.lists(st.integers(0, 7), min_size=8, max_size=8))
def test_join_maps_have_brute_force_right_adjoint(images):
    # a join-preserving map out of a powerset is fixed by its atoms
    P = FiniteSupLattice.powerset(3)
    Q = FiniteSupLattice.powerset(3)
    atoms = images[:3]
    graph = tuple(int(np.bitwise_or.reduce([atoms[i] for i in range(3) if m >> i & 1] or [0]))
                  for m in range(8))
    f = MonotoneMap(P, Q, graph)
    assert is_join_preserving(f)
    g = right_adjoint(f)
    assert list(g.graph) == brute_right_adjoint(f)
    assert is_adjoint_pair(f, g)
    assert list(left_adjoint(g).graph) == list(f.graph)


def test_join_violation_witness():
    P = FiniteSupLattice.powerset(2)
    f = MonotoneMap(P, P, (0, 0, 0, 3))  # f({0}) v f({1}) = 0 but f({0,1}) = 3
    w = join_violation(f)
    assert w is not None
    with pytest.raises(JoinNotPreserved):
        right_adjoint(f)


def test_adjoint_on_chain_exhaustive():
    C3, C4 = FiniteSupLattice.chain(3), FiniteSupLattice.chain(4)
    for graph in itertools.combinations_with_replacement(range(4), 3):
        f = MonotoneMap(C3, C4, graph)
        if graph[0] != 0:
            assert not is_join_preserving(f)
            continue
        g = right_adjoint(f)
        assert list(g.graph) == brute_right_adjoint(f)
