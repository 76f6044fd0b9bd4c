import numpy as np
import pytest
from hypothesis import settings

from fellquant.bundlemap import QuantaleMapP
from fellquant.convalg import FellBundleSpec, LineTwist, ProductBundle
from fellquant.groupoid import (cyclic_group, discrete_groupoid, group_groupoid, pair_groupoid,
                                symmetric_group, translation_groupoid)

settings.register_profile("suite", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("suite")


def z4_bicharacter() -> np.ndarray:
    a = np.arange(4)
    return np.exp(2j * np.pi * np.outer(a, a) / 4)


def diag_fiber(q: int) -> np.ndarray:
    return np.array([np.diag(np.eye(q)[i]) for i in range(q)], dtype=complex)


def full_fiber(q: int) -> np.ndarray:
    return np.array([np.outer(np.eye(q)[i], np.eye(q)[j]) for i in range(q) for j in range(q)],
                    dtype=complex)


def suite_bundles() -> dict[str, FellBundleSpec]:
    z4 = group_groupoid(cyclic_group(4))
    return {
        "Z2": FellBundleSpec(group_groupoid(cyclic_group(2))),
        "Z3": FellBundleSpec(group_groupoid(cyclic_group(3))),
        "Z4 twisted": FellBundleSpec(z4, LineTwist(z4_bicharacter())),
        "S3": FellBundleSpec(group_groupoid(symmetric_group(3)[0])),
        "pair2": FellBundleSpec(pair_groupoid(2)),
        "pair3": FellBundleSpec(pair_groupoid(3)),
        "Z2 free on 2": FellBundleSpec(translation_groupoid(cyclic_group(2), cyclic_group(2))),
        "C2 fiber": FellBundleSpec(discrete_groupoid(1), ProductBundle(diag_fiber(2))),
        "M2 fiber over pair2": FellBundleSpec(pair_groupoid(2), ProductBundle(full_fiber(2))),
    }


LINE_NAMES = ["Z2", "Z3", "Z4 twisted", "S3", "pair2", "pair3", "Z2 free on 2"]

_MAPS: dict[str, QuantaleMapP] = {}


def suite_map(name: str) -> QuantaleMapP:
    if name not in _MAPS:
        _MAPS[name] = QuantaleMapP(suite_bundles()[name])
    return _MAPS[name]


@pytest.fixture(params=list(suite_bundles()))
def suite(request) -> QuantaleMapP:
    return suite_map(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
