import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profsite import kernels
from profsite._kernels_py import brute_force_equivariant as py_brute
from profsite.corpus import object_sample, random_gset, standard_towers
from profsite.groups import cyclic_group, symmetric_group

pytestmark = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")

BACKENDS = [kernels.BACKENDS["python"], kernels.BACKENDS.get("cython")]


def test_backend_switch():
    old = kernels.backend()
    try:
        kernels.set_backend("python")
        assert kernels.backend() == "python"
    finally:
        kernels.set_backend(old)
    with pytest.raises(KeyError):
        kernels.set_backend("fortran")


@pytest.mark.parametrize("grp", [cyclic_group(8), symmetric_group(3), symmetric_group(4)])
def test_group_kernels_agree(grp):
    py, cy = BACKENDS
    mul = kernels.as_table(grp.mul)
    assert py.associativity_violation(mul) is None
    assert cy.associativity_violation(mul) is None
    bad = mul.copy()
    bad[1, 1] = (bad[1, 1] + 1) % grp.order
    assert py.associativity_violation(bad) == cy.associativity_violation(bad)
    for members in ([0], [0, 1], [1], [2, 3]):
        mask = np.zeros(grp.order, dtype=np.uint8)
        mask[members] = 1
        assert np.array_equal(py.subgroup_closure(mul, mask), cy.subgroup_closure(mul, mask))


def test_homomorphism_kernels_agree():
    py, cy = BACKENDS
    src, dst = cyclic_group(8), cyclic_group(4)
    phi = kernels.as_table(np.arange(8) % 4)
    assert py.homomorphism_violation(src.mul, dst.mul, phi) is None
    assert cy.homomorphism_violation(kernels.as_table(src.mul), kernels.as_table(dst.mul), phi) is None
    broken = kernels.as_table([0, 1, 1, 1, 0, 1, 1, 1])
    assert py.homomorphism_violation(src.mul, dst.mul, broken) == cy.homomorphism_violation(
        kernels.as_table(src.mul), kernels.as_table(dst.mul), broken
    )


C2 = standard_towers()["cyclic2_d3"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_action_kernels_agree(seed):
    py, cy = BACKENDS
    rng = random.Random(seed)
    X, Y = random_gset(C2, rng, 6), random_gset(C2, rng, 4)
    ax, ay = kernels.as_table(X.table_at(3)), kernels.as_table(Y.table_at(3))
    assert np.array_equal(py.orbit_labels(ax), cy.orbit_labels(ax))
    maps = py.brute_force_equivariant(ax, ay)
    assert maps == cy.brute_force_equivariant(ax, ay)
    table = kernels.as_table([rng.randrange(Y.size) for _ in range(X.size)])
    assert py.equivariance_violation(ax, ay, table) == cy.equivariance_violation(ax, ay, table)
    assert (py.equivariance_violation(ax, ay, table) is None) == (tuple(table.tolist()) in maps)


def test_orbit_and_brute_force_on_real_gsets():
    py, cy = BACKENDS
    objs = [X for X in object_sample(C2) if 0 < X.size <= 4]
    for X in objs:
        for Y in objs:
            ax, ay = kernels.as_table(X.table_at(3)), kernels.as_table(Y.table_at(3))
            assert np.array_equal(py.orbit_labels(ax), cy.orbit_labels(ax))
            assert py.brute_force_equivariant(ax, ay) == cy.brute_force_equivariant(ax, ay)


def test_brute_force_edge_cases():
    empty = kernels.as_table(np.zeros((2, 0)))
    one = kernels.as_table([[0], [0]])
    assert py_brute(empty, one) == [()]
    assert py_brute(one, empty) == []
