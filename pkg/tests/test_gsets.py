import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profsite.corpus import random_gset, standard_towers
from profsite.groups import OpenSubgroup, full_subgroup, level_kernel
from profsite.gsets import (
    EquivariantMap,
    GSetError,
    brute_force_equivariant_maps,
    check_pullback_universal,
    coset_gset,
    disjoint_union,
    empty_gset,
    enumerate_equivariant_maps,
    fixed_points,
    gsets_up_to_size,
    identity_map,
    make_gset,
    orbits_and_stabilizers,
    point,
    pullback_finite,
    stabilizer,
    trivial_gset,
)

C2 = standard_towers()["cyclic2_d3"]


def three_points(t):
    return make_gset(t, {"size": 3, "level": 1, "generators": {"1": [1, 0, 2]}})


def test_swap_is_the_coset_set(c2):
    X = make_gset(c2, {"size": 2, "level": 1, "table": [[0, 1], [1, 0]]})
    assert X == coset_gset(level_kernel(c2, 1))
    assert X.act(c2.element((1, 1, 1)), 0) == 1


def test_point_and_bad_rows(c2):
    assert make_gset(c2, {"size": 1, "level": 2, "table": [[0]] * 4}).is_trivial()
    with pytest.raises(GSetError):
        make_gset(c2, {"size": 2, "level": 1, "table": [[0, 1], [0, 0]]})
    with pytest.raises(GSetError):
        make_gset(c2, {"size": 2, "level": 2, "generators": {"2": [1, 0]}})


def test_three_point_orbits(c2):
    dec = orbits_and_stabilizers(three_points(c2))
    assert [(o.representative, o.stabilizer.index) for o in dec.orbits] == [(0, 2), (2, 1)]
    assert fixed_points(three_points(c2), full_subgroup(c2)) == (2,)


def test_trivial_and_transitive_orbits(c2):
    dec = orbits_and_stabilizers(trivial_gset(c2, 4))
    assert len(dec.orbits) == 4 and all(o.stabilizer.index == 1 for o in dec.orbits)
    U = level_kernel(c2, 2)
    dec = orbits_and_stabilizers(coset_gset(U))
    assert len(dec.orbits) == 1 and dec.orbits[0].stabilizer == U


def test_coset_sets(c2):
    assert coset_gset(full_subgroup(c2)).size == 1
    assert coset_gset(OpenSubgroup.make(c2, 3, [0])).size == 8
    assert coset_gset(level_kernel(c2, 1)).action.tolist() == [[0, 1], [1, 0]]


def test_hom_examples(c2):
    U1 = coset_gset(level_kernel(c2, 1))
    assert len(enumerate_equivariant_maps(empty_gset(c2), U1)) == 1
    assert enumerate_equivariant_maps(point(c2), U1) == []
    assert len(enumerate_equivariant_maps(U1, U1)) == 2
    assert fixed_points(U1, level_kernel(c2, 1)) == (0, 1)


def test_equivariance_is_checked(c2):
    U1 = coset_gset(level_kernel(c2, 1))
    with pytest.raises(GSetError):
        EquivariantMap(trivial_gset(c2, 2), U1, (0, 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_orbit_iso_and_hom_oracle(seed):
    rng = random.Random(seed)
    X = random_gset(C2, rng, 6)
    Y = random_gset(C2, rng, 3)
    orbits_and_stabilizers(X).verify()
    fast = sorted(m.table for m in enumerate_equivariant_maps(X, Y))
    assert fast == sorted(brute_force_equivariant_maps(X, Y))
    for x in range(X.size):
        U = stabilizer(X, x)
        assert x in fixed_points(X, U)


def test_pullback_over_point(c2):
    X, Y = coset_gset(level_kernel(c2, 1)), three_points(c2)
    pt = point(c2)
    f = EquivariantMap(X, pt, (0,) * X.size)
    g = EquivariantMap(Y, pt, (0,) * Y.size)
    P, left, right = pullback_finite(f, g)
    assert P.size == X.size * Y.size
    apexes = [A for A in gsets_up_to_size(c2, 4)]
    assert check_pullback_universal(f, g, P, left, right, apexes) is None


def test_pullback_along_identity(c2):
    X = three_points(c2)
    Y = disjoint_union([coset_gset(level_kernel(c2, 1)), point(c2)])
    f = enumerate_equivariant_maps(Y, X)[-1]
    P, left, right = pullback_finite(identity_map(X), f)
    assert P.size == Y.size and right.is_bijective()


def test_gset_census(c2):
    assert len(gsets_up_to_size(c2, 6)) == 20
    assert gsets_up_to_size(c2, 6)[0].size == 0
