import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from profsite.groups import (
    OpenSubgroup,
    TowerError,
    build_tower,
    constant_tower_spec,
    cyclic_group,
    element_arith,
    enumerate_open_subgroups,
    project,
    subgroup_count_growth,
    symmetric_group,
)
from profsite.corpus import TOWER_SPECS


def test_cyclic_orders_and_transitions(c2):
    assert c2.orders == [2, 4, 8]
    assert list(c2.projection(3, 1)) == [x % 2 for x in range(8)]


def test_product_orders():
    t = build_tower(TOWER_SPECS["s3xc2_d2"])
    assert t.orders == [12, 24]


def test_broken_transition_names_the_pair():
    spec = {
        "kind": "explicit",
        "levels": [cyclic_group(2).mul.tolist(), cyclic_group(4).mul.tolist()],
        "transitions": [[0, 1, 1, 1]],
    }
    with pytest.raises(TowerError, match=r"p_1.*pair"):
        build_tower(spec)


@pytest.mark.parametrize(
    "spec",
    [
        {"kind": "cyclic_p", "p": 4, "depth": 2},
        {"kind": "cyclic_p", "p": 2},
        {"kind": "cyclic_p", "p": 2, "depth": 0},
        {"kind": "nope"},
        {"kind": "explicit", "levels": [[[0, 1], [0, 1]]], "transitions": []},
        {"kind": "product", "factors": []},
    ],
)
def test_bad_specs(spec):
    with pytest.raises(TowerError):
        build_tower(spec)


def test_element_arithmetic(c2):
    assert element_arith("identity", c2).coords == (0, 0, 0)
    assert element_arith("inv", c2, (1, 1, 1)).coords == (1, 3, 7)
    a = c2.element((1, 1, 1))
    assert (a * a.inverse()).is_identity()
    with pytest.raises(TowerError):
        element_arith("mul", c2, (0, 1, 1), (0, 0, 0))


def test_project(c2):
    el = c2.element((1, 3, 7))
    assert project(el, 1) == 1 and project(el, 3) == 7
    for k in (1, 2, 3):
        assert project(c2.identity(), k) == c2.level(k).identity


def test_open_subgroups(c2):
    subs = enumerate_open_subgroups(c2, 2)
    assert sorted(len(U.at_level(2)) for U in subs) == [1, 2, 4]
    assert len(enumerate_open_subgroups(c2, 1)) == 2


def test_trivial_level_has_one_subgroup():
    t = build_tower({"kind": "explicit", "levels": [[[0]]], "transitions": []})
    assert len(enumerate_open_subgroups(t, 1)) == 1


def test_normal_form_lowers_level(c2):
    U = OpenSubgroup.make(c2, 3, [0, 2, 4, 6])
    assert U.level == 1 and U.members == frozenset({0})
    assert U.index == 2


def test_growth():
    assert subgroup_count_growth(build_tower(TOWER_SPECS["cyclic2_d3"])) == [2, 3, 4]
    assert subgroup_count_growth(build_tower(TOWER_SPECS["cyclic3_d2"])) == [2, 3]
    const = build_tower(constant_tower_spec(symmetric_group(3), 3))
    assert subgroup_count_growth(const) == [6, 6, 6]


def test_truncate(c2):
    assert c2.truncate(2).orders == [2, 4]
    with pytest.raises(TowerError):
        c2.truncate(4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
def test_lifted_elements_form_a_group(a, b, c):
    t = build_tower(TOWER_SPECS["cyclic2_d3"])
    x, y, z = t.lift(a), t.lift(b), t.lift(c)
    assert (x * y) * z == x * (y * z)
    assert x * x.inverse() == t.identity()
    for k in (1, 2):
        assert project(x * y, k) == int(t.level(k).mul[project(x, k), project(y, k)])


def test_symmetric_group_table():
    s3 = symmetric_group(3)
    assert s3.order == 6
    assert len(s3.subgroups) == 6
    assert sum(s3.is_normal(H) for H in s3.subgroups) == 3
    assert np.all(s3.mul[s3.inv, np.arange(6)] == s3.identity)
