import random

import pytest

from profsite.corpus import covering_sieves, registry_for, standard_towers
from profsite.groups import level_kernel
from profsite.gsets import EquivariantMap, coset_gset, disjoint_union, empty_gset, fixed_points, gsets_up_to_size, point, trivial_gset
from profsite.sheaves import (
    NoWitness,
    SheafError,
    empty_presheaf_check,
    fixed_point_presheaf,
    matching_families,
    matching_families_naive,
    orbit_generators,
    representable_presheaf,
    restrict,
    sheaf_condition,
    subcanonicality_witness,
    witness_search,
)
from profsite.site import FinToFin, GToFin, GToG, Sieve, hom, identity, the_group


def u1(t):
    return coset_gset(level_kernel(t, 1))


def test_restriction_is_precomposition(c2):
    G = the_group(c2)
    X = u1(c2)
    P = representable_presheaf(X, [point(c2), X, G])
    s = GToFin(G, X, 1)
    t = GToG(G, c2.lift(1))
    assert restrict(P, t, s).value == X.act(c2.lift(1), 1)


def test_matching_families_on_the_point(c2):
    # every f: G -> * is fixed by precomposition with all of G, so a family is a G-fixed point of X
    G, pt = the_group(c2), point(c2)
    S = Sieve.of([GToFin(G, pt, 0)])
    for X, expected in ((u1(c2), 0), (trivial_gset(c2, 2), 2), (G, 0)):
        P = representable_presheaf(X, [pt, G])
        fams = matching_families(P, S)
        assert len(fams) == expected
        assert len(matching_families_naive(P, S)) == expected


def test_sheaf_condition_on_the_point(c2):
    G, pt = the_group(c2), point(c2)
    S = Sieve.of([GToFin(G, pt, 0)])
    res = sheaf_condition(representable_presheaf(u1(c2), [pt, G]), pt, S)
    assert (res.sections, res.families) == (0, 0)
    res = sheaf_condition(representable_presheaf(trivial_gset(c2, 2), [pt, G]), pt, S)
    assert res.ok and res.sections == res.families == 2


def test_sheaf_condition_needs_a_covering_sieve(c2):
    X = u1(c2)
    Y = disjoint_union([X, X])
    S = Sieve.of([FinToFin(EquivariantMap(X, Y, (0, 1)))])
    with pytest.raises(SheafError):
        sheaf_condition(representable_presheaf(X, [X, Y]), Y, S)


def test_families_count_equals_fixed_point_product(c2):
    # families on the orbit-generator sieve are counted by hom(C, X), not by |X|^n
    tests = [C for C in gsets_up_to_size(c2, 4) if C.size]
    for X in (u1(c2), disjoint_union([u1(c2), point(c2)]), coset_gset(level_kernel(c2, 2))):
        for C, sections, families, predicted in witness_search(X, tests):
            n = len(orbit_generators(C))
            assert predicted == X.size**n
            assert sections == families == len(hom(C, X))


def test_witness_targets(c2):
    for X in (u1(c2), disjoint_union([u1(c2), point(c2)]), the_group(c2)):
        with pytest.raises(NoWitness) as info:
            subcanonicality_witness(X)
        assert info.value.lhs == info.value.rhs
    with pytest.raises(NoWitness, match="trivial"):
        subcanonicality_witness(point(c2))


def test_empty_presheaf(towers):
    for t in towers.values():
        reg = registry_for(t)
        sieves = covering_sieves(reg, random.Random(0), per_object=1)
        results = empty_presheaf_check(reg, sieves)
        assert results and all(r.ok for _, r in results)
        for S, r in results:
            if S.codomain == empty_gset(t):
                assert (r.sections, r.families) == (1, 1)
            else:
                assert (r.sections, r.families) == (0, 0)


def test_empty_presheaf_on_group_maximal_sieve(c2):
    reg = [empty_gset(c2), the_group(c2)]
    G = the_group(c2)
    S = Sieve.of([f for A in reg for f in hom(A, G)])
    ((_, r),) = empty_presheaf_check(reg, [S])
    assert r.ok


def test_fixed_point_presheaf(c2):
    X = disjoint_union([u1(c2), point(c2)])
    reg = [point(c2), u1(c2), coset_gset(level_kernel(c2, 2)), the_group(c2)]
    fp = fixed_point_presheaf(X, reg)
    assert sorted(fp.isos[u1(c2)].values()) == list(fixed_points(X, level_kernel(c2, 1)))
    assert sorted(fp.isos[point(c2)].values()) == [2]
    assert len(fp.isos[the_group(c2)]) == X.size


def test_identity_restricts_trivially(c2):
    X = u1(c2)
    P = representable_presheaf(X, [X])
    for s in P.sections(X):
        assert restrict(P, identity(X), s) == s
