"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line in ``RESULTS``; the lines are printed in
the terminal summary (see conftest.py).  Counts are exact, so no numeric
tolerance applies anywhere below; the only pinned bound is the 60 s budget
of criterion 1.
"""

from __future__ import annotations

import itertools
import random
import time

import pytest

from profsite.checks import check_fixed_point_count
from profsite.corpus import (
    CASES,
    covering_sieves,
    random_epi_cover,
    random_gset,
    registry_for,
    stability_instances,
    standard_towers,
)
from profsite.groups import build_tower, level_kernel, subgroup_count_growth
from profsite.gsets import (
    EquivariantMap,
    check_pullback_universal,
    coset_gset,
    disjoint_union,
    gsets_up_to_size,
    orbits_and_stabilizers,
    point,
    pullback_finite,
    transitive_gsets,
    trivial_gset,
)
from profsite.sheaves import (
    NoWitness,
    empty_presheaf_check,
    matching_families,
    matching_families_naive,
    orbit_generators,
    representable_presheaf,
    subcanonicality_witness,
)
from profsite.site import (
    FinToFin,
    GToFin,
    GToG,
    InSite,
    NotInSite,
    Sieve,
    VacuousToG,
    compose,
    compose_covers,
    fiber_product_diagnostic,
    hom,
    is_covering_sieve,
    is_epimorphic_cover,
    stability_refine,
    the_group,
    truncated_saturation,
)

TIME_BUDGET_S = 60.0
INSTANCES_PER_CASE = 12  # 12 x 6 labels x 3 towers = 216 instances
RESULTS: dict[int, str] = {}

TOWERS = standard_towers()


def report(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, detail


def cyclic2(depth: int):
    return build_tower({"kind": "cyclic_p", "p": 2, "depth": depth})


def test_criterion_01_pretopology():
    start = time.perf_counter()
    instances, problems = 0, []
    per_case = {c: 0 for c in CASES}
    isos = transitive = 0
    for name, t in TOWERS.items():
        rng = random.Random(f"acceptance-1:{name}")
        for case, cover, g in stability_instances(t, rng, INSTANCES_PER_CASE):
            instances += 1
            cert = stability_refine(cover, g)
            cert.verify()
            if cert.case != case or not cert.refined.is_epimorphic:
                problems.append((name, case, cert.case))
            per_case[case] += 1
            C = cover.codomain
            for f in hom(C, C):
                if isinstance(f, GToG) or (isinstance(f, FinToFin) and f.map.is_bijective()):
                    isos += 1
                    if not is_epimorphic_cover([f]).ok:
                        problems.append((name, "iso", repr(f)))
            subs = [random_epi_cover(f.domain, rng) for f in cover.members]
            transitive += 1
            if not compose_covers(cover, subs).is_epimorphic:
                problems.append((name, "transitivity", case))
    elapsed = time.perf_counter() - start
    ok = not problems and instances >= 200 and min(per_case.values()) > 0 and elapsed < TIME_BUDGET_S
    report(
        1,
        ok,
        f"{instances} instances {per_case}, {isos} isomorphism covers, {transitive} composites, "
        f"{len(problems)} problems, {elapsed:.1f}s (budget {TIME_BUDGET_S:.0f}s)",
    )


def test_criterion_02_orbit_isomorphism():
    total = 0
    for name, t in TOWERS.items():
        rng = random.Random(f"acceptance-2:{name}")
        for _ in range(50):
            X = random_gset(t, rng, 8)
            orbits_and_stabilizers(X).verify()
            total += 1
    report(2, total >= 50, f"{total} G-sets of size <= 8 verified bijective and equivariant")


def test_criterion_03_fixed_point_count():
    pairs, failures = 0, []
    for name, t in TOWERS.items():
        rec = check_fixed_point_count(t, max_index=8, max_size=6, oracle=True)
        pairs += rec.payload.get("pairs", 0)
        if rec.status != "Pass":
            failures.append((name, rec.payload))
    report(3, not failures, f"{pairs} (U, X) pairs, index <= 8, |X| <= 6, oracle agrees; failures {failures}")


def test_criterion_04_maps_into_and_out_of_g():
    checked, bad = 0, []
    for name, t in TOWERS.items():
        G = the_group(t)
        corpus = registry_for(t)[:-1] + gsets_up_to_size(t, 4)
        for C in corpus:
            checked += 1
            if C.size and hom(C, G):
                bad.append((name, "into G", repr(C)))
            if len(hom(G, C)) != C.size:
                bad.append((name, "out of G", repr(C)))
    report(4, not bad, f"{checked} finite objects; hom(C, G) empty and |hom(G, X)| = |X|; bad {bad}")


def test_criterion_05_empty_presheaf():
    total, bad = 0, []
    for name, t in TOWERS.items():
        reg = registry_for(t)
        for S, res in empty_presheaf_check(reg, covering_sieves(reg, random.Random(f"acceptance-5:{name}"))):
            total += 1
            if not res.ok:
                bad.append((name, repr(S.codomain)))
    report(5, not bad, f"{total} covering sieves over 7 objects per tower; failing {bad}")


def test_criterion_06_non_subcanonicality():
    rows, ok = [], True
    expected = {("G/U1", 3): (0, 2), ("G", 3): (0, 8)}
    for depth in (2, 3):
        t = cyclic2(depth)
        U1 = coset_gset(level_kernel(t, 1))
        targets = {"G/U1": U1, "G/U1 + *": disjoint_union([U1, point(t)], name="G/U1 + *"), "G": the_group(t)}
        for label, X in targets.items():
            try:
                w = subcanonicality_witness(X)
                lhs, rhs = w.lhs, w.rhs
                oracle = len(matching_families_naive(representable_presheaf(X, [w.test_object, the_group(t)]), w.sieve))
                good = lhs != rhs and oracle == rhs
            except NoWitness as exc:
                lhs, rhs, good = exc.lhs, exc.rhs, False
            want = expected.get((label, depth))
            if want is not None and (lhs, rhs) != want:
                good = False
            ok &= good
            rows.append(f"d{depth} {label}: lhs {lhs} rhs {rhs}" + (f" (want {want[0]}/{want[1]})" if want else ""))
    report(6, ok, "; ".join(rows))


def test_criterion_07_matching_family_closed_form():
    t = cyclic2(3)
    G = the_group(t)
    pieces = [T for T in transitive_gsets(t, 4)]
    targets = [X for X in gsets_up_to_size(t, 4) if X.size]
    cases = agree = 0
    mismatches = []
    for n in (1, 2, 3):
        for combo in itertools.combinations_with_replacement(range(len(pieces)), n):
            parts = [pieces[i] for i in combo]
            if sum(p.size for p in parts) > 6:
                continue
            C = parts[0] if n == 1 else disjoint_union(parts)
            S = Sieve(C, orbit_generators(C))
            for X in targets:
                P = representable_presheaf(X, [C, G])
                count = len(matching_families(P, S))
                cases += 1
                if count == X.size**n:
                    agree += 1
                elif len(mismatches) < 3:
                    mismatches.append(f"C={C.name or repr(C)} X size {X.size}: {count} vs {X.size**n}")
    report(7, agree == cases, f"{agree}/{cases} (C, X) pairs match |X|^n; e.g. {mismatches}")


def test_criterion_08_groupoid():
    families = 0
    bad = []
    for name, t in TOWERS.items():
        G = the_group(t)
        trans = hom(G, G)
        vac = VacuousToG(registry_for(t)[0], G)
        if len(trans) <= 8:
            subsets = [list(c) for k in range(1, len(trans) + 1) for c in itertools.combinations(trans, k)]
        else:
            rng = random.Random(f"acceptance-8:{name}")
            subsets = [rng.sample(trans, rng.randint(1, len(trans))) for _ in range(300)]
        for fam in subsets:
            for extra in ([], [vac]):
                families += 1
                if not is_epimorphic_cover(fam + extra).ok:
                    bad.append((name, "cover"))
        full = set(trans)
        for f in trans:
            if set(truncated_saturation(Sieve(G, (f,)), [G])) != full:
                bad.append((name, "saturation", repr(f)))
    report(8, not bad, f"{families} families containing a translation cover; single generators saturate; bad {bad[:3]}")


def test_criterion_09_pullback_diagnostics():
    t = cyclic2(3)
    G = the_group(t)
    pt = point(t)
    ex1 = fiber_product_diagnostic(GToFin(G, pt, 0), GToFin(G, pt, 0))
    C = trivial_gset(t, 3)
    ex2 = fiber_product_diagnostic(GToFin(G, C, 0), FinToFin(EquivariantMap(C, C, (0, 0, 0))))
    examples_ok = (
        isinstance(ex1, NotInSite)
        and ex1.description == "free orbits indexed by G"
        and isinstance(ex2, NotInSite)
        and ex2.free_orbits == C.size
    )
    cospans, bad = 0, []
    for name, tw in TOWERS.items():
        rng = random.Random(f"acceptance-9:{name}")
        apexes = gsets_up_to_size(tw, 6)
        while cospans < 20 * (list(TOWERS).index(name) + 1):
            Z = random_gset(tw, rng, 3)
            A, B = random_gset(tw, rng, 4), random_gset(tw, rng, 4)
            fa, fb = hom(A, Z), hom(B, Z)
            if not (fa and fb):
                continue
            f, g = rng.choice(fa), rng.choice(fb)
            d = fiber_product_diagnostic(f, g)
            P, left, right = pullback_finite(f.map, g.map)
            cospans += 1
            if not isinstance(d, InSite) or d.obj != P:
                bad.append((name, "diagnostic"))
            elif check_pullback_universal(f.map, g.map, P, left, right, apexes) is not None:
                bad.append((name, "universal"))
    report(
        9,
        examples_ok and cospans >= 50 and not bad,
        f"examples: {ex1.description!r}, {ex2.description!r}; {cospans} finite cospans, apexes up to size 6; bad {bad[:3]}",
    )


def test_criterion_10_coarser_than_atomic():
    results = []
    for name, t in TOWERS.items():
        X = coset_gset(level_kernel(t, 1))
        Y = disjoint_union([X, X])
        inc = FinToFin(EquivariantMap(X, Y, tuple(range(X.size))))
        results.append(not is_covering_sieve(Sieve(Y, (inc,))))
    report(10, all(results), f"left inclusion G/U1 -> G/U1 + G/U1 not covering on {sum(results)}/{len(results)} towers")


def test_criterion_11_subgroup_growth():
    growth = subgroup_count_growth(cyclic2(3))
    strictly = all(a < b for a, b in zip(growth, growth[1:]))
    report(11, growth == [2, 3, 4] and strictly, f"growth {growth}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
