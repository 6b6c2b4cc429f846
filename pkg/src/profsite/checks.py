"""Check suites run by ``profsite check``, and the report they produce."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import asdict, dataclass, field
from typing import Callable

from .corpus import CASES, covering_sieves, object_sample, random_epi_cover, random_gset, registry_for, stability_instances
from .groups import ProfiniteTower, enumerate_open_subgroups, level_kernel
from .gsets import (
    EquivariantMap,
    brute_force_equivariant_maps,
    coset_gset,
    disjoint_union,
    enumerate_equivariant_maps,
    fixed_points,
    orbits_and_stabilizers,
    point,
)
from .serialize import encode_certificate
from .sheaves import (
    NoWitness,
    empty_presheaf_check,
    matching_families,
    representable_presheaf,
    subcanonicality_witness,
)
from .site import (
    CertificateError,
    Cover,
    Factorization,
    FinToFin,
    GToG,
    RefinementCertificate,
    Sieve,
    VacuousToG,
    compose,
    compose_covers,
    hom,
    identity,
    is_covering_sieve,
    is_epimorphic_cover,
    stability_refine,
    the_group,
    truncated_saturation,
)

SUITES = ("pretopology", "stability", "sheaf", "witness")
# the witness suite reports a known failure and is only run when asked for by name
ALL_SUITES = ("pretopology", "stability", "sheaf")


@dataclass
class CheckRecord:
    name: str
    anchor: str
    status: str
    payload: dict = field(default_factory=dict)


@dataclass
class CheckReport:
    config: dict
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {"Pass": 0, "Fail": 0, "Skip": 0}
        for r in self.records:
            counts[r.status] += 1
        return counts

    @property
    def ok(self) -> bool:
        return all(r.status != "Fail" for r in self.records)

    def to_dict(self) -> dict:
        return {"config": self.config, "records": [asdict(r) for r in self.records], "summary": self.summary}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = []
        for r in self.records:
            detail = ", ".join(f"{k}={_short(v)}" for k, v in sorted(r.payload.items()))
            lines.append(f"{r.status:<4} {r.name} [{r.anchor}]" + (f" {detail}" if detail else ""))
        s = self.summary
        lines.append(f"summary: {s['Pass']} pass, {s['Fail']} fail, {s['Skip']} skip")
        return "\n".join(lines) + "\n"


def _short(v) -> str:
    text = json.dumps(v, sort_keys=True)
    return text if len(text) <= 80 else text[:77] + "..."


def _record(name: str, anchor: str, ok: bool, **payload) -> CheckRecord:
    return CheckRecord(name, anchor, "Pass" if ok else "Fail", payload)


# pretopology -----------------------------------------------------------------


def check_category_laws(tower: ProfiniteTower) -> CheckRecord:
    U1 = coset_gset(level_kernel(tower, 1))
    objs = [object_sample(tower)[0], point(tower), U1, the_group(tower)]
    homs = {(A, B): hom(A, B) for A in objs for B in objs}
    triples = 0
    for A, B, C, D in itertools.product(objs, repeat=4):
        for h in homs[(A, B)]:
            for g in homs[(B, C)]:
                gh = compose(g, h)
                for f in homs[(C, D)]:
                    triples += 1
                    if compose(f, gh) != compose(compose(f, g), h):
                        return _record("category laws", "composition is associative and unital", False, at=[repr(f), repr(g), repr(h)])
    for A, B in itertools.product(objs, repeat=2):
        for f in homs[(A, B)]:
            if compose(f, identity(A)) != f or compose(identity(B), f) != f:
                return _record("category laws", "composition is associative and unital", False, at=repr(f))
    return _record("category laws", "composition is associative and unital", True, triples=triples)


def check_isomorphism_axiom(tower: ProfiniteTower) -> CheckRecord:
    objs = registry_for(tower)
    count = 0
    for A in objs:
        isos = [f for f in hom(A, A) if isinstance(f, GToG) or (isinstance(f, FinToFin) and f.map.is_bijective())]
        for f in isos:
            count += 1
            if not is_epimorphic_cover([f]).ok:
                return _record("isomorphism axiom", "isomorphisms are covers", False, at=repr(f))
    return _record("isomorphism axiom", "isomorphisms are covers", True, isomorphisms=count)


def check_transitivity_axiom(tower: ProfiniteTower, rng: random.Random, n: int) -> CheckRecord:
    G = the_group(tower)
    for k in range(n):
        C = G if k % 4 == 0 else random_gset(tower, rng, 4)
        cover = random_epi_cover(C, rng)
        subs = [random_epi_cover(f.domain, rng) for f in cover.members]
        out = compose_covers(cover, subs)
        if not is_epimorphic_cover(out.members).ok:
            return _record("transitivity axiom", "composites of covers are covers", False, instance=k)
    return _record("transitivity axiom", "composites of covers are covers", True, instances=n)


def check_groupoid(tower: ProfiniteTower, rng: random.Random) -> CheckRecord:
    G = the_group(tower)
    empty = object_sample(tower)[0]
    translations = hom(G, G)
    vac = VacuousToG(empty, G)
    families = 0
    for _ in range(40):
        fam = rng.sample(translations, rng.randint(1, min(4, len(translations))))
        if rng.random() < 0.5:
            fam.append(vac)
        families += 1
        if not is_epimorphic_cover(fam).ok:
            return _record("atomic groupoid", "on G every nonempty family of translations covers", False, family=families)
    if is_epimorphic_cover([vac]).ok:
        return _record("atomic groupoid", "on G every nonempty family of translations covers", False, family="vacuous")
    full = set(translations)
    for f in translations:
        if set(truncated_saturation(Sieve(G, (f,)), [G])) != full:
            return _record("atomic groupoid", "a single translation generates the maximal sieve", False, at=repr(f))
    return _record(
        "atomic groupoid", "on G every nonempty family of translations covers", True, families=families, translations=len(full)
    )


def check_maps_into_group(tower: ProfiniteTower) -> CheckRecord:
    G = the_group(tower)
    objs = object_sample(tower)
    for C in objs:
        if C.size and hom(C, G):
            return _record("maps into G", "only G and the empty set map to G", False, at=repr(C))
        if len(hom(G, C)) != C.size:
            return _record("maps into G", "maps out of G are fixed by the image of 1", False, at=repr(C))
    return _record("maps into G", "only G and the empty set map to G; maps out of G are fixed by the image of 1", True, objects=len(objs))


def check_coarser_than_atomic(tower: ProfiniteTower) -> CheckRecord:
    X = coset_gset(level_kernel(tower, 1))
    Y = disjoint_union([X, X])
    inc = FinToFin(EquivariantMap(X, Y, tuple(range(X.size))))
    ok = not is_covering_sieve(Sieve(Y, (inc,)))
    return _record("coarser than atomic", "the left inclusion into G/U + G/U does not generate a covering sieve", ok)


def suite_pretopology(tower, rng, config) -> list[CheckRecord]:
    return [
        check_category_laws(tower),
        check_isomorphism_axiom(tower),
        check_transitivity_axiom(tower, rng, 40),
        check_groupoid(tower, rng),
        check_maps_into_group(tower),
        check_coarser_than_atomic(tower),
    ]


# stability -------------------------------------------------------------------


def _inject_fault(certs) -> RefinementCertificate:
    """Swap one connecting morphism for one that breaks its square."""
    for cert, j, fc in ((c, j, fc) for c in certs for j, fc in enumerate(c.factors)):
        f = cert.cover.members[fc.index]
        for alt in hom(fc.connecting.domain, fc.connecting.codomain):
            if compose(f, alt) != compose(cert.morphism, fc.member):
                factors = list(cert.factors)
                factors[j] = Factorization(fc.member, fc.index, alt)
                return RefinementCertificate(cert.cover, cert.morphism, cert.refined, tuple(factors), cert.case)
    raise ValueError("no certificate admits a non-commuting replacement")


def suite_stability(tower, rng, config) -> list[CheckRecord]:
    per_case = config.get("per_case", 12)
    done = {c: 0 for c in CASES}
    failures = {c: [] for c in CASES}
    sample = []
    for case, cover, g in stability_instances(tower, rng, per_case):
        try:
            cert = stability_refine(cover, g)
            if cert.case != case:
                failures[case].append(f"labelled {cert.case}")
            sample.append(cert)
        except Exception as exc:  # reported, not raised
            failures[case].append(str(exc))
        done[case] += 1
    records = [
        _record(
            f"stability case {c}",
            "stability axiom: composites with the refined cover factor through the cover",
            not failures[c],
            instances=done[c],
            failures=failures[c][:3],
        )
        for c in CASES
    ]
    if config.get("inject_fault"):
        cert = _inject_fault(sample)
        try:
            cert.verify()
            caught = None
        except CertificateError as exc:
            caught = str(exc)
        records.append(
            CheckRecord(
                "stability self-test",
                "a tampered certificate must not verify",
                "Fail",
                {"injected": True, "verifier": caught or "accepted the tampered certificate"},
            )
        )
    return records


# sheaf -----------------------------------------------------------------------


def check_orbit_isomorphisms(tower, rng, n: int = 50, max_size: int = 8) -> CheckRecord:
    for k in range(n):
        X = random_gset(tower, rng, max_size)
        dec = orbits_and_stabilizers(X)
        dec.verify()
    return _record("orbit decomposition", "a finite G-set is the sum of the coset sets of its stabilizers", True, gsets=n)


def fixed_point_pairs(tower, max_index: int, max_size: int):
    from .gsets import gsets_up_to_size

    subgroups = []
    for level in range(1, tower.depth + 1):
        for U in enumerate_open_subgroups(tower, level):
            if U.index <= max_index and U not in subgroups:
                subgroups.append(U)
    sets = [X for X in gsets_up_to_size(tower, max_size) if X.size]
    return [(U, X) for U in subgroups for X in sets]


def check_fixed_point_count(tower, max_index: int, max_size: int, oracle: bool = True) -> CheckRecord:
    pairs = fixed_point_pairs(tower, max_index, max_size)
    for U, X in pairs:
        GU = coset_gset(U)
        maps = enumerate_equivariant_maps(GU, X)
        fixed = fixed_points(X, U)
        if len(maps) != len(fixed) or sorted(f.table[0] for f in maps) != list(fixed):
            return _record("fixed-point count", "maps out of G/U are the U-fixed points", False, subgroup=repr(U), gset=repr(X))
        if oracle and sorted(f.table for f in maps) != sorted(brute_force_equivariant_maps(GU, X)):
            return _record("fixed-point count", "maps out of G/U are the U-fixed points", False, oracle="disagrees", subgroup=repr(U))
    return _record("fixed-point count", "maps out of G/U are the U-fixed points", True, pairs=len(pairs), oracle=oracle)


def check_hom_product(tower, rng, n: int = 20) -> CheckRecord:
    for _ in range(n):
        C = random_gset(tower, rng, 5)
        X = random_gset(tower, rng, 4)
        expected = 1
        for o in orbits_and_stabilizers(C).orbits:
            expected *= len(fixed_points(X, o.stabilizer))
        if len(hom(C, X)) != expected:
            return _record("hom from a sum of orbits", "hom(C, X) is the product of fixed-point sets", False, C=repr(C), X=repr(X))
    return _record("hom from a sum of orbits", "hom(C, X) is the product of fixed-point sets", True, instances=n)


def check_empty_presheaf(tower, rng) -> CheckRecord:
    reg = registry_for(tower)
    results = empty_presheaf_check(reg, covering_sieves(reg, rng))
    bad = [repr(S.codomain) for S, r in results if not r.ok]
    return _record("empty presheaf", "hom(-, empty) is a sheaf", not bad, sieves=len(results), failing=bad[:3])


def check_maximal_sieves(tower) -> CheckRecord:
    U1 = coset_gset(level_kernel(tower, 1))
    G = the_group(tower)
    reg = [object_sample(tower)[0], point(tower), U1, G]
    count = 0
    for X in (point(tower), U1, G):
        P = representable_presheaf(X, reg)
        for C in reg:
            S = Sieve(C, tuple(f for A in reg for f in hom(A, C)))
            if not S.generators:
                continue
            count += 1
            if len(matching_families(P, S)) != len(P.sections(C)):
                return _record("maximal sieve", "matching families on the maximal sieve are sections", False, X=repr(X), C=repr(C))
    return _record("maximal sieve", "matching families on the maximal sieve are sections", True, pairs=count)


def suite_sheaf(tower, rng, config) -> list[CheckRecord]:
    return [
        check_orbit_isomorphisms(tower, rng),
        check_fixed_point_count(tower, config.get("max_index", 8), config.get("max_size", 4)),
        check_hom_product(tower, rng),
        check_empty_presheaf(tower, rng),
        check_maximal_sieves(tower),
    ]


# witness ---------------------------------------------------------------------


def witness_targets(tower):
    U1 = coset_gset(level_kernel(tower, 1))
    return [U1, disjoint_union([U1, point(tower)], name="G/U1 + *"), the_group(tower)]


def witness_record(X) -> CheckRecord:
    anchor = "a representable that is not a trivial finite G-set fails the sheaf condition"
    try:
        w = subcanonicality_witness(X)
    except NoWitness as exc:
        return CheckRecord(
            f"witness {X!r}",
            anchor,
            "Fail",
            {"lhs": exc.lhs, "rhs": exc.rhs, "predicted_rhs": exc.predicted, "reason": exc.reason},
        )
    return _record(f"witness {X!r}", anchor, True, lhs=w.lhs, rhs=w.rhs, predicted_rhs=w.predicted)


def suite_witness(tower, rng, config) -> list[CheckRecord]:
    records = [witness_record(X) for X in witness_targets(tower)]
    try:
        subcanonicality_witness(point(tower))
        records.append(_record("witness on a trivial target", "trivial finite G-sets are excluded", False))
    except NoWitness:
        records.append(_record("witness on a trivial target", "trivial finite G-sets are excluded", True))
    return records


SUITE_FUNCS: dict[str, Callable] = {
    "pretopology": suite_pretopology,
    "stability": suite_stability,
    "sheaf": suite_sheaf,
    "witness": suite_witness,
}


def run_checks(tower: ProfiniteTower, suite: str, seed: int, config: dict | None = None) -> CheckReport:
    config = dict(config or {})
    names = ALL_SUITES if suite == "all" else (suite,)
    if any(n not in SUITE_FUNCS for n in names):
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    report = CheckReport({"suite": suite, "seed": seed, "tower": tower.name, "orders": tower.orders, **config})
    for name in names:
        # each suite gets its own stream so selecting suites never shifts another's instances
        rng = random.Random(f"{seed}:{name}")
        report.records.extend(SUITE_FUNCS[name](tower, rng, config))
    return report


def certificate_report(certs) -> dict:
    return {"certificates": [encode_certificate(c) for c in certs]}
