"""Seeded instance generators for the check suites and the tests."""

from __future__ import annotations

import random
from typing import Iterator

import numpy as np

from .groups import (
    ProfiniteTower,
    build_tower,
    constant_tower_spec,
    level_kernel,
    symmetric_group,
)
from .gsets import (
    DiscreteGSet,
    EquivariantMap,
    coset_gset,
    disjoint_union,
    empty_gset,
    enumerate_equivariant_maps,
    point,
    transitive_gsets,
    trivial_gset,
)
from .site import (
    Cover,
    FinToFin,
    GToFin,
    GToG,
    Sieve,
    SiteMorphism,
    VacuousToG,
    hom,
    identity,
    is_epimorphic_cover,
    is_group,
    the_group,
)

CASES = ("1", "2", "3", "4a", "4b", "5")

TOWER_SPECS = {
    "cyclic2_d3": {"kind": "cyclic_p", "p": 2, "depth": 3},
    "cyclic3_d2": {"kind": "cyclic_p", "p": 3, "depth": 2},
    "s3xc2_d2": {
        "kind": "product",
        "factors": [{"kind": "cyclic_p", "p": 2, "depth": 2}, constant_tower_spec(symmetric_group(3), 2)],
    },
}


def standard_towers() -> dict[str, ProfiniteTower]:
    return {name: build_tower(spec) for name, spec in TOWER_SPECS.items()}


def relabel(X: DiscreteGSet, rng: random.Random) -> DiscreteGSet:
    """The same G-set with its points shuffled."""
    n = X.size
    sigma = list(range(n))
    rng.shuffle(sigma)
    inv = np.argsort(sigma)
    rows = np.asarray(sigma)[X.action[:, inv]] if n else X.action
    return DiscreteGSet.make(X.tower, X.level, rows, name=X.name)


def random_gset(tower: ProfiniteTower, rng: random.Random, max_size: int, min_size: int = 1) -> DiscreteGSet:
    trans = [t for t in transitive_gsets(tower, max_size)]
    while True:
        parts, total = [], 0
        budget = rng.randint(min_size, max_size)
        while True:
            fits = [t for t in trans if total + t.size <= budget]
            if not fits or (parts and rng.random() < 0.35):
                break
            t = rng.choice(fits)
            parts.append(t)
            total += t.size
        if total >= min_size:
            X = parts[0] if len(parts) == 1 else disjoint_union(parts)
            return relabel(X, rng)


def object_sample(tower: ProfiniteTower) -> list[DiscreteGSet]:
    """Five nonempty finite objects plus the empty set, deterministic."""
    U1 = coset_gset(level_kernel(tower, 1))
    top = coset_gset(level_kernel(tower, tower.depth))
    pt = point(tower)
    return [
        empty_gset(tower),
        pt,
        trivial_gset(tower, 2),
        U1,
        disjoint_union([U1, pt], name="G/U1 + *"),
        top,
    ]


def random_map(A: DiscreteGSet, C: DiscreteGSet, rng: random.Random) -> EquivariantMap | None:
    maps = enumerate_equivariant_maps(A, C)
    return rng.choice(maps) if maps else None


def _finite_members(C: DiscreteGSet, tower, rng, max_size, need: set[int]) -> list[SiteMorphism]:
    """Finite-domain maps into C until every point of ``need`` is hit."""
    out: list[SiteMorphism] = []
    tries = 0
    while need:
        tries += 1
        if tries > 200:
            # identity always works
            out.append(identity(C))
            break
        A = random_gset(tower, rng, max_size)
        m = random_map(A, C, rng)
        if m is None:
            continue
        if m.image() & need or rng.random() < 0.2:
            out.append(FinToFin(m))
            need -= m.image()
    return out


def random_epi_cover(C, rng: random.Random, max_size: int = 4, group_share: float = 0.5) -> Cover:
    """An epimorphic family into C mixing finite sources and G."""
    tower = C.tower
    G = the_group(tower)
    if is_group(C):
        members = [GToG(G, tower.lift(rng.randrange(tower.top.order))) for _ in range(rng.randint(1, 3))]
        if rng.random() < 0.3:
            members.insert(rng.randrange(len(members) + 1), VacuousToG(empty_gset(tower), G))
        return Cover(C, tuple(members))
    if C.size == 0:
        return Cover(C, (identity(C),))
    members: list[SiteMorphism] = []
    need = set(range(C.size))
    while need:
        if rng.random() < group_share:
            v = rng.choice(sorted(need))
            f = GToFin(G, C, v)
            members.append(f)
            need -= set(int(C.table_at(tower.depth)[t, v]) for t in range(tower.top.order))
        else:
            members.extend(_finite_members(C, tower, rng, max_size, set([rng.choice(sorted(need))])))
            need -= set().union(*(_image(m) for m in members))
    rng.shuffle(members)
    cover = Cover(C, tuple(members))
    assert cover.is_epimorphic
    return cover


def _image(f: SiteMorphism) -> set[int]:
    if isinstance(f, FinToFin):
        return set(f.map.table)
    C = f.codomain
    return set(int(C.table_at(C.tower.depth)[t, f.value]) for t in range(C.tower.top.order))


def _case_instance(case: str, tower: ProfiniteTower, rng: random.Random, max_size: int):
    G = the_group(tower)
    if case == "3":
        g = GToG(G, tower.lift(rng.randrange(tower.top.order)))
        return random_epi_cover(G, rng), g
    C = random_gset(tower, rng, max_size)
    if case in ("1", "5"):
        while True:
            D = random_gset(tower, rng, max_size)
            m = random_map(D, C, rng)
            if m is not None:
                g = FinToFin(m)
                break
        if case == "1":
            return random_epi_cover(C, rng, group_share=0.0), g
        cover = random_epi_cover(C, rng, group_share=0.5)
        if not any(is_group(f.domain) for f in cover.members):
            cover = Cover(C, cover.members + (GToFin(G, C, rng.randrange(C.size)),))
        return cover, g
    g = GToFin(G, C, rng.randrange(C.size))
    rep = int(C.action[:, g.value].min())
    if case == "2":
        return random_epi_cover(C, rng, group_share=0.0), g
    base = random_epi_cover(C, rng, group_share=0.5)
    if case == "4a":
        # a finite member hitting the orbit representative comes first
        first = FinToFin(EquivariantMap(C, C, tuple(range(C.size))))
        for f in base.members:
            if isinstance(f, FinToFin) and rep in f.map.table:
                first = f
                break
        rest = tuple(f for f in base.members if f is not first)
        if not any(is_group(f.domain) for f in rest):
            rest = rest + (GToFin(G, C, rng.randrange(C.size)),)
        return Cover(C, (first,) + rest), g
    # 4b: a map out of G hitting the representative's orbit comes first
    orbit = sorted(_image(GToFin(G, C, rep)))
    first = GToFin(G, C, rng.choice(orbit))
    return Cover(C, (first,) + base.members), g


def stability_instances(
    tower: ProfiniteTower, rng: random.Random, per_case: int, max_size: int = 4
) -> Iterator[tuple[str, Cover, SiteMorphism]]:
    """``per_case`` (cover, g) pairs for each refinement case, in case order."""
    for case in CASES:
        for _ in range(per_case):
            cover, g = _case_instance(case, tower, rng, max_size)
            yield case, cover, g


def registry_for(tower: ProfiniteTower) -> list:
    """The empty set, five finite objects and G."""
    return object_sample(tower) + [the_group(tower)]


def maximal_sieve(C, objects) -> Sieve:
    gens = [f for A in objects for f in hom(A, C)]
    return Sieve(C, tuple(gens))


def covering_sieves(objects, rng: random.Random, per_object: int = 3) -> list[Sieve]:
    """Covering sieves on every registry object, generators drawn from the registry."""
    out = []
    for C in objects:
        if not is_group(C) and C.size == 0:
            out.append(Sieve(C, (identity(C),)))
            continue
        out.append(maximal_sieve(C, objects))
        pool = [f for A in objects for f in hom(A, C)]
        for _ in range(per_object):
            k = rng.randint(1, min(4, len(pool)))
            gens = rng.sample(pool, k)
            extra = [f for f in pool if f not in gens]
            rng.shuffle(extra)
            while not is_epimorphic_cover(gens).ok:
                gens.append(extra.pop())
            out.append(Sieve(C, tuple(gens)))
    return out
