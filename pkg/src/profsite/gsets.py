"""Finite discrete G-sets and the equivariant maps between them.

A finite discrete G-set is a finite set whose action factors through some
tower level ``L_level``; it is stored as one permutation row per element of
that level.  Two G-sets interact at the larger of their levels.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .groups import GroupElement, OpenSubgroup, ProfiniteTower, TowerError, full_subgroup

__all__ = [
    "GSetError",
    "DiscreteGSet",
    "EquivariantMap",
    "Orbit",
    "OrbitDecomposition",
    "make_gset",
    "act",
    "trivial_gset",
    "point",
    "empty_gset",
    "coset_gset",
    "left_cosets",
    "disjoint_union",
    "identity_map",
    "orbits_and_stabilizers",
    "fixed_points",
    "enumerate_equivariant_maps",
    "brute_force_equivariant_maps",
    "pullback_finite",
    "check_pullback_universal",
    "transitive_gsets",
    "gsets_up_to_size",
]


class GSetError(ValueError):
    pass


def _frozen(arr) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.int64))
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DiscreteGSet:
    tower: ProfiniteTower
    level: int
    action: np.ndarray  # shape (|L_level|, size)
    name: str = ""

    @classmethod
    def make(cls, tower: ProfiniteTower, level: int, action, name: str = "") -> "DiscreteGSet":
        grp = tower.level(level)
        rows = np.asarray(action, dtype=np.int64)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(grp.order, 0)
        if rows.ndim != 2 or rows.shape[0] != grp.order:
            raise GSetError(f"action needs one row per element of L_{level} ({grp.order} rows)")
        n = rows.shape[1]
        ident = np.arange(n)
        for g in range(grp.order):
            if sorted(rows[g].tolist()) != list(range(n)):
                raise GSetError(f"row for group element {g} is not a permutation of 0..{n - 1}")
        if not np.array_equal(rows[grp.identity], ident):
            raise GSetError("identity element does not act trivially")
        if n:
            # (ab).x == a.(b.x) for every pair
            lhs = rows[grp.mul]
            rhs = rows[np.arange(grp.order)[:, None, None], rows[None, :, :]]
            bad = np.argwhere(np.any(lhs != rhs, axis=2))
            if len(bad):
                a, b = bad[0]
                raise GSetError(f"action is not a homomorphism at pair ({a}, {b})")
        return cls(tower, level, _frozen(rows), name)

    @property
    def size(self) -> int:
        return self.action.shape[1]

    def __len__(self) -> int:
        return self.size

    @cached_property
    def _key(self):
        return (id(self.tower), self.level, self.action.shape, self.action.tobytes())

    def __eq__(self, other) -> bool:
        return isinstance(other, DiscreteGSet) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        label = self.name or "GSet"
        return f"{label}(size={self.size}, level={self.level})"

    def table_at(self, level: int) -> np.ndarray:
        """Action rows indexed by elements of ``L_level`` (``level >= self.level``)."""
        if level == self.level:
            return self.action
        return self._lifted(level)

    def _lifted(self, level: int) -> np.ndarray:
        cache = self.__dict__.setdefault("_lift_cache", {})
        if level not in cache:
            cache[level] = _frozen(self.action[self.tower.projection(level, self.level)])
        return cache[level]

    def act(self, gamma: GroupElement, x: int) -> int:
        if gamma.tower is not self.tower:
            raise GSetError("group element from a different tower")
        if not 0 <= x < self.size:
            raise GSetError(f"point {x} out of range 0..{self.size - 1}")
        return int(self.action[gamma.at(self.level), x])

    def act_top(self, t: int, x: int) -> int:
        """Act by the top-level element with index ``t``."""
        return int(self.table_at(self.tower.depth)[t, x])

    def is_trivial(self) -> bool:
        return bool(np.all(self.action == np.arange(self.size)))


def act(gamma: GroupElement, x: int, X: DiscreteGSet) -> int:
    return X.act(gamma, x)


def join_level(*objs) -> int:
    return max(o.level for o in objs)


def _perm_ok(row, n) -> bool:
    return sorted(row) == list(range(n))


def make_gset(tower: ProfiniteTower, spec: dict) -> DiscreteGSet:
    """Build a G-set from ``{size, level, table | generators}``.

    ``generators`` maps element indices of ``L_level`` to permutations; the
    images must be consistent and the named elements must generate the level.
    """
    try:
        size = int(spec["size"])
        level = int(spec.get("level", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise GSetError(f"G-set spec needs integer 'size' and 'level': {exc}") from None
    try:
        grp = tower.level(level)
    except TowerError as exc:
        raise GSetError(str(exc)) from None
    action = spec.get("action", spec)
    name = spec.get("name", "")
    if isinstance(action, list):
        action = {"table": action}
    if "table" in action:
        return DiscreteGSet.make(tower, level, np.asarray(action["table"], dtype=np.int64).reshape(grp.order, size), name)
    if "generators" in action:
        gens = {int(k): list(v) for k, v in action["generators"].items()}
        for g, perm in gens.items():
            if not 0 <= g < grp.order:
                raise GSetError(f"generator {g} is not an element of L_{level}")
            if not _perm_ok(perm, size):
                raise GSetError(f"image of generator {g} is not a permutation of 0..{size - 1}")
        images = {grp.identity: list(range(size))}
        frontier = [grp.identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g, perm in gens.items():
                    c = int(grp.mul[g, a])
                    img = [perm[images[a][x]] for x in range(size)]
                    if c in images:
                        if images[c] != img:
                            raise GSetError(f"generator images are inconsistent at element {c}")
                    else:
                        images[c] = img
                        nxt.append(c)
            frontier = nxt
        if len(images) != grp.order:
            raise GSetError(f"generators {sorted(gens)} do not generate L_{level}")
        return DiscreteGSet.make(tower, level, [images[g] for g in range(grp.order)], name)
    raise GSetError("G-set spec needs an action 'table' or 'generators'")


def trivial_gset(tower: ProfiniteTower, n: int, level: int = 1, name: str = "") -> DiscreteGSet:
    rows = np.tile(np.arange(n), (tower.level(level).order, 1))
    return DiscreteGSet.make(tower, level, rows, name or (f"trivial{n}" if n != 1 else "*"))


def point(tower: ProfiniteTower) -> DiscreteGSet:
    return trivial_gset(tower, 1, name="*")


def empty_gset(tower: ProfiniteTower) -> DiscreteGSet:
    return trivial_gset(tower, 0, name="empty")


def _cosets(U: OpenSubgroup) -> list[frozenset[int]]:
    grp = U.group
    order = [grp.identity] + [g for g in range(grp.order) if g != grp.identity]
    seen: set[int] = set()
    out = []
    for g in order:
        if g in seen:
            continue
        c = frozenset(int(grp.mul[g, h]) for h in U.members)
        seen |= c
        out.append(c)
    return out


def left_cosets(U: OpenSubgroup) -> list[frozenset[int]]:
    """Left cosets ``gU`` in ``L_{U.level}``, identity coset first."""
    return _cosets(U)


def coset_gset(U: OpenSubgroup) -> DiscreteGSet:
    """``G/U`` with left translation; point 0 is the identity coset."""
    grp = U.group
    cosets = _cosets(U)
    where = {}
    for i, c in enumerate(cosets):
        for g in c:
            where[g] = i
    rows = [[where[int(grp.mul[a, min(c)])] for c in cosets] for a in range(grp.order)]
    return DiscreteGSet.make(U.tower, U.level, rows, name=f"G/U[{U.level}:{','.join(map(str, sorted(U.members)))}]")


def disjoint_union(parts: Sequence[DiscreteGSet], name: str = "") -> DiscreteGSet:
    if not parts:
        raise GSetError("disjoint union needs at least one part")
    tower = parts[0].tower
    lvl = join_level(*parts)
    blocks, offset = [], 0
    for p in parts:
        blocks.append(p.table_at(lvl) + offset)
        offset += p.size
    rows = np.concatenate(blocks, axis=1) if offset else np.zeros((tower.level(lvl).order, 0), dtype=np.int64)
    return DiscreteGSet.make(tower, lvl, rows, name or " + ".join(p.name or "X" for p in parts))


@dataclass(frozen=True)
class EquivariantMap:
    domain: DiscreteGSet
    codomain: DiscreteGSet
    table: tuple[int, ...]

    def __post_init__(self):
        if self.domain.tower is not self.codomain.tower:
            raise GSetError("domain and codomain live over different towers")
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if len(self.table) != self.domain.size:
            raise GSetError(f"map table has {len(self.table)} entries for a domain of size {self.domain.size}")
        if any(not 0 <= v < self.codomain.size for v in self.table):
            raise GSetError("map table points outside the codomain")
        if self.table:
            lvl = join_level(self.domain, self.codomain)
            bad = kernels.equivariance_violation(self.domain.table_at(lvl), self.codomain.table_at(lvl), self.table)
            if bad is not None:
                g, x = bad
                raise GSetError(f"map is not equivariant: element {g} of L_{lvl} at point {x}")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def after(self, other: "EquivariantMap") -> "EquivariantMap":
        """``self ∘ other``."""
        if other.codomain != self.domain:
            raise GSetError("maps are not composable")
        return EquivariantMap(other.domain, self.codomain, tuple(self.table[v] for v in other.table))

    def image(self) -> frozenset[int]:
        return frozenset(self.table)

    def is_bijective(self) -> bool:
        return self.domain.size == self.codomain.size and len(set(self.table)) == self.domain.size


def identity_map(X: DiscreteGSet) -> EquivariantMap:
    return EquivariantMap(X, X, tuple(range(X.size)))


@dataclass(frozen=True)
class Orbit:
    representative: int
    stabilizer: OpenSubgroup
    elements: tuple[int, ...]


@dataclass(frozen=True)
class OrbitDecomposition:
    """Orbits of X together with the isomorphism ``∐ G/U_i -> X``."""

    gset: DiscreteGSet
    orbits: tuple[Orbit, ...]
    cosets: DiscreteGSet
    iso: EquivariantMap

    def verify(self) -> None:
        X = self.gset
        seen = sorted(x for o in self.orbits for x in o.elements)
        if seen != list(range(X.size)):
            raise GSetError("orbits do not partition the set")
        for o in self.orbits:
            if o.stabilizer != stabilizer(X, o.representative):
                raise GSetError(f"wrong stabilizer for {o.representative}")
        if not self.iso.is_bijective():
            raise GSetError("orbit isomorphism is not bijective")


def stabilizer(X: DiscreteGSet, x: int) -> OpenSubgroup:
    col = X.action[:, x]
    return OpenSubgroup.make(X.tower, X.level, np.flatnonzero(col == x).tolist())


def _transversal(X: DiscreteGSet, level: int, reps: Iterable[int]) -> dict[int, tuple[int, int]]:
    """For each point y: (orbit representative, least g in L_level with g.rep = y)."""
    A = X.table_at(level)
    out = {}
    for r in reps:
        for g in range(A.shape[0]):
            y = int(A[g, r])
            if y not in out:
                out[y] = (r, g)
    return out


def orbits_and_stabilizers(X: DiscreteGSet) -> OrbitDecomposition:
    labels = kernels.orbit_labels(X.action).tolist()
    reps = sorted(set(labels))
    orbits = []
    for r in reps:
        members = tuple(x for x in range(X.size) if labels[x] == r)
        orbits.append(Orbit(r, stabilizer(X, r), members))
    tower = X.tower
    if not orbits:
        cosets = empty_gset(tower)
        return OrbitDecomposition(X, (), cosets, EquivariantMap(cosets, X, ()))

    parts = [coset_gset(o.stabilizer) for o in orbits]
    cosets = disjoint_union(parts, name="cosets")
    table = []
    for o, part in zip(orbits, parts):
        U = o.stabilizer
        proj = tower.projection(X.level, U.level)
        images: dict[int, int] = {}
        for ci, c in enumerate(left_cosets(U)):
            # every lift of every coset member must send the representative to one point
            pts = {int(X.action[h, o.representative]) for h in np.flatnonzero(np.isin(proj, list(c)))}
            if len(pts) != 1:
                raise GSetError(f"coset map not well defined on orbit of {o.representative}")
            images[ci] = pts.pop()
        table.extend(images[ci] for ci in range(part.size))
    iso = EquivariantMap(cosets, X, tuple(table))
    dec = OrbitDecomposition(X, tuple(orbits), cosets, iso)
    dec.verify()
    return dec


def fixed_points(X: DiscreteGSet, U: OpenSubgroup) -> tuple[int, ...]:
    lvl = max(X.level, U.level)
    A = X.table_at(lvl)
    members = sorted(U.at_level(lvl))
    sub = A[members]
    return tuple(int(x) for x in range(X.size) if np.all(sub[:, x] == x))


def enumerate_equivariant_maps(X: DiscreteGSet, Y: DiscreteGSet) -> list[EquivariantMap]:
    """Orbit by orbit: each representative goes to a point its stabilizer fixes."""
    if X.tower is not Y.tower:
        raise GSetError("G-sets live over different towers")
    if X.size == 0:
        return [EquivariantMap(X, Y, ())]
    dec = orbits_and_stabilizers(X)
    lvl = join_level(X, Y)
    AY = Y.table_at(lvl)
    trans = _transversal(X, lvl, [o.representative for o in dec.orbits])
    slot = {o.representative: i for i, o in enumerate(dec.orbits)}
    choices = [fixed_points(Y, o.stabilizer) for o in dec.orbits]
    maps = []
    for combo in itertools.product(*choices):
        table = []
        for x in range(X.size):
            r, g = trans[x]
            table.append(int(AY[g, combo[slot[r]]]))
        maps.append(EquivariantMap(X, Y, tuple(table)))
    maps.sort(key=lambda f: f.table)
    return maps


def brute_force_equivariant_maps(X: DiscreteGSet, Y: DiscreteGSet) -> list[tuple[int, ...]]:
    """Oracle: every set map X -> Y, kept when it commutes with the action."""
    lvl = join_level(X, Y)
    return kernels.brute_force_equivariant(X.table_at(lvl), Y.table_at(lvl))


def pullback_finite(f: EquivariantMap, g: EquivariantMap):
    """``X ×_Z Y`` with the diagonal action, and its two projections."""
    if f.codomain != g.codomain:
        raise GSetError("pullback legs need a common codomain")
    X, Y = f.domain, g.domain
    pairs = [(x, y) for x in range(X.size) for y in range(Y.size) if f(x) == g(y)]
    index = {p: i for i, p in enumerate(pairs)}
    lvl = join_level(X, Y)
    AX, AY = X.table_at(lvl), Y.table_at(lvl)
    order = X.tower.level(lvl).order
    rows = [[index[(int(AX[h, x]), int(AY[h, y]))] for x, y in pairs] for h in range(order)]
    P = DiscreteGSet.make(X.tower, lvl, np.asarray(rows, dtype=np.int64).reshape(order, len(pairs)), name="pullback")
    left = EquivariantMap(P, X, tuple(x for x, _ in pairs))
    right = EquivariantMap(P, Y, tuple(y for _, y in pairs))
    return P, left, right


def check_pullback_universal(f, g, P, left, right, apexes: Iterable[DiscreteGSet]):
    """Return None, or the first apex whose cones do not factor uniquely."""
    for W in apexes:
        cones = {
            (a.table, b.table)
            for a in enumerate_equivariant_maps(W, f.domain)
            for b in enumerate_equivariant_maps(W, g.domain)
            if f.after(a).table == g.after(b).table
        }
        mediated = Counter((left.after(u).table, right.after(u).table) for u in enumerate_equivariant_maps(W, P))
        if set(mediated) != cones or any(c != 1 for c in mediated.values()):
            return W
    return None


def _conjugacy_reps(tower: ProfiniteTower, max_index: int) -> list[OpenSubgroup]:
    reps: list[OpenSubgroup] = []
    for level in range(1, tower.depth + 1):
        grp = tower.level(level)
        for h in grp.subgroups:
            U = OpenSubgroup.make(tower, level, h)
            if U.level != level or U.index > max_index:
                continue
            conj = {grp.conjugate(h, a) for a in range(grp.order)}
            if any(R.level == level and R.members in conj for R in reps):
                continue
            reps.append(U)
    return reps


def transitive_gsets(tower: ProfiniteTower, max_size: int) -> list[DiscreteGSet]:
    """One ``G/U`` per conjugacy class of open subgroups of index ``<= max_size``."""
    return [coset_gset(U) for U in _conjugacy_reps(tower, max_size)]


def gsets_up_to_size(tower: ProfiniteTower, max_size: int) -> list[DiscreteGSet]:
    """Every finite G-set of size ``<= max_size`` up to isomorphism, empty set first."""
    trans = transitive_gsets(tower, max_size)
    out = [empty_gset(tower)]

    def extend(start: int, chosen: list[DiscreteGSet], total: int):
        for i in range(start, len(trans)):
            t = trans[i]
            if total + t.size <= max_size:
                parts = chosen + [t]
                out.append(disjoint_union(parts) if len(parts) > 1 else t)
                extend(i, parts, total + t.size)

    extend(0, [], 0)
    return out
