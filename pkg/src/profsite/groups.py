"""Depth-truncated profinite groups.

A profinite group is stood in for by a finite tower of finite groups
``L_1 <- L_2 <- ... <- L_d`` joined by surjective homomorphisms.  An element
is a compatible tuple of coordinates, one per level; an open subgroup is a
subgroup of some level, pulled back to everything above it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels

__all__ = [
    "TowerError",
    "FiniteGroup",
    "ProfiniteTower",
    "GroupElement",
    "OpenSubgroup",
    "build_tower",
    "cyclic_group",
    "symmetric_group",
    "direct_product",
    "constant_tower_spec",
    "element_arith",
    "project",
    "enumerate_open_subgroups",
    "subgroup_count_growth",
    "full_subgroup",
    "level_kernel",
]


class TowerError(ValueError):
    """Raised for malformed groups, towers or element tuples."""


def _frozen(arr) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.int64))
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table on ``0..order-1``."""

    mul: np.ndarray
    inv: np.ndarray
    identity: int
    name: str = ""

    @classmethod
    def from_table(cls, table, name: str = "") -> "FiniteGroup":
        mul = _frozen(table)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
            raise TowerError(f"{name or 'group'}: multiplication table must be a nonempty square")
        n = mul.shape[0]
        if mul.min() < 0 or mul.max() >= n:
            raise TowerError(f"{name or 'group'}: table entries must lie in 0..{n - 1}")
        ident = [e for e in range(n) if np.array_equal(mul[e], np.arange(n)) and np.array_equal(mul[:, e], np.arange(n))]
        if not ident:
            raise TowerError(f"{name or 'group'}: no two-sided identity")
        e = ident[0]
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            hits = np.flatnonzero(mul[a] == e)
            if len(hits) != 1 or mul[hits[0], a] != e:
                raise TowerError(f"{name or 'group'}: element {a} has no two-sided inverse")
            inv[a] = hits[0]
        bad = kernels.associativity_violation(mul)
        if bad is not None:
            raise TowerError(f"{name or 'group'}: associativity fails at {bad}")
        return cls(mul, _frozen(inv), e, name)

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    def closure(self, elements: Iterable[int]) -> frozenset[int]:
        mask = np.zeros(self.order, dtype=np.uint8)
        mask[self.identity] = 1
        for a in elements:
            mask[a] = 1
        return frozenset(np.flatnonzero(kernels.subgroup_closure(self.mul, mask)).tolist())

    def is_subgroup(self, members: Iterable[int]) -> bool:
        s = frozenset(members)
        if self.identity not in s:
            return False
        return all(self.inv[a] in s for a in s) and all(self.mul[a, b] in s for a in s for b in s)

    @cached_property
    def subgroups(self) -> tuple[frozenset[int], ...]:
        """All subgroups, as joins of cyclic subgroups, sorted by (order, members)."""
        cyclic = {self.closure([g]) for g in range(self.order)}
        trivial = frozenset([self.identity])
        seen = {trivial}
        queue = [trivial]
        while queue:
            nxt = []
            for h in queue:
                for c in cyclic:
                    if c <= h:
                        continue
                    j = self.closure(h | c)
                    if j not in seen:
                        seen.add(j)
                        nxt.append(j)
            queue = nxt
        return tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))

    def is_normal(self, members: frozenset[int]) -> bool:
        for g in range(self.order):
            gi = self.inv[g]
            for h in members:
                if self.mul[self.mul[g, h], gi] not in members:
                    return False
        return True

    def conjugate(self, members: frozenset[int], g: int) -> frozenset[int]:
        gi = self.inv[g]
        return frozenset(int(self.mul[self.mul[g, h], gi]) for h in members)


def cyclic_group(n: int) -> FiniteGroup:
    a = np.arange(n)
    return FiniteGroup.from_table((a[:, None] + a[None, :]) % n, name=f"C{n}")


def symmetric_group(n: int) -> FiniteGroup:
    """S_n on lexicographically ordered permutations; (ab)(i) = a(b(i))."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(a[b[i]] for i in range(n))] for b in perms] for a in perms]
    return FiniteGroup.from_table(table, name=f"S{n}")


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Pair ``(x, y)`` is stored at index ``x * |b| + y``."""
    nb = b.order
    idx = np.arange(a.order * nb)
    xa, xb = idx // nb, idx % nb
    table = a.mul[xa[:, None], xa[None, :]] * nb + b.mul[xb[:, None], xb[None, :]]
    return FiniteGroup.from_table(table, name=f"{a.name}x{b.name}")


@dataclass(frozen=True, eq=False)
class ProfiniteTower:
    """Levels ``L_1..L_d``; ``transitions[i-1]`` is the surjection ``L_{i+1} -> L_i``."""

    levels: tuple[FiniteGroup, ...]
    transitions: tuple[np.ndarray, ...]
    name: str = ""
    spec: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.levels) == 0:
            raise TowerError("tower depth must be at least 1")
        if len(self.transitions) != len(self.levels) - 1:
            raise TowerError(
                f"tower of depth {len(self.levels)} needs {len(self.levels) - 1} transitions, "
                f"got {len(self.transitions)}"
            )
        for i, p in enumerate(self.transitions, start=1):
            upper, lower = self.levels[i], self.levels[i - 1]
            if p.shape != (upper.order,):
                raise TowerError(f"transition p_{i}: expected {upper.order} entries, got {p.shape[0]}")
            if p.min() < 0 or p.max() >= lower.order:
                raise TowerError(f"transition p_{i}: values must lie in 0..{lower.order - 1}")
            bad = kernels.homomorphism_violation(upper.mul, lower.mul, p)
            if bad is not None:
                a, b = bad
                raise TowerError(
                    f"transition p_{i}: L_{i + 1} -> L_{i} is not a homomorphism at pair ({a}, {b}): "
                    f"p({a}*{b}) = {p[upper.mul[a, b]]} but p({a})*p({b}) = {lower.mul[p[a], p[b]]}"
                )
            missing = sorted(set(range(lower.order)) - set(p.tolist()))
            if missing:
                raise TowerError(f"transition p_{i}: L_{i + 1} -> L_{i} is not surjective, misses {missing}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, i: int) -> FiniteGroup:
        self._check_level(i)
        return self.levels[i - 1]

    @property
    def top(self) -> FiniteGroup:
        return self.levels[-1]

    def _check_level(self, i: int) -> None:
        if not 1 <= i <= self.depth:
            raise TowerError(f"level {i} out of range 1..{self.depth}")

    def projection(self, src: int, dst: int) -> np.ndarray:
        """The composite surjection ``L_src -> L_dst`` for ``dst <= src``."""
        self._check_level(src)
        self._check_level(dst)
        if dst > src:
            raise TowerError(f"cannot project from level {src} up to level {dst}")
        return self._projections[(src, dst)]

    @cached_property
    def _projections(self) -> dict[tuple[int, int], np.ndarray]:
        out = {}
        for src in range(1, self.depth + 1):
            cur = _frozen(np.arange(self.level(src).order))
            out[(src, src)] = cur
            for dst in range(src - 1, 0, -1):
                cur = _frozen(self.transitions[dst - 1][cur])
                out[(src, dst)] = cur
        return out

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(int(c) for c in coords))

    def lift(self, top_index: int) -> "GroupElement":
        """The unique compatible tuple with the given top coordinate."""
        d = self.depth
        return GroupElement(self, tuple(int(self.projection(d, i)[top_index]) for i in range(1, d + 1)))

    def identity(self) -> "GroupElement":
        return GroupElement(self, tuple(g.identity for g in self.levels))

    def elements(self) -> Iterator["GroupElement"]:
        for t in range(self.top.order):
            yield self.lift(t)

    def truncate(self, depth: int) -> "ProfiniteTower":
        if not 1 <= depth <= self.depth:
            raise TowerError(f"depth override {depth} outside 1..{self.depth}")
        if depth == self.depth:
            return self
        spec = dict(self.spec, depth=depth) if self.spec else {}
        return ProfiniteTower(self.levels[:depth], self.transitions[: depth - 1], self.name, spec)

    @property
    def orders(self) -> list[int]:
        return [g.order for g in self.levels]


@dataclass(frozen=True)
class GroupElement:
    """An element of the truncated group: one coordinate per tower level."""

    tower: ProfiniteTower
    coords: tuple[int, ...]

    def __post_init__(self):
        t = self.tower
        if len(self.coords) != t.depth:
            raise TowerError(f"element needs {t.depth} coordinates, got {len(self.coords)}")
        for i, c in enumerate(self.coords, start=1):
            if not 0 <= c < t.level(i).order:
                raise TowerError(f"coordinate {c} out of range at level {i}")
        for i in range(1, t.depth):
            if t.transitions[i - 1][self.coords[i]] != self.coords[i - 1]:
                raise TowerError(
                    f"incompatible tuple {self.coords}: p_{i}({self.coords[i]}) = "
                    f"{t.transitions[i - 1][self.coords[i]]} != {self.coords[i - 1]}"
                )

    @property
    def top(self) -> int:
        return self.coords[-1]

    def at(self, level: int) -> int:
        self.tower._check_level(level)
        return self.coords[level - 1]

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.tower is not self.tower:
            raise TowerError("elements belong to different towers")
        return GroupElement(
            self.tower, tuple(int(g.mul[a, b]) for g, a, b in zip(self.tower.levels, self.coords, other.coords))
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.tower, tuple(int(g.inv[a]) for g, a in zip(self.tower.levels, self.coords)))

    def is_identity(self) -> bool:
        return self.top == self.tower.top.identity

    def __repr__(self) -> str:
        return f"GroupElement{self.coords}"


def element_arith(op: str, *args) -> GroupElement:
    """``mul`` (any number of factors), ``inv`` (one) or ``identity``.

    If the first argument is a tower, the rest may be raw coordinate tuples;
    they are validated for compatibility before any arithmetic happens.
    """
    if args and isinstance(args[0], ProfiniteTower):
        tower, rest = args[0], args[1:]
        els = [a if isinstance(a, GroupElement) else tower.element(a) for a in rest]
    else:
        els = list(args)
        tower = els[0].tower if els else None
    if any(e.tower is not tower for e in els):
        raise TowerError("arguments belong to different towers")
    if op == "identity":
        if tower is None:
            raise TowerError("identity needs a tower")
        return tower.identity()
    if op == "inv":
        if len(els) != 1:
            raise TowerError("inv takes exactly one element")
        return els[0].inverse()
    if op == "mul":
        if not els:
            raise TowerError("mul needs at least one element")
        out = els[0]
        for e in els[1:]:
            out = out * e
        return out
    raise TowerError(f"unknown operation {op!r}")


def project(el: GroupElement, level: int) -> int:
    return el.at(level)


@dataclass(frozen=True)
class OpenSubgroup:
    """Full preimage in G of a subgroup of ``L_level``.

    Instances built with :meth:`make` sit at the lowest level at which they
    are a full preimage, so dataclass equality is equality in G.
    """

    tower: ProfiniteTower
    level: int
    members: frozenset[int]

    @classmethod
    def make(cls, tower: ProfiniteTower, level: int, members: Iterable[int]) -> "OpenSubgroup":
        members = frozenset(int(m) for m in members)
        grp = tower.level(level)
        if not members or not all(0 <= m < grp.order for m in members):
            raise TowerError(f"subgroup members must lie in 0..{grp.order - 1}")
        if not grp.is_subgroup(members):
            raise TowerError(f"{sorted(members)} is not a subgroup of L_{level}")
        while level > 1:
            p = tower.transitions[level - 2]
            image = frozenset(int(p[h]) for h in members)
            preimage = frozenset(int(h) for h in np.flatnonzero(np.isin(p, list(image))))
            if preimage != members:
                break
            level, members = level - 1, image
        return cls(tower, level, members)

    @property
    def group(self) -> FiniteGroup:
        return self.tower.level(self.level)

    @property
    def index(self) -> int:
        return self.group.order // len(self.members)

    def at_level(self, level: int) -> frozenset[int]:
        """Members of the image in ``L_level``; for ``level >= self.level`` the preimage."""
        if level >= self.level:
            proj = self.tower.projection(level, self.level)
            return frozenset(np.flatnonzero(np.isin(proj, list(self.members))).tolist())
        proj = self.tower.projection(self.level, level)
        return frozenset(int(proj[h]) for h in self.members)

    def pullback(self, level: int) -> frozenset[int]:
        if level < self.level:
            raise TowerError(f"subgroup lives at level {self.level}; cannot pull back to {level}")
        return self.at_level(level)

    def __contains__(self, el: GroupElement) -> bool:
        return el.at(self.level) in self.members

    def is_normal(self) -> bool:
        return self.group.is_normal(self.members)

    def contains_subgroup(self, other: "OpenSubgroup") -> bool:
        lvl = max(self.level, other.level)
        return other.at_level(lvl) <= self.at_level(lvl)

    def __repr__(self) -> str:
        return f"OpenSubgroup(level={self.level}, members={sorted(self.members)}, index={self.index})"


def full_subgroup(tower: ProfiniteTower) -> OpenSubgroup:
    return OpenSubgroup.make(tower, 1, range(tower.level(1).order))


def level_kernel(tower: ProfiniteTower, level: int) -> OpenSubgroup:
    """Kernel of ``G -> L_level``; its coset set is ``L_level`` itself."""
    return OpenSubgroup.make(tower, level, [tower.level(level).identity])


def enumerate_open_subgroups(tower: ProfiniteTower, level: int) -> list[OpenSubgroup]:
    """One open subgroup per subgroup of ``L_level`` (stored in normal form)."""
    return [OpenSubgroup.make(tower, level, h) for h in tower.level(level).subgroups]


def subgroup_count_growth(tower: ProfiniteTower) -> list[int]:
    return [len(tower.level(i).subgroups) for i in range(1, tower.depth + 1)]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


def _tower_from_groups(groups, transitions, name, spec) -> ProfiniteTower:
    return ProfiniteTower(tuple(groups), tuple(_frozen(t) for t in transitions), name, spec)


def constant_tower_spec(group: FiniteGroup, depth: int) -> dict:
    """An explicit spec repeating ``group`` at every level with identity transitions."""
    return {
        "kind": "explicit",
        "depth": depth,
        "levels": [group.mul.tolist()] * depth,
        "transitions": [list(range(group.order))] * (depth - 1),
    }


def build_tower(spec: dict) -> ProfiniteTower:
    """Build a tower from a JSON-compatible spec (kinds ``cyclic_p``, ``explicit``, ``product``)."""
    if not isinstance(spec, dict):
        raise TowerError("tower spec must be a mapping")
    kind = spec.get("kind")
    depth = spec.get("depth")
    if depth is not None and (not isinstance(depth, int) or depth < 1):
        raise TowerError(f"depth must be a positive integer, got {depth!r}")

    if kind == "cyclic_p":
        p = spec.get("p")
        if not isinstance(p, int) or not _is_prime(p):
            raise TowerError(f"cyclic_p tower needs a prime p, got {p!r}")
        if depth is None:
            raise TowerError("cyclic_p tower needs a depth")
        groups = [cyclic_group(p**i) for i in range(1, depth + 1)]
        transitions = [np.arange(p ** (i + 1)) % p**i for i in range(1, depth)]
        return _tower_from_groups(groups, transitions, f"Z_{p} (depth {depth})", dict(spec))

    if kind == "explicit":
        levels = spec.get("levels")
        if not isinstance(levels, list) or not levels:
            raise TowerError("explicit tower needs a nonempty 'levels' list of multiplication tables")
        if depth is not None and depth != len(levels):
            raise TowerError(f"depth {depth} does not match {len(levels)} levels")
        groups = [FiniteGroup.from_table(t, name=f"L_{i}") for i, t in enumerate(levels, start=1)]
        transitions = spec.get("transitions", [])
        if not isinstance(transitions, list) or len(transitions) != len(groups) - 1:
            raise TowerError(f"explicit tower of depth {len(groups)} needs {len(groups) - 1} transitions")
        for i, t in enumerate(transitions, start=1):
            if not isinstance(t, list) or not all(isinstance(v, int) for v in t):
                raise TowerError(f"transition p_{i} must be a list of integers")
        return _tower_from_groups(groups, transitions, spec.get("name", "explicit"), dict(spec))

    if kind == "product":
        factors = spec.get("factors")
        if not isinstance(factors, list) or not factors:
            raise TowerError("product tower needs a nonempty 'factors' list")
        built = [build_tower(f) for f in factors]
        d = depth if depth is not None else built[0].depth
        for i, t in enumerate(built):
            if t.depth < d or (depth is None and t.depth != d):
                raise TowerError(f"factor {i} has depth {t.depth}, product needs depth {d}")
        built = [t.truncate(d) for t in built]
        groups = list(built[0].levels)
        transitions = [np.asarray(p) for p in built[0].transitions]
        for t in built[1:]:
            nb = [g.order for g in t.levels]
            new_groups = [direct_product(a, b) for a, b in zip(groups, t.levels)]
            new_trans = []
            for i in range(d - 1):
                idx = np.arange(new_groups[i + 1].order)
                hi, lo = idx // nb[i + 1], idx % nb[i + 1]
                new_trans.append(transitions[i][hi] * nb[i] + t.transitions[i][lo])
            groups, transitions = new_groups, new_trans
        name = " x ".join(t.name for t in built)
        return _tower_from_groups(groups, transitions, name, dict(spec))

    raise TowerError(f"unknown tower kind {kind!r}; expected cyclic_p, explicit or product")
