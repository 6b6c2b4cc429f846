"""Presheaves of sets on a finite registry of objects, and the sheaf condition.

A presheaf is tabulated on a registry: a value set per object and, for each
morphism between registry objects, the restriction map as an index table.
Sieves are saturated against the same registry, which keeps matching
families finite and exactly enumerable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .gsets import DiscreteGSet, empty_gset, fixed_points, orbits_and_stabilizers, point, stabilizer
from .site import (
    GToFin,
    RObject,
    Sieve,
    SiteMorphism,
    compose,
    hom,
    identity,
    is_covering_sieve,
    is_group,
    the_group,
    truncated_saturation,
)

__all__ = [
    "SheafError",
    "NoWitness",
    "PresheafTable",
    "MatchingFamily",
    "SheafResult",
    "SubcanonicalityWitness",
    "FixedPointPresheaf",
    "representable_presheaf",
    "constant_presheaf",
    "restrict",
    "matching_families",
    "matching_families_naive",
    "sheaf_condition",
    "orbit_generators",
    "subcanonicality_witness",
    "witness_search",
    "fixed_point_presheaf",
    "empty_presheaf_check",
]


class SheafError(ValueError):
    pass


class NoWitness(Exception):
    """No sheaf-condition failure was found for the target object."""

    def __init__(self, target, reason: str, lhs=None, rhs=None, predicted=None):
        super().__init__(reason)
        self.target = target
        self.reason = reason
        self.lhs = lhs
        self.rhs = rhs
        self.predicted = predicted


@dataclass(frozen=True, eq=False)
class PresheafTable:
    objects: tuple
    values: dict  # object -> tuple of sections
    restrictions: dict  # morphism A -> B -> tuple mapping index in values[B] to index in values[A]
    label: str = ""
    _index: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(
        cls,
        objects: Sequence[RObject],
        values: Callable[[RObject], Iterable],
        restrict_fn: Callable[[SiteMorphism, object], object],
        label: str = "",
    ) -> "PresheafTable":
        objs = []
        for A in objects:
            if A not in objs:
                objs.append(A)
        vals = {A: tuple(values(A)) for A in objs}
        index = {A: {s: i for i, s in enumerate(vals[A])} for A in objs}
        tables = {}
        for A in objs:
            for B in objs:
                for f in hom(A, B):
                    tables[f] = tuple(index[A][restrict_fn(f, s)] for s in vals[B])
        table = cls(tuple(objs), vals, tables, label, index)
        table.check_functoriality()
        return table

    def sections(self, obj: RObject) -> tuple:
        try:
            return self.values[obj]
        except KeyError:
            raise SheafError(f"{obj!r} is not in the registry") from None

    def index_of(self, obj: RObject, section) -> int:
        try:
            return self._index[obj][section]
        except KeyError:
            raise SheafError(f"{section!r} is not a section over {obj!r}") from None

    def table(self, f: SiteMorphism) -> tuple:
        try:
            return self.restrictions[f]
        except KeyError:
            raise SheafError(f"no restriction recorded along {f!r}") from None

    def check_functoriality(self) -> None:
        for A in self.objects:
            ident = self.table(identity(A))
            if ident != tuple(range(len(self.values[A]))):
                raise SheafError(f"{self.label}: restriction along the identity of {A!r} is not the identity")
        for A, B, C in itertools.product(self.objects, repeat=3):
            for g in hom(A, B):
                tg = self.table(g)
                for f in hom(B, C):
                    tf = self.table(f)
                    if self.table(compose(f, g)) != tuple(tg[i] for i in tf):
                        raise SheafError(f"{self.label}: restriction is not functorial at {f!r} after {g!r}")


def restrict(P: PresheafTable, f: SiteMorphism, section):
    """``P(f)(section)`` for ``f: A -> B`` and a section over B."""
    i = P.index_of(f.codomain, section)
    return P.sections(f.domain)[P.table(f)[i]]


def representable_presheaf(X: RObject, registry: Sequence[RObject]) -> PresheafTable:
    """``hom(-, X)`` on the registry, restricting by precomposition."""
    return PresheafTable.build(registry, lambda A: hom(A, X), lambda f, phi: compose(phi, f), label=f"h[{X!r}]")


def constant_presheaf(registry: Sequence[RObject], labels: Sequence) -> PresheafTable:
    return PresheafTable.build(registry, lambda A: tuple(labels), lambda f, s: s, label="constant")


@dataclass(frozen=True)
class MatchingFamily:
    sieve: Sieve
    members: tuple
    sections: tuple  # index into P(dom f) per member

    def assignment(self, P: PresheafTable) -> dict:
        return {f: P.sections(f.domain)[i] for f, i in zip(self.members, self.sections)}


def _constraints(P: PresheafTable, members: list) -> list[list[tuple[int, tuple]]]:
    """``out[i]`` lists ``(j, table)``: section j must equal table[section i]."""
    pos = {m: i for i, m in enumerate(members)}
    out: list[list[tuple[int, tuple]]] = [[] for _ in members]
    for i, f in enumerate(members):
        for B in P.objects:
            for g in hom(B, f.domain):
                j = pos.get(compose(f, g))
                if j is None:
                    raise SheafError("sieve saturation is not closed under precomposition")
                out[i].append((j, P.table(g)))
    return out


def matching_families(P: PresheafTable, S: Sieve) -> list[MatchingFamily]:
    """All compatible assignments over the registry-truncated sieve.

    Exhaustive search: choose a section for the next free member, force every
    section that compatibility determines from it, backtrack on a clash.
    """
    members = truncated_saturation(S, P.objects)
    out = _constraints(P, members)
    sizes = [len(P.sections(f.domain)) for f in members]
    n = len(members)
    assign = [-1] * n
    found: list[tuple[int, ...]] = []

    def propagate(start: int, trail: list[int]) -> bool:
        stack = [start]
        while stack:
            a = stack.pop()
            va = assign[a]
            for j, tbl in out[a]:
                want = tbl[va]
                if assign[j] < 0:
                    assign[j] = want
                    trail.append(j)
                    stack.append(j)
                elif assign[j] != want:
                    return False
        return True

    def search(k: int) -> None:
        while k < n and assign[k] >= 0:
            k += 1
        if k == n:
            found.append(tuple(assign))
            return
        for v in range(sizes[k]):
            assign[k] = v
            trail = [k]
            if propagate(k, trail):
                search(k + 1)
            for j in trail:
                assign[j] = -1

    search(0)
    found.sort()
    return [MatchingFamily(S, tuple(members), fam) for fam in found]


def matching_families_naive(P: PresheafTable, S: Sieve) -> list[MatchingFamily]:
    """Oracle: filter the full product of section sets by every compatibility equation."""
    members = truncated_saturation(S, P.objects)
    out = _constraints(P, members)
    ranges = [range(len(P.sections(f.domain))) for f in members]
    found = []
    for fam in itertools.product(*ranges):
        if all(fam[j] == tbl[fam[i]] for i in range(len(members)) for j, tbl in out[i]):
            found.append(MatchingFamily(S, tuple(members), fam))
    return found


@dataclass(frozen=True)
class SheafResult:
    """Outcome of the equalizer test ``P(C) -> matching families``.

    ``counterexample`` is ``("not_injective", (x, y))`` or
    ``("unhit", family)`` on failure.
    """

    ok: bool
    sections: int
    families: int
    counterexample: tuple | None = None

    @property
    def status(self) -> str:
        return "Pass" if self.ok else "Fail"

    def __bool__(self) -> bool:
        return self.ok


def sheaf_condition(P: PresheafTable, C: RObject, S: Sieve) -> SheafResult:
    if S.codomain != C:
        raise SheafError("sieve is not on the given object")
    if not is_covering_sieve(S):
        raise SheafError("the sheaf condition is only tested on covering sieves")
    fams = matching_families(P, S)
    members = fams[0].members if fams else tuple(truncated_saturation(S, P.objects))
    secs = P.sections(C)
    image = {}
    for x in secs:
        e = tuple(P.table(f)[P.index_of(C, x)] for f in members)
        if e in image:
            return SheafResult(False, len(secs), len(fams), ("not_injective", (image[e], x)))
        image[e] = x
    for fam in fams:
        if fam.sections not in image:
            return SheafResult(False, len(secs), len(fams), ("unhit", fam.sections))
    if len(image) != len(fams):
        # the image of e is always a matching family; a mismatch means the search missed one
        raise SheafError("internal error: restriction of a section is not a matching family")
    return SheafResult(True, len(secs), len(fams))


@dataclass(frozen=True)
class SubcanonicalityWitness:
    target: RObject
    test_object: RObject
    sieve: Sieve
    lhs: int  # |hom(C, X)|
    rhs: int  # number of matching families, by enumeration
    predicted: int  # |hom(G, X)|^n
    result: SheafResult


def orbit_generators(C: DiscreteGSet) -> tuple[GToFin, ...]:
    """``f_i: G -> C`` sending 1 to the representative of the i-th orbit."""
    G = the_group(C.tower)
    return tuple(GToFin(G, C, o.representative) for o in orbits_and_stabilizers(C).orbits)


def _test(X: RObject, C: DiscreteGSet, registry: Sequence[RObject] | None):
    G = the_group(C.tower)
    gens = orbit_generators(C)
    S = Sieve(C, gens)
    objs = list(registry) if registry is not None else [C, G]
    for A in (C, G):
        if A not in objs:
            objs.append(A)
    P = representable_presheaf(X, objs)
    res = sheaf_condition(P, C, S)
    predicted = len(hom(G, X)) ** len(gens)
    return S, res, predicted


def subcanonicality_witness(
    X: RObject, C: DiscreteGSet | None = None, registry: Sequence[RObject] | None = None
) -> SubcanonicalityWitness:
    """Look for a covering sieve on which ``hom(-, X)`` fails the sheaf condition.

    The sieve on C is generated by the maps ``G -> C`` hitting each orbit
    representative; C defaults to the one-point set.  Raises :class:`NoWitness`
    for trivial finite X, and when exhaustive enumeration finds the
    equalizer intact.
    """
    tower = X.tower
    if isinstance(X, DiscreteGSet) and X.is_trivial():
        raise NoWitness(X, "target is a finite trivial G-set")
    C = C if C is not None else point(tower)
    if C.size == 0:
        raise SheafError("the test object must be nonempty")
    S, res, predicted = _test(X, C, registry)
    lhs = len(hom(C, X))
    if lhs != res.sections:
        raise SheafError("internal error: hom count disagrees with the presheaf table")
    if res.ok:
        raise NoWitness(
            X,
            f"equalizer holds on the sieve generated by G -> {C!r}: "
            f"{lhs} sections and {res.families} matching families",
            lhs,
            res.families,
            predicted,
        )
    return SubcanonicalityWitness(X, C, S, lhs, res.families, predicted, res)


def witness_search(X: RObject, test_objects: Iterable[DiscreteGSet], registry=None) -> list[tuple]:
    """Run the witness test against every nonempty test object.

    Returns ``(C, sections, families, predicted)`` rows; a row with
    ``sections != families`` is a witness.
    """
    rows = []
    for C in test_objects:
        if C.size == 0:
            continue
        _, res, predicted = _test(X, C, registry)
        rows.append((C, res.sections, res.families, predicted))
    return rows


@dataclass(frozen=True)
class FixedPointPresheaf:
    presheaf: PresheafTable
    isos: dict  # object -> {section: point}


def fixed_point_presheaf(X: DiscreteGSet, registry: Sequence[RObject]) -> FixedPointPresheaf:
    """``hom(-, X)`` with ``hom(G/U, X) ≅ X^U`` and ``hom(G, X) ≅ X`` made explicit."""
    P = representable_presheaf(X, registry)
    isos = {}
    for A in P.objects:
        secs = P.sections(A)
        if is_group(A):
            bij = {s: s.value for s in secs}
            if sorted(bij.values()) != list(range(X.size)):
                raise SheafError("hom(G, X) -> X is not a bijection")
        elif A.size and len(orbits_and_stabilizers(A).orbits) == 1:
            U = stabilizer(A, 0)
            bij = {s: s.map(0) for s in secs}
            if sorted(bij.values()) != list(fixed_points(X, U)):
                raise SheafError(f"hom({A!r}, X) -> X^U is not a bijection")
        else:
            continue
        isos[A] = bij
    return FixedPointPresheaf(P, isos)


def empty_presheaf_check(registry: Sequence[RObject], sieves: Iterable[Sieve]) -> list[tuple[Sieve, SheafResult]]:
    """``hom(-, ∅)`` against every sampled covering sieve."""
    tower = next(A.tower for A in registry)
    P = representable_presheaf(empty_gset(tower), registry)
    return [(S, sheaf_condition(P, S.codomain, S)) for S in sieves]
