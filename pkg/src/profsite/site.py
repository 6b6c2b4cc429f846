"""The category of finite discrete G-sets plus G itself, with epimorphic covers.

Objects are :class:`DiscreteGSet` instances or the single :class:`GroupObject`
of a tower.  Morphisms come in four shapes:

* ``FinToFin`` - an equivariant map between finite G-sets;
* ``GToFin``   - ``G -> X`` determined by the image ``x`` of 1 (``γ ↦ γ·x``);
* ``GToG``     - right multiplication ``δ ↦ δγ``;
* ``VacuousToG`` - the empty map ``∅ -> G``.

A nonempty finite set admits no map to G, so these are all of them.
``G`` is handled at the top level of the tower: ``hom(G, G)`` is ``L_d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from .groups import GroupElement, OpenSubgroup, ProfiniteTower
from .gsets import (
    DiscreteGSet,
    EquivariantMap,
    empty_gset,
    enumerate_equivariant_maps,
    identity_map,
    pullback_finite,
    stabilizer,
)

__all__ = [
    "SiteError",
    "CertificateError",
    "GroupObject",
    "the_group",
    "is_group",
    "FinToFin",
    "GToFin",
    "GToG",
    "VacuousToG",
    "hom",
    "identity",
    "compose",
    "evaluate",
    "points",
    "EpiCheck",
    "is_epimorphic_cover",
    "Cover",
    "Sieve",
    "Factorization",
    "RefinementCertificate",
    "stability_refine",
    "compose_covers",
    "sieve_contains",
    "is_covering_sieve",
    "truncated_saturation",
    "InSite",
    "NotInSite",
    "fiber_product_diagnostic",
]


class SiteError(ValueError):
    pass


class CertificateError(SiteError):
    """A refinement certificate failed re-verification."""


@dataclass(frozen=True, eq=False)
class GroupObject:
    """The object G; one per tower."""

    tower: ProfiniteTower

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupObject) and other.tower is self.tower

    def __hash__(self) -> int:
        return hash(("G", id(self.tower)))

    @property
    def name(self) -> str:
        return "G"

    def __repr__(self) -> str:
        return "G"


RObject = Union[DiscreteGSet, GroupObject]


def the_group(tower: ProfiniteTower) -> GroupObject:
    return GroupObject(tower)


def is_group(obj) -> bool:
    return isinstance(obj, GroupObject)


def _check_finite(obj) -> DiscreteGSet:
    if not isinstance(obj, DiscreteGSet):
        raise SiteError(f"expected a finite G-set, got {obj!r}")
    return obj


@dataclass(frozen=True)
class FinToFin:
    map: EquivariantMap

    variant = "FinToFin"

    @property
    def domain(self) -> DiscreteGSet:
        return self.map.domain

    @property
    def codomain(self) -> DiscreteGSet:
        return self.map.codomain


@dataclass(frozen=True)
class GToFin:
    group: GroupObject
    codomain: DiscreteGSet
    value: int

    variant = "GToFin"

    def __post_init__(self):
        if not 0 <= self.value < self.codomain.size:
            raise SiteError(f"value {self.value} is not a point of {self.codomain!r}")

    @property
    def domain(self) -> GroupObject:
        return self.group


@dataclass(frozen=True)
class GToG:
    group: GroupObject
    gamma: GroupElement

    variant = "GToG"

    @property
    def domain(self) -> GroupObject:
        return self.group

    @property
    def codomain(self) -> GroupObject:
        return self.group


@dataclass(frozen=True)
class VacuousToG:
    domain: DiscreteGSet
    group: GroupObject

    variant = "VacuousToG"

    def __post_init__(self):
        if self.domain.size != 0:
            raise SiteError("only the empty G-set maps to G")

    @property
    def codomain(self) -> GroupObject:
        return self.group


SiteMorphism = Union[FinToFin, GToFin, GToG, VacuousToG]


def points(obj: RObject) -> Iterator:
    """Points of an object; for G, every element of the truncated group."""
    if is_group(obj):
        return obj.tower.elements()
    return iter(range(obj.size))


def evaluate(f: SiteMorphism, x):
    """Apply ``f`` to a point (an int, or a GroupElement when the domain is G)."""
    if isinstance(f, FinToFin):
        return f.map(x)
    if isinstance(f, GToFin):
        return f.codomain.act(x, f.value)
    if isinstance(f, GToG):
        return x * f.gamma
    raise SiteError("the vacuous map has no points to evaluate")


def hom(C: RObject, D: RObject) -> list[SiteMorphism]:
    if is_group(C):
        if is_group(D):
            return [GToG(C, g) for g in C.tower.elements()]
        return [GToFin(C, D, x) for x in range(D.size)]
    if is_group(D):
        return [VacuousToG(C, D)] if C.size == 0 else []
    return [FinToFin(m) for m in enumerate_equivariant_maps(C, D)]


def identity(obj: RObject) -> SiteMorphism:
    if is_group(obj):
        return GToG(obj, obj.tower.identity())
    return FinToFin(identity_map(obj))


def _from_empty(src: DiscreteGSet, target: RObject) -> SiteMorphism:
    if is_group(target):
        return VacuousToG(src, target)
    return FinToFin(EquivariantMap(src, target, ()))


def compose(f: SiteMorphism, g: SiteMorphism) -> SiteMorphism:
    """``f ∘ g``: first ``g``, then ``f``."""
    if g.codomain != f.domain:
        raise SiteError(f"cannot compose: codomain {g.codomain!r} != domain {f.domain!r}")
    if isinstance(g, VacuousToG) or (isinstance(g.domain, DiscreteGSet) and g.domain.size == 0):
        return _from_empty(g.domain, f.codomain)
    if isinstance(f, FinToFin):
        if isinstance(g, FinToFin):
            return FinToFin(f.map.after(g.map))
        if isinstance(g, GToFin):
            return GToFin(g.group, f.codomain, f.map(g.value))
    if isinstance(f, GToG) and isinstance(g, GToG):
        # δ ↦ (δ·g)·f
        return GToG(f.group, g.gamma * f.gamma)
    if isinstance(f, GToFin) and isinstance(g, GToG):
        return GToFin(f.group, f.codomain, f.codomain.act(g.gamma, f.value))
    raise SiteError(f"cannot compose {f.variant} after {g.variant}")


@dataclass(frozen=True)
class EpiCheck:
    """Outcome of the epimorphic test.

    For a finite codomain ``witness[c]`` is ``(member index, preimage)`` for
    each point c; for G it is the index of a right translation in the family.
    """

    ok: bool
    witness: object
    missing: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def _first_preimage(f: SiteMorphism, c: int):
    if isinstance(f, FinToFin):
        for x, y in enumerate(f.map.table):
            if y == c:
                return x
        return None
    if isinstance(f, GToFin):
        X = f.codomain
        top = X.table_at(X.tower.depth)
        for t in range(top.shape[0]):
            if top[t, f.value] == c:
                return X.tower.lift(t)
        return None
    return None


def _codomain_of(family: Sequence[SiteMorphism]) -> RObject:
    if not family:
        raise SiteError("a cover needs at least one morphism")
    C = family[0].codomain
    for f in family[1:]:
        if f.codomain != C:
            raise SiteError(f"family has mixed codomains {C!r} and {f.codomain!r}")
    return C


def is_epimorphic_cover(family: Sequence[SiteMorphism]) -> EpiCheck:
    C = _codomain_of(family)
    if is_group(C):
        for i, f in enumerate(family):
            if isinstance(f, GToG):
                return EpiCheck(True, i)
        return EpiCheck(False, None, ("G",))
    witness, missing = [], []
    for c in range(C.size):
        hit = None
        for i, f in enumerate(family):
            pre = _first_preimage(f, c)
            if pre is not None:
                hit = (i, pre)
                break
        witness.append(hit)
        if hit is None:
            missing.append(c)
    return EpiCheck(not missing, tuple(witness), tuple(missing))


@dataclass(frozen=True)
class Cover:
    codomain: RObject
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if _codomain_of(self.members) != self.codomain:
            raise SiteError("cover members must share the cover's codomain")

    @classmethod
    def of(cls, members: Iterable[SiteMorphism]) -> "Cover":
        members = tuple(members)
        return cls(_codomain_of(members), members)

    @cached_property
    def epi(self) -> EpiCheck:
        return is_epimorphic_cover(self.members)

    @property
    def is_epimorphic(self) -> bool:
        return self.epi.ok

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Sieve:
    """The sieve generated by ``generators``: all ``t ∘ h``."""

    codomain: RObject
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for t in self.generators:
            if t.codomain != self.codomain:
                raise SiteError("sieve generators must share the sieve's codomain")

    @classmethod
    def of(cls, generators: Iterable[SiteMorphism]) -> "Sieve":
        gens = tuple(generators)
        return cls(_codomain_of(gens), gens)


def _same_pointwise(a: SiteMorphism, b: SiteMorphism) -> bool:
    if a.domain != b.domain or a.codomain != b.codomain:
        return False
    if isinstance(a.domain, DiscreteGSet) and a.domain.size == 0:
        return True
    return all(evaluate(a, x) == evaluate(b, x) for x in points(a.domain))


@dataclass(frozen=True)
class Factorization:
    """``g ∘ member == cover.members[index] ∘ connecting``."""

    member: SiteMorphism
    index: int
    connecting: SiteMorphism


@dataclass(frozen=True)
class RefinementCertificate:
    cover: Cover
    morphism: SiteMorphism
    refined: Cover
    factors: tuple
    case: str

    def verify(self) -> None:
        g = self.morphism
        if self.refined.codomain != g.domain:
            raise CertificateError("refined cover does not cover the domain of g")
        if tuple(fc.member for fc in self.factors) != self.refined.members:
            raise CertificateError("factorizations do not line up with the refined cover")
        for j, fc in enumerate(self.factors):
            f = self.cover.members[fc.index]
            lhs = compose(g, fc.member)
            rhs = compose(f, fc.connecting)
            if lhs != rhs or not _same_pointwise(lhs, rhs):
                raise CertificateError(f"square {j} does not commute (case {self.case})")
        if not self.refined.is_epimorphic:
            raise CertificateError(f"refined cover is not epimorphic (case {self.case})")


def _orbit_rep(X: DiscreteGSet, x: int) -> int:
    return int(X.action[:, x].min())


def _least_mover(X: DiscreteGSet, src: int, dst: int) -> GroupElement:
    """Least top-level γ with γ·src = dst."""
    top = X.table_at(X.tower.depth)
    for t in range(top.shape[0]):
        if top[t, src] == dst:
            return X.tower.lift(t)
    raise SiteError(f"{dst} is not in the orbit of {src}")


def _first_hit(members, c: int):
    for l, f in enumerate(members):
        pre = _first_preimage(f, c)
        if pre is not None:
            return l, pre
    raise SiteError(f"internal error: point {c} has no preimage in an epimorphic cover")


def _case_label(D: RObject, C: RObject, members) -> str:
    all_finite = not any(is_group(f.domain) for f in members)
    if not is_group(D):
        if D.size == 0 and not all_finite:
            return "0"
        return "1" if all_finite else "5"
    if is_group(C):
        return "3"
    return "2" if all_finite else "4"


def stability_refine(cover: Cover, g: SiteMorphism) -> RefinementCertificate:
    """Refine ``cover`` of C along ``g: D -> C`` to a cover of D.

    Every composite ``g ∘ h_j`` factors through some cover member.  Where
    several choices exist, the lowest member index and the least preimage
    are taken.  The certificate is verified before it is returned.
    """
    if not cover.is_epimorphic:
        raise SiteError("stability_refine needs an epimorphic cover")
    if g.codomain != cover.codomain:
        raise SiteError("g must map into the covered object")
    D, C = g.domain, g.codomain
    fs = cover.members
    case = _case_label(D, C, fs)
    factors: list[Factorization] = []

    if case == "0":
        # D = ∅ with some member out of G: the identity of ∅ already factors
        src = fs[0].domain
        alpha = _from_empty(D, src)
        factors.append(Factorization(identity(D), 0, alpha))

    elif case == "1":
        for i, f in enumerate(fs):
            _, left, right = pullback_finite(g.map, f.map)
            factors.append(Factorization(FinToFin(left), i, FinToFin(right)))

    elif case == "3":
        k = next(i for i, f in enumerate(fs) if isinstance(f, GToG))
        lam = GToG(D, fs[k].gamma * g.gamma.inverse())
        factors.append(Factorization(lam, k, identity(fs[k].domain)))

    elif case in ("2", "4"):
        v = g.value
        rep = _orbit_rep(C, v)
        delta = _least_mover(C, rep, v)
        lam = GToG(D, delta.inverse())
        l, c_l = _first_hit(fs, rep)
        f_l = fs[l]
        if isinstance(f_l, FinToFin):
            alpha = GToFin(D, f_l.domain, c_l)
            case = "2" if case == "2" else "4a"
        else:
            alpha = GToG(D, c_l)
            case = "4b"
        factors.append(Factorization(lam, l, alpha))

    else:  # case 5
        G = next(f.domain for f in fs if is_group(f.domain))
        for d in range(D.size):
            l, c_l = _first_hit(fs, g.map(d))
            f_l = fs[l]
            if isinstance(f_l, FinToFin):
                _, left, right = pullback_finite(g.map, f_l.map)
                factors.append(Factorization(FinToFin(left), l, FinToFin(right)))
            else:
                w = f_l.value
                theta = _least_mover(C, _orbit_rep(C, w), w)
                shift = theta.inverse() * c_l.inverse()
                h = GToFin(G, D, D.act(shift, d))
                factors.append(Factorization(h, l, GToG(G, theta.inverse())))

    refined = Cover(D, tuple(fc.member for fc in factors))
    cert = RefinementCertificate(cover, g, refined, tuple(factors), case)
    cert.verify()
    return cert


def compose_covers(cover: Cover, subcovers: Sequence[Cover]) -> Cover:
    if len(subcovers) != len(cover.members):
        raise SiteError(f"need one subcover per member: {len(cover.members)} != {len(subcovers)}")
    if not cover.is_epimorphic:
        raise SiteError("outer family is not an epimorphic cover")
    composites = []
    for i, (f, sub) in enumerate(zip(cover.members, subcovers)):
        if sub.codomain != f.domain:
            raise SiteError(f"subcover {i} does not cover the domain of member {i}")
        if not sub.is_epimorphic:
            raise SiteError(f"subcover {i} is not epimorphic")
        composites.extend(compose(f, h) for h in sub.members)
    out = Cover(cover.codomain, tuple(composites))
    if not out.is_epimorphic:
        raise SiteError("internal error: composite family is not epimorphic")
    return out


def sieve_contains(S: Sieve, f: SiteMorphism) -> bool:
    if f.codomain != S.codomain:
        raise SiteError("morphism and sieve have different codomains")
    for t in S.generators:
        for h in hom(f.domain, t.domain):
            if compose(t, h) == f:
                return True
    return False


def is_covering_sieve(S: Sieve) -> bool:
    """A generated sieve covers iff its generators are epimorphic.

    Precomposition never enlarges an image, so the members of the sieve
    jointly hit exactly what the generators hit.
    """
    return bool(S.generators) and is_epimorphic_cover(S.generators).ok


def truncated_saturation(S: Sieve, objects: Sequence[RObject]) -> list[SiteMorphism]:
    """Every ``t ∘ h`` with ``h`` out of one of ``objects``, without repeats."""
    objs = list(objects)
    for t in S.generators:
        if t.domain not in objs:
            raise SiteError(f"generator domain {t.domain!r} is not among the registry objects")
    seen = set()
    out = []
    for A in objs:
        for t in S.generators:
            for h in hom(A, t.domain):
                m = compose(t, h)
                if m not in seen:
                    seen.add(m)
                    out.append(m)
    return out


@dataclass(frozen=True)
class InSite:
    obj: RObject
    left: SiteMorphism
    right: SiteMorphism


@dataclass(frozen=True)
class NotInSite:
    """The fiber product exists only as ``free_orbits`` copies of G.

    ``free_orbits`` is an int, or ``"infinite"`` when the orbits are
    indexed by a coset ``representative · subgroup`` of an open subgroup.
    """

    description: str
    free_orbits: object
    representative: GroupElement | None = None
    subgroup: OpenSubgroup | None = None


def fiber_product_diagnostic(f: SiteMorphism, g: SiteMorphism):
    """Decide whether ``dom f ×_C dom g`` (taken among G-spaces) is an object here."""
    if f.codomain != g.codomain:
        raise SiteError("legs of a fiber product need a common codomain")
    A, B = f.domain, g.domain
    for empty, other in ((A, B), (B, A)):
        if isinstance(empty, DiscreteGSet) and empty.size == 0:
            e = empty_gset(empty.tower)
            left, right = _from_empty(e, A), _from_empty(e, B)
            return InSite(e, left, right)
    if isinstance(f, FinToFin) and isinstance(g, FinToFin):
        P, left, right = pullback_finite(f.map, g.map)
        return InSite(P, FinToFin(left), FinToFin(right))
    if isinstance(f, GToG) and isinstance(g, GToG):
        # (γ, γ·a·b⁻¹) is a single free orbit
        return InSite(A, identity(A), GToG(A, f.gamma * g.gamma.inverse()))
    if isinstance(f, GToFin) and isinstance(g, GToFin):
        C = f.codomain
        v, w = f.value, g.value
        if _orbit_rep(C, v) != _orbit_rep(C, w):
            e = empty_gset(C.tower)
            return InSite(e, _from_empty(e, A), _from_empty(e, B))
        # (γ, δ) with γ·v = δ·w: orbits indexed by ε = γ⁻¹δ ∈ {ε : ε·w = v} = ε₀·G_w
        eps = _least_mover(C, w, v)
        U = stabilizer(C, w)
        if U.index == 1:
            text = "free orbits indexed by G"
        else:
            text = f"free orbits indexed by the coset {eps.coords}·U of the open subgroup U = {U} (infinite)"
        return NotInSite(text, "infinite", eps, U)
    if isinstance(f, GToFin) or isinstance(g, GToFin):
        grp_leg, fin_leg = (f, g) if isinstance(f, GToFin) else (g, f)
        C = grp_leg.codomain
        top = C.table_at(C.tower.depth)
        v = grp_leg.value
        B = fin_leg.domain
        hits = [(t, b) for b in range(B.size) for t in range(top.shape[0]) if top[t, v] == fin_leg.map(b)]
        order = top.shape[0]
        k = len(hits) // order
        if k == 0:
            e = empty_gset(C.tower)
            return InSite(e, _from_empty(e, A), _from_empty(e, B))
        if k == 1:
            t0, b0 = hits[0]
            G = grp_leg.domain
            to_g = GToG(G, C.tower.lift(t0))
            to_b = GToFin(G, B, b0)
            left, right = (to_g, to_b) if grp_leg is f else (to_b, to_g)
            return InSite(G, left, right)
        return NotInSite(f"{k} free copies of G", k)
    raise SiteError(f"unsupported fiber product shape: {f.variant} and {g.variant}")
