"""JSON-compatible encodings of objects, morphisms, covers and certificates.

Certificates carry every factorization triple, so :func:`recheck_certificate`
can rebuild and re-verify them from the encoded form alone.
"""

from __future__ import annotations

from .groups import ProfiniteTower
from .gsets import DiscreteGSet, EquivariantMap
from .site import (
    Cover,
    Factorization,
    FinToFin,
    GToFin,
    GToG,
    RefinementCertificate,
    Sieve,
    SiteError,
    VacuousToG,
    is_group,
    the_group,
)


def encode_object(obj) -> dict:
    if is_group(obj):
        return {"kind": "group"}
    return {
        "kind": "finite",
        "name": obj.name,
        "level": obj.level,
        "size": obj.size,
        "table": obj.action.tolist(),
    }


def decode_object(data: dict, tower: ProfiniteTower):
    if data.get("kind") == "group":
        return the_group(tower)
    if data.get("kind") == "finite":
        order = tower.level(data["level"]).order
        table = data["table"] if data["size"] else [[] for _ in range(order)]
        return DiscreteGSet.make(tower, data["level"], table, data.get("name", ""))
    raise SiteError(f"unknown object kind {data.get('kind')!r}")


def encode_morphism(f) -> dict:
    if isinstance(f, FinToFin):
        return {
            "variant": "FinToFin",
            "domain": encode_object(f.domain),
            "codomain": encode_object(f.codomain),
            "table": list(f.map.table),
        }
    if isinstance(f, GToFin):
        return {"variant": "GToFin", "codomain": encode_object(f.codomain), "value": f.value}
    if isinstance(f, GToG):
        return {"variant": "GToG", "gamma": list(f.gamma.coords)}
    if isinstance(f, VacuousToG):
        return {"variant": "VacuousToG", "domain": encode_object(f.domain)}
    raise SiteError(f"cannot encode {f!r}")


def decode_morphism(data: dict, tower: ProfiniteTower):
    G = the_group(tower)
    v = data.get("variant")
    if v == "FinToFin":
        m = EquivariantMap(decode_object(data["domain"], tower), decode_object(data["codomain"], tower), data["table"])
        return FinToFin(m)
    if v == "GToFin":
        return GToFin(G, decode_object(data["codomain"], tower), int(data["value"]))
    if v == "GToG":
        return GToG(G, tower.element(data["gamma"]))
    if v == "VacuousToG":
        return VacuousToG(decode_object(data["domain"], tower), G)
    raise SiteError(f"unknown morphism variant {v!r}")


def encode_cover(cover: Cover) -> dict:
    return {
        "codomain": encode_object(cover.codomain),
        "members": [encode_morphism(f) for f in cover.members],
        "epimorphic": cover.is_epimorphic,
    }


def decode_cover(data: dict, tower: ProfiniteTower) -> Cover:
    return Cover(decode_object(data["codomain"], tower), tuple(decode_morphism(m, tower) for m in data["members"]))


def encode_sieve(S: Sieve) -> dict:
    return {"codomain": encode_object(S.codomain), "generators": [encode_morphism(f) for f in S.generators]}


def encode_certificate(cert: RefinementCertificate) -> dict:
    return {
        "case": cert.case,
        "cover": encode_cover(cert.cover),
        "morphism": encode_morphism(cert.morphism),
        "refined": encode_cover(cert.refined),
        "factorizations": [
            {"member": encode_morphism(fc.member), "index": fc.index, "connecting": encode_morphism(fc.connecting)}
            for fc in cert.factors
        ],
    }


def decode_certificate(data: dict, tower: ProfiniteTower) -> RefinementCertificate:
    factors = tuple(
        Factorization(decode_morphism(fc["member"], tower), int(fc["index"]), decode_morphism(fc["connecting"], tower))
        for fc in data["factorizations"]
    )
    return RefinementCertificate(
        decode_cover(data["cover"], tower),
        decode_morphism(data["morphism"], tower),
        decode_cover(data["refined"], tower),
        factors,
        str(data["case"]),
    )


def recheck_certificate(data: dict, tower: ProfiniteTower) -> None:
    """Rebuild an encoded certificate and verify it; raises CertificateError."""
    decode_certificate(data, tower).verify()
