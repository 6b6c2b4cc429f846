"""Command-line front end: ``profsite check | witness | orbits | hom | refine``.

Exit codes are 0 (all checks pass), 1 (a check failed), 2 (bad input) and
3 (no witness found).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .checks import SUITES, CheckRecord, CheckReport, run_checks
from .corpus import CASES, TOWER_SPECS, stability_instances
from .groups import OpenSubgroup, ProfiniteTower, TowerError, build_tower, level_kernel
from .gsets import GSetError, coset_gset, disjoint_union, empty_gset, make_gset, orbits_and_stabilizers, point, trivial_gset
from .serialize import decode_certificate, decode_cover, decode_morphism, encode_certificate, encode_morphism, encode_object
from .sheaves import NoWitness, SheafError, subcanonicality_witness
from .site import CertificateError, SiteError, hom, stability_refine, the_group

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NO_WITNESS = 0, 1, 2, 3
DEFAULT_TOWER = "cyclic2_d3"


class InputError(ValueError):
    """Malformed command-line input; reported with exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    tower: str
    suite: str = "all"
    depth: int | None = None
    seed: int = 0
    objects: tuple[str, ...] = ()
    out: str | None = None
    fmt: str = "text"
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {"tower_source": self.tower, "depth": self.depth, "objects": list(self.objects)}


def load_tower(source: str | None, depth: int | None = None) -> ProfiniteTower:
    """A tower from a JSON file, or one of the built-in names."""
    source = source or DEFAULT_TOWER
    if source in TOWER_SPECS:
        spec = TOWER_SPECS[source]
    else:
        try:
            spec = json.loads(Path(source).read_text())
        except OSError as exc:
            raise InputError(f"cannot read tower spec {source}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"tower spec {source} is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        tower = build_tower(spec)
        return tower.truncate(depth) if depth is not None else tower
    except TowerError as exc:
        raise InputError(f"tower spec {source}: {exc}") from None


def parse_object(desc: str, tower: ProfiniteTower):
    """Parse an object descriptor.

    ``G``, ``empty``, ``point`` (or ``*``), ``trivial:N``, ``coset:L:m,m,...``,
    ``kernel:L`` (also ``G/UL``), ``@file.json`` for a G-set spec, and sums
    ``A+B`` of finite descriptors.
    """
    desc = desc.strip()
    if "+" in desc:
        parts = [parse_object(p, tower) for p in desc.split("+")]
        if any(not hasattr(p, "action") for p in parts):
            raise InputError(f"{desc!r}: G cannot appear in a sum")
        return disjoint_union(parts, name=desc)
    try:
        if desc == "G":
            return the_group(tower)
        if desc == "empty":
            return empty_gset(tower)
        if desc in ("point", "*"):
            return point(tower)
        if desc.startswith("trivial:"):
            return trivial_gset(tower, int(desc.split(":", 1)[1]))
        if desc.startswith("kernel:") or desc.startswith("G/U"):
            level = int(desc.split(":", 1)[1] if desc.startswith("kernel:") else desc[3:])
            return coset_gset(level_kernel(tower, level))
        if desc.startswith("coset:"):
            _, level, members = desc.split(":", 2)
            return coset_gset(OpenSubgroup.make(tower, int(level), [int(m) for m in members.split(",")]))
        if desc.startswith("@"):
            return make_gset(tower, json.loads(Path(desc[1:]).read_text()))
    except (ValueError, TowerError, GSetError, OSError) as exc:
        raise InputError(f"object {desc!r}: {exc}") from None
    raise InputError(f"unrecognised object descriptor {desc!r}")


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def render(payload: dict, fmt: str, lines: list[str]) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return "\n".join(lines) + "\n"


def cmd_check(config: RunConfig) -> int:
    tower = load_tower(config.tower, config.depth)
    report = run_checks(tower, config.suite, config.seed, config.extra)
    report.config.update(config.echo())
    emit(report.to_json() if config.fmt == "json" else report.to_text(), config.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_witness(config: RunConfig) -> int:
    tower = load_tower(config.tower, config.depth)
    target = parse_object(config.objects[0], tower)
    test = parse_object(config.objects[1], tower) if len(config.objects) > 1 else None
    try:
        w = subcanonicality_witness(target, test)
    except NoWitness as exc:
        payload = {"target": repr(target), "witness": None, "reason": exc.reason, "lhs": exc.lhs, "rhs": exc.rhs, "predicted_rhs": exc.predicted}
        emit(render(payload, config.fmt, [f"no witness for {target!r}: {exc.reason}"]), config.out)
        return EXIT_NO_WITNESS
    except SheafError as exc:
        raise InputError(str(exc)) from None
    payload = {
        "target": repr(target),
        "test_object": repr(w.test_object),
        "sieve": [encode_morphism(f) for f in w.sieve.generators],
        "lhs": w.lhs,
        "rhs": w.rhs,
        "predicted_rhs": w.predicted,
    }
    lines = [f"witness for {target!r} on {w.test_object!r}: lhs {w.lhs}, rhs {w.rhs}"]
    emit(render(payload, config.fmt, lines), config.out)
    return EXIT_OK


def cmd_orbits(config: RunConfig) -> int:
    tower = load_tower(config.tower, config.depth)
    X = parse_object(config.objects[0], tower)
    if not hasattr(X, "action"):
        raise InputError("orbits needs a finite G-set")
    dec = orbits_and_stabilizers(X)
    dec.verify()
    rows = [
        {"representative": o.representative, "points": sorted(o.elements), "stabilizer": {"level": o.stabilizer.level, "members": sorted(o.stabilizer.members)}, "index": o.stabilizer.index}
        for o in dec.orbits
    ]
    lines = [f"orbit of {r['representative']}: {r['points']} stabilizer L_{r['stabilizer']['level']}{r['stabilizer']['members']} index {r['index']}" for r in rows]
    emit(render({"gset": repr(X), "orbits": rows}, config.fmt, lines), config.out)
    return EXIT_OK


def cmd_hom(config: RunConfig) -> int:
    tower = load_tower(config.tower, config.depth)
    A, B = (parse_object(d, tower) for d in config.objects[:2])
    maps = hom(A, B)
    lines = [f"{len(maps)} morphisms {A!r} -> {B!r}"] + [f"  {f!r}" for f in maps]
    emit(render({"domain": encode_object(A), "codomain": encode_object(B), "count": len(maps), "morphisms": [encode_morphism(f) for f in maps]}, config.fmt, lines), config.out)
    return EXIT_OK


def cmd_refine(config: RunConfig) -> int:
    tower = load_tower(config.tower, config.depth)
    source = config.extra.get("input")
    if source:
        try:
            data = json.loads(Path(source).read_text())
            if "certificates" in data:
                certs = [decode_certificate(c, tower) for c in data["certificates"]]
            elif "factorizations" in data:
                certs = [decode_certificate(data, tower)]
            else:
                certs = [stability_refine(decode_cover(data["cover"], tower), decode_morphism(data["morphism"], tower))]
        except (OSError, json.JSONDecodeError, KeyError, TypeError, SiteError, GSetError, TowerError) as exc:
            if isinstance(exc, CertificateError):
                raise
            raise InputError(f"refine input {source}: {exc}") from None
    else:
        case = config.extra.get("case")
        if case not in CASES:
            raise InputError(f"refine needs --input or --case from {', '.join(CASES)}")
        rng = random.Random(f"{config.seed}:refine")
        certs = [stability_refine(cover, g) for c, cover, g in stability_instances(tower, rng, 1) if c == case]
    report = CheckReport({"command": "refine", "seed": config.seed, "tower": tower.name, **config.echo()})
    for cert in certs:
        try:
            cert.verify()
            status, detail = "Pass", {}
        except CertificateError as exc:
            status, detail = "Fail", {"error": str(exc)}
        report.records.append(CheckRecord(f"refine case {cert.case}", "stability axiom: the refined cover factors through the cover", status, detail))
    if config.fmt == "json":
        data = report.to_dict()
        data["certificates"] = [encode_certificate(c) for c in certs]
        emit(json.dumps(data, sort_keys=True, indent=2) + "\n", config.out)
    else:
        emit(report.to_text(), config.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tower", default=DEFAULT_TOWER, metavar="PATH", help=f"tower spec JSON, or one of {', '.join(TOWER_SPECS)}")
    common.add_argument("--depth", type=int, help="truncate the tower to this depth")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="text", dest="fmt")
    common.add_argument("--out", metavar="PATH")

    p = argparse.ArgumentParser(prog="profsite", description="Check suites for the epimorphic-cover site of a profinite tower.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run check suites")
    c.add_argument("--suite", choices=SUITES + ("all",), default="all")
    c.add_argument("--inject-fault", action="store_true", help="tamper with one stability certificate (self-test)")
    c.add_argument("--per-case", type=int, default=12)

    w = sub.add_parser("witness", parents=[common], help="search for a sheaf-condition failure of hom(-, X)")
    w.add_argument("target")
    w.add_argument("--test-object", help="finite object carrying the sieve (default: point)")

    o = sub.add_parser("orbits", parents=[common], help="orbit decomposition of a finite G-set")
    o.add_argument("gset")

    h = sub.add_parser("hom", parents=[common], help="list morphisms between two objects")
    h.add_argument("domain")
    h.add_argument("codomain")

    r = sub.add_parser("refine", parents=[common], help="build or re-verify a stability certificate")
    r.add_argument("--input", metavar="PATH", help="JSON with certificates (as written by refine), or with 'cover' and 'morphism'")
    r.add_argument("--case", choices=CASES)
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    objects: tuple[str, ...] = ()
    extra: dict = {}
    if args.command == "check":
        if args.per_case < 1:
            raise InputError("--per-case must be positive")
        extra = {"per_case": args.per_case}
        if args.inject_fault:
            extra["inject_fault"] = True
    elif args.command == "witness":
        objects = (args.target,) + ((args.test_object,) if args.test_object else ())
    elif args.command == "orbits":
        objects = (args.gset,)
    elif args.command == "hom":
        objects = (args.domain, args.codomain)
    elif args.command == "refine":
        extra = {k: v for k, v in (("input", args.input), ("case", args.case)) if v is not None}
    return RunConfig(
        tower=args.tower,
        suite=getattr(args, "suite", "all"),
        depth=args.depth,
        seed=args.seed,
        objects=objects,
        out=args.out,
        fmt=args.fmt,
        extra=extra,
    )


COMMANDS = {"check": cmd_check, "witness": cmd_witness, "orbits": cmd_orbits, "hom": cmd_hom, "refine": cmd_refine}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        return COMMANDS[args.command](config)
    except InputError as exc:
        print(f"profsite: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
