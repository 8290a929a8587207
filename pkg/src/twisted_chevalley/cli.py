"""Command-line entry point: ``tcg <command> [options]``."""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import asdict, dataclass, field

from .errors import DescriptorError, NoAntifixedUnit, ParamConstraintViolated, TwistedChevalleyError, UnsupportedKind
from .groups import declared_generators, twisted_generator
from .report import VerificationReport
from .rings import FiniteFieldSq, GaussianRationals, InvolutiveRing, parse_ring
from .roots import build_root_system, classify_orbits, parse_kind, standard_rho
from .twist import twisted_basis, twisted_table
from .verifiers import (
    ExtensionPair,
    check_normalizer_sample,
    finite_field_pair,
    gaussian_pair,
    span_closure,
    verify_recovery,
    verify_tangent_converse,
    verify_tangent_identities,
)

SUITES = ("tangent", "generation", "recovery", "normalizer")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class RunConfig:
    command: str
    kind: str = "A3"
    twist: str = "standard"
    ring: str | None = None
    ext: str | None = None
    suite: str = "all"
    seed: int = 0
    json_path: str | None = None
    cls: str | None = None
    params: dict[str, str] = field(default_factory=dict)
    samples: int = 100
    mutate: str | None = None

    def report_config(self) -> dict:
        out = asdict(self)
        for key in ("json_path", "command", "mutate", "cls", "params"):
            out.pop(key)
        return out


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", dest="kind", default="A3", help="root system: A<n> (n>=2), D<n> (n>=4) or E6")
    common.add_argument("--twist", default="standard", help="diagram involution (only 'standard')")
    common.add_argument("--json", dest="json_path", metavar="PATH", help="also write JSON output to PATH")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    ringed = argparse.ArgumentParser(add_help=False)
    ringed.add_argument("--ring", default="gaussian-rationals", help="ring descriptor, e.g. gaussian-rationals, gf(3,1)")

    parser = argparse.ArgumentParser(prog="tcg", description="Twisted Chevalley algebras and groups with exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rootsys", parents=[common], help="roots, rho and twisted classes")
    sub.add_parser("constants", parents=[common], help="structure constants and rho signs")
    sub.add_parser("twistedbasis", parents=[common, ringed], help="twisted basis in Chevalley coordinates")
    gen = sub.add_parser("generators", parents=[common, ringed], help="matrix of a twisted generator")
    gen.add_argument("--class", dest="cls", required=True, help="class representative, e.g. 1,0,0")
    gen.add_argument("--param", nargs="+", default=["t=1"], metavar="NAME=EXPR", help="t=<expr> [u=<expr>]")
    ver = sub.add_parser("verify", parents=[common, ringed], help="run verification suites")
    ver.add_argument("--suite", default="all", choices=SUITES + ("all",))
    ver.add_argument("--ext", help="extension ring S for the normalizer suite")
    ver.add_argument("--samples", type=int, default=100, help="samples per normalizer property")
    ver.add_argument("--mutate", help=argparse.SUPPRESS)
    return parser


def _ring_or_usage(text: str) -> InvolutiveRing:
    try:
        return parse_ring(text)
    except DescriptorError as exc:
        raise UsageError("--ring", str(exc)) from exc


def _has_a2(kind: str) -> bool:
    letter, n = parse_kind(kind)
    return letter == "A" and n % 2 == 0


def parse_args(argv: list[str] | None = None) -> RunConfig:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise UsageError("arguments", "could not parse command line") from None
    cfg = RunConfig(command=ns.command, kind=ns.kind, twist=ns.twist, seed=ns.seed, json_path=ns.json_path)
    try:
        letter, n = parse_kind(ns.kind)
    except UnsupportedKind as exc:
        raise UsageError("--type", str(exc)) from exc
    cfg.kind = f"{letter}{n}"
    if ns.twist != "standard":
        raise UsageError("--twist", f"unsupported twist {ns.twist!r}; only 'standard' is available")
    if ns.seed < 0 or ns.seed >= 1 << 64:
        raise UsageError("--seed", "seed must be an unsigned 64-bit integer")
    if ns.command in ("rootsys", "constants"):
        return cfg

    cfg.ring = ns.ring
    ring = _ring_or_usage(ns.ring)
    if not ring.has_half:
        raise UsageError("--ring", f"{ring.descriptor} has no 1/2")
    try:
        ring.antifixed_unit()
    except NoAntifixedUnit as exc:
        raise UsageError("--ring", str(exc)) from exc
    needs_third = ns.command == "twistedbasis" or (ns.command == "verify" and ns.suite in ("all", "tangent", "recovery"))
    if needs_third and _has_a2(cfg.kind) and not ring.has_third:
        raise UsageError("--ring", f"{ring.descriptor} has no 1/3, required by the A2 classes of {cfg.kind}")

    if ns.command == "generators":
        cfg.cls = ns.cls
        for item in ns.param:
            name, sep, expr = item.partition("=")
            if not sep or name not in ("t", "u"):
                raise UsageError("--param", f"expected t=<expr> or u=<expr>, got {item!r}")
            cfg.params[name] = expr
    if ns.command == "verify":
        cfg.suite = ns.suite
        cfg.ext = ns.ext
        cfg.samples = ns.samples
        cfg.mutate = ns.mutate
        if ns.samples < 0:
            raise UsageError("--samples", "must be non-negative")
        if ns.suite in ("normalizer", "all"):
            _resolve_pair(cfg)
    return cfg


def _resolve_pair(cfg: RunConfig) -> ExtensionPair:
    ring = _ring_or_usage(cfg.ring)
    ext = None
    if cfg.ext is not None:
        try:
            ext = parse_ring(cfg.ext)
        except DescriptorError as exc:
            raise UsageError("--ext", str(exc)) from exc
    if isinstance(ring, GaussianRationals):
        pair = gaussian_pair()
    elif isinstance(ring, FiniteFieldSq):
        pair = finite_field_pair(ring.p, ring.k)
    else:
        raise UsageError("--ring", f"no declared extension pair for {ring.descriptor}")
    if ext is not None and ext is not pair.ext:
        raise UsageError("--ext", f"supported extension for {ring.descriptor} is {pair.ext.descriptor}")
    return pair


# ---------------------------------------------------------------------------
# commands


def _parse_root(text: str, rank: int) -> tuple[int, ...]:
    parts = [p for p in re.split(r"[\s,\[\]()]+", text) if p]
    try:
        root = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError("--class", f"cannot parse root {text!r}") from None
    if len(root) != rank:
        raise UsageError("--class", f"root {text!r} needs {rank} coordinates")
    return root


def cmd_rootsys(cfg: RunConfig) -> tuple[list[str], dict]:
    S = build_root_system(cfg.kind)
    rho = standard_rho(cfg.kind)
    classes = classify_orbits(S, rho)
    lines = [f"type {S.name}", f"rho {rho}", f"roots {len(S.roots)}"]
    lines += [f"root {S.root_str(r)}" for r in S.roots]
    lines += [f"class {c.label()} {c.kind} " + " ".join(S.root_str(m) for m in c.members) for c in classes]
    data = {
        "type": S.name,
        "rho": str(rho),
        "roots": [list(r) for r in S.roots],
        "classes": [{"label": c.label(), "kind": c.kind, "members": [list(m) for m in c.members]} for c in classes],
    }
    return lines, data


def cmd_constants(cfg: RunConfig) -> tuple[list[str], dict]:
    table = twisted_table(build_root_system(cfg.kind))
    S = table.system
    lines, n_entries, eps_entries = [], [], []
    for (a, b), v in sorted(table.N.items(), key=lambda kv: (S.index[kv[0][0]], S.index[kv[0][1]])):
        lines.append(f"N {S.root_str(a)} {S.root_str(b)} {v:+d}")
        n_entries.append([list(a), list(b), v])
    for a in S.roots:
        lines.append(f"eps {S.root_str(a)} {table.epsilon[a]:+d}")
        eps_entries.append([list(a), table.epsilon[a]])
    return lines, {"type": S.name, "rho": str(table.rho), "N": n_entries, "eps": eps_entries}


def cmd_twistedbasis(cfg: RunConfig) -> tuple[list[str], dict]:
    ring = parse_ring(cfg.ring)
    S = build_root_system(cfg.kind)
    basis = twisted_basis(S, None, ring)
    lines = [f"{e.label} = {e.vector}" for e in basis]
    lines.append(f"elements {len(basis)}")
    data = {"type": S.name, "ring": ring.descriptor, "a": str(basis.a), "elements": [{"label": e.label, "vector": e.vector.to_json()} for e in basis]}
    return lines, data


def cmd_generators(cfg: RunConfig) -> tuple[list[str], dict]:
    ring = parse_ring(cfg.ring)
    S = build_root_system(cfg.kind)
    table = twisted_table(S)
    root = _parse_root(cfg.cls, S.rank)
    matches = [c for c in classify_orbits(S, table.rho) if root in c.members]
    if not matches:
        raise UsageError("--class", f"{cfg.cls!r} is not a root of {S.name}")
    cls = matches[0]
    try:
        t = ring.parse_element(cfg.params.get("t", "1"))
        u = ring.parse_element(cfg.params["u"]) if "u" in cfg.params else None
    except (DescriptorError, ValueError, SyntaxError) as exc:
        raise UsageError("--param", str(exc)) from exc
    try:
        g = twisted_generator(table, cls, t, u)
    except ParamConstraintViolated as exc:
        raise UsageError("--param", str(exc)) from exc
    dense = g.matrix.to_dense()
    lines = [f"class {cls.label()} {cls.kind} t={t}" + (f" u={u}" if u is not None else "")]
    lines += [" ".join(str(v) for v in row) for row in dense]
    data = {"class": cls.label(), "kind": cls.kind, "t": str(t), "u": None if u is None else str(u), "entries": g.matrix.to_json()}
    return lines, data


def _generation_report(table, ring, mutate: str | None) -> VerificationReport:
    report = VerificationReport("generation", {"type": table.system.name, "ring": ring.descriptor})
    gens = declared_generators(table, ring)
    if mutate is not None:
        gens = gens[:1]
    result = span_closure(gens, ring)
    witness = {
        "dimension": result.dimension,
        "ambient": result.ambient,
        "generators": len(gens),
        "method": result.method,
        "certified": result.certified,
    }
    if result.prime is not None:
        witness["prime"] = result.prime
    report.add("span-closure/dimension", result.is_full and result.certified, witness)
    report.decisions["closure algorithm"] = "left multiplication by generators from the identity, echelonized"
    return report.finish()


def _normalizer_report(cfg: RunConfig, table) -> VerificationReport:
    pair = _resolve_pair(cfg)
    if cfg.mutate is not None:
        # failure-path hook: an empty membership test rejects every conjugate
        pair = ExtensionPair(pair.name + " [mutated]", pair.sub, pair.ext, lambda x: False, pair.sample, pair.outside)
    return check_normalizer_sample(table, pair, samples=cfg.samples, seed=cfg.seed)


def run_verify(cfg: RunConfig) -> VerificationReport:
    ring = parse_ring(cfg.ring)
    table = twisted_table(build_root_system(cfg.kind))
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    report = VerificationReport(cfg.suite, cfg.report_config())
    report.decisions["sign fix"] = "rescale only the non-representative member of each A1Sq/A2 orbit"
    report.decisions["H+/H- index"] = "simple classes"
    for name in suites:
        if name == "tangent":
            part = verify_tangent_identities(table, ring, cfg.mutate)
            if ring.is_field:
                part.extend(verify_tangent_converse(table, ring, samples=20, seed=cfg.seed), "converse/")
            else:
                part.decisions["converse samples"] = "skipped: ring is not a field"
        elif name == "generation":
            part = _generation_report(table, ring, cfg.mutate)
        elif name == "recovery":
            part = verify_recovery(table, ring, cfg.mutate)
        else:
            part = _normalizer_report(cfg, table)
        report.extend(part, f"{name}/")
    return report.finish()


COMMANDS = {
    "rootsys": cmd_rootsys,
    "constants": cmd_constants,
    "twistedbasis": cmd_twistedbasis,
    "generators": cmd_generators,
}


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if cfg.command == "verify":
        report = run_verify(cfg)
        for line in report.summary_lines():
            print(line, file=out)
        payload = report.to_json()
        code = EXIT_OK if report.passed else EXIT_FAIL
    else:
        lines, payload = COMMANDS[cfg.command](cfg)
        for line in lines:
            print(line, file=out)
        code = EXIT_OK
    if cfg.json_path:
        try:
            _write_json(cfg.json_path, payload)
        except OSError as exc:
            print(f"error: cannot write {cfg.json_path}: {exc}", file=sys.stderr)
            return EXIT_IO
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TwistedChevalleyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
