"""``soc`` command line: load JSON inputs, run spectral computations and checks, report."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import schema
from .algebra import (
    PAlgebra,
    algebra_from_json,
    network_algebra,
    nogo_witness_pair,
    require_valid,
    validate_algebra,
)
from .basechange import (
    check_functor_coherence,
    check_hochschild_transport,
    check_residue_transport,
    check_spectral_mapping,
    check_spectrum_transport,
    get_functor,
)
from .errors import MissingDistinguished, ParseError, SOCError, ValidationFailure
from .fixtures import fixture, fixture_names
from .linalg import DEFAULT_TOL
from .operad import Digraph, network_operad, operad_from_json, validate_operad
from .spectral import analytic_spectrum, decompose, naive_spectrum, operadic_spectrum

COMMANDS = ("spectrum", "decompose", "analytic", "naive", "nogo-demo", "network", "basechange", "validate")
DEFAULT_FUNCTORS = ("identity", "complexification", "forgetful")

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    fixture: str | None = None
    tolerance: float = DEFAULT_TOL
    max_loop_length: int | None = None
    output_format: str = "text"
    output_path: str | None = None
    seed: int = 0
    analytic: bool = False
    functors: tuple = DEFAULT_FUNCTORS
    coeffs: tuple = (0j, 1 + 0j, 1 + 0j)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")
        if not self.tolerance > 0:
            raise ParseError("tolerance must be positive")
        if self.max_loop_length is not None and self.max_loop_length < 1:
            raise ParseError("max-loop-length must be a positive integer")
        if self.seed < 0:
            raise ParseError("seed must be non-negative")

    def to_json(self) -> dict:
        return {"input": self.input_path, "fixture": self.fixture, "tolerance": self.tolerance,
                "max_loop_length": self.max_loop_length, "seed": self.seed}


# ---------------------------------------------------------------------------
# input

def _kind(doc) -> str:
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    if "components" in doc:
        return "algebra"
    if "colors" in doc:
        return "operad"
    if "vertices" in doc:
        return "digraph"
    raise ParseError("cannot tell input kind: expected 'components', 'colors' or 'vertices'")


def load_document(cfg: RunConfig):
    """Return ``(kind, parsed object)`` or ``(None, None)`` when no input was given."""
    if cfg.fixture is not None:
        try:
            doc = fixture(cfg.fixture)
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from None
    elif cfg.input_path is not None:
        try:
            text = Path(cfg.input_path).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {cfg.input_path}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    else:
        return None, None
    kind = _kind(doc)
    schema.check(doc, schema.INPUT_SCHEMAS[kind], kind)
    try:
        if kind == "algebra":
            return kind, algebra_from_json(doc)
        if kind == "operad":
            return kind, operad_from_json(doc)
        return kind, Digraph.from_json(doc)
    except ValidationFailure:
        raise
    except (SOCError, ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed {kind}: {exc}") from None


def _as_algebra(kind, obj, command) -> PAlgebra:
    if kind == "algebra":
        return obj
    if kind == "digraph":
        return network_algebra(obj)
    if kind is None:
        raise ParseError(f"{command} needs --input or --fixture")
    raise ParseError(f"{command} expects an algebra or a digraph, got an operad")


# ---------------------------------------------------------------------------
# commands; each returns (ok, result dict, text lines)

def _spec_str(s) -> str:
    return repr(s).split(", tol=")[0].removeprefix("SpectrumSet(")


def _spectrum_lines(obj) -> list:
    d = obj.decomposition
    head = (f"operadic spectrum: total dimension {obj.total_dimension} "
            f"(hochschild {obj.hochschild_dimension}, residue {obj.residue.total_dimension})")
    lines = [head]
    return lines + _decomp_lines(d)


def _decomp_lines(d) -> list:
    lines = ["  color  local"]
    lines += [f"  {c:<6} {n}" for c, n in d.local.items()]
    lines.append("  cross terms:")
    for r in d.cross:
        lines.append(f"    {r.op:<14} -> {r.output_color:<4} image {r.image_dim}")
    lines.append(f"  totals: local {d.local_dimension} + cross {d.cross_dimension} = {d.total}")
    return lines


def _analytic_lines(an) -> list:
    lines = ["analytic spectrum"]
    for c, s in an.per_color.items():
        lines.append(f"  color {c}: {_spec_str(s)}")
    for i, lp in enumerate(an.loops):
        lines.append(f"  loop {i} at {lp.start}: {' . '.join(lp.ops)} -> {_spec_str(lp.spectrum)}")
    lines.append(f"  interaction: {_spec_str(an.interaction)}")
    lines.append(f"  union: {_spec_str(an.union)}")
    if an.unrealized:
        lines.append(f"  not realized as loops: {', '.join(an.unrealized)}")
    return lines


def cmd_spectrum(cfg, kind, obj):
    obj = operadic_spectrum(_as_algebra(kind, obj, cfg.command))
    return True, obj.to_json(), _spectrum_lines(obj)


def cmd_decompose(cfg, kind, obj):
    d = decompose(_as_algebra(kind, obj, cfg.command))
    return True, d.to_json(), ["spectral decomposition"] + _decomp_lines(d)


def cmd_analytic(cfg, kind, obj):
    an = analytic_spectrum(_as_algebra(kind, obj, cfg.command), cfg.max_loop_length, cfg.tolerance)
    return True, an.to_json(), _analytic_lines(an)


def cmd_naive(cfg, kind, obj):
    a = _as_algebra(kind, obj, cfg.command)
    require_valid(a)  # the library call ignores structure maps; the CLI still refuses invalid input
    try:
        spec = naive_spectrum(a, cfg.tolerance)
    except MissingDistinguished as exc:
        # an empty naive spectrum is a legitimate answer, not a failure
        return True, {}, [f"naive spectrum: empty ({exc})"]
    return True, {c: s.to_json() for c, s in spec.items()}, \
        ["naive spectrum"] + [f"  color {c}: {_spec_str(s)}" for c, s in spec.items()]


def cmd_nogo(cfg, kind, obj):
    a, b = nogo_witness_pair()
    na, nb = naive_spectrum(a, cfg.tolerance), naive_spectrum(b, cfg.tolerance)
    equal = all(na[c].set_equal(nb[c], cfg.tolerance) for c in a.operad.colors)
    sa, sb = operadic_spectrum(a), operadic_spectrum(b)
    differ = sa.total_dimension != sb.total_dimension
    result = {
        "naive": {"A": {c: s.to_json() for c, s in na.items()},
                  "B": {c: s.to_json() for c, s in nb.items()}},
        "totals": {"A": sa.decomposition.to_json()["totals"], "B": sb.decomposition.to_json()["totals"]},
        "naive_equal": equal,
        "totals_differ": differ,
    }
    lines = ["no-go witness pair"]
    for c in a.operad.colors:
        lines.append(f"  naive color {c}: A {_spec_str(na[c])}  B {_spec_str(nb[c])}")
    for tag, s in (("A", sa), ("B", sb)):
        d = s.decomposition
        lines.append(f"  operadic {tag}: local {d.local_dimension} + cross {d.cross_dimension} = {d.total}")
    lines.append(f"  naive spectra equal: {equal}; operadic totals differ: {differ}")
    return equal and differ, result, lines


def cmd_network(cfg, kind, obj):
    if kind != "digraph":
        raise ParseError("network expects a digraph input (keys 'vertices', 'edges')")
    a = network_algebra(obj)
    sp = operadic_spectrum(a)
    result = {"spectrum": sp.to_json()}
    lines = [f"network: {len(obj.vertices)} vertices, {len(obj.edges)} edges"] + _spectrum_lines(sp)
    if cfg.analytic:
        an = analytic_spectrum(a, cfg.max_loop_length, cfg.tolerance)
        result["analytic"] = an.to_json()
        lines += _analytic_lines(an)
    return True, result, lines


def cmd_basechange(cfg, kind, obj):
    if kind is None:
        raise ParseError("basechange needs --input or --fixture")
    out, skipped = [], []

    def add(name, rep):
        d = rep.to_json()
        d["functor"] = name
        out.append(d)

    for name in cfg.functors:
        f = get_functor(name)
        add(name, check_functor_coherence(f, (2, 3, 2)))
        if kind == "operad":
            add(name, check_residue_transport(obj, f))
            continue
        a = _as_algebra(kind, obj, cfg.command)
        add(name, check_residue_transport(a.operad, f))
        add(name, check_hochschild_transport(a, f))
        add(name, check_spectrum_transport(a, f))
        try:
            add(name, check_spectral_mapping(a, cfg.coeffs, cfg.tolerance, cfg.max_loop_length,
                                             functor=f, seed=cfg.seed))
        except MissingDistinguished as exc:
            skipped.append({"check": "spectral_mapping", "functor": name, "reason": str(exc)})
    ok = all(r["pass"] for r in out)
    lines = ["base change checks"]
    for r in out:
        dev = r["max_deviation"]
        dev = "n/a" if dev is None else f"{dev:.2e}"
        lines.append(f"  {r['functor']:<18} {r['check']:<22} {'PASS' if r['pass'] else 'FAIL'}  dev {dev}")
        lines += [f"      {d}" for d in r["details"]]
    for s in skipped:
        lines.append(f"  {s['functor']:<18} {s['check']:<22} SKIP  {s['reason']}")
    return ok, {"checks": out, "skipped": skipped}, lines


def cmd_validate(cfg, kind, obj):
    if kind is None:
        raise ParseError("validate needs --input or --fixture")
    if kind == "operad":
        rep = validate_operad(obj)
    elif kind == "digraph":
        rep = validate_operad(network_operad(obj))
        if rep.ok:
            rep = validate_algebra(network_algebra(obj))
    else:
        rep = validate_operad(obj.operad)
        if rep.ok:
            rep = validate_algebra(obj)
    lines = [f"{kind}: {'valid' if rep.ok else 'INVALID'}"]
    lines += [f"  {v.kind}: {v.where} (discrepancy {v.discrepancy:.3g})" for v in rep.violations]
    lines += [f"  warning: {w}" for w in rep.warnings]
    return rep.ok, rep.to_json(), lines


HANDLERS = {
    "spectrum": cmd_spectrum, "decompose": cmd_decompose, "analytic": cmd_analytic,
    "naive": cmd_naive, "nogo-demo": cmd_nogo, "network": cmd_network,
    "basechange": cmd_basechange, "validate": cmd_validate,
}


# ---------------------------------------------------------------------------

def run(cfg: RunConfig) -> tuple:
    """Execute ``cfg``; returns ``(exit status, report dict, text lines)``."""
    try:
        kind, obj = load_document(cfg)
        ok, result, lines = HANDLERS[cfg.command](cfg, kind, obj)
        status = EXIT_OK if ok else EXIT_FAIL
    except ParseError as exc:
        return EXIT_PARSE, _error_report(cfg, "parse", exc), [f"error: {exc}"]
    except ValidationFailure as exc:
        rep = _error_report(cfg, "validation", exc)
        rep["result"]["violations"] = exc.report.to_json() if exc.report is not None else None
        lines = [f"validation failed: {exc}"]
        if exc.report is not None:
            lines += [f"  {v.kind}: {v.where}" for v in exc.report.violations]
        return EXIT_FAIL, rep, lines
    except SOCError as exc:
        return EXIT_FAIL, _error_report(cfg, type(exc).__name__, exc), [f"error: {exc}"]
    report = {"schema_version": schema.SCHEMA_VERSION, "command": cfg.command, "ok": ok,
              "config": cfg.to_json(), "result": result}
    return status, report, lines


def _error_report(cfg, kind, exc) -> dict:
    err = {"kind": kind, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["line"], err["column"] = exc.line, exc.column
    return {"schema_version": schema.SCHEMA_VERSION, "command": cfg.command, "ok": False,
            "config": cfg.to_json(), "result": {"error": err}}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _complex_arg(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def _coeffs_arg(s: str) -> tuple:
    return tuple(_complex_arg(p) for p in s.split(",") if p.strip())


def build_parser() -> argparse.ArgumentParser:
    env_tol = os.environ.get("SOC_TOLERANCE")
    default_tol = DEFAULT_TOL
    if env_tol:
        try:
            default_tol = float(env_tol)
        except ValueError:
            default_tol = float("nan")  # rejected by RunConfig
    p = argparse.ArgumentParser(prog="soc", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="PATH", help="JSON operad, algebra or digraph")
    src.add_argument("--fixture", metavar="NAME", help=f"embedded input: {', '.join(fixture_names())}")
    p.add_argument("--tolerance", type=float, default=default_tol, metavar="R",
                   help="spectral matching tolerance (env SOC_TOLERANCE, default 1e-8)")
    p.add_argument("--max-loop-length", type=int, default=None, metavar="N")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", metavar="PATH", help="write the JSON report here")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--analytic", action="store_true", help="network: include the analytic spectrum")
    p.add_argument("--functor", action="append", metavar="NAME",
                   help="basechange: functor to test (repeatable)")
    p.add_argument("--coeffs", type=_coeffs_arg, default=None, metavar="C0,C1,...",
                   help="basechange: polynomial coefficients, constant term first")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            command=ns.command, input_path=ns.input, fixture=ns.fixture, tolerance=ns.tolerance,
            max_loop_length=ns.max_loop_length, output_format=ns.format, output_path=ns.output,
            seed=ns.seed, analytic=ns.analytic,
            functors=tuple(ns.functor) if ns.functor else DEFAULT_FUNCTORS,
            coeffs=ns.coeffs if ns.coeffs else RunConfig.coeffs,
        )
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    status, report, lines = run(cfg)
    if cfg.output_format == "json":
        text = dumps(report)
        if cfg.output_path:
            Path(cfg.output_path).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        stream = sys.stderr if status == EXIT_PARSE else sys.stdout
        print("\n".join(lines), file=stream)
        if cfg.output_path:
            Path(cfg.output_path).write_text(dumps(report))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
