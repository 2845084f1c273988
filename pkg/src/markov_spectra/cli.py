"""Command-line entry point: ``spectra <command> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input,
3 empty result, 4 internal error. Settings come from an optional
``key = value`` config file, then flags, then ``SPECTRA_PRECISION``
(precision only).
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from fractions import Fraction

import mpmath
import numpy as np

from . import config
from .cf_core import convergents, parse_expansion, parse_word
from .checks import ALIASES, CHECKS, run_checks
from .dimension import hd_bounds
from .errors import EmptyResultError, InputError
from .spectra import D_estimate, as_surd, prune_words, scan
from .splice import RULES, audit_splice, holder_exponent_probe, prepare_chain, sample_pairs, splice_theta
from .subshift_graph import TransitionGraph, mixing_constant, scc_decompose
from .symbolic_dynamics import lagrange_value, markov_value, parse_biseq

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_EMPTY, EXIT_INTERNAL = 0, 1, 2, 3, 4

DEFAULTS = {"precision": config.DEFAULT_PRECISION, "depth": 10, "eps": "1/1000",
            "ell": None, "seed": 0, "format": "json"}
_INT_KEYS = {"precision", "depth", "ell", "seed"}


def read_config(path: str) -> dict:
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in DEFAULTS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = val
    return out


def settings(args) -> dict:
    """Merge defaults, config file, flags and the precision variable, in that order."""
    s = dict(DEFAULTS)
    if args.config:
        s.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            s[key] = val
    if os.environ.get("SPECTRA_PRECISION"):
        s["precision"] = os.environ["SPECTRA_PRECISION"]
    for key in _INT_KEYS:
        if s[key] is not None:
            try:
                s[key] = int(s[key])
            except ValueError:
                raise InputError(f"{key} must be an integer, got {s[key]!r}") from None
    try:
        s["eps"] = Fraction(str(s["eps"]))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"eps must be a number, got {s['eps']!r}") from None
    if s["precision"] < 53:
        raise InputError("precision must be at least 53 bits")
    if s["eps"] <= 0:
        raise InputError("eps must be positive")
    if s["format"] not in ("json", "text", "csv"):
        raise InputError("format must be json, text or csv")
    return s


def _dump(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=True) + "\n"


def _read_graph(path: str) -> TransitionGraph:
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read graph {path}: {exc.strerror}") from None
    return TransitionGraph.from_text(text)


def _dec(x, places: int = 15) -> str:
    return mpmath.nstr(mpmath.mpf(x.enclose(4 * places + 64).mid.a), places)


# ---- commands ---------------------------------------------------------------------------

def cmd_cf(args, s) -> tuple[str, int]:
    exp = parse_expansion(args.expr)
    v = exp.value()
    digits = list(itertools.islice(exp.digits(), args.terms))
    conv = convergents(digits, exp.a0)
    iv = v.enclosure
    rep = {"literal": str(exp), "exact": str(v.exact), "decimal": _dec(v.exact),
           "enclosure": [str(iv.a), str(iv.b)],
           "convergents": [{"k": k, "p": p, "q": q} for k, p, q in conv.rows() if k >= 0]}
    if s["format"] == "text":
        lines = [f"{rep['literal']} = {rep['exact']} ~ {rep['decimal']}"]
        lines += [f"  p_{r['k']}/q_{r['k']} = {r['p']}/{r['q']}" for r in rep["convergents"]]
        return "\n".join(lines) + "\n", EXIT_OK
    return _dump({"command": "cf", **rep}), EXIT_OK


def cmd_markov(args, s) -> tuple[str, int]:
    seq = parse_biseq(args.seq)
    m, l = markov_value(seq), lagrange_value(seq)
    rep = {"sequence": str(seq), "markov": str(m.value.exact), "markov_decimal": _dec(m.value.exact),
           "attaining_index": m.attaining_index, "lagrange": str(l.value.exact)}
    if s["format"] == "text":
        return (f"m = {rep['markov']} ~ {rep['markov_decimal']} (attained at {rep['attaining_index']})\n"
                f"l = {rep['lagrange']}\n"), EXIT_OK
    return _dump({"command": "markov", **rep}), EXIT_OK


def cmd_prune(args, s) -> tuple[str, int]:
    r = prune_words(args.N, args.t, s["eps"], s["ell"])
    if s["format"] == "text":
        lines = [f"N={r.N} t={r.t} eps={r.eps} ell={r.ell}"]
        lines += [f"  {k}: {len(r.words(k))}" for k in sorted({*r.status.values()})]
        if r.diagnostic:
            lines.append(f"  {r.diagnostic}")
        out = "\n".join(lines) + "\n"
    else:
        out = json.dumps(json.loads(r.to_json(full=args.full)), indent=2, sort_keys=True) + "\n"
    if not r.kept:
        print(f"empty: {r.diagnostic}", file=sys.stderr)
        return out, EXIT_EMPTY
    return out, EXIT_OK


def cmd_dim(args, s) -> tuple[str, int]:
    if args.graph:
        g = _read_graph(args.graph)
        b = hd_bounds(g, s["depth"])
        rep = {"graph": args.graph}
    elif args.t is not None:
        b = D_estimate(args.N, args.t, s["eps"], s["ell"], s["depth"])
        rep = {"N": args.N, "t": str(as_surd(args.t))}
    else:
        b = hd_bounds(TransitionGraph.full_shift(args.N), s["depth"])
        rep = {"N": args.N}
    body = json.loads(b.to_json())
    if s["format"] == "text":
        return f"{b} depth {b.depth} ({b.method})\n", EXIT_OK
    return _dump({"command": "dim", **rep, "bound": body}), EXIT_OK


def cmd_scan(args, s) -> tuple[str, int]:
    grid = [x for x in args.grid.split(",") if x.strip()]
    sc = scan(args.N, grid, s["eps"], s["ell"], s["depth"])
    if s["format"] == "json":
        rows = [{"t": str(t), "D": json.loads(b.to_json()), "d": [str(lo), str(hi)], "hypothesis": h}
                for t, b, (lo, hi), h in zip(sc.ts, sc.bounds, sc.d, sc.hypothesis)]
        br = sc.bracket()
        return _dump({"command": "scan", "N": args.N, "rows": rows,
                      "increases": sc.increases, "inconclusive": sc.inconclusive,
                      "bracket": [str(x) for x in br] if br else None}), EXIT_OK
    return sc.to_csv(), EXIT_OK


def cmd_scc(args, s) -> tuple[str, int]:
    g = _read_graph(args.graph)
    d = scc_decompose(g.core())
    comps = [{"size": len(c), "kind": k, "period": p,
              "mixing_constant": mixing_constant(d, i) if k == "mixing" else None}
             for i, (c, k, p) in enumerate(zip(d.components, d.kinds, d.periods))]
    rep = {"vertices": len(g.vertices), "core_vertices": len(d.graph.vertices),
           "components": comps, "transient_states": len(d.transient_states)}
    if s["format"] == "text":
        lines = [f"{len(comps)} component(s), {rep['transient_states']} transient state(s)"]
        lines += [f"  {i}: {c['kind']} size {c['size']} period {c['period']}" for i, c in enumerate(comps)]
        return "\n".join(lines) + "\n", EXIT_OK
    return _dump({"command": "scc", **rep}), EXIT_OK


def cmd_splice(args, s) -> tuple[str, int]:
    chain = prepare_chain([_read_graph(p) for p in args.graph or ()])
    base = itertools.cycle(parse_word(args.base))
    digits, sched = splice_theta(base, chain, args.prefix, args.r0, args.rule)
    if s["format"] == "text":
        return ",".join(map(str, digits)) + "\n", EXIT_OK
    rep = {"prefix_length": len(digits), "rule": sched.rule, "r0": sched.r0,
           "radii": sched.radii, "connector_lengths": sched.connector_lengths,
           "s": sched.s, "positions": sched.positions, "starts": sched.starts}
    if chain:
        audit = audit_splice(digits, sched, chain, args.N)
        rep["audit"] = {"ok": audit.ok, "admissible": audit.admissible,
                        "final_estimate": audit.final_estimate, "final_target": audit.final_target,
                        "per_insertion": [list(row) for row in audit.per_insertion]}
    if args.probe:
        depths = sorted({int(round(x)) for x in np.geomspace(8, 1200, 34)})
        pairs = sample_pairs(_read_graph(args.probe), depths, seed=s["seed"])
        fit = holder_exponent_probe(pairs, chain, args.r0, args.rule)
        rep["probe"] = {"exponent": fit.exponent, "intercept": fit.intercept,
                        "pairs": fit.n_pairs, "seed": s["seed"]}
    return _dump({"command": "splice", **rep}), EXIT_OK


def cmd_verify(args, s) -> tuple[str, int]:
    checks = run_checks(args.only, args.m)
    code = EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL
    if s["format"] == "json":
        return _dump({"command": "verify-paper", "passed": code == EXIT_OK,
                      "checks": [c.to_dict() for c in checks]}), code
    lines = [c.line() for c in checks]
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", code


# ---- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="settings file with 'key = value' lines")
    common.add_argument("--precision", help="bits for high-precision enclosures")
    common.add_argument("--format", choices=("json", "text", "csv"))
    common.add_argument("--seed", help="seed for randomized sampling (default 0)")
    common.add_argument("--out", help="write output to this file")
    tuning = argparse.ArgumentParser(add_help=False)
    tuning.add_argument("--eps", help="pruning tolerance (default 1/1000)")
    tuning.add_argument("--ell", help="window radius (default from eps)")
    tuning.add_argument("--depth", help="dimension depth (default 10)")

    p = argparse.ArgumentParser(prog="spectra", description="Markov and Lagrange spectra toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cf", parents=[common], help="evaluate a continued fraction literal")
    c.add_argument("expr", help="e.g. '0;2:(2,1)' or '0;:(1)*'")
    c.add_argument("--terms", type=int, default=12, help="digits in the convergents table")
    c.set_defaults(func=cmd_cf)

    c = sub.add_parser("markov", parents=[common], help="Markov and Lagrange values of a sequence")
    c.add_argument("seq", help="e.g. '(2,2,1,1)*' or '(1)*:;:(2)*'")
    c.set_defaults(func=cmd_markov)

    c = sub.add_parser("prune", parents=[common, tuning], help="classify windows for Lambda_t")
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--t", required=True)
    c.add_argument("--full", action="store_true", help="include per-status word lists")
    c.set_defaults(func=cmd_prune)

    c = sub.add_parser("dim", parents=[common, tuning], help="Hausdorff dimension enclosure")
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--t", help="estimate D(t) instead of the full shift")
    c.add_argument("--graph", help="transition graph file")
    c.set_defaults(func=cmd_dim)

    c = sub.add_parser("scan", parents=[common, tuning], help="D(t) and d(t) along a grid")
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--grid", required=True, help="comma-separated t values")
    c.set_defaults(func=cmd_scan, format_default="csv")

    c = sub.add_parser("scc", parents=[common], help="component decomposition of a graph")
    c.add_argument("--graph", required=True)
    c.set_defaults(func=cmd_scc)

    c = sub.add_parser("splice", parents=[common], help="emit a theta-prefix")
    c.add_argument("--graph", action="append", help="chain subshift graph file (repeatable)")
    c.add_argument("--base", default="1", help="period of the base stream")
    c.add_argument("--prefix", type=int, default=10_000)
    c.add_argument("--r0", type=int)
    c.add_argument("--rule", choices=RULES, default="power")
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--probe", help="graph file to sample pairs from for the Holder probe")
    c.set_defaults(func=cmd_splice)

    c = sub.add_parser("verify-paper", parents=[common], help="re-derive the published numbers")
    c.add_argument("--only", choices=[*CHECKS, *ALIASES])
    c.add_argument("--m", type=int, help="restrict the branch sums to one m")
    c.set_defaults(func=cmd_verify, format_default="text")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.format is None and getattr(args, "format_default", None):
            args.format = args.format_default
        s = settings(args)
        config.set_precision(s["precision"])
        out, code = args.func(args, s)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyResultError as exc:
        print(f"empty: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except Exception as exc:          # noqa: BLE001 - the exit-code contract covers everything else
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
