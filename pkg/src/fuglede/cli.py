"""Command-line front end.

Every subcommand produces a report ``{command, input_digest, result, version}``
(plus ``timing`` with ``--timing``) so that output is reproducible for a fixed
input, seed and version. Exit codes: 0 ok, 1 property violation (certificate
written), 2 usage or malformed input, 3 internal contradiction.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

from sympy import factorint

from . import __version__, cyclo, engine, scan, structure
from .groups import WeightedSet, contained_in_proper_subgroup, parse_set_json, set_to_json
from .spectral import enumerate_spectra, is_spectral, verify_spectral_pair, zero_set
from .tiling import tiling_complements, verify_tiling

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CONTRADICTION = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _load_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _load_set(path: str) -> tuple[WeightedSet, dict]:
    raw = _load_json(path)
    if not isinstance(raw, dict):
        raise UsageError(f"{path}: expected an object with 'group' and 'set'")
    try:
        return parse_set_json(raw), raw
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _elements(S: WeightedSet, elems) -> list:
    if S.group.is_cyclic_factor:
        return [x[0] for x in elems]
    return [list(x) for x in elems]


def _require_set(S: WeightedSet) -> None:
    if not S.is_set or S.total == 0:
        raise UsageError("input must be a nonempty set (all weights 1)")


# ---------------------------------------------------------------------------
# subcommands; each returns (result payload, exit code, digest input)


def analyze_set(S: WeightedSet) -> dict:
    """Full profile of a set: divisibility, spectrality, tiling, subgroup."""
    _require_set(S)
    g = S.group
    out: dict = {"set": set_to_json(S), "size": S.total,
                 "gcd_class": math.gcd(g.size, S.total),
                 "zero_set_size": len(zero_set(S))}
    if g.is_cyclic_factor:
        M = cyclo.mask_poly(S)
        divs = cyclo._divisors(g.orders[0])
        profile = cyclo.divisor_profile(M)
        out["divisors"] = divs
        out["phi_divides"] = [d in profile for d in divs]
        out["prime_power_support"] = sorted(cyclo.prime_power_support(M))
        out["T1"] = cyclo.check_T1(M)
        out["T2"] = cyclo.check_T2(M)
    else:
        out["T1"] = out["T2"] = None
    cert = is_spectral(S)
    out["spectral"] = cert is not None
    out["spectrum"] = _elements(S, cert.spectrum) if cert else None
    tiles = tiling_complements(S, limit=1)
    out["tile"] = bool(tiles)
    out["complement"] = _elements(S, tiles[0].complement) if tiles else None
    H = contained_in_proper_subgroup(S)
    out["proper_subgroup_order"] = H.order if H is not None else None
    return out


def cmd_analyze(args):
    S, raw = _load_set(args.set)
    return analyze_set(S), EXIT_OK, raw


def cmd_spectral(args):
    S, raw = _load_set(args.set)
    _require_set(S)
    if args.enumerate:
        certs = enumerate_spectra(S, limit=args.enumerate)
        result = {"spectral": bool(certs), "spectrum": _elements(S, certs[0].spectrum) if certs else None,
                  "spectra": [_elements(S, c.spectrum) for c in certs]}
    else:
        cert = is_spectral(S)
        result = {"spectral": cert is not None, "spectrum": _elements(S, cert.spectrum) if cert else None}
    if result["spectral"] and not verify_spectral_pair(S, [tuple(x) if isinstance(x, list) else x
                                                           for x in result["spectrum"]]):
        return {**result, "error": "spectrum failed verification"}, EXIT_CONTRADICTION, raw
    return result, EXIT_OK, raw


def cmd_tile(args):
    S, raw = _load_set(args.set)
    _require_set(S)
    sols = tiling_complements(S, limit=max(1, args.limit))
    for cert in sols:
        if not verify_tiling(S, cert):
            return {"error": "complement failed verification"}, EXIT_CONTRADICTION, raw
    result = {"tiles": bool(sols), "complement": _elements(S, sols[0].complement) if sols else None}
    if args.limit > 1:
        result["complements"] = [_elements(S, c.complement) for c in sols]
    return result, EXIT_OK, raw


def cmd_cyclo(args):
    if args.d < 1:
        raise UsageError("d must be positive")
    phi = cyclo.cyclotomic(args.d)
    coeffs = [int(c) for c in phi.array()]
    if args.mod_p:
        coeffs = [c % args.mod_p for c in coeffs]
    return {"d": args.d, "degree": phi.degree, "coefficients": coeffs, "mod_p": args.mod_p}, EXIT_OK, {"d": args.d, "mod_p": args.mod_p}


def cmd_mask(args):
    S, raw = _load_set(args.set)
    n = S.group.require_cyclic() if S.group.is_cyclic_factor else None
    if n is None:
        raise UsageError("mask polynomials need a single cyclic factor")
    M = cyclo.mask_poly(S)
    result: dict = {"n": n, "coefficients": [int(c) for c in M.coeffs]}
    if args.divides is not None:
        if args.divides < 1 or n % args.divides:
            raise UsageError(f"{args.divides} does not divide {n}")
        if args.mod_p:
            result["divides"] = cyclo.divides_mod_p(M, args.divides, args.mod_p)
        else:
            result["divides"] = cyclo.divides(M, args.divides)
        result["d"], result["mod_p"] = args.divides, args.mod_p
    else:
        result["divisor_profile"] = sorted(cyclo.divisor_profile(M))
    return result, EXIT_OK, {"input": raw, "divides": args.divides, "mod_p": args.mod_p}


def _squarefree(m: int) -> bool:
    return all(e == 1 for e in factorint(m).values())


def cmd_structure(args):
    S, raw = _load_set(args.set)
    if not (args.cube_rule or args.decompose or args.padic):
        raise UsageError("choose at least one of --cube-rule, --decompose, --padic")
    result: dict = {}
    g = S.group
    if args.cube_rule:
        if g.is_cyclic_factor:
            n = g.orders[0]
            result["cube_rule"] = {str(m): structure.cube_rule_divisibility(S, m)
                                   for m in cyclo._divisors(n) if m > 1}
        else:
            result["cube_rule"] = {"all_cubes_hold": structure.all_cubes_hold(S)}
    if args.decompose:
        W = S
        if g.is_cyclic_factor:
            if not _squarefree(g.orders[0]):
                raise UsageError("coset decompositions need a squarefree group order")
            W = structure.to_prime_product(S)
        dec = structure.coset_sum_decomposition(W)
        result["decomposition"] = None if dec is None else [
            {"axis": axis, "point": list(point), "coefficient": c}
            for (axis, point), c in sorted(dec.coefficients.items())]
    if args.padic:
        _require_set(S)
        rep = structure.padic_digit_structure(S)
        result["padic"] = {"p": rep.p, "exponent": rep.exponent, "size": rep.size, "k": rep.k,
                           "free_positions": list(rep.free_positions),
                           "meets_lower_bound": rep.meets_lower_bound, "tight": rep.tight,
                           "digits_constant": rep.digits_constant, "tree_ok": rep.tree_ok}
    return result, EXIT_OK, {"input": raw, "flags": [args.cube_rule, args.decompose, args.padic]}


def cmd_theorem(args):
    p, q, r = args.primes
    try:
        ctx = engine.PqrContext(p, q, r)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    S, raw_s = _load_set(args.set)
    L, raw_l = _load_set(args.spectrum)
    for W in (S, L):
        if W.group.orders != (ctx.n,):
            raise UsageError(f"sets must live in Z_{ctx.n}")
        _require_set(W)
    digest = {"primes": [p, q, r], "set": raw_s, "spectrum": raw_l, "strict": args.strict}
    try:
        cert, trace = engine.spectral_to_tile(ctx, S, L, strict=args.strict)
    except (engine.InternalContradiction, engine.UncoveredCase) as exc:
        return _engine_error(exc), EXIT_CONTRADICTION, digest
    except (engine.NotSpectral, engine.EngineHypothesisError) as exc:
        return _engine_error(exc), EXIT_USAGE, digest
    return {"complement": cert.ints(), "trace": trace.to_json(), "warnings": trace.warnings}, EXIT_OK, digest


def _engine_error(exc: engine.EngineError) -> dict:
    trace = exc.trace.to_json() if exc.trace is not None else []
    return {"error": type(exc).__name__, "message": str(exc), "trace": trace}


def cmd_fuglede_scan(args):
    try:
        rep = scan.fuglede_scan(args.n, args.mode, seed=args.seed, samples=args.samples, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = rep.to_json()
    digest = {"n": args.n, "mode": args.mode, "seed": args.seed, "samples": args.samples}
    if rep.violations or rep.t1t2_violations:
        path = Path(args.out) / f"fuglede-scan-{args.n}-{rep.mode}-violations.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(result, sort_keys=True, indent=1))
        result["certificate_file"] = str(path)
        return result, EXIT_VIOLATION, digest
    return result, EXIT_OK, digest


def cmd_hadamard(args):
    try:
        rep = scan.hadamard_pipeline(args.size, args.order)
    except RuntimeError as exc:
        return {"error": str(exc)}, EXIT_CONTRADICTION, {"size": args.size, "order": args.order}
    return rep.to_json(), EXIT_OK, {"size": args.size, "order": args.order}


def cmd_tao(args):
    rep = scan.tao_counterexample()
    result = rep.to_json()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "tao-spectral.json").write_text(json.dumps(
            {"group": [3] * 6, "set": result["set"], "spectrum": result["spectrum"],
             "matrix": result["matrix"]}, indent=1))
        (out / "tao-nontile.json").write_text(json.dumps(
            {"group": [3] * 6, "set": result["set"], "tile": rep.tile, "reason": rep.tile_reason}, indent=1))
    if not (rep.spectral and not rep.tile):
        return result, EXIT_CONTRADICTION, {}
    return result, EXIT_OK, {}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def common_flags(default):
        common = argparse.ArgumentParser(add_help=False, argument_default=default)
        common.add_argument("--json", action="store_true", help="emit the report as JSON")
        common.add_argument("--seed", type=int)
        common.add_argument("--threads", type=int)
        common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
        return common

    # subcommands suppress unset globals so flags before the subcommand survive
    sub_common = common_flags(argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="fuglede", parents=[common_flags(argparse.SUPPRESS)],
                                 description="Spectral sets and tilings in finite abelian groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[sub_common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", cmd_analyze, "full profile of a set")
    sp.add_argument("set", help="JSON file {group, set} or - for stdin")

    sp = add("spectral", cmd_spectral, "decide spectrality")
    sp.add_argument("set")
    sp.add_argument("--enumerate", type=int, default=0, metavar="N", help="list up to N spectra")

    sp = add("tile", cmd_tile, "decide tiling")
    sp.add_argument("set")
    sp.add_argument("--limit", type=int, default=1, help="number of complements to list")

    sp = add("cyclo", cmd_cyclo, "coefficients of a cyclotomic polynomial")
    sp.add_argument("d", type=int)
    sp.add_argument("--mod-p", type=int, default=None, dest="mod_p")

    sp = add("mask", cmd_mask, "mask polynomial and cyclotomic divisibility")
    sp.add_argument("set")
    sp.add_argument("--divides", type=int, default=None, metavar="D")
    sp.add_argument("--mod-p", type=int, default=None, dest="mod_p")

    sp = add("structure", cmd_structure, "cube rule, coset decomposition, p-adic structure")
    sp.add_argument("set")
    sp.add_argument("--cube-rule", action="store_true", default=False, dest="cube_rule")
    sp.add_argument("--decompose", action="store_true", default=False)
    sp.add_argument("--padic", action="store_true", default=False)

    sp = add("theorem", cmd_theorem, "spectral set of Z_{p^2 q^2 r} to tiling complement")
    sp.add_argument("--primes", type=int, nargs=3, required=True, metavar=("P", "Q", "R"))
    sp.add_argument("--set", required=True)
    sp.add_argument("--spectrum", required=True)
    sp.add_argument("--strict", action="store_true", default=False,
                    help="fail on a failed claim instead of using the verified fallbacks")

    sp = add("fuglede-scan", cmd_fuglede_scan, "spectral <=> tile scan over subsets of Z_n")
    sp.add_argument("n", type=int)
    sp.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--out", default=".", help="directory for violation certificates")

    sp = add("hadamard", cmd_hadamard, "log-Hadamard search and its column set")
    sp.add_argument("--size", type=int, default=6)
    sp.add_argument("--order", type=int, default=3)

    sp = add("tao", cmd_tao, "spectral non-tile 6-subset of Z_3^6")
    sp.add_argument("--out", default=None, help="directory for the two certificates")
    return ap


def _defaults(args: argparse.Namespace) -> argparse.Namespace:
    # global flags may appear before or after the subcommand
    for name, value in (("json", False), ("seed", 0), ("threads", 1), ("timing", False)):
        if not hasattr(args, name):
            setattr(args, name, value)
    return args


def _print_human(report: dict) -> None:
    print(f"{report['command']}  (version {report['version']}, input {report['input_digest'][:12]})")
    for key, value in report["result"].items():
        if isinstance(value, (list, dict)):
            value = json.dumps(value)
            if len(value) > 200:
                value = value[:197] + "..."
        print(f"  {key}: {value}")
    if "timing" in report:
        print(f"  timing: {report['timing']}s")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = _defaults(parser.parse_args(argv))
    start = time.perf_counter()
    try:
        result, code, digest_input = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"command": args.command, "input_digest": _digest({"command": args.command, "input": digest_input,
                                                                "seed": args.seed}),
              "result": result, "version": __version__}
    if args.timing:
        report["timing"] = round(time.perf_counter() - start, 6)
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        _print_human(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
