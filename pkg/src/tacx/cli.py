"""Command-line front door: stable exit codes and JSON reports for scripting.

Exit codes: 0 when every check in the report holds, 1 when a mathematical
check fails (a verdict is false, a search comes back empty, a construction
hypothesis is violated), 2 for unusable input or usage errors.  Reports
carry the field prime, input hashes and the tool version, and identical
invocations produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import ShortAlgebra, derive_r0, verify_truncation
from .complexes import (
    ComplexError,
    LinearMatrix,
    NormalizeError,
    PeriodicComplex,
    TokenStream,
    _parse_matrix_tokens,
    condition8_check,
    exactness_summary,
    is_complex,
    is_totally_acyclic,
    load_complex,
    normalize,
    parse_complex_file,
    serialize_complex,
)
from .csum import (
    AssembleError,
    InvariantViolation,
    assemble,
    build_connected_sum,
    direct_sum_copies,
    gorenstein_crosscheck,
    mainresult_crosscheck,
)
from .doubling import (
    DoublingError,
    SocleDecomposition,
    build_doubled,
    decomposition_from_quadric,
    search_alpha,
    verify_doubled,
)
from .ezd import EzdError, SearchBudgetError, ezd_complex, search_ezd_exhaustive, search_ezd_random, verify_ezd
from .graphs import GraphHypothesisError, build_from_graph, intersection_dimension, no_ezd_spotcheck
from .linalg import DEFAULT_PRIME, FieldError, PrimeField
from .presentation import (
    InvalidPresentation,
    ParseError,
    load_graph,
    load_ring,
    report_text,
    serialize_ring,
    sha256_of,
    tokenize,
    write_report,
)


class MathCheckFailure(Exception):
    """Raised by handlers when the computation itself says no."""


def fixtures_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def _base_report(args, command: str, inputs: list) -> dict:
    return {
        "tool": "tacx",
        "version": __version__,
        "command": command,
        "prime": args.prime if args.prime is not None else DEFAULT_PRIME,
        "inputs": {str(p): sha256_of(p) for p in inputs},
    }


def _load_ring_arg(path, prime):
    pres = load_ring(path, prime=prime)
    return pres


def _element_texts(algebra, matrix: LinearMatrix):
    return [
        [algebra.element_text(matrix.entry(i, j)) for j in range(matrix.cols)]
        for i in range(matrix.rows)
    ]


# ---------------------------------------------------------------------------
# handlers (each returns a report dict with a "checks" sub-dict)
# ---------------------------------------------------------------------------

def cmd_ring_info(args) -> dict:
    pres = _load_ring_arg(args.ring, args.prime)
    alg = ShortAlgebra(pres)
    report = _base_report(args, "ring info", [args.ring])
    report["prime"] = pres.prime
    yos = alg.yoshino_check()
    trunc = verify_truncation(pres)
    report.update(
        {
            "variables": list(pres.variables),
            "num_quadrics": len(pres.quadrics),
            "dim1": alg.n,
            "dim2": alg.d,
            "socle_dimension": alg.socle_dimension(),
            "gorenstein": alg.is_gorenstein(),
            "yoshino": yos,
            "yoshino_b": yos["dim_condition"],
            "truncation_faithful": trunc,
        }
    )
    report["checks"] = {"truncation_faithful": trunc, "yoshino_b": yos["dim_condition"]}
    return report


def cmd_ezd_search(args) -> dict:
    pres = _load_ring_arg(args.ring, args.prime)
    report = _base_report(args, "ezd search", [args.ring])
    prime = args.proxy_prime if args.proxy_prime else pres.prime
    if args.proxy_prime:
        pres = pres.with_prime(args.proxy_prime)
    alg = ShortAlgebra(pres)
    report["prime"] = prime
    report["proxy_prime"] = args.proxy_prime
    if args.exhaustive:
        pairs = search_ezd_exhaustive(alg, budget=args.budget, force=args.force_budget)
        report["mode"] = "exhaustive"
        report["pairs"] = [
            {"a": alg.element_text(p.a), "b": alg.element_text(p.b)} for p in pairs
        ]
        report["count"] = len(pairs)
        found = bool(pairs)
    else:
        report["mode"] = "random"
        report["trials"] = args.trials
        report["seed"] = args.seed
        pair = search_ezd_random(alg, args.trials, seed=args.seed)
        report["pairs"] = (
            [{"a": alg.element_text(pair.a), "b": alg.element_text(pair.b)}] if pair else []
        )
        report["count"] = len(report["pairs"])
        found = pair is not None
    report["checks"] = {"found": found}
    if not found:
        report["message"] = "no exact zero divisors found"
    return report


def cmd_ezd_verify(args) -> dict:
    pres = _load_ring_arg(args.ring, args.prime)
    alg = ShortAlgebra(pres)
    a = alg.element_from_expr(args.a)
    b = alg.element_from_expr(args.b)
    ok = verify_ezd(alg, a, b)
    report = _base_report(args, "ezd verify", [args.ring])
    report["prime"] = pres.prime
    report.update({"a": alg.element_text(a), "b": alg.element_text(b), "ezd": ok})
    report["checks"] = {"ezd": ok}
    return report


def _prepare_pair(args):
    p1 = _load_ring_arg(args.ring1, args.prime)
    p2 = _load_ring_arg(args.ring2, args.prime)
    if p1.distinguished is None or p2.distinguished is None:
        raise ParseError("both ring files need a [distinguished] section for gluing")
    if set(p1.variables) & set(p2.variables):
        raise ParseError("ring files share variable names; rename one side")
    return p1, p2


def cmd_csum_build(args) -> dict:
    p1, p2 = _prepare_pair(args)
    cs = build_connected_sum(p1, p2)
    report = _base_report(args, "csum build", [args.ring1, args.ring2])
    report["prime"] = p1.prime
    gor = gorenstein_crosscheck(cs)
    report.update(
        {
            "dim1": cs.R.n,
            "dim2": cs.R.d,
            "delta": cs.R.element_text(cs.delta),
            "glue_index": cs.glue_index(),
            "gorenstein": gor,
            "gor_R1": cs.R1.is_gorenstein(),
            "gor_S1": cs.S1.is_gorenstein(),
            "yoshino_b": cs.R.yoshino_check()["dim_condition"],
        }
    )
    if args.output:
        Path(args.output).write_text(serialize_ring(cs.R.presentation))
        report["written"] = str(args.output)
    report["checks"] = {"built": True, "gorenstein_consistent": gor["consistent"]}
    return report


def cmd_csum_check(args) -> dict:
    report = cmd_csum_build(args)
    report["command"] = "csum check"
    return report


def cmd_complex_verify(args) -> dict:
    cpx = load_complex(args.complex, prime=args.prime)
    report = _base_report(args, "complex verify", [args.complex])
    report["prime"] = cpx.algebra.p
    report["period"] = cpx.period
    report["ranks"] = cpx.ranks()
    ok_complex = is_complex(cpx)
    report["is_complex"] = ok_complex
    if ok_complex:
        exact = exactness_summary(cpx)
        tot = is_totally_acyclic(cpx)
        report["exact_at"] = {str(k): v for k, v in exact.items()}
        report["totally_acyclic"] = tot
        report["checks"] = {
            "is_complex": True,
            "exact_everywhere": all(exact.values()),
            "totally_acyclic": tot,
        }
    else:
        report["checks"] = {"is_complex": False}
    return report


def cmd_complex_normalize(args) -> dict:
    from .complexes import load_complex_bundle

    bundle = load_complex_bundle(args.complex, prime=args.prime)
    report = _base_report(args, "complex normalize", [args.complex])
    report["prime"] = bundle.ring.prime
    if bundle.ring.distinguished is None:
        raise ParseError("the ambient ring needs a [distinguished] section to normalize")
    r0 = derive_r0(bundle.ring)
    f = r0.quadric_element(bundle.ring.distinguished_quadric())
    result = normalize(bundle.complex, r0, f, window_length=args.window)
    periodic = isinstance(result, PeriodicComplex)
    report["normalized"] = True
    report["periodic"] = periodic
    report["window_length"] = args.window
    if periodic and args.out_cx:
        Path(args.out_cx).write_text(serialize_complex(result, bundle.ring_ref))
        report["written"] = str(args.out_cx)
    elif args.out_cx:
        report["written"] = None
        report["message"] = "result is a finite window, not serialized as a periodic file"
    report["checks"] = {"normalized": True}
    return report


def cmd_complex_assemble(args) -> dict:
    from .complexes import load_complex_bundle

    ba = load_complex_bundle(args.a_complex, prime=args.prime)
    bb = load_complex_bundle(args.b_complex, prime=args.prime)
    if ba.ring.distinguished is None or bb.ring.distinguished is None:
        raise ParseError("both ambient rings need [distinguished] sections for assembly")
    cs = build_connected_sum(ba.ring, bb.ring)
    a_side, b_side = ba.complex, bb.complex
    ra = {m.rows for m in a_side.maps}
    rb = {m.rows for m in b_side.maps}
    if len(ra) == 1 and len(rb) == 1 and ra != rb:
        target = math.lcm(ra.pop(), rb.pop())
        a_side = direct_sum_copies(a_side, target // a_side.maps[0].rows)
        b_side = direct_sum_copies(b_side, target // b_side.maps[0].rows)
    asm = assemble(cs, a_side, b_side, auto_sign=args.auto_sign)
    tot = is_totally_acyclic(asm)
    report = _base_report(args, "complex assemble", [args.a_complex, args.b_complex])
    report["prime"] = cs.R.p
    report.update(
        {
            "ranks": asm.ranks(),
            "auto_sign": args.auto_sign,
            "sign_pattern": [1 if k % 2 == 0 else -1 for k in range(asm.period)]
            if args.auto_sign
            else [1] * asm.period,
            "totally_acyclic": tot,
        }
    )
    if args.out_prefix:
        ring_path = Path(str(args.out_prefix) + ".ring")
        cx_path = Path(str(args.out_prefix) + ".cx")
        ring_path.write_text(serialize_ring(cs.R.presentation))
        cx_path.write_text(serialize_complex(asm, ring_path.name))
        report["written"] = [str(ring_path), str(cx_path)]
    report["checks"] = {"assembled": True, "totally_acyclic": tot}
    return report


def _parse_matrix_arg(text: str, algebra: ShortAlgebra) -> LinearMatrix:
    stripped = text.strip()
    if stripped.startswith("["):
        ts = TokenStream(tokenize(stripped))
        mat = _parse_matrix_tokens(ts, algebra, {})
        if not ts.done():
            raise ParseError("trailing input after matrix literal")
        return mat
    e = algebra.element_from_expr(stripped)
    if e.c0 or e.v2.any():
        raise ParseError("matrix entries must be linear")
    return LinearMatrix(algebra, e.v1.reshape(1, 1, -1))


def _parse_dec_arg(text: str, r0: ShortAlgebra) -> SocleDecomposition:
    pairs = []
    for chunk in re.split(r";", text):
        chunk = chunk.strip()
        m = re.fullmatch(r"\(([^,()]+),([^,()]+)\)", chunk)
        if not m:
            raise ParseError(f"bad decomposition chunk {chunk!r}; expected (expr,expr)")
        y = r0.element_from_expr(m.group(1).strip())
        z = r0.element_from_expr(m.group(2).strip())
        pairs.append((y, z))
    return SocleDecomposition(tuple(pairs))


def cmd_double(args) -> dict:
    pres = _load_ring_arg(args.ring, args.prime)
    if pres.distinguished is None:
        raise ParseError("the ring file needs a [distinguished] section")
    r1 = ShortAlgebra(pres)
    r0 = derive_r0(pres)
    f = r0.quadric_element(pres.distinguished_quadric())
    x = _parse_matrix_arg(args.x, r1)
    w = _parse_matrix_arg(args.w, r1)
    dec = (
        _parse_dec_arg(args.dec, r0)
        if args.dec
        else decomposition_from_quadric(r0, pres.distinguished_quadric())
    )
    report = _base_report(args, f"double {args.mode}", [args.ring])
    report["prime"] = pres.prime
    if args.mode == "search":
        hit = search_alpha(r1, r0, f, x, w, dec)
        if hit is None:
            report["alpha"] = None
            report["message"] = (
                "no alpha in 1..p-1 passes all checks; retry over a larger prime "
                "(the generic parameter has more room there)"
            )
            report["checks"] = {"found_alpha": False}
            return report
        alpha, pair = hit
    else:
        alpha = args.alpha
        pair = build_doubled(r0, x, w, f, dec, alpha)
    verdicts = verify_doubled(r1, r0, f, pair)
    report.update(
        {
            "alpha": alpha,
            "zero_block": pair.v,
            "size": pair.size,
            "a_matrix": _element_texts(r0, pair.a_tilde),
            "b_matrix": _element_texts(r0, pair.b_tilde),
            "verdicts": verdicts,
        }
    )
    report["checks"] = dict(verdicts)
    if args.mode == "search":
        report["checks"]["found_alpha"] = True
    return report


def cmd_graph_import(args) -> dict:
    graph = load_graph(args.graph)
    prime = args.prime if args.prime is not None else DEFAULT_PRIME
    data = build_from_graph(graph, prime=prime)
    alg = data.algebra
    report = _base_report(args, "graph import", [args.graph])
    report["prime"] = prime
    names = data.presentation.variables
    spot = None
    if args.spotcheck:
        spot = no_ezd_spotcheck(data, proxy_prime=args.proxy_prime or 3)
    report.update(
        {
            "variables": list(names),
            "dim1": alg.n,
            "dim2": alg.d,
            "components": {
                "A": [names[i] for i in data.components[0]],
                "B": [names[i] for i in data.components[1]],
            },
            "f": alg.element_text(data.f),
            "g": alg.element_text(data.g),
            "delta": alg.element_text(data.delta),
            "yoshino": alg.yoshino_check(),
            "intersection_dimension": intersection_dimension(
                alg, data.components[0], data.components[1]
            ),
            "no_ezd_spotcheck": spot,
        }
    )
    if args.output:
        Path(args.output).write_text(serialize_ring(data.presentation))
        report["written"] = str(args.output)
    report["checks"] = {
        "hypotheses": True,
        "truncation_faithful": True,
        "delta_nonzero": not data.delta.is_zero(),
        "intersection_is_line": report["intersection_dimension"] == 1,
    }
    if spot is not None:
        report["checks"]["no_ezd_spotcheck"] = spot
    return report


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tacx",
        description="verify totally acyclic complexes over short graded algebras",
    )
    parser.add_argument("--prime", type=int, default=None,
                        help="field prime override (default: file [field] or "
                             f"{DEFAULT_PRIME}; env TACX_PRIME)")
    parser.add_argument("--out", type=Path, default=None, help="write the JSON report here")
    sub = parser.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring", help="single-ring inspection").add_subparsers(
        dest="sub", required=True
    )
    p = ring.add_parser("info", help="dims, socle, Gorenstein, Yoshino, truncation")
    p.add_argument("ring")
    p.set_defaults(handler=cmd_ring_info)

    ezd = sub.add_parser("ezd", help="exact zero divisors").add_subparsers(
        dest="sub", required=True
    )
    p = ezd.add_parser("search", help="search for linear exact zero divisor pairs")
    p.add_argument("ring")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--proxy-prime", type=int, default=None)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--force-budget", action="store_true")
    p.set_defaults(handler=cmd_ezd_search)
    p = ezd.add_parser("verify", help="verify one candidate pair")
    p.add_argument("ring")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(handler=cmd_ezd_verify)

    csum = sub.add_parser("csum", help="connected sums").add_subparsers(
        dest="sub", required=True
    )
    p = csum.add_parser("build", help="glue two rings and write the result")
    p.add_argument("ring1")
    p.add_argument("ring2")
    p.add_argument("-o", "--output", type=Path, default=None)
    p.set_defaults(handler=cmd_csum_build)
    p = csum.add_parser("check", help="build and cross-check without writing")
    p.add_argument("ring1")
    p.add_argument("ring2")
    p.set_defaults(handler=cmd_csum_check, output=None)

    cpx = sub.add_parser("complex", help="complex verification").add_subparsers(
        dest="sub", required=True
    )
    p = cpx.add_parser("verify", help="complex, exactness and total acyclicity")
    p.add_argument("complex")
    p.set_defaults(handler=cmd_complex_verify)
    p = cpx.add_parser("normalize", help="rescale composites to f times identity")
    p.add_argument("complex")
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--out-cx", type=Path, default=None)
    p.set_defaults(handler=cmd_complex_normalize)
    p = cpx.add_parser("assemble", help="splice two factor complexes over the glued ring")
    p.add_argument("a_complex")
    p.add_argument("b_complex")
    p.add_argument("--auto-sign", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("-o", "--out-prefix", default=None)
    p.set_defaults(handler=cmd_complex_assemble)

    dbl = sub.add_parser("double", help="rank-doubling construction").add_subparsers(
        dest="sub", required=True
    )
    for mode in ("build", "search"):
        p = dbl.add_parser(mode)
        p.add_argument("--ring", required=True)
        p.add_argument("--x", required=True, help="matrix literal or linear expression")
        p.add_argument("--w", required=True)
        p.add_argument("--dec", default=None, help='decomposition "(y1,z1);(y2,z2)"')
        if mode == "build":
            p.add_argument("--alpha", type=int, default=1)
        p.set_defaults(handler=cmd_double, mode=mode)

    gr = sub.add_parser("graph", help="graph-derived rings").add_subparsers(
        dest="sub", required=True
    )
    p = gr.add_parser("import", help="build the ring of a bipartite graph")
    p.add_argument("graph")
    p.add_argument("-o", "--output", type=Path, default=None)
    p.add_argument("--spotcheck", action="store_true", help="run the exhaustive no-EZD check")
    p.add_argument("--proxy-prime", type=int, default=None)
    p.set_defaults(handler=cmd_graph_import)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.prime is None and os.environ.get("TACX_PRIME"):
        args.prime = int(os.environ["TACX_PRIME"])
    try:
        if args.prime is not None:
            PrimeField(args.prime)
        report = args.handler(args)
    except (ParseError, FileNotFoundError, FieldError, IsADirectoryError) as e:
        print(f"tacx: error: {e}", file=sys.stderr)
        return 2
    except (
        NormalizeError,
        AssembleError,
        DoublingError,
        EzdError,
        GraphHypothesisError,
        SearchBudgetError,
        InvalidPresentation,
        ComplexError,
        InvariantViolation,
    ) as e:
        print(f"tacx: check failed: {e}", file=sys.stderr)
        return 1
    print(report_text(report))
    if args.out:
        write_report(report, args.out)
    return 0 if all(bool(v) for v in report.get("checks", {}).values()) else 1


if __name__ == "__main__":
    sys.exit(main())
