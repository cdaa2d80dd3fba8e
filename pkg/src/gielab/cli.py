"""Command-line front door: machine-readable verification reports.

Subcommands: verify-lemma, ledger, flag, emt-audit, sweep.  Every run
emits a JSON report (schema "1") and exits 0 on pass, 1 on a verified
violation, and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from . import emt, gie
from .errors import InputError, VerificationError

SCHEMA = "1"

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_INVALID = 2


def _report(command, inputs, results, verdict, started):
    return {
        "schema": SCHEMA,
        "command": command,
        "inputs": inputs,
        "results": results,
        "verdict": verdict,
        "wall_time_s": round(time.monotonic() - started, 6),
    }


def _emit(report, output):
    text = json.dumps(report, indent=2, default=str)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_psi_arg(args):
    if args.psi:
        with open(args.psi) as fh:
            doc = json.load(fh)
        psi = gie.load_psi(doc)
        psi, _ = gie.normalize_psi(psi)
        return psi, {"psi_file": args.psi}
    if args.random_psi is not None:
        rng = random.Random(args.random_psi)
        psi = gie.random_normalized_psi(args.n, args.m, rng)
        return psi, {"random_psi_seed": args.random_psi}
    raise InputError("provide either --psi FILE or --random-psi SEED")


def _lemma_results(psi, kappa):
    """Run the pre-image pipeline and report its three exact contracts."""
    H = gie.construct_preimage(psi, kappa)
    residuals = gie.cartan_identity_residual(H, psi)
    gauss = gie.gauss_map(H)
    cert = gie.jacobian_rank_certificate(H, psi)
    results = {
        "cartan_identity_residuals": [str(r) for r in residuals],
        "gauss_map_zero": gauss.is_zero(),
        "jacobian_rank": cert.rank,
        "jacobian_rank_expected": cert.expected,
        "value_kind": "exact",
    }
    if cert.failed_level:
        results["failed_block_level"] = list(cert.failed_level)
    ok = (all(not r for r in residuals) and gauss.is_zero() and cert.full)
    return results, ok


def cmd_verify_lemma(args, started):
    psi, echo = _load_psi_arg(args)
    inputs = {"n": args.n, "m": args.m, "kappa": args.kappa, **echo}
    if args.kappa < (args.n - 1) * (args.m - 1):
        raise InputError(
            f"kappa = {args.kappa} below the minimum (n-1)(m-1) = "
            f"{(args.n - 1) * (args.m - 1)}")
    results, ok = _lemma_results(psi, args.kappa)
    verdict = "pass" if ok else "violation"
    return _report("verify-lemma", inputs, results, verdict, started)


def cmd_ledger(args, started):
    inputs = {"n": args.n, "m": args.m, "kappa": args.kappa}
    ledger = gie.dimension_ledger(args.n, args.m, args.kappa)
    results = {
        "dim_sigma": ledger.dim_sigma,
        "dim_hset": ledger.dim_hset,
        "dim_z": ledger.dim_z,
        "dim_k": ledger.dim_k,
        "codim_v": ledger.codim_v,
        "characters": ledger.characters,
        "character_sum": ledger.character_sum,
        "min_kappa": ledger.min_kappa,
        "value_kind": "exact",
    }
    verdict = "pass" if ledger.character_sum == ledger.codim_v else "violation"
    return _report("ledger", inputs, results, verdict, started)


def cmd_flag(args, started):
    psi, echo = _load_psi_arg(args)
    inputs = {"n": args.n, "m": args.m, "kappa": args.kappa, **echo}
    H = gie.construct_preimage(psi, args.kappa)
    element = gie.build_integral_flag(psi, H)  # raises on a violated contract
    report = gie.gie_cartan_report(psi, H)
    results = {
        "flag_dimension": element.dimension,
        "integral": True,
        "volume_form_value": "1",
        "characters": report.characters,
        "character_sum": report.character_sum,
        "observed_codimension": report.observed_codimension,
        "cartan_test": report.verdict,
        "value_kind": "exact",
    }
    verdict = "pass" if report.verdict == "ordinary" else "violation"
    return _report("flag", inputs, results, verdict, started)


def cmd_emt_audit(args, started):
    with open(args.input) as fh:
        doc = json.load(fh)
    chart, tensor = emt.load_chart(doc)
    inputs = {"input": args.input, "backend": args.backend, "m": chart.m}
    report = emt.verify_equivalence(tensor, chart, backend=args.backend)
    results = report.as_dict()
    verdict = "pass" if report.identity_holds else "violation"
    return _report("emt-audit", inputs, results, verdict, started)


def _parse_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_sweep(args, started):
    n_range = _parse_range(args.n_range)
    m_range = _parse_range(args.m_range)
    inputs = {"n_range": args.n_range, "m_range": args.m_range,
              "seeds": args.seeds, "inject_corrupt": args.inject_corrupt}
    cells = []
    violations = 0
    for n in n_range:
        for m in m_range:
            kappa = (n - 1) * (m - 1)
            for seed in range(args.seeds):
                rng = random.Random(1000 * n + 100 * m + seed)
                psi = gie.random_normalized_psi(n, m, rng)
                results, ok = _lemma_results(psi, kappa)
                if not ok:
                    violations += 1
                cells.append({"n": n, "m": m, "kappa": kappa, "seed": seed,
                              "pass": ok, "rank": results["jacobian_rank"]})
    if args.inject_corrupt:
        n, m = 3, 2
        rng = random.Random(0)
        psi = gie.random_normalized_psi(n, m, rng)
        H = gie.construct_preimage(psi, (n - 1) * (m - 1))
        for a in range(1, H.kappa + 1):
            H.set(a, 2, 1, H[a, 1, 1])  # force H_21 = H_11
        cert = gie.jacobian_rank_certificate(H, psi)
        cells.append({"n": n, "m": m, "kappa": H.kappa, "seed": "corrupt",
                      "pass": cert.full, "rank": cert.rank,
                      "failed_block_level": list(cert.failed_level or ())})
        if not cert.full:
            violations += 1
    results = {"cells": cells, "violations": violations,
               "total": len(cells), "value_kind": "exact"}
    if not cells:
        results["warning"] = "empty sweep range: pass vacuously"
    verdict = "pass" if violations == 0 else "violation"
    return _report("sweep", inputs, results, verdict, started)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gielab",
        description="Exact verification pipelines for the isometric-embedding "
                    "conservation-law construction")
    parser.add_argument("--output", help="write the JSON report to a file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_psi_args(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--kappa", type=int, required=True)
        p.add_argument("--psi", help="psi-data JSON file")
        p.add_argument("--random-psi", type=int, default=None, metavar="SEED",
                       help="generate seeded random normalized psi")

    p = sub.add_parser("verify-lemma", help="pre-image, residual, and rank checks")
    add_psi_args(p)
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("ledger", help="dimension ledger and character sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--kappa", type=int, required=True)
    p.set_defaults(func=cmd_ledger)

    p = sub.add_parser("flag", help="build and verify the integral flag")
    add_psi_args(p)
    p.set_defaults(func=cmd_flag)

    p = sub.add_parser("emt-audit", help="energy-momentum equivalence audit")
    p.add_argument("--input", required=True, help="metric/tensor JSON file")
    p.add_argument("--backend", choices=["exact", "numeric"], default="exact")
    p.set_defaults(func=cmd_emt_audit)

    p = sub.add_parser("sweep", help="grid sweep over the lemma pipeline")
    p.add_argument("--n-range", default="2..5")
    p.add_argument("--m-range", default="2..5")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--inject-corrupt", action="store_true",
                   help="also run a deliberately corrupted H instance")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        report = args.func(args, started)
    except InputError as exc:
        report = _report(args.command, {}, {"error": str(exc)},
                         "invalid-input", started)
        _emit(report, args.output)
        return EXIT_INVALID
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        report = _report(args.command, {}, {"error": str(exc)},
                         "invalid-input", started)
        _emit(report, args.output)
        return EXIT_INVALID
    except VerificationError as exc:
        report = _report(args.command, {}, {"error": str(exc)},
                         "violation", started)
        _emit(report, args.output)
        return EXIT_VIOLATION
    _emit(report, args.output)
    if report["verdict"] == "pass":
        return EXIT_PASS
    if report["verdict"] == "invalid-input":
        return EXIT_INVALID
    return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
