"""Command line interface.

Exit codes: 0 compatible / success, 1 a valid negative answer,
2 bad input or a witness that failed its own verification.
"""
from __future__ import annotations

import argparse
from dataclasses import asdict
import json
import os
import sys

import numpy as np

from . import __version__
from .classical_bridge import ConvQuery, conv_membership, separable_witness, tripartite_necessary
from .errors import MeanFieldError
from .io import dumps, matrix_to_json, pure_to_json, table_to_json, density_from_json
from .linalg import DensityMatrix, Spectrum, partial_trace, reduced_state, spectrum
from .numerics import OrbitProblem, SeededStream, orbit_optimize, random_fixed_spectrum, random_haar_pure
from .numerics.rng import haar_unitaries
from .qubit_array import check_pure_compat_qubits, qubit_margins, result1_slack, witness_pure_qubits
from .spectra import MeanFieldState, margin_vector, majorizes, standard_form
from .tolerances import DEFAULT_TOL
from .two_qubit import (
    TwoQubitQuery,
    check_pure_224,
    inequality_slacks,
    min_trace_fixed_spectrum,
    region_json,
    sup_F_bound,
    two_qubit_violations,
    witness_pure_224,
    witness_two_qubit,
    witness_residuals,
)
from .numerics.orbit import f_functional

OK, NEGATIVE, ERROR = 0, 1, 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# --- argument parsing --------------------------------------------------------

def _load_json_arg(text):
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    return json.loads(text)


def parse_values(text) -> list:
    """Comma list, inline JSON array / {"values": ...}, or a JSON file."""
    text = text.strip()
    if os.path.exists(text) or text[:1] in "[{":
        obj = _load_json_arg(text)
        if isinstance(obj, dict):
            obj = obj["values"]
        return [float(x) for x in obj]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_spectrum(text) -> Spectrum:
    return Spectrum.of(parse_values(text))


def load_density(path, tol) -> DensityMatrix:
    if not os.path.exists(path):
        raise CliError(f"matrix file not found: {path}")
    with open(path) as fh:
        return density_from_json(json.load(fh), tol)


def parse_tol(items):
    tol = DEFAULT_TOL
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--tol expects KEY=VALUE, got {item!r}")
        try:
            tol = tol.with_overrides(**{key.strip(): float(value)})
        except KeyError as e:
            raise CliError(str(e.args[0])) from None
    return tol


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", action="append", metavar="KEY=VALUE",
                        help="tolerance override, e.g. maj=1e-9 (repeatable)")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")

    p = _Parser(prog="meanfield", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="compatibility verdicts")
    csub = check.add_subparsers(dest="sub", required=True)
    c = csub.add_parser("qubits", parents=[common], help="n-qubit pure-state compatibility")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--margins", help="lowest local eigenvalues")
    g.add_argument("--rho", nargs="+", help="one qubit matrix JSON file per party")
    c = csub.add_parser("two-qubit", parents=[common], help="marginals of a fixed-spectrum two-qubit state")
    _two_qubit_args(c)
    c = csub.add_parser("conv", parents=[common], help="marginals of mixtures of a fixed-spectrum orbit")
    _conv_args(c)
    c = csub.add_parser("tripartite", parents=[common], help="pairwise conditions for a tripartite pure state")
    _triple_args(c)

    wit = sub.add_parser("witness", help="build and verify a global state")
    wsub = wit.add_subparsers(dest="sub", required=True)
    w = wsub.add_parser("qubits", parents=[common], help="pure n-qubit state with given margins")
    g = w.add_mutually_exclusive_group(required=True)
    g.add_argument("--margins")
    g.add_argument("--rho", nargs="+")
    _two_qubit_args(wsub.add_parser("two-qubit", parents=[common], help="two-qubit state with given spectrum and margins"))
    _triple_args(wsub.add_parser("pure-224", parents=[common], help="pure 2x2x4 state with given marginals"))
    w = wsub.add_parser("separable", parents=[common], help="mixture of product states with given marginals")
    w.add_argument("--rho-a", required=True)
    w.add_argument("--rho-b", required=True)
    w.add_argument("--lambda", dest="lam", required=True)

    r = sub.add_parser("region", parents=[common], help="feasible (lambda_A, lambda_B) polygon")
    r.add_argument("--spectrum", required=True)

    orc = sub.add_parser("oracle", help="closed forms against numeric search")
    osub = orc.add_subparsers(dest="sub", required=True)
    o = osub.add_parser("info", parents=[common], help="minimum of tr(O eta) over a fixed spectrum")
    o.add_argument("--n", type=int, default=10)
    o.add_argument("--restarts", type=int, default=50)
    o = osub.add_parser("supf", parents=[common], help="maximum of F = |b| - |a| over a fixed spectrum")
    o.add_argument("--n", type=int, default=5)
    o.add_argument("--restarts", type=int, default=50)
    o = osub.add_parser("sample", parents=[common], help="random states never break the inequalities")
    o.add_argument("--n", type=int, default=1000)
    o.add_argument("--qubits", type=int, default=None,
                   help="sample Haar pure states on this many qubits instead of two-qubit mixed states")
    return p


def _two_qubit_args(c):
    c.add_argument("--la", type=float, required=True)
    c.add_argument("--lb", type=float, required=True)
    c.add_argument("--spectrum", required=True)


def _conv_args(c):
    c.add_argument("--spec-a", required=True)
    c.add_argument("--spec-b", required=True)
    c.add_argument("--lambda", dest="lam", required=True)


def _triple_args(c):
    c.add_argument("--rho-a", required=True)
    c.add_argument("--rho-b", required=True)
    c.add_argument("--rho-c", required=True)


# --- commands ----------------------------------------------------------------

def _qubit_margins(args, tol):
    if args.margins is not None:
        return np.array(parse_values(args.margins)), None
    mf = MeanFieldState(tuple(load_density(f, tol) for f in args.rho))
    lam = margin_vector(mf).array()
    return lam, [standard_form(r, tol)[1] for r in mf]


def _qubit_violations(lam, tol):
    s = result1_slack(lam)
    return [
        {"index": i + 1, "inequality": f"lambda_{i + 1} <= sum of the others", "amount": float(-s[i])}
        for i in range(len(s)) if s[i] < -tol.maj
    ]


def _tq_violations(q, tol):
    return [{"index": i, "inequality": text, "amount": amt} for i, text, amt in two_qubit_violations(q, tol)]


def cmd_check(args, tol):
    if args.sub == "qubits":
        lam, _ = _qubit_margins(args, tol)
        ok = check_pure_compat_qubits(lam, tol)
        return ok, {"compatible": ok, "violations": _qubit_violations(lam, tol), "margins": lam.tolist()}
    if args.sub == "two-qubit":
        q = TwoQubitQuery(args.la, args.lb, parse_spectrum(args.spectrum))
        v = _tq_violations(q, tol)
        return not v, {"compatible": not v, "violations": v}
    if args.sub == "conv":
        q = ConvQuery(parse_spectrum(args.spec_a), parse_spectrum(args.spec_b), parse_spectrum(args.lam))
        p = conv_membership(q, tol)
        out = {"compatible": p is not None,
               "violations": [] if p is not None else ["no joint distribution with these marginals is majorized by lambda"]}
        if p is not None:
            out.update(table_to_json(p))
        return p is not None, out
    if args.sub == "tripartite":
        ra, rb, rc = (load_density(f, tol) for f in (args.rho_a, args.rho_b, args.rho_c))
        names = ("(A,B) against eig(C)", "(B,C) against eig(A)", "(C,A) against eig(B)")
        triple = tripartite_necessary(ra, rb, rc, tol)
        out = {"compatible": all(triple), "necessary": list(triple),
               "violations": [n for n, ok in zip(names, triple) if not ok]}
        if (ra.dim, rb.dim, rc.dim) == (2, 2, 4):
            q = TwoQubitQuery(spectrum(ra).values[-1], spectrum(rb).values[-1], spectrum(rc))
            out["pure_224"] = check_pure_224(ra, rb, rc, tol)
            out["pure_224_violations"] = _tq_violations(q, tol)
            out["compatible"] = out["compatible"] and out["pure_224"]
        return out["compatible"], out
    raise CliError(f"unknown check {args.sub}")


def _verify(report, limit):
    worst = max(report.values()) if report else 0.0
    if not worst <= limit:
        raise WitnessFailure(report)
    return report


class WitnessFailure(Exception):
    def __init__(self, report):
        self.report = report
        super().__init__(f"witness failed self-verification: {report}")


def cmd_witness(args, tol):
    if args.sub == "qubits":
        lam, targets = _qubit_margins(args, tol)
        if not check_pure_compat_qubits(lam, tol.with_overrides(maj=max(tol.maj, tol.boundary))):
            return False, {"compatible": False, "violations": _qubit_violations(lam, tol)}
        psi = witness_pure_qubits(lam, targets, tol)
        report = {"margin_residual": float(np.max(np.abs(qubit_margins(psi) - lam)))}
        if targets is not None:
            mats = [load_density(f, tol) for f in args.rho]
            report["marginal_residual"] = max(
                float(np.max(np.abs(reduced_state(psi, [i]).matrix - r.matrix))) for i, r in enumerate(mats)
            )
        _verify(report, 1e-8)
        return True, {"compatible": True, "violations": [], "state": pure_to_json(psi), "report": report}
    if args.sub == "two-qubit":
        q = TwoQubitQuery(args.la, args.lb, parse_spectrum(args.spectrum))
        v = _tq_violations(q, tol.with_overrides(maj=max(tol.maj, tol.boundary)))
        if v:
            return False, {"compatible": False, "violations": v}
        rho, params = witness_two_qubit(q, tol)
        report = _verify(witness_residuals(rho, q), 1e-8)
        return True, {"compatible": True, "violations": [], "state": matrix_to_json(rho),
                      "params": asdict(params), "report": report}
    if args.sub == "pure-224":
        ra, rb, rc = (load_density(f, tol) for f in (args.rho_a, args.rho_b, args.rho_c))
        q = TwoQubitQuery(spectrum(ra).values[-1], spectrum(rb).values[-1], spectrum(rc))
        v = _tq_violations(q, tol.with_overrides(maj=max(tol.maj, tol.boundary)))
        if v:
            return False, {"compatible": False, "violations": v}
        psi = witness_pure_224(ra, rb, rc, tol)
        rho = psi.density()
        report = {f"marginal_{k}": float(np.max(np.abs(partial_trace(rho, [i]).matrix - r.matrix)))
                  for i, (k, r) in enumerate(zip("ABC", (ra, rb, rc)))}
        _verify(report, 1e-7)
        return True, {"compatible": True, "violations": [], "state": pure_to_json(psi), "report": report}
    if args.sub == "separable":
        ra, rb = load_density(args.rho_a, tol), load_density(args.rho_b, tol)
        lam = parse_spectrum(args.lam)
        p = conv_membership(ConvQuery(spectrum(ra), spectrum(rb), lam), tol)
        if p is None:
            return False, {"compatible": False,
                           "violations": ["no joint distribution with these marginals is majorized by lambda"]}
        rho = separable_witness(ra, rb, p)
        report = {
            "marginal_A": float(np.max(np.abs(partial_trace(rho, [0]).matrix - ra.matrix))),
            "marginal_B": float(np.max(np.abs(partial_trace(rho, [1]).matrix - rb.matrix))),
            "spectrum_vs_table": float(np.max(np.abs(spectrum(rho).array() - np.sort(p.table.ravel())[::-1]))),
        }
        _verify(report, 1e-8)
        if not majorizes(spectrum(rho).array(), lam.array(), tol.with_overrides(maj=1e-9)):
            raise WitnessFailure({"majorized_by_lambda": False})
        return True, {"compatible": True, "violations": [], "state": matrix_to_json(rho),
                      **table_to_json(p), "report": report}
    raise CliError(f"unknown witness {args.sub}")


def _random_spectrum(gen, d=4):
    return np.sort(gen.dirichlet(np.ones(d)))[::-1]


def cmd_oracle(args, tol):
    stream = SeededStream(args.seed)
    gen = stream.generator
    rows = []
    if args.sub == "info":
        for k in range(args.n):
            lam = _random_spectrum(gen)
            o_eigs = np.sort(gen.normal(size=4))[::-1]
            u = haar_unitaries(gen, 4, 1)[0]
            op = (u * o_eigs) @ u.conj().T
            cf = min_trace_fixed_spectrum(o_eigs, lam)
            res = orbit_optimize(OrbitProblem(lam, op, "trace", "minimize"), args.restarts, stream.spawn(k))
            rows.append({"lambda": lam, "O_eigs": o_eigs, "closed_form": cf,
                         "optimizer": res.value, "delta": res.value - cf})
        ok = all(abs(r["delta"]) <= 1e-4 and r["delta"] >= -1e-6 for r in rows)
    elif args.sub == "supf":
        for k in range(args.n):
            lam = _random_spectrum(gen)
            bound = sup_F_bound(lam)
            res = orbit_optimize(OrbitProblem(lam, None, "F", "maximize"), args.restarts, stream.spawn(k))
            rho, _ = witness_two_qubit(TwoQubitQuery(0.5, 0.5 - bound / 2, lam), tol)
            rows.append({"lambda": lam, "bound": bound, "optimizer": res.value,
                         "delta": res.value - bound, "vertex_A_F": float(f_functional(rho.matrix))})
        ok = all(r["delta"] <= 1e-6 and abs(r["vertex_A_F"] - r["bound"]) <= 1e-6 for r in rows)
    elif args.sub == "sample":
        if args.qubits is None:
            lam = _random_spectrum(gen)
            worst = -np.inf
            for k in range(args.n):
                eta = random_fixed_spectrum(lam, stream.spawn(k), dims=(2, 2))
                la = spectrum(partial_trace(eta, [0])).values[-1]
                lb = spectrum(partial_trace(eta, [1])).values[-1]
                worst = max(worst, float(-inequality_slacks(la, lb, lam).min()))
            rows.append({"lambda": lam, "samples": args.n, "worst_violation": worst})
        else:
            worst = -np.inf
            for k in range(args.n):
                psi = random_haar_pure((2,) * args.qubits, stream.spawn(k))
                worst = max(worst, float(-result1_slack(qubit_margins(psi)).min()))
            rows.append({"qubits": args.qubits, "samples": args.n, "worst_violation": worst})
        ok = all(r["worst_violation"] <= 1e-9 for r in rows)
    else:
        raise CliError(f"unknown oracle {args.sub}")
    return ok, {"ok": ok, "seed": args.seed, "results": rows}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help / --version
        return OK if e.code == 0 else ERROR
    except CliError as e:
        _error("UsageError", str(e))
        return ERROR
    try:
        tol = parse_tol(args.tol)
        if args.command == "check":
            ok, out = cmd_check(args, tol)
        elif args.command == "witness":
            ok, out = cmd_witness(args, tol)
        elif args.command == "region":
            ok, out = True, region_json(parse_spectrum(args.spectrum))
        else:
            ok, out = cmd_oracle(args, tol)
    except WitnessFailure as e:
        _error("WitnessFailure", str(e), e.report)
        return ERROR
    except (MeanFieldError, CliError, ValueError, KeyError, OSError) as e:
        _error(type(e).__name__, str(e))
        return ERROR
    text = dumps(out)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return OK if ok else NEGATIVE


def _error(kind, message, detail=None):
    err = {"error": kind, "message": message}
    if detail is not None:
        err["detail"] = detail
    sys.stderr.write(dumps(err) + "\n")


def main():
    sys.exit(run())
