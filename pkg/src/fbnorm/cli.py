"""``fbnorm`` command line.

Every subcommand prints a JSON run report on stdout.  Exit codes: 0 success,
1 usage, 2 data validation, 3 numerical-accuracy gate, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import __version__, euler_quad
from .bench import DEFAULT_P_LIST, format_bench_csv, run_bench
from .errors import FBError, StagnationError
from .io import (SCHEMA_VERSION, format_csv, load_params, project_to_sphere, read_data_csv,
                 to_jsonable, write_atomic)
from .mle import FitConfig, OPTIMIZERS, fit, sufficient_stats
from .normconst import IMAG_RESIDUAL_GATE, log_norm_const_grad, norm_const
from .sampler import DEFAULT_MAX_TRIES, sample_fb
from .verify import TABLE_TOL, run_verify

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ACCURACY, EXIT_NONCONVERGED = 0, 1, 2, 3, 4

log = logging.getLogger("fbnorm")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _distance(text):
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number or 'auto', got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError("contour distance must be positive")
    return value


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _quad_flags(parser, d_default="auto"):
    parser.add_argument("--n-points", type=int, default=euler_quad.DEFAULT_N)
    parser.add_argument("--omega-d", type=float, default=euler_quad.DEFAULT_OMEGA_D)
    parser.add_argument("--omega-u", type=float, default=euler_quad.DEFAULT_OMEGA_U)
    parser.add_argument("--d", type=_distance, default=_distance(d_default),
                        help=f"contour distance, or 'auto' (default {d_default})")


def _quad(args):
    return {"n_points": args.n_points, "omega_d": args.omega_d, "omega_u": args.omega_u, "d": args.d}


def build_parser():
    parser = _Parser(prog="fbnorm", description="Fisher-Bingham normalizing constants, fitting and sampling.")
    parser.add_argument("--version", action="version", version=f"fbnorm {__version__}")
    parser.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("normconst", help="normalizing constant of a parameter file")
    p.add_argument("param_file", help="parameter JSON ('-' for stdin)")
    _quad_flags(p)
    p.add_argument("--log-only", action="store_true", help="report only log C")

    p = sub.add_parser("grad", help="normalizing constant and its gradient")
    p.add_argument("param_file")
    _quad_flags(p)

    p = sub.add_parser("fit", help="maximum-likelihood fit of unit vectors in a CSV file")
    p.add_argument("data_csv")
    p.add_argument("--optimizer", choices=OPTIMIZERS, default="gradient_descent")
    p.add_argument("--max-iter", type=int, default=FitConfig.max_iter)
    p.add_argument("--tol", type=float, default=FitConfig.grad_tol, help="gradient sup-norm tolerance")
    p.add_argument("--optimize-frame", action="store_true")
    p.add_argument("--init-file", help="parameter JSON with the starting theta/gamma")
    _quad_flags(p)

    p = sub.add_parser("sample", help="rejection sampling to CSV")
    p.add_argument("param_file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "--out-csv", dest="out_csv", required=True)
    p.add_argument("--max-tries", type=int, default=DEFAULT_MAX_TRIES)
    p.add_argument("--simple-envelope", action="store_true",
                   help="use -min(theta) + |gamma| instead of the exact maximum")

    p = sub.add_parser("verify", help="reproduce the reference tables and oracle checks")
    _quad_flags(p, d_default=str(euler_quad.DEFAULT_D))
    p.add_argument("--tol", type=float, default=TABLE_TOL)

    p = sub.add_parser("bench", help="time the normalizing constant across dimensions")
    p.add_argument("--p-list", type=_int_list, default=list(DEFAULT_P_LIST))
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", dest="out_csv", help="write 'p,median_ms' here (stdout report always)")
    _quad_flags(p)
    return parser


def _normconst(args):
    frame = load_params(args.param_file)
    res = norm_const(frame.canonical, **_quad(args))
    out = {"log_value": res.log_value + frame.log_scale, "imag_residual": res.imag_residual}
    if not args.log_only:
        out["value"] = None if res.value is None else res.value * float(np.exp(frame.log_scale))
    out["quadrature"] = res.quad.to_dict()
    return _inputs(args, frame), out, EXIT_OK


def _grad(args):
    frame = load_params(args.param_file)
    g = log_norm_const_grad(frame.canonical, **_quad(args))
    out = {
        "log_value": g.log_value,
        "value": float(np.exp(g.log_value)),
        "dtheta": g.dtheta,
        "dgamma": g.dgamma,
        "dlog_theta": g.dlog_theta,
        "dlog_gamma": g.dlog_gamma,
        "imag_residual": g.imag_residual,
    }
    return _inputs(args, frame), out, EXIT_OK


def _inputs(args, frame):
    return {
        "param_file": args.param_file,
        "theta": frame.canonical.theta,
        "gamma": frame.canonical.gamma,
        "orthogonal": frame.orthogonal,
        "quadrature_flags": _quad(args),
    }


def _fit(args):
    X = project_to_sphere(read_data_csv(args.data_csv))
    init = {}
    if args.init_file:
        frame = load_params(args.init_file)
        init = {"init_theta": frame.canonical.theta, "init_gamma": frame.canonical.gamma}
        if frame.canonical.p != X.shape[1]:
            raise UsageError(f"init file has p={frame.canonical.p}, data has p={X.shape[1]}")
        if not np.allclose(frame.orthogonal, np.eye(frame.canonical.p)):
            init["init_O"] = frame.orthogonal
    config = FitConfig(max_iter=args.max_iter, grad_tol=args.tol, optimizer=args.optimizer,
                       optimize_frame=args.optimize_frame, **init, **_quad(args))
    inputs = {"data_csv": args.data_csv, "n": X.shape[0], "p": X.shape[1],
              "optimizer": args.optimizer, "max_iter": args.max_iter, "tol": args.tol,
              "optimize_frame": args.optimize_frame, "init_file": args.init_file}
    try:
        result = fit(sufficient_stats(X), config)
    except StagnationError as exc:
        log.error("%s", exc)
        return inputs, {**exc.result.to_dict(), "error": str(exc)}, EXIT_NONCONVERGED
    code = EXIT_OK if result.converged else EXIT_NONCONVERGED
    if not result.converged:
        log.error("no convergence after %d iterations (gradient %.3g)", result.iterations, result.final_grad_norm)
    return inputs, result.to_dict(), code


def _sample(args):
    frame = load_params(args.param_file)
    batch = sample_fb(frame.canonical, args.n, seed=args.seed, max_tries=args.max_tries,
                      tight=not args.simple_envelope)
    # samples live in the canonical frame; rotate back for mu/sigma input
    X = batch.X @ frame.orthogonal
    write_atomic(args.out_csv, format_csv(X))
    inputs = {"param_file": args.param_file, "n": args.n, "seed": args.seed, "max_tries": args.max_tries}
    out = {"out_csv": args.out_csv, "rows": X.shape[0], "acceptance_rate": batch.acceptance_rate,
           "proposals": batch.proposals}
    return inputs, out, EXIT_OK


def _verify(args):
    out = run_verify(args.n_points, args.omega_d, args.omega_u,
                     euler_quad.DEFAULT_D if args.d is None else args.d, args.tol)
    code = EXIT_OK if out["passed"] else EXIT_ACCURACY
    if code:
        log.error("%d checks failed", out["n_failed"])
    return {"quadrature_flags": _quad(args), "tol": args.tol}, out, code


def _bench(args):
    if not args.p_list or min(args.p_list) < 2:
        raise UsageError("--p-list needs dimensions of at least 2")
    if args.repeats < 1:
        raise UsageError("--repeats must be at least 1")
    rows, residuals, linfit = run_bench(args.p_list, args.n_points, args.repeats, args.seed,
                             args.omega_d, args.omega_u, args.d)
    if args.out_csv:
        write_atomic(args.out_csv, format_bench_csv(rows))
    out = {"rows": [{"p": p, "median_ms": ms, "imag_residual": r, "within_gate": r < IMAG_RESIDUAL_GATE}
                    for (p, ms), r in zip(rows, residuals)],
           **linfit, "csv": args.out_csv}
    return {"p_list": args.p_list, "repeats": args.repeats, "seed": args.seed,
            "quadrature_flags": _quad(args)}, out, EXIT_OK


COMMANDS = {"normconst": _normconst, "grad": _grad, "fit": _fit, "sample": _sample,
            "verify": _verify, "bench": _bench}


def make_report(command, inputs, outputs, timing_ms, exit_code, error=None):
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "timing_ms": timing_ms,
        "exit_code": exit_code,
    }
    if error is not None:
        report["error"] = error
    return to_jsonable(report)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="fbnorm: %(levelname)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.verbose:
        logging.getLogger().setLevel(logging.INFO)

    start = time.perf_counter()
    inputs, outputs, error = {}, {}, None
    try:
        inputs, outputs, code = COMMANDS[args.command](args)
    except UsageError as exc:
        code, error = EXIT_USAGE, str(exc)
    except FBError as exc:
        code, error = exc.exit_code, f"{type(exc).__name__}: {exc}"
        if getattr(exc, "rows", None):
            outputs = {"offending_rows": exc.rows[:1000]}
    except (OSError, ValueError) as exc:
        code, error = EXIT_USAGE, f"{type(exc).__name__}: {exc}"
    if error is not None:
        log.error("%s", error)
    timing_ms = (time.perf_counter() - start) * 1e3
    report = make_report(args.command, inputs, outputs, timing_ms, code, error)
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    sys.stdout.write(text)
    if args.report:
        write_atomic(args.report, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
