"""Command-line front end.

Subcommands wrap the library operations and emit machine-readable reports:
JSON to stdout (or --out), CSV for tabular data.  Exit codes: 0 = true/ok,
1 = negative verdict, 2 = input error, 3 = numerical failure.

File formats: vectors are JSON arrays; real matrices are arrays of row
arrays; complex matrices use [re, im] entry pairs; schedules are
{"segments": [{"perm": [...], "duration": t}]}.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dissipation, majorize, polytope, reach
from ._simplex import InfeasibleError
from .channels import channel_between, is_cp, is_tp, kraus_set, trace_norm
from .cnr import c_numerical_range_sample
from .majorize import TransferSynthesisError
from .reach import SimplexViolationError

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

TOL_ENV_VAR = "DMAJOR_TOL"


class _InputError(Exception):
    pass


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return 1e-9
    try:
        return float(raw)
    except ValueError:
        raise _InputError(f"cannot parse {TOL_ENV_VAR}={raw!r} as a float")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read {path}: {exc}")


def _load_vector(path: str) -> np.ndarray:
    data = _load_json(path)
    try:
        return majorize.as_vector(data)
    except (ValueError, TypeError) as exc:
        raise _InputError(f"{path}: {exc}")


def _load_real_matrix(path: str) -> np.ndarray:
    data = _load_json(path)
    try:
        m = np.asarray(data, dtype=float)
    except (ValueError, TypeError) as exc:
        raise _InputError(f"{path}: {exc}")
    if m.ndim != 2:
        raise _InputError(f"{path}: expected a matrix (array of rows)")
    return m


def _load_complex_matrix(path: str) -> np.ndarray:
    data = _load_json(path)
    try:
        arr = np.asarray(data, dtype=float)
    except (ValueError, TypeError) as exc:
        raise _InputError(f"{path}: {exc}")
    if arr.ndim == 2:  # plain real matrix
        return arr.astype(complex)
    if arr.ndim == 3 and arr.shape[2] == 2:
        return arr[:, :, 0] + 1j * arr[:, :, 1]
    raise _InputError(f"{path}: expected a matrix of numbers or of [re, im] pairs")


def _complex_matrix_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _matrix_json(m: np.ndarray) -> list:
    return [[float(v) for v in row] for row in m]


def _vector_json(v: np.ndarray) -> list:
    return [float(x) for x in v]


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_csv(args, header: str, rows: list[str]) -> None:
    text = "\n".join([header] + rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _report(command: str, verdict=None, data=None, diagnostics=None) -> dict:
    out = {"command": command}
    if verdict is not None:
        out["verdict"] = bool(verdict)
    out["data"] = data if data is not None else {}
    out["diagnostics"] = diagnostics or []
    return out


def _generator_from_args(args) -> dissipation.Generator:
    if args.zero_temp is not None:
        return dissipation.b0_from_rates(
            dissipation.zero_temperature_rates(args.zero_temp))
    if args.thermal is not None:
        d = _load_vector(args.thermal)
        return dissipation.b0_from_rates(dissipation.thermal_rates(d))
    if args.b0 is not None:
        return dissipation.Generator(_load_real_matrix(args.b0))
    raise _InputError("specify a generator via --zero-temp, --thermal, or --b0")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_check(args) -> int:
    x = _load_vector(args.x)
    y = _load_vector(args.y)
    diagnostics = []
    data: dict = {}
    if args.d is None:
        verdict = majorize.majorizes(x, y, tol=args.tol)
        if verdict and args.certificate:
            cert = majorize.doubly_stochastic_transfer(x, y, tol=args.tol)
            data["certificate"] = _matrix_json(cert.matrix)
            data["certificate_kind"] = cert.kind
    else:
        d = _load_vector(args.d)
        if np.any(d <= 0):
            raise _InputError("weight vector must be strictly positive")
        verdict = majorize.d_majorizes(x, y, d, method=args.method, tol=args.tol)
        if verdict and args.certificate:
            cert = majorize.d_stochastic_transfer(x, y, d, tol=args.tol)
            data["certificate"] = _matrix_json(cert.matrix)
            data["certificate_kind"] = cert.kind
    _emit(args, _report("check", verdict=verdict, data=data, diagnostics=diagnostics))
    return EXIT_TRUE if verdict else EXIT_FALSE


def _cmd_polytope(args) -> int:
    y = _load_vector(args.y)
    d = _load_vector(args.d)
    poly = polytope.halfspace_bounds(y, d)
    verts = polytope.vertices(y, d)
    if args.format == "csv":
        rows = sorted(",".join(repr(float(v)) for v in p) for p in verts.points)
        _emit_csv(args, ",".join(f"x{i}" for i in range(poly.n)), rows)
    else:
        data = {
            "n": poly.n,
            "b": _vector_json(poly.b),
            "vertices": [_vector_json(p) for p in verts.points],
            "generating_perms": [[list(p) for p in ps] for ps in verts.perms],
        }
        _emit(args, _report("polytope", data=data))
    return EXIT_TRUE


def _cmd_curve(args) -> int:
    y = _load_vector(args.y)
    d = _load_vector(args.d)
    curve = majorize.thermo_curve(y, d)
    if args.format == "csv":
        rows = [f"{repr(float(c))},{repr(float(f))}" for c, f in zip(curve.c, curve.f)]
        _emit_csv(args, "c,f", rows)
    else:
        _emit(args, _report("curve", data={
            "elbows_c": _vector_json(curve.c),
            "elbows_f": _vector_json(curve.f),
        }))
    return EXIT_TRUE


def _cmd_bath(args) -> int:
    data: dict = {}
    if args.gibbs is not None:
        energies = _load_vector(args.gibbs)
        d = dissipation.gibbs_vector(energies, args.temperature)
        rates = dissipation.thermal_rates(d)
        data["d"] = _vector_json(d)
    elif args.equidistant is not None:
        alpha, n = args.equidistant
        d = dissipation.equidistant_d(float(alpha), int(n))
        rates = dissipation.thermal_rates(d)
        data["d"] = _vector_json(d)
    elif args.thermal is not None:
        d = _load_vector(args.thermal)
        rates = dissipation.thermal_rates(d)
        data["d"] = _vector_json(d)
    elif args.zero_temp is not None:
        rates = dissipation.zero_temperature_rates(args.zero_temp)
    else:
        raise _InputError("specify --zero-temp, --thermal, --gibbs, or --equidistant")
    gen = dissipation.b0_from_rates(rates)
    data["a"] = _vector_json(rates.a)
    data["b"] = _vector_json(rates.b)
    data["b0"] = _matrix_json(gen.b0)
    _emit(args, _report("bath", data=data))
    return EXIT_TRUE


def _cmd_simulate(args) -> int:
    gen = _generator_from_args(args)
    x0 = _load_vector(args.x0)
    sched = reach.Schedule.from_dict(_load_json(args.schedule))
    traj = reach.simulate(gen, x0, sched, dt=args.dt)
    header = "t," + ",".join(f"x{i}" for i in range(gen.n))
    rows = [
        repr(float(t)) + "," + ",".join(repr(float(v)) for v in state)
        for t, state in zip(traj.times, traj.states)
    ]
    _emit_csv(args, header, rows)
    return EXIT_TRUE


def _cmd_synthesize(args) -> int:
    gen = _generator_from_args(args)
    target = _load_vector(args.target)
    if args.x0 is None:
        x0 = np.eye(gen.n)[:, 0]
        sched = reach.synthesize_from_ground(gen, target)
    else:
        x0 = _load_vector(args.x0)
        sched = reach.synthesize(gen, x0, target, eps=args.eps)
    err = float(np.abs(reach.endpoint(gen, x0, sched) - target).sum())
    payload = _report("synthesize", data=sched.to_dict(),
                      diagnostics=[f"endpoint 1-norm error {err:.3e}"])
    _emit(args, payload)
    return EXIT_TRUE


def _cmd_bound(args) -> int:
    x0 = _load_vector(args.x0)
    if args.alpha is not None:
        d = dissipation.equidistant_d(args.alpha, x0.size)
    else:
        d = _load_vector(args.d)
    z, report = reach.majorization_envelope(
        x0, d, sample_count=args.samples, sample_depth=args.depth, seed=args.seed)
    data = {
        "z": _vector_json(z),
        "initial_majorized": report.initial_majorized,
        "tangential_ok": report.tangential_ok,
        "tangential_mu": {str(list(k)): v for k, v in report.tangential_mu.items()},
        "sampled_violations": report.sampled_violations,
        "samples_checked": report.samples_checked,
    }
    ok = report.initial_majorized and report.tangential_ok and report.sampled_violations == 0
    _emit(args, _report("bound", verdict=ok, data=data))
    return EXIT_TRUE if ok else EXIT_FALSE


def _cmd_channel(args) -> int:
    a = _load_complex_matrix(args.a)
    b = _load_complex_matrix(args.b)
    t = channel_between(a, b)
    residual = trace_norm(t.apply(b) - a)
    data = {
        "superoperator": _complex_matrix_json(t.action),
        "cp": is_cp(t),
        "tp": is_tp(t),
        "residual_trace_norm": residual,
    }
    if args.kraus:
        data["kraus"] = [_complex_matrix_json(k) for k in kraus_set(t)]
    verdict = data["cp"] and data["tp"] and residual <= 1e-8
    _emit(args, _report("channel", verdict=verdict, data=data))
    return EXIT_TRUE if verdict else EXIT_FALSE


def _cmd_cnr(args) -> int:
    c = _load_complex_matrix(args.c)
    a = _load_complex_matrix(args.t)
    samples = c_numerical_range_sample(c, a, count=args.count, seed=args.seed)
    rows = [f"{repr(float(z.real))},{repr(float(z.imag))}" for z in samples]
    _emit_csv(args, "re,im", rows)
    return EXIT_TRUE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # global flags live on a shared parent with suppressed defaults so they
    # may appear before or after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help=f"comparison tolerance (default 1e-9 or ${TOL_ENV_VAR})")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", type=str, default=argparse.SUPPRESS,
                        help="write output to a file")
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="reserved parallelism hint (computation is deterministic)")

    parser = argparse.ArgumentParser(
        prog="dmajor",
        description="d-majorization checks, polytopes, bath dissipation, "
                    "simplex reachability, channels, and numerical ranges",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_command("check", help="decide (d-)majorization between two vectors")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--d", default=None, help="weight vector file; omit for classical")
    p.add_argument("--method", choices=list(majorize.D_MAJORIZE_METHODS), default="norm")
    p.add_argument("--certificate", action="store_true",
                   help="include a transfer-matrix certificate on positive verdicts")
    p.set_defaults(func=_cmd_check)

    p = add_command("polytope", help="half-space bounds and vertices of the "
                                        "d-majorization polytope")
    p.add_argument("y")
    p.add_argument("--d", required=True)
    p.set_defaults(func=_cmd_polytope)

    p = add_command("curve", help="thermomajorization curve elbows")
    p.add_argument("y")
    p.add_argument("--d", required=True)
    p.set_defaults(func=_cmd_curve)

    p = add_command("bath", help="bath-coupling rates and rate matrix")
    p.add_argument("--zero-temp", type=int, default=None, metavar="N")
    p.add_argument("--thermal", default=None, metavar="D_FILE")
    p.add_argument("--gibbs", default=None, metavar="E_FILE")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--equidistant", nargs=2, default=None, metavar=("ALPHA", "N"))
    p.set_defaults(func=_cmd_bath)

    p = add_command("simulate", help="simulate a schedule, emit trajectory CSV")
    p.add_argument("--x0", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--zero-temp", type=int, default=None, metavar="N")
    p.add_argument("--thermal", default=None, metavar="D_FILE")
    p.add_argument("--b0", default=None, metavar="B0_FILE")
    p.set_defaults(func=_cmd_simulate)

    p = add_command("synthesize", help="steering schedule for the "
                                          "zero-temperature model")
    p.add_argument("--target", required=True)
    p.add_argument("--x0", default=None, help="initial state; omit to steer from e_1")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--zero-temp", type=int, default=None, metavar="N")
    p.add_argument("--thermal", default=None, metavar="D_FILE")
    p.add_argument("--b0", default=None, metavar="B0_FILE")
    p.set_defaults(func=_cmd_synthesize)

    p = add_command("bound", help="majorization envelope for the thermal model")
    p.add_argument("--x0", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--d", default=None)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(func=_cmd_bound)

    p = add_command("channel", help="construct a channel mapping B to A")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--kraus", action="store_true")
    p.set_defaults(func=_cmd_channel)

    p = add_command("cnr", help="sample the C-numerical range, emit CSV")
    p.add_argument("--c", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--count", type=int, default=1000)
    p.set_defaults(func=_cmd_cnr)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    args.out = getattr(args, "out", None)
    args.format = getattr(args, "format", "json")
    args.jobs = getattr(args, "jobs", 1)
    try:
        args.tol = getattr(args, "tol", None)
        if args.tol is None:
            args.tol = _default_tol()
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TransferSynthesisError, InfeasibleError, SimplexViolationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
