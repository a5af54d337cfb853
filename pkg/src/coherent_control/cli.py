"""Command-line front end.

Exit codes: 0 success, 1 a requested check failed, 2 parse/usage error,
3 validation error, 4 capacity error, 5 optimizer did not converge (the
report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import sys
import time

import numpy as np

from . import __version__
from .config import PROFILES, override, settings
from .dqc1 import SWEEP_COLUMNS, ProbeSpec, dqc1_sample, sweep
from .errors import CapacityError, CoherenceError, ParseError, ValidationError
from .io import basis_to_json, dumps, encode_vector, load_basis, load_matrix, load_state
from .measures import coherence_rel_ent, delta_Z
from .channels import is_cq_state
from .optimize import OptimizerConfig, lqicc_lower_bound, min_basis_delta
from .states import haar_unitary, partial_trace, relative_entropy
from .suites import SUITES, run_suite

EXIT_OK, EXIT_CHECK_FAILED, EXIT_PARSE, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_UNCONVERGED = range(6)


def _basis(spec: str):
    if spec in (None, "computational"):
        return None
    return load_basis(spec)


def _basis_id(spec: str | None) -> str:
    return "computational" if spec in (None, "computational") else f"file:{spec}"


def _optimizer_config(args) -> OptimizerConfig:
    kwargs = {"restarts": args.restarts, "max_iters": args.max_iters, "seed": args.seed,
              "threads": args.threads}
    povm = getattr(args, "povm_rank", None)
    if povm is not None:
        kwargs["parameterization"] = "povm"
        if povm != "auto":
            try:
                kwargs["povm_elements"] = int(povm)
            except ValueError:
                raise ParseError(f"--povm-rank expects an integer or 'auto', got {povm!r}")
    return OptimizerConfig(**kwargs)


def cmd_measure(args) -> tuple[dict, int]:
    rho = load_state(args.state)
    basis = _basis(args.basis)
    res = delta_Z(rho, basis)
    coh_a = coherence_rel_ent(partial_trace(rho, [0]), basis)
    closed_form_gap = abs(relative_entropy(rho, res.witness) - res.value)
    return {
        "delta_bits": res.value,
        "value_bits": res.value,
        "coherence_A_bits": coh_a,
        "is_cq": is_cq_state(rho, basis),
        "basis_id": _basis_id(args.basis),
        "witness_ref": "dephased-input",
        "suite_residuals": {"closed_form_vs_relative_entropy": closed_form_gap},
    }, EXIT_OK


def _bound_json(res, extra: dict) -> dict:
    out = {
        "value_bits": res.value,
        "kind": res.kind,
        "converged": res.converged,
        "best_restart": res.best_restart,
        "sweeps": res.sweeps,
        "restart_values": list(res.restart_values),
        "vectors": [encode_vector(res.vectors[:, k]) for k in range(res.vectors.shape[1])],
    }
    out.update(extra)
    return out


def cmd_lower_bound(args) -> tuple[dict, int]:
    rho = load_state(args.state)
    basis = _basis(args.basis)
    cfg = _optimizer_config(args)
    res = lqicc_lower_bound(rho, basis, cfg)
    out = _bound_json(res, {
        "bound": "lower",
        "protocol": "single-shot measurement on B",
        "delta_bits": delta_Z(rho, basis).value,
        "basis_id": _basis_id(args.basis),
    })
    return out, EXIT_OK if res.converged else EXIT_UNCONVERGED


def cmd_min_basis(args) -> tuple[dict, int]:
    rho = load_state(args.state)
    res = min_basis_delta(rho, _optimizer_config(args))
    out = _bound_json(res, {"bound": "upper", "quantity": "thermal discord A->B",
                            "basis": basis_to_json(res.argopt)})
    return out, EXIT_OK if res.converged else EXIT_UNCONVERGED


def _parse_values(text: str, cast):
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [cast(round(start + k * step, 12)) for k in range(n)]
    return [cast(float(x)) for x in text.split(",")]


def parse_sweep(tokens) -> dict:
    """``["a=0.2:1.0:0.2", "m=100,10000"]`` -> ``{"a": [...], "m": [...]}``."""
    spec = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or key not in ("a", "m", "p"):
            raise ParseError(f"bad sweep token {tok!r}; expected a=..., m=... or p=...", "--sweep")
        try:
            spec[key] = _parse_values(val, int if key == "m" else float)
        except ValueError as exc:
            raise ParseError(f"bad values in {tok!r}: {exc}", "--sweep") from exc
    if "a" not in spec or "m" not in spec:
        raise ParseError("sweep needs both a=... and m=...", "--sweep")
    return spec


def _unitary(args) -> np.ndarray:
    if args.haar_dim:
        return haar_unitary(args.haar_dim, args.seed)
    if args.unitary in (None, "identity"):
        return np.eye(args.dim)
    return load_matrix(args.unitary)


def cmd_dqc1(args) -> tuple[object, int]:
    u = _unitary(args)
    if args.sweep:
        spec = parse_sweep(args.sweep)
        ps = spec.get("p", [args.p])
        rows = [r for p in ps for r in sweep(spec["a"], spec["m"], u, p, args.seed)]
        return {"sweep": [{c: getattr(r, c) for c in SWEEP_COLUMNS} for r in rows]}, EXIT_OK
    probe = ProbeSpec(p=args.p, a=args.a, phase=args.phase)
    report = dqc1_sample(probe, u, args.runs, args.seed)
    out = report.to_dict()
    out["within_3se"] = report.error <= 3 * report.analytic_se
    return out, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    res = run_suite(args.suite, args.n, args.seed, args.threads)
    return res.to_dict(), EXIT_OK if res.passed else EXIT_CHECK_FAILED


def _csv_text(rows: list[dict]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([format(r[c], ".17g") if isinstance(r[c], float) else r[c]
                         for c in SWEEP_COLUMNS])
    return buf.getvalue()


def _global_flags(parser, suppress: bool) -> None:
    # repeated on every subcommand with SUPPRESS so they work on either side of it
    def default(v):
        return argparse.SUPPRESS if suppress else v

    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--threads", type=int, default=default(1))
    parser.add_argument("--tolerance-profile", choices=sorted(PROFILES),
                        default=default("default"))
    parser.add_argument("--output", choices=("json", "csv"), default=default("json"))
    parser.add_argument("--max-dim", type=int, default=default(None))
    parser.add_argument("--timing", action="store_true", default=default(False),
                        help="record wall time in the manifest (output is then not byte-stable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coherent-control",
                                     description="Coherent-control resource measures, bounds "
                                                 "and DQC1 simulation.")
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common], help="Delta_Z, coherence of Tr_B and CQ membership")
    p.add_argument("state")
    p.add_argument("--basis", default="computational")
    p.set_defaults(func=cmd_measure)

    def optimizer_flags(q):
        q.add_argument("--restarts", type=int, default=32)
        q.add_argument("--max-iters", type=int, default=500)

    p = sub.add_parser("lower-bound", parents=[common], help="single-shot measurement lower bound")
    p.add_argument("state")
    p.add_argument("--basis", default="computational")
    p.add_argument("--povm-rank", default=None,
                   help="search rank-1 POVMs with this many elements ('auto' = r^2)")
    optimizer_flags(p)
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("min-basis", parents=[common], help="Delta_Z minimized over bases of A")
    p.add_argument("state")
    optimizer_flags(p)
    p.set_defaults(func=cmd_min_basis)

    p = sub.add_parser("dqc1", parents=[common], help="simulate DQC1 trace estimation")
    p.add_argument("--unitary", default="identity", help="'identity' or a matrix file")
    p.add_argument("--dim", type=int, default=8, help="dimension for --unitary identity")
    p.add_argument("--haar-dim", type=int, default=None)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--runs", type=int, default=200_000)
    p.add_argument("--sweep", nargs="+", default=None, metavar="KEY=VALUES")
    p.set_defaults(func=cmd_dqc1)

    p = sub.add_parser("verify", parents=[common], help="run a seeded property suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def _manifest(args, argv_inputs, elapsed) -> dict:
    config = {k: v for k, v in vars(args).items()
              if k not in ("func", "command", "timing") and v is not None}
    m = {"subcommand": args.command, "inputs": argv_inputs, "config": config,
         "seed": args.seed, "version": __version__,
         "tolerance_profile": settings.profile, "max_dim": settings.max_dim}
    if args.timing:
        m["wall_time_s"] = elapsed
    return m


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    # settings are scoped to this call so library users are not affected
    with override(profile=args.tolerance_profile, max_dim=args.max_dim):
        return _run(args)


def _run(args) -> int:
    inputs = [v for k, v in vars(args).items()
              if k in ("state", "unitary") and v not in (None, "identity")]
    if getattr(args, "basis", "computational") != "computational":
        inputs.append(args.basis)
    start = time.perf_counter()
    try:
        result, code = args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error ({exc.invariant}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (OSError, CoherenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    elapsed = time.perf_counter() - start
    if args.output == "csv" and "sweep" in result:
        sys.stdout.write(_csv_text(result["sweep"]))
    else:
        result["manifest"] = _manifest(args, inputs, elapsed)
        sys.stdout.write(dumps(result) + "\n")
    return code

if __name__ == "__main__":
    sys.exit(main())
