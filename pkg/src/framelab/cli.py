"""Command-line interface: ``frame-lab <command> [options]``.

Commands: build-untf, eval, optimize, bounds, certify, sweep.
``--c1``/``--c2`` bound the SQUARED norms and ``--sigma`` is the noise
level itself (not its square). Reports are JSON with sorted keys; the
only run-dependent field is ``timestamp``.

Exit codes: 0 on success, 1 when the operation fails, 2 on usage errors.
"""

import argparse
import csv
import datetime
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from framelab import __version__, kernels
from framelab.bounds import bounds_report, mu_upper_bound, nonminimal_count_bound, uniform_case
from framelab.frame_core import frame_bounds, frame_potential, tightness_defect
from framelab.io import SystemFormatError, dump_report, format_system, read_system, to_jsonable
from framelab.objective import IndeterminateRatioError, NormConstraints, evaluate
from framelab.optimizer import OptimizerConfig, certify, optimize
from framelab.untf import BuildRequest, TightFrameNotFound, build_untf

COMMANDS = ("build-untf", "eval", "optimize", "bounds", "certify", "sweep")


class UsageError(Exception):
    pass


@dataclass
class ExperimentSpec:
    command: str
    dim: Optional[int] = None
    count: Optional[int] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    sigma: float = 0.0
    sigma_range: Optional[tuple] = None
    seed: int = 0
    restarts: Optional[int] = None
    max_iters: Optional[int] = None
    tol: Optional[float] = None
    input: Optional[str] = None
    output: Optional[str] = None
    format: str = "json"
    sweep_optimize: bool = False
    overrides: dict = field(default_factory=dict)

    def parameters(self):
        params = asdict(self)
        params.pop("overrides")
        return params


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_sigma_range(text):
    """Parse ``start:stop:step`` into a tuple of sigma values, stop included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--sigma: expected start:stop:step for sweep, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--sigma: non-numeric range {text!r}") from None
    if not step > 0 or stop < start or start < 0:
        raise UsageError(f"--sigma: need 0 <= start <= stop and step > 0, got {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(n))


def _build_parser():
    parser = _Parser(prog="frame-lab", description="Max-min frame energy toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, problem=True, sigma=True):
        if problem:
            p.add_argument("--dim", type=int)
            p.add_argument("--count", type=int)
            p.add_argument("--c1", type=float)
            p.add_argument("--c2", type=float)
        if sigma:
            p.add_argument(
                "--sigma",
                default="0",
                help="noise level >= 0 (default 0, the noiseless limit; a sweep takes start:stop:step)",
            )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output")
        p.add_argument("--format", choices=("json", "csv"), default=None)

    def optimizer_flags(p):
        p.add_argument("--restarts", type=int)
        p.add_argument("--max-iters", type=int)
        p.add_argument("--tol", type=float)

    p = sub.add_parser("build-untf", help="construct a scaled unit-norm tight frame")
    common(p, sigma=False)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("eval", help="evaluate ratios of a system file")
    common(p, problem=False)
    p.add_argument("--dim", type=int)
    p.add_argument("--input", required=True)

    p = sub.add_parser("optimize", help="maximize the minimum ratio")
    common(p)
    optimizer_flags(p)

    p = sub.add_parser("bounds", help="closed-form values and bounds")
    common(p)

    p = sub.add_parser("certify", help="check a system file against the closed forms")
    common(p)
    p.add_argument("--input", required=True)

    p = sub.add_parser("sweep", help="closed forms (and optionally optimize) over a sigma range")
    common(p)
    optimizer_flags(p)
    p.add_argument("--optimize", action="store_true", dest="sweep_optimize")
    return parser


def _require(ns, names):
    for name in names:
        if getattr(ns, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {ns.command}")


def parse_args(argv):
    """Parse ``argv`` into an ``ExperimentSpec``; raise ``UsageError`` naming the bad flag."""
    ns = _build_parser().parse_args(argv)
    cmd = ns.command
    if cmd in ("optimize", "bounds", "sweep"):
        _require(ns, ["dim", "count", "c1", "c2"])
    elif cmd == "build-untf":
        _require(ns, ["dim", "count"])
    elif cmd == "certify":
        _require(ns, ["c1", "c2"])

    sigma, sigma_range = 0.0, None
    if hasattr(ns, "sigma"):
        if cmd == "sweep":
            sigma_range = parse_sigma_range(ns.sigma)
        else:
            try:
                sigma = float(ns.sigma)
            except ValueError:
                raise UsageError(f"--sigma: invalid number {ns.sigma!r}") from None
            if not (math.isfinite(sigma) and sigma >= 0):
                raise UsageError(f"--sigma must be a finite non-negative number, got {ns.sigma}")

    dim = getattr(ns, "dim", None)
    count = getattr(ns, "count", None)
    if dim is not None and dim < 1:
        raise UsageError(f"--dim must be positive, got {dim}")
    if count is not None and count < 1:
        raise UsageError(f"--count must be positive, got {count}")
    if cmd == "build-untf" and count < dim:
        raise UsageError(f"--count must be at least --dim for a tight frame, got {count} < {dim}")
    c1, c2 = getattr(ns, "c1", None), getattr(ns, "c2", None)
    if cmd == "build-untf":
        if c1 is not None and not c1 > 0:
            raise UsageError(f"--c1 must be positive, got {c1}")
    elif c1 is not None and c2 is not None and not 0 < c1 < c2:
        raise UsageError(f"--c1/--c2: need 0 < c1 < c2, got c1={c1}, c2={c2}")
    if ns.seed < 0 or ns.seed >= 1 << 64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    restarts = getattr(ns, "restarts", None)
    if restarts is not None and restarts < 1:
        raise UsageError(f"--restarts must be positive, got {restarts}")
    max_iters = getattr(ns, "max_iters", None)
    if max_iters is not None and max_iters < 1:
        raise UsageError(f"--max-iters must be positive, got {max_iters}")
    tol = getattr(ns, "tol", None)
    if tol is not None and not tol > 0:
        raise UsageError(f"--tol must be positive, got {tol}")

    default_format = "csv" if cmd == "sweep" else "json"
    return ExperimentSpec(
        command=cmd,
        dim=dim,
        count=count,
        c1=c1,
        c2=c2,
        sigma=sigma,
        sigma_range=sigma_range,
        seed=ns.seed,
        restarts=restarts,
        max_iters=max_iters,
        tol=tol,
        input=getattr(ns, "input", None),
        output=ns.output,
        format=ns.format or default_format,
        sweep_optimize=getattr(ns, "sweep_optimize", False),
    )


def _optimizer_config(spec):
    kwargs = {"seed": spec.seed}
    if spec.restarts is not None:
        kwargs["restarts"] = spec.restarts
    if spec.max_iters is not None:
        kwargs["max_iters"] = spec.max_iters
    if spec.tol is not None:
        kwargs["tolerance"] = spec.tol
    kwargs.update(spec.overrides)
    return OptimizerConfig(**kwargs)


def _timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _envelope(spec, result):
    return {
        "command": spec.command,
        "parameters": spec.parameters(),
        "backend": kernels.BACKEND,
        "version": __version__,
        "result": result,
        "timestamp": _timestamp(),
    }


def _report_text(spec, result):
    report = _envelope(spec, result)
    if spec.format == "csv":
        return _flat_csv(report)
    return dump_report(report)


def _flat_csv(report):
    rows = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else k, value[k])
        elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
            for i, v in enumerate(value):
                walk(f"{prefix}.{i}", v)
        elif isinstance(value, list):
            rows.append((prefix, ";".join(repr(v) if isinstance(v, float) else str(v) for v in value)))
        else:
            rows.append((prefix, "" if value is None else repr(value) if isinstance(value, float) else str(value)))

    walk("", to_jsonable(report))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["field", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def _emit(spec, text, stdout):
    if spec.output:
        with open(spec.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _cmd_build_untf(spec, stdout):
    c = spec.c1 if spec.c1 is not None else 1.0
    kwargs = {}
    if spec.max_iters is not None:
        kwargs["max_iters"] = spec.max_iters
    if spec.tol is not None:
        kwargs["defect_tol"] = spec.tol
    req = BuildRequest(dim=spec.dim, count=spec.count, target_norm2=c, seed=spec.seed, **kwargs)
    vs = build_untf(req)
    extra = {
        "parameters": spec.parameters(),
        "backend": kernels.BACKEND,
        "tightness_defect": tightness_defect(vs),
        "frame_potential": frame_potential(vs),
        "timestamp": _timestamp(),
    }
    text = format_system(vs, spec.format, extra if spec.format == "json" else None)
    _emit(spec, text, stdout)


def _load(spec):
    return read_system(spec.input, dim=spec.dim)


def _cmd_eval(spec, stdout):
    vs = _load(spec)
    report = evaluate(vs, spec.sigma)
    lower, upper = frame_bounds(vs)
    result = {
        "report": report,
        "frame_bounds": [lower, upper],
        "frame_potential": frame_potential(vs),
        "dim": vs.dim,
        "count": vs.count,
    }
    _emit(spec, _report_text(spec, result), stdout)


def _cmd_optimize(spec, stdout):
    constraints = NormConstraints(spec.c1, spec.c2, spec.sigma)
    res = optimize(spec.dim, spec.count, constraints, _optimizer_config(spec))
    cert = certify(res.best_system, constraints)
    result = {
        "min_value": res.min_value,
        "objective": res.best_report.objective,
        "report": res.best_report,
        "restart_index": res.restart_index,
        "restart_values": res.restart_values,
        "converged": res.converged,
        "nonminimal_norm_count": res.nonminimal_norm_count,
        "history": res.history,
        "moves": res.moves,
        "certificate": cert,
        "best_system": res.best_system,
    }
    _emit(spec, _report_text(spec, result), stdout)


def _cmd_bounds(spec, stdout):
    rep = bounds_report(spec.dim, spec.count, spec.c1, spec.c2, spec.sigma)
    _emit(spec, _report_text(spec, rep), stdout)


def _cmd_certify(spec, stdout):
    vs = _load(spec)
    constraints = NormConstraints(spec.c1, spec.c2, spec.sigma)
    if not constraints.feasible(vs):
        raise ValueError("input system violates c1 <= |v|^2 <= c2")
    _emit(spec, _report_text(spec, certify(vs, constraints)), stdout)


def sweep_rows(spec):
    """Rows ``(sigma, uniform_answer, mu_bound, achieved)`` for every sigma in the range."""
    d, N, c1, c2 = spec.dim, spec.count, spec.c1, spec.c2
    if N <= d:
        raise ValueError("sweep needs --count > --dim")
    rows = []
    for sigma in spec.sigma_range:
        uni = uniform_case(d, N, c1, c2, sigma)
        mu = None
        if nonminimal_count_bound(d, c1, sigma).valid:
            mu = mu_upper_bound(d, N, c1, c2, sigma).mu_bound
        achieved = None
        if spec.sweep_optimize:
            res = optimize(d, N, NormConstraints(c1, c2, sigma), _optimizer_config(spec))
            achieved = res.min_value
        rows.append({"sigma": sigma, "uniform_answer": uni.answer, "mu_bound": mu, "achieved": achieved})
    return rows


def _cmd_sweep(spec, stdout):
    rows = sweep_rows(spec)
    if spec.format == "json":
        _emit(spec, dump_report(_envelope(spec, rows)), stdout)
        return
    buf = io.StringIO()
    buf.write("# " + json.dumps(to_jsonable(spec.parameters()), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["sigma", "uniform_answer", "mu_bound", "achieved"]
    writer.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = to_jsonable(row[c])
            out.append("" if v is None else repr(v) if isinstance(v, float) else str(v))
        writer.writerow(out)
    _emit(spec, buf.getvalue(), stdout)


HANDLERS = {
    "build-untf": _cmd_build_untf,
    "eval": _cmd_eval,
    "optimize": _cmd_optimize,
    "bounds": _cmd_bounds,
    "certify": _cmd_certify,
    "sweep": _cmd_sweep,
}


def run(spec, stdout=None, stderr=None):
    """Execute a parsed spec; return the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        HANDLERS[spec.command](spec, stdout)
    except (TightFrameNotFound, IndeterminateRatioError, SystemFormatError, ValueError, OSError) as exc:
        stderr.write(f"frame-lab {spec.command}: error: {exc}\n")
        return 1
    return 0


def main(argv=None, stdout=None, stderr=None):
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_args(argv)
    except UsageError as exc:
        stderr.write(f"frame-lab: usage error: {exc}\n")
        return 2
    return run(spec, stdout, stderr)


if __name__ == "__main__":
    sys.exit(main())
