"""Command-line front end.

Subcommands: solve, simulate, recursion, certify, fit.  Flags override
values from an optional flat ``key=value`` config file.  Exit codes are
stable: 0 success, 1 I/O failure, 2 invalid input, 3 certificate failure.

CSV output is comma separated with a header row, '.' decimal point, and
floats rendered with repr so identical runs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from .certificates import all_certificates
from .exceptions import InconsistentSystemError, InvalidInputError
from .lfunction import gamma_crossing_time
from .process import (
    check_averaged_bound,
    coordinate_descent_process,
    fixed_matrix_process,
    kaczmarz_process,
    monte_carlo,
    run_process,
)
from .recursion import (
    default_fit_window,
    eig_recursion_path,
    fit_loglog,
    loglin_spectrum,
    lower_bound_family,
    max_trace,
)
from .rng import spawn_generators
from .solvers import SolverConfig, run_solver
from .systems import load_system

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_CERTIFICATE = 3


# ---------------------------------------------------------------- helpers


def _load_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _as_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise InvalidInputError(f"not a boolean: {text!r}")


class _Params:
    """Merged view of CLI flags (highest precedence) and config file values."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = _load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name, type_=str, default=None, required=False):
        value = getattr(self.args, name, None)
        if value is None and name in self.cfg:
            raw = self.cfg[name]
            value = _as_bool(raw) if type_ is bool else type_(raw)
        if value is None:
            value = default
        if value is None and required:
            raise InvalidInputError(f"missing required parameter --{name.replace('_', '-')}")
        return value


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _parse_spectrum(text: str) -> np.ndarray:
    """Either an explicit comma list of values in [0,1] or loglin(n,hi,lo)."""
    text = text.strip()
    match = re.fullmatch(r"loglin\(\s*(\d+)\s*,\s*([^,]+)\s*,\s*([^)]+)\)", text)
    if match:
        return loglin_spectrum(int(match.group(1)), float(match.group(2)), float(match.group(3)))
    try:
        values = np.array([float(tok) for tok in text.split(",") if tok.strip()])
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse spectrum {text!r}") from exc
    if values.size == 0:
        raise InvalidInputError("empty spectrum")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise InvalidInputError("spectrum entries must lie in [0, 1]")
    return values


def _parse_window(text: str, T: int) -> tuple[int, int]:
    if text == "auto":
        return default_fit_window(T)
    try:
        lo, hi = text.split(":")
        return int(float(lo)), int(float(hi))
    except ValueError as exc:
        raise InvalidInputError(f"fit window must be LO:HI or auto, got {text!r}") from exc


PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Log-log plot of {csv_path!r}; regenerate the CSV with contraction-lab."""
import csv

import matplotlib.pyplot as plt

with open({csv_path!r}) as fh:
    reader = csv.DictReader(fh)
    columns = {{name: [] for name in reader.fieldnames}}
    for row in reader:
        for name, value in row.items():
            columns[name].append(float(value) if value else float("nan"))

t = columns.pop("t")
fig, ax = plt.subplots(figsize=(6, 4.5))
for name, series in columns.items():
    pts = [(ti, v) for ti, v in zip(t, series) if ti >= 1 and v > 0]
    if pts:
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], label=name, linewidth=1)
{fit_lines}ax.set_xlabel("t")
ax.set_ylabel("value")
ax.legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig({png_path!r}, dpi=150)
print("wrote", {png_path!r})
'''

PLOT_FIT_SNIPPET = (
    "ts = [ti for ti in t if {lo} <= ti <= {hi}]\n"
    "ax.loglog(ts, [{amp!r} * ti ** {slope!r} for ti in ts], 'k:', "
    "label='fit slope {slope:.4f}')\n"
)


def _emit_plot_script(path: str, csv_path: str, fit=None) -> None:
    fit_lines = ""
    if fit is not None:
        fit_lines = PLOT_FIT_SNIPPET.format(
            lo=fit.window[0], hi=fit.window[1], amp=float(np.exp(fit.intercept)), slope=fit.slope
        )
    png_path = re.sub(r"\.py$", "", path) + ".png"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(PLOT_TEMPLATE.format(csv_path=csv_path, png_path=png_path, fit_lines=fit_lines))


# ---------------------------------------------------------------- commands


def cmd_solve(args: argparse.Namespace) -> int:
    p = _Params(args)
    method = p.get("method", str, required=True)
    steps = p.get("steps", int, default=1000)
    seed = p.get("seed", int, required=True)
    block_size = p.get("block_size", int, default=1)
    rht = p.get("rht", bool, default=False)
    out = p.get("out", str, default="trace.csv")
    system_path = p.get("system", str, required=True)
    if steps < 1:
        raise InvalidInputError("steps must be >= 1")

    try:
        system = load_system(system_path)
    except InconsistentSystemError:
        raise
    except InvalidInputError as exc:
        print(f"error: bad system file: {exc}", file=sys.stderr)
        return EXIT_IO

    config = SolverConfig(method=method, seed=seed, block_size=block_size, rht=rht)
    trace = run_solver(system, config, steps)
    if "frobenius_before_rht" in trace.meta:
        print(
            "rht: frobenius norm {:.12g} -> {:.12g}".format(
                trace.meta["frobenius_before_rht"], trace.meta["frobenius_after_rht"]
            )
        )
    rows = zip(range(steps + 1), trace.dist_sq, trace.residual_sq, trace.mnorm_sq)
    _write_csv(out, ["t", "dist_sq", "residual_sq", "mnorm_sq"], rows)
    print(f"solve: method={method} steps={steps} final_residual={np.sqrt(trace.residual_sq[-1]):.6e}")
    print(f"wrote {out}")
    return EXIT_OK


def _build_process(p: _Params):
    spectrum = p.get("spectrum", str)
    system_path = p.get("system", str)
    if (spectrum is None) == (system_path is None):
        raise InvalidInputError("simulate needs exactly one of --spectrum or --system")
    if spectrum is not None:
        rho = _parse_spectrum(spectrum)
        return fixed_matrix_process(np.diag(rho), np.ones(rho.shape[0]))
    method = p.get("method", str, default="rk")
    try:
        system = load_system(system_path)
    except InconsistentSystemError:
        raise
    except InvalidInputError as exc:
        raise OSError(f"bad system file: {exc}") from exc
    if method == "rk":
        return kaczmarz_process(system)
    if method == "rcd":
        return coordinate_descent_process(system)
    raise InvalidInputError("simulate supports methods 'rk' and 'rcd' (closed-form mean needed)")


def cmd_simulate(args: argparse.Namespace) -> int:
    p = _Params(args)
    steps = p.get("steps", int, default=1000)
    replicates = p.get("replicates", int, default=200)
    seed = p.get("seed", int, required=True)
    out = p.get("out", str, default="simulate.csv")
    if steps < 1 or replicates < 1:
        raise InvalidInputError("steps and replicates must be >= 1")
    process = _build_process(p)
    delta0_norm_sq = float(process.delta0 @ process.delta0)

    header = [
        "t",
        "mean_norm_sq",
        "mean_mnorm_sq",
        "mean_avg_mnorm_sq",
        "stderr_norm_sq",
        "stderr_mnorm_sq",
        "stderr_avg_mnorm_sq",
    ]
    if replicates == 1:
        print("warning: replicates=1, standard errors unavailable", file=sys.stderr)
        trace = run_process(process, steps, rng=spawn_generators(seed, 1)[0])
        rows = (
            (t, trace.norm_sq[t], trace.mnorm_sq[t], trace.avg_mnorm_sq[t], "", "", "")
            for t in range(steps + 1)
        )
        _write_csv(out, header, rows)
        print(f"wrote {out}")
        return EXIT_OK

    mc = monte_carlo(process, steps, replicates, seed)
    report = check_averaged_bound(mc, delta0_norm_sq)
    rows = (
        (
            t,
            mc.mean_norm_sq[t],
            mc.mean_mnorm_sq[t],
            mc.mean_avg_mnorm_sq[t],
            mc.stderr_norm_sq[t],
            mc.stderr_mnorm_sq[t],
            mc.stderr_avg_mnorm_sq[t],
        )
        for t in range(steps + 1)
    )
    _write_csv(out, header, rows)
    if report.ok:
        print(f"averaged-iterate bound: ok for all t <= {steps}")
    else:
        print(f"averaged-iterate bound: {len(report.violations)} violations, first at t={report.violations[0]}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_recursion(args: argparse.Namespace) -> int:
    p = _Params(args)
    out = p.get("out", str, default="recursion.csv")
    family_T = p.get("lower_bound_family", int)
    spectrum = p.get("spectrum", str)
    lambda_columns = p.get("lambda_columns", bool, default=False)

    if family_T is not None:
        steps = p.get("steps", int, default=family_T)
        rho = lower_bound_family(family_T)
        mu = max_trace(rho, steps)
        t = np.arange(steps + 1)
        normalized = mu * (t + 1.0) ** 0.753
        _write_csv(out, ["t", "mu_t", "normalized"], zip(t, mu, normalized))
        t_lo = min(50, steps)
        floor = float(normalized[t_lo:].min())
        print(
            f"lower-bound family T={family_T}: normalized mu_t*(t+1)^0.753 over t in [{t_lo},{steps}]: "
            f"floor={floor:.6f} at_t{t_lo}={normalized[t_lo]:.6f} ratio={floor / normalized[t_lo]:.4f}"
        )
        print(f"wrote {out}")
        return EXIT_OK

    if spectrum is None:
        raise InvalidInputError("recursion needs --spectrum or --lower-bound-family")
    rho = _parse_spectrum(spectrum)
    steps = p.get("steps", int, default=1000)
    if steps < 1:
        raise InvalidInputError("steps must be >= 1")

    fit = None
    header = ["t", "mu_t"]
    if lambda_columns and rho.shape[0] <= 64:
        path = eig_recursion_path(rho, steps)
        mu = path.max(axis=1)
        header += [f"lambda_{k}" for k in range(rho.shape[0])]
        rows = ((t, mu[t], *path[t]) for t in range(steps + 1))
    else:
        mu = max_trace(rho, steps)
        rows = zip(range(steps + 1), mu)
    window_text = p.get("fit", str)
    if window_text is not None:
        fit = fit_loglog(mu, _parse_window(window_text, steps))
        print(
            f"fit over t in [{fit.window[0]}, {fit.window[1]}]: slope={fit.slope:.6f} "
            f"intercept={fit.intercept:.6f} r_squared={fit.r_squared:.6f}"
        )
    _write_csv(out, header, rows)
    plot_script = p.get("plot_script", str)
    if plot_script is not None:
        _emit_plot_script(plot_script, out, fit)
        print(f"wrote {plot_script}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    p = _Params(args)
    tamper = p.get("tamper", bool, default=False)
    only = p.get("only", str)
    reports = all_certificates(tamper=tamper)
    if only is not None:
        reports = [r for r in reports if r.name == only]
        if not reports:
            raise InvalidInputError(f"no certificate named {only!r}")
    for report in reports:
        status = " ok " if report.verified else "FAIL"
        line = f"[{status}] {report.name}: {report.claim}"
        if report.detail:
            line += f" ({report.detail})"
        print(line)
    if p.get("gamma_crossing", bool, default=False):
        t1 = gamma_crossing_time(0.753, 0.75)
        print(f"observed crossing of the proper-integral envelope above 1: t1 ~ {t1}")
    json_path = p.get("json", str)
    if json_path is not None:
        payload = {
            "certificates": [
                {
                    "name": r.name,
                    "claim": r.claim,
                    "verified": r.verified,
                    "witness": r.witness,
                    "detail": r.detail,
                }
                for r in reports
            ]
        }
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {json_path}")
    failed = [r.name for r in reports if not r.verified]
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CERTIFICATE
    print(f"all {len(reports)} certificates verified")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    p = _Params(args)
    path = p.get("input", str, required=True)
    column = p.get("column", str, default="mu_t")
    window_text = p.get("window", str, default="auto")
    import csv as _csv

    with open(path, "r", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise InvalidInputError(f"{path}: no column named {column!r}")
        values = []
        for row in reader:
            try:
                values.append(float(row[column]))
            except ValueError as exc:
                raise InvalidInputError(f"{path}: non-numeric value in column {column!r}") from exc
    trace = np.array(values)
    fit = fit_loglog(trace, _parse_window(window_text, trace.shape[0] - 1))
    print(
        f"fit over t in [{fit.window[0]}, {fit.window[1]}]: slope={fit.slope:.6f} "
        f"intercept={fit.intercept:.6f} r_squared={fit.r_squared:.6f}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contraction-lab",
        description="Randomized solvers, contraction-process simulation, rate recursions, and exact certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="flat key=value config file; flags take precedence")
        sp.add_argument("--out", help="output CSV path")

    sp = sub.add_parser("solve", help="run a randomized solver on a system file")
    add_common(sp)
    sp.add_argument("--system", help="plain-text system file")
    sp.add_argument("--method", choices=("rk", "rcd", "block", "sketch"))
    sp.add_argument("--steps", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--block-size", type=int, dest="block_size")
    sp.add_argument("--rht", action=argparse.BooleanOptionalAction, default=None)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("simulate", help="Monte Carlo simulation of a contraction process")
    add_common(sp)
    sp.add_argument("--system", help="system file (methods rk/rcd)")
    sp.add_argument("--method", choices=("rk", "rcd"))
    sp.add_argument("--spectrum", help="synthetic fixed contraction, e.g. '0.5,0.25'")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("recursion", help="deterministic eigenvalue recursion runs")
    add_common(sp)
    sp.add_argument("--spectrum", help="comma list or loglin(n,hi,lo)")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--fit", help="log-log fit window LO:HI or auto")
    sp.add_argument("--lower-bound-family", type=int, dest="lower_bound_family")
    sp.add_argument("--lambda-columns", action=argparse.BooleanOptionalAction, default=None, dest="lambda_columns")
    sp.add_argument("--plot-script", dest="plot_script", help="emit a matplotlib script here")
    sp.set_defaults(func=cmd_recursion)

    sp = sub.add_parser("certify", help="run the exact rational certificate suite")
    add_common(sp)
    sp.add_argument("--only", help="run a single certificate by name")
    sp.add_argument("--tamper", action=argparse.BooleanOptionalAction, default=None)
    sp.add_argument("--json", help="write a machine-readable report here")
    sp.add_argument(
        "--gamma-crossing",
        action=argparse.BooleanOptionalAction,
        default=None,
        dest="gamma_crossing",
        help="also report the (numeric) first horizon where the proper integral exceeds 1",
    )
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("fit", help="fit a power law to a CSV column")
    add_common(sp)
    sp.add_argument("--input", help="CSV produced by recursion/simulate")
    sp.add_argument("--column")
    sp.add_argument("--window", help="LO:HI or auto")
    sp.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InconsistentSystemError as exc:
        print(f"error: inconsistent system: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
