"""Command-line entry point: ``opreal {reproduce,scan,protocol,sample}``.

Exit codes: 0 success, 1 usage error, 2 reproduction tolerance exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Any

import numpy as np

from . import __version__
from .errors import DomainError, NoCertificateError
from .measurement import observable_from_angles, observable_x, observable_y, observable_z
from .ornl import certify_theorem2, classify_werner, werner_thresholds
from .protocols import (
    RNG_ALGORITHM,
    nonadaptive_scenario,
    sample_experiment,
    signal_a_to_a,
    signal_a_to_ab,
    template_scenario,
)
from .qstate import DensityOperator, from_matrix, make_psi, make_werner, maximally_mixed
from .witnesses import (
    BELL_ALGEBRAIC,
    BELL_CLASSICAL,
    BELL_QUANTUM,
    optimize_settings,
    optimize_template_theta,
    steering_functional,
    two_term_steering,
    uncertainty_bound,
)

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2
SIG_DIGITS = 9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{SIG_DIGITS}g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return str(x)


def rounded(x: Any) -> Any:
    """Same value a reader recovers by parsing ``fmt(x)``."""
    if x is None:
        return x
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return float(fmt(x))
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {k: rounded(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [rounded(v) for v in x]
    return x


_PI_EXPR = re.compile(r"^\s*(-?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def real(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/6`` or ``3pi/8``."""
    m = _PI_EXPR.match(text)
    if m:
        coef = m.group(1)
        c = 1.0 if coef in ("", "-") else float(coef)
        if coef == "-":
            c = -1.0
        return c * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def manifest(command: str, parameters: dict, results: Any, seed: int | None = None) -> dict:
    return {
        "command": command,
        "parameters": rounded(parameters),
        "seed": seed,
        "library_version": __version__,
        "results": rounded(results),
    }


def table(rows: list[dict], columns: list[str]) -> str:
    cells = [[fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def emit(out, doc: dict, as_json: bool, text: str):
    if as_json:
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    else:
        out.write(text + "\n")


# reproduce


def reproduce_rows() -> list[dict]:
    """Every headline number, recomputed, next to its published value."""
    t = math.pi / 6
    psi = make_psi(t)
    steer = steering_functional(template_scenario(psi, t))
    max_ent = make_psi(math.pi / 4)
    two = two_term_steering(nonadaptive_scenario(max_ent, [observable_z(), observable_x()], [observable_z(), observable_x()]))
    thresholds = werner_thresholds(t)
    theta_opt, theta_rep = optimize_template_theta()
    bell = optimize_settings(max_ent, "bell", restarts=4, seed=0)
    lhs_any_theta = min(
        steering_functional(template_scenario(make_psi(th), th)).lhs
        for th in np.linspace(0.05, math.pi / 2 - 0.05, 9)
    )
    rows = [
        ("upsilon_bound", uncertainty_bound(template_scenario(psi, t).bob_settings()), 2.5),
        ("steering_max_violation", steer.lhs, 3.0),
        ("steering_min_over_theta", lhs_any_theta, 3.0),
        ("steering_margin", steer.margin_ratio, 6 / 5),
        ("optimal_theta", theta_opt, math.pi / 6),
        ("optimal_theta_margin", theta_rep.margin_ratio, 6 / 5),
        ("two_term_bound", two.classical_bound, 1 + math.sqrt(2) / 2),
        ("two_term_margin", two.margin_ratio, 2 * math.sqrt(2) / (math.sqrt(2) + 1)),
        ("werner_steering_threshold", thresholds.steering, 2 / 3),
        ("werner_bell_threshold", thresholds.bell, 2 / math.sqrt(7)),
        ("bell_classical_bound", BELL_CLASSICAL, 3.0),
        ("bell_quantum_max", bell.report.lhs, BELL_QUANTUM),
        ("bell_algebraic_max", BELL_ALGEBRAIC, 4.0),
    ]
    return [{"name": n, "computed": c, "expected": p, "abs_diff": abs(c - p)} for n, c, p in rows]


def cmd_reproduce(args, out) -> int:
    rows = reproduce_rows()
    for r in rows:
        r["ok"] = bool(r["abs_diff"] <= args.tolerance)
    failed = [r["name"] for r in rows if not r["ok"]]
    doc = manifest("reproduce", {"tolerance": args.tolerance}, rows)
    emit(out, doc, args.json, table(rows, ["name", "computed", "expected", "abs_diff", "ok"]))
    return EXIT_TOLERANCE if failed else EXIT_OK


# scan

SCAN_COLUMNS = ["theta", "f", "lhs", "bound", "margin", "violated", "f_min", "werner_class"]


def scan_row(theta: float, f: float) -> dict:
    rep = steering_functional(template_scenario(make_werner(f, theta), theta))
    try:
        f_min = certify_theorem2(rep, commensurate_promise=True).f_min
    except NoCertificateError:
        f_min = None
    return {
        "theta": theta,
        "f": f,
        "lhs": rep.lhs,
        "bound": rep.classical_bound,
        "margin": rep.margin_ratio,
        "violated": rep.violated,
        "f_min": f_min,
        "werner_class": classify_werner(f, theta).value,
    }


def parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"range must look like START,STOP, got {text!r}")
    try:
        lo, hi = (real(p) for p in parts)
    except argparse.ArgumentTypeError as e:
        raise UsageError(str(e)) from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise UsageError(f"malformed range {text!r}")
    return lo, hi


def scan_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for r in rows:
        w.writerow([fmt(r[c]) for c in SCAN_COLUMNS])
    return buf.getvalue()


def cmd_scan(args, out) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if args.range is None:
        lo, hi = (0.0, 1.0) if args.axis == "f" else (0.0, math.pi / 2)
    else:
        lo, hi = parse_range(args.range)
    if args.axis == "f" and (lo < 0 or hi > 1):
        raise UsageError("f range must lie inside [0, 1]")
    if args.axis == "theta" and (lo < 0 or hi > math.pi / 2):
        raise UsageError("theta range must lie inside [0, pi/2]")
    grid = np.linspace(lo, hi, args.steps)
    if args.axis == "f":
        rows = [scan_row(args.theta, float(v)) for v in grid]
    else:
        rows = [scan_row(float(v), args.f) for v in grid]
    params = {"axis": args.axis, "range": [lo, hi], "steps": args.steps}
    params["theta" if args.axis == "f" else "f"] = args.theta if args.axis == "f" else args.f
    text = scan_csv(rows)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
    doc = manifest("scan", params, rows)
    emit(out, doc, args.json, table(rows, SCAN_COLUMNS))
    return EXIT_OK


# protocol


def parse_observable(text: str):
    named = {"x": observable_x, "y": observable_y, "z": observable_z}
    if text.lower() in named:
        return named[text.lower()]()
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"observable must be x, y, z or POLAR,AZIMUTH, got {text!r}")
    try:
        return observable_from_angles(*(real(p) for p in parts))
    except argparse.ArgumentTypeError as e:
        raise UsageError(str(e)) from None


def cmd_protocol(args, out) -> int:
    obs = parse_observable(args.obs)
    if args.which == "p1":
        if args.mixed:
            phi: DensityOperator = maximally_mixed(2)
        else:
            c2 = math.cos(args.theta / 2) ** 2
            phi = from_matrix(np.diag([c2, 1 - c2]))
        rep = signal_a_to_a(phi, obs)
    else:
        state = maximally_mixed(4) if args.mixed else make_werner(args.f, args.theta)
        rep = signal_a_to_ab(state, obs)
    result = {
        "trace_distance": rep.trace_distance,
        "helstrom_success": rep.helstrom_success,
        "holevo_bits": rep.holevo_bits,
        "operationally_real": rep.operationally_real,
    }
    params = {"protocol": args.which, "theta": args.theta, "f": args.f, "mixed": args.mixed, "obs": args.obs}
    doc = manifest("protocol", params, result)
    text = table([{"quantity": k, "value": v} for k, v in result.items()], ["quantity", "value"])
    emit(out, doc, args.json, text)
    return EXIT_OK


# sample


def cmd_sample(args, out) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    state = maximally_mixed(4) if args.mixed else make_werner(args.f, args.theta)
    res = sample_experiment(template_scenario(state, args.theta), args.n, args.seed)
    result = {
        "estimate": res.estimate,
        "standard_error": res.standard_error,
        "exact": res.exact,
        "z_score": res.z_score,
        "term_estimates": res.term_estimates,
        "rng": RNG_ALGORITHM,
        "counts": [
            {"setting": i, "a": a, "b": b, "count": c} for (i, a, b), c in sorted(res.counts.items())
        ],
    }
    params = {"theta": args.theta, "f": args.f, "mixed": args.mixed, "n": args.n}
    doc = manifest("sample", params, result, seed=args.seed)
    rows = [{"quantity": k, "value": result[k]} for k in ("estimate", "standard_error", "exact", "z_score")]
    emit(out, doc, args.json, table(rows, ["quantity", "value"]) + f"\nrng: {RNG_ALGORITHM}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="opreal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"opreal {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reproduce", help="recompute every headline number")
    r.add_argument("--tolerance", type=float, default=1e-6)
    r.add_argument("--json", action="store_true")

    s = sub.add_parser("scan", help="steering witness along f or theta for W(f, theta)")
    s.add_argument("--axis", choices=("f", "theta"), required=True)
    s.add_argument("--range", help="START,STOP (inclusive); defaults to the full axis")
    s.add_argument("--steps", type=int, default=101)
    s.add_argument("--theta", type=real, default=math.pi / 6)
    s.add_argument("--f", type=real, default=1.0)
    s.add_argument("--csv", help="write the grid as CSV to this path")
    s.add_argument("--json", action="store_true")

    q = sub.add_parser("protocol", help="distinguishability signal of protocol p1 or p2")
    q.add_argument("which", choices=("p1", "p2"))
    q.add_argument("--theta", type=real, default=math.pi / 4)
    q.add_argument("--f", type=real, default=1.0)
    q.add_argument("--obs", default="x", help="x, y, z or POLAR,AZIMUTH in radians")
    q.add_argument("--mixed", action="store_true", help="use the maximally mixed state")
    q.add_argument("--json", action="store_true")

    m = sub.add_parser("sample", help="Monte-Carlo estimate of the template steering sum")
    m.add_argument("--theta", type=real, default=math.pi / 6)
    m.add_argument("--f", type=real, default=1.0)
    m.add_argument("--mixed", action="store_true", help="use the maximally mixed state")
    m.add_argument("--n", type=int, default=1_000_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--json", action="store_true")
    return p


COMMANDS = {"reproduce": cmd_reproduce, "scan": cmd_scan, "protocol": cmd_protocol, "sample": cmd_sample}


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (UsageError, DomainError) as e:
        sys.stderr.write(f"opreal: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
