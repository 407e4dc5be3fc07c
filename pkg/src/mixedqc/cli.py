"""Command-line entry point: ``mixedqc {sweep-concurrence,fig2,clone,budget,run}``.

Exit statuses: 0 success, 1 check failed, 2 bad configuration or unwritable
output, 3 parse error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .analysis import cnot_concurrence_sweep, default_grid
from .circuit import CircuitRuntimeError, ParseError, execute, parse
from .cloning import (
    PC_VARIANTS,
    figure2_table,
    measured_clone_fidelity,
    universal_clone,
    universal_fidelity_formula,
)
from .qmath import projector
from .states import real_ket
from .ugates import toffoli_budget

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4

SWEEP_TOL = 1e-9
DECIMALS = 9


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    out: str | None = None
    format: str = "csv"
    grid: int = 101
    pc_variant: str = "anchored"
    nmax: int = 20

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unsupported format {self.format!r}")
        if self.grid < 2:
            raise ConfigError("--grid must be at least 2")
        if self.pc_variant not in PC_VARIANTS:
            raise ConfigError(f"unknown --pc-variant {self.pc_variant!r}")


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        text = f"{v:.{DECIMALS}f}"
        # Round-off below the printed precision must not change the bytes.
        return text[1:] if text.startswith("-") and float(text) == 0.0 else text
    return str(v)


def render(columns: list[str], rows: list[Sequence[Any]], fmt: str, metadata: dict | None = None) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([format_value(v) for v in r])
        return buf.getvalue()
    doc = {
        "columns": columns,
        "rows": [dict(zip(columns, r)) for r in rows],
        "metadata": metadata or {},
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    try:
        Path(cfg.out).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {cfg.out}: {exc}") from exc


def cmd_sweep_concurrence(cfg: RunConfig) -> int:
    table = cnot_concurrence_sweep(default_grid(cfg.grid))
    rows = [(x, m, f, abs(m - f)) for x, m, f in table.rows]
    worst = max(r[3] for r in rows)
    meta = dict(table.metadata, max_abs_error=worst, tolerance=SWEEP_TOL)
    emit(cfg, render(["x", "concurrence_measured", "concurrence_formula", "abs_error"], rows, cfg.format, meta))
    return EXIT_OK if worst <= SWEEP_TOL else EXIT_CHECK_FAILED


def cmd_fig2(cfg: RunConfig) -> int:
    if not 1 <= cfg.nmax <= 50:
        raise ConfigError("--nmax must lie in [1, 50]")
    table = figure2_table(cfg.nmax, cfg.pc_variant)
    violated = table.metadata["ordering_violated_at"]
    if violated:
        print(
            f"warning: {cfg.pc_variant} bound is not above the universal fidelity for N = "
            + ", ".join(map(str, violated)),
            file=sys.stderr,
        )
    rows = [r + (cfg.pc_variant,) for r in table.rows]
    emit(cfg, render(["N", "F_universal", "F_pc_bound", "variant"], rows, cfg.format, table.metadata))
    return EXIT_OK


def cmd_clone(cfg: RunConfig, n_in: int, n_out: int, alpha: float) -> int:
    if not 1 <= n_in < n_out <= 8:
        raise ConfigError("need 1 <= N < M <= 8")
    psi = real_ket(alpha)
    out = universal_clone(projector(psi), n_in, n_out)
    measured = [measured_clone_fidelity(out, psi, i) for i in range(n_out)]
    closed = universal_fidelity_formula(n_in) if n_out == n_in + 1 else None
    diff = abs(measured[0] - closed) if closed is not None else None
    cols = ["N", "M", "alpha", "fidelity_measured", "fidelity_closed_form", "difference"]
    row = (n_in, n_out, float(alpha), measured[0], closed, diff)
    emit(cfg, render(cols, [row], cfg.format, {"per_clone": measured}))
    return EXIT_OK


def cmd_budget(cfg: RunConfig, delta: float) -> int:
    if not 0.0 < delta < 1.0:
        raise ConfigError("--delta must lie in (0, 1)")
    n = toffoli_budget(delta)
    row = (float(delta), n, universal_fidelity_formula(n))
    emit(cfg, render(["delta", "N", "F"], [row], cfg.format))
    return EXIT_OK


def cmd_run(cfg: RunConfig, path: str) -> int:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        program = parse(text)
    except ParseError as exc:
        print(f"{path}:{exc.line}:{exc.column}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = execute(program)
    except CircuitRuntimeError as exc:
        print(f"{path}:{exc.line}: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    cols = ["line", "metric", "qubits", "measured", "target", "tolerance", "passed"]
    rows: list[tuple] = [
        (e.line, e.metric, " ".join(f"q{q}" for q in e.qubits), e.measured, e.target, e.tolerance, e.passed)
        for e in report.expectations
    ]
    if cfg.format == "csv":
        rows.append((None, "zeta", "", report.zeta, None, None, None))
        rows.append((None, "fidelity_estimate", "", report.fidelity_estimate, None, None, None))
    meta = dict(
        report.metadata,
        zeta=report.zeta,
        touches=report.touches,
        gate_fidelity=report.gate_fidelity,
        fidelity_estimate=report.fidelity_estimate,
        all_passed=report.all_passed,
    )
    emit(cfg, render(cols, rows, cfg.format, meta))
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", default="csv", choices=["csv", "json"])
    common.add_argument("--grid", type=int, default=101, help="sweep grid points")
    common.add_argument("--pc-variant", default="anchored", choices=list(PC_VARIANTS))
    common.add_argument("--nmax", type=int, default=20)

    p = argparse.ArgumentParser(prog="mixedqc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("sweep-concurrence", parents=[common], help="C-NOT concurrence vs input purity")
    sub.add_parser("fig2", parents=[common], help="Toffoli fidelity vs number of controls")
    c = sub.add_parser("clone", parents=[common], help="simulate the universal N -> M cloner")
    c.add_argument("--n", type=int, default=1)
    c.add_argument("--m", type=int, default=2)
    c.add_argument("--alpha", type=float, default=math.pi / 3)
    b = sub.add_parser("budget", parents=[common], help="controls needed for a loss budget")
    b.add_argument("--delta", type=float, required=True)
    r = sub.add_parser("run", parents=[common], help="parse and execute a circuit file")
    r.add_argument("path")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.subcommand, args.out, args.format, args.grid, args.pc_variant, args.nmax)
        if args.subcommand == "sweep-concurrence":
            return cmd_sweep_concurrence(cfg)
        if args.subcommand == "fig2":
            return cmd_fig2(cfg)
        if args.subcommand == "clone":
            return cmd_clone(cfg, args.n, args.m, args.alpha)
        if args.subcommand == "budget":
            return cmd_budget(cfg, args.delta)
        return cmd_run(cfg, args.path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
