"""Batch command-line front-end.

Subcommands run the experiment grids, certify and stretch graphs, run
the convergence study, and analyse audit logs; results land as CSV or
edge-list files in the chosen output directory.  Every run is fully
determined by its flags plus the master seed: cell-level seeds derive
from (master seed, cell coordinates) through numpy's SeedSequence, so
worker count and completion order never change the bytes written.

Options may also come from a config file of one `key = value` per
line (`#` starts a comment); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .attacks import (
    marginal_distribution,
    run_fraction_grid,
    run_rounds_grid,
    write_grid_csv,
    write_marginal_csv,
)
from .audit import AuditError, analyse_audit_file
from .averaging import run_convergence_study, write_converge_csv, write_plot_data
from .defence import certify, verify_no_partial_solutions
from .graphs import (
    erdos_renyi,
    girth,
    read_edge_list,
    stretch_to_girth,
    write_edge_list,
)

__all__ = ["RunConfig", "main"]


def parse_int_range(text: str) -> list[int]:
    """`4`, `3..15` (inclusive), or `3,5,9`."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        values = list(range(int(lo), int(hi) + 1))
        if not values:
            raise ValueError(f"empty range {text!r}")
        return values
    return [int(part) for part in text.split(",")]


def parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",")]


def parse_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise ValueError(f"seed {value} outside u64")
    return value


@dataclass(frozen=True)
class _Option:
    name: str
    convert: Callable
    default: object = None
    required: bool = False
    help: str = ""


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation: the subcommand plus its typed options.

    The options together with the master seed fully determine every
    output byte.
    """

    subcommand: str
    options: dict

    def __getattr__(self, name):
        try:
            return self.options[name.replace("_", "-")]
        except KeyError:
            raise AttributeError(name) from None


_COMMON = [
    _Option("seed", parse_seed, 0, help="master seed (u64)"),
    _Option("out", str, ".", help="output directory"),
    _Option("workers", int, None, help="parallel worker count"),
    _Option("config", str, None, help="key = value option file; flags win"),
]

_SPECS: dict[str, list[_Option]] = {
    "attack-grid": [
        _Option("k", int, required=True, help="adversary count"),
        _Option("n", parse_int_range, required=True, help="neighbour counts"),
        _Option("m", parse_int_range, help="edge counts (default: all admissible)"),
        _Option("samples", int, 1000, help="graphs per cell"),
        *_COMMON,
    ],
    "rounds-grid": [
        _Option("k", int, required=True, help="adversary count"),
        _Option("n", parse_int_range, required=True, help="neighbour counts"),
        _Option("m", parse_int_range, help="edge counts (default: all admissible)"),
        _Option("samples", int, 1000, help="graphs per cell"),
        _Option("reps", int, 100, help="attack repetitions per solvable graph"),
        _Option("max-rounds", int, 250, help="truncation horizon"),
        *_COMMON,
    ],
    "defence-check": [
        _Option("graph", str, required=True, help="edge-list file to certify"),
        _Option("k", int, required=True, help="colluding-set size to check"),
        _Option("trials", int, 0, help="empirical attack trials (0: certificate only)"),
        _Option("rounds", int, 500, help="simulated rounds per trial"),
        *_COMMON,
    ],
    "stretch": [
        _Option("girth", int, required=True, help="target girth"),
        _Option("graph", str, help="edge-list file to stretch"),
        _Option("nodes", int, help="generate: node count"),
        _Option("p", float, help="generate: edge probability"),
        *_COMMON,
    ],
    "converge": [
        _Option("nodes", int, 50, help="node count"),
        _Option("p", parse_float_list, [0.1, 0.5, 0.9], help="edge probabilities"),
        _Option("girths", parse_int_range, list(range(3, 26)), help="girth targets"),
        _Option("reps", int, 1000, help="repetitions per cell"),
        _Option("cap", int, 10**6, help="round cap per run"),
        *_COMMON,
    ],
    "audit": [
        _Option("log", str, required=True, help="audit log file"),
        *_COMMON,
    ],
}


def read_config_file(path: str) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    values = {}
    for number, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        key, eq, value = (part.strip() for part in text.partition("="))
        if not eq or not key or not value:
            raise ValueError(f"line {number}: expected `key = value`, got {raw.strip()!r}")
        values[key] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumrecon",
        description="Reconstruction-attack experiments and girth defences.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, options in _SPECS.items():
        p = sub.add_parser(name)
        for opt in options:
            p.add_argument(f"--{opt.name}", type=str, default=None, help=opt.help)
    return parser


def resolve(subcommand: str, args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file values over defaults, then type them."""
    flags = {
        opt.name: getattr(args, opt.name.replace("-", "_"))
        for opt in _SPECS[subcommand]
    }
    file_values = {}
    if flags["config"] is not None:
        file_values = read_config_file(flags["config"])
        unknown = set(file_values) - {o.name for o in _SPECS[subcommand]}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    options = {}
    for opt in _SPECS[subcommand]:
        raw = flags[opt.name]
        if raw is None:
            raw = file_values.get(opt.name)
        if raw is None:
            if opt.required:
                raise ValueError(f"missing required option --{opt.name}")
            options[opt.name] = opt.default
        else:
            options[opt.name] = opt.convert(raw)
    return RunConfig(subcommand, options)


def _ensure_out(cfg: RunConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def cmd_attack_grid(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    records = run_fraction_grid(
        cfg.k,
        cfg.n,
        samples=cfg.samples,
        seed=cfg.seed,
        m_values=cfg.m,
        workers=cfg.workers,
    )
    grid_path = os.path.join(out, "attack_grid.csv")
    marginal_path = os.path.join(out, "attack_marginal.csv")
    write_grid_csv(records, grid_path)
    write_marginal_csv(marginal_distribution(records), marginal_path)
    feasible = sum(1 for r in records if r.feasible)
    print(f"{len(records)} cells ({feasible} feasible) -> {grid_path}, {marginal_path}")
    return 0 if records else 1


def cmd_rounds_grid(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    records = run_rounds_grid(
        cfg.k,
        cfg.n,
        samples=cfg.samples,
        reps=cfg.reps,
        max_rounds=cfg.max_rounds,
        seed=cfg.seed,
        m_values=cfg.m,
        workers=cfg.workers,
    )
    path = os.path.join(out, "rounds_grid.csv")
    write_grid_csv(records, path)
    runs = [r for rec in records for r in rec.rounds if r is not None]
    sums = [s for rec in records for s in rec.summations if s is not None]
    if runs:
        print(
            f"mean rounds {np.mean(runs):.2f}, "
            f"summations per adversary {np.mean(sums) / cfg.k:.2f} "
            f"over {len(runs)} successful runs"
        )
    print(f"{len(records)} cells -> {path}")
    return 0 if records else 1


def cmd_defence_check(cfg: RunConfig) -> int:
    graph = read_edge_list(cfg.graph)
    cert = certify(graph)
    shortest = "acyclic" if cert.girth is None else str(cert.girth)
    bound = "unbounded" if cert.max_safe_k is None else str(cert.max_safe_k)
    print(f"nodes {cert.node_count} edges {cert.edge_count} girth {shortest}")
    print(f"max safe colluding-set size: {bound}")
    print(f"fingerprint {cert.fingerprint}")
    safe = cert.max_safe_k is None or cfg.k <= cert.max_safe_k
    print(f"k={cfg.k}: {'safe' if safe else 'not certified'}")
    if cfg.trials > 0:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
        report = verify_no_partial_solutions(graph, cfg.k, cfg.trials, cfg.rounds, rng)
        print(
            f"empirical: {report.solution_trials} of {report.trials} trials "
            f"leaked within {report.rounds} rounds"
        )
    return 0


def cmd_stretch(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
    if cfg.graph is not None:
        graph = read_edge_list(cfg.graph)
    elif cfg.nodes is not None and cfg.p is not None:
        graph = erdos_renyi(cfg.nodes, cfg.p, rng)
    else:
        raise ValueError("need --graph, or both --nodes and --p")
    stretched = stretch_to_girth(graph, cfg.girth, rng)
    path = os.path.join(out, "stretched.edges")
    write_edge_list(stretched, path)
    reached = girth(stretched)
    print(
        f"girth {'acyclic' if reached is None else reached}, "
        f"{stretched.edge_count} of {graph.edge_count} edges kept -> {path}"
    )
    return 0


def cmd_converge(cfg: RunConfig) -> int:
    out = _ensure_out(cfg)
    records = run_convergence_study(
        node_count=cfg.nodes,
        edge_probabilities=cfg.p,
        girths=cfg.girths,
        reps=cfg.reps,
        cap=cfg.cap,
        seed=cfg.seed,
        workers=cfg.workers,
    )
    csv_path = os.path.join(out, "converge.csv")
    plot_path = os.path.join(out, "converge_plot.csv")
    write_converge_csv(records, csv_path)
    write_plot_data(records, plot_path)
    capped = sum(r.cap_exceeded for r in records)
    print(f"{len(records)} cells, {capped} capped runs -> {csv_path}, {plot_path}")
    expected = len(cfg.p) * len(set(cfg.girths))
    return 0 if len(records) == expected else 1


def cmd_audit(cfg: RunConfig) -> int:
    result = analyse_audit_file(cfg.log)
    print(
        f"{result.summation_count} summations over "
        f"{len(result.neighbour_ids)} neighbours: "
        f"{result.leak_count} values exposed"
    )
    for leak in result.leaks:
        shown = "unknown (no totals)" if leak.value is None else str(leak.value)
        weights = ", ".join(str(c) for c in leak.coefficients)
        print(
            f"neighbour {leak.neighbour} version {leak.version} = {shown}"
            f"  [coefficients: {weights}]"
        )
    return 0


_COMMANDS = {
    "attack-grid": cmd_attack_grid,
    "rounds-grid": cmd_rounds_grid,
    "defence-check": cmd_defence_check,
    "stretch": cmd_stretch,
    "converge": cmd_converge,
    "audit": cmd_audit,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = resolve(args.subcommand, args)
        return _COMMANDS[cfg.subcommand](cfg)
    except (AuditError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
