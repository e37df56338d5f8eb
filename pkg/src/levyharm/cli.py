"""Command-line front end: configs in, CSV/JSON artifacts out.

Subcommands: simulate | theory | ergodic | figures | check-measure.
Every command is a deterministic function of (config, seed); repeated runs
write byte-identical files. Exit codes: 0 success, 2 config validation,
3 numerical failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import charfn, ergodics
from .config import ConfigError, RunConfig
from .levy import check_normalization
from .quadrature import NumericalError
from .streams import RandomStream
from .synthesis import evaluate


def _write_text(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_csv(path, header, rows):
    lines = [header]
    lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def _linspace(grid3):
    lo, hi, count = grid3
    return np.linspace(lo, hi, int(count))


def cmd_simulate(cfg: RunConfig, out_dir: str) -> list[str]:
    stream = RandomStream(cfg.generation.seed, cfg.generation.label)
    expansion = cfg.build_expansion(stream)
    path = evaluate(expansion, cfg.grid.t0, cfg.grid.dt, cfg.grid.n)
    files = []
    p = os.path.join(out_dir, "path.csv")
    path.save_csv(p)
    files.append(p)
    p = os.path.join(out_dir, "path.bin")
    path.save_binary(p)
    files.append(p)
    p = os.path.join(out_dir, "expansion.json")
    _write_text(p, expansion.to_json() + "\n")
    files.append(p)
    return files


def cmd_theory(cfg: RunConfig, out_dir: str, what: str) -> list[str]:
    measure = cfg.build_measure()
    spectrum = cfg.build_spectrum()
    if what == "cf":
        u = _linspace(cfg.analysis.u_grid)
        values = charfn.marginal_cf(u, measure, spectrum)
        out = os.path.join(out_dir, "theory_cf.csv")
        _write_csv(out, "u,value", zip(u, values))
    elif what == "density":
        x = _linspace(cfg.analysis.x_grid)
        values = charfn.marginal_density(x, measure, spectrum)
        out = os.path.join(out_dir, "theory_density.csv")
        _write_csv(out, "x,value", zip(x, values))
    elif what == "acov":
        taus = np.asarray(cfg.analysis.taus, dtype=float)
        values = charfn.autocovariance(taus, spectrum)
        out = os.path.join(out_dir, "theory_acov.csv")
        _write_csv(out, "tau,value", zip(taus, values))
    else:
        raise ConfigError(f"theory.what: unknown table {what!r}")
    return [out]


def _ergodic_batch(args):
    cfg_doc, k0, k1 = args
    cfg = RunConfig.from_dict(cfg_doc)
    taus = np.asarray(cfg.analysis.taus, dtype=float)
    horizon = cfg.grid.dt * (cfg.grid.n - 1)
    limits = np.empty((k1 - k0, taus.size))
    timeavg = np.empty((k1 - k0, taus.size))
    x0 = np.empty(k1 - k0)
    for k in range(k0, k1):
        stream = RandomStream(cfg.generation.seed, f"ergodic/r{k}")
        exp = cfg.build_expansion(stream)
        limits[k - k0] = ergodics.random_limit_acov(exp, taus)
        rep = ergodics.time_average_report(exp, horizon, taus, cfg.grid.dt, t0=cfg.grid.t0)
        timeavg[k - k0] = rep.time_avg_acov
        x0[k - k0] = rep.time_avg_mean
    return limits, timeavg, x0


def cmd_ergodic(cfg: RunConfig, out_dir: str, jobs: int) -> list[str]:
    taus = np.asarray(cfg.analysis.taus, dtype=float)
    n_real = cfg.analysis.n_real
    horizon = cfg.grid.dt * (cfg.grid.n - 1)
    for t in taus:
        if t >= horizon / 2.0:
            raise ConfigError(
                f"analysis.taus: {t} is not below half the grid horizon {horizon}"
            )

    edges = np.linspace(0, n_real, min(jobs, n_real) + 1).astype(int)
    batches = [(cfg.to_dict(), int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if jobs > 1 and len(batches) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_ergodic_batch, batches))
    else:
        parts = [_ergodic_batch(b) for b in batches]
    limits = np.concatenate([p[0] for p in parts])
    timeavg = np.concatenate([p[1] for p in parts])
    means = np.concatenate([p[2] for p in parts])

    files = []
    rows = zip(
        taus,
        timeavg.mean(axis=0),
        limits.mean(axis=0),
        np.abs(timeavg - limits).mean(axis=0),
    )
    p = os.path.join(out_dir, "ergodic_tau.csv")
    _write_csv(p, "tau,time_avg,random_limit,abs_err", rows)
    files.append(p)

    report = {
        "n_real": n_real,
        "horizon": horizon,
        "taus": taus.tolist(),
        "time_avg_mean": {"mean": float(means.mean()), "std": float(means.std(ddof=1)) if n_real > 1 else 0.0},
        "random_limit": {
            "mean": limits.mean(axis=0).tolist(),
            "std": (limits.std(axis=0, ddof=1) if n_real > 1 else np.zeros(taus.size)).tolist(),
        },
        "time_avg_acov": {
            "mean": timeavg.mean(axis=0).tolist(),
            "std": (timeavg.std(axis=0, ddof=1) if n_real > 1 else np.zeros(taus.size)).tolist(),
        },
        "abs_error_mean": np.abs(timeavg - limits).mean(axis=0).tolist(),
    }
    p = os.path.join(out_dir, "ergodic_report.json")
    _write_text(p, json.dumps(report, sort_keys=True, indent=1) + "\n")
    files.append(p)
    return files


def _histogram(values, bins):
    counts, edges = np.histogram(values, bins=bins)
    mass = counts / counts.sum()
    return edges, mass


def cmd_figures(cfg: RunConfig, out_dir: str) -> list[str]:
    measure = cfg.build_measure()
    spectrum = cfg.build_spectrum()
    files = []

    single = evaluate(
        cfg.build_expansion(RandomStream(cfg.generation.seed, "figures/single")),
        cfg.grid.t0, cfg.grid.dt, cfg.grid.n,
    ).values
    pooled = [single]
    for k in range(1, cfg.analysis.pool):
        exp = cfg.build_expansion(RandomStream(cfg.generation.seed, f"figures/r{k}"))
        pooled.append(evaluate(exp, cfg.grid.t0, cfg.grid.dt, cfg.grid.n).values)
    pooled = np.concatenate(pooled)

    x = _linspace(cfg.analysis.x_grid)
    density = charfn.marginal_density(x, measure, spectrum)
    p = os.path.join(out_dir, "figure_density.csv")
    _write_csv(p, "x,density", zip(x, density))
    files.append(p)

    stats = {}
    for name, values in (("single", single), ("pooled", pooled)):
        edges, mass = _histogram(values, cfg.analysis.bins)
        p = os.path.join(out_dir, f"figure_hist_{name}.csv")
        _write_csv(p, "left,right,mass", zip(edges[:-1], edges[1:], mass))
        files.append(p)
        centers = 0.5 * (edges[:-1] + edges[1:])
        expected = charfn.marginal_density(centers, measure, spectrum) * np.diff(edges)
        expected = np.maximum(expected, 1e-300)
        expected = expected / expected.sum() * values.size
        counts = mass * values.size
        chi2 = float(np.sum((counts - expected) ** 2 / expected))
        stats[name] = {
            "n_samples": int(values.size),
            "chi2_iid_reference": chi2,
            "dof": int(cfg.analysis.bins - 1),
        }
    p = os.path.join(out_dir, "figures_stats.json")
    _write_text(p, json.dumps(stats, sort_keys=True, indent=1) + "\n")
    files.append(p)
    return files


def cmd_check_measure(cfg: RunConfig, out_dir: str | None) -> list[str]:
    report = check_normalization(cfg.build_measure())
    text = json.dumps(report.to_dict(), sort_keys=True, indent=1)
    print(text)
    if out_dir is not None:
        p = os.path.join(out_dir, "measure_report.json")
        _write_text(p, text + "\n")
        return [p]
    return []


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyharm",
        description="Synthesize random-frequency harmonic signals and their diagnostics",
    )
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override generation.seed")
    parser.add_argument("--label", default=None, help="override generation.label (substream)")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    parser.add_argument(
        "--jobs", type=int, default=None,
        help="worker processes for ensembles (default: available cores)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", help="write one sample path and its expansion")
    theory = sub.add_parser("theory", help="write theoretical tables")
    theory.add_argument("--what", choices=("cf", "density", "acov"), default="cf")
    sub.add_parser("ergodic", help="time-average vs random-limit ensemble report")
    sub.add_parser("figures", help="density and histogram tables")
    sub.add_parser("check-measure", help="report the measure's moment normalizations")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config)
        if args.seed is not None or args.label is not None:
            doc = cfg.to_dict()
            if args.seed is not None:
                doc["generation"]["seed"] = args.seed
            if args.label is not None:
                doc["generation"]["label"] = args.label
            cfg = RunConfig.from_dict(doc)
        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        jobs = args.jobs if args.jobs and args.jobs > 0 else (os.cpu_count() or 1)
        if args.command == "simulate":
            files = cmd_simulate(cfg, out_dir)
        elif args.command == "theory":
            files = cmd_theory(cfg, out_dir, args.what)
        elif args.command == "ergodic":
            files = cmd_ergodic(cfg, out_dir, jobs)
        elif args.command == "figures":
            files = cmd_figures(cfg, out_dir)
        elif args.command == "check-measure":
            files = cmd_check_measure(cfg, out_dir)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
