"""Command-line front end: ``run``, ``grid-report`` and ``convergence``."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from .config import RunConfig, build_model, build_portfolio, exposure_dates, load_config
from .exposure import (
    ExposureProfile,
    cva_weight,
    error_metrics,
    evaluate_exposures,
    format_summary,
    speed_up,
    xva_aggregate,
)
from .models import ModelState, simulate_fx_system
from .sparse_grid import build_sparse_grid

__all__ = ["main", "grid_report", "format_grid_report", "convergence_study", "run_config"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
_MAX_D, _MAX_MU = 10, 5


def grid_report(d_max: int = 8, mu_max: int = 4) -> list[dict[str, int]]:
    """Tensor-grid sizes ``n^d`` (n = 3, 4, 5) and Smolyak node counts per dimension.

    Counts come from the grid builder itself, so the report cannot drift
    from the grids actually used.
    """
    if not (1 <= d_max <= _MAX_D and 1 <= mu_max <= _MAX_MU):
        raise ValueError(f"grid report limited to d <= {_MAX_D} and mu <= {_MAX_MU}")
    rows = []
    for d in range(1, d_max + 1):
        row = {"d": d, **{f"tensor_{n}": n**d for n in (3, 4, 5)}}
        row.update({f"smolyak_{mu}": build_sparse_grid(d, mu).size for mu in range(1, mu_max + 1)})
        rows.append(row)
    return rows


def format_grid_report(rows: list[dict[str, int]]) -> str:
    keys = list(rows[0])
    widths = [max(len(k), *(len(f"{r[k]:,}") for r in rows)) + 2 for k in keys]
    lines = ["".join(f"{k:>{w}}" for k, w in zip(keys, widths))]
    lines += ["".join(f"{r[k]:>{w},}" for k, w in zip(keys, widths)) for r in rows]
    return "\n".join(lines) + "\n"


def _simulate(cfg: RunConfig, n_threads: int) -> ModelState:
    params = build_model(cfg.model)
    sim = cfg.simulation
    return simulate_fx_system(params, exposure_dates(sim), sim.n_paths, sim.seed, n_threads)


def _cva(profile: ExposureProfile, cfg: RunConfig) -> float:
    return xva_aggregate(profile, cva_weight(cfg.xva.recovery, cfg.xva.hazard_rate))


def run_config(cfg: RunConfig, out_dir: Path, mode: str = "both", n_threads: int = 1) -> dict[str, ExposureProfile]:
    """Simulate, run the proxy and/or brute-force pipeline and write the artifacts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    state = _simulate(cfg, n_threads)
    portfolio = build_portfolio(cfg, state.params)
    qs = cfg.proxy.quantiles
    profiles: dict[str, ExposureProfile] = {}
    if mode in ("proxy", "both") and cfg.proxy.mode != "brute":
        profiles[cfg.proxy.mode] = evaluate_exposures(
            portfolio, state, cfg.proxy.to_proxy_config(), qs, cfg.proxy.discount_pfe, n_threads=n_threads
        )
    reference = None
    if mode == "brute" or cfg.proxy.mode == "brute" or (mode == "both" and cfg.output.reference):
        reference = evaluate_exposures(
            portfolio, state, cfg.proxy.to_proxy_config(mode="brute"), qs, cfg.proxy.discount_pfe, n_threads=n_threads
        )
        profiles["brute"] = reference

    name = cfg.output.name
    for label, prof in profiles.items():
        prof.to_csv(out_dir / f"{name}_{label}.csv")
    summary = format_summary(profiles, reference if len(profiles) > 1 else None, title=f"{name}: {len(portfolio)} trades")
    summary += "\n" + "\n".join(f"CVA[{label}] = {_cva(p, cfg)!r}" for label, p in profiles.items()) + "\n"
    (out_dir / f"{name}_summary.txt").write_text(summary, encoding="ascii")
    if reference is not None and len(profiles) > 1:
        with open(out_dir / f"{name}_errors.csv", "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["run", "metric", "column", "value"])
            for label, prof in profiles.items():
                if label == "brute":
                    continue
                for metric, cols in error_metrics(reference, prof).items():
                    for col, val in cols.items():
                        writer.writerow([label, metric, col, repr(val)])
    sys.stdout.write(summary)
    return profiles


def convergence_study(
    cfg: RunConfig, sweep: Sequence[int], kind: str, n_threads: int = 1, out_dir: Path | None = None
) -> list[dict[str, object]]:
    """One brute-force reference, then one proxy run per sweep value on the same paths.

    ``kind`` is ``"level"`` (sweep the sparse-grid level) or ``"n1"``.
    """
    if kind not in ("level", "n1"):
        raise ValueError("sweep kind must be 'level' or 'n1'")
    state = _simulate(cfg, n_threads)
    portfolio = build_portfolio(cfg, state.params)
    qs = cfg.proxy.quantiles
    mode = cfg.proxy.mode if cfg.proxy.mode != "brute" else "smolyak"
    reference = evaluate_exposures(
        portfolio, state, cfg.proxy.to_proxy_config(mode="brute"), qs, cfg.proxy.discount_pfe, n_threads=n_threads
    )
    rows = []
    for value in sweep:
        pc = cfg.proxy.to_proxy_config(mode=mode, **{kind: int(value)})
        prof = evaluate_exposures(portfolio, state, pc, qs, cfg.proxy.discount_pfe, n_threads=n_threads)
        errs = error_metrics(reference, prof)
        per_date = int(prof.eval_counts[0])
        row: dict[str, object] = {
            kind: int(value),
            "evaluations": f"{len(prof.dates)}x{per_date}",
            "speed_up": speed_up(state.n_paths, per_date),
        }
        for metric in ("mean_relative", "max_absolute"):
            for col, val in errs[metric].items():
                row[f"{metric}_{col}"] = val
        rows.append(row)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"{cfg.output.name}_convergence.csv", "w", newline="", encoding="ascii") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return rows


def _format_rows(rows: list[dict[str, object]]) -> str:
    keys = list(rows[0])
    cells = [[f"{r[k]:.4g}" if isinstance(r[k], float) else str(r[k]) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) + 2 for i, k in enumerate(keys)]
    lines = ["".join(f"{k:>{w}}" for k, w in zip(keys, widths))]
    lines += ["".join(f"{c:>{w}}" for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _load(path: str, seed: int | None) -> RunConfig:
    cfg = load_config(path)
    if seed is not None:
        cfg = cfg.model_copy(update={"simulation": cfg.simulation.model_copy(update={"seed": seed})})
    return cfg


def _report_validation(exc: ValidationError) -> None:
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        sys.stderr.write(f"config error at {loc}: {err['msg']}\n")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sgexposure", description="Exposure profiles with sparse-grid collocation proxies.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate and compute exposure profiles")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument("--mode", choices=("proxy", "brute", "both"), default="both")
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)

    grid = sub.add_parser("grid-report", help="tensor vs sparse-grid node counts")
    grid.add_argument("--d-max", type=int, default=8)
    grid.add_argument("--mu-max", type=int, default=4)

    conv = sub.add_parser("convergence", help="errors against brute force over a level or n1 sweep")
    conv.add_argument("config")
    group = conv.add_mutually_exclusive_group(required=True)
    group.add_argument("--levels", type=int, nargs="+")
    group.add_argument("--n1", type=int, nargs="+")
    conv.add_argument("--out")
    conv.add_argument("--threads", type=int, default=None)
    conv.add_argument("--seed", type=int, default=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "grid-report":
            sys.stdout.write(format_grid_report(grid_report(args.d_max, args.mu_max)))
            return EXIT_OK
        cfg = _load(args.config, args.seed)
        threads = args.threads or cfg.simulation.n_threads
        out = Path(args.out or cfg.output.directory)
        if args.command == "run":
            run_config(cfg, out, args.mode, threads)
        else:
            kind, sweep = ("level", args.levels) if args.levels else ("n1", args.n1)
            rows = convergence_study(cfg, sweep, kind, threads, out)
            sys.stdout.write(_format_rows(rows))
        return EXIT_OK
    except ValidationError as exc:
        _report_validation(exc)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        sys.stderr.write(f"numerical error ({type(exc).__module__}): {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
