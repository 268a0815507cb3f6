"""Command-line entry points: one- and two-sample tests on delimited data
files, and the Monte Carlo simulation harness.

Exit codes: 0 success, 2 usage/configuration, 3 data validation, 4 numerical
degeneracy.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .datagen import CovModel
from .errors import (ConfigError, DataValidationError, DegenerateVarianceError,
                     PhtError, SingularBlockError)
from .harness import SimConfig, run_power, run_size
from .one_sample import test_one_sample
from .report import RunRecord, render_rates_figure, write_json, write_rates_csv
from .tau_select import TauSelectConfig
from .two_sample import test_two_sample

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

PRESETS = {}
for _i, _kind in enumerate(("ar", "alt-ar", "block-cs", "diagonal"), start=1):
    for _p in (100, 500):
        PRESETS[f"sigma{_i}-p{_p}"] = {
            "n1": 30, "n2": 25, "p": _p,
            "model": {"kind": _kind, "rho": 0.9, "block_size": 5},
            "dist": "normal", "kappa": 0.0, "beta": 0.0, "alpha": 0.05,
            "reps": 1000, "tau0": 0.8, "methods": ["PHT"], "seed": 0,
        }


def load_table(path, group_col=None):
    """Read a delimited text file (comma or tab) with a header row.

    Returns (matrix, header) or, with ``group_col``, (x, y, header) split by
    the two distinct group labels (ordered by first appearance).
    """
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"data file not found: {path}")
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataValidationError(f"{path}: empty file")
    delim = "\t" if ("\t" in lines[0] and "," not in lines[0]) else ","
    header = [h.strip() for h in lines[0].split(delim)]
    gidx = None
    if group_col is not None:
        if group_col not in header:
            raise DataValidationError(f"{path}: group column {group_col!r} not in header")
        gidx = header.index(group_col)
    rows, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(delim)]
        if len(cells) != len(header):
            raise DataValidationError(
                f"{path}: line {lineno}: expected {len(header)} cells, got {len(cells)}"
            )
        if gidx is not None:
            labels.append(cells[gidx])
            cells = cells[:gidx] + cells[gidx + 1:]
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise DataValidationError(f"{path}: line {lineno}: {exc}") from None
        if not all(np.isfinite(vals)):
            raise DataValidationError(f"{path}: line {lineno}: non-finite value")
        rows.append(vals)
    if not rows:
        raise DataValidationError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    cols = [h for k, h in enumerate(header) if k != gidx]
    if gidx is None:
        return data, cols
    distinct = list(dict.fromkeys(labels))
    if len(distinct) != 2:
        raise DataValidationError(
            f"{path}: group column must have exactly 2 distinct labels, got {len(distinct)}"
        )
    labels = np.asarray(labels)
    return data[labels == distinct[0]], data[labels == distinct[1]], cols


def load_mu0(path, p):
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"mu0 file not found: {path}")
    tokens = path.read_text().replace(",", " ").split()
    vals = []
    for tok in tokens:
        try:
            vals.append(float(tok))
        except ValueError:
            if not vals:  # tolerate a header token line before any numbers
                continue
            raise DataValidationError(f"{path}: cannot parse {tok!r}") from None
    if len(vals) != p:
        raise DataValidationError(f"{path}: expected {p} values for mu0, got {len(vals)}")
    return np.asarray(vals)


def _parse_tau0(text):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"--tau0 must be a number or 'auto', got {text!r}") from None


def _resolve_seed(seed):
    if seed is not None:
        return int(seed)
    drawn = int(np.random.SeedSequence().entropy % (2**31))
    print(f"seed not given; using entropy seed {drawn}")
    return drawn


def _print_outcome(outcome):
    print(f"statistic     {outcome.statistic:.6g}")
    print(f"trace_hat     {outcome.trace_hat:.6g}")
    print(f"z             {outcome.z:.6g}")
    print(f"p_value       {outcome.p_value:.6g}")
    print(f"tau0_used     {outcome.tau0_used:.6g}")
    print(f"n_pairs       {outcome.n_pairs}")
    print(f"n_singles     {outcome.n_singles}")
    print(f"reject@{outcome.alpha:g}  {outcome.reject}")


def _write_record(args, command, config, seed, outcome_dict):
    if getattr(args, "out", None):
        record = RunRecord.create(command=command, config=config, seed=seed,
                                  outcome=outcome_dict)
        write_json(record.to_dict(), args.out)


def cmd_test_one(args) -> int:
    data, _ = load_table(args.data)
    mu0 = np.zeros(data.shape[1]) if args.mu0_zero else load_mu0(args.mu0, data.shape[1])
    seed = _resolve_seed(args.seed)
    outcome = test_one_sample(
        data, mu0, tau0=_parse_tau0(args.tau0), alpha=args.alpha,
        select_cfg=TauSelectConfig(seed=seed),
    )
    _print_outcome(outcome)
    config = {"data": str(args.data), "mu0": "zero" if args.mu0_zero else str(args.mu0),
              "tau0": args.tau0, "alpha": args.alpha}
    _write_record(args, "test-one", config, seed, outcome.to_dict())
    return EXIT_OK


def cmd_test_two(args) -> int:
    x, y, _ = load_table(args.data, group_col=args.group_col)
    seed = _resolve_seed(args.seed)
    outcome = test_two_sample(
        x, y, tau0=_parse_tau0(args.tau0), alpha=args.alpha,
        select_cfg=TauSelectConfig(seed=seed),
    )
    _print_outcome(outcome)
    config = {"data": str(args.data), "group_col": args.group_col,
              "tau0": args.tau0, "alpha": args.alpha}
    _write_record(args, "test-two", config, seed, outcome.to_dict())
    return EXIT_OK


_CONFIG_KEYS = {"n1", "n2", "p", "model", "dist", "kappa", "beta", "alpha", "reps",
                "tau0", "methods", "seed", "n_resamples", "threads", "kappa_grid"}
_MODEL_KEYS = {"kind", "rho", "block_size", "unit_scales"}


def _parse_sim_config(doc: dict, threads: int | None) -> tuple[SimConfig, list | None]:
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    model_doc = doc.get("model")
    if not isinstance(model_doc, dict):
        raise ConfigError("config field 'model' must be a mapping")
    unknown = set(model_doc) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown model keys: {sorted(unknown)}")
    for key in ("n1", "n2", "p"):
        if key not in doc:
            raise ConfigError(f"config field {key!r} is required")
    model = CovModel(kind=model_doc.get("kind", "diagonal"), p=int(doc["p"]),
                     rho=float(model_doc.get("rho", 0.9)),
                     block_size=int(model_doc.get("block_size", 5)),
                     unit_scales=bool(model_doc.get("unit_scales", False)))
    kappa_grid = doc.get("kappa_grid")
    config = SimConfig(
        n1=int(doc["n1"]), n2=int(doc["n2"]), p=int(doc["p"]), model=model,
        dist=doc.get("dist", "normal"), kappa=float(doc.get("kappa", 0.0)),
        beta=float(doc.get("beta", 0.0)), alpha=float(doc.get("alpha", 0.05)),
        reps=int(doc.get("reps", 1000)),
        tau0=doc.get("tau0", 0.8) if doc.get("tau0") == "auto" else float(doc.get("tau0", 0.8)),
        methods=tuple(doc.get("methods", ["PHT"])), seed=int(doc.get("seed", 0)),
        n_resamples=int(doc.get("n_resamples", 199)),
        threads=int(threads if threads is not None else doc.get("threads", 1)),
    )
    config.validate()
    return config, kappa_grid


def cmd_simulate(args) -> int:
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; known: {sorted(PRESETS)}")
        doc = dict(PRESETS[args.preset])
    else:
        path = Path(args.config)
        if not path.exists():
            raise DataValidationError(f"config file not found: {path}")
        import json

        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    config, kappa_grid = _parse_sim_config(doc, args.threads)

    if kappa_grid is not None:
        reports = run_power(config, kappa_grid)
    else:
        reports = [run_size(config)]

    for rep in reports:
        kappa = rep.config.get("kappa", 0.0)
        for method in sorted(rep.rates):
            print(f"kappa={kappa:g}  {method:5s}  rate={rep.rates[method]:.4f}  "
                  f"mc_se={rep.mc_se[method]:.4f}  reps={rep.reps}")
    print(f"wall_time_s={sum(r.wall_time_s for r in reports):.2f}")

    if args.out:
        out = Path(args.out)
        payload = {"schema_version": 1, "reports": [r.to_stable_dict() for r in reports]}
        write_json(payload, out)
        write_rates_csv(reports, out.with_suffix(".csv"))
        if args.figures:
            render_rates_figure(reports, out.with_suffix(".png"), alpha=config.alpha)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pht", description="Pairwise Hotelling tests for high-dimensional means"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("test-one", help="one-sample mean test on a delimited file")
    p1.add_argument("data", help="delimited data file, rows=observations")
    g = p1.add_mutually_exclusive_group(required=True)
    g.add_argument("--mu0", help="file with the p hypothesized means")
    g.add_argument("--mu0-zero", action="store_true", help="test against the zero vector")
    p1.add_argument("--tau0", default="auto", help="threshold in [0,1] or 'auto'")
    p1.add_argument("--alpha", type=float, default=0.05)
    p1.add_argument("--seed", type=int, default=None)
    p1.add_argument("--out", help="write a JSON run record here")
    p1.set_defaults(fn=cmd_test_one)

    p2 = sub.add_parser("test-two", help="two-sample mean test on a labeled file")
    p2.add_argument("data")
    p2.add_argument("--group-col", required=True, help="header name of the group label column")
    p2.add_argument("--tau0", default="auto")
    p2.add_argument("--alpha", type=float, default=0.05)
    p2.add_argument("--seed", type=int, default=None)
    p2.add_argument("--out")
    p2.set_defaults(fn=cmd_test_two)

    p3 = sub.add_parser("simulate", help="run a Monte Carlo size/power experiment")
    p3.add_argument("config", nargs="?", help="JSON config mirroring the harness fields")
    p3.add_argument("--preset", help="named design, e.g. sigma1-p100")
    p3.add_argument("--out", help="JSON report path; CSV (and figure) land beside it")
    p3.add_argument("--figures", action="store_true", help="render a PNG next to the output")
    p3.add_argument("--threads", type=int, default=None)
    p3.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and not (args.config or args.preset):
        parser.error("simulate needs a config file or --preset")
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularBlockError, DegenerateVarianceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataValidationError, PhtError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
