"""Result serialization and figure rendering.

Machine-readable outputs are JSON documents; tabular outputs are delimited
text.  Figures are rendered to files next to the delimited output via the
non-interactive matplotlib backend.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, asdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import SimReport  # noqa: E402

SCHEMA_VERSION = 1
VERSION_TAG = "pht-0.1.0"


def config_hash(config: dict) -> str:
    """Stable content hash of a configuration document."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class RunRecord:
    """Machine-readable record of one CLI invocation."""

    command: str
    config: dict
    config_hash: str
    seed: int | None
    outcome: dict
    version: str = VERSION_TAG
    schema_version: int = SCHEMA_VERSION
    timestamp: float = 0.0

    @classmethod
    def create(cls, command: str, config: dict, seed, outcome: dict) -> "RunRecord":
        return cls(command=command, config=config, config_hash=config_hash(config),
                   seed=seed, outcome=outcome, timestamp=time.time())

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(**d)


def write_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_rates_csv(reports: list[SimReport], path, delimiter: str = ",") -> None:
    """Delimited rejection-rate table, one row per (design point, method)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(["kappa", "method", "rate", "mc_se", "reps"])
        for rep in reports:
            kappa = rep.config.get("kappa", 0.0)
            for method in sorted(rep.rates):
                writer.writerow([kappa, method, f"{rep.rates[method]:.6f}",
                                 f"{rep.mc_se[method]:.6f}", rep.reps])


def render_rates_figure(reports: list[SimReport], path, alpha: float | None = None) -> None:
    """Power curves (rate vs kappa) per method, or a bar chart for a single
    design point."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    methods = sorted({m for rep in reports for m in rep.rates})
    if len(reports) > 1:
        kappas = [rep.config.get("kappa", 0.0) for rep in reports]
        for method in methods:
            rates = [rep.rates.get(method) for rep in reports]
            ax.plot(kappas, rates, marker="o", label=method)
        ax.set_xlabel("signal strength")
        ax.set_ylabel("rejection rate")
    else:
        rep = reports[0]
        ax.bar(methods, [rep.rates[m] for m in methods],
               yerr=[rep.mc_se[m] for m in methods], capsize=4)
        ax.set_ylabel("rejection rate")
    if alpha is not None:
        ax.axhline(alpha, linestyle="--", color="gray", linewidth=1)
    ax.set_ylim(0.0, 1.05)
    if len(reports) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
