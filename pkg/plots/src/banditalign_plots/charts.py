"""Regret-curve charts from harness aggregate CSVs.

Consumes the aggregate schema (agent_id, t, mean_cum_regret, stderr,
n_seeds) and renders either a linear comparison with shaded standard-error
bands or a log-log chart with dotted power-law reference curves.  Data
points are plotted exactly as stored; nothing is resampled.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

AGGREGATE_COLUMNS = ("agent_id", "t", "mean_cum_regret", "stderr", "n_seeds")

STYLES = ("linear", "loglog")


class SchemaError(ValueError):
    """Input CSV does not conform to the aggregate schema."""


@dataclass(frozen=True)
class AgentCurve:
    agent_id: str
    t: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray


@dataclass(frozen=True)
class ReferenceCurve:
    """Power law c * t^p rendered as a dotted guide line."""

    coefficient: float
    exponent: float

    @property
    def label(self) -> str:
        coeff = f"{self.coefficient:g}" if self.coefficient != 1.0 else ""
        sep = "·" if coeff else ""
        power = f"^{self.exponent:g}" if self.exponent != 1.0 else ""
        return f"{coeff}{sep}t{power}"

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        return self.coefficient * np.power(t, self.exponent)


_REFERENCE_PATTERN = re.compile(
    r"^\s*(?:(?P<coeff>[0-9.eE+-]+)\s*\*\s*)?t(?:\^(?P<exp>[0-9.eE+-]+))?\s*$"
)


def parse_reference(text: str) -> ReferenceCurve:
    """Parse expressions like '2*t', '16*t^0.5', 't^2' into a power law."""
    match = _REFERENCE_PATTERN.match(text)
    if not match:
        raise ValueError(f"cannot parse reference curve {text!r}; expected c*t^p")
    coeff = float(match.group("coeff")) if match.group("coeff") else 1.0
    exponent = float(match.group("exp")) if match.group("exp") else 1.0
    return ReferenceCurve(coeff, exponent)


def read_aggregate(path: Path | str) -> dict[str, AgentCurve]:
    """Load per-agent curves, validating the schema column by column."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        for column in AGGREGATE_COLUMNS:
            if column not in fields:
                raise SchemaError(f"aggregate CSV is missing column {column!r}")
        rows: dict[str, list[tuple[float, float, float]]] = {}
        for row in reader:
            try:
                rows.setdefault(row["agent_id"], []).append(
                    (float(row["t"]), float(row["mean_cum_regret"]), float(row["stderr"]))
                )
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"malformed row {row!r}: {exc}") from exc
    if not rows:
        raise SchemaError("aggregate CSV contains no data rows")
    curves = {}
    for agent_id, entries in rows.items():
        arr = np.array(entries)
        curves[agent_id] = AgentCurve(agent_id, arr[:, 0], arr[:, 1], arr[:, 2])
    return curves


def plot_regret(
    aggregate_csv: Path | str,
    style: str,
    output: Path | str,
    refs: tuple[ReferenceCurve, ...] = (),
    agents: tuple[str, ...] | None = None,
    title: str | None = None,
) -> Path:
    """Render one chart from an aggregate CSV and return the output path."""
    if style not in STYLES:
        raise ValueError(f"style must be one of {STYLES}, got {style!r}")
    curves = read_aggregate(aggregate_csv)
    if agents:
        unknown = [a for a in agents if a not in curves]
        if unknown:
            raise ValueError(f"unknown agents {unknown}; CSV has {sorted(curves)}")
        curves = {a: curves[a] for a in agents}

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for agent_id in sorted(curves):
        curve = curves[agent_id]
        if style == "loglog":
            mask = curve.t >= 1  # t=0 has no logarithm
            ax.loglog(curve.t[mask], curve.mean[mask], label=agent_id)
        else:
            ax.plot(curve.t, curve.mean, label=agent_id)
            ax.fill_between(
                curve.t,
                curve.mean - curve.stderr,
                curve.mean + curve.stderr,
                alpha=0.25,
                linewidth=0,
            )
    if refs:
        t_all = np.concatenate([c.t for c in curves.values()])
        t_ref = np.linspace(max(1.0, t_all.min()), t_all.max(), 256)
        for ref in refs:
            plot = ax.loglog if style == "loglog" else ax.plot
            plot(t_ref, ref.evaluate(t_ref), "k:", linewidth=1.2, label=ref.label)

    ax.set_xlabel("t")
    ax.set_ylabel("cumulative regret")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    output = Path(output)
    fig.savefig(output)
    plt.close(fig)
    return output
