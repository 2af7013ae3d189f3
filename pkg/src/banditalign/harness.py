"""Experiment orchestration: configs, seed fan-out, episodes, aggregation.

An experiment is a grid of (agent, seed ordinal) episodes.  Every episode
gets its own 64-bit seed derived from the base seed, and inside an episode
the instance draw, the observation stream, and the agent's randomness are
three further derived streams, so any single episode is bit-reproducible
in isolation.  Episodes are embarrassingly parallel; aggregation and file
output happen after a join barrier in a deterministic order.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agents import AgentKind, AgentSpec, make_agent
from .core import ActionKind, BeliefState, apply
from .environment import (
    RegretTrace,
    TraceRecord,
    episode_streams,
    mix_seed,
    optimal_reward,
    sample_instance,
    step,
    true_expected_reward,
)

TRACE_COLUMNS = (
    "agent_id",
    "seed",
    "t",
    "action_kind",
    "action_index",
    "observation",
    "instant_regret",
    "cum_regret",
)
AGGREGATE_COLUMNS = ("agent_id", "t", "mean_cum_regret", "stderr", "n_seeds")

# Dense recording up to this step; logarithmic spacing beyond.
_DENSE_LIMIT = 1024
_LOG_POINTS_PER_DECADE = 100


@dataclass(frozen=True)
class ExperimentConfig:
    arms: int
    horizon: int
    seeds: int
    base_seed: int
    agents: tuple[AgentSpec, ...]
    mc_samples: int = 512
    record_stride: int = 1
    checkpoints: str = "log"
    output_dir: Path = Path("out")

    def __post_init__(self) -> None:
        if self.arms < 1:
            raise ValueError("arms must be at least 1")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.seeds < 1:
            raise ValueError("seeds must be at least 1")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.checkpoints not in ("linear", "log"):
            raise ValueError("checkpoints must be 'linear' or 'log'")
        if not self.agents:
            raise ValueError("need at least one agent")
        labels = [spec.label for spec in self.agents]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate agent labels: {labels}")
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def default_config(output_dir: Path | str = Path("out"), base_seed: int = 12345) -> ExperimentConfig:
    """The stock comparison: IDS against both explore-then-exploit horizons and TS."""
    return ExperimentConfig(
        arms=16,
        horizon=100_000,
        seeds=10,
        base_seed=base_seed,
        agents=(
            AgentSpec(AgentKind.IDS, mc_samples=512),
            AgentSpec(AgentKind.EXPLORE_THEN_EXPLOIT, tau=3200),
            AgentSpec(AgentKind.EXPLORE_THEN_EXPLOIT, tau=16000),
            AgentSpec(AgentKind.THOMPSON),
        ),
        output_dir=Path(output_dir),
    )


# ---------------------------------------------------------------------------
# Config file parsing: flat "key = value" lines, '#' comments, repeatable
# "agent = <kind> [param=value ...]" entries.
# ---------------------------------------------------------------------------

_INT_KEYS = ("arms", "horizon", "seeds", "base_seed", "mc_samples", "record_stride")


def parse_agent(text: str, default_mc_samples: int = 512) -> AgentSpec:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty agent entry")
    try:
        kind = AgentKind(tokens[0])
    except ValueError:
        names = ", ".join(k.value for k in AgentKind)
        raise ValueError(f"unknown agent kind {tokens[0]!r} (expected one of: {names})")
    params: dict[str, float | int] = {}
    for token in tokens[1:]:
        if "=" not in token:
            raise ValueError(f"malformed agent parameter {token!r} (expected key=value)")
        key, value = token.split("=", 1)
        if key == "tau":
            params["tau"] = int(value)
        elif key == "epsilon":
            params["epsilon"] = float(value)
        elif key == "mc_samples":
            params["mc_samples"] = int(value)
        else:
            raise ValueError(f"unknown agent parameter {key!r}")
    if kind is AgentKind.IDS and "mc_samples" not in params:
        params["mc_samples"] = default_mc_samples
    return AgentSpec(kind, **params)


def parse_config(text: str) -> ExperimentConfig:
    values: dict[str, object] = {}
    agent_lines: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "agent":
            agent_lines.append(value)
        elif key in _INT_KEYS:
            values[key] = int(value)
        elif key == "checkpoints":
            values[key] = value
        elif key == "output_dir":
            values[key] = Path(value)
        else:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
    if not agent_lines:
        raise ValueError("config declares no agents")
    default_mc = int(values.get("mc_samples", 512))
    agents = tuple(parse_agent(entry, default_mc) for entry in agent_lines)
    missing = [k for k in ("arms", "horizon", "seeds", "base_seed") if k not in values]
    if missing:
        raise ValueError(f"config is missing required keys: {missing}")
    return ExperimentConfig(agents=agents, **values)  # type: ignore[arg-type]


def load_config(path: Path | str) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


# ---------------------------------------------------------------------------
# Episodes
# ---------------------------------------------------------------------------


def episode_seed(base_seed: int, agent_ordinal: int, seed_ordinal: int) -> int:
    """Root seed of one episode; distinct per (agent, repeat) cell."""
    return mix_seed(mix_seed(base_seed, 1000 + agent_ordinal), 2000 + seed_ordinal)


def checkpoint_steps(
    horizon: int,
    policy: str = "log",
    stride: int = 1,
    extra: tuple[int, ...] = (),
) -> np.ndarray:
    """Step indices to record; the final step is always present.

    The log policy records every step up to 1024 and about 100 points per
    decade beyond, which keeps long-horizon traces small while leaving
    plenty of support for log-log fits.
    """
    if policy == "linear":
        points = np.arange(0, horizon, stride, dtype=np.int64)
    elif policy == "log":
        dense = np.arange(0, min(_DENSE_LIMIT, horizon), dtype=np.int64)
        if horizon > _DENSE_LIMIT:
            k_lo = int(np.ceil(_LOG_POINTS_PER_DECADE * np.log10(_DENSE_LIMIT)))
            k_hi = int(np.ceil(_LOG_POINTS_PER_DECADE * np.log10(horizon)))
            sparse = np.unique(
                np.round(
                    10.0 ** (np.arange(k_lo, k_hi + 1) / _LOG_POINTS_PER_DECADE)
                ).astype(np.int64)
            )
            sparse = sparse[sparse < horizon]
            points = np.concatenate([dense, sparse])
        else:
            points = dense
    else:
        raise ValueError("policy must be 'linear' or 'log'")
    keep = [np.asarray(extra, dtype=np.int64), np.array([horizon - 1], dtype=np.int64)]
    points = np.unique(np.concatenate([points, *keep]))
    return points[(points >= 0) & (points < horizon)]


def _spec_checkpoints(cfg: ExperimentConfig, spec: AgentSpec) -> np.ndarray:
    # Phase-boundary steps of explore-then-exploit agents are always
    # recorded so the exploration cost can be read off exactly.
    extra: tuple[int, ...] = ()
    if spec.tau is not None:
        extra = (spec.tau // 4, spec.tau)
    return checkpoint_steps(cfg.horizon, cfg.checkpoints, cfg.record_stride, extra)


def run_episode(cfg: ExperimentConfig, spec: AgentSpec, seed: int) -> RegretTrace:
    """One full agent/environment interaction loop."""
    rng_instance, rng_obs, rng_agent = episode_streams(seed)
    inst = sample_instance(rng_instance, cfg.arms)
    r_star = optimal_reward(inst)
    agent = make_agent(spec)
    belief = BeliefState.prior(cfg.arms)
    record = np.zeros(cfg.horizon, dtype=bool)
    record[_spec_checkpoints(cfg, spec)] = True
    records: list[TraceRecord] = []
    cum = 0.0
    for t in range(cfg.horizon):
        action = agent.act(belief, rng_agent)
        obs = step(inst, action, rng_obs)
        instant = r_star - true_expected_reward(inst, action)
        cum += instant
        if record[t]:
            records.append(TraceRecord(t, action, obs, instant, cum))
        belief = apply(belief, action, obs)
    return RegretTrace(records, r_star, seed)


# ---------------------------------------------------------------------------
# Aggregation and CSV output
# ---------------------------------------------------------------------------


@dataclass
class AggregateCurve:
    """Mean cumulative regret across seeds at shared checkpoints."""

    agent_id: str
    t: np.ndarray
    mean_cum_regret: np.ndarray
    stderr: np.ndarray
    n_seeds: int


def aggregate_traces(agent_id: str, traces: list[RegretTrace]) -> AggregateCurve:
    """Seed-order-invariant mean and standard error at shared checkpoints."""
    ts = np.array([rec.t for rec in traces[0].records], dtype=np.int64)
    for trace in traces[1:]:
        if [rec.t for rec in trace.records] != ts.tolist():
            raise ValueError("traces disagree on checkpoint steps")
    cums = np.array([[rec.cum_regret for rec in trace.records] for trace in traces])
    mean = cums.mean(axis=0)
    n = len(traces)
    stderr = cums.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return AggregateCurve(agent_id, ts, mean, stderr, n)


def _atomic_write(path: Path, write_rows) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="") as handle:
        write_rows(csv.writer(handle))
    os.replace(tmp, path)


def write_trace_csv(path: Path, agent_id: str, trace: RegretTrace) -> None:
    def rows(writer) -> None:
        writer.writerow(TRACE_COLUMNS)
        for rec in trace.records:
            writer.writerow(
                (
                    agent_id,
                    trace.seed,
                    rec.t,
                    rec.action.kind.value,
                    rec.action.index,
                    rec.observation,
                    repr(rec.instant_regret),
                    repr(rec.cum_regret),
                )
            )

    _atomic_write(path, rows)


def write_aggregate_csv(path: Path, curves: list[AggregateCurve]) -> None:
    def rows(writer) -> None:
        writer.writerow(AGGREGATE_COLUMNS)
        for curve in curves:
            for t, m, se in zip(curve.t, curve.mean_cum_regret, curve.stderr):
                writer.writerow((curve.agent_id, int(t), repr(float(m)), repr(float(se)), curve.n_seeds))

    _atomic_write(path, rows)


def read_aggregate_csv(path: Path | str) -> dict[str, AggregateCurve]:
    """Parse an aggregate CSV back into per-agent curves."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in AGGREGATE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"aggregate CSV is missing columns: {missing}")
        by_agent: dict[str, list[tuple[int, float, float, int]]] = {}
        for row in reader:
            by_agent.setdefault(row["agent_id"], []).append(
                (
                    int(row["t"]),
                    float(row["mean_cum_regret"]),
                    float(row["stderr"]),
                    int(row["n_seeds"]),
                )
            )
    curves = {}
    for agent_id, rows in by_agent.items():
        arr = np.array(rows, dtype=float)
        curves[agent_id] = AggregateCurve(
            agent_id,
            arr[:, 0].astype(np.int64),
            arr[:, 1],
            arr[:, 2],
            int(arr[0, 3]),
        )
    return curves


def _episode_job(args: tuple[ExperimentConfig, AgentSpec, int]) -> RegretTrace:
    cfg, spec, seed = args
    return run_episode(cfg, spec, seed)


def run_experiment(
    cfg: ExperimentConfig, threads: int = 1
) -> dict[str, AggregateCurve]:
    """Run the full agent x seed grid and write trace plus aggregate CSVs.

    Returns the per-agent aggregate curves.  Output is deterministic in
    (config, base_seed) regardless of thread count.
    """
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (ai, si, spec, episode_seed(cfg.base_seed, ai, si))
        for ai, spec in enumerate(cfg.agents)
        for si in range(cfg.seeds)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(_episode_job, [(cfg, s, seed) for _, _, s, seed in jobs]))
    else:
        traces = [run_episode(cfg, s, seed) for _, _, s, seed in jobs]

    curves: list[AggregateCurve] = []
    for ai, spec in enumerate(cfg.agents):
        agent_traces = [traces[ai * cfg.seeds + si] for si in range(cfg.seeds)]
        for si, trace in enumerate(agent_traces):
            write_trace_csv(
                cfg.output_dir / f"trace_{spec.label}_s{si:03d}.csv", spec.label, trace
            )
        curves.append(aggregate_traces(spec.label, agent_traces))
    write_aggregate_csv(cfg.output_dir / "aggregate.csv", curves)
    return {curve.agent_id: curve for curve in curves}


def loglog_slope(curve: AggregateCurve, t_min: int, t_max: int) -> float:
    """Least-squares slope of ln(cum regret) against ln(t) in a window."""
    if t_min < 1:
        raise ValueError("t_min must be at least 1 (log of the step index)")
    mask = (curve.t >= t_min) & (curve.t <= t_max)
    if int(mask.sum()) < 2:
        raise ValueError(f"need at least two checkpoints in [{t_min}, {t_max}]")
    y = curve.mean_cum_regret[mask]
    if np.any(y <= 0.0):
        raise ValueError("cumulative regret must be positive throughout the window")
    slope, _ = np.polyfit(np.log(curve.t[mask].astype(float)), np.log(y), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Verification: the oracle suites behind the `verify` subcommand
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def check_mi_agreement(
    mi_fn=None, grid_max: int = 64, random_pairs: int = 100, seed: int = 7
) -> CheckResult:
    """Closed-form mutual information against the quadrature oracle."""
    from .infotheory import beta_bernoulli_mi, beta_bernoulli_mi_quadrature

    fn = mi_fn or beta_bernoulli_mi
    rng = np.random.default_rng(seed)
    pairs = [(float(a), float(b)) for a in range(1, grid_max + 1) for b in range(1, grid_max + 1)]
    pairs += [tuple(rng.uniform(0.5, 100.0, size=2)) for _ in range(random_pairs)]
    worst = 0.0
    worst_pair = pairs[0]
    for a, b in pairs:
        dev = abs(fn(a, b) - beta_bernoulli_mi_quadrature(a, b))
        if dev > worst:
            worst, worst_pair = dev, (a, b)
    tol = 1e-8
    return CheckResult(
        "mi_closed_form_vs_quadrature",
        worst <= tol,
        worst,
        tol,
        f"max deviation {worst:.3e} at alpha,beta={worst_pair}",
    )


def check_mi_bounds(mi_fn=None, grid_max: int = 200) -> CheckResult:
    """Closed form lies within [1/(4n), 1/(2n)] on the integer grid."""
    from .infotheory import beta_bernoulli_mi

    fn = mi_fn or beta_bernoulli_mi
    a, b = np.meshgrid(
        np.arange(1, grid_max + 1, dtype=float), np.arange(1, grid_max + 1, dtype=float)
    )
    mi = fn(a.ravel(), b.ravel())
    n = (a + b).ravel()
    low = 1.0 / (4.0 * n)
    high = 1.0 / (2.0 * n)
    violation = max(float((low - mi).max()), float((mi - high).max()))
    return CheckResult(
        "mi_within_conjugate_count_bounds",
        bool(np.all(mi >= low) and np.all(mi <= high)),
        max(violation, 0.0),
        0.0,
        f"worst bound violation {violation:.3e} over alpha,beta in [1, {grid_max}]",
    )


def check_solver_against_grid(
    instances: int = 1000, q_step: float = 1e-4, seed: int = 11
) -> CheckResult:
    """Closed-form solver never loses to the brute-force grid oracle."""
    from .ids_solver import distribution_ratio, grid_oracle, minimize_info_ratio

    rng = np.random.default_rng(seed)
    tol = 1e-6
    worst = -np.inf
    support_ok = True
    for _ in range(instances):
        size = int(rng.integers(2, 33))
        deltas = rng.uniform(0.0, 2.0, size)
        gains = rng.uniform(1e-4, 0.25, size)
        dist = minimize_info_ratio(deltas, gains)
        support_ok &= len(dist.support) <= 2
        gap = distribution_ratio(dist, deltas, gains) - grid_oracle(deltas, gains, q_step)
        worst = max(worst, gap)
    return CheckResult(
        "solver_vs_grid_oracle",
        bool(support_ok and worst <= tol),
        float(worst),
        tol,
        f"max (solver - oracle) ratio gap {worst:.3e} over {instances} instances; "
        f"support always <= 2: {support_ok}",
    )


def check_ts_uniformity(
    seeds: int = 10, horizon: int = 10_000, arms: int = 16, base_seed: int = 12345
) -> CheckResult:
    """Thompson sampling never queries and spreads play evenly across arms.

    Exact per-step uniformity only holds while the belief is symmetric, so
    the tight tolerance applies to draws from the prior state.  Episode
    frequencies concentrate on whichever arms an instance makes look widest,
    which individual runs do not average away; pooled episode counts get a
    loose band that still catches gross asymmetries.
    """
    from .agents import thompson_act

    rng = np.random.default_rng(mix_seed(base_seed, 97))
    prior = BeliefState.prior(arms)
    prior_counts = np.zeros(arms, dtype=np.int64)
    for _ in range(20_000):
        prior_counts[thompson_act(prior, rng).index] += 1
    prior_dev = float(np.abs(prior_counts / prior_counts.sum() - 1.0 / arms).max())

    cfg = ExperimentConfig(
        arms=arms,
        horizon=horizon,
        seeds=seeds,
        base_seed=base_seed,
        agents=(AgentSpec(AgentKind.THOMPSON),),
        checkpoints="linear",
        record_stride=1,
    )
    counts = np.zeros(arms, dtype=np.int64)
    queries = 0
    for si in range(seeds):
        trace = run_episode(cfg, cfg.agents[0], episode_seed(base_seed, 0, si))
        for rec in trace.records:
            if rec.action.kind is ActionKind.HUMAN_QUERY:
                queries += 1
            else:
                counts[rec.action.index] += 1
    pooled_dev = float(np.abs(counts / counts.sum() - 1.0 / arms).max())
    prior_tol, pooled_tol = 0.02, 0.10
    passed = queries == 0 and prior_dev <= prior_tol and pooled_dev <= pooled_tol
    return CheckResult(
        "ts_never_queries_and_is_uniform",
        passed,
        prior_dev,
        prior_tol,
        f"{queries} queries; prior-draw max |freq - 1/{arms}| = {prior_dev:.4f} "
        f"(tol {prior_tol}); pooled episode max dev = {pooled_dev:.4f} (tol {pooled_tol})",
    )


def run_verification(
    mi_fn=None,
    solver_instances: int = 1000,
    mi_grid_max: int = 64,
    bounds_grid_max: int = 200,
    ts_seeds: int = 10,
    ts_horizon: int = 10_000,
) -> VerificationReport:
    """Run every oracle suite and return a machine-readable report."""
    return VerificationReport(
        [
            check_mi_agreement(mi_fn, grid_max=mi_grid_max),
            check_mi_bounds(mi_fn, grid_max=bounds_grid_max),
            check_solver_against_grid(instances=solver_instances),
            check_ts_uniformity(seeds=ts_seeds, horizon=ts_horizon),
        ]
    )
