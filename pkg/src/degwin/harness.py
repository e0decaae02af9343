"""Seeded Monte Carlo experiments over the critical window.

The driver resolves each requested window location mu to an admissible edge
count, samples ``trials`` graphs per point with per-trial generator streams,
summarises each graph, and aggregates per point.  Trial t of point k always
draws from ``trial_generator(seed, t, k)``, so the emitted rows are
bit-identical across chunkings and process counts.

CSV schema (one row per trial; ``planar`` encoded 1/0; empty-complex-part
sentinels are -1 in the complex_* length columns):

    trial,n,m,realized_mu,attempts,largest_component,largest_excess,
    total_excess,complex_size,complex_diameter,complex_longest_path,
    complex_circumference,planar
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from .asymptotics import VARIANTS, predict
from .critical import CriticalPoint, critical_point
from .degset import DegreeSet, parse_degree_set
from .errors import InfeasibleError, MaxAttemptsError
from .sampler import (
    DEFAULT_MAX_ATTEMPTS,
    build_dp,
    edges_for_mu,
    sample_batch,
    trial_generator,
)
from .stats import GraphSummary, summarize

CSV_COLUMNS = (
    "trial",
    "n",
    "m",
    "realized_mu",
    "attempts",
    "largest_component",
    "largest_excess",
    "total_excess",
    "complex_size",
    "complex_diameter",
    "complex_longest_path",
    "complex_circumference",
    "planar",
)

CHUNK_TRIALS = 256
ACCEPT_SLACK = 0.02
CHI2_MIN_P = 1e-3
MIN_TRIALS_FOR_COMPARISON = 1_000
EXCESS_CHI2_RANGE = 5  # chi-square over total excess q = 0..4


def _round9(x: float) -> float:
    """Round to the CSV precision so emit/parse is an exact roundtrip."""
    return float(f"{x:.9g}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a degree family at one n, swept over window locations.

    Exactly one of ``mus`` (window locations, converted via edges_for_mu) and
    ``ms`` (explicit edge counts) may be non-empty; both empty means the
    single point mu = 0.
    """

    degrees: str
    n: int = 1000
    mus: tuple[float, ...] = ()
    ms: tuple[int, ...] = ()
    trials: int = 1000
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    variant: str = "scaled"
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        if not self.degrees:
            raise ValueError("degrees specification must be non-empty")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.variant not in VARIANTS:
            raise ValueError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        if self.mus and self.ms:
            raise ValueError("give a mu-list or an m-list, not both")
        if not self.mus and not self.ms:
            object.__setattr__(self, "mus", (0.0,))


_CONFIG_CONVERTERS = {
    "degrees": str,
    "n": int,
    "mu": lambda v: tuple(float(x) for x in v.split(",") if x.strip()),
    "m": lambda v: tuple(int(x) for x in v.split(",") if x.strip()),
    "trials": int,
    "seed": int,
    "jobs": int,
    "out": str,
    "variant": str,
    "max_attempts": int,
}
_CONFIG_FIELDS = {"mu": "mus", "m": "ms"}


def load_config_file(path) -> dict[str, str]:
    """Flat key=value text; blank lines and '#' comments are ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_CONVERTERS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def config_from_mapping(mapping: dict[str, object]) -> ExperimentConfig:
    """Build a config from string-valued (file) or typed (flag) entries."""
    kwargs = {}
    for key, value in mapping.items():
        if key not in _CONFIG_CONVERTERS:
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(value, str):
            value = _CONFIG_CONVERTERS[key](value)
        kwargs[_CONFIG_FIELDS.get(key, key)] = value
    return ExperimentConfig(**kwargs)


@dataclass(frozen=True)
class ExperimentPoint:
    """A resolved sweep point: admissible m plus the mu it realises."""

    index: int
    nominal_mu: float | None
    m: int
    realized_mu: float


def resolve_points(cfg: ExperimentConfig, ds: DegreeSet) -> tuple[ExperimentPoint, ...]:
    cp = critical_point(ds)
    scale = float(cfg.n) ** (1.0 / 3.0)
    points = []
    if cfg.ms:
        for i, m in enumerate(cfg.ms):
            mu = (m / (cp.alpha * cfg.n) - 1.0) * scale
            points.append(ExperimentPoint(i, None, m, _round9(mu)))
    else:
        for i, mu in enumerate(cfg.mus):
            m, realized = edges_for_mu(ds, cfg.n, mu)
            points.append(ExperimentPoint(i, mu, m, _round9(realized)))
    return tuple(points)


@dataclass(frozen=True)
class TrialRow:
    """One sampled graph, flattened to the CSV schema."""

    trial: int
    n: int
    m: int
    realized_mu: float
    attempts: int
    largest_component: int
    largest_excess: int
    total_excess: int
    complex_size: int
    complex_diameter: int
    complex_longest_path: int
    complex_circumference: int
    planar: bool

    @classmethod
    def from_summary(
        cls, trial: int, n: int, m: int, realized_mu: float, s: GraphSummary
    ) -> "TrialRow":
        return cls(
            trial=trial,
            n=n,
            m=m,
            realized_mu=realized_mu,
            attempts=s.attempts,
            largest_component=s.largest_component_size,
            largest_excess=s.largest_excess,
            total_excess=s.total_excess,
            complex_size=s.complex_part_size,
            complex_diameter=s.complex_diameter,
            complex_longest_path=s.complex_longest_path,
            complex_circumference=s.complex_circumference,
            planar=s.planar,
        )

    def summary(self) -> GraphSummary:
        return GraphSummary(
            largest_component_size=self.largest_component,
            largest_excess=self.largest_excess,
            total_excess=self.total_excess,
            complex_part_size=self.complex_size,
            complex_diameter=self.complex_diameter,
            complex_longest_path=self.complex_longest_path,
            complex_circumference=self.complex_circumference,
            planar=self.planar,
            attempts=self.attempts,
        )


@dataclass(frozen=True)
class PointAggregate:
    """Per-point empirical summaries, recomputable exactly from the rows.

    Length means/standard errors are over trials with a complex part only,
    skipping -1 not-computed length sentinels (None when no trial
    contributes, or too few for a standard error).
    """

    n: int
    m: int
    realized_mu: float
    trials: int
    survival_rate: float
    excess_histogram: tuple[tuple[int, int], ...]
    nonplanar_rate: float
    mean_attempts: float
    complex_trials: int
    mean_diameter: float | None
    se_diameter: float | None
    mean_longest_path: float | None
    se_longest_path: float | None
    mean_circumference: float | None
    se_circumference: float | None


def _mean_se(values: list[int]) -> tuple[float | None, float | None]:
    k = len(values)
    if k == 0:
        return None, None
    mean = math.fsum(values) / k
    if k == 1:
        return mean, None
    var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var / k)


def aggregate_rows(rows) -> tuple[PointAggregate, ...]:
    """Group rows by (n, m) in first-appearance order and aggregate."""
    groups: dict[tuple[int, int], list[TrialRow]] = {}
    for row in rows:
        groups.setdefault((row.n, row.m), []).append(row)
    out = []
    for (n, m), grp in groups.items():
        trials = len(grp)
        mus = {r.realized_mu for r in grp}
        if len(mus) != 1:
            raise ValueError(f"inconsistent realized_mu within point (n={n}, m={m})")
        hist: dict[int, int] = {}
        for r in grp:
            hist[r.total_excess] = hist.get(r.total_excess, 0) + 1
        complex_rows = [r for r in grp if r.total_excess > 0]
        mean_d, se_d = _mean_se([r.complex_diameter for r in complex_rows])
        mean_l, se_l = _mean_se(
            [r.complex_longest_path for r in complex_rows if r.complex_longest_path >= 0]
        )
        mean_c, se_c = _mean_se(
            [r.complex_circumference for r in complex_rows if r.complex_circumference >= 0]
        )
        out.append(
            PointAggregate(
                n=n,
                m=m,
                realized_mu=mus.pop(),
                trials=trials,
                survival_rate=hist.get(0, 0) / trials,
                excess_histogram=tuple(sorted(hist.items())),
                nonplanar_rate=sum(1 for r in grp if not r.planar) / trials,
                mean_attempts=math.fsum(r.attempts for r in grp) / trials,
                complex_trials=len(complex_rows),
                mean_diameter=mean_d,
                se_diameter=se_d,
                mean_longest_path=mean_l,
                se_longest_path=se_l,
                mean_circumference=mean_c,
                se_circumference=se_c,
            )
        )
    return tuple(out)


@dataclass(frozen=True)
class ResultTable:
    """All trial rows of an experiment plus their per-point aggregates."""

    degrees: str
    seed: int
    variant: str
    rows: tuple[TrialRow, ...]
    aggregates: tuple[PointAggregate, ...]

    def validate(self) -> None:
        """Row-level invariants plus exact aggregate reproducibility."""
        for row in self.rows:
            row.summary().validate()
        if aggregate_rows(self.rows) != self.aggregates:
            raise ValueError("aggregates do not match their rows")


def _summaries_chunk(args) -> list[GraphSummary]:
    """Worker body: sample and summarise trials [lo, hi) of one point."""
    degrees_text, n, m, seed, point_index, lo, hi, max_attempts = args
    ds = parse_degree_set(degrees_text)
    dp = build_dp(ds, n, 2 * m)
    rngs = [trial_generator(seed, t, point_index) for t in range(lo, hi)]
    graphs, attempts = sample_batch(ds, dp, rngs, max_attempts=max_attempts)
    return [summarize(g, attempts=a) for g, a in zip(graphs, attempts)]


def _run_point(cfg: ExperimentConfig, point: ExperimentPoint) -> list[GraphSummary]:
    chunk_args = [
        (
            cfg.degrees,
            cfg.n,
            point.m,
            cfg.seed,
            point.index,
            lo,
            min(lo + CHUNK_TRIALS, cfg.trials),
            cfg.max_attempts,
        )
        for lo in range(0, cfg.trials, CHUNK_TRIALS)
    ]
    if cfg.jobs == 1 or len(chunk_args) == 1:
        parts = [_summaries_chunk(a) for a in chunk_args]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            parts = list(pool.map(_summaries_chunk, chunk_args))
    return [s for part in parts for s in part]


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Sample every point of the sweep; deterministic for fixed (cfg, seed).

    On a sampler/infeasibility error at some point, the same error is
    re-raised with the completed points attached as ``exc.partial_table``.
    """
    ds = parse_degree_set(cfg.degrees)
    points = resolve_points(cfg, ds)
    rows: list[TrialRow] = []
    for point in points:
        try:
            summaries = _run_point(cfg, point)
        except (InfeasibleError, MaxAttemptsError) as exc:
            err = type(exc)(f"point {point.index} (m={point.m}): {exc}")
            err.partial_table = ResultTable(
                degrees=cfg.degrees,
                seed=cfg.seed,
                variant=cfg.variant,
                rows=tuple(rows),
                aggregates=aggregate_rows(rows),
            )
            raise err from exc
        rows.extend(
            TrialRow.from_summary(t, cfg.n, point.m, point.realized_mu, s)
            for t, s in enumerate(summaries)
        )
    return ResultTable(
        degrees=cfg.degrees,
        seed=cfg.seed,
        variant=cfg.variant,
        rows=tuple(rows),
        aggregates=aggregate_rows(rows),
    )


@dataclass(frozen=True)
class PointComparison:
    """Empirical vs predicted at one point; ok-flags use 3 sigma + slack."""

    n: int
    m: int
    realized_mu: float
    trials: int
    survival_pred: float
    survival_obs: float
    survival_z: float
    survival_ok: bool
    excess_pvalue: float
    excess_ok: bool
    nonplanar_pred: float
    nonplanar_obs: float
    nonplanar_z: float
    nonplanar_ok: bool


@dataclass(frozen=True)
class DiameterScaling:
    """Mean complex diameter ratio between two n at matching mu."""

    n_small: int
    n_large: int
    ratio: float
    expected_ratio: float


@dataclass(frozen=True)
class TheoryReport:
    variant: str
    points: tuple[PointComparison, ...]
    scalings: tuple[DiameterScaling, ...]

    @property
    def passed(self) -> bool:
        return all(
            p.survival_ok and p.excess_ok and p.nonplanar_ok for p in self.points
        )


def _rate_check(pred: float, obs: float, trials: int) -> tuple[float, bool]:
    sigma = math.sqrt(max(pred * (1.0 - pred), 0.0) / trials)
    diff = obs - pred
    z = diff / sigma if sigma > 0 else (0.0 if diff == 0 else math.inf)
    return z, abs(diff) <= 3.0 * sigma + ACCEPT_SLACK


def _excess_chi2(agg: PointAggregate, excess_dist) -> float:
    """Chi-square p-value over q = 0..4, renormalised to that range."""
    hist = dict(agg.excess_histogram)
    observed = np.array([hist.get(q, 0) for q in range(EXCESS_CHI2_RANGE)], dtype=float)
    captured = observed.sum()
    if captured == 0:
        return 0.0
    mass = sum(excess_dist[:EXCESS_CHI2_RANGE])
    expected = np.array(excess_dist[:EXCESS_CHI2_RANGE]) / mass * captured
    return float(scipy_stats.chisquare(observed, expected).pvalue)


def compare_theory(
    rt: ResultTable,
    cp: CriticalPoint,
    variant: str | None = None,
    q_max: int = 20,
) -> TheoryReport:
    """Z-scores and chi-square fits of the table against window predictions.

    Survival and non-planarity use the binomial 3 sigma + 0.02 slack rule
    (the predictions are asymptotic, with unquantified O(n^{-1/3})
    corrections); the excess distribution is tested over q = 0..4.  Warns
    rather than fails below 1000 trials per point.
    """
    variant = variant or rt.variant
    comparisons = []
    for agg in rt.aggregates:
        if agg.trials < MIN_TRIALS_FOR_COMPARISON:
            warnings.warn(
                f"only {agg.trials} trials at (n={agg.n}, m={agg.m}); "
                f"comparison lacks power",
                stacklevel=2,
            )
        pred = predict(cp, agg.realized_mu, variant, q_max)
        survival_z, survival_ok = _rate_check(
            pred.survival, agg.survival_rate, agg.trials
        )
        nonplanar_pred = 1.0 - pred.planarity
        nonplanar_z, nonplanar_ok = _rate_check(
            nonplanar_pred, agg.nonplanar_rate, agg.trials
        )
        pvalue = _excess_chi2(agg, pred.excess_dist)
        comparisons.append(
            PointComparison(
                n=agg.n,
                m=agg.m,
                realized_mu=agg.realized_mu,
                trials=agg.trials,
                survival_pred=pred.survival,
                survival_obs=agg.survival_rate,
                survival_z=survival_z,
                survival_ok=survival_ok,
                excess_pvalue=pvalue,
                excess_ok=pvalue > CHI2_MIN_P,
                nonplanar_pred=nonplanar_pred,
                nonplanar_obs=agg.nonplanar_rate,
                nonplanar_z=nonplanar_z,
                nonplanar_ok=nonplanar_ok,
            )
        )
    scalings = []
    aggs = rt.aggregates
    for i in range(len(aggs)):
        for j in range(len(aggs)):
            a, b = aggs[i], aggs[j]
            if (
                a.n < b.n
                and abs(a.realized_mu - b.realized_mu) <= 0.25
                and a.mean_diameter is not None
                and b.mean_diameter is not None
            ):
                scalings.append(
                    DiameterScaling(
                        n_small=a.n,
                        n_large=b.n,
                        ratio=b.mean_diameter / a.mean_diameter,
                        expected_ratio=(b.n / a.n) ** (1.0 / 3.0),
                    )
                )
    return TheoryReport(
        variant=variant, points=tuple(comparisons), scalings=tuple(scalings)
    )


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return f"{value:.9g}"


def render_csv(rt: ResultTable) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rt.rows:
        lines.append(
            ",".join(
                _cell(v)
                for v in (
                    r.trial,
                    r.n,
                    r.m,
                    r.realized_mu,
                    r.attempts,
                    r.largest_component,
                    r.largest_excess,
                    r.total_excess,
                    r.complex_size,
                    r.complex_diameter,
                    r.complex_longest_path,
                    r.complex_circumference,
                    r.planar,
                )
            )
        )
    return "\n".join(lines) + "\n"


def render_json(rt: ResultTable) -> str:
    doc = {
        "degrees": rt.degrees,
        "seed": rt.seed,
        "variant": rt.variant,
        "columns": list(CSV_COLUMNS),
        "rows": [
            [
                r.trial,
                r.n,
                r.m,
                r.realized_mu,
                r.attempts,
                r.largest_component,
                r.largest_excess,
                r.total_excess,
                r.complex_size,
                r.complex_diameter,
                r.complex_longest_path,
                r.complex_circumference,
                1 if r.planar else 0,
            ]
            for r in rt.rows
        ],
        "aggregates": [asdict(a) for a in rt.aggregates],
    }
    return json.dumps(doc, indent=1) + "\n"


def emit(rt: ResultTable, fmt: str, path) -> Path:
    """Write the table as csv or json; returns the path written."""
    if fmt == "csv":
        text = render_csv(rt)
    elif fmt == "json":
        text = render_json(rt)
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv or json")
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def parse_csv(source) -> tuple[TrialRow, ...]:
    """Read rows back from a CSV file or string; validates each row."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for parts in reader:
        if not parts:
            continue
        if len(parts) != len(CSV_COLUMNS):
            raise ValueError(f"bad CSV row: {parts!r}")
        row = TrialRow(
            trial=int(parts[0]),
            n=int(parts[1]),
            m=int(parts[2]),
            realized_mu=float(parts[3]),
            attempts=int(parts[4]),
            largest_component=int(parts[5]),
            largest_excess=int(parts[6]),
            total_excess=int(parts[7]),
            complex_size=int(parts[8]),
            complex_diameter=int(parts[9]),
            complex_longest_path=int(parts[10]),
            complex_circumference=int(parts[11]),
            planar=bool(int(parts[12])),
        )
        row.summary().validate()
        rows.append(row)
    return tuple(rows)
