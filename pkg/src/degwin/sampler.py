"""Random graph generation with constrained degrees at a given edge count.

A degree sequence (d_1, ..., d_n) with all d_v in D and sum 2m is drawn with
probability proportional to prod_v 1/d_v!, coordinate by coordinate, from the
precomputed weight table S[i][j] = sum of those products over length-i prefix
sequences with sum j.  A uniform random pairing of the half-edge stubs then
produces a multigraph, and pairings are rejected until the result is simple.
Each simple graph with a given degree sequence arises from exactly
prod_v d_v! pairings, so the two factors cancel and accepted graphs are
(asymptotically, over sequences) uniform in the family.

Reproducibility contract: trial t of experiment point k draws from
``trial_generator(seed, t, k)``, and every attempt consumes exactly one
``random(n)`` block followed by one ``permutation(2m)`` block from that
generator.  The lockstep batch driver interleaves trials but keeps each
trial's private stream identical, so batched and one-at-a-time runs produce
bit-identical graphs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .critical import critical_point
from .degset import DegreeSet, check_condition_C, periodicity
from .errors import InfeasibleError, MaxAttemptsError, OutOfRangeError
from .graph import Graph

NEG_INF = float("-inf")
DEFAULT_MAX_ATTEMPTS = 10_000
_ENUM_MAX_N = 12


@dataclass(frozen=True)
class DPTable:
    """Log-space prefix-weight table; ``logw[i][j] = log S[i][j]``.

    S[i][j] sums prod 1/d_v! over length-i sequences in D with sum j; zero
    weight is the sentinel -inf.  Immutable and shared read-only across
    trials.
    """

    n: int
    two_m: int
    logw: np.ndarray

    @property
    def feasible(self) -> bool:
        return bool(np.isfinite(self.logw[self.n, self.two_m]))


def build_dp(ds: DegreeSet, n: int, two_m: int) -> DPTable:
    """Fill the full (n+1) x (2m+1) weight table in log space.

    Raises InfeasibleError when no sequence over ``ds`` of length n sums to
    ``two_m`` (the corner weight is the zero sentinel), e.g. on parity
    grounds.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if two_m < 0:
        raise ValueError(f"two_m must be >= 0, got {two_m}")
    if two_m > n * ds.max_degree:
        raise InfeasibleError(
            f"two_m = {two_m} exceeds n*max(D) = {n * ds.max_degree}"
        )
    logw = np.full((n + 1, two_m + 1), NEG_INF)
    logw[0, 0] = 0.0
    degs = [d for d in ds.degrees if d <= two_m]
    logfact = [float(gammaln(d + 1)) for d in degs]
    for i in range(1, n + 1):
        prev = logw[i - 1]
        row = np.full(two_m + 1, NEG_INF)
        for d, lf in zip(degs, logfact):
            if d == 0:
                np.logaddexp(row, prev - lf, out=row)
            else:
                np.logaddexp(row[d:], prev[:-d] - lf, out=row[d:])
        logw[i] = row
    if not np.isfinite(logw[n, two_m]):
        raise InfeasibleError(
            f"no degree sequence over {ds} of length {n} sums to {two_m}"
        )
    return DPTable(n=n, two_m=two_m, logw=logw)


def _degree_arrays(ds: DegreeSet, two_m: int):
    degs = np.array([d for d in ds.degrees if d <= two_m], dtype=np.int64)
    return degs, gammaln(degs + 1.0)


def _walk_batch(
    dp: DPTable, degs: np.ndarray, logfact: np.ndarray, u_block: np.ndarray
) -> np.ndarray:
    """Draw one degree sequence per row of uniforms, all trials in lockstep.

    Row t consumes u_block[t, 0], u_block[t, 1], ... for coordinates
    d_n, d_{n-1}, ..., d_1, exactly as the scalar recursion would.
    """
    t_count, n = u_block.shape
    logw = dp.logw
    j = np.full(t_count, dp.two_m, dtype=np.int64)
    seq = np.empty((t_count, n), dtype=np.int64)
    for i in range(n, 0, -1):
        prev = logw[i - 1]
        idx = j[:, None] - degs[None, :]
        ok = idx >= 0
        lw = np.where(ok, prev[np.where(ok, idx, 0)], NEG_INF) - logfact[None, :]
        weights = np.exp(lw - logw[i, j][:, None])
        cum = np.cumsum(weights, axis=1)
        total = cum[:, -1]
        if not np.all(total > 0):
            raise RuntimeError(
                "no admissible degree at an interior step; weight table corrupt"
            )
        r = u_block[:, n - i] * total
        k = (cum <= r[:, None]).sum(axis=1)
        np.minimum(k, len(degs) - 1, out=k)
        chosen = degs[k]
        seq[:, i - 1] = chosen
        j -= chosen
    if np.any(j != 0):
        raise RuntimeError("sequence walk failed to consume the stub budget")
    return seq


def step_distribution(dp: DPTable, ds: DegreeSet, i: int, j: int) -> dict[int, float]:
    """Conditional law of coordinate i given remaining stub budget j.

    This is exactly the distribution the sequence walk samples from at that
    step (log-space, renormalized to sum 1 to absorb roundoff).
    """
    if not (1 <= i <= dp.n and 0 <= j <= dp.two_m):
        raise OutOfRangeError(f"step (i={i}, j={j}) outside the table")
    if not np.isfinite(dp.logw[i, j]):
        raise InfeasibleError(f"state (i={i}, j={j}) has zero weight")
    degs, logfact = _degree_arrays(ds, dp.two_m)
    idx = j - degs
    ok = idx >= 0
    lw = np.where(ok, dp.logw[i - 1][np.where(ok, idx, 0)], NEG_INF) - logfact
    weights = np.exp(lw - dp.logw[i, j])
    weights /= weights.sum()
    return {int(d): float(p) for d, p in zip(degs, weights)}


def sample_degree_sequence(
    dp: DPTable, ds: DegreeSet, rng: np.random.Generator
) -> np.ndarray:
    """One degree sequence; consumes a single ``rng.random(n)`` block."""
    degs, logfact = _degree_arrays(ds, dp.two_m)
    return _walk_batch(dp, degs, logfact, rng.random(dp.n)[None, :])[0]


def _stub_pairs(seq: np.ndarray, perm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    stubs = np.repeat(np.arange(1, len(seq) + 1, dtype=np.int64), seq)
    pairs = stubs[perm].reshape(-1, 2)
    return np.minimum(pairs[:, 0], pairs[:, 1]), np.maximum(pairs[:, 0], pairs[:, 1])


def pair_configuration(seq, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform pairing of the half-edge stubs; may contain loops/multi-edges.

    Consumes a single ``rng.permutation(sum(seq))`` block; adjacent entries of
    the permuted stub list are paired, which is uniform over perfect
    matchings.
    """
    seq = np.asarray(seq, dtype=np.int64)
    two_m = int(seq.sum())
    if two_m % 2:
        raise ValueError(f"total degree {two_m} must be even")
    u, v = _stub_pairs(seq, rng.permutation(two_m))
    return list(zip(u.tolist(), v.tolist()))


def _simple_edges_or_none(seq: np.ndarray, perm: np.ndarray, n: int):
    u, v = _stub_pairs(seq, perm)
    if np.any(u == v):
        return None
    key = u * np.int64(n + 1) + v
    if np.unique(key).size != key.size:
        return None
    return list(zip(u.tolist(), v.tolist()))


def sample_batch(
    ds: DegreeSet,
    dp: DPTable,
    rngs: list[np.random.Generator],
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> tuple[list[Graph], list[int]]:
    """Rejection-sample one simple graph per generator, trials in lockstep.

    Both the degree sequence and the pairing are redrawn on every attempt.
    Returns the graphs and per-trial attempt counts; raises MaxAttemptsError
    if any trial exhausts its budget.
    """
    n, two_m = dp.n, dp.two_m
    if not dp.feasible:
        raise InfeasibleError(f"infeasible table (n={n}, two_m={two_m})")
    degs, logfact = _degree_arrays(ds, two_m)
    graphs: list[Graph | None] = [None] * len(rngs)
    attempts = [0] * len(rngs)
    active = list(range(len(rngs)))
    for attempt in range(1, max_attempts + 1):
        u_block = np.stack([rngs[t].random(n) for t in active])
        seqs = _walk_batch(dp, degs, logfact, u_block)
        remaining = []
        for row, t in enumerate(active):
            edges = _simple_edges_or_none(seqs[row], rngs[t].permutation(two_m), n)
            if edges is None:
                remaining.append(t)
            else:
                graphs[t] = Graph(n, edges)
                attempts[t] = attempt
        active = remaining
        if not active:
            break
    if active:
        raise MaxAttemptsError(
            f"{len(active)} of {len(rngs)} trials found no simple graph in "
            f"{max_attempts} attempts (n={n}, m={two_m // 2}, degrees={ds})"
        )
    return graphs, attempts


def sample_simple_graph(
    ds: DegreeSet,
    n: int,
    m: int,
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    dp: DPTable | None = None,
) -> tuple[Graph, int]:
    """First simple graph from the rejection loop, with its attempt count."""
    if dp is None:
        dp = build_dp(ds, n, 2 * m)
    elif (dp.n, dp.two_m) != (n, 2 * m):
        raise ValueError(
            f"table is for (n={dp.n}, two_m={dp.two_m}), not (n={n}, m={m})"
        )
    graphs, counts = sample_batch(ds, dp, [rng], max_attempts=max_attempts)
    return graphs[0], counts[0]


def trial_generator(
    seed: int, trial_index: int, point_index: int = 0
) -> np.random.Generator:
    """Trial-local generator, deterministic in (seed, point, trial).

    Streams for distinct (point, trial) pairs are statistically independent,
    so trials can run in any order or thread layout without changing results.
    """
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(point_index, trial_index))
    )


@lru_cache(maxsize=None)
def _exact_weight_sum(degrees: tuple[int, ...], i: int, j: int) -> Fraction:
    """Sum of prod 1/d_v! over all length-i sequences in ``degrees`` summing to j."""
    if i == 0:
        return Fraction(1) if j == 0 else Fraction(0)
    total = Fraction(0)
    for d in degrees:
        rest = j - d
        if rest < 0 or rest > (i - 1) * degrees[-1]:
            continue
        total += _exact_weight_sum(degrees, i - 1, rest) / math.factorial(d)
    return total


def exact_sequence_probability(ds: DegreeSet, n: int, m: int, seq) -> Fraction:
    """Exact P(seq) as a rational, independently of the float table.

    Sums the weights of all admissible sequences with exact arithmetic;
    guarded to small n since the state space grows with n * m.
    """
    if n > _ENUM_MAX_N:
        raise OutOfRangeError(f"exact enumeration is limited to n <= {_ENUM_MAX_N}")
    seq = tuple(int(d) for d in seq)
    if len(seq) != n:
        raise ValueError(f"sequence length {len(seq)} != n = {n}")
    two_m = 2 * m
    allowed = set(ds.degrees)
    if any(d not in allowed for d in seq) or sum(seq) != two_m:
        return Fraction(0)
    total = _exact_weight_sum(ds.degrees, n, two_m)
    if total == 0:
        raise InfeasibleError(
            f"no degree sequence over {ds} of length {n} sums to {two_m}"
        )
    weight = Fraction(1)
    for d in seq:
        weight /= math.factorial(d)
    return weight / total


def edges_for_mu(ds: DegreeSet, n: int, mu: float) -> tuple[int, float]:
    """Edge count hitting the critical window at location ``mu``.

    The raw target is round(alpha * n * (1 + mu * n^(-1/3))); if that count is
    not admissible, the admissible m nearest the target is used (ties toward
    larger m) with a warning.  Returns (m, realized_mu) where realized_mu is
    recomputed from the returned m.
    """
    cp = critical_point(ds)
    scale = float(n) ** (1.0 / 3.0)
    base = round(cp.alpha * n * (1.0 + mu / scale))
    lo = n * ds.min_degree // 2 + 1
    hi = (n * ds.max_degree - 1) // 2
    span = max(abs(base - lo), abs(hi - base), periodicity(ds))
    for delta in range(span + 1):
        for signed in ((delta,) if delta == 0 else (delta, -delta)):
            m = base + signed
            if not lo <= m <= hi:
                continue
            if check_condition_C(ds, n, m).ok:
                if signed:
                    warnings.warn(
                        f"edge target m={base} is not admissible for {ds}, "
                        f"n={n}; using m={m}",
                        stacklevel=2,
                    )
                return m, (m / (cp.alpha * n) - 1.0) * scale
    raise InfeasibleError(f"no admissible edge count for {ds} with n={n}")
