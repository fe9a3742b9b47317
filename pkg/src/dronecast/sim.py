"""
Seedable Monte Carlo simulation of one full broadcast mission.

A trial realizes the whole system once: the source emits n_T packets
(carousel: packet n repeats source ((n-1) mod k) + 1; RLNC: the k sources
followed by uniformly random GF(q) combinations, the all-zero coefficient
vector included), every drone erases each packet independently, every base
collects the union of its cluster's catches, and decoding runs per base
and on the union of all bases.

Determinism: trial t of a run seeded with s draws from a counter-based
Philox stream with key s and counter t * 2^128 (see `trial_rng`), so any
partition of trials across workers reproduces the same outcomes
bit-for-bit.  Within a trial, randomness is consumed in a fixed order:
first the coded coefficient block (RLNC only), then one uniform deviate
per (drone, packet), drones in cluster order; a packet survives to a
drone when its deviate is >= the drone's erasure probability.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gf
from .analytic import (CAROUSEL, INTERCONNECTED, ISOLATED, MetricSpec,
                       Scenario, _factor_prime_power)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TrialOutcome:
    """One broadcast realization, decoded per base and on the pooled union.

    per_base_received holds 0-based transmitted-packet indices; for RLNC
    the corresponding coefficient rows are unit vectors for indices < k and
    rows of coding_rows for the rest (see base_coefficient_rows).
    Duplicate deliveries within a cluster collapse in the union and never
    change decoded counts.
    """

    per_base_received: tuple[tuple[int, ...], ...]
    per_base_decoded: tuple[int, ...]
    per_base_full: tuple[bool, ...]
    union_received: tuple[int, ...]
    union_decoded: int
    union_full: bool
    mission_success: bool
    coding_rows: np.ndarray | None = None  # (n_T - k, k), RLNC only

    def base_coefficient_rows(self, base: int) -> np.ndarray:
        """Coefficient rows delivered to base (1-based index), RLNC only."""
        if self.coding_rows is None:
            raise ValueError("carousel trials carry no coefficient rows")
        k = self.coding_rows.shape[1]
        full = np.vstack([np.eye(k, dtype=np.int16), self.coding_rows])
        return full[list(self.per_base_received[base - 1])]


@dataclass(frozen=True)
class SimEstimate:
    """A Monte Carlo probability estimate with its binomial standard error."""

    metric: str
    trials: int
    successes: int
    estimate: float
    std_error: float
    seed: int


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """The documented per-trial stream: Philox(key=seed, counter=trial<<128)."""
    if trial < 0:
        raise ValueError("trial index must be >= 0")
    key = int(seed) & (2**128 - 1)
    return np.random.Generator(np.random.Philox(key=key, counter=trial << 128))


class _StreamCursor:
    """Reusable generator stepping through the per-trial Philox streams.

    Resetting the counter of one Philox instance reproduces
    `trial_rng(seed, t)` bit-for-bit at a fraction of the construction
    cost.  Not thread-safe; use one cursor per worker.
    """

    def __init__(self, seed: int):
        key = int(seed) & (2**128 - 1)
        self._bitgen = np.random.Philox(key=key)
        self.gen = np.random.Generator(self._bitgen)
        self._state = {
            "bit_generator": "Philox",
            "state": {"counter": None,
                      "key": np.array([key & _MASK64, key >> 64], dtype=np.uint64)},
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }

    def at_trial(self, trial: int) -> np.random.Generator:
        self._state["state"]["counter"] = np.array(
            [0, 0, trial & _MASK64, trial >> 64], dtype=np.uint64)
        self._bitgen.state = self._state
        return self.gen


class _TrialContext:
    """Immutable per-scenario precomputation shared by all trials."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.k = scenario.k
        self.n_T = scenario.n_T
        flat = [e for c in scenario.drone_eps() for e in c]
        self.eps_col = np.array(flat, dtype=np.float64)[:, None]
        starts = [0]
        for cluster in scenario.clusters[:-1]:
            starts.append(starts[-1] + len(cluster))
        self.cluster_starts = np.array(starts)
        self.src_of = [i % scenario.k for i in range(scenario.n_T)]
        self.rlnc = scenario.scheme.kind != CAROUSEL
        if self.rlnc:
            p, m = _factor_prime_power(scenario.scheme.q)
            self.field = gf.GaloisField(p, m)
        else:
            self.field = None


def _decode_rlnc(ctx: _TrialContext, mask: list,
                 coded_rows: list) -> tuple[int, bool]:
    """(decoded source count, full recovery) for one delivered packet set.

    Received source packets contribute unit rows directly; restricting the
    received coded rows to the still-missing source columns pivots them out,
    so only a small matrix needs elimination.  Restricted rows are
    deduplicated and zero rows dropped, neither of which affects rank or
    the decodable-source count.
    """
    k = ctx.k
    missing = [b for b in range(k) if not mask[b]]
    if not missing:
        return k, True
    h = k - len(missing)
    rows: list[list[int]] = []
    seen = set()
    for i in range(k, ctx.n_T):
        if mask[i]:
            row = coded_rows[i - k]
            restricted = tuple(row[c] for c in missing)
            if restricted not in seen and any(restricted):
                seen.add(restricted)
                rows.append(list(restricted))
    if not rows:
        return h, False
    rref, pivots = gf._rref_rows(ctx.field, rows)
    units = 0
    for i in range(len(pivots)):
        nz = 0
        for x in rref[i]:
            if x:
                nz += 1
                if nz > 1:
                    break
        if nz == 1:
            units += 1
    return h + units, len(pivots) == len(missing)


def _decode_carousel(ctx: _TrialContext, mask: list) -> tuple[int, bool]:
    src_of = ctx.src_of
    distinct = len({src_of[i] for i in range(ctx.n_T) if mask[i]})
    return distinct, distinct == ctx.k


def _run(ctx: _TrialContext, rng: np.random.Generator, collect: bool):
    if ctx.rlnc:
        coded = rng.integers(0, ctx.field.q, size=(ctx.n_T - ctx.k, ctx.k),
                             dtype=np.int16)
        coded_rows = coded.tolist()
    else:
        coded = None
        coded_rows = None
    received = rng.random((ctx.eps_col.shape[0], ctx.n_T)) >= ctx.eps_col
    base_masks = np.logical_or.reduceat(received, ctx.cluster_starts, axis=0)
    union_mask = base_masks.any(axis=0).tolist()
    masks = base_masks.tolist()

    decoded: list[int] = []
    full: list[bool] = []
    for mask in masks:
        d, f = (_decode_rlnc(ctx, mask, coded_rows) if ctx.rlnc
                else _decode_carousel(ctx, mask))
        decoded.append(d)
        full.append(f)
    u_decoded, u_full = (_decode_rlnc(ctx, union_mask, coded_rows) if ctx.rlnc
                         else _decode_carousel(ctx, union_mask))
    mission = u_full if ctx.scenario.connectivity == INTERCONNECTED else all(full)

    if not collect:
        return decoded, full, u_decoded, u_full, mission
    return TrialOutcome(
        per_base_received=tuple(
            tuple(i for i in range(ctx.n_T) if mask[i]) for mask in masks),
        per_base_decoded=tuple(decoded),
        per_base_full=tuple(full),
        union_received=tuple(i for i in range(ctx.n_T) if union_mask[i]),
        union_decoded=u_decoded,
        union_full=u_full,
        mission_success=mission,
        coding_rows=coded,
    )


def run_trial(scenario: Scenario, rng: np.random.Generator) -> TrialOutcome:
    """Simulate one broadcast mission with the given random stream."""
    return _run(_TrialContext(scenario), rng, collect=True)


def _metric_predicate(ctx: _TrialContext, metric: MetricSpec):
    n = ctx.scenario.num_clusters
    if metric.name == "mission_success":
        return lambda lean: lean[4]
    if metric.base is None or not 1 <= metric.base <= n:
        raise ValueError(f"base index {metric.base} out of range 1..{n}")
    b = metric.base - 1
    if metric.name == "base_full":
        return lambda lean: lean[1][b]
    if not 0 <= metric.mu <= ctx.k:
        raise ValueError(f"mu={metric.mu} out of range 0..{ctx.k}")
    mu = metric.mu
    return lambda lean: lean[0][b] >= mu


def estimate_many(scenario: Scenario, metrics, trials: int, seed: int, *,
                  workers: int = 1) -> list[SimEstimate]:
    """Estimate several metrics from one shared set of trials.

    Equivalent to calling `estimate` per metric with the same seed (the
    per-trial streams depend only on (seed, trial index)), but the system
    is realized once per trial.  Results are identical for any `workers`.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    metrics = list(metrics)
    ctx = _TrialContext(scenario)
    predicates = [_metric_predicate(ctx, m) for m in metrics]

    def count_range(bounds) -> list[int]:
        lo, hi = bounds
        cursor = _StreamCursor(seed)
        counts = [0] * len(predicates)
        for t in range(lo, hi):
            lean = _run(ctx, cursor.at_trial(t), collect=False)
            for i, pred in enumerate(predicates):
                if pred(lean):
                    counts[i] += 1
        return counts

    workers = max(1, int(workers))
    if workers == 1:
        counts = count_range((0, trials))
    else:
        step = math.ceil(trials / workers)
        bounds = [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]
        counts = [0] * len(predicates)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(count_range, bounds):
                counts = [a + b for a, b in zip(counts, part)]

    out = []
    for metric, successes in zip(metrics, counts):
        p = successes / trials
        out.append(SimEstimate(metric=metric.label(), trials=trials,
                               successes=successes, estimate=p,
                               std_error=math.sqrt(p * (1.0 - p) / trials),
                               seed=seed))
    return out


def estimate(scenario: Scenario, metric: MetricSpec, trials: int, seed: int, *,
             workers: int = 1) -> SimEstimate:
    """Monte Carlo estimate of one metric; deterministic in (scenario,
    metric, trials, seed) regardless of worker count."""
    return estimate_many(scenario, [metric], trials, seed, workers=workers)[0]
