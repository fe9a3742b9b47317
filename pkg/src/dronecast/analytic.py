"""
Closed-form recovery and mission-success probabilities.

The model: a source broadcasts n_T packets built from k source packets,
either by cyclic repetition of the sources (data carousel) or by appending
uniformly random GF(q) combinations (systematic RLNC).  Each packet reaches
drone j of cluster i independently with erasure probability eps[i][j]; each
cluster offloads everything its drones caught at its base.  A base misses a
packet only if every drone in its cluster missed it, so the cluster acts as
a single erasure channel with the product of its drones' erasure
probabilities.  Bases are isolated (each decodes alone; the mission
succeeds when all of them decode fully) or interconnected (they pool
packets, acting as one base fed by the union of all drones).

Carousel formulas are elementary and exact.  RLNC formulas mix the exact
rank kernels from `dronecast.kernels` over the binomial distribution of the
number of delivered packets; kernels are evaluated exactly and converted to
float only for the mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.stats import binom as binom_dist

from . import kernels

CAROUSEL = "carousel"
RLNC = "rlnc"
ISOLATED = "isolated"
INTERCONNECTED = "interconnected"


class CapExceededError(RuntimeError):
    """A transmission-count search hit its cap without reaching the target."""

    def __init__(self, cap: int, target: float):
        super().__init__(f"no n_T <= {cap} reaches target {target}")
        self.cap = cap
        self.target = target


def _factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p^m, or raise ValueError."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            v = q
            while v % p == 0:
                v //= p
                m += 1
            if v != 1:
                raise ValueError(f"q must be a prime power, got {q}")
            return p, m
    raise ValueError(f"q must be a prime power, got {q}")


@dataclass(frozen=True)
class NakagamiLink:
    """Fading-channel description from which an erasure probability follows.

    m_shape >= 0.5 is the Nakagami shape factor (1 = Rayleigh), mean_snr the
    average SNR and w_m the SNR threshold of the modulation/coding scheme in
    use; both SNR quantities are linear-scale.
    """

    m_shape: float
    mean_snr: float
    w_m: float

    def __post_init__(self):
        if self.m_shape < 0.5:
            raise ValueError(f"m_shape must be >= 0.5, got {self.m_shape}")
        if self.mean_snr <= 0:
            raise ValueError(f"mean_snr must be > 0, got {self.mean_snr}")
        if self.w_m <= 0:
            raise ValueError(f"w_m must be > 0, got {self.w_m}")


def nakagami_erasure(link: NakagamiLink) -> float:
    """High-SNR packet erasure approximation, clamped into [0, 1].

    (m / mean_snr)^m * w_m / Gamma(m); the approximation exceeds 1 at low
    SNR, hence the clamp.
    """
    m = link.m_shape
    return min(1.0, (m / link.mean_snr) ** m * link.w_m / math.gamma(m))


@dataclass(frozen=True)
class Scheme:
    """Transmission scheme: carousel, or systematic RLNC over GF(q)."""

    kind: str
    q: int | None = None

    def __post_init__(self):
        if self.kind == CAROUSEL:
            if self.q is not None:
                raise ValueError("carousel scheme takes no field size")
        elif self.kind == RLNC:
            if self.q is None:
                raise ValueError("rlnc scheme requires a field size q")
            if self.q > 256:
                raise ValueError(f"q must be <= 256, got {self.q}")
            _factor_prime_power(self.q)
        else:
            raise ValueError(f"unknown scheme kind {self.kind!r}")

    @staticmethod
    def carousel() -> "Scheme":
        return Scheme(CAROUSEL)

    @staticmethod
    def rlnc(q: int) -> "Scheme":
        return Scheme(RLNC, q)


def _resolve_eps(entry) -> float:
    if isinstance(entry, NakagamiLink):
        return nakagami_erasure(entry)
    e = float(entry)
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {e}")
    return e


@dataclass(frozen=True)
class Scenario:
    """A broadcast mission: message split, scheme, drone clusters, bases.

    clusters[i][j] is either a direct erasure probability in [0, 1] or a
    NakagamiLink for drone j of cluster i; links are resolved to a fixed
    per-drone erasure probability when the scenario is used.
    """

    k: int
    n_T: int
    scheme: Scheme
    clusters: tuple[tuple, ...]
    connectivity: str = ISOLATED

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n_T < self.k:
            raise ValueError(f"n_T must be >= k, got n_T={self.n_T}, k={self.k}")
        if self.connectivity not in (ISOLATED, INTERCONNECTED):
            raise ValueError(f"unknown connectivity {self.connectivity!r}")
        clusters = tuple(tuple(c) for c in self.clusters)
        if not clusters:
            raise ValueError("at least one cluster is required")
        for i, cluster in enumerate(clusters):
            if not cluster:
                raise ValueError(f"cluster {i + 1} is empty")
            for entry in cluster:
                _resolve_eps(entry)
        object.__setattr__(self, "clusters", clusters)

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    @property
    def drone_count(self) -> int:
        return sum(len(c) for c in self.clusters)

    def drone_eps(self) -> tuple[tuple[float, ...], ...]:
        """Per-drone erasure probabilities, NakagamiLinks resolved."""
        return tuple(tuple(_resolve_eps(e) for e in c) for c in self.clusters)

    def cluster_eps(self) -> tuple[float, ...]:
        """Per-base equivalent erasure probability (product over the cluster)."""
        return tuple(equivalent_erasure(c) for c in self.drone_eps())

    def union_eps(self) -> float:
        """Equivalent erasure probability of the union of all clusters."""
        return equivalent_erasure([e for c in self.drone_eps() for e in c])

    def with_n_T(self, n_T: int) -> "Scenario":
        return Scenario(self.k, n_T, self.scheme, self.clusters, self.connectivity)


@dataclass(frozen=True)
class ProbResult:
    """A named probability with provenance.

    kind is "exact" for closed forms, "lower_bound" where the closed form
    only bounds the true value (isolated-bases RLNC mission success), and
    "simulated" for Monte Carlo estimates (then stderr is set).
    """

    metric: str
    value: float
    kind: str
    stderr: float | None = None


@dataclass(frozen=True)
class MetricSpec:
    """A requested metric: mission_success, base_full(i) or base_partial(i, mu)."""

    name: str
    base: int | None = None
    mu: int | None = None

    def __post_init__(self):
        if self.name == "mission_success":
            if self.base is not None or self.mu is not None:
                raise ValueError("mission_success takes no base or mu")
        elif self.name == "base_full":
            if self.base is None or self.mu is not None:
                raise ValueError("base_full takes a base index only")
        elif self.name == "base_partial":
            if self.base is None or self.mu is None:
                raise ValueError("base_partial takes a base index and mu")
        else:
            raise ValueError(f"unknown metric {self.name!r}")

    def label(self) -> str:
        if self.name == "mission_success":
            return self.name
        if self.name == "base_full":
            return f"base_full({self.base})"
        return f"base_partial({self.base},mu={self.mu})"

    @staticmethod
    def mission_success() -> "MetricSpec":
        return MetricSpec("mission_success")

    @staticmethod
    def base_full(base: int) -> "MetricSpec":
        return MetricSpec("base_full", base=base)

    @staticmethod
    def base_partial(base: int, mu: int) -> "MetricSpec":
        return MetricSpec("base_partial", base=base, mu=mu)


# ---------------------------------------------------------------------------
# Erasure aggregation
# ---------------------------------------------------------------------------

def equivalent_erasure(cluster_eps) -> float:
    """Probability a packet escapes every drone in the group: the product."""
    eps = list(cluster_eps)
    if not eps:
        raise ValueError("equivalent_erasure needs at least one drone")
    for e in eps:
        if not 0.0 <= e <= 1.0:
            raise ValueError(f"erasure probability must be in [0, 1], got {e}")
    return math.prod(eps)


# ---------------------------------------------------------------------------
# Data carousel
# ---------------------------------------------------------------------------

def _check_eps(eps: float) -> None:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must be in [0, 1], got {eps}")


def carousel_full_recovery(eps: float, k: int, n_T: int) -> float:
    """P(a base with equivalent erasure eps collects all k source packets).

    The carousel sends lam+1 copies of the first rho sources and lam copies
    of the rest, lam = n_T // k, rho = n_T % k; every copy survives
    independently.
    """
    _check_eps(eps)
    if k < 1 or n_T < k:
        raise ValueError(f"need n_T >= k >= 1, got k={k}, n_T={n_T}")
    lam, rho = divmod(n_T, k)
    return (1.0 - eps ** (lam + 1)) ** rho * (1.0 - eps**lam) ** (k - rho)


def carousel_partial_recovery(eps: float, mu: int, k: int, n_T: int) -> float:
    """P(a base collects at least mu distinct source packets), exact.

    Sums the joint pmf of (#collected among the first rho sources,
    #collected among the rest) over all totals >= mu.  Collapses to
    carousel_full_recovery at mu = k.
    """
    _check_eps(eps)
    if k < 1 or n_T < k:
        raise ValueError(f"need n_T >= k >= 1, got k={k}, n_T={n_T}")
    if not 0 <= mu <= k:
        raise ValueError(f"need 0 <= mu <= k, got mu={mu}, k={k}")
    lam, rho = divmod(n_T, k)
    got_hi = 1.0 - eps ** (lam + 1)  # a first-rho source, lam+1 copies
    got_lo = 1.0 - eps**lam
    total = 0.0
    for y in range(mu, k + 1):
        for y1 in range(max(0, y - k + rho), min(y, rho) + 1):
            y2 = y - y1
            total += (kernels.binom(rho, y1) * kernels.binom(k - rho, y2)
                      * got_hi**y1 * got_lo**y2
                      * eps ** (lam * (k - y1 - y2) + rho - y1))
    return total


# ---------------------------------------------------------------------------
# Systematic RLNC: binomial mixtures of the exact kernels
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _full_kernel_floats(k: int, n_T: int, q: int) -> tuple[float, ...]:
    return tuple(float(kernels.full_recovery_given_n(k, n, n_T, q))
                 for n in range(k, n_T + 1))


@lru_cache(maxsize=None)
def _partial_kernel_floats(mu: int, k: int, n_T: int, q: int) -> tuple[float, ...]:
    return tuple(float(kernels.partial_recovery_given_n(mu, k, n, n_T, q))
                 for n in range(k, n_T + 1))


def _binomial_mixture(eps: float, k: int, n_T: int,
                      kernel_floats: tuple[float, ...]) -> float:
    ns = np.arange(k, n_T + 1)
    weights = binom_dist.pmf(ns, n_T, 1.0 - eps)
    return float(np.dot(weights, np.asarray(kernel_floats)))


def rlnc_full_recovery(eps: float, k: int, n_T: int, q: int) -> float:
    """P(a base with equivalent erasure eps decodes all k sources), exact.

    The number of delivered packets is Binomial(n_T, 1 - eps); conditioned
    on n delivered, the exact full-rank kernel applies.
    """
    _check_eps(eps)
    if k < 1 or n_T < k:
        raise ValueError(f"need n_T >= k >= 1, got k={k}, n_T={n_T}")
    return _binomial_mixture(eps, k, n_T, _full_kernel_floats(k, n_T, q))


def rlnc_partial_recovery(eps: float, mu: int, k: int, n_T: int, q: int) -> float:
    """Closed-form P(a base decodes at least mu of the k sources).

    The mixture runs over n from k to n_T, as the closed form is stated.
    For mu < k a base can also decode >= mu sources from fewer than k
    delivered packets, which this sum does not count, so the value is a
    lower bound in that regime (exact at mu = k); the gap closes as eps
    falls or n_T grows.
    """
    _check_eps(eps)
    if k < 1 or n_T < k:
        raise ValueError(f"need n_T >= k >= 1, got k={k}, n_T={n_T}")
    if not 0 <= mu <= k:
        raise ValueError(f"need 0 <= mu <= k, got mu={mu}, k={k}")
    return _binomial_mixture(eps, k, n_T, _partial_kernel_floats(mu, k, n_T, q))


# ---------------------------------------------------------------------------
# Mission-level metrics
# ---------------------------------------------------------------------------

def mission_isolated(scenario: Scenario) -> ProbResult:
    """P(every base decodes the full message), bases decoding alone.

    Exact for the carousel.  For RLNC the product over bases is a lower
    bound: coded packets share one coefficient draw across bases, which
    correlates their decoding events favourably.
    """
    if scenario.connectivity != ISOLATED:
        raise ValueError("scenario connectivity is not isolated")
    eps = scenario.cluster_eps()
    if scenario.scheme.kind == CAROUSEL:
        value = math.prod(carousel_full_recovery(e, scenario.k, scenario.n_T)
                          for e in eps)
        return ProbResult("mission_success", value, "exact")
    value = math.prod(rlnc_full_recovery(e, scenario.k, scenario.n_T,
                                         scenario.scheme.q) for e in eps)
    return ProbResult("mission_success", value, "lower_bound")


def mission_interconnected(scenario: Scenario) -> ProbResult:
    """P(the pooled bases decode the full message), exact for both schemes.

    Pooled bases behave like a single base served by the union of all
    drones, whose equivalent erasure probability is the product of every
    per-drone erasure probability.
    """
    if scenario.connectivity != INTERCONNECTED:
        raise ValueError("scenario connectivity is not interconnected")
    eps = scenario.union_eps()
    if scenario.scheme.kind == CAROUSEL:
        value = carousel_full_recovery(eps, scenario.k, scenario.n_T)
    else:
        value = rlnc_full_recovery(eps, scenario.k, scenario.n_T, scenario.scheme.q)
    return ProbResult("mission_success", value, "exact")


def mission_success(scenario: Scenario) -> ProbResult:
    if scenario.connectivity == ISOLATED:
        return mission_isolated(scenario)
    return mission_interconnected(scenario)


def base_full_recovery(scenario: Scenario, base: int) -> ProbResult:
    """P(base i decodes the full message from its own cluster), exact."""
    eps = _base_eps(scenario, base)
    if scenario.scheme.kind == CAROUSEL:
        value = carousel_full_recovery(eps, scenario.k, scenario.n_T)
    else:
        value = rlnc_full_recovery(eps, scenario.k, scenario.n_T, scenario.scheme.q)
    return ProbResult(MetricSpec.base_full(base).label(), value, "exact")


def base_partial_recovery(scenario: Scenario, base: int, mu: int) -> ProbResult:
    """P(base i decodes at least mu sources from its own cluster).

    Exact for the carousel and for RLNC at mu = k; see
    rlnc_partial_recovery for the mu < k caveat.
    """
    eps = _base_eps(scenario, base)
    if scenario.scheme.kind == CAROUSEL:
        value = carousel_partial_recovery(eps, mu, scenario.k, scenario.n_T)
    else:
        value = rlnc_partial_recovery(eps, mu, scenario.k, scenario.n_T,
                                      scenario.scheme.q)
    return ProbResult(MetricSpec.base_partial(base, mu).label(), value, "exact")


def _base_eps(scenario: Scenario, base: int) -> float:
    if not 1 <= base <= scenario.num_clusters:
        raise ValueError(f"base index {base} out of range 1..{scenario.num_clusters}")
    return scenario.cluster_eps()[base - 1]


def analytic_metric(scenario: Scenario, metric: MetricSpec) -> ProbResult:
    """Evaluate one metric on a scenario analytically."""
    if metric.name == "mission_success":
        return mission_success(scenario)
    if metric.name == "base_full":
        return base_full_recovery(scenario, metric.base)
    if not 0 <= metric.mu <= scenario.k:
        raise ValueError(f"mu={metric.mu} out of range 0..{scenario.k}")
    return base_partial_recovery(scenario, metric.base, metric.mu)


def min_transmissions(scenario: Scenario, target: float, *,
                      n_T_cap: int = 2000) -> int:
    """Smallest n_T whose analytic mission success reaches `target`.

    Unit-step scan upward from k; mission success is nondecreasing in n_T,
    so the first hit is minimal.  Raises CapExceededError past n_T_cap.
    The scenario's own n_T is ignored.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0, 1), got {target}")
    for n_T in range(scenario.k, n_T_cap + 1):
        if mission_success(scenario.with_n_T(n_T)).value >= target:
            return n_T
    raise CapExceededError(n_T_cap, target)
