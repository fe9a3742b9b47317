"""
Exact combinatorial kernels for decoding probabilities, as rationals.

A broadcast of n_T packets starts with the k source packets; the remaining
n_T - k packets are random linear combinations of the sources with
coefficients drawn uniformly from GF(q) (the all-zero coefficient vector is
allowed).  Conditioned on a receiver holding a uniformly random subset of n
of the n_T packets, these kernels give the probability of decoding all k
source packets (`full_recovery_given_n`) or at least mu of them
(`partial_recovery_given_n`, where a source packet counts as decoded when
its standard basis vector lies in the span of the received coefficient
vectors).

Everything here is exact `fractions.Fraction` arithmetic: the partial-
recovery sum mixes astronomically large Gaussian binomials with tiny powers
of 1/q and alternating signs, which floating point cannot cancel safely.
Convert to float only at the boundary.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache


def binom(a: int, b: int) -> int:
    """C(a, b); zero outside 0 <= b <= a.  Requires a >= 0."""
    if a < 0:
        raise ValueError(f"binom requires a >= 0, got a={a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


@lru_cache(maxsize=None)
def gauss_binom(a: int, b: int, q: int) -> int:
    """Gaussian (q-analog) binomial coefficient [a choose b]_q.

    Counts b-dimensional subspaces of GF(q)^a.  Zero outside 0 <= b <= a;
    one for b = 0.  Computed from the product formula
    prod_{i=0}^{b-1} (q^(a-i) - 1) / (q^(i+1) - 1), which is an exact
    integer.
    """
    if a < 0:
        raise ValueError(f"gauss_binom requires a >= 0, got a={a}")
    if q < 2:
        raise ValueError(f"gauss_binom requires q >= 2, got q={q}")
    if b < 0 or b > a:
        return 0
    num = 1
    den = 1
    for i in range(b):
        num *= q ** (a - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def _check_params(k: int, n: int, n_T: int, q: int) -> None:
    if not 0 <= k <= n_T:
        raise ValueError(f"need 0 <= k <= n_T, got k={k}, n_T={n_T}")
    if not 0 <= n <= n_T:
        raise ValueError(f"need 0 <= n <= n_T, got n={n}, n_T={n_T}")
    if q < 2:
        raise ValueError(f"need q >= 2, got q={q}")


def full_recovery_given_n(k: int, n: int, n_T: int, q: int) -> Fraction:
    """P(all k source packets decodable | n of n_T packets received), exact.

    Sums over h, the number of received source packets: a hypergeometric
    weight C(k,h) C(n_T-k, n-h) / C(n_T, n) times the probability that the
    n-h received coded vectors span the remaining k-h dimensions,
    prod_{w=0}^{k-h-1} (1 - q^-(n-h-w)).

    Returns 0 for n < k: fewer packets than sources can never reach full
    rank.
    """
    _check_params(k, n, n_T, q)
    if n < k:
        return Fraction(0)
    total = Fraction(0)
    for h in range(max(0, n - n_T + k), k + 1):
        ways = binom(k, h) * binom(n_T - k, n - h)
        if ways == 0:
            continue
        num = 1
        qexp = 0
        for w in range(k - h):
            e = n - h - w
            num *= q**e - 1
            qexp += e
        total += Fraction(ways * num, q**qexp)
    return total / binom(n_T, n)


def partial_recovery_given_n(mu: int, k: int, n: int, n_T: int, q: int) -> Fraction:
    """P(at least mu source packets decodable | n of n_T received), exact.

    Enumerates the rank r >= mu of the received set and the split of the r
    independent packets into h sources and r-h coded packets whose span
    contains at least mu-h standard basis vectors; the subspace count uses
    Gaussian binomials with inclusion-exclusion.  Reduces exactly to
    `full_recovery_given_n` at mu = k.

    For n < mu the rank sum is empty and the value is 0.
    """
    _check_params(k, n, n_T, q)
    if not 0 <= mu <= k:
        raise ValueError(f"need 0 <= mu <= k, got mu={mu}, k={k}")
    total = Fraction(0)
    h_low = max(0, n - n_T + k)
    for r in range(mu, min(n, k) + 1):
        for h in range(h_low, r + 1):
            ways = binom(k, h) * binom(n_T - k, n - h)
            if ways == 0:
                continue
            num = 1
            qexp = (n - h) * (k - r)
            for w in range(r - h):
                e = n - h - w
                num *= q**e - 1
                qexp += e
            inner = 0
            for b in range(max(0, mu - h), r - h + 1):
                s = 0
                for ell in range(k - h - b + 1):
                    t = binom(k - h - b, ell) * gauss_binom(k - h - b - ell,
                                                            r - h - b - ell, q)
                    s += -t if ell & 1 else t
                inner += binom(k - h, b) * s
            total += Fraction(ways * num * inner, q**qexp)
    return total / binom(n_T, n)
