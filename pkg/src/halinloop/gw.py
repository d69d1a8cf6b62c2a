"""Offspring distributions and exact size-conditioned tree sampling.

Two families are provided: distributions induced by face weights,
mu(k) = a b^k (k+1) w(k+4) with a, b solved for criticality, and the
power-law family mu(k) = k^(-1-alpha) / zeta(alpha) whose tails lie in
the domain of attraction of an alpha-stable law.  Conditioned sampling
draws offspring counts (k_1, ..., k_n) i.i.d. from mu conditioned on
summing to n-1 and applies the cycle lemma: exactly one cyclic
rotation of the step sequence (k_i - 1) is a valid Lukasiewicz path.

For small n the conditioning uses plain vector rejection on the sum.
For large n a binary-splitting sampler is used: partial-sum tables are
built by FFT convolution and the sum is split recursively, which keeps
the conditional law exact up to floating-point rounding of the tables
(relative error ~1e-13; the rejection path is used wherever exactness
matters statistically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import zeta as _zeta

from .errors import UsageError
from .plane_tree import PlaneTree

_REJECTION_MAX_N = 256
_REJECTION_MAX_TRIES = 10_000_000


@dataclass(frozen=True)
class OffspringDistribution:
    """Probability mass function on {0, 1, 2, ...} with mean one."""

    name: str
    pmf_func: Callable[[int], float]
    mean: float
    alpha: float | None = None
    tail_constant: float | None = None
    params: dict = field(default_factory=dict)

    def pmf(self, k: int) -> float:
        if k < 0:
            return 0.0
        return self.pmf_func(k)

    def table(self, kmax: int) -> np.ndarray:
        """mu(0..kmax) as an array."""
        return np.array([self.pmf(k) for k in range(kmax + 1)], dtype=float)

    def period(self, probe: int = 10_000) -> int:
        """gcd of the support on k >= 1 (1 means aperiodic)."""
        g = 0
        for k in range(1, probe + 1):
            if self.pmf(k) > 0:
                g = gcd(g, k)
                if g == 1:
                    return 1
        if g == 0:
            raise UsageError("offspring distribution has no positive support")
        return g

    def validate(self) -> None:
        total = float(np.sum(self.table(100_000)))
        if self.alpha is not None:
            # add the exact power-law tail beyond the probe window
            total += self.tail_constant * float(_zeta(1 + self.alpha, 100_001))
        if abs(total - 1.0) > 1e-12:
            raise UsageError("pmf does not sum to 1 (got %.15f)" % total)
        if not self.pmf(1) < 1:
            raise UsageError("degenerate distribution with mu(1) = 1")
        if abs(self.mean - 1.0) > 1e-10:
            raise UsageError("distribution is not critical (mean %.12f)" % self.mean)


def mu_from_weights(
    w: Callable[[int], float], radius: float = 1.0, tol: float = 1e-13
) -> OffspringDistribution:
    """Critical offspring distribution mu(k) = a b^k (k+1) w(k+4).

    a is forced by normalization; b is solved by bisection so the mean
    is one.  The mean is strictly increasing in b on (0, radius), so a
    critical b inside the radius of convergence either exists or the
    supremum of the mean stays below one, which is reported as an
    error.
    """

    def sums(b: float) -> tuple[float, float]:
        s = m = 0.0
        bk = 1.0
        for k in range(200_000):
            term = bk * (k + 1) * w(k + 4)
            s += term
            m += k * term
            bk *= b
            if k > 100 and s > 0 and term < 1e-17 * s:
                break
        return s, m

    def mean_at(b: float) -> float:
        s, m = sums(b)
        if s <= 0 or not math.isfinite(s):
            raise UsageError("weight sequence vanishes on all reachable degrees")
        return m / s

    lo, hi = 0.0, radius * (1 - 1e-12)
    if mean_at(hi) < 1.0:
        raise UsageError(
            "no critical b inside the radius of convergence "
            "(supremum of the mean is %.6f < 1)" % mean_at(hi)
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_at(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    s, m = sums(b)
    a = 1.0 / s

    def pmf(k: int, a=a, b=b) -> float:
        return a * b**k * (k + 1) * w(k + 4)

    mu = OffspringDistribution(
        name="weights", pmf_func=pmf, mean=m / s, params={"a": a, "b": b}
    )
    if mu.period() != 1:
        object.__setattr__(mu, "params", {**mu.params, "periodic": mu.period()})
    return mu


def stable_mu(alpha: float) -> OffspringDistribution:
    """Power-law offspring law mu(k) = k^(-1-alpha)/zeta(alpha), k >= 1.

    The constant forces mean one; mu(0) = 1 - zeta(1+alpha)/zeta(alpha)
    is positive for alpha in (1,2).  The tail index alpha places the
    law in the domain of attraction of an alpha-stable distribution.
    """
    if not 1.0 < alpha < 2.0:
        raise UsageError("alpha must lie in (1, 2)")
    za = float(_zeta(alpha, 1))
    za1 = float(_zeta(1 + alpha, 1))
    c = 1.0 / za
    mu0 = 1.0 - za1 / za

    def pmf(k: int, c=c, mu0=mu0, alpha=alpha) -> float:
        if k == 0:
            return mu0
        return c * float(k) ** (-1.0 - alpha)

    return OffspringDistribution(
        name="stable", pmf_func=pmf, mean=1.0, alpha=alpha, tail_constant=c,
        params={"alpha": alpha, "c": c},
    )


def b_n(alpha: float, c: float, n: int) -> float:
    """Scaling constant (n / (c |Gamma(-alpha)|))^(1/alpha) for the
    power-law family (constant slowly-varying part)."""
    if not 1.0 < alpha < 2.0:
        raise UsageError("alpha must lie in (1, 2)")
    g = abs(math.gamma(-alpha))
    return (n / (c * g)) ** (1.0 / alpha)


def b_n_of(mu: OffspringDistribution, n: int) -> float:
    if mu.alpha is None or mu.tail_constant is None:
        raise UsageError("scaling constant requires a power-law tail")
    return b_n(mu.alpha, mu.tail_constant, n)


# ---------------------------------------------------------------------------
# conditioned sampling


def _head_table(mu: OffspringDistribution, n: int) -> np.ndarray:
    """mu truncated to {0..n-1} and renormalized; exact for the
    conditional law since any k > n-1 is incompatible with the sum."""
    p = mu.table(n - 1)
    t = p.sum()
    if t <= 0:
        raise UsageError("empty support after truncation")
    return p / t


class _SplitTables:
    """Partial-sum pmf tables P_m = law of k_1+...+k_m truncated to
    [0, n-1], built by doubling with FFT convolutions."""

    def __init__(self, p: np.ndarray, n: int):
        self.n = n
        self.tables: dict[int, np.ndarray] = {1: p}
        need = set()
        m = n
        stack = [n]
        while stack:
            m = stack.pop()
            if m in need or m == 1:
                continue
            need.add(m)
            stack.append((m + 1) // 2)
            stack.append(m // 2)
        for m in sorted(need):
            a, b = (m + 1) // 2, m // 2
            conv = fftconvolve(self.tables[a], self.tables[b])[: n]
            np.clip(conv, 0.0, None, out=conv)
            self.tables[m] = conv

    def sample_counts(self, n_items: int, total: int, rng: np.random.Generator) -> np.ndarray:
        """One vector (k_1..k_m) with k_i iid ~ p given sum == total."""
        out = np.empty(n_items, dtype=np.int64)
        pos = 0
        stack = [(n_items, total)]
        while stack:
            m, s = stack.pop()
            if m == 1:
                out[pos] = s
                pos += 1
                continue
            a, b = (m + 1) // 2, m // 2
            pa, pb = self.tables[a], self.tables[b]
            lo = max(0, s - (len(pb) - 1))
            hi = min(s, len(pa) - 1)
            if lo > hi:
                raise UsageError("size outside the support of the total progeny")
            w = pa[lo : hi + 1] * pb[s - hi : s - lo + 1][::-1]
            tot = w.sum()
            if tot <= 0:
                raise UsageError("size outside the support of the total progeny")
            cdf = np.cumsum(w)
            sa = lo + int(np.searchsorted(cdf, rng.random() * tot, side="right"))
            sa = min(sa, hi)
            stack.append((b, s - sa))
            stack.append((a, sa))
        return out


_tables_cache: dict[tuple, _SplitTables] = {}


def _split_tables(mu: OffspringDistribution, n: int) -> _SplitTables:
    key = (mu.name, tuple(sorted(mu.params.items())), n)
    if key not in _tables_cache:
        if len(_tables_cache) > 8:
            _tables_cache.clear()
        _tables_cache[key] = _SplitTables(_head_table(mu, n), n)
    return _tables_cache[key]


def _conditioned_counts(
    mu: OffspringDistribution, n: int, rng: np.random.Generator
) -> np.ndarray:
    p = _head_table(mu, n)
    support = np.nonzero(p > 0)[0]
    g = int(np.gcd.reduce(support[support > 0])) if np.any(support > 0) else 0
    if p[0] <= 0 or g == 0 or (n - 1) % g != 0:
        raise UsageError("size %d is outside the support of the total progeny" % n)
    if n <= _REJECTION_MAX_N:
        support = np.arange(n)
        batch = max(64, 4 * n)
        tries = 0
        while tries < _REJECTION_MAX_TRIES:
            ks = rng.choice(support, size=(batch, n), p=p)
            sums = ks.sum(axis=1)
            hit = np.nonzero(sums == n - 1)[0]
            if hit.size:
                return ks[hit[0]]
            tries += batch
        raise UsageError("size appears to be outside the support of the total progeny")
    return _split_tables(mu, n).sample_counts(n, n - 1, rng)


def cycle_rotation(ks: np.ndarray) -> np.ndarray:
    """The unique cyclic rotation of the offspring sequence whose step
    sequence (k_i - 1) is a valid Lukasiewicz path."""
    steps = np.asarray(ks, dtype=np.int64) - 1
    walk = np.cumsum(steps)
    if walk[-1] != -1:
        raise UsageError("offspring counts do not sum to n - 1")
    cut = int(np.argmin(walk)) + 1
    return np.concatenate([ks[cut:], ks[:cut]])


def sample_conditioned(
    mu: OffspringDistribution, n: int, seed: int | np.random.Generator | None = None
) -> PlaneTree:
    """One tree with the branching-process law conditioned on n vertices."""
    if n < 1:
        raise UsageError("need n >= 1")
    if n == 1:
        return PlaneTree((0,))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    ks = _conditioned_counts(mu, n, rng)
    code = cycle_rotation(ks)
    return PlaneTree(tuple(int(k) for k in code))


def exact_conditioned_masses(mu: OffspringDistribution, n: int) -> dict[tuple[int, ...], float]:
    """Exact conditional probabilities of every shape with n vertices,
    by enumeration; usable as a goodness-of-fit reference for small n."""
    from .plane_tree import enumerate_trees

    masses = {}
    for t in enumerate_trees(n, force=True):
        m = 1.0
        for k in t.code:
            m *= mu.pmf(k)
        masses[t.code] = m
    total = sum(masses.values())
    if total <= 0:
        raise UsageError("size outside the support of the total progeny")
    return {c: m / total for c, m in masses.items()}
