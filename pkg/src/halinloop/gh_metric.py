"""Finite metric spaces, correspondences and Gromov-Hausdorff distance.

The exact GH solver minimizes the distortion over correspondences of
the form graph(f) union transpose(graph(g)) for function pairs
f: X -> Y, g: Y -> X.  This is sufficient: any correspondence R
contains such a union R' (pick one partner per point), R' is itself a
correspondence, and distortion is monotone under inclusion, so the
minimum over function pairs equals the infimum over all
correspondences.  The search is branch-and-bound with a running
incumbent and an evaluation budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BudgetExceededError, InvariantError, UsageError

_SLACK = 1e-9


@dataclass(frozen=True)
class FiniteMetricSpace:
    dist: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", d)
        n = len(d)
        if d.shape != (n, n):
            raise InvariantError("distance matrix must be square")
        if np.any(np.abs(np.diag(d)) > _SLACK) or np.any(d < -_SLACK):
            raise InvariantError("distances must be non-negative with zero diagonal")
        if np.any(np.abs(d - d.T) > _SLACK):
            raise InvariantError("distance matrix must be symmetric")
        if n <= 256:
            via = np.min(d[:, :, None] + d[None, :, :], axis=1)
            if np.any(d > via + _SLACK):
                raise InvariantError("triangle inequality violated")
        else:
            rng = np.random.default_rng(0)
            for _ in range(2000):
                i, j, k = rng.integers(0, n, 3)
                if d[i, j] > d[i, k] + d[k, j] + _SLACK:
                    raise InvariantError("triangle inequality violated")
    @property
    def size(self) -> int:
        return len(self.dist)

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.size else 0.0

    @cached_property
    def eccentricities(self) -> np.ndarray:
        return self.dist.max(axis=1)

    @staticmethod
    def from_edges(n: int, edges, labels=None) -> "FiniteMetricSpace":
        """Graph metric of an undirected unit-length (multi)graph."""
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import dijkstra

        if n == 1:
            return FiniteMetricSpace(np.zeros((1, 1)))
        rows, cols = [], []
        for a, b in edges:
            if a != b:
                rows += [a, b]
                cols += [b, a]
        g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
        d = dijkstra(g, unweighted=True, directed=False)
        if np.any(np.isinf(d)):
            raise UsageError("graph is disconnected")
        return FiniteMetricSpace(d)


@dataclass(frozen=True)
class Correspondence:
    pairs: tuple[tuple[int, int], ...]

    def validate(self, x: FiniteMetricSpace, y: FiniteMetricSpace) -> None:
        left = {p[0] for p in self.pairs}
        right = {p[1] for p in self.pairs}
        if left != set(range(x.size)) or right != set(range(y.size)):
            raise UsageError("correspondence projections are not surjective")


def distortion(r: Correspondence, x: FiniteMetricSpace, y: FiniteMetricSpace) -> float:
    """sup over pairs of pairs of |d_X - d_Y|."""
    r.validate(x, y)
    idx = np.array([p[0] for p in r.pairs])
    jdx = np.array([p[1] for p in r.pairs])
    dx = x.dist[np.ix_(idx, idx)]
    dy = y.dist[np.ix_(jdx, jdx)]
    return float(np.abs(dx - dy).max())


def gh_upper_bound_via(r: Correspondence, x: FiniteMetricSpace, y: FiniteMetricSpace) -> float:
    return 0.5 * distortion(r, x, y)


def gh_lower_bound(
    x: FiniteMetricSpace, y: FiniteMetricSpace, trials: int = 200, seed: int | None = 0
) -> float:
    """Valid lower bounds: half the diameter gap, half the Hausdorff
    distance between eccentricity sets, and randomized small-subset
    certificates (any correspondence must match each sampled tuple
    somewhere, so the best assignment bounds the distortion below)."""
    lb = 0.5 * abs(x.diameter - y.diameter)
    ex, ey = np.sort(x.eccentricities), np.sort(y.eccentricities)
    h1 = max(float(np.abs(ey - e).min()) for e in ex)
    h2 = max(float(np.abs(ex - e).min()) for e in ey)
    lb = max(lb, 0.5 * max(h1, h2))
    rng = np.random.default_rng(seed)
    k = 3
    if x.size >= k and y.size >= 1:
        from itertools import product

        for _ in range(trials):
            sub = rng.choice(x.size, size=k, replace=False)
            dx = x.dist[np.ix_(sub, sub)]
            best = np.inf
            for ys in product(range(y.size), repeat=k):
                dy = y.dist[np.ix_(ys, ys)]
                best = min(best, float(np.abs(dx - dy).max()))
                if best <= 2 * lb:
                    break
            lb = max(lb, 0.5 * best)
    return lb


def gh_exact(
    x: FiniteMetricSpace, y: FiniteMetricSpace, budget: int = 10**9
) -> float:
    """Exact Gromov-Hausdorff distance by branch-and-bound over pairs
    of functions f: X -> Y, g: Y -> X."""
    nx, ny = x.size, y.size
    if nx == 0 or ny == 0:
        raise UsageError("empty metric space")
    est = float(ny) ** nx * float(nx) ** ny
    if est > budget * 64:
        raise BudgetExceededError(
            "search space %.2e exceeds budget; use bounds instead" % est
        )
    dx, dy = x.dist, y.dist
    # incumbent: everything matched to one point on each side
    incumbent = max(x.diameter, y.diameter)
    # variables: images u_0..u_{nx-1} in Y, then preimages v_0..v_{ny-1} in X
    u = np.full(nx, -1, dtype=int)
    v = np.full(ny, -1, dtype=int)
    evals = 0

    def rec(pos: int, cur: float) -> None:
        nonlocal incumbent, evals
        if cur >= incumbent:
            return
        if pos == nx + ny:
            incumbent = cur
            return
        if pos < nx:
            i = pos
            for c in range(ny):
                evals += 1
                if evals > budget:
                    raise BudgetExceededError("distortion evaluation budget exceeded")
                m = cur
                for j in range(i):
                    m = max(m, abs(dx[i, j] - dy[c, u[j]]))
                if m < incumbent:
                    u[i] = c
                    rec(pos + 1, m)
                u[i] = -1
        else:
            j = pos - nx
            for c in range(nx):
                evals += 1
                if evals > budget:
                    raise BudgetExceededError("distortion evaluation budget exceeded")
                m = cur
                # cross terms against all fixed images, and pair terms
                for i in range(nx):
                    m = max(m, abs(dx[i, c] - dy[u[i], j]))
                    if m >= incumbent:
                        break
                else:
                    for jj in range(j):
                        m = max(m, abs(dx[c, v[jj]] - dy[j, jj]))
                        if m >= incumbent:
                            break
                if m < incumbent:
                    v[j] = c
                    rec(pos + 1, m)
                v[j] = -1

    rec(0, 0.0)
    return 0.5 * incumbent
