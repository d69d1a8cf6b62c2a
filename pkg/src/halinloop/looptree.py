"""Looptrees of plane trees and the contracted/shifted comparison spaces.

``loop`` replaces each internal vertex's star by a cycle: vertex v with
children v1..vk gains edges (v,v1), (v,vk) and (vi,vi+1); for k = 1 the
edge (v,v1) is doubled.  The edge multiset is kept as stated even
though multiplicities never change distances.

``hat_H`` contracts every leaf edge of the underlying tree of a Halin
map, giving a metric on its internal vertices.  ``hat_L`` shifts the
subtrees on the root loop of the looptree according to the root mark:
the last subtree re-attaches at the root, the subtrees past the mark
move one slot onward, and the freed slot keeps the bare attachment
vertex.  These are the two spaces whose canonical vertex
identification has distortion at most twice the tree height.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvariantError, SizeGuardError, UsageError
from .gh_metric import Correspondence, FiniteMetricSpace
from .halin import HalinMap
from .plane_tree import MarkedTree, PlaneTree

_ALL_PAIRS_GUARD = 512
_MATRIX_GUARD = 4_096


@dataclass(frozen=True)
class LoopGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    @cached_property
    def _csr(self):
        from scipy.sparse import coo_matrix

        rows, cols = [], []
        for a, b in self.edges:
            if a != b:
                rows += [a, b]
                cols += [b, a]
        return coo_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n)
        ).tocsr()

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            if a != b:
                adj[a].append(b)
                adj[b].append(a)
        return adj

    def distances_from(self, sources) -> np.ndarray:
        """BFS distances from each source; rows follow ``sources``."""
        from scipy.sparse.csgraph import dijkstra

        if self.n == 1:
            return np.zeros((len(np.atleast_1d(sources)), 1))
        d = dijkstra(self._csr, unweighted=True, directed=False, indices=sources)
        if np.any(np.isinf(d)):
            raise UsageError("graph is disconnected")
        return np.atleast_2d(d)

    def graph_distance(self, u: int, v: int) -> int:
        return int(self.distances_from([u])[0][v])

    def all_distances(self, force: bool = False) -> np.ndarray:
        if self.n > _MATRIX_GUARD and not force:
            raise SizeGuardError(
                "distance matrix for %d vertices; pass force to override" % self.n
            )
        return self.distances_from(np.arange(self.n))

    def metric_space(self) -> FiniteMetricSpace:
        return FiniteMetricSpace(self.all_distances())

    def eccentricity(self, v: int) -> int:
        return int(self.distances_from([v])[0].max())

    def diameter(self) -> int:
        """Exact diameter: all-pairs BFS up to a size cutoff, beyond it
        a two-sweep lower bound refined level by level until certified."""
        if self.n == 1:
            return 0
        if self.n <= _ALL_PAIRS_GUARD:
            best = 0
            chunk = max(1, (1 << 22) // self.n)
            for s in range(0, self.n, chunk):
                d = self.distances_from(np.arange(s, min(self.n, s + chunk)))
                best = max(best, int(d.max()))
            return best
        return self._ifub()

    def _ifub(self) -> int:
        # double sweep: far vertex from an arbitrary start, then its
        # farthest partner; root the level structure between them
        d0 = self.distances_from([0])[0]
        a = int(d0.argmax())
        da = self.distances_from([a])[0]
        b = int(da.argmax())
        lb = int(da[b])
        db = self.distances_from([b])[0]
        mid_level = lb // 2
        on_path = np.nonzero((da + db == lb) & (da == mid_level))[0]
        root = int(on_path[0]) if on_path.size else a
        dr = self.distances_from([root])[0].astype(int)
        levels: dict[int, list[int]] = {}
        for v, lv in enumerate(dr):
            levels.setdefault(int(lv), []).append(v)
        for lv in sorted(levels, reverse=True):
            if 2 * lv <= lb:
                break
            batch = levels[lv]
            for s in range(0, len(batch), 64):
                ecc = self.distances_from(batch[s : s + 64]).max(axis=1)
                lb = max(lb, int(ecc.max()))
            if 2 * lv <= lb:
                break
        return lb


def loop(tree: PlaneTree) -> LoopGraph:
    """Looptree: each sibling block forms a cycle through the parent."""
    edges: list[tuple[int, int]] = []
    for v, kids in enumerate(tree.children()):
        k = len(kids)
        if k == 0:
            continue
        edges.append((v, kids[0]))
        edges.append((v, kids[-1]))
        for i in range(k - 1):
            edges.append((kids[i], kids[i + 1]))
    g = LoopGraph(tree.zeta, tuple(edges))
    expect = sum(k + 1 for k in tree.code if k >= 1)
    if len(g.edges) != expect:
        raise InvariantError("looptree edge count mismatch")
    return g


def loop_diameter(tree: PlaneTree) -> int:
    """Exact looptree diameter in linear time.

    A looptree is a tree of cycles glued at vertices, so the farthest
    pair appears inside some cycle: it maximizes a_s + d + a_t over
    positions s, t at cyclic distance d on the cycle, where a_p is the
    hanging height below position p.  Per cycle this is a sliding-
    window maximum of (a_s - s) over the doubled position array.
    """
    code = tree.code
    ch = tree.children()
    h = [0] * tree.zeta
    best = 0
    # postorder: children precede parents in any reversed preorder
    for v in range(tree.zeta - 1, -1, -1):
        k = code[v]
        if k == 0:
            continue
        L = k + 1
        a = [0] + [h[c] for c in ch[v]]
        h[v] = max(min(i, L - i) + a[i] for i in range(1, L))
        W = L // 2
        dbl = a + a
        window: deque[int] = deque()  # indices with decreasing a[s] - s
        for t in range(1, 2 * L):
            s = t - 1
            val = dbl[s] - s
            while window and dbl[window[-1]] - window[-1] <= val:
                window.pop()
            window.append(s)
            while window[0] < t - W:
                window.popleft()
            best = max(best, dbl[t % L] + t + dbl[window[0]] - window[0])
    return best


def halin_metric(H: HalinMap) -> FiniteMetricSpace:
    """Graph metric of the map itself (tree plus boundary edges; the
    half-edge carries no length)."""
    m = H.map
    edges = []
    for d, t in m.edges():
        edges.append((m.vertex_of[d], m.vertex_of[t]))
    return FiniteMetricSpace.from_edges(m.n_vertices, edges)


def hat_H(H: HalinMap) -> tuple[FiniteMetricSpace, tuple[int, ...]]:
    """Metric on the internal vertices of the underlying tree after
    contracting every leaf edge; returns (space, internal vertex ids)."""
    code = H.tree.code
    parents = H.tree.parents()
    internal = [v for v in range(H.tree.zeta) if code[v] > 0]
    index = {v: i for i, v in enumerate(internal)}

    def image(v: int) -> int:
        return index[v] if code[v] > 0 else index[parents[v]]

    edges = []
    for v in range(1, H.tree.zeta):
        if code[v] > 0:
            edges.append((index[parents[v]], index[v]))
    leaves = H.tree.leaves()
    lam = len(leaves)
    for i in range(lam):
        a, b = image(leaves[i]), image(leaves[(i + 1) % lam])
        if a != b:
            edges.append((a, b))
    return FiniteMetricSpace.from_edges(len(internal), edges), tuple(internal)


def hat_L(marked: MarkedTree) -> FiniteMetricSpace:
    """Root-shifted looptree metric on the vertex set of the tree."""
    T = marked.shape
    g = hat_L_graph(marked)
    d = LoopGraph(T.zeta, g).all_distances(force=T.zeta <= _MATRIX_GUARD)
    return FiniteMetricSpace(d)


def hat_L_graph(marked: MarkedTree) -> tuple[tuple[int, int], ...]:
    T = marked.shape
    code = T.code
    ch = T.children()
    m0 = marked.marks[0]
    delta = code[0]
    edges: list[tuple[int, int]] = []
    u_last = ch[0][-1] if delta else None
    for v, kids in enumerate(ch):
        k = len(kids)
        if k == 0 or v == 0:
            continue
        src = 0 if v == u_last else v
        edges.append((src, kids[0]))
        edges.append((src, kids[-1]))
        for i in range(k - 1):
            edges.append((kids[i], kids[i + 1]))
    if delta:
        u = ch[0]
        s = min(m0 + 1, delta)
        w = []
        for i in range(1, delta + 1):
            if i < s:
                w.append(u[i - 1])
            elif i == s:
                w.append(u[delta - 1])
            else:
                w.append(u[i - 2])
        edges.append((0, w[0]))
        edges.append((0, w[-1]))
        for i in range(delta - 1):
            edges.append((w[i], w[i + 1]))
    return tuple(edges)


def check_lemma_bound(H: HalinMap, exact: bool | None = None, budget: int = 10**8) -> dict:
    """Compare the map metric against the looptree of its marked tree.

    The target bound is height + 3/2.  In exact mode (the default for
    small maps) the Gromov-Hausdorff distance is computed by branch and
    bound and checked against the bound.  Otherwise a triangle-chain
    upper bound is reported: half the sum of the distortions of the
    leaf-contraction, canonical, and root-shift correspondences.
    """
    from .bijection import phi
    from .gh_metric import distortion, gh_exact, gh_lower_bound

    marked = phi(H)
    T = marked.shape
    height = T.height()
    bound = height + 1.5
    Hs = halin_metric(H)
    L = loop(T).metric_space()
    if exact is None:
        exact = H.n_internal <= 4
    out = {
        "n": H.n_internal,
        "height": height,
        "bound": bound,
        "gh": None,
        "lower": None,
        "upper": None,
        "ok": None,
    }
    if exact:
        g = gh_exact(Hs, L, budget=budget)
        out["gh"] = g
        out["ok"] = g <= bound + 1e-9
        return out

    hh, hl, R = canonical_correspondence(H)
    code = H.tree.code
    parents = H.tree.parents()
    internal = [v for v in range(H.tree.zeta) if code[v] > 0]
    index = {v: i for i, v in enumerate(internal)}
    contract = Correspondence(
        tuple(
            (v, index[v] if code[v] > 0 else index[parents[v]])
            for v in range(H.tree.zeta)
        )
    )
    ident = Correspondence(tuple((i, i) for i in range(L.size)))
    out["upper"] = 0.5 * (
        distortion(contract, Hs, hh)
        + distortion(R, hh, hl)
        + distortion(ident, L, hl)
    )
    out["lower"] = gh_lower_bound(Hs, L)
    out["ok"] = out["upper"] <= bound + 1e-9
    return out


def canonical_correspondence(
    H: HalinMap,
) -> tuple[FiniteMetricSpace, FiniteMetricSpace, Correspondence]:
    """The vertex identification between the leaf-contracted map metric
    and the root-shifted looptree of its marked tree: each marked-tree
    vertex is matched with the internal map vertex carved out by its
    contour segment."""
    from .bijection import phi, phi_inverse_with_cells

    marked = phi(H)
    H2, internal_of = phi_inverse_with_cells(marked)
    if H2.tree.code != H.tree.code:
        raise InvariantError("map does not round-trip through its marked tree")
    hh, internal = hat_H(H)
    index = {v: i for i, v in enumerate(internal)}
    hl = hat_L(marked)
    pairs = []
    for v, w in enumerate(internal_of):
        if H.tree.code[w] == 0:
            raise InvariantError("cell vertex is a leaf")
        pairs.append((index[w], v))
    return hh, hl, Correspondence(tuple(pairs))
