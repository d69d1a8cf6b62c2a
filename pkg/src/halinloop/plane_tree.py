"""Rooted plane trees stored as child-count sequences.

A tree with vertices v(0) < v(1) < ... < v(n-1) in lexicographic
(depth-first) order is stored as the sequence of child counts
(k_{v(0)}, ..., k_{v(n-1)}).  This is exactly the step sequence of the
tree's encoding walk, so validity is a prefix condition on partial sums
of (k - 1).  Ulam-Harris labels are derived views and never stored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import InvariantError, SizeGuardError

TREE_ENUM_GUARD = 12
MARKED_ENUM_GUARD = 10


def _check_code(code: tuple[int, ...]) -> None:
    if len(code) < 1:
        raise InvariantError("tree code must be non-empty")
    s = 0
    for i, k in enumerate(code):
        if k < 0:
            raise InvariantError("child counts must be non-negative")
        s += k - 1
        if s < 0 and i < len(code) - 1:
            raise InvariantError("code violates prefix positivity at %d" % i)
    if s != -1:
        raise InvariantError("code does not sum to n-1")


@dataclass(frozen=True)
class PlaneTree:
    """A rooted plane tree; ``code[i]`` is the child count of the i-th
    vertex in depth-first order."""

    code: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "code", tuple(int(k) for k in self.code))
        _check_code(self.code)

    @property
    def zeta(self) -> int:
        """Total number of vertices."""
        return len(self.code)

    def parents(self) -> list[int]:
        """Parent index per vertex (-1 for the root)."""
        par = [-1] * self.zeta
        stack: list[list[int]] = []  # [vertex, remaining children]
        for i, k in enumerate(self.code):
            if i > 0:
                while stack[-1][1] == 0:
                    stack.pop()
                par[i] = stack[-1][0]
                stack[-1][1] -= 1
            stack.append([i, k])
        return par

    def children(self) -> list[list[int]]:
        ch: list[list[int]] = [[] for _ in range(self.zeta)]
        for v, p in enumerate(self.parents()):
            if p >= 0:
                ch[p].append(v)
        return ch

    def depths(self) -> list[int]:
        dep = [0] * self.zeta
        for v, p in enumerate(self.parents()):
            if p >= 0:
                dep[v] = dep[p] + 1
        return dep

    def height(self) -> int:
        return max(self.depths())

    def leaves(self) -> list[int]:
        """Leaf vertices in lexicographic order."""
        return [i for i, k in enumerate(self.code) if k == 0]

    def leaf_count(self) -> int:
        return len(self.leaves())

    def lex_vertices(self) -> list[tuple[int, int]]:
        """(depth, child count) per vertex in depth-first order."""
        dep = self.depths()
        return [(dep[i], self.code[i]) for i in range(self.zeta)]

    def __str__(self) -> str:
        return format_tree(self)


@dataclass(frozen=True)
class MarkedTree:
    """A plane tree with one mark per vertex, ``0 <= mark <= k_v``."""

    shape: PlaneTree
    marks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "marks", tuple(int(m) for m in self.marks))
        if len(self.marks) != self.shape.zeta:
            raise InvariantError("need one mark per vertex")
        for m, k in zip(self.marks, self.shape.code):
            if not 0 <= m <= k:
                raise InvariantError("mark %d out of range for k=%d" % (m, k))

    def __str__(self) -> str:
        return format_marked(self)


@dataclass(frozen=True)
class LukasiewiczPath:
    """Partial-sum walk of (child count - 1): starts at 0, stays
    non-negative before the final step, ends at -1."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        v = self.values
        if len(v) < 2 or v[0] != 0 or v[-1] != -1:
            raise InvariantError("path must run from 0 to -1")
        for i in range(len(v) - 1):
            if v[i + 1] - v[i] < -1:
                raise InvariantError("downward steps are limited to -1")
            if v[i] < 0 and i < len(v) - 1:
                raise InvariantError("path is negative before its last step")


def lukasiewicz(tree: PlaneTree) -> LukasiewiczPath:
    vals = [0]
    for k in tree.code:
        vals.append(vals[-1] + k - 1)
    return LukasiewiczPath(tuple(vals))


def tree_from_lukasiewicz(path: LukasiewiczPath) -> PlaneTree:
    vals = path.values
    code = tuple(vals[i + 1] - vals[i] + 1 for i in range(len(vals) - 1))
    return PlaneTree(code)


def enumerate_trees(n: int, force: bool = False):
    """All plane trees with n vertices (Catalan(n-1) of them)."""
    if n < 1:
        raise SizeGuardError("n must be >= 1")
    if n > TREE_ENUM_GUARD and not force:
        raise SizeGuardError("tree enumeration guarded at n <= %d" % TREE_ENUM_GUARD)

    def rec(prefix: list[int], walk: int, remaining: int):
        if remaining == 0:
            if walk == -1:
                yield PlaneTree(tuple(prefix))
            return
        for k in range(0, remaining):
            w = walk + k - 1
            if remaining > 1 and w < 0:
                continue
            if remaining == 1 and w != -1:
                continue
            # need enough downward steps left: w <= remaining - 1 always ok
            if w > remaining - 2 and remaining > 1:
                continue
            prefix.append(k)
            yield from rec(prefix, w, remaining - 1)
            prefix.pop()

    yield from rec([], 0, n)


def enumerate_marked(n: int, force: bool = False):
    """All marked trees with n vertices."""
    if n > MARKED_ENUM_GUARD and not force:
        raise SizeGuardError("marked enumeration guarded at n <= %d" % MARKED_ENUM_GUARD)
    for t in enumerate_trees(n, force=force):
        for marks in itertools.product(*(range(k + 1) for k in t.code)):
            yield MarkedTree(t, marks)


def marked_count_formula(n: int) -> int:
    """binom(3n-2, n-1)/n, the closed-form count of marked trees."""
    return math.comb(3 * n - 2, n - 1) // n


def format_tree(tree: PlaneTree) -> str:
    return " ".join(str(k) for k in tree.code)


def parse_tree(text: str) -> PlaneTree:
    return PlaneTree(tuple(int(tok) for tok in text.split()))


def format_marked(mt: MarkedTree) -> str:
    return " ".join("%d:%d" % (k, m) for k, m in zip(mt.shape.code, mt.marks))


def parse_marked(text: str) -> MarkedTree:
    ks, ms = [], []
    for tok in text.split():
        k, _, m = tok.partition(":")
        ks.append(int(k))
        ms.append(int(m))
    return MarkedTree(PlaneTree(tuple(ks)), tuple(ms))
