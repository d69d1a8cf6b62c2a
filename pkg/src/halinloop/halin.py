"""Halin maps built from plane trees.

A plane tree in which every internal vertex has at least one leaf child
and leaves are ordered left-to-right by the contour gives rise to a
planar map: the tree edges, a cycle through the leaves in contour
order, and one half-edge hanging off the root inside the face that
follows the first child.  The maps of interest are those whose tree
satisfies the one-leaf-child rule: every internal vertex has exactly
one leaf child.  Such a map with tree on 2n vertices has n internal
vertices, n leaves and n bounded faces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Callable, Iterator

from .errors import InvariantError, SizeGuardError, UsageError
from .planar_map import PlanarMap
from .plane_tree import PlaneTree, enumerate_trees

HALIN_ENUM_GUARD = 10


def satisfies_hstar(tree: PlaneTree) -> bool:
    """True when every internal vertex has exactly one leaf child."""
    code = tree.code
    children = tree.children()
    for v, k in enumerate(code):
        if k == 0:
            continue
        leaf_children = sum(1 for c in children[v] if code[c] == 0)
        if leaf_children != 1:
            return False
    return True


def hstar_trees(n: int, force: bool = False) -> Iterator[PlaneTree]:
    """Plane trees on 2n vertices with exactly one leaf child per
    internal vertex, in lexicographic code order."""
    if n < 1:
        raise UsageError("need n >= 1")
    if n > HALIN_ENUM_GUARD and not force:
        raise SizeGuardError(
            "enumeration of maps with %d internal vertices is too large; "
            "pass force to override" % n
        )
    for tree in enumerate_trees(2 * n, force=True):
        if tree.leaf_count() == n and satisfies_hstar(tree):
            yield tree


@dataclass(frozen=True)
class HalinMap:
    """A rooted plane tree together with the leaf cycle and half-edge.

    ``tree`` keeps the generating tree; ``map`` is the rotation system.
    ``outer_face`` is the unbounded face (the one the leaf cycle bounds
    from outside), ``root_face`` the bounded face containing the
    half-edge.
    """

    tree: PlaneTree
    map: PlanarMap

    @cached_property
    def outer_face(self) -> int:
        # the unbounded face is the orbit of the forward boundary darts
        zeta = self.tree.zeta
        return self.map.face_of[2 * (zeta - 1)]

    @cached_property
    def root_face(self) -> int:
        return self.map.face_of[self.map.half_edge_dart]

    def bounded_faces(self) -> list[int]:
        return [f for f in range(self.map.n_faces) if f != self.outer_face]

    def canonical(self) -> tuple:
        """Canonical form as a rooted map of the plane.

        The unbounded face is part of the structure: two Halin maps
        whose rotation systems agree on the sphere are still different
        objects when their unbounded faces differ.
        """
        return self.map.canonical(outer_face=self.outer_face)

    def weight(self, w: Callable[[int], Fraction | float]) -> Fraction | float:
        """Product of w(deg f) over bounded faces."""
        degs = self.map.face_degrees()
        return prod(w(degs[f]) for f in self.bounded_faces())

    @property
    def n_internal(self) -> int:
        return self.tree.zeta - self.tree.leaf_count()

    def validate(self) -> None:
        m = self.map
        m.check_euler()
        code = self.tree.code
        zeta = self.tree.zeta
        n = self.tree.leaf_count()
        if zeta != 2 * n or not satisfies_hstar(self.tree):
            raise InvariantError("tree violates the one-leaf-child rule")
        if m.n_edges != zeta - 1 + n:
            raise InvariantError("edge count mismatch")
        if m.n_faces != n + 1:
            raise InvariantError("face count mismatch")
        # internal vertices have degree k+1 (children plus up edge, or
        # plus half-edge at the root); leaves have degree 3.
        for v, orb in enumerate(m.vertices):
            expect = _expected_degree(code, v)
            if len(orb) != expect:
                raise InvariantError(
                    "vertex %d degree %d, expected %d" % (v, len(orb), expect)
                )
        degs = m.face_degrees()
        outer = self.outer_face
        for f in self.bounded_faces():
            # every bounded face has degree at least four
            if degs[f] < 4:
                raise InvariantError("bounded face of degree %d" % degs[f])
            # and shares exactly one edge with the unbounded face
            shared = sum(
                1
                for d in m.faces[f]
                if m.twin[d] != d and m.face_of[m.twin[d]] == outer
            )
            if shared != 1:
                raise InvariantError(
                    "bounded face %d shares %d edges with the unbounded face"
                    % (f, shared)
                )


def _expected_degree(code: tuple[int, ...], v: int) -> int:
    k = code[v]
    if k == 0:
        return 3  # up edge + two boundary darts
    if v == 0:
        return k + 1  # children + half-edge
    return k + 1  # children + up edge


def build_halin(tree: PlaneTree) -> HalinMap:
    """Assemble the rotation system for a tree of one-leaf-child type.

    Dart layout: non-root vertex v has down dart 2(v-1) at its parent
    and up dart 2(v-1)+1 at itself; boundary edge i between consecutive
    leaves l_i, l_{i+1} (cyclically) has forward dart f_i at l_i and
    backard dart g_i at l_{i+1}; the half-edge dart comes last.
    Rotations (ccw): internal non-root vertex (up, c_1..c_k); root
    (c_1, h, c_2..c_k); leaf number i (up, g_{i-1}, f_i).
    """
    code = tree.code
    zeta = tree.zeta
    if zeta < 2:
        raise UsageError("need at least one edge")
    if not satisfies_hstar(tree):
        raise InvariantError("tree violates the one-leaf-child rule")
    children = tree.children()
    leaves = tree.leaves()
    lam = len(leaves)
    leaf_index = {v: i for i, v in enumerate(leaves)}

    def down(v: int) -> int:
        return 2 * (v - 1)

    def up(v: int) -> int:
        return 2 * (v - 1) + 1

    base = 2 * (zeta - 1)
    h = base + 2 * lam
    n_darts = h + 1
    twin = [0] * n_darts
    for v in range(1, zeta):
        twin[down(v)] = up(v)
        twin[up(v)] = down(v)
    for i in range(lam):
        twin[base + 2 * i] = base + 2 * i + 1
        twin[base + 2 * i + 1] = base + 2 * i
    twin[h] = h

    rotations: list[list[int]] = []
    for v in range(zeta):
        k = code[v]
        if k > 0:
            rot = [down(c) for c in children[v]]
            if v == 0:
                rot.insert(1, h)
            else:
                rot.insert(0, up(v))
        else:
            i = leaf_index[v]
            f_i = base + 2 * i
            g_prev = base + 2 * ((i - 1) % lam) + 1
            rot = [up(v), g_prev, f_i]
        rotations.append(rot)

    nxt = [0] * n_darts
    for rot in rotations:
        for j, d in enumerate(rot):
            nxt[d] = rot[(j + 1) % len(rot)]

    m = PlanarMap(tuple(twin), tuple(nxt), down(children[0][0]), h)
    return HalinMap(tree, m)


def enumerate_halin(n: int, force: bool = False) -> Iterator[HalinMap]:
    for tree in hstar_trees(n, force=force):
        yield build_halin(tree)


def halin_count(n: int, force: bool = False) -> int:
    return sum(1 for _ in hstar_trees(n, force=force))
