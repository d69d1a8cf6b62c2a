"""Rotation-system representation of rooted maps on the sphere.

Darts are dense integers 0..D-1.  ``twin`` is an involution pairing the
two darts of each edge; an optional half-edge dart is its own twin.
``nxt`` gives the counterclockwise order of darts around their origin
vertex.  Faces are the orbits of d -> nxt[twin[d]]; with this
orientation the orbit through d traverses the face on the left of d.
The half-edge contributes exactly one side to the face containing it
and is excluded from the edge count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .errors import InvariantError, UsageError


@dataclass(frozen=True)
class PlanarMap:
    twin: tuple[int, ...]
    nxt: tuple[int, ...]
    root_dart: int
    half_edge_dart: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "twin", tuple(self.twin))
        object.__setattr__(self, "nxt", tuple(self.nxt))
        self._validate()

    # -- structural checks -------------------------------------------------

    def _validate(self) -> None:
        d = self.n_darts
        if d == 0:
            # the edgeless single-vertex map
            if self.root_dart != -1 or self.half_edge_dart is not None:
                raise InvariantError("empty map must have root_dart == -1")
            return
        if sorted(self.nxt) != list(range(d)):
            raise InvariantError("nxt is not a permutation")
        for i in range(d):
            if not 0 <= self.twin[i] < d or self.twin[self.twin[i]] != i:
                raise InvariantError("twin is not an involution")
            if self.twin[i] == i and i != self.half_edge_dart:
                raise InvariantError("fixed point of twin that is not the half-edge")
        if self.half_edge_dart is not None and self.twin[self.half_edge_dart] != self.half_edge_dart:
            raise InvariantError("half-edge dart must be its own twin")
        if not 0 <= self.root_dart < d:
            raise InvariantError("root dart out of range")
        # connectivity: <twin, nxt> acts transitively on darts
        seen = [False] * d
        stack = [0]
        seen[0] = True
        while stack:
            x = stack.pop()
            for y in (self.twin[x], self.nxt[x]):
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        if not all(seen):
            raise InvariantError("dart set is not connected")

    @property
    def n_darts(self) -> int:
        return len(self.twin)

    @property
    def n_edges(self) -> int:
        """Edges, not counting the half-edge."""
        return (self.n_darts - (1 if self.half_edge_dart is not None else 0)) // 2

    # -- orbits -------------------------------------------------------------

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        """Orbits of nxt: the darts around each vertex, ccw."""
        if not self.twin:
            return ((),)
        return _orbits(self.nxt)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        out = [0] * self.n_darts
        for vi, orb in enumerate(self.vertices):
            for dart in orb:
                out[dart] = vi
        return tuple(out)

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Orbits of d -> nxt[twin[d]]; each orbit lists the darts whose
        left side is that face, in traversal order."""
        if not self.twin:
            return ((),)
        perm = [self.nxt[self.twin[d]] for d in range(self.n_darts)]
        return _orbits(perm)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        out = [0] * self.n_darts
        for fi, orb in enumerate(self.faces):
            for dart in orb:
                out[dart] = fi
        return tuple(out)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def face_degrees(self) -> list[int]:
        return [len(f) for f in self.faces]

    def vertex_degree(self, v: int) -> int:
        return len(self.vertices[v])

    def euler_ok(self) -> bool:
        return self.n_vertices - self.n_edges + self.n_faces == 2

    def check_euler(self) -> None:
        if not self.euler_ok():
            raise InvariantError(
                "Euler formula violated: V=%d E=%d F=%d"
                % (self.n_vertices, self.n_edges, self.n_faces)
            )

    # -- edge helpers --------------------------------------------------------

    def edge_of(self, dart: int) -> tuple[int, int]:
        """Canonical (min, max) dart pair of the edge containing dart."""
        t = self.twin[dart]
        return (dart, t) if dart < t else (t, dart)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for d in range(self.n_darts):
            t = self.twin[d]
            if d < t:
                out.append((d, t))
        return out

    # -- surgery -------------------------------------------------------------

    def _prev(self) -> list[int]:
        prev = [0] * self.n_darts
        for d in range(self.n_darts):
            prev[self.nxt[d]] = d
        return prev

    def delete_edge(self, dart: int) -> "PlanarMap":
        """Remove the edge containing ``dart``; faces on its two sides merge
        when they are distinct."""
        t = self.twin[dart]
        if dart == self.half_edge_dart:
            raise UsageError("cannot delete the half-edge")
        remove = {dart, t}
        return self._drop_darts(remove, self.nxt)

    def contract_edge(self, dart: int) -> "PlanarMap":
        """Contract a non-loop edge, merging its endpoints.  The rotation
        of the merged vertex splices the two rotations at the edge."""
        t = self.twin[dart]
        if dart == self.half_edge_dart:
            raise UsageError("cannot contract the half-edge")
        if self.vertex_of[dart] == self.vertex_of[t]:
            raise UsageError("cannot contract a loop")
        prev = self._prev()
        nxt = list(self.nxt)
        # splice: ... -> prev[dart] -> nxt[t] -> ... -> prev[t] -> nxt[dart] -> ...
        nxt[prev[dart]] = self.nxt[t]
        nxt[prev[t]] = self.nxt[dart]
        # handle degree-1 endpoints where prev[x] == x
        if prev[dart] == dart:  # dart alone at its vertex
            nxt[prev[t]] = self.nxt[t]
        if prev[t] == t:
            nxt[prev[dart]] = self.nxt[dart]
        return self._drop_darts({dart, t}, tuple(nxt))

    def _drop_darts(self, remove: set[int], nxt_base) -> "PlanarMap":
        keep = [d for d in range(self.n_darts) if d not in remove]
        if not keep:
            return PlanarMap((), (), -1, None)
        relab = {d: i for i, d in enumerate(keep)}
        nxt_new = []
        for d in keep:
            e = nxt_base[d]
            while e in remove:
                e = nxt_base[e]
            nxt_new.append(relab[e])
        twin_new = [relab[self.twin[d]] for d in keep]
        root = self.root_dart
        while root in remove:
            root = nxt_base[root]
        half = self.half_edge_dart
        return PlanarMap(
            tuple(twin_new),
            tuple(nxt_new),
            relab[root],
            relab[half] if half is not None and half not in remove else None,
        )

    # -- canonical form / serialization ---------------------------------------

    def canonical(self, outer_face: int | None = None) -> tuple:
        """Relabel darts by BFS from the root dart; two maps are equal as
        rooted maps iff their canonical tuples agree.

        A rotation system only fixes the map on the sphere.  Pass
        ``outer_face`` to compare as maps of the plane: the canonical
        tuple then also records which face is unbounded, which can
        separate maps that are isomorphic on the sphere.
        """
        if not self.twin:
            return ((), (), -1, None)
        order = {self.root_dart: 0}
        queue = [self.root_dart]
        while queue:
            d = queue.pop(0)
            for e in (self.nxt[d], self.twin[d]):
                if e not in order:
                    order[e] = len(order)
                    queue.append(e)
        inv = sorted(order, key=order.get)
        twin = tuple(order[self.twin[d]] for d in inv)
        nxt = tuple(order[self.nxt[d]] for d in inv)
        half = order[self.half_edge_dart] if self.half_edge_dart is not None else None
        form = (twin, nxt, 0, half)
        if outer_face is not None:
            form += (min(order[d] for d in self.faces[outer_face]),)
        return form

    def to_json(self) -> str:
        return json.dumps(
            {
                "darts": self.n_darts,
                "twin": list(self.twin),
                "next": list(self.nxt),
                "root_dart": self.root_dart,
                "half_edge_dart": self.half_edge_dart,
            }
        )

    @staticmethod
    def from_json(text: str) -> "PlanarMap":
        obj = json.loads(text)
        return PlanarMap(
            tuple(obj["twin"]),
            tuple(obj["next"]),
            obj["root_dart"],
            obj.get("half_edge_dart"),
        )

    def to_dot(self, name: str = "map") -> str:
        lines = ["graph %s {" % name]
        for v in range(self.n_vertices):
            lines.append('  v%d [label="%d"];' % (v, v))
        for d, t in self.edges():
            lines.append("  v%d -- v%d;" % (self.vertex_of[d], self.vertex_of[t]))
        if self.half_edge_dart is not None:
            lines.append('  h [shape=point,label=""];')
            lines.append("  v%d -- h [style=dashed];" % self.vertex_of[self.half_edge_dart])
        lines.append("}")
        return "\n".join(lines)


def _orbits(perm) -> tuple[tuple[int, ...], ...]:
    n = len(perm)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orb = []
        d = start
        while not seen[d]:
            seen[d] = True
            orb.append(d)
            d = perm[d]
        out.append(tuple(orb))
    return tuple(out)


def weak_dual(map_: PlanarMap, outer_face: int) -> PlanarMap:
    """Weak dual: one vertex per bounded face, one edge per primal edge
    whose two sides are distinct bounded faces.

    Edges bordering the unbounded face, loops in the dual (an edge with
    the same bounded face on both sides) and the half-edge do not
    contribute.  The rotation around each dual vertex follows the face
    traversal order of the corresponding primal face.
    """
    face_of = map_.face_of
    keep = []
    for d in range(map_.n_darts):
        t = map_.twin[d]
        if t == d:
            continue
        if face_of[d] == outer_face or face_of[t] == outer_face:
            continue
        if face_of[d] == face_of[t]:
            continue
        keep.append(d)
    if not keep:
        return PlanarMap((), (), -1, None)
    dart_ids = {}
    nxt_pairs = []
    for fi, cyc in enumerate(map_.faces):
        if fi == outer_face:
            continue
        rot = [d for d in cyc if map_.twin[d] != d
               and face_of[map_.twin[d]] != outer_face
               and face_of[map_.twin[d]] != fi]
        for d in rot:
            dart_ids[d] = len(dart_ids)
        nxt_pairs.append(rot)
    nxt = [0] * len(dart_ids)
    for rot in nxt_pairs:
        for i, d in enumerate(rot):
            nxt[dart_ids[d]] = dart_ids[rot[(i + 1) % len(rot)]]
    twin = [0] * len(dart_ids)
    for d, i in dart_ids.items():
        twin[i] = dart_ids[map_.twin[d]]
    return PlanarMap(tuple(twin), tuple(nxt), 0)
