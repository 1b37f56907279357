"""Polygon triangulations and their seeds: flips, Plücker relations, and the
natural morphisms between polygon cluster algebras.

Vertices of the m-gon are labelled 1..m cyclically; an arc is an unordered
pair of non-adjacent vertices, a boundary arc a pair of adjacent ones.  The
positive direction around every triangle is the ascending cyclic order of its
vertices, one global convention (flipping it negates all matrices, which only
swaps a seed for its opposite).
"""

import json
from dataclasses import dataclass

from .seed import Seed, new_seed
from .morphism import Const, TargetVar, MorphismSpec, build_morphism

__all__ = [
    "Triangulation",
    "InvalidTriangulation",
    "BoundaryArc",
    "fan_triangulation",
    "polygon_seed",
    "flip",
    "plucker_check",
    "polygon_inclusion",
    "grassmannian_projection",
    "enumerate_triangulations",
    "count_internal_arcs",
    "arc_label",
    "triangulation_to_json",
    "triangulation_from_json",
]


class InvalidTriangulation(ValueError):
    pass


class BoundaryArc(ValueError):
    pass


def _norm_arc(arc):
    i, j = arc
    i, j = int(i), int(j)
    if i == j:
        raise InvalidTriangulation(f"degenerate arc ({i},{j})")
    return (i, j) if i < j else (j, i)


def _is_boundary(arc, m):
    i, j = arc
    return j - i == 1 or (i == 1 and j == m)


def _cross(a, b):
    # strict interior crossing of chords on a convex polygon
    (p, q), (r, s) = a, b
    return (p < r < q < s) or (r < p < s < q)


@dataclass(frozen=True)
class Triangulation:
    """A maximal set of pairwise non-crossing internal arcs of the m-gon."""

    m: int
    internal_arcs: frozenset

    def __post_init__(self):
        if self.m < 3:
            raise InvalidTriangulation("need at least a triangle")
        arcs = sorted(self.internal_arcs)
        for arc in arcs:
            i, j = arc
            if not (1 <= i < j <= self.m):
                raise InvalidTriangulation(f"arc {arc} out of range")
            if _is_boundary(arc, self.m):
                raise InvalidTriangulation(f"arc {arc} joins adjacent vertices")
        for a in range(len(arcs)):
            for b in range(a + 1, len(arcs)):
                if _cross(arcs[a], arcs[b]):
                    raise InvalidTriangulation(f"arcs {arcs[a]} and {arcs[b]} cross")
        if len(arcs) != self.m - 3:
            raise InvalidTriangulation(
                f"{len(arcs)} internal arcs, a triangulation of the "
                f"{self.m}-gon has {self.m - 3}")

    @property
    def boundary_arcs(self):
        out = [(i, i + 1) for i in range(1, self.m)]
        out.append((1, self.m))
        return tuple(_norm_arc(a) for a in out)

    def arcs(self):
        """All arcs, boundary and internal, sorted."""
        return tuple(sorted(set(self.boundary_arcs) | self.internal_arcs))

    def triangles(self):
        """Vertex triples whose three sides all belong to the triangulation.

        On a convex polygon the arcs are pairwise non-crossing, so three
        pairwise-joined vertices always bound an empty triangle: the
        pairwise test characterises the faces.
        """
        present = set(self.arcs())
        out = []
        for a in range(1, self.m + 1):
            for b in range(a + 1, self.m + 1):
                if (a, b) not in present:
                    continue
                for c in range(b + 1, self.m + 1):
                    if (b, c) in present and (a, c) in present:
                        out.append((a, b, c))
        return out


def fan_triangulation(m):
    """The fan at vertex 1: internal arcs (1,k) for 3 <= k <= m-1."""
    if m < 3:
        raise InvalidTriangulation("need at least a triangle")
    return Triangulation(m, frozenset((1, k) for k in range(3, m)))


def arc_label(arc, m):
    i, j = _norm_arc(arc)
    return f"x{i}{j}" if m <= 9 else f"x{i}_{j}"


def polygon_seed(t):
    """Seed of a triangulation: one variable per arc, internal arcs
    exchangeable, matrix summed over per-triangle orientation contributions."""
    arcs = t.arcs()
    index = {arc: k for k, arc in enumerate(arcs)}
    n = len(arcs)
    rows = [[0] * n for _ in range(n)]
    for (a, b, c) in t.triangles():
        sides = [_norm_arc((a, b)), _norm_arc((b, c)), _norm_arc((a, c))]
        # positive direction: (a,b) -> (b,c) -> (c,a) around the triangle
        cyc = [(sides[0], sides[1]), (sides[1], sides[2]), (sides[2], sides[0])]
        for src, dst in cyc:
            rows[index[src]][index[dst]] += 1
            rows[index[dst]][index[src]] -= 1
    labels = [arc_label(arc, t.m) for arc in arcs]
    ex = [index[arc] for arc in sorted(t.internal_arcs)]
    return new_seed(labels, ex, rows)


def _quadrilateral(t, arc):
    """The four cyclically ordered vertices of the two triangles on an arc."""
    arc = _norm_arc(arc)
    adjacent = [tri for tri in t.triangles() if set(arc) <= set(tri)]
    if len(adjacent) != 2:
        raise InvalidTriangulation(f"arc {arc} does not bound two triangles")
    verts = sorted(set(adjacent[0]) | set(adjacent[1]))
    return tuple(verts)


def flip(t, arc):
    """Replace an internal arc by the other diagonal of its quadrilateral."""
    arc = _norm_arc(arc)
    if arc not in t.internal_arcs:
        raise BoundaryArc(f"{arc} is not an internal arc")
    p, q, r, s = _quadrilateral(t, arc)
    new = (q, s) if arc == (p, r) else (p, r)
    return Triangulation(t.m, (t.internal_arcs - {arc}) | {_norm_arc(new)})


def plucker_check(t):
    """Assert every exchange relation of the seed is the Plücker identity of
    the arc's quadrilateral.  Returns a list of (arc, ok) pairs."""
    seed = polygon_seed(t)
    arcs = t.arcs()
    index = {arc: k for k, arc in enumerate(arcs)}
    results = []
    for arc in sorted(t.internal_arcs):
        p, q, r, s = _quadrilateral(t, arc)
        lhs = seed.exchange_sum(index[arc])
        var = lambda a: seed.ring.gen(index[_norm_arc(a)])
        expected = var((p, q)) * var((r, s)) + var((p, s)) * var((q, r))
        results.append((arc, lhs == expected))
    return results


def enumerate_triangulations(m):
    """All triangulations of the m-gon (Catalan(m-2) of them)."""

    def rec(lo, hi):
        if hi - lo < 2:
            return [frozenset()]
        out = []
        for k in range(lo + 1, hi):
            for left in rec(lo, k):
                for right in rec(k, hi):
                    arcs = set(left) | set(right)
                    if k - lo > 1:
                        arcs.add((lo, k))
                    if hi - k > 1:
                        arcs.add((k, hi))
                    out.append(frozenset(arcs))
        return out

    return [Triangulation(m, arcs) for arcs in rec(1, m)]


def count_internal_arcs(m):
    """Brute-force count of internal arcs of the m-gon (oracle helper)."""
    count = 0
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if not _is_boundary((i, j), m):
                count += 1
    return count


def polygon_inclusion(m, m_prime):
    """Fan-seed inclusion of the m-gon into the m'-gon, arc by arc.

    The closing boundary arc (1, m) becomes internal upstairs; sending a
    frozen variable to an exchangeable one is allowed.
    """
    if not 3 <= m <= m_prime:
        raise ValueError("need 3 <= m <= m'")
    source = polygon_seed(fan_triangulation(m))
    target = polygon_seed(fan_triangulation(m_prime))
    assignment = {}
    for arc in fan_triangulation(m).arcs():
        assignment[arc_label(arc, m)] = arc_label(arc, m_prime)
    return build_morphism(source, target, assignment)


def grassmannian_projection(m, m_prime):
    """Coordinate projection between fan seeds: arcs ending past m' go to 0.

    For m' < m the arc (1, m') is exchangeable upstairs but frozen
    downstairs, so this candidate is built without the frozen-image guard;
    sequences through such variables are simply never biadmissible.
    """
    if not 4 <= m_prime <= m:
        raise ValueError("need 4 <= m' <= m")
    source = polygon_seed(fan_triangulation(m))
    target = polygon_seed(fan_triangulation(m_prime))
    assignment = {}
    for arc in fan_triangulation(m).arcs():
        i, j = arc
        if j <= m_prime:
            assignment[arc_label(arc, m)] = arc_label(arc, m_prime)
        else:
            assignment[arc_label(arc, m)] = 0
    return build_morphism(source, target, assignment, check_cm2=False)


def triangulation_to_json(t):
    return {"m": t.m, "arcs": [list(a) for a in sorted(t.internal_arcs)]}


def triangulation_from_json(obj):
    try:
        m = int(obj["m"])
        arcs = obj["arcs"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"triangulation object missing field: {exc}") from exc
    return Triangulation(m, frozenset(_norm_arc(a) for a in arcs))
