"""Gluing seeds along frozen subseeds and cutting them apart again.

Amalgamated sums identify isomorphic frozen subseeds of two seeds; cuttings
invert the construction along a separating family.  Both directions come with
canonical morphisms: injections of the summands and retraction projections.
"""

import json
from dataclasses import dataclass

from .seed import (
    NotSkewSymmetrisable,
    Seed,
    SeedIso,
    new_seed,
    seed_from_json,
    seed_isomorphic,
    seed_to_json,
)
from .morphism import (
    Const,
    TargetVar,
    MorphismSpec,
    build_morphism,
    verify_cm3,
)

__all__ = [
    "GlueSpec",
    "SeparatingPartition",
    "NotGlueable",
    "NotSeparating",
    "CoconeDisagreesOnDelta",
    "glueable",
    "amalgamated_sum",
    "coproduct",
    "canonical_injection",
    "separating_partition",
    "cut",
    "projection",
    "pushout_check",
    "gluespec_from_json",
]


class NotGlueable(ValueError):
    def __init__(self, reason, message=""):
        super().__init__(message or reason)
        self.reason = reason


class NotSeparating(ValueError):
    pass


class CoconeDisagreesOnDelta(ValueError):
    pass


@dataclass(frozen=True)
class GlueSpec:
    """Two seeds with frozen subsets identified by a seed isomorphism.

    ``delta1``/``delta2`` are slot tuples in matching order under ``iso``
    (iso maps positions within delta1 to positions within delta2, sign +1).
    """

    s1: Seed
    delta1: tuple
    s2: Seed
    delta2: tuple
    iso: SeedIso

    def delta_pairs(self):
        return tuple((d1, self.delta2[self.iso(pos)])
                     for pos, d1 in enumerate(self.delta1))


def glueable(s1, delta1, s2, delta2):
    """Find a gluing datum, or raise NotGlueable with the reason.

    Both deltas must consist of frozen variables and the full subseeds they
    span must be isomorphic with sign +1 (their matrix blocks must agree
    under the identification, which the sum re-uses verbatim).
    """
    d1 = tuple(sorted(s1.slot(v) for v in delta1))
    d2 = tuple(sorted(s2.slot(v) for v in delta2))
    for s, dd, side in ((s1, d1, 1), (s2, d2, 2)):
        for i in dd:
            if i in s.exchangeable:
                raise NotGlueable(
                    "NotFrozen",
                    f"{s.labels[i]} on side {side} is exchangeable")
    if len(d1) != len(d2):
        raise NotGlueable("SizeMismatch",
                          f"|delta1| = {len(d1)} but |delta2| = {len(d2)}")
    sub1 = s1.subseed(d1)
    sub2 = s2.subseed(d2)
    iso = seed_isomorphic(sub1, sub2, signs=(1,))
    if iso is None:
        raise NotGlueable("DeltaSubseedsNotIsomorphic",
                          "the frozen subseeds spanned by the deltas are "
                          "not isomorphic")
    return GlueSpec(s1, d1, s2, d2, iso)


def _sum_layout(g):
    """Sum slot order: side-1 rest, side-2 rest, then delta (side-1 order)."""
    rest1 = [i for i in range(g.s1.n) if i not in g.delta1]
    rest2 = [j for j in range(g.s2.n) if j not in g.delta2]
    labels = [g.s1.labels[i] for i in rest1]
    labels += [g.s2.labels[j] for j in rest2]
    labels += [g.s1.labels[i] for i in g.delta1]
    if len(set(labels)) != len(labels):
        labels = ([f"{g.s1.labels[i]}_1" for i in rest1]
                  + [f"{g.s2.labels[j]}_2" for j in rest2]
                  + [f"{g.s1.labels[i]}_1" for i in g.delta1])
    map1 = {}
    for pos, i in enumerate(rest1):
        map1[i] = pos
    map2 = {}
    for pos, j in enumerate(rest2):
        map2[j] = len(rest1) + pos
    for pos, (i, j) in enumerate(g.delta_pairs()):
        map1[i] = len(rest1) + len(rest2) + pos
        map2[j] = len(rest1) + len(rest2) + pos
    return labels, map1, map2


def amalgamated_sum(g):
    """Glue the two seeds along their identified frozen subseeds.

    The cluster is (x1 minus delta1) + (x2 minus delta2) + delta, the
    exchangeable set is the union, and the matrix has the two side blocks on
    the diagonal, zero between the sides, and the shared delta block (taken
    from side 1; side 2's block is asserted equal under the identification).
    """
    for (i, j) in g.delta_pairs():
        for (i2, j2) in g.delta_pairs():
            if g.s1.matrix.rows[i][i2] != g.s2.matrix.rows[j][j2]:
                raise NotGlueable(
                    "DeltaBlockMismatch",
                    "the delta blocks disagree under the identification")
    labels, map1, map2 = _sum_layout(g)
    n = len(labels)
    rows = [[0] * n for _ in range(n)]
    for i in range(g.s1.n):
        for i2 in range(g.s1.n):
            rows[map1[i]][map1[i2]] = g.s1.matrix.rows[i][i2]
    for j in range(g.s2.n):
        for j2 in range(g.s2.n):
            rows[map2[j]][map2[j2]] = g.s2.matrix.rows[j][j2]
    ex = [map1[i] for i in sorted(g.s1.exchangeable)]
    ex += [map2[j] for j in sorted(g.s2.exchangeable)]
    try:
        return new_seed(labels, ex, rows)
    except NotSkewSymmetrisable as exc:
        raise NotGlueable(
            "NoCommonSymmetriser",
            f"the glued matrix admits no skew-symmetriser: {exc}") from exc


def coproduct(seeds):
    """Block-diagonal sum of finitely many seeds (disjoint clusters)."""
    seeds = list(seeds)
    if len(seeds) == 1:
        return seeds[0]
    labels = [lab for s in seeds for lab in s.labels]
    if len(set(labels)) != len(labels):
        labels = [f"{lab}_{k + 1}" for k, s in enumerate(seeds) for lab in s.labels]
    n = len(labels)
    rows = [[0] * n for _ in range(n)]
    ex = []
    offset = 0
    for s in seeds:
        for i in range(s.n):
            for j in range(s.n):
                rows[offset + i][offset + j] = s.matrix.rows[i][j]
        ex += [offset + i for i in sorted(s.exchangeable)]
        offset += s.n
    return new_seed(labels, ex, rows)


def canonical_injection(spec, side, total=None):
    """The injection of one summand into the sum, as a morphism candidate.

    ``spec`` is a GlueSpec (sides 0/1) or a sequence of seeds (coproduct,
    ``side`` an index).  Pass the already-built sum as ``total`` to make the
    injection composable with other morphisms on it; it must match the
    canonical layout.
    """
    if isinstance(spec, GlueSpec):
        built = amalgamated_sum(spec)
        _, map1, map2 = _sum_layout(spec)
        source = (spec.s1, spec.s2)[side]
        slot_map = (map1, map2)[side]
        assignment = tuple(TargetVar(slot_map[i]) for i in range(source.n))
    else:
        seeds = list(spec)
        built = coproduct(seeds)
        offset = sum(s.n for s in seeds[:side])
        source = seeds[side]
        assignment = tuple(TargetVar(offset + i) for i in range(source.n))
    if total is None:
        total = built
    elif (total.labels != built.labels or total.matrix != built.matrix
          or total.exchangeable != built.exchangeable):
        raise ValueError("provided sum does not match the canonical layout")
    return build_morphism(source, total, assignment)


@dataclass(frozen=True)
class SeparatingPartition:
    """A frozen set whose removal splits the cluster into two decoupled parts."""

    seed: Seed
    delta: tuple
    part1: tuple
    part2: tuple


def separating_partition(s, delta, parts=None):
    """Split the cluster off delta into two groups with no cross entries.

    By default the connected components of the quiver on the non-delta
    variables are bipartitioned as (component of the lowest slot) versus the
    rest; pass ``parts`` to choose another grouping.  Both parts must be
    nonempty.  Raises NotSeparating otherwise.
    """
    dd = tuple(sorted(s.slot(v) for v in delta))
    for i in dd:
        if i in s.exchangeable:
            raise NotSeparating(f"{s.labels[i]} is exchangeable")
    rest = [i for i in range(s.n) if i not in dd]
    if parts is not None:
        p1 = tuple(sorted(s.slot(v) for v in parts[0]))
        p2 = tuple(sorted(s.slot(v) for v in parts[1]))
        if sorted(p1 + p2) != rest:
            raise NotSeparating("parts do not partition the non-delta cluster")
    else:
        comp = {}
        for start in rest:
            if start in comp:
                continue
            stack = [start]
            comp[start] = start
            while stack:
                i = stack.pop()
                for j in rest:
                    if j not in comp and (s.matrix.rows[i][j] or s.matrix.rows[j][i]):
                        comp[j] = start
                        stack.append(j)
        if not rest:
            raise NotSeparating("no variables outside delta")
        first = comp[rest[0]]
        p1 = tuple(i for i in rest if comp[i] == first)
        p2 = tuple(i for i in rest if comp[i] != first)
    if not p1 or not p2:
        raise NotSeparating("a separating family needs two nonempty sides")
    for i in p1:
        for j in p2:
            if s.matrix.rows[i][j] or s.matrix.rows[j][i]:
                raise NotSeparating(
                    f"nonzero entry between {s.labels[i]} and {s.labels[j]}")
    return SeparatingPartition(s, dd, p1, p2)


def cut(p):
    """The two seeds obtained by cutting along the separating family."""
    sides = []
    for part in (p.part1, p.part2):
        slots = list(part) + list(p.delta)
        labels = [p.seed.labels[i] for i in slots]
        ex = [idx for idx, i in enumerate(slots) if i in p.seed.exchangeable]
        rows = [[p.seed.matrix.rows[a][b] for b in slots] for a in slots]
        sides.append(new_seed(labels, ex, rows))
    return tuple(sides)


def projection(p, side):
    """Retraction onto one side of a cutting: identity there, 0 on the other."""
    target = cut(p)[side]
    own = (p.part1, p.part2)[side]
    slots = list(own) + list(p.delta)
    assignment = []
    for i in range(p.seed.n):
        if i in slots:
            assignment.append(TargetVar(slots.index(i)))
        else:
            assignment.append(Const(0))
    return build_morphism(p.seed, target, tuple(assignment))


@dataclass(frozen=True)
class PushoutResult:
    status: str                 # factors_uniquely | no_factorisation
    mediator: object            # MorphismSpec | None
    reason: str = ""


def pushout_check(g, f1, f2, depth=3):
    """Factor a cocone (f1, f2) through the amalgamated sum.

    The mediator h is forced on generators: it restricts to f1 on side 1,
    to f2 on side 2, and to their common value on delta.  Disagreement on
    delta raises CoconeDisagreesOnDelta; otherwise h is built and verified
    to the given depth.
    """
    if f1.source.ring is not g.s1.ring or f2.source.ring is not g.s2.ring:
        raise ValueError("cocone legs must start at the glued seeds")
    if f1.target.ring is not f2.target.ring:
        raise ValueError("cocone legs must share their target")
    for (i, j) in g.delta_pairs():
        if f1.assignment[i] != f2.assignment[j]:
            raise CoconeDisagreesOnDelta(
                f"{g.s1.labels[i]} maps to {f1.image_label(i)} on one side "
                f"and {f2.image_label(j)} on the other")
    total = amalgamated_sum(g)
    _, map1, map2 = _sum_layout(g)
    entries = [None] * total.n
    for i in range(g.s1.n):
        entries[map1[i]] = f1.assignment[i]
    for j in range(g.s2.n):
        entries[map2[j]] = f2.assignment[j]
    h = MorphismSpec(total, f1.target, tuple(entries))
    report = verify_cm3(h, depth)
    if report.verified:
        return PushoutResult("factors_uniquely", h)
    return PushoutResult("no_factorisation", None,
                         f"mediator fails mutation compatibility: "
                         f"{report.to_json().get('witness')}")


def gluespec_from_json(obj):
    """Build a GlueSpec from {"s1","delta1","s2","delta2","iso"} data."""
    try:
        s1 = seed_from_json(obj["s1"])
        s2 = seed_from_json(obj["s2"])
        delta1 = obj["delta1"]
        delta2 = obj["delta2"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"glue object missing field: {exc}") from exc
    iso_obj = obj.get("iso")
    if iso_obj is None:
        return glueable(s1, delta1, s2, delta2)
    d1 = tuple(sorted(s1.slot(v) for v in delta1))
    d2 = tuple(sorted(s2.slot(v) for v in delta2))
    mapping = iso_obj["map"]
    sign = int(iso_obj.get("sign", 1))
    perm = []
    for i in d1:
        image = mapping[s1.labels[i]]
        perm.append(d2.index(s2.slot(image)))
    iso = SeedIso(tuple(perm), sign)
    g = GlueSpec(s1, d1, s2, d2, iso)
    for (i, j) in g.delta_pairs():
        if j in s2.exchangeable or i in s1.exchangeable:
            raise NotGlueable("NotFrozen", "delta contains an exchangeable variable")
    for (i, j) in g.delta_pairs():
        for (i2, j2) in g.delta_pairs():
            if s2.matrix.rows[j][j2] != sign * s1.matrix.rows[i][i2]:
                raise NotGlueable("DeltaBlockMismatch",
                                  "provided iso does not identify the delta blocks")
    return g
