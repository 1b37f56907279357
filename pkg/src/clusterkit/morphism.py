"""Rooted-cluster-morphism candidates and their depth-bounded verification.

A morphism candidate assigns each source variable to a target variable or an
integer.  Structural checks (CM1/CM2) happen at build time; the mutation
compatibility condition (CM3) is verified by explicit depth-bounded search
over biadmissible sequences, because the full condition quantifies over
infinitely many sequences.
"""

import json
from dataclasses import dataclass

from .laurent import (
    LaurentPoly,
    RationalExpr,
    ZeroPolynomialDivision,
    is_laurent,
    substitute_rational,
)
from .seed import (
    Seed,
    SeedIso,
    NoSuchVariable,
    cluster_variables,
    express_in_cluster,
    new_seed,
    seed_from_json,
    seed_to_json,
)

__all__ = [
    "TargetVar",
    "Const",
    "MorphismSpec",
    "VerificationReport",
    "Witness",
    "CM1Violation",
    "CM2Violation",
    "SeedMismatch",
    "ZeroDenominatorImage",
    "build_morphism",
    "apply_morphism",
    "biadmissible_sequences",
    "verify_cm3",
    "verify_locally",
    "check_sequence",
    "compose",
    "image_seed",
    "is_ideal",
    "classify_isomorphism",
    "specialisation",
    "restriction",
    "check_upper_bound_membership",
    "check_spebounds",
    "morphism_to_json",
    "morphism_from_json",
]


class CM1Violation(ValueError):
    pass


class CM2Violation(ValueError):
    pass


class SeedMismatch(ValueError):
    pass


class ZeroDenominatorImage(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class TargetVar:
    index: int


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class MorphismSpec:
    """Source and target seeds plus a total assignment on the source cluster."""

    source: Seed
    target: Seed
    assignment: tuple

    def image_label(self, i):
        a = self.assignment[i]
        return a.value if isinstance(a, Const) else self.target.labels[a.index]

    def mapping(self):
        return {self.source.labels[i]: self.image_label(i)
                for i in range(self.source.n)}

    def is_injective_on_cluster(self):
        seen = set()
        for a in self.assignment:
            if isinstance(a, Const):
                return False
            if a.index in seen:
                return False
            seen.add(a.index)
        return True


def _resolve_assignment(source, target, assignment):
    if isinstance(assignment, dict):
        entries = []
        for label in source.labels:
            if label not in assignment:
                raise ValueError(f"assignment misses source variable {label!r}")
            entries.append(assignment[label])
    else:
        entries = list(assignment)
        if len(entries) != source.n:
            raise ValueError("assignment length does not match the source cluster")
    out = []
    for value in entries:
        if isinstance(value, (TargetVar, Const)):
            out.append(value)
        elif isinstance(value, int):
            out.append(Const(value))
        else:
            out.append(TargetVar(target.slot(value)))
    return tuple(out)


def build_morphism(source, target, assignment, check_cm2=True):
    """Validate CM1/CM2 structurally and build the candidate.

    CM3 is deliberately not checked here; use verify_cm3.  CM1 (images are
    target variables or integers) is enforced by construction of the
    assignment; CM2 rejects exchangeable variables whose image is a frozen
    target variable.
    """
    if not source.is_root() or not target.is_root():
        raise SeedMismatch("morphism endpoints must be initial seeds")
    entries = _resolve_assignment(source, target, assignment)
    if check_cm2:
        for i in sorted(source.exchangeable):
            a = entries[i]
            if isinstance(a, TargetVar) and a.index not in target.exchangeable:
                raise CM2Violation(
                    f"exchangeable {source.labels[i]} maps to frozen "
                    f"{target.labels[a.index]}")
    return MorphismSpec(source, target, entries)


def _substitution_map(f):
    out = {}
    for i, a in enumerate(f.assignment):
        g = f.source.root_gens[i]
        if isinstance(a, Const):
            out[g] = a.value
        else:
            out[g] = RationalExpr(f.target.ring.gen(f.target.root_gens[a.index]))
    return out

def apply_morphism(f, elem):
    """Push an element of the source ambient field through the assignment."""
    if isinstance(elem, LaurentPoly):
        elem = RationalExpr(elem)
    if elem.ring is not f.source.ring:
        raise SeedMismatch("element does not live in the source ambient ring")
    try:
        return substitute_rational(elem, _substitution_map(f), f.target.ring)
    except ZeroPolynomialDivision as exc:
        raise ZeroDenominatorImage(str(exc)) from exc


# -- biadmissible walk and CM3 -------------------------------------------------


@dataclass(frozen=True)
class Witness:
    sequence: tuple        # labels, as named when mutated
    variable: str          # the root variable y whose images disagree
    lhs: RationalExpr      # f(mutated expansion of y)
    rhs: RationalExpr      # target-side mutated expansion of f(y)

    def values(self):
        return (self.lhs.render(), self.rhs.render())


@dataclass(frozen=True)
class VerificationReport:
    depth: int
    status: str            # verified_to_depth | failed
    witness: object        # Witness | None
    sequences_checked: int

    @property
    def verified(self):
        return self.status == "verified_to_depth"

    def to_json(self):
        out = {"depth": self.depth, "status": self.status,
               "sequences_checked": self.sequences_checked}
        if self.witness is not None:
            lhs, rhs = self.witness.values()
            out["witness"] = {
                "sequence": list(self.witness.sequence),
                "variable": self.witness.variable,
                "lhs": lhs,
                "rhs": rhs,
            }
        return out


def _match_exchangeable(target_seed, value):
    for j in sorted(target_seed.exchangeable):
        if RationalExpr(target_seed.expansions[j]) == value:
            return j
    return None


def _walk(f, depth, on_node):
    """DFS over biadmissible sequences in lexicographic slot order.

    A step at source slot k is biadmissible when the image of the current
    variable in slot k equals an exchangeable variable of the current target
    seed; the two seeds are then mutated in tandem.  Images that are integers
    (or that match no target variable) prune the branch.  ``on_node`` gets
    (src_seed, tgt_seed, slot_map, writer, mutated_slots, labels) after every
    step, where ``writer`` records which source slot last wrote each target
    slot, and may return False to stop the whole walk.
    """
    def rec(src, tgt, slot_map, writer, mutated, labels, remaining):
        if remaining == 0:
            return True
        for k in sorted(src.exchangeable):
            image = apply_morphism(f, src.expansions[k])
            j = _match_exchangeable(tgt, image)
            if j is None:
                continue
            src2 = src.mutate(k)
            tgt2 = tgt.mutate(j)
            map2 = dict(slot_map)
            map2[k] = j
            writer2 = dict(writer)
            writer2[j] = k
            mutated2 = mutated | {k}
            labels2 = labels + (src.labels[k],)
            if not on_node(src2, tgt2, map2, writer2, mutated2, labels2):
                return False
            if not rec(src2, tgt2, map2, writer2, mutated2, labels2,
                       remaining - 1):
                return False
        return True

    slot_map = {i: a.index for i, a in enumerate(f.assignment)
                if isinstance(a, TargetVar)}
    rec(f.source, f.target, slot_map, {}, frozenset(), (), depth)


def biadmissible_sequences(f, depth):
    """All biadmissible sequences of length <= depth, as label tuples."""
    found = []

    def on_node(src, tgt, slot_map, writer, mutated, labels):
        found.append(labels)
        return True

    _walk(f, depth, on_node)
    return found


def verify_cm3(f, depth):
    """Check mutation compatibility along every biadmissible sequence.

    At each node the images of the variables mutated so far are compared with
    the tandem-mutated target variables; the first failure in lexicographic
    sequence order is reported with a replayable witness.  Variables whose
    slots the path never touches cannot change, so their comparison carries
    no information once the assignment is fixed; for non-injective
    assignments a mutated variable's pairing can also be overwritten by a
    sibling sharing its image, and such stale pairings are skipped (the
    comparison is ill-posed there: the shared target variable cannot track
    two source variables at once).
    """
    state = {"failure": None, "checked": 0}

    def on_node(src, tgt, slot_map, writer, mutated, labels):
        state["checked"] += 1
        for s in sorted(mutated):
            if writer.get(slot_map[s]) != s:
                # another source slot wrote this target slot last: the static
                # pairing is stale, which only happens for non-injective
                # assignments where the comparison is ill-posed
                continue
            lhs = apply_morphism(f, src.expansions[s])
            rhs = RationalExpr(tgt.expansions[slot_map[s]])
            if lhs != rhs:
                state["failure"] = Witness(labels, f.source.labels[s], lhs, rhs)
                return False
        return True

    _walk(f, depth, on_node)
    if state["failure"] is not None:
        return VerificationReport(depth, "failed", state["failure"],
                                  state["checked"])
    return VerificationReport(depth, "verified_to_depth", None, state["checked"])


def verify_locally(f):
    """CM3 restricted to length-one biadmissible sequences."""
    return verify_cm3(f, 1)


def check_sequence(f, seq):
    """Replay one given sequence (labels or slots) and report every comparison.

    Returns (biadmissible, comparisons) where comparisons is a list of
    (variable, lhs, rhs, equal) for the slots mutated along the path,
    evaluated at the end of the full sequence.
    """
    src, tgt = f.source, f.target
    slot_map = {i: a.index for i, a in enumerate(f.assignment)
                if isinstance(a, TargetVar)}
    writer = {}
    mutated = set()
    for step in seq:
        k = src.slot(step)
        if k not in src.exchangeable:
            return False, []
        image = apply_morphism(f, src.expansions[k])
        j = _match_exchangeable(tgt, image)
        if j is None:
            return False, []
        src = src.mutate(k)
        tgt = tgt.mutate(j)
        slot_map[k] = j
        writer[j] = k
        mutated.add(k)
    out = []
    for s in sorted(mutated):
        if writer.get(slot_map[s]) != s:
            continue
        lhs = apply_morphism(f, src.expansions[s])
        rhs = RationalExpr(tgt.expansions[slot_map[s]])
        out.append((f.source.labels[s], lhs, rhs, lhs == rhs))
    return True, out


# -- categorical operations ----------------------------------------------------


def compose(g, f):
    """g after f; integer images propagate through g unchanged."""
    if g.source is not f.target and g.source.ring is not f.target.ring:
        raise SeedMismatch("compose needs target of f to be the source of g")
    entries = []
    for a in f.assignment:
        if isinstance(a, Const):
            entries.append(a)
        else:
            entries.append(g.assignment[a.index])
    return MorphismSpec(f.source, g.target, tuple(entries))


def identity_morphism(s):
    return build_morphism(s, s, tuple(TargetVar(i) for i in range(s.n)))


def image_seed(f):
    """The full subseed of the target spanned by the variable images."""
    hit = sorted({a.index for a in f.assignment if isinstance(a, TargetVar)})
    ex_hit = {f.assignment[i].index for i in f.source.exchangeable
              if isinstance(f.assignment[i], TargetVar)}
    labels = [f.target.labels[j] for j in hit]
    ex = [idx for idx, j in enumerate(hit)
          if j in f.target.exchangeable and j in ex_hit]
    rows = [[f.target.matrix.rows[a][b] for b in hit] for a in hit]
    return new_seed(labels, ex, rows)


def _image_view(f):
    hit = sorted({a.index for a in f.assignment if isinstance(a, TargetVar)})
    ex_hit = {f.assignment[i].index for i in f.source.exchangeable
              if isinstance(f.assignment[i], TargetVar)}
    view = f.target.restrict_view(hit)
    ex = frozenset(idx for idx, j in enumerate(hit)
                   if j in f.target.exchangeable and j in ex_hit)
    return Seed(view.ring, view.labels, ex, view.matrix, view.expansions,
                (), view.root_gens)


def is_ideal(f, depth):
    """Depth-bounded comparison of f(source variables) with the image seed's.

    Returns ("ideal_to_depth" | "counterexample" | "inconclusive", detail).
    A counterexample is certified through upper-bound membership in the image
    seed; an image variable that is merely not reached at this depth leaves
    the question open.
    """
    source_vars = cluster_variables(f.source, max_depth=depth)
    image_vars = cluster_variables(_image_view(f), max_depth=depth)
    img_root = image_seed(f)
    rename = {f.target.labels[j]: idx
              for idx, j in enumerate(sorted(
                  {a.index for a in f.assignment if isinstance(a, TargetVar)}))}

    missing = []
    for v in sorted(source_vars, key=lambda p: p.render()):
        img = apply_morphism(f, v)
        if img.is_integer() is not None:
            continue
        q = is_laurent(img)
        if q is not None and q in image_vars:
            continue
        missing.append((v, img))
    if not missing:
        leftover = image_vars - {q for q in
                                 (is_laurent(apply_morphism(f, v))
                                  for v in source_vars) if q is not None}
        if leftover:
            return ("inconclusive",
                    f"{len(leftover)} image-seed variables not reached")
        return ("ideal_to_depth", None)

    for v, img in missing:
        moved = _transport(img, f.target, img_root, rename)
        if moved is None:
            return ("counterexample",
                    f"f({v.render()}) leaves the image subring")
        status, witness = check_upper_bound_membership(moved, img_root)
        if status == "not_member":
            return ("counterexample",
                    f"f({v.render()}) fails the upper bound at {witness}")
    return ("inconclusive", f"{len(missing)} images unmatched at depth {depth}")


def _transport(expr, from_seed, to_seed, rename):
    """Rewrite an expression over from_seed's ring into to_seed's root ring."""
    mapping = {}
    for g in expr.num.variables() | expr.den.variables():
        name = from_seed.ring.names[g]
        if name not in rename:
            return None
        mapping[g] = RationalExpr(to_seed.ring.gen(rename[name]))
    return substitute_rational(expr, mapping, to_seed.ring)


def classify_isomorphism(f):
    """("iso", SeedIso of the simplifications) or ("not_iso", reason)."""
    if any(isinstance(a, Const) for a in f.assignment):
        return ("not_iso", "a variable is sent to an integer")
    if not f.is_injective_on_cluster():
        return ("not_iso", "not injective on the cluster")
    if f.source.n != f.target.n:
        return ("not_iso", "clusters have different sizes")
    perm = tuple(a.index for a in f.assignment)
    if {perm[i] for i in f.source.exchangeable} != set(f.target.exchangeable):
        return ("not_iso", "exchangeable variables do not map onto "
                           "the target exchangeables")
    b1 = f.source.matrix.simplified(f.source.frozen).rows
    b2 = f.target.matrix.simplified(f.target.frozen).rows
    n = f.source.n
    for sign in (1, -1):
        if all(b2[perm[i]][perm[j]] == sign * b1[i][j]
               for i in range(n) for j in range(n)):
            return ("iso", SeedIso(perm, sign))
    return ("not_iso", "no global sign matches the simplified matrices")


# -- specialisation, restriction, bounds ----------------------------------------


@dataclass(frozen=True)
class SpecialisationPreReport:
    """Value constraints on sigma_{x,n} read off the exchange matrix."""

    variable: str
    value: int
    flags: tuple

    @property
    def possible(self):
        return not self.flags


def specialisation(s, x, n):
    """The candidate sending x to the integer n and deleting it from the seed.

    Returns (spec, pre_report).  The pre-report applies the value constraints:
    with some exchangeable y having b_xy != 0, only n in {-1, 1} can work, and
    an odd b_xy forces n = 1.  Whether the images actually land in the target
    algebra is a separate, downstream check.
    """
    k = s.slot(x)
    n = int(n)
    keep = [i for i in range(s.n) if i != k]
    target = s.subseed(keep)
    assignment = []
    for i in range(s.n):
        if i == k:
            assignment.append(Const(n))
        else:
            assignment.append(TargetVar(keep.index(i)))
    spec = build_morphism(s, target, tuple(assignment))

    flags = []
    row = s.matrix.rows[k]
    for y in sorted(s.exchangeable - {k}):
        b = row[y]
        if b != 0 and n not in (-1, 1):
            flags.append(f"b[{s.labels[k]}][{s.labels[y]}] = {b} forces "
                         f"n in {{-1, 1}}, got {n}")
        if b % 2 != 0 and n != 1:
            flags.append(f"odd b[{s.labels[k]}][{s.labels[y]}] = {b} forces "
                         f"n = 1, got {n}")
    return spec, SpecialisationPreReport(s.labels[k], n, tuple(flags))


def restriction(s, keep):
    """Identity on the kept variables, 1 elsewhere, into the full subseed."""
    slots = sorted(s.slot(v) for v in keep)
    target = s.subseed(slots)
    assignment = []
    for i in range(s.n):
        if i in slots:
            assignment.append(TargetVar(slots.index(i)))
        else:
            assignment.append(Const(1))
    return build_morphism(s, target, tuple(assignment))


def check_upper_bound_membership(elem, s):
    """Membership in the intersection of the Laurent rings of s and its
    one-step mutations, with polynomial coefficients in the frozen variables.

    Returns ("member", None) or ("not_member", witness) where the witness
    names the obstructing cluster ("initial" or the mutated variable).
    """
    if isinstance(elem, LaurentPoly):
        elem = RationalExpr(elem)
    clusters = [("initial", s)]
    for k in sorted(s.exchangeable):
        clusters.append((s.labels[k], s.mutate(k)))
    for name, cluster in clusters:
        poly = express_in_cluster(elem, cluster)
        if poly is None:
            return ("not_member", name)
        for i in cluster.frozen:
            if poly.min_exponent(i) < 0:
                return ("not_member", name)
    return ("member", None)


def check_spebounds(s, x, depth):
    """Specialise every depth-bounded cluster variable of s at x=1 and test
    upper-bound membership in the deleted seed.  Returns the violation list
    (expected empty)."""
    spec, _ = specialisation(s, x, 1)
    violations = []
    for v in sorted(cluster_variables(s, max_depth=depth),
                    key=lambda p: p.render()):
        img = apply_morphism(spec, v)
        status, witness = check_upper_bound_membership(img, spec.target)
        if status != "member":
            violations.append((v.render(), witness))
    return violations


# -- serialisation ---------------------------------------------------------------


def morphism_to_json(f):
    return {
        "source": seed_to_json(f.source),
        "target": seed_to_json(f.target),
        "map": f.mapping(),
    }


def morphism_from_json(obj, check_cm2=True):
    try:
        source = seed_from_json(obj["source"])
        target = seed_from_json(obj["target"])
        mapping = obj["map"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"morphism object missing field: {exc}") from exc
    return build_morphism(source, target, dict(mapping), check_cm2=check_cm2)


def morphism_loads(text):
    return morphism_from_json(json.loads(text))
