"""Seeds of geometric type: exchange matrices, mutation, and seed surgery helpers.

A seed keeps the exact expansion of every cluster variable as a Laurent
polynomial in the variables of its root seed, so the Laurent phenomenon is an
enforced invariant rather than a hope: every mutation ends in an exact
division that must succeed.
"""

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .laurent import (
    LaurentPoly,
    RationalExpr,
    Ring,
    RingMismatch,
    is_laurent,
    laurent_divide,
    substitute_rational,
)

__all__ = [
    "ExchangeMatrix",
    "Seed",
    "SeedIso",
    "MutationClassResult",
    "NotSkewSymmetrisable",
    "DuplicateLabel",
    "DimensionMismatch",
    "NotExchangeable",
    "NotAdmissible",
    "NoSuchVariable",
    "LaurentContractViolation",
    "new_seed",
    "check_skew_symmetrisable",
    "simplify_seed",
    "opposite_seed",
    "subseed",
    "seed_isomorphic",
    "mutation_class",
    "cluster_variables",
    "is_acyclic",
    "is_finite_type",
    "express_in_cluster",
    "rewrite_in_cluster",
    "seed_to_json",
    "seed_from_json",
    "seed_to_dot",
]


class NotSkewSymmetrisable(ValueError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DuplicateLabel(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotExchangeable(ValueError):
    pass


class NoSuchVariable(KeyError):
    pass


class NotAdmissible(ValueError):
    def __init__(self, position, message=""):
        super().__init__(message or f"sequence not admissible at position {position}")
        self.position = position


class LaurentContractViolation(AssertionError):
    """An exchange failed to divide exactly; must never fire on valid seeds."""


def check_skew_symmetrisable(rows):
    """Minimal positive integer symmetriser d with d[i]*b[i][j] == -d[j]*b[j][i].

    Works per connected component of the exchange graph by ratio propagation
    and verifies consistency on the non-tree edges.  Raises
    NotSkewSymmetrisable (with an offending index pair) otherwise.
    """
    n = len(rows)
    for i in range(n):
        if len(rows[i]) != n:
            raise DimensionMismatch(f"row {i} has length {len(rows[i])}, expected {n}")
        if rows[i][i] != 0:
            raise NotSkewSymmetrisable(f"nonzero diagonal entry at {i}", (i, i))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = rows[i][j], rows[j][i]
            if (a == 0) != (b == 0) or a * b > 0:
                raise NotSkewSymmetrisable(
                    f"sign pattern broken at ({i},{j}): {a} vs {b}", (i, j))

    d = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        component = [start]
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in range(n):
                if rows[i][j] == 0:
                    continue
                ratio = Fraction(abs(rows[i][j]), abs(rows[j][i]))
                if d[j] is None:
                    d[j] = d[i] * ratio
                    component.append(j)
                    queue.append(j)
                elif d[j] != d[i] * ratio:
                    raise NotSkewSymmetrisable(
                        f"inconsistent symmetriser ratios around a cycle at ({i},{j})",
                        (i, j))
        # rescale the component to minimal positive integers
        lcm = 1
        for i in component:
            q = d[i].denominator
            lcm = lcm * q // _gcd(lcm, q)
        vals = [int(d[i] * lcm) for i in component]
        g = 0
        for v in vals:
            g = _gcd(g, v)
        for i, v in zip(component, vals):
            d[i] = v // g
    return tuple(int(x) for x in d)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


class ExchangeMatrix:
    """Square integer matrix with a stored skew-symmetriser witness."""

    __slots__ = ("rows", "d")

    def __init__(self, rows, d=None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if d is None:
            d = check_skew_symmetrisable(rows)
        self.rows = rows
        self.d = tuple(d)

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def entry(self, i, j):
        return self.rows[i][j]

    def mutate(self, k):
        n = self.n
        old = self.rows
        rows = []
        for y in range(n):
            row = []
            for z in range(n):
                if y == k or z == k:
                    row.append(-old[y][z])
                else:
                    row.append(old[y][z]
                               + (abs(old[y][k]) * old[k][z]
                                  + old[y][k] * abs(old[k][z])) // 2)
            rows.append(tuple(row))
        return ExchangeMatrix(tuple(rows), self.d)

    def opposite(self):
        return ExchangeMatrix(tuple(tuple(-x for x in r) for r in self.rows), self.d)

    def simplified(self, frozen):
        frozen = set(frozen)
        rows = tuple(
            tuple(0 if (i in frozen and j in frozen) else x
                  for j, x in enumerate(r))
            for i, r in enumerate(self.rows))
        return ExchangeMatrix(rows, self.d)

    def submatrix(self, indices):
        indices = tuple(indices)
        rows = tuple(tuple(self.rows[i][j] for j in indices) for i in indices)
        return ExchangeMatrix(rows, tuple(self.d[i] for i in indices))

    def __eq__(self, other):
        if not isinstance(other, ExchangeMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"ExchangeMatrix({list(map(list, self.rows))})"


class Seed:
    """A seed together with exact expansions of its cluster in the root variables.

    ``labels`` are the current display names, ``exchangeable`` is the set of
    mutable slots (slots are stable under mutation), ``expansions[i]`` is the
    current variable in slot i written in the root cluster, and ``history``
    records the mutation path from the root as (slot, label-at-the-time)
    pairs.  ``root_gens[i]`` is the ambient-ring generator sitting in slot i
    of the root seed.  Instances are immutable; mutation returns fresh seeds.
    """

    __slots__ = ("ring", "labels", "exchangeable", "matrix", "expansions",
                 "history", "root_gens")

    def __init__(self, ring, labels, exchangeable, matrix, expansions,
                 history=(), root_gens=None):
        self.ring = ring
        self.labels = tuple(labels)
        self.exchangeable = frozenset(exchangeable)
        self.matrix = matrix
        self.expansions = tuple(expansions)
        self.history = tuple(history)
        if root_gens is None:
            root_gens = tuple(range(len(self.labels)))
        self.root_gens = tuple(root_gens)
        if matrix.n != len(self.labels):
            raise DimensionMismatch(
                f"matrix is {matrix.n}x{matrix.n} for {len(self.labels)} variables")

    # -- basics ----------------------------------------------------------

    @property
    def n(self):
        return len(self.labels)

    @property
    def frozen(self):
        return tuple(i for i in range(self.n) if i not in self.exchangeable)

    def is_root(self):
        return not self.history

    def slot(self, var):
        """Resolve a current label (or slot index) to a slot index."""
        if isinstance(var, int):
            if not 0 <= var < self.n:
                raise NoSuchVariable(var)
            return var
        try:
            return self.labels.index(var)
        except ValueError:
            raise NoSuchVariable(var) from None

    def __eq__(self, other):
        if not isinstance(other, Seed):
            return NotImplemented
        return (self.ring is other.ring
                and self.expansions == other.expansions
                and self.exchangeable == other.exchangeable
                and self.matrix == other.matrix)

    def __repr__(self):
        ex = ",".join(self.labels[i] for i in sorted(self.exchangeable))
        return f"Seed({', '.join(self.labels)}; ex={{{ex}}})"

    # -- mutation ----------------------------------------------------------

    def exchange_sum(self, k):
        """The binomial M+ + M- appearing in the exchange relation at slot k."""
        k = self.slot(k)
        row = self.matrix.rows[k]
        pos = self.ring.one()
        neg = self.ring.one()
        for y, b in enumerate(row):
            if b > 0:
                pos = pos * self.expansions[y] ** b
            elif b < 0:
                neg = neg * self.expansions[y] ** (-b)
        return pos + neg

    def mutate(self, k):
        k = self.slot(k)
        if k not in self.exchangeable:
            raise NotExchangeable(f"{self.labels[k]} is frozen")
        new_exp = laurent_divide(self.exchange_sum(k), self.expansions[k])
        if new_exp is None:
            raise LaurentContractViolation(
                f"exchange at {self.labels[k]} is not Laurent in the root cluster")
        for i in self.frozen:
            g = self.root_gens[i]
            if new_exp.min_exponent(g) < 0:
                raise LaurentContractViolation(
                    f"frozen root variable {self.ring.names[g]} occurs with a "
                    "negative exponent")
        expansions = list(self.expansions)
        expansions[k] = new_exp
        labels = list(self.labels)
        old_label = labels[k]
        labels[k] = old_label + "'"
        return Seed(self.ring, labels, self.exchangeable, self.matrix.mutate(k),
                    expansions, self.history + ((k, old_label),), self.root_gens)

    def mutate_seq(self, seq):
        """Fold mutate over a sequence of slots or labels.

        Raises NotAdmissible with the first bad position.
        """
        current = self
        for pos, k in enumerate(seq):
            try:
                current = current.mutate(k)
            except (NotExchangeable, NoSuchVariable) as exc:
                raise NotAdmissible(pos, f"position {pos}: {exc}") from exc
        return current

    # -- derived seeds -----------------------------------------------------

    def simplified(self):
        return Seed(self.ring, self.labels, self.exchangeable,
                    self.matrix.simplified(self.frozen), self.expansions,
                    self.history, self.root_gens)

    def opposite(self):
        return Seed(self.ring, self.labels, self.exchangeable,
                    self.matrix.opposite(), self.expansions,
                    self.history, self.root_gens)

    def subseed(self, keep):
        """Fresh root seed on a subset of the current cluster (full subseed)."""
        slots = tuple(sorted(self.slot(v) for v in keep))
        labels = tuple(self.labels[i] for i in slots)
        ex = tuple(idx for idx, i in enumerate(slots) if i in self.exchangeable)
        return new_seed(labels, ex,
                        [[self.matrix.rows[i][j] for j in slots] for i in slots])

    def restrict_view(self, keep):
        """Subseed sharing this seed's ambient ring (expansions kept in place)."""
        slots = tuple(sorted(self.slot(v) for v in keep))
        return Seed(self.ring,
                    tuple(self.labels[i] for i in slots),
                    frozenset(idx for idx, i in enumerate(slots)
                              if i in self.exchangeable),
                    self.matrix.submatrix(slots),
                    tuple(self.expansions[i] for i in slots),
                    (),
                    tuple(self.root_gens[i] for i in slots))


def new_seed(labels, exchangeable, matrix_entries):
    """Validated root seed; computes and stores a symmetriser witness."""
    labels = tuple(str(x) for x in labels)
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"duplicate labels in {labels!r}")
    if len(matrix_entries) != len(labels):
        raise DimensionMismatch(
            f"{len(matrix_entries)} matrix rows for {len(labels)} variables")
    matrix = ExchangeMatrix(matrix_entries)
    ring = Ring(labels)
    ex = frozenset(labels.index(v) if isinstance(v, str) else int(v)
                   for v in exchangeable)
    for i in ex:
        if not 0 <= i < len(labels):
            raise NoSuchVariable(i)
    return Seed(ring, labels, ex, matrix, ring.gens())


def simplify_seed(s):
    """Zero all entries between pairs of frozen variables."""
    return s.simplified()


def opposite_seed(s):
    return s.opposite()


def subseed(s, keep):
    return s.subseed(keep)


# -- seed isomorphism --------------------------------------------------------


@dataclass(frozen=True)
class SeedIso:
    """Bijection of slots with b2[perm[x]][perm[y]] == sign * b1[x][y]."""

    perm: tuple
    sign: int

    def __call__(self, i):
        return self.perm[i]

    def inverse(self):
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return SeedIso(tuple(inv), self.sign)

    def compose(self, first):
        """self after first."""
        return SeedIso(tuple(self.perm[j] for j in first.perm),
                       self.sign * first.sign)


def _vertex_signature(matrix, exchangeable, i, sign):
    pairs = sorted((sign * matrix.rows[i][j], sign * matrix.rows[j][i])
                   for j in range(matrix.n) if j != i)
    return (i in exchangeable, tuple(pairs))


def seed_isomorphic(s1, s2, signs=(1, -1)):
    """Backtracking search for a seed isomorphism; None when there is none.

    Tries sign +1 then -1; candidates are pruned by the exchangeable/frozen
    partition and by row/column multisets.
    """
    if s1.n != s2.n or len(s1.exchangeable) != len(s2.exchangeable):
        return None
    n = s1.n
    for sign in signs:
        sig1 = [_vertex_signature(s1.matrix, s1.exchangeable, i, 1) for i in range(n)]
        sig2 = [_vertex_signature(s2.matrix, s2.exchangeable, j, sign) for j in range(n)]
        candidates = [[j for j in range(n) if sig2[j] == sig1[i]] for i in range(n)]
        if any(not c for c in candidates):
            continue
        order = sorted(range(n), key=lambda i: len(candidates[i]))
        perm = [None] * n
        used = [False] * n

        def extend(pos):
            if pos == n:
                return True
            i = order[pos]
            for j in candidates[i]:
                if used[j]:
                    continue
                ok = True
                for i2 in order[:pos]:
                    j2 = perm[i2]
                    if (s2.matrix.rows[j][j2] != sign * s1.matrix.rows[i][i2]
                            or s2.matrix.rows[j2][j] != sign * s1.matrix.rows[i2][i]):
                        ok = False
                        break
                if not ok:
                    continue
                perm[i] = j
                used[j] = True
                if extend(pos + 1):
                    return True
                perm[i] = None
                used[j] = False
            return False

        if extend(0):
            return SeedIso(tuple(perm), sign)
    return None


# -- mutation class exploration ----------------------------------------------


@dataclass
class MutationClassResult:
    status: str                  # closed | depth_truncated | size_truncated
    keys: set
    variables: set
    seeds_explored: int
    depth_reached: int


def canonical_seed_key(s):
    """De-duplication key: sorted expansion texts plus the re-ordered matrix."""
    texts = [e.render() for e in s.expansions]
    order = sorted(range(s.n), key=lambda i: texts[i])
    mat = tuple(tuple(s.matrix.rows[a][b] for b in order) for a in order)
    marked = tuple((texts[i], i in s.exchangeable) for i in order)
    return (marked, mat)


def mutation_class(s, max_depth=None, max_seeds=20000):
    """BFS over mutations, de-duplicated by canonical seed keys."""
    start_key = canonical_seed_key(s)
    seen = {start_key}
    variables = set(s.expansions)
    frontier = deque([(s, 0)])
    status = "closed"
    depth_reached = 0
    while frontier:
        current, depth = frontier.popleft()
        depth_reached = max(depth_reached, depth)
        if max_depth is not None and depth >= max_depth:
            status = "depth_truncated"
            continue
        for k in sorted(current.exchangeable):
            nxt = current.mutate(k)
            key = canonical_seed_key(nxt)
            if key in seen:
                continue
            if len(seen) >= max_seeds:
                return MutationClassResult("size_truncated", seen, variables,
                                           len(seen), depth_reached)
            seen.add(key)
            variables.update(nxt.expansions)
            frontier.append((nxt, depth + 1))
    return MutationClassResult(status, seen, variables, len(seen), depth_reached)


def cluster_variables(s, max_depth=None, max_seeds=20000):
    """All distinct variable expansions reached within the budget."""
    return mutation_class(s, max_depth, max_seeds).variables


def is_acyclic(s):
    """No oriented cycle after deleting the arrows between frozen vertices."""
    n = s.n
    adj = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if s.matrix.rows[i][j] > 0 and not (
                    i not in s.exchangeable and j not in s.exchangeable):
                adj[i].append(j)
    color = [0] * n   # 0 unvisited, 1 on stack, 2 done
    for start in range(n):
        if color[start]:
            continue
        stack = [(start, iter(adj[start]))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    return False
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return True


def is_finite_type(s, max_seeds=20000):
    """("finite", #cluster variables) when the closure fits the budget."""
    result = mutation_class(s, max_depth=None, max_seeds=max_seeds)
    if result.status == "closed":
        return ("finite", len(result.variables))
    return ("unknown", None)


# -- re-expression in a non-initial cluster -----------------------------------


def _replayed_root(s):
    """A fresh root on s's cluster whose replay expresses the original root.

    Mutation is involutive, so replaying s's history backwards from s viewed
    as a fresh root yields the root cluster written in s's variables.
    """
    fresh = Ring(s.labels)
    current = Seed(fresh, s.labels, s.exchangeable, s.matrix, fresh.gens())
    for slot, _ in reversed(s.history):
        current = current.mutate(slot)
    return fresh, current


def rewrite_in_cluster(elem, s):
    """elem (over s's root) rewritten over a fresh ring named by s's cluster."""
    if isinstance(elem, LaurentPoly):
        elem = RationalExpr(elem)
    if elem.ring is not s.ring:
        raise RingMismatch("element does not live in the seed's ambient ring")
    fresh, replayed = _replayed_root(s)
    assignment = {s.root_gens[i]: RationalExpr(replayed.expansions[i])
                  for i in range(s.n)}
    return substitute_rational(elem, assignment, fresh), fresh


def express_in_cluster(elem, s):
    """Laurent expansion of elem in s's cluster, or None when there is none."""
    expr, _ = rewrite_in_cluster(elem, s)
    return is_laurent(expr)


# -- serialisation -------------------------------------------------------------


def seed_to_json(s):
    return {
        "variables": list(s.labels),
        "exchangeable": [s.labels[i] for i in sorted(s.exchangeable)],
        "matrix": [list(r) for r in s.matrix.rows],
    }


def seed_from_json(obj):
    try:
        labels = obj["variables"]
        exchangeable = obj["exchangeable"]
        matrix = obj["matrix"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"seed object missing field: {exc}") from exc
    return new_seed(labels, exchangeable, matrix)


def seed_loads(text):
    return seed_from_json(json.loads(text))


def seed_to_dot(s, name="seed"):
    """Valued quiver in DOT: filled exchangeable nodes, hollow frozen nodes,
    an arrow i->j when b_ij>0 labelled (b_ij,-b_ji), frozen-frozen dashed."""
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for i, label in enumerate(s.labels):
        style = ' [style=filled, fillcolor=gray]' if i in s.exchangeable else ""
        lines.append(f'  "{label}"{style};')
    for i in range(s.n):
        for j in range(s.n):
            b = s.matrix.rows[i][j]
            if b > 0:
                attrs = [f'label="({b},{-s.matrix.rows[j][i]})"']
                if i not in s.exchangeable and j not in s.exchangeable:
                    attrs.append("style=dashed")
                lines.append(f'  "{s.labels[i]}" -> "{s.labels[j]}" '
                             f'[{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines)
