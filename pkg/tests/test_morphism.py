import random

import pytest

from clusterkit.laurent import RationalExpr, laurent_divide
from clusterkit.morphism import (
    CM2Violation,
    Const,
    SeedMismatch,
    TargetVar,
    ZeroDenominatorImage,
    apply_morphism,
    biadmissible_sequences,
    build_morphism,
    check_sequence,
    check_spebounds,
    check_upper_bound_membership,
    classify_isomorphism,
    compose,
    identity_morphism,
    image_seed,
    is_ideal,
    morphism_from_json,
    morphism_to_json,
    restriction,
    specialisation,
    verify_cm3,
    verify_locally,
)
from clusterkit.seed import cluster_variables, new_seed, opposite_seed, subseed

B_A3 = [[0, 1, 0], [-1, 0, 1], [0, -1, 0]]


def worked_example():
    """One frozen-heavy seed onto a coefficient-free one: x1 -> 1."""
    src = new_seed(["x1", "x2", "x3"], ["x2"], B_A3)
    tgt = new_seed(["y1", "y2", "y3"], ["y1", "y2", "y3"], B_A3)
    f = build_morphism(src, tgt, {"x1": 1, "x2": "y1", "x3": "y2"})
    return src, tgt, f


def folding():
    src = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"],
                   [[0, 1, 0], [-1, 0, -1], [0, 1, 0]])
    tgt = new_seed(["u1", "u2"], ["u1", "u2"], [[0, 1], [-2, 0]])
    pi = build_morphism(src, tgt, {"x1": "u1", "x2": "u2", "x3": "u1"})
    return src, tgt, pi


def frac(num, den):
    q = laurent_divide(num, den)
    assert q is not None
    return q


# -- construction ---------------------------------------------------------------


def test_build_worked_example():
    _, _, f = worked_example()
    assert f.mapping() == {"x1": 1, "x2": "y1", "x3": "y2"}


def test_build_identity():
    s = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    f = identity_morphism(s)
    assert f.mapping() == {"a": "a", "b": "b"}


def test_build_cm2_violation():
    src = new_seed(["a"], ["a"], [[0]])
    tgt = new_seed(["b"], [], [[0]])
    with pytest.raises(CM2Violation):
        build_morphism(src, tgt, {"a": "b"})


def test_build_requires_total_assignment():
    src = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        build_morphism(src, src, {"a": "a"})


def test_frozen_to_exchangeable_is_legal():
    src = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    tgt = new_seed(["a", "b"], ["a", "b"], [[0, 1], [-1, 0]])
    f = build_morphism(src, tgt, {"a": "a", "b": "b"})
    assert verify_cm3(f, 3).verified


# -- apply -----------------------------------------------------------------------


def test_apply_worked_example():
    src, tgt, f = worked_example()
    x1, x2, x3 = src.ring.gens()
    y1, y2, _ = tgt.ring.gens()
    image = apply_morphism(f, RationalExpr(x1 + x3, x2))
    assert image == RationalExpr(1 + y2, y1)


def test_apply_identity():
    s = new_seed(["a", "b"], ["a", "b"], [[0, 1], [-1, 0]])
    f = identity_morphism(s)
    a, b = s.ring.gens()
    expr = RationalExpr(1 + a + b, a * b)
    assert apply_morphism(f, expr) == expr


def test_apply_zero_denominator():
    src = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    tgt = new_seed(["c", "d"], ["c"], [[0, 1], [-1, 0]])
    f = build_morphism(src, tgt, {"a": "c", "b": 0})
    a, b = src.ring.gens()
    with pytest.raises(ZeroDenominatorImage):
        apply_morphism(f, RationalExpr(a, b))


# -- biadmissible sequences -------------------------------------------------------


def test_biadmissible_depth1_worked_example():
    _, _, f = worked_example()
    assert biadmissible_sequences(f, 1) == [("x2",)]


def test_biadmissible_identity_all_admissible():
    s = new_seed(["a", "b"], ["a", "b"], [[0, 1], [-1, 0]])
    f = identity_morphism(s)
    seqs = biadmissible_sequences(f, 2)
    assert ("a",) in seqs and ("b",) in seqs
    assert ("a", "a'") in seqs and ("a", "b") in seqs
    assert len(seqs) == 2 + 4


def test_biadmissible_all_constant_images():
    src = new_seed(["a", "b"], ["a", "b"], [[0, 1], [-1, 0]])
    tgt = new_seed(["c"], [], [[0]])
    f = build_morphism(src, tgt, {"a": 1, "b": 1})
    assert biadmissible_sequences(f, 3) == []


# -- CM3 verification --------------------------------------------------------------


def test_verify_worked_example_all_depths():
    _, _, f = worked_example()
    for depth in range(1, 5):
        report = verify_cm3(f, depth)
        assert report.verified, depth


def test_verify_identity_a3():
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"], B_A3)
    assert verify_cm3(identity_morphism(s), 4).verified


def test_folding_fails_beyond_depth_one():
    src, tgt, pi = folding()
    assert verify_locally(pi).verified
    assert verify_cm3(pi, 1).verified
    report = verify_cm3(pi, 3)
    assert report.status == "failed"
    # lexicographically first failing sequence
    assert report.witness.sequence == ("x1", "x2")
    assert report.witness.variable == "x2"

    # the classical witness path, replayed directly
    u1, u2 = tgt.ring.gens()
    ok, comparisons = check_sequence(pi, ["x2", "x1", "x2'"])
    assert ok
    values = {var: (lhs, rhs, eq) for var, lhs, rhs, eq in comparisons}
    lhs, rhs, eq = values["x2"]
    assert not eq
    assert lhs == RationalExpr(1 + u2, u1)
    assert rhs == RationalExpr(1 + 2 * u2 + u2 ** 2 + u1 ** 2, u1 ** 2 * u2)
    assert values["x1"][2]


def test_witness_json_shape():
    _, _, pi = folding()
    report = verify_cm3(pi, 2)
    obj = report.to_json()
    assert obj["status"] == "failed"
    assert obj["witness"]["sequence"] == ["x1", "x2"]
    assert set(obj["witness"]) == {"sequence", "variable", "lhs", "rhs"}


# -- composition --------------------------------------------------------------------


def test_compose_with_identity():
    _, tgt, f = worked_example()
    assert compose(identity_morphism(tgt), f).assignment == f.assignment


def test_composition_counterexample_rejected_at_build():
    # identity from a one-variable coefficient-free seed onto its frozen copy
    # satisfies CM1 but not CM2, so it cannot even be built
    src = new_seed(["x"], ["x"], [[0]])
    tgt = new_seed(["x"], [], [[0]])
    with pytest.raises(CM2Violation):
        build_morphism(src, tgt, {"x": "x"})


def test_compose_specialisation_chain():
    src, tgt, f = worked_example()
    g, pre = specialisation(tgt, "y3", 1)
    assert pre.possible
    assert verify_cm3(f, 2).verified and verify_cm3(g, 2).verified
    gf = compose(g, f)
    assert gf.mapping() == {"x1": 1, "x2": "y1", "x3": "y2"}
    assert verify_cm3(gf, 2).verified


def test_compose_seed_mismatch():
    src, tgt, f = worked_example()
    other = new_seed(["z"], ["z"], [[0]])
    with pytest.raises(SeedMismatch):
        compose(identity_morphism(other), f)


# -- image seed and ideality -----------------------------------------------------------


def test_image_seed_worked_example():
    _, _, f = worked_example()
    img = image_seed(f)
    assert img.labels == ("y1", "y2")
    assert sorted(img.exchangeable) == [0]
    assert img.matrix.rows == ((0, 1), (-1, 0))


def test_image_seed_identity_and_constants():
    s = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    assert image_seed(identity_morphism(s)).matrix == s.matrix
    tgt = new_seed(["c"], [], [[0]])
    f = build_morphism(s, tgt, {"a": 1, "b": 2})
    assert image_seed(f).n == 0


def test_is_ideal_worked_example():
    _, _, f = worked_example()
    assert is_ideal(f, 4) == ("ideal_to_depth", None)


def test_is_ideal_identity():
    s = new_seed(["x1", "x2"], ["x1", "x2"], [[0, 1], [-1, 0]])
    assert is_ideal(identity_morphism(s), 4)[0] == "ideal_to_depth"


def test_injective_implies_ideal_on_corpus():
    s = new_seed(["x1", "x2"], ["x1", "x2"], [[0, 1], [-1, 0]])
    big = new_seed(["x1", "x2", "z"], ["x1", "x2"],
                   [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    inj = build_morphism(s, big, {"x1": "x1", "x2": "x2"})
    assert verify_cm3(inj, 3).verified
    assert is_ideal(inj, 3)[0] == "ideal_to_depth"


# -- isomorphism classification ----------------------------------------------------------


def test_classify_identity():
    s = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    verdict, iso = classify_isomorphism(identity_morphism(s))
    assert verdict == "iso" and iso.sign == 1


def test_classify_onto_opposite():
    s = new_seed(["a", "b"], ["a", "b"], [[0, 1], [-1, 0]])
    op = opposite_seed(s)
    op_root = new_seed(op.labels, sorted(op.exchangeable), op.matrix.rows)
    f = build_morphism(s, op_root, {"a": "a", "b": "b"})
    verdict, iso = classify_isomorphism(f)
    assert verdict == "iso" and iso.sign == -1
    assert verify_cm3(f, 3).verified


def test_classify_not_injective():
    _, _, f = worked_example()
    verdict, reason = classify_isomorphism(f)
    assert verdict == "not_iso"
    assert "integer" in reason


def test_iso_verifies_cm3():
    s = new_seed(["a", "b", "c"], ["a", "b"],
                 [[0, 2, -1], [-2, 0, 1], [1, -1, 0]])
    relabelled = new_seed(["p", "q", "r"], ["q", "r"],
                          [[0, 1, -1], [-1, 0, 2], [1, -2, 0]])
    # a->q, b->r, c->p transports the matrix identically
    f = build_morphism(s, relabelled, {"a": "q", "b": "r", "c": "p"})
    verdict, _ = classify_isomorphism(f)
    assert verdict == "iso"
    for depth in (1, 2, 3):
        assert verify_cm3(f, depth).verified


# -- specialisation -------------------------------------------------------------------------


def d4_seed():
    return new_seed(["x1", "x2", "x3", "x4"], ["x1", "x2", "x3", "x4"],
                    [[0, 0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 1], [-1, -1, -1, 0]])


def test_specialisation_d4_images():
    s = d4_seed()
    x1, x2, x3, x4 = s.ring.gens()
    sigma, pre = specialisation(s, "x4", 1)
    assert pre.possible

    x = RationalExpr(1 + x1 * x2 * x3 + 3 * x4 + 3 * x4 ** 2 + x4 ** 3,
                     x1 * x2 * x3 * x4)
    z = RationalExpr(1 + 2 * x1 * x2 * x3 + (x1 * x2 * x3) ** 2 + 3 * x4
                     + 3 * x1 * x2 * x3 * x4 + 3 * x4 ** 2 + x4 ** 3,
                     x1 * x2 * x3 * x4 ** 2)
    # both are reachable cluster variables of the rank-4 sink quiver
    vars_d4 = cluster_variables(s)
    assert laurent_divide(x.num, x.den) in vars_d4
    assert laurent_divide(z.num, z.den) in vars_d4

    t = sigma.target.ring
    y1, y2, y3 = t.gens()
    m = y1 * y2 * y3
    assert apply_morphism(sigma, x) == RationalExpr(8 + m, m)
    assert apply_morphism(sigma, z) == RationalExpr(8 + 5 * m + m * m, m)


def test_specialisation_value_constraints():
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"],
                 [[0, 1, 0], [-1, 0, -1], [0, 1, 0]])
    _, pre = specialisation(s, "x3", -1)
    assert not pre.possible
    assert any("odd" in flag for flag in pre.flags)
    _, pre = specialisation(s, "x3", 1)
    assert pre.possible
    _, pre = specialisation(s, "x3", 5)
    assert not pre.possible


def test_specialisation_even_entries_allow_minus_one():
    torus = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"],
                     [[0, 2, -2], [-2, 0, 2], [2, -2, 0]])
    _, pre = specialisation(torus, "x1", -1)
    assert pre.possible


def test_specialisation_minus_one_non_laurent_witness():
    # sigma_{x3,-1} sends (1+x1x3)/x2 to (1-x1)/x2; together with (1+x1)/x2
    # that would force 2/x2 into the target algebra, whose expansion in the
    # once-mutated cluster is 2x2'/(1+x1): not Laurent
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"],
                 [[0, 1, 0], [-1, 0, -1], [0, 1, 0]])
    sigma, _ = specialisation(s, "x3", -1)
    x1, x2, x3 = s.ring.gens()
    image = apply_morphism(sigma, RationalExpr(1 + x1 * x3, x2))
    t1, t2 = sigma.target.ring.gens()
    assert image == RationalExpr(1 - t1, t2)
    status, witness = check_upper_bound_membership(
        RationalExpr(sigma.target.ring.const(2), t2), sigma.target)
    assert status == "not_member" and witness == "x2"


def test_specialisation_torus():
    torus = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"],
                     [[0, 2, -2], [-2, 0, 2], [2, -2, 0]])
    sigma, pre = specialisation(torus, "x1", 1)
    assert pre.possible
    x_theta = torus.mutate("x3").expansions[2]
    image = apply_morphism(sigma, x_theta)
    t = sigma.target.ring
    x2t, x3t = t.gens()
    assert image == RationalExpr(1 + x2t ** 2, x3t)
    depth1 = cluster_variables(sigma.target, max_depth=1)
    assert any(RationalExpr(v) == image for v in depth1)


def test_specialisation_commutes_with_avoiding_sequences():
    rng = random.Random(13)
    for _ in range(6):
        n = rng.randint(2, 4)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = rng.randint(-2, 2)
                rows[i][j] = v
                rows[j][i] = -v
        s = new_seed([f"v{i}" for i in range(n)], list(range(n)), rows)
        x = f"v{rng.randrange(n)}"
        sigma, _ = specialisation(s, x, 1)
        assert verify_cm3(sigma, 3).verified
        assert all(x not in seq for seq in biadmissible_sequences(sigma, 2))


# -- restriction ---------------------------------------------------------------------------


def test_restriction_identity():
    s = new_seed(["a", "b"], ["a"], [[0, 1], [-1, 0]])
    f = restriction(s, ["a", "b"])
    assert f.mapping() == {"a": "a", "b": "b"}


def test_restriction_a3():
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"], B_A3)
    f = restriction(s, ["x1", "x2"])
    assert f.mapping() == {"x1": "x1", "x2": "x2", "x3": 1}
    assert verify_cm3(f, 3).verified


def test_restriction_to_empty():
    s = new_seed(["x1", "x2"], ["x1", "x2"], [[0, 1], [-1, 0]])
    f = restriction(s, [])
    assert f.target.n == 0
    assert f.mapping() == {"x1": 1, "x2": 1}


# -- bounds ---------------------------------------------------------------------------------


def test_upper_bound_initial_variables_member():
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"], B_A3)
    for g in s.ring.gens():
        assert check_upper_bound_membership(RationalExpr(g), s)[0] == "member"


def test_upper_bound_2_over_x2():
    s = new_seed(["x1", "x2"], ["x1", "x2"], [[0, 1], [-1, 0]])
    x1, x2 = s.ring.gens()
    status, witness = check_upper_bound_membership(
        RationalExpr(s.ring.const(2), x2), s)
    assert status == "not_member"
    assert witness == "x2"


def test_upper_bound_mutated_variable_member():
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"],
                 [[0, 1, 0], [-1, 0, -1], [0, 1, 0]])
    elem = RationalExpr(s.mutate("x2").expansions[1])
    assert check_upper_bound_membership(elem, s)[0] == "member"


def test_upper_bound_monomial_with_negative_exchangeable_exponent():
    rng = random.Random(57)
    s = new_seed(["x1", "x2", "f"], ["x1", "x2"],
                 [[0, 1, 1], [-1, 0, 0], [-1, 0, 0]])
    for _ in range(5):
        neg = rng.choice(["x1", "x2"])
        exps = {neg: -rng.randint(1, 2)}
        for other in ("x1", "x2", "f"):
            if other != neg:
                exps[other] = rng.randint(0, 2)
        m = RationalExpr(s.ring.monomial(exps))
        status, witness = check_upper_bound_membership(m, s)
        assert status == "not_member" and witness == neg


def test_upper_bound_frozen_negative_exponent():
    s = new_seed(["x1", "f"], ["x1"], [[0, 1], [-1, 0]])
    m = RationalExpr(s.ring.monomial({"f": -1}))
    assert check_upper_bound_membership(m, s)[0] == "not_member"


def test_spebounds_a3():
    s = new_seed(["x1", "x2", "x3"], ["x1", "x2", "x3"], B_A3)
    assert check_spebounds(s, "x3", 3) == []


def test_spebounds_frozen_variable():
    s = new_seed(["x1", "f"], ["x1"], [[0, 1], [-1, 0]])
    assert check_spebounds(s, "f", 3) == []


def test_spebounds_d4():
    assert check_spebounds(d4_seed(), "x4", 2) == []


# -- structural invariants ---------------------------------------------------------------


def _image_view_sequences(f, depth):
    """Compare image-seed mutation with target-seed mutation, all sequences."""
    from clusterkit.morphism import _image_view

    view = _image_view(f)
    hit = sorted({a.index for a in f.assignment if isinstance(a, TargetVar)})

    def rec(v, t, d):
        if d == 0:
            return True
        for k in sorted(v.exchangeable):
            v2 = v.mutate(k)
            t2 = t.mutate(hit[k])
            if v2.expansions[k] != t2.expansions[hit[k]]:
                return False
            if not rec(v2, t2, d - 1):
                return False
        return True

    return rec(view, f.target, depth)


def test_image_seed_mutation_agreement():
    _, _, f = worked_example()
    assert _image_view_sequences(f, 3)


def test_composition_stability_small_corpus():
    rng = random.Random(99)
    for _ in range(5):
        n = rng.randint(2, 3)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = rng.randint(-2, 2)
                rows[i][j] = v
                rows[j][i] = -v
        s = new_seed([f"v{i}" for i in range(n)], list(range(n)), rows)
        mid, _ = specialisation(s, f"v{rng.randrange(n)}", 1)
        assert verify_cm3(mid, 3).verified
        if mid.target.n == 0:
            continue
        last, _ = specialisation(mid.target, mid.target.labels[0], 1)
        assert verify_cm3(last, 3).verified
        assert verify_cm3(compose(last, mid), 3).verified


# -- serialisation --------------------------------------------------------------------------


def test_morphism_json_round_trip():
    _, _, f = worked_example()
    obj = morphism_to_json(f)
    again = morphism_from_json(obj)
    assert again.mapping() == f.mapping()
    assert again.source.matrix == f.source.matrix
    assert again.target.labels == f.target.labels
