import random
from fractions import Fraction

import pytest

from clusterkit.laurent import (
    LaurentPoly,
    RationalExpr,
    Ring,
    RingMismatch,
    UnassignedVariable,
    UndefinedAtPoint,
    ZeroPolynomialDivision,
    evaluate,
    evaluate_rational,
    exact_divide,
    is_laurent,
    laurent_divide,
    substitute,
    substitute_rational,
)


@pytest.fixture
def ring():
    return Ring(["x1", "x2", "x3", "x4"])


def random_poly(rng, ring, terms=4, span=2):
    out = ring.zero()
    for _ in range(rng.randint(1, terms)):
        exps = {i: rng.randint(-span, span) for i in range(ring.nvars)
                if rng.random() < 0.6}
        out = out + ring.monomial(exps, rng.randint(-5, 5))
    return out


def test_arith_examples(ring):
    x1, x2, x3, _ = ring.gens()
    assert (x1 + 1) * (x1 - 1) == x1 * x1 - 1
    assert ring.monomial({1: -1}) * x2 == 1
    assert (1 + x1 * x3) + x2 == 1 + x2 + x1 * x3


def test_arith_ring_mismatch(ring):
    other = Ring(["x1", "x2", "x3", "x4"])
    with pytest.raises(RingMismatch):
        ring.gen(0) + other.gen(0)


def test_arith_ring_axioms_randomised(ring):
    rng = random.Random(7)
    for _ in range(40):
        a = random_poly(rng, ring)
        b = random_poly(rng, ring)
        c = random_poly(rng, ring)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_exact_divide_examples(ring):
    x1, x2, x3, _ = ring.gens()
    assert exact_divide(x1 * x2 + x1, x1) == x2 + 1
    assert exact_divide(1 + x2 + x1 * x3, x2) is None
    assert exact_divide(x2 ** 2 + x1 ** 2, x3) is None
    # ... but the same quotient with a monomial denominator is Laurent
    torus_var = is_laurent(RationalExpr(x2 ** 2 + x1 ** 2, x3))
    assert torus_var == ring.monomial({0: 2, 2: -1}) + ring.monomial({1: 2, 2: -1})


def test_laurent_divide_negative_exponents(ring):
    # laurent_divide works in the full Laurent ring, exact_divide does not
    x1 = ring.gen(0)
    assert laurent_divide(ring.monomial({0: -1}), x1) == ring.monomial({0: -2})
    assert laurent_divide(ring.one(), x1) == ring.monomial({0: -1})
    assert exact_divide(ring.one(), x1) is None


def test_exact_divide_zero_cases(ring):
    x1 = ring.gen(0)
    assert exact_divide(ring.zero(), x1) == 0
    with pytest.raises(ZeroPolynomialDivision):
        exact_divide(x1, ring.zero())


def test_divide_round_trip_randomised(ring):
    rng = random.Random(11)
    for _ in range(60):
        a = random_poly(rng, ring)
        b = random_poly(rng, ring)
        if b.is_zero():
            continue
        assert laurent_divide(a * b, b) == a
        q = exact_divide(a * b, b)
        if q is not None:
            assert q == a


def test_is_laurent_examples(ring):
    x1, x2, _, _ = ring.gens()
    assert is_laurent(RationalExpr(x1 * x1 - 1, x1 - 1)) == x1 + 1
    # 2*x2'/(1+x1) with x2' renamed: numerator 2*x2 over 1+x1
    assert is_laurent(RationalExpr(2 * x2, 1 + x1)) is None


def test_substitute_examples():
    src = Ring(["x1", "x2", "x3"])
    tgt = Ring(["x1", "x2p"])
    x1t, x2p = tgt.gens()
    image = RationalExpr(1 + x1t, x2p)
    r = substitute(src.var("x2"), {"x2": image})
    assert r == image

    u = Ring(["u1", "u2"])
    u1 = u.gen(0)
    x1, _, x3 = src.gens()
    folded = substitute(1 + x1 * x3, {"x1": u1, "x3": u1})
    assert folded == RationalExpr(1 + u1 * u1)

    r = substitute(src.var("x3"), {"x3": 1}, target_ring=u)
    assert r == RationalExpr(u.one())


def test_substitute_identity_is_identity(ring):
    rng = random.Random(3)
    p = random_poly(rng, ring)
    r = substitute(p, {i: RationalExpr(ring.gen(i)) for i in range(4)},
                   target_ring=ring)
    assert r == RationalExpr(p)


def test_substitute_unassigned(ring):
    with pytest.raises(UnassignedVariable):
        substitute(ring.gen(0) + ring.gen(1), {"x1": 1}, target_ring=ring)


def test_substitute_homomorphism_randomised():
    src = Ring(["a", "b"])
    tgt = Ring(["s", "t"])
    rng = random.Random(19)
    for _ in range(25):
        p = random_poly(rng, src, terms=3, span=1)
        sigma = {0: random_poly(rng, tgt, terms=2, span=1),
                 1: random_poly(rng, tgt, terms=2, span=1)}
        if any(v.is_zero() for v in sigma.values()):
            continue
        point = {"s": rng.randint(1, 5), "t": rng.randint(1, 5)}
        try:
            direct = evaluate_rational(substitute(p, sigma), point)
            through = evaluate(p, {0: evaluate(sigma[0], point),
                                   1: evaluate(sigma[1], point)})
        except UndefinedAtPoint:
            continue
        assert direct == through


def test_evaluate_examples(ring):
    x1, x2, x3, x4 = ring.gens()
    assert evaluate(x1 + x2, {"x1": 2, "x2": 3}) == 5
    with pytest.raises(UndefinedAtPoint):
        evaluate(ring.monomial({0: -1}), {"x1": 0})

    # the sink-quiver rank-4 cluster variable at the all-ones point
    num = 1 + x1 * x2 * x3 + 3 * x4 + 3 * x4 ** 2 + x4 ** 3
    expr = RationalExpr(num, x1 * x2 * x3 * x4)
    ones = {n: 1 for n in ring.names}
    assert evaluate_rational(expr, ones) == 9
    # dropping the unit summand leaves the bare monomial part, value 8
    assert evaluate_rational(expr - 1, ones) == 8
    shifted = RationalExpr(ring.const(8) + x1 * x2 * x3, x1 * x2 * x3)
    assert evaluate_rational(shifted, ones) == 9
    assert expr != shifted  # equal only after specialising x4 to 1


def test_rational_equality_cross_multiplication(ring):
    x1, x2, _, _ = ring.gens()
    a = RationalExpr(x1 * x1 - 1, x1 - 1)
    b = RationalExpr((x1 + 1) * x2, x2)
    assert a == b
    assert RationalExpr(x1, x2) != RationalExpr(x2, x1)
    with pytest.raises(ZeroPolynomialDivision):
        RationalExpr(x1, ring.zero())


def test_render_canonical(ring):
    x1, x2, x3, _ = ring.gens()
    assert (x1 * x1 - 1).render() == "x1^2 - 1"
    assert ((1 + x1 * x3) + x2).render() == "x1*x3 + x2 + 1"
    torus = ring.monomial({0: 2, 2: -1}) + ring.monomial({1: 2, 2: -1})
    assert torus.render() == "x1^2*x3^-1 + x2^2*x3^-1"
    assert torus.render_fraction() == "(x1^2 + x2^2)/x3"
    assert ring.zero().render() == "0"
    assert ring.const(-3).render() == "-3"
    assert (2 * ring.monomial({0: -1})).render() == "2*x1^-1"


def test_render_fraction_with_composite_denominator(ring):
    x1, x2, _, _ = ring.gens()
    assert exact_divide(1 + x1 + x2, x1 * x2) is None
    q = is_laurent(RationalExpr(1 + x1 + x2, ring.monomial({0: 1, 1: 1})))
    assert q.render_fraction() == "(x1 + x2 + 1)/(x1*x2)"


def test_pow(ring):
    x1 = ring.gen(0)
    assert x1 ** 0 == 1
    assert (x1 + 1) ** 3 == x1 ** 3 + 3 * x1 ** 2 + 3 * x1 + 1
    assert x1 ** -2 == ring.monomial({0: -2})
    with pytest.raises(ValueError):
        (x1 + 1) ** -1
