"""Exact sparse multivariate Laurent-polynomial arithmetic over the integers.

Values are immutable after construction and every operation is a pure
function, so they can be shared freely between threads.  Coefficients are
Python ints (arbitrary precision).  There is deliberately no multivariate
GCD, factorisation or rational-coefficient arithmetic: quotient equality is
decided by cross-multiplication and divisibility by exact division under a
fixed graded-lexicographic monomial order.
"""

from fractions import Fraction

__all__ = [
    "Ring",
    "LaurentPoly",
    "RationalExpr",
    "RingMismatch",
    "ZeroPolynomialDivision",
    "UnassignedVariable",
    "UndefinedAtPoint",
    "exact_divide",
    "laurent_divide",
    "substitute",
    "evaluate",
    "is_laurent",
]


class RingMismatch(ValueError):
    """Operands belong to different ambient rings."""


class ZeroPolynomialDivision(ZeroDivisionError):
    """Division by the zero polynomial."""


class UnassignedVariable(KeyError):
    """A variable required by substitute/evaluate has no assigned value."""


class UndefinedAtPoint(ArithmeticError):
    """A negative power met the value 0 during evaluation."""


def _grlex(mono):
    # total degree first, then lexicographic on the exponent vector
    return (sum(mono), mono)


def _wrap(txt):
    # parenthesise anything that is not a single atom
    if any(ch in txt for ch in "*+ ") or txt.startswith("-"):
        return f"({txt})"
    return txt


class Ring:
    """Ambient ring with a fixed, ordered tuple of variable names.

    Variables are interned per ring; polynomials from two different rings
    never mix, even when the rings happen to carry the same names.
    """

    __slots__ = ("names", "_index", "_zero_mono")

    def __init__(self, names):
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names!r}")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}
        self._zero_mono = (0,) * len(names)

    @property
    def nvars(self):
        return len(self.names)

    def index(self, var):
        """Resolve a variable name (or id) to its id."""
        if isinstance(var, int):
            if not 0 <= var < len(self.names):
                raise ValueError(f"no variable with id {var}")
            return var
        try:
            return self._index[var]
        except KeyError:
            raise ValueError(f"unknown variable {var!r}") from None

    def const(self, c):
        c = int(c)
        if c == 0:
            return LaurentPoly(self, {})
        return LaurentPoly(self, {self._zero_mono: c})

    def zero(self):
        return LaurentPoly(self, {})

    def one(self):
        return self.const(1)

    def gen(self, i):
        i = self.index(i)
        mono = tuple(1 if j == i else 0 for j in range(len(self.names)))
        return LaurentPoly(self, {mono: 1})

    def var(self, name):
        return self.gen(self.index(name))

    def gens(self):
        return tuple(self.gen(i) for i in range(len(self.names)))

    def monomial(self, exps, coeff=1):
        """Build coeff * prod(v^e) from a sparse {name_or_id: exponent} map."""
        coeff = int(coeff)
        if coeff == 0:
            return self.zero()
        vec = [0] * len(self.names)
        for var, e in exps.items():
            vec[self.index(var)] += int(e)
        return LaurentPoly(self, {tuple(vec): coeff})

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"


class LaurentPoly:
    """Sparse Laurent polynomial: a map from exponent vectors to nonzero ints."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {m: c for m, c in terms.items() if c}
        self._hash = None

    # -- basic structure -------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(m) for m in self.terms)

    def constant_value(self):
        """The integer value of a constant polynomial."""
        if not self.terms:
            return 0
        [(m, c)] = self.terms.items()
        if any(m):
            raise ValueError("not a constant polynomial")
        return c

    def is_monomial(self):
        return len(self.terms) == 1

    def variables(self):
        """Ids of the variables that actually occur."""
        out = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    out.add(i)
        return out

    def min_exponent(self, var):
        i = self.ring.index(var)
        if not self.terms:
            return 0
        return min(m[i] for m in self.terms)

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.ring is not self.ring:
                raise RingMismatch("operands from different ambient rings")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return None

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return LaurentPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return self.ring.zero()
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = terms.get(m, 0) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    del terms[m]
        return LaurentPoly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if self.is_monomial():
                [(m, c)] = self.terms.items()
                if abs(c) == 1:
                    return LaurentPoly(self.ring,
                                       {tuple(e * n for e in m): -1 if (c == -1 and n % 2) else 1})
            raise ValueError("negative powers only for unit monomials")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.ring is not self.ring:
            raise RingMismatch("comparing polynomials from different rings")
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.ring), tuple(sorted(self.terms.items()))))
        return self._hash

    # -- rendering ---------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: _grlex(t[0]), reverse=True)

    def render(self):
        """Canonical text: sorted graded-lex, explicit ^ exponents, * products."""
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = [
                f"{self.ring.names[i]}^{e}" if e != 1 else self.ring.names[i]
                for i, e in enumerate(mono)
                if e
            ]
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not parts:
                parts.append(body if coeff > 0 else "-" + body)
            else:
                parts.append((" + " if coeff > 0 else " - ") + body)
        return "".join(parts)

    def render_fraction(self):
        """Paper-style rendering with a monomial denominator, e.g. (1 + x2)/x1."""
        shift = [min(0, self.min_exponent(i)) for i in range(self.ring.nvars)]
        if not any(shift):
            return self.render()
        num = self * self.ring.monomial({i: -s for i, s in enumerate(shift) if s})
        den = self.ring.monomial({i: -s for i, s in enumerate(shift) if s})
        return f"{_wrap(num.render())}/{_wrap(den.render())}"

    def __repr__(self):
        return f"LaurentPoly({self.render()})"


class RationalExpr:
    """Unreduced quotient of two Laurent polynomials (denominator nonzero).

    Never put in lowest terms; equality is tested by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, LaurentPoly):
            raise TypeError("numerator must be a LaurentPoly")
        if den is None:
            den = num.ring.one()
        if isinstance(den, int):
            den = num.ring.const(den)
        if den.ring is not num.ring:
            raise RingMismatch("numerator and denominator from different rings")
        if den.is_zero():
            raise ZeroPolynomialDivision("zero denominator")
        self.num = num
        self.den = den

    @classmethod
    def of(cls, value, ring):
        if isinstance(value, RationalExpr):
            if value.ring is not ring:
                raise RingMismatch("expression from a different ring")
            return value
        if isinstance(value, LaurentPoly):
            return cls(value)
        if isinstance(value, int):
            return cls(ring.const(value))
        raise TypeError(f"cannot interpret {value!r} as a rational expression")

    @property
    def ring(self):
        return self.num.ring

    def _coerce(self, other):
        if isinstance(other, (LaurentPoly, int)):
            return RationalExpr.of(other, self.ring)
        if isinstance(other, RationalExpr):
            if other.ring is not self.ring:
                raise RingMismatch("operands from different ambient rings")
            return other
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalExpr(self.num * other.den + other.num * self.den,
                            self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalExpr(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroPolynomialDivision("division by zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RationalExpr is unhashable (unreduced representation)")

    def is_integer(self):
        """The integer value, or None when the quotient is not a constant."""
        q = is_laurent(self)
        if q is not None and q.is_constant():
            return q.constant_value()
        return None

    def render(self):
        if self.den == 1:
            return self.num.render()
        return f"{_wrap(self.num.render())}/{_wrap(self.den.render())}"

    def __repr__(self):
        return f"RationalExpr({self.render()})"


# -- exact division --------------------------------------------------------


def _shift_terms(p, full):
    """Shift p by a monomial into the polynomial range.

    With ``full`` true the whole monomial content is stripped (per-variable
    minima become zero); otherwise only negative exponents are cleared.
    Returns (shift, terms) with p == monomial(shift) * terms.
    """
    n = p.ring.nvars
    shift = [None] * n
    for m in p.terms:
        for i in range(n):
            e = m[i]
            if shift[i] is None or e < shift[i]:
                shift[i] = e
    if full:
        shift = tuple(0 if s is None else s for s in shift)
    else:
        shift = tuple(0 if s is None or s > 0 else s for s in shift)
    terms = {tuple(e - s for e, s in zip(m, shift)): c for m, c in p.terms.items()}
    return shift, terms


def _poly_divide(rem, dterms):
    """Leading-term elimination under graded-lex; None when not exact."""
    dlead = max(dterms, key=_grlex)
    dcoeff = dterms[dlead]
    quot = {}
    while rem:
        lead = max(rem, key=_grlex)
        diff = tuple(a - b for a, b in zip(lead, dlead))
        if any(e < 0 for e in diff):
            return None
        c, r = divmod(rem[lead], dcoeff)
        if r:
            return None
        quot[diff] = quot.get(diff, 0) + c
        for m, dc in dterms.items():
            key = tuple(a + b for a, b in zip(diff, m))
            s = rem.get(key, 0) - c * dc
            if s:
                rem[key] = s
            else:
                rem.pop(key, None)
    return quot


def _divide(num, den, full_shift):
    if not isinstance(num, LaurentPoly) or not isinstance(den, LaurentPoly):
        raise TypeError("division wants LaurentPoly operands")
    if den.ring is not num.ring:
        raise RingMismatch("operands from different ambient rings")
    if den.is_zero():
        raise ZeroPolynomialDivision("division by the zero polynomial")
    ring = num.ring
    if num.is_zero():
        return ring.zero()
    shift_n, rem = _shift_terms(num, full_shift)
    shift_d, dterms = _shift_terms(den, full_shift)
    quot = _poly_divide(rem, dterms)
    if quot is None:
        return None
    back = tuple(a - b for a, b in zip(shift_n, shift_d))
    return LaurentPoly(ring, {tuple(a + b for a, b in zip(m, back)): c
                              for m, c in quot.items()})


def exact_divide(num, den):
    """Multivariate exact division: q with num == q * den, else None.

    Both operands are shifted by monomials to clear negative exponents, the
    shifted polynomials are divided by leading-term elimination under the
    graded-lexicographic order, and the result is shifted back.  A quotient
    that would need further denominator monomials is not found here -- e.g.
    (1 + x2 + x1*x3)/x2 is NotDivisible (the constant term obstructs); use
    is_laurent for divisibility in the full Laurent ring.
    """
    return _divide(num, den, full_shift=False)


def laurent_divide(num, den):
    """Division in the Laurent ring: q with num == q * den, or None.

    Unlike exact_divide this also strips the positive monomial content, so a
    monomial denominator always divides: (x1^2 + x2^2)/x3 has the quotient
    x1^2*x3^-1 + x2^2*x3^-1.
    """
    return _divide(num, den, full_shift=True)


def is_laurent(expr):
    """The reduced Laurent polynomial of a quotient, or None if there is none."""
    if isinstance(expr, LaurentPoly):
        return expr
    return laurent_divide(expr.num, expr.den)


# -- substitution and evaluation --------------------------------------------


def substitute(p, assignment, target_ring=None):
    """Apply the ring homomorphism sending each variable of p to its image.

    ``assignment`` maps variable names/ids of p.ring to RationalExpr,
    LaurentPoly or int values over one common target ring.  The result is an
    unreduced RationalExpr whose denominator is built from the assigned
    numerators and denominators; no reduction is performed.
    """
    ring = p.ring
    images = {}
    for var, value in assignment.items():
        images[ring.index(var)] = value
    for value in images.values():
        if isinstance(value, RationalExpr):
            target_ring = value.ring
            break
        if isinstance(value, LaurentPoly):
            target_ring = value.ring
            break
    if target_ring is None:
        raise ValueError("target ring cannot be inferred from constants only")

    used = sorted(p.variables())
    for i in used:
        if i not in images:
            raise UnassignedVariable(ring.names[i])

    pairs = {}
    for i in used:
        img = RationalExpr.of(images[i], target_ring)
        pairs[i] = (img.num, img.den)

    lo = {i: min(0, p.min_exponent(i)) for i in used}
    hi = {i: max(0, max(m[i] for m in p.terms)) for i in used} if p.terms else {}

    # power tables for numerators and denominators
    npow = {}
    dpow = {}
    for i in used:
        span = hi[i] - lo[i]
        nums = [target_ring.one()]
        dens = [target_ring.one()]
        for _ in range(span):
            nums.append(nums[-1] * pairs[i][0])
            dens.append(dens[-1] * pairs[i][1])
        npow[i] = nums
        dpow[i] = dens

    total = target_ring.zero()
    for mono, coeff in p.terms.items():
        term = target_ring.const(coeff)
        for i in used:
            e = mono[i] - lo[i]
            term = term * npow[i][e] * dpow[i][hi[i] - lo[i] - e]
        total = total + term

    den = target_ring.one()
    for i in used:
        den = den * dpow[i][hi[i] - lo[i]]
    num = total
    for i in used:
        if lo[i] < 0:
            num = num * dpow[i][-lo[i]]
            den = den * npow[i][-lo[i]]
    if den.is_zero():
        raise ZeroPolynomialDivision("assignment maps a denominator to zero")
    return RationalExpr(num, den)


def substitute_rational(expr, assignment, target_ring=None):
    """substitute() lifted to quotients; raises on a vanishing denominator."""
    num = substitute(expr.num, assignment, target_ring)
    den = substitute(expr.den, assignment, target_ring if target_ring else num.ring)
    if den.num.is_zero():
        raise ZeroPolynomialDivision("denominator maps to zero")
    return num / den


def evaluate(p, point):
    """Exact rational value of p at an integer (or Fraction) point."""
    ring = p.ring
    values = {ring.index(v): Fraction(val) for v, val in point.items()}
    for i in sorted(p.variables()):
        if i not in values:
            raise UnassignedVariable(ring.names[i])
    total = Fraction(0)
    for mono, coeff in p.terms.items():
        term = Fraction(coeff)
        for i, e in enumerate(mono):
            if not e:
                continue
            v = values[i]
            if v == 0 and e < 0:
                raise UndefinedAtPoint(f"{ring.names[i]}^{e} at 0")
            term *= v ** e
        total += term
    return total


def evaluate_rational(expr, point):
    den = evaluate(expr.den, point)
    if den == 0:
        raise UndefinedAtPoint("denominator vanishes at the point")
    return evaluate(expr.num, point) / den
