"""Exact scalar arithmetic.

Four value types cover everything the engine computes with:

* :class:`LaurentHalf` -- Laurent polynomials in ``q`` with half-integer
  exponents (stored as doubled integers, so all arithmetic is integral).
* :class:`QPoly` / :class:`Rq` -- polynomials and rational functions in
  ``q`` over the rationals.
* :class:`ZPoly` / :class:`Rz` -- polynomials and rational functions in a
  spectral variable ``z`` with coefficients in ``Rq``.
* :class:`MPoly` -- sparse multivariate polynomials in spectral variables
  ``z_1 .. z_t`` (rational coefficients), used by the graded-module layer.

Everything is immutable and canonical: no stored zero coefficients,
rational functions are reduced with monic denominators.
"""

from __future__ import annotations

import re
from fractions import Fraction

# ---------------------------------------------------------------------------
# Laurent polynomials in q^(1/2)
# ---------------------------------------------------------------------------


class LaurentHalf:
    """Laurent polynomial in q^(1/2); exponents are stored doubled."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: dict[int, Fraction] | None = None):
        c = {}
        if coeffs:
            for e2, v in coeffs.items():
                v = Fraction(v)
                if v:
                    c[int(e2)] = v
        self._c = c

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "LaurentHalf":
        return cls()

    @classmethod
    def one(cls) -> "LaurentHalf":
        return cls({0: Fraction(1)})

    @classmethod
    def q(cls, n: int = 1) -> "LaurentHalf":
        """q^n for integer n."""
        return cls({2 * n: Fraction(1)})

    @classmethod
    def q_half(cls, doubled: int) -> "LaurentHalf":
        """q^(doubled/2)."""
        return cls({doubled: Fraction(1)})

    @classmethod
    def const(cls, v) -> "LaurentHalf":
        return cls({0: Fraction(v)})

    # -- inspection ---------------------------------------------------
    def items(self):
        """(doubled exponent, coefficient) pairs, highest exponent first."""
        return sorted(self._c.items(), key=lambda t: -t[0])

    def coeff(self, doubled: int) -> Fraction:
        return self._c.get(doubled, Fraction(0))

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def integer_exponents(self) -> bool:
        return all(e2 % 2 == 0 for e2 in self._c)

    def min_exp2(self) -> int:
        return min(self._c) if self._c else 0

    def max_exp2(self) -> int:
        return max(self._c) if self._c else 0

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "LaurentHalf") -> "LaurentHalf":
        c = dict(self._c)
        for e2, v in other._c.items():
            w = c.get(e2, Fraction(0)) + v
            if w:
                c[e2] = w
            else:
                c.pop(e2, None)
        out = LaurentHalf()
        out._c = c
        return out

    def __neg__(self) -> "LaurentHalf":
        out = LaurentHalf()
        out._c = {e2: -v for e2, v in self._c.items()}
        return out

    def __sub__(self, other: "LaurentHalf") -> "LaurentHalf":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentHalf.const(other)
        c: dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                w = c.get(e, Fraction(0)) + v1 * v2
                if w:
                    c[e] = w
                else:
                    c.pop(e, None)
        out = LaurentHalf()
        out._c = c
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentHalf":
        if n < 0:
            raise ValueError("negative power of a Laurent polynomial")
        out = LaurentHalf.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, doubled: int) -> "LaurentHalf":
        """Multiply by q^(doubled/2)."""
        out = LaurentHalf()
        out._c = {e2 + doubled: v for e2, v in self._c.items()}
        return out

    def bar(self) -> "LaurentHalf":
        """The bar involution q -> q^(-1)."""
        out = LaurentHalf()
        out._c = {-e2: v for e2, v in self._c.items()}
        return out

    def at_one(self) -> Fraction:
        """Evaluate at q = 1."""
        return sum(self._c.values(), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentHalf.const(other)
        if not isinstance(other, LaurentHalf):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self) -> str:
        return f"LaurentHalf({laurent_to_text(self)!r})"


def quantum_integer(n: int) -> LaurentHalf:
    """[n] = (q^n - q^-n)/(q - q^-1) = q^(n-1) + q^(n-3) + ... + q^(1-n)."""
    if n == 0:
        return LaurentHalf.zero()
    if n < 0:
        return -quantum_integer(-n)
    return LaurentHalf({2 * (n - 1 - 2 * k): Fraction(1) for k in range(n)})


def quantum_factorial(n: int) -> LaurentHalf:
    out = LaurentHalf.one()
    for k in range(2, n + 1):
        out = out * quantum_integer(k)
    return out


# ---------------------------------------------------------------------------
# Dense univariate polynomials and rational functions
# ---------------------------------------------------------------------------


class _Poly:
    """Dense univariate polynomial over a field (subclasses fix the field)."""

    __slots__ = ("c",)
    VAR = "x"
    FZERO: object = None
    FONE: object = None

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, v):
        return cls((v,))

    @classmethod
    def gen(cls):
        return cls((cls.FZERO, cls.FONE))

    @classmethod
    def monomial(cls, coeff, n: int):
        return cls((cls.FZERO,) * n + (coeff,))

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def lc(self):
        return self.c[-1] if self.c else self.FZERO

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = type(self).const(self.FONE * other)
        if not isinstance(other, _Poly):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        if isinstance(other, int):
            other = type(self).const(self.FONE * other)
        n = max(len(self.c), len(other.c))
        a = list(self.c) + [self.FZERO] * (n - len(self.c))
        for i, v in enumerate(other.c):
            a[i] = a[i] + v
        return type(self)(a)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(tuple(-v for v in self.c))

    def __sub__(self, other):
        if isinstance(other, int):
            other = type(self).const(self.FONE * other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            other = type(self).const(self.FONE * other)
        if not isinstance(other, _Poly):
            # scalar from the coefficient field
            return type(self)(tuple(v * other for v in self.c))
        if not self.c or not other.c:
            return type(self)()
        out = [self.FZERO] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(other.c):
                if b:
                    out[i + j] = out[i + j] + a * b
        return type(self)(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = type(self).const(self.FONE)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other):
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        q = [self.FZERO] * max(0, len(self.c) - len(other.c) + 1)
        r = list(self.c)
        dlc = other.lc()
        dd = other.degree()
        while len(r) - 1 >= dd and any(bool(v) for v in r):
            while r and not r[-1]:
                r.pop()
            if len(r) - 1 < dd:
                break
            k = len(r) - 1 - dd
            f = r[-1] / dlc
            q[k] = f
            for i, v in enumerate(other.c):
                r[k + i] = r[k + i] - f * v
            r.pop()
        return type(self)(q), type(self)(r)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self):
        if not self.c:
            return self
        inv = self.FONE / self.lc()
        return type(self)(tuple(v * inv for v in self.c))

    def gcd(self, other):
        a, b = self, other
        while b.c:
            a, b = b, a % b
            b = b.monic() if b.c else b
        return a.monic()

    def shift_var(self, k: int):
        """Multiply by var^k (k >= 0)."""
        if not self.c:
            return self
        return type(self)((self.FZERO,) * k + self.c)

    def eval(self, x):
        """Evaluate by Horner; x from the coefficient field (or richer)."""
        out = self.FZERO
        for v in reversed(self.c):
            out = out * x + v
        return out

    def derivative(self):
        return type(self)(tuple(v * k for k, v in enumerate(self.c) if k))

    def __repr__(self):
        return f"{type(self).__name__}({poly_to_text(self)!r})"


class QPoly(_Poly):
    VAR = "q"
    FZERO = Fraction(0)
    FONE = Fraction(1)


class _RatFunc:
    """Reduced fraction of two polynomials; denominator monic."""

    __slots__ = ("num", "den")
    POLY: type = _Poly

    def __init__(self, num=None, den=None):
        P = type(self).POLY
        if num is None:
            num = P()
        if isinstance(num, int):
            num = P.const(P.FONE * num)
        if den is None:
            den = P.const(P.FONE)
        if isinstance(den, int):
            den = P.const(P.FONE * den)
        if not den.c:
            raise ZeroDivisionError("zero denominator")
        if not num.c:
            self.num, self.den = P(), P.const(P.FONE)
            return
        g = num.gcd(den)
        if g.degree() > 0:
            num = num // g
            den = den // g
        lead = den.lc()
        if lead != P.FONE:
            inv = P.FONE / lead
            num = num * inv
            den = den * inv
        self.num, self.den = num, den

    @classmethod
    def from_poly(cls, p):
        return cls(p)

    def is_zero(self) -> bool:
        return not self.num.c

    def __bool__(self) -> bool:
        return bool(self.num.c)

    def is_poly(self) -> bool:
        return self.den.degree() == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = type(self)(other)
        if not isinstance(other, _RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        if isinstance(other, int):
            other = type(self)(other)
        return type(self)(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(type(self))
        out.num, out.den = -self.num, self.den
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = type(self)(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            other = type(self)(other)
        if not isinstance(other, _RatFunc):
            return NotImplemented
        return type(self)(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            other = type(self)(other)
        if not other.num.c:
            raise ZeroDivisionError("division by zero rational function")
        return type(self)(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        if isinstance(other, int):
            other = type(self)(other)
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return (type(self)(1) / self) ** (-n)
        out = type(self)(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return f"{type(self).__name__}({ratfunc_to_text(self)!r})"


class Rq(_RatFunc):
    """Rational functions in q over the rationals: the base field k."""

    POLY = QPoly

    @classmethod
    def q_power(cls, n: int) -> "Rq":
        if n >= 0:
            return cls(QPoly.monomial(Fraction(1), n))
        return cls(QPoly.const(Fraction(1)), QPoly.monomial(Fraction(1), -n))

    @classmethod
    def minus_q_power(cls, n: int) -> "Rq":
        """(-q)^n."""
        s = cls.q_power(n)
        return s if n % 2 == 0 else -s

    @classmethod
    def from_laurent(cls, l: LaurentHalf) -> "Rq":
        if not l.integer_exponents():
            raise ValueError("half-integer q-power does not live in Q(q)")
        out = cls(0)
        for e2, v in l.items():
            out = out + cls.q_power(e2 // 2) * cls(QPoly.const(v))
        return out


Rq.ZERO = Rq(0)
Rq.ONE = Rq(1)


class ZPoly(_Poly):
    VAR = "z"
    FZERO = Rq.ZERO
    FONE = Rq.ONE


class Rz(_RatFunc):
    """Rational functions in z over Rq."""

    POLY = ZPoly


Rz.ZERO = Rz(0)
Rz.ONE = Rz(1)


def zpoly_linear_factors(p: ZPoly, max_abs_exp: int = 40):
    """Split off roots of the form c = (sign) q^r.

    Returns (factors, remainder) with ``factors`` a list of roots (Rq, with
    multiplicity as repeats) so that p = lc * prod (z - root) * remainder.
    Only roots in the multiplicative set {± q^r} are searched.
    """
    factors: list[Rq] = []
    rem = p.monic()
    progress = True
    while rem.degree() > 0 and progress:
        progress = False
        for r in range(-max_abs_exp, max_abs_exp + 1):
            for sign in (1, -1):
                root = Rq.q_power(r) if sign == 1 else -Rq.q_power(r)
                if not rem.eval(root):
                    factors.append(root)
                    rem = (rem // ZPoly((-root, Rq.ONE))).monic()
                    progress = True
                    break
            if progress:
                break
    return factors, rem


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials in spectral variables
# ---------------------------------------------------------------------------


class MPoly:
    """Sparse polynomial in ``nvars`` variables; coefficients Fraction."""

    __slots__ = ("nvars", "_t")

    def __init__(self, nvars: int, terms: dict[tuple, Fraction] | None = None):
        self.nvars = nvars
        t = {}
        if terms:
            for ex, v in terms.items():
                v = Fraction(v)
                if v:
                    if len(ex) != nvars:
                        raise ValueError("exponent arity mismatch")
                    t[tuple(int(e) for e in ex)] = v
        self._t = t

    @classmethod
    def const(cls, nvars: int, v) -> "MPoly":
        return cls(nvars, {(0,) * nvars: Fraction(v)})

    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls(nvars)

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        ex = [0] * nvars
        ex[i] = 1
        return cls(nvars, {tuple(ex): Fraction(1)})

    def items(self):
        return sorted(self._t.items())

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in ex) for ex in self._t)

    def constant_term(self) -> Fraction:
        return self._t.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Max total exponent degree; -1 for zero."""
        if not self._t:
            return -1
        return max(sum(ex) for ex in self._t)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.nvars, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._t == other._t

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.nvars, other)
        t = dict(self._t)
        for ex, v in other._t.items():
            w = t.get(ex, Fraction(0)) + v
            if w:
                t[ex] = w
            else:
                t.pop(ex, None)
        out = MPoly(self.nvars)
        out._t = t
        return out

    __radd__ = __add__

    def __neg__(self):
        out = MPoly(self.nvars)
        out._t = {ex: -v for ex, v in self._t.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            out = MPoly(self.nvars)
            f = Fraction(other)
            if f:
                out._t = {ex: v * f for ex, v in self._t.items()}
            return out
        t: dict[tuple, Fraction] = {}
        for e1, v1 in self._t.items():
            for e2, v2 in other._t.items():
                ex = tuple(a + b for a, b in zip(e1, e2))
                w = t.get(ex, Fraction(0)) + v1 * v2
                if w:
                    t[ex] = w
                else:
                    t.pop(ex, None)
        out = MPoly(self.nvars)
        out._t = t
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def substitute(self, values: dict[int, "MPoly | Fraction | int"]) -> "MPoly":
        """Substitute variables by polynomials (indices not substituted stay)."""
        out = MPoly.zero(self.nvars)
        for ex, v in self._t.items():
            term = MPoly.const(self.nvars, v)
            for i, e in enumerate(ex):
                if e == 0:
                    continue
                if i in values:
                    val = values[i]
                    if isinstance(val, (int, Fraction)):
                        val = MPoly.const(self.nvars, val)
                    term = term * val ** e
                else:
                    term = term * MPoly.var(self.nvars, i) ** e
            out = out + term
        return out

    def drop_vars(self, keep: tuple[int, ...]) -> "MPoly":
        """Project onto the listed variables (others must not occur)."""
        t = {}
        for ex, v in self._t.items():
            for i, e in enumerate(ex):
                if e and i not in keep:
                    raise ValueError("variable still present")
            t[tuple(ex[i] for i in keep)] = v
        return MPoly(len(keep), t)

    def extend_vars(self, nvars: int, position: tuple[int, ...]) -> "MPoly":
        """Re-embed into a larger variable set; position[i] = new index of var i."""
        t = {}
        for ex, v in self._t.items():
            new = [0] * nvars
            for i, e in enumerate(ex):
                new[position[i]] = e
            t[tuple(new)] = v
        return MPoly(nvars, t)

    def __repr__(self):
        names = tuple(f"z{i+1}" for i in range(self.nvars))
        return f"MPoly({mpoly_to_text(self, names)!r})"


INFINITE_ORDER = float("inf")


def vanishing_order(p: MPoly, i: int = 0, j: int = 1):
    """Largest s with (z_j - z_i)^s dividing p; INFINITE_ORDER for p = 0.

    Computed by rewriting p in coordinates (z_i, w = z_j - z_i) and taking
    the minimal w-degree.
    """
    if p.is_zero():
        return INFINITE_ORDER
    # substitute z_j = z_i + w, where w reuses slot j
    zi = MPoly.var(p.nvars, i)
    w = MPoly.var(p.nvars, j)
    q = p.substitute({j: zi + w})
    return min(ex[j] for ex in q._t)


def divide_and_evaluate(p: MPoly, s: int, i: int = 0, j: int = 1) -> Fraction:
    """Constant term at all-zero of p / (z_j - z_i)^s; errors if not divisible."""
    if p.is_zero():
        return Fraction(0)
    zi = MPoly.var(p.nvars, i)
    w = MPoly.var(p.nvars, j)
    q = p.substitute({j: zi + w})
    if any(ex[j] < s for ex in q._t):
        raise ValueError(f"(z'-z)^{s} does not divide the polynomial")
    const = Fraction(0)
    for ex, v in q._t.items():
        if ex[j] == s and all(e == 0 for k, e in enumerate(ex) if k != j):
            const += v
    return const


def mpoly_divide_order(p: MPoly, s: int, i: int = 0, j: int = 1) -> MPoly:
    """Exact division p / (z_j - z_i)^s as an MPoly."""
    if p.is_zero():
        return p
    zi = MPoly.var(p.nvars, i)
    w = MPoly.var(p.nvars, j)
    q = p.substitute({j: zi + w})
    t = {}
    for ex, v in q._t.items():
        if ex[j] < s:
            raise ValueError(f"(z'-z)^{s} does not divide the polynomial")
        ex2 = list(ex)
        ex2[j] -= s
        t[tuple(ex2)] = v
    shifted = MPoly(p.nvars, t)
    # substitute back w = z_j - z_i
    zj = MPoly.var(p.nvars, j)
    return shifted.substitute({j: zj - zi})


# ---------------------------------------------------------------------------
# Canonical text rendering
# ---------------------------------------------------------------------------


def _coeff_text(v: Fraction) -> str:
    return str(v)


def _term_text(coeff: Fraction, varpart: str) -> str:
    if not varpart:
        return _coeff_text(coeff)
    if coeff == 1:
        return varpart
    if coeff == -1:
        return "-" + varpart
    return _coeff_text(coeff) + "*" + varpart


def _join_terms(terms: list[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        if t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


def _q_power_text(e2: int) -> str:
    """Render q^(e2/2); empty string for e2 == 0."""
    if e2 == 0:
        return ""
    if e2 == 2:
        return "q"
    if e2 % 2 == 0:
        return f"q^{e2 // 2}"
    return f"q^({e2}/2)"


def laurent_to_text(l: LaurentHalf) -> str:
    terms = [_term_text(v, _q_power_text(e2)) for e2, v in l.items()]
    return _join_terms(terms)


def poly_to_text(p: _Poly) -> str:
    """Render a univariate polynomial (coefficients rendered recursively)."""
    terms = []
    for k in range(p.degree(), -1, -1):
        v = p.c[k]
        if not v:
            continue
        varpart = "" if k == 0 else (p.VAR if k == 1 else f"{p.VAR}^{k}")
        if isinstance(v, Fraction):
            terms.append(_term_text(v, varpart))
        else:
            # coefficient from a richer field: parenthesize unless trivial
            if v == 1 and varpart:
                terms.append(varpart)
            elif v == -1 and varpart:
                terms.append("-" + varpart)
            else:
                vt = ratfunc_to_text(v) if isinstance(v, _RatFunc) else str(v)
                if varpart:
                    terms.append(f"({vt})*{varpart}")
                else:
                    simple = re.fullmatch(r"-?[0-9/]+|-?q(\^[-0-9()/]+)?", vt)
                    terms.append(vt if simple else f"({vt})")
    return _join_terms(terms)


def ratfunc_to_text(r: _RatFunc) -> str:
    if r.den.degree() == 0 and r.den.lc() == r.den.FONE:
        return poly_to_text(r.num)
    return f"({poly_to_text(r.num)})/({poly_to_text(r.den)})"


def mpoly_to_text(p: MPoly, names: tuple[str, ...]) -> str:
    terms = []
    for ex, v in sorted(p._t.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0]))):
        parts = []
        for i, e in enumerate(ex):
            if e == 1:
                parts.append(names[i])
            elif e > 1:
                parts.append(f"{names[i]}^{e}")
        terms.append(_term_text(v, "*".join(parts)))
    return _join_terms(terms)


def zpoly_to_text(p: ZPoly, factored: bool = True) -> str:
    """Canonical text of a monic z-polynomial, factored over {± q^r} roots."""
    if not factored:
        return poly_to_text(p)
    factors, rem = zpoly_linear_factors(p)
    if not factors:
        return poly_to_text(p)
    pieces = []
    for root in factors:
        t = poly_to_text(ZPoly((-root, Rq.ONE)))
        pieces.append(t)
    if rem.degree() > 0:
        pieces.append(poly_to_text(rem))
    if len(pieces) == 1:
        return pieces[0]
    return "*".join(f"({t})" for t in pieces)


# ---------------------------------------------------------------------------
# Parser for the same grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<frac>\d+/\d+)|(?P<int>\d+)|(?P<sym>[qz])|"
    r"(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize {text[pos:]!r}")
        pos = m.end()
        if m.group("frac"):
            a, b = m.group("frac").split("/")
            out.append(("num", Fraction(int(a), int(b))))
        elif m.group("int"):
            out.append(("num", Fraction(m.group("int"))))
        elif m.group("sym"):
            out.append(("sym", m.group("sym")))
        else:
            out.append(("op", m.group("op")))
    out.append(("end", ""))
    return out


class _ExprParser:
    """Recursive-descent parser producing a ZPoly-over-LaurentHalf pair.

    Values are represented as dict {z-exponent: LaurentHalf}; the public
    wrappers convert to the concrete target types.
    """

    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self):
        v = self.expr()
        if self.peek()[0] != "end":
            raise ValueError("trailing input")
        return v

    def expr(self):
        kind, val = self.peek()
        neg = False
        if kind == "op" and val in "+-":
            self.next()
            neg = val == "-"
        v = self.term()
        if neg:
            v = _zl_neg(v)
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                w = self.term()
                v = _zl_add(v, _zl_neg(w) if val == "-" else w)
            else:
                return v

    def term(self):
        v = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.next()
                v = _zl_mul(v, self.factor())
            elif kind in ("num", "sym") or (kind == "op" and val == "("):
                # implicit product (e.g. "(z - q)(z + q)")
                v = _zl_mul(v, self.factor())
            else:
                return v

    def factor(self):
        kind, val = self.next()
        if kind == "num":
            base = {0: LaurentHalf.const(val)}
        elif kind == "sym":
            if val == "q":
                base = {0: LaurentHalf.q()}
            else:
                base = {1: LaurentHalf.one()}
        elif kind == "op" and val == "(":
            base = self.expr()
            k2, v2 = self.next()
            if not (k2 == "op" and v2 == ")"):
                raise ValueError("expected )")
        elif kind == "op" and val == "-":
            return _zl_neg(self.factor())
        else:
            raise ValueError(f"unexpected token {val!r}")
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.next()
            e2 = self.exponent()  # doubled
            base = _zl_pow_half(base, e2)
        return base

    def exponent(self) -> int:
        """Parse an exponent, returned doubled (integers or halves)."""
        kind, val = self.next()
        neg = False
        paren = False
        if kind == "op" and val == "(":
            paren = True
            kind, val = self.next()
        if kind == "op" and val == "-":
            neg = True
            kind, val = self.next()
        if kind != "num":
            raise ValueError("malformed exponent")
        if val.denominator == 1:
            e2 = 2 * val.numerator
        elif val.denominator == 2:
            e2 = val.numerator
        else:
            raise ValueError("only half-integer exponents supported")
        if paren:
            k2, v2 = self.next()
            if not (k2 == "op" and v2 == ")"):
                raise ValueError("expected ) after exponent")
        return -e2 if neg else e2


def _zl_neg(v):
    return {k: -l for k, l in v.items()}


def _zl_add(a, b):
    out = dict(a)
    for k, l in b.items():
        s = out.get(k, LaurentHalf.zero()) + l
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _zl_mul(a, b):
    out: dict[int, LaurentHalf] = {}
    for k1, l1 in a.items():
        for k2, l2 in b.items():
            k = k1 + k2
            s = out.get(k, LaurentHalf.zero()) + l1 * l2
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def _zl_pow_half(v, e2: int):
    """Raise to the e2/2 power; only q alone may carry half exponents."""
    if e2 % 2 == 0:
        n = e2 // 2
        if n < 0:
            # negative powers only for q-monomials with unit coefficient
            if list(v.keys()) != [0] or len(v[0]._c) != 1:
                raise ValueError("negative power of a non-monomial")
            (exp2, coeff), = v[0]._c.items()
            if coeff not in (1, -1):
                raise ValueError("negative power of a non-unit")
            sign = Fraction(1) if (coeff == 1 or n % 2 == 0) else Fraction(-1)
            return {0: LaurentHalf({exp2 * n: sign})}
        out = {0: LaurentHalf.one()}
        for _ in range(n):
            out = _zl_mul(out, v)
        return out
    # genuine half power: allowed only for the bare symbol q
    if list(v.keys()) == [0] and v[0] == LaurentHalf.q():
        return {0: LaurentHalf.q_half(e2)}
    raise ValueError("half-integer exponent only allowed on q")


def _parse_zl(text: str):
    return _ExprParser(_tokenize(text)).parse()


def laurent_from_text(text: str) -> LaurentHalf:
    v = _parse_zl(text)
    if any(k != 0 for k in v):
        raise ValueError("z is not allowed in a q-Laurent polynomial")
    return v.get(0, LaurentHalf.zero())


def zpoly_from_text(text: str) -> ZPoly:
    v = _parse_zl(text)
    if not v:
        return ZPoly()
    deg = max(v)
    coeffs = []
    for k in range(deg + 1):
        l = v.get(k, LaurentHalf.zero())
        coeffs.append(Rq.from_laurent(l))
    return ZPoly(coeffs)


def rq_from_text(text: str) -> Rq:
    return Rq.from_laurent(laurent_from_text(text))
