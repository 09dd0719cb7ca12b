"""Exact scalars and polynomial-exponential functions.

Everything here is immutable.  Scalars live in Q(i) and are backed by
``gmpy2.mpq``; functions of ``x`` are finite sums ``sum p_l(x) exp(l*x)``
kept in a canonical sorted form so that ``==`` is functional equality.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from gmpy2 import lcm, mpq
from flint import fmpq, fmpq_poly

__all__ = [
    "GaussianRational", "GQ", "Poly", "PolyExp", "Den", "RatExp",
    "ExpLattice", "exponent_lattice", "polyexp_exact_divide", "try_divide",
    "polyexp_eval", "NotDivisible", "NotPolyExp",
]

_Q0 = mpq(0)
_Q1 = mpq(1)


class NotDivisible(ArithmeticError):
    """The quotient does not lie in the polynomial-exponential ring."""


class NotPolyExp(ValueError):
    """A rational-exponential value could not be certified polynomial-exponential."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussianRational:
    """An element ``re + im*i`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + mpq(im)
        elif isinstance(re, complex):
            re, im = re.real, re.imag + im
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def coerce(v) -> "GaussianRational":
        if isinstance(v, GaussianRational):
            return v
        return GaussianRational(v)

    def key(self):
        return (self.re, self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self):
        return not self.im

    def is_integer(self):
        return not self.im and self.re.denominator == 1

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction, type(_Q0))):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __lt__(self, other):
        return self.key() < GQ.coerce(other).key()

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational(other)
        return _gq(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational(other)
        return _gq(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational(other) - self

    def __neg__(self):
        return _gq(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational(other)
        if not self.im and not other.im:
            return _gq(self.re * other.re, _Q0)
        return _gq(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def inverse(self):
        if not self.im:
            return _gq(_Q1 / self.re, _Q0)
        n = self.re * self.re + self.im * self.im
        return _gq(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational(other)
        if not other:
            raise ZeroDivisionError("division by zero in Q(i)")
        if not other.im:
            return _gq(self.re / other.re, self.im / other.re)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = _gq(_Q1, _Q0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return _gq(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_text(self) -> str:
        """Render in the ``a/b+c/d*i`` grammar."""
        if not self.im:
            return str(self.re)
        if self.im == 1:
            ims = "i"
        elif self.im == -1:
            ims = "-i"
        else:
            ims = f"{self.im}*i"
        if not self.re:
            return ims
        return f"{self.re}{ims}" if ims.startswith("-") else f"{self.re}+{ims}"

    def to_latex(self) -> str:
        def q(v):
            if v.denominator == 1:
                return str(v.numerator)
            sign = "-" if v < 0 else ""
            return f"{sign}\\frac{{{abs(v.numerator)}}}{{{v.denominator}}}"
        if not self.im:
            return q(self.re)
        ims = "i" if self.im == 1 else "-i" if self.im == -1 else q(self.im) + "i"
        if not self.re:
            return ims
        return q(self.re) + (ims if ims.startswith("-") else "+" + ims)

    def needs_parens(self) -> bool:
        """True when the rendered form is not a single signed factor."""
        return bool(self.re) and bool(self.im)

    def __repr__(self):
        return f"GQ({self.to_text()})"

    __str__ = to_text


GQ = GaussianRational


def _gq(re, im) -> GaussianRational:
    g = object.__new__(GaussianRational)
    g.re = re
    g.im = im
    return g


ZERO = _gq(_Q0, _Q0)
ONE = _gq(_Q1, _Q0)


# ---------------------------------------------------------------------------
# Univariate polynomials over Q(i)
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial; ``c[k]`` is the coefficient of degree k."""

    __slots__ = ("c", "_hash")

    def __init__(self, coeffs=()):
        c = [GQ.coerce(v) for v in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, c: list) -> "Poly":
        while c and not c[-1]:
            c.pop()
        p = object.__new__(cls)
        p.c = tuple(c)
        p._hash = None
        return p

    @classmethod
    def const(cls, v) -> "Poly":
        return cls((v,))

    @classmethod
    def var(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, k: int, v=1) -> "Poly":
        return cls([0] * k + [v])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def lc(self):
        return self.c[-1]

    def low_degree(self) -> int:
        for k, v in enumerate(self.c):
            if v:
                return k
        return -1

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, (int, GaussianRational)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, v in enumerate(b):
            out[k] = out[k] + v
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([-v for v in self.c])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self.c, other.c
        if not a or not b:
            return Poly._raw([])
        if len(a) * len(b) > _FLINT_CUTOFF:
            return _flint_mul(self, other)
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if not u:
                continue
            for j, v in enumerate(b):
                if v:
                    out[i + j] = out[i + j] + u * v
        return Poly._raw(out)

    __rmul__ = __mul__

    def scale(self, v) -> "Poly":
        v = GQ.coerce(v)
        if not v:
            return Poly._raw([])
        if v == ONE:
            return self
        return Poly._raw([u * v for u in self.c])

    def shift_degree(self, k: int) -> "Poly":
        """Multiply by ``var**k``."""
        if not self.c:
            return self
        return Poly._raw([ZERO] * k + list(self.c))

    def __pow__(self, k: int):
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derive(self) -> "Poly":
        return Poly._raw([v * k for k, v in enumerate(self.c) if k])

    def __call__(self, v):
        """Exact evaluation by Horner's rule."""
        v = GQ.coerce(v)
        acc = ZERO
        for u in reversed(self.c):
            acc = acc * v + u
        return acc

    def evalf(self, v: complex) -> complex:
        acc = 0j
        for u in reversed(self.c):
            acc = acc * v + complex(u)
        return acc

    def shift(self, lam) -> "Poly":
        """Return ``p(var + lam)``."""
        lam = GQ.coerce(lam)
        if not lam or len(self.c) < 2:
            return self
        c = list(self.c)
        n = len(c)
        # Taylor shift by repeated synthetic division
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                c[k] = c[k] + lam * c[k + 1]
        return Poly._raw(c)

    def divmod(self, other: "Poly"):
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        db = other.degree
        if len(r) - 1 < db:
            return Poly._raw([]), self
        if db > 0 and (len(r) - db) * db > _FLINT_CUTOFF:
            q, rem = _cdivmod(_pair(self), _pair(other))
            return _from_flint(*q), _from_flint(*rem)
        inv = other.lc().inverse()
        q = [ZERO] * (len(r) - db)
        for k in range(len(r) - 1, db - 1, -1):
            t = r[k] * inv
            if not t:
                continue
            q[k - db] = t
            for j, v in enumerate(other.c):
                r[k - db + j] = r[k - db + j] - t * v
        return Poly._raw(q), Poly._raw(r[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def is_real(self) -> bool:
        return all(not v.im for v in self.c)

    def monic(self) -> "Poly":
        if not self.c or self.c[-1] == ONE:
            return self
        return self.scale(self.c[-1].inverse())

    def gcd(self, other: "Poly") -> "Poly":
        """Monic gcd; integer heuristic gcd for real inputs, Euclid otherwise."""
        if not self.c:
            return other.monic()
        if not other.c:
            return self.monic()
        if len(self.c) == 1 or len(other.c) == 1:
            return Poly._raw([ONE])
        if self.is_real() and other.is_real():
            return _from_flint(_to_flint(self, False).gcd(_to_flint(other, False))).monic()
        return _from_flint(*_cgcd(_pair(self), _pair(other)))

    def lcm(self, other: "Poly") -> "Poly":
        if not self.c or not other.c:
            return Poly._raw([])
        return (self * other.divmod(self.gcd(other))[0]).monic()

    def sort_key(self):
        return tuple(v.key() for v in self.c)

    def roots(self):
        import numpy as np
        if self.degree < 1:
            return []
        return list(np.roots([complex(v) for v in reversed(self.c)]))

    # -- rendering ---------------------------------------------------------

    def to_text(self, var: str = "x", descending: bool = False, spaced: bool = True) -> str:
        if not self.c:
            return "0"
        order = range(self.degree, -1, -1) if descending else range(len(self.c))
        parts = []
        for k in order:
            v = self.c[k]
            if not v:
                continue
            parts.append(_monomial_text(v, var, k))
        return _join_signed(parts, spaced)

    def to_latex(self, var: str = "x", descending: bool = True) -> str:
        if not self.c:
            return "0"
        order = range(self.degree, -1, -1) if descending else range(len(self.c))
        parts = []
        for k in order:
            v = self.c[k]
            if not v:
                continue
            mono = "" if k == 0 else var if k == 1 else f"{var}^{{{k}}}"
            parts.append(_coeff_latex(v, mono))
        return _join_signed(parts, False)

    def __repr__(self):
        return f"Poly({self.to_text()})"


# Large products and real divisions go through FLINT; the (re, im) parts
# of a Gaussian-rational polynomial are handled as two rational polynomials.
_FLINT_CUTOFF = 64


def _to_flint(p: Poly, imag: bool) -> fmpq_poly:
    vals = [v.im for v in p.c] if imag else [v.re for v in p.c]
    den = 1
    for q in vals:
        d = q.denominator
        if d != 1:
            den = lcm(den, d)
    if den == 1:
        return fmpq_poly([int(q) for q in vals])
    return fmpq_poly([int(q * den) for q in vals], int(den))


def _flint_rationals(f: fmpq_poly) -> list:
    den = int(f.denom())
    if den == 1:
        return [mpq(int(c)) for c in f.numer().coeffs()]
    return [mpq(int(c), den) for c in f.numer().coeffs()]


def _from_flint(re: fmpq_poly, im: fmpq_poly | None = None) -> Poly:
    rc = _flint_rationals(re)
    ic = _flint_rationals(im) if im is not None else []
    n = max(len(rc), len(ic))
    if len(rc) < n:
        rc += [_Q0] * (n - len(rc))
    if len(ic) < n:
        ic += [_Q0] * (n - len(ic))
    return Poly._raw([_gq(a, b) for a, b in zip(rc, ic)])


def _flint_mul(a: Poly, b: Poly) -> Poly:
    ar, br = _to_flint(a, False), _to_flint(b, False)
    areal, breal = a.is_real(), b.is_real()
    if areal and breal:
        return _from_flint(ar * br)
    ai = _to_flint(a, True) if not areal else fmpq_poly(0)
    bi = _to_flint(b, True) if not breal else fmpq_poly(0)
    return _from_flint(ar * br - ai * bi, ar * bi + ai * br)


def _pair(p: Poly):
    return _to_flint(p, False), _to_flint(p, True)


def _pdeg(a) -> int:
    return max(a[0].degree(), a[1].degree())


def _cdivmod(a, b):
    """Division of ``(re, im)`` pairs; ``b b-bar`` is a real divisor of the same quotient."""
    br, bi = b
    ar, ai = a
    norm = br * br + bi * bi
    qr = (ar * br + ai * bi) // norm
    qi = (ai * br - ar * bi) // norm
    rr = ar - (qr * br - qi * bi)
    ri = ai - (qr * bi + qi * br)
    return (qr, qi), (rr, ri)


def _cmonic(a):
    d = _pdeg(a)
    u, v = a[0][d], a[1][d]
    n = u * u + v * v
    c, s = u / n, -v / n
    return a[0] * c - a[1] * s, a[0] * s + a[1] * c


def _cgcd(a, b):
    """Monic gcd over Q(i) by Euclid on normalized remainders."""
    a, b = _cmonic(a), _cmonic(b)
    while _pdeg(b) >= 0:
        r = _cdivmod(a, b)[1]
        a, b = b, (_cmonic(r) if _pdeg(r) >= 0 else r)
    return a

def _monomial_text(v: GaussianRational, var: str, k: int) -> str:
    mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
    if not mono:
        s = v.to_text()
        return f"({s})" if v.needs_parens() else s
    if v == ONE:
        return mono
    if v == -ONE:
        return "-" + mono
    s = v.to_text()
    return f"({s})*{mono}" if v.needs_parens() else f"{s}*{mono}"


def _coeff_latex(v: GaussianRational, mono: str) -> str:
    if not mono:
        s = v.to_latex()
        return f"({s})" if v.needs_parens() else s
    if v == ONE:
        return mono
    if v == -ONE:
        return "-" + mono
    s = v.to_latex()
    return f"({s}){mono}" if v.needs_parens() else f"{s}{mono}"


def _join_signed(parts, spaced: bool) -> str:
    plus, minus = (" + ", " - ") if spaced else ("+", "-")
    out = parts[0]
    for p in parts[1:]:
        out += minus + p[1:] if p.startswith("-") else plus + p
    return out


# ---------------------------------------------------------------------------
# Polynomial-exponential functions
# ---------------------------------------------------------------------------

class PolyExp:
    """``sum p_l(x) exp(l*x)`` with distinct exponents, sorted by ``(re, im)``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            terms = terms.items()
        acc: dict = {}
        for lam, p in terms:
            lam = GQ.coerce(lam)
            if not isinstance(p, Poly):
                p = Poly.const(p)
            acc[lam] = acc[lam] + p if lam in acc else p
        self.terms = _canon(acc)
        self._hash = None

    @classmethod
    def _from_dict(cls, acc: dict) -> "PolyExp":
        f = object.__new__(cls)
        f.terms = _canon(acc)
        f._hash = None
        return f

    @classmethod
    def const(cls, v) -> "PolyExp":
        return cls([(ZERO, Poly.const(v))])

    @classmethod
    def x(cls) -> "PolyExp":
        return cls([(ZERO, Poly.var())])

    @classmethod
    def exp(cls, lam) -> "PolyExp":
        return cls([(lam, Poly.const(1))])

    @classmethod
    def from_poly(cls, p: Poly) -> "PolyExp":
        return cls([(ZERO, p)])

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def exponents(self):
        return [lam for lam, _ in self.terms]

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_scalar(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0]
                                  and self.terms[0][1].degree == 0)

    def scalar(self):
        if not self.terms:
            return ZERO
        if not self.is_scalar():
            raise ValueError("not a scalar")
        return self.terms[0][1].c[0]

    def is_monomial(self) -> bool:
        """A single term ``c*x^k*exp(l*x)``."""
        if len(self.terms) != 1:
            return False
        p = self.terms[0][1]
        return sum(1 for v in p.c if v) == 1

    def is_unit(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][1].degree == 0

    def __eq__(self, other):
        if isinstance(other, PolyExp):
            return self.terms == other.terms
        if isinstance(other, (int, GaussianRational)):
            return self == PolyExp.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def sort_key(self):
        return tuple((lam.key(), p.sort_key()) for lam, p in self.terms)

    def __add__(self, other):
        if not isinstance(other, PolyExp):
            if isinstance(other, RatExp):
                return NotImplemented
            other = PolyExp.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for lam, p in other.terms:
            acc[lam] = acc[lam] + p if lam in acc else p
        return PolyExp._from_dict(acc)

    __radd__ = __add__

    def __neg__(self):
        return PolyExp._from_dict({lam: -p for lam, p in self.terms})

    def __sub__(self, other):
        if not isinstance(other, PolyExp):
            if isinstance(other, RatExp):
                return NotImplemented
            other = PolyExp.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return PolyExp.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, PolyExp):
            if isinstance(other, RatExp):
                return NotImplemented
            return self.scale(other)
        acc: dict = {}
        for l1, p1 in self.terms:
            for l2, p2 in other.terms:
                lam = l1 + l2
                prod = p1 * p2
                acc[lam] = acc[lam] + prod if lam in acc else prod
        return PolyExp._from_dict(acc)

    __rmul__ = __mul__

    def scale(self, v) -> "PolyExp":
        v = GQ.coerce(v)
        if v == ONE:
            return self
        return PolyExp._from_dict({lam: p.scale(v) for lam, p in self.terms})

    def mul_exp(self, mu) -> "PolyExp":
        """Multiply by ``exp(mu*x)``."""
        mu = GQ.coerce(mu)
        if not mu:
            return self
        return PolyExp._from_dict({lam + mu: p for lam, p in self.terms})

    def __pow__(self, k: int):
        out = PolyExp.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derive(self) -> "PolyExp":
        """``(p e^{lx})' = (p' + l p) e^{lx}``"""
        return PolyExp._from_dict({lam: p.derive() + p.scale(lam) for lam, p in self.terms})

    def derivatives(self, n: int) -> list:
        out = [self]
        for _ in range(n):
            out.append(out[-1].derive())
        return out

    def evalf(self, x: complex, bound: float = 700.0) -> complex:
        return polyexp_eval(self, x, bound)

    # -- rendering ---------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for lam, p in self.terms:
            if not lam:
                parts.append(p.to_text("x"))
                continue
            e = f"exp({_exp_arg_text(lam)})"
            nz = [k for k, v in enumerate(p.c) if v]
            if len(nz) == 1:
                k = nz[0]
                v = p.c[k]
                if k == 0 and v == ONE:
                    parts.append(e)
                elif k == 0 and v == -ONE:
                    parts.append("-" + e)
                else:
                    parts.append(_monomial_text(v, "x", k) + "*" + e)
            else:
                parts.append(f"({p.to_text('x')})*{e}")
        return _join_signed(parts, True)

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for lam, p in self.terms:
            if not lam:
                parts.append(p.to_latex("x"))
                continue
            e = f"e^{{{_exp_arg_latex(lam)}}}"
            nz = [k for k, v in enumerate(p.c) if v]
            if len(nz) == 1:
                k = nz[0]
                mono = "" if k == 0 else "x" if k == 1 else f"x^{{{k}}}"
                parts.append(_coeff_latex(p.c[k], mono + e))
            else:
                parts.append(f"\\left({p.to_latex('x')}\\right){e}")
        return _join_signed(parts, False)

    def __repr__(self):
        return f"PolyExp({self.to_text()})"

    __str__ = to_text


def _canon(acc: dict) -> tuple:
    return tuple(sorted(((lam, p) for lam, p in acc.items() if p.c), key=lambda t: t[0].key()))


def _exp_arg_text(lam: GaussianRational, var: str = "x") -> str:
    if lam == ONE:
        return var
    if lam == -ONE:
        return "-" + var
    s = lam.to_text()
    return f"({s})*{var}" if lam.needs_parens() else f"{s}*{var}"


def _exp_arg_latex(lam: GaussianRational, var: str = "x") -> str:
    if lam == ONE:
        return var
    if lam == -ONE:
        return "-" + var
    s = lam.to_latex()
    return f"({s}){var}" if lam.needs_parens() else f"{s}{var}"


def polyexp_eval(f: PolyExp, x: complex, bound: float = 700.0) -> complex:
    """Floating evaluation; raises OverflowError when ``|l*x|`` exceeds ``bound``."""
    x = complex(x)
    total = 0j
    for lam, p in f.terms:
        lx = complex(lam) * x
        if abs(lx) > bound:
            raise OverflowError(f"|{lam}*x| = {abs(lx):.3g} exceeds bound {bound}")
        total += p.evalf(x) * cmath.exp(lx)
    return total


# ---------------------------------------------------------------------------
# Exponent lattice and exact division
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpLattice:
    """Integer coordinates for a finite set of exponents.

    ``basis`` has at most two generators; ``coordinates[l]`` gives integers
    ``a`` with ``l == sum(a_j * basis[j])``.
    """

    basis: tuple
    coordinates: dict

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, lam) -> tuple:
        lam = GQ.coerce(lam)
        if lam in self.coordinates:
            return self.coordinates[lam]
        return _solve_coords(self.basis, lam)

    def element(self, coords) -> GaussianRational:
        out = ZERO
        for a, w in zip(coords, self.basis):
            out = out + w * a
        return out


def _xgcd(a: int, b: int):
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _hnf_rows(rows: list) -> list:
    """Row-style Hermite normal form of an integer matrix with two columns."""
    rows = [list(r) for r in rows if any(r)]
    basis = []
    for col in range(2):
        pivot = None
        rest = []
        for r in rows:
            if r[col] == 0:
                rest.append(r)
                continue
            if pivot is None:
                pivot = r
                continue
            g, s, t = _xgcd(pivot[col], r[col])
            a, b = pivot[col] // g, r[col] // g
            new_pivot = [s * u + t * v for u, v in zip(pivot, r)]
            other = [b * u - a * v for u, v in zip(pivot, r)]
            pivot = new_pivot
            if any(other):
                rest.append(other)
        if pivot is not None:
            if pivot[col] < 0:
                pivot = [-u for u in pivot]
            basis.append(pivot)
        rows = [r for r in rest if any(r)]
    if len(basis) == 2 and basis[1][1]:
        m = basis[1][1]
        k = basis[0][1] // m
        basis[0] = [u - k * v for u, v in zip(basis[0], basis[1])]
    return basis


def _solve_coords(basis: tuple, lam: GaussianRational) -> tuple:
    v = (lam.re, lam.im)
    if not basis:
        if lam:
            raise ValueError(f"{lam} not in lattice")
        return ()
    w0 = basis[0]
    if len(basis) == 1:
        if w0.re:
            a = v[0] / w0.re
        else:
            a = v[1] / w0.im
        if a.denominator != 1 or w0 * int(a) != lam:
            raise ValueError(f"{lam} not in lattice")
        return (int(a),)
    w1 = basis[1]
    a = v[0] / w0.re
    b = (v[1] - a * w0.im) / w1.im
    if a.denominator != 1 or b.denominator != 1:
        raise ValueError(f"{lam} not in lattice")
    return (int(a), int(b))


def exponent_lattice(exponents) -> ExpLattice:
    """Basis of the additive subgroup of Q(i) generated by ``exponents``."""
    lams = sorted({GQ.coerce(e) for e in exponents}, key=lambda g: g.key())
    den = 1
    for lam in lams:
        for q in (lam.re, lam.im):
            den = den * q.denominator // gcd(den, q.denominator)
    rows = [[int(lam.re * den), int(lam.im * den)] for lam in lams]
    basis = tuple(_gq(mpq(r[0], den), mpq(r[1], den)) for r in _hnf_rows(rows))
    coords = {lam: _solve_coords(basis, lam) for lam in lams}
    return ExpLattice(basis, coords)


def _to_laurent(f: PolyExp, lat: ExpLattice) -> dict:
    out = {}
    for lam, p in f.terms:
        u = lat.coords(lam)
        for k, v in enumerate(p.c):
            if v:
                out[u + (k,)] = v
    return out


def _from_laurent(d: dict, lat: ExpLattice) -> PolyExp:
    acc: dict = {}
    for mono, v in d.items():
        lam = lat.element(mono[:-1])
        acc.setdefault(lam, {})[mono[-1]] = v
    terms = {}
    for lam, cs in acc.items():
        c = [ZERO] * (max(cs) + 1)
        for k, v in cs.items():
            c[k] = v
        terms[lam] = Poly._raw(c)
    return PolyExp._from_dict(terms)


def polyexp_exact_divide(f: PolyExp, g: PolyExp) -> PolyExp:
    """Return ``q`` with ``q*g == f`` or raise :class:`NotDivisible`.

    Both operands are embedded into a Laurent polynomial ring over Q(i)[x]
    whose variables are ``exp(w*x)`` for the generators ``w`` of the
    exponent lattice, then divided with a lex-leading-term division.
    """
    if not g.terms:
        raise ZeroDivisionError("polyexp division by zero")
    if not f.terms:
        return f
    if len(g.terms) == 1 and g.terms[0][1].degree == 0:
        lam, p = g.terms[0]
        return f.mul_exp(-lam).scale(p.c[0].inverse())
    lat = exponent_lattice(f.exponents() + g.exponents())
    F = _to_laurent(f, lat)
    G = _to_laurent(g, lat)
    r = lat.rank
    # shift G so every exponential variable has minimal exponent 0, and F
    # so that it is a genuine polynomial
    gmin = tuple(min(m[j] for m in G) for j in range(r))
    fmin = tuple(min(m[j] for m in F) for j in range(r))
    G = {tuple(m[j] - gmin[j] for j in range(r)) + (m[-1],): v for m, v in G.items()}
    F = {tuple(m[j] - fmin[j] for j in range(r)) + (m[-1],): v for m, v in F.items()}
    lt_g = max(G)
    inv = G[lt_g].inverse()
    gitems = list(G.items())
    q = {}
    while F:
        lt = max(F)
        d = tuple(a - b for a, b in zip(lt, lt_g))
        if any(e < 0 for e in d):
            raise NotDivisible("leading term not divisible")
        c = F[lt] * inv
        q[d] = c
        for m, v in gitems:
            key = tuple(a + b for a, b in zip(m, d))
            nv = F.get(key, ZERO) - c * v
            if nv:
                F[key] = nv
            else:
                F.pop(key, None)
    shift = tuple(fmin[j] - gmin[j] for j in range(r))
    q = {tuple(m[j] + shift[j] for j in range(r)) + (m[-1],): v for m, v in q.items()}
    return _from_laurent(q, lat)


def try_divide(f: PolyExp, g: PolyExp):
    """:func:`polyexp_exact_divide` returning ``None`` instead of raising."""
    try:
        return polyexp_exact_divide(f, g)
    except NotDivisible:
        return None


# ---------------------------------------------------------------------------
# Factored denominators and rational-exponential functions
# ---------------------------------------------------------------------------

_X = PolyExp.x()
_PE_ONE = PolyExp.const(1)


def split_unit(f: PolyExp):
    """Write ``f = u * x^k * h`` with ``u = c*exp(m*x)`` a unit and ``h`` normalized.

    ``h`` has lowest exponent 0 and its lowest-exponent polynomial has lowest
    nonzero coefficient 1, so functions differing by a unit share ``h``.
    """
    if not f.terms:
        raise ZeroDivisionError("zero has no unit normalization")
    mu, p0 = f.terms[0]
    k = min(p.low_degree() for _, p in f.terms)
    c = p0.c[p0.low_degree()]
    unit = PolyExp._from_dict({mu: Poly._raw([c])})
    if k:
        h = PolyExp._from_dict({lam - mu: Poly._raw(list(p.c[k:])) for lam, p in f.terms})
    else:
        h = f.mul_exp(-mu)
    h = h.scale(c.inverse())
    return unit, k, h


class Den:
    """A denominator kept as a product ``prod f_i^{e_i}`` of normalized factors."""

    __slots__ = ("factors", "_expanded")

    def __init__(self, factors=()):
        if isinstance(factors, dict):
            factors = factors.items()
        self.factors = tuple(sorted(((f, e) for f, e in factors if e),
                                    key=lambda t: t[0].sort_key()))
        self._expanded = None

    @classmethod
    def from_polyexp(cls, f: PolyExp):
        """Return ``(unit_inverse, den)`` such that ``1/f == unit_inverse / den``."""
        unit, k, h = split_unit(f)
        lam, p = unit.terms[0]
        inv = PolyExp._from_dict({-lam: Poly._raw([p.c[0].inverse()])})
        fac = {}
        if k:
            fac[_X] = k
        if h != _PE_ONE:
            fac[h] = 1
        return inv, cls(fac)

    def is_one(self):
        return not self.factors

    def as_dict(self) -> dict:
        return dict(self.factors)

    def expand(self) -> PolyExp:
        if self._expanded is None:
            out = _PE_ONE
            for f, e in self.factors:
                out = out * f ** e
            self._expanded = out
        return self._expanded

    def __mul__(self, other: "Den") -> "Den":
        d = self.as_dict()
        for f, e in other.factors:
            d[f] = d.get(f, 0) + e
        return Den(d)

    def __pow__(self, k: int) -> "Den":
        return Den({f: e * k for f, e in self.factors})

    def __eq__(self, other):
        return isinstance(other, Den) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def merge(self, other: "Den"):
        """Return ``(lcm, m_self, m_other)`` with ``lcm == self*m_self == other*m_other``."""
        if self.factors == other.factors:
            return self, _PE_ONE, _PE_ONE
        a, b = self.as_dict(), other.as_dict()
        lcm = {f: max(a.get(f, 0), b.get(f, 0)) for f in set(a) | set(b)}
        ma = _PE_ONE
        mb = _PE_ONE
        for f, e in lcm.items():
            if e > a.get(f, 0):
                ma = ma * f ** (e - a.get(f, 0))
            if e > b.get(f, 0):
                mb = mb * f ** (e - b.get(f, 0))
        return Den(lcm), ma, mb

    def quotient(self, other: "Den") -> PolyExp:
        """Expanded ``self/other``; ``other`` must divide ``self`` factorwise."""
        a = self.as_dict()
        out = _PE_ONE
        for f, e in other.factors:
            if a.get(f, 0) < e:
                raise ValueError("denominator does not divide")
        for f, e in self.factors:
            rest = e - other.as_dict().get(f, 0)
            if rest:
                out = out * f ** rest
        return out

    def log_derivative_parts(self):
        """Return ``(P, S)`` with ``P = prod f_i`` and ``D'/D = S/P``."""
        fs = [f for f, _ in self.factors]
        P = _PE_ONE
        for f in fs:
            P = P * f
        S = PolyExp()
        for i, (f, e) in enumerate(self.factors):
            t = f.derive().scale(e)
            for j, g in enumerate(fs):
                if j != i:
                    t = t * g
            S = S + t
        return P, S

    def radical(self) -> "Den":
        return Den({f: 1 for f, _ in self.factors})

    def to_text(self) -> str:
        parts = []
        for f, e in self.factors:
            s = f"({f.to_text()})"
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts) if parts else "1"

    def to_latex(self) -> str:
        parts = []
        for f, e in self.factors:
            s = f.to_latex()
            if not (f.is_monomial() and e == 1 and len(f.terms[0][1].c) <= 2):
                s = f"\\left({s}\\right)"
            parts.append(s if e == 1 else f"{s}^{{{e}}}")
        return "".join(parts) if parts else "1"

    def __repr__(self):
        return f"Den({self.to_text()})"


_DEN_ONE = Den()


class RatExp:
    """Quotient ``num/den`` of polynomial-exponential functions.

    The denominator is stored factored and unit-free; the quotient is not
    reduced, and equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=None):
        if not isinstance(num, PolyExp):
            num = PolyExp.const(num)
        if den is None:
            den = _DEN_ONE
        elif isinstance(den, PolyExp):
            inv, den = Den.from_polyexp(den)
            num = num * inv
        elif not isinstance(den, Den):
            d = GQ.coerce(den)
            num = num.scale(d.inverse())
            den = _DEN_ONE
        if not num.terms:
            den = _DEN_ONE
        self.num = num
        self.den = den

    @classmethod
    def _make(cls, num: PolyExp, den: Den) -> "RatExp":
        r = object.__new__(cls)
        r.num = num
        r.den = den if num.terms else _DEN_ONE
        return r

    @classmethod
    def coerce(cls, v) -> "RatExp":
        if isinstance(v, RatExp):
            return v
        return cls(v)

    def is_zero(self):
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def is_polyexp(self) -> bool:
        return not self.den.factors

    def to_polyexp(self) -> PolyExp:
        """Certify membership in the polynomial-exponential ring."""
        if not self.den.factors:
            return self.num
        q = try_divide(self.num, self.den.expand())
        if q is None:
            raise NotPolyExp(f"{self.to_text()} is not polynomial-exponential")
        return q

    def reduce(self) -> "RatExp":
        """Cancel denominator factors that divide the numerator exactly."""
        if not self.den.factors or not self.num.terms:
            return self
        num = self.num
        fac = self.den.as_dict()
        changed = False
        for f, e in self.den.factors:
            while fac[f]:
                q = try_divide(num, f)
                if q is None:
                    break
                num = q
                fac[f] -= 1
                changed = True
        if not changed:
            return self
        return RatExp._make(num, Den(fac))

    def __add__(self, other):
        other = RatExp.coerce(other)
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other
        D, ma, mb = self.den.merge(other.den)
        return RatExp._make(self.num * ma + other.num * mb, D)

    __radd__ = __add__

    def __neg__(self):
        return RatExp._make(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatExp.coerce(other))

    def __rsub__(self, other):
        return RatExp.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RatExp):
            if not self.den.factors and not other.den.factors:
                return RatExp._make(self.num * other.num, _DEN_ONE)
            return RatExp._make(self.num * other.num, self.den * other.den)
        if isinstance(other, PolyExp):
            return RatExp._make(self.num * other, self.den)
        return RatExp._make(self.num.scale(other), self.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatExp":
        if not self.num.terms:
            raise ZeroDivisionError("inverse of zero")
        inv, d = Den.from_polyexp(self.num)
        return RatExp._make(self.den.expand() * inv, d)

    def __truediv__(self, other):
        return self * RatExp.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatExp.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatExp._make(self.num ** k, self.den ** k)

    def derive(self) -> "RatExp":
        if not self.den.factors:
            return RatExp._make(self.num.derive(), _DEN_ONE)
        P, S = self.den.log_derivative_parts()
        num = self.num.derive() * P - self.num * S
        return RatExp._make(num, self.den * self.den.radical())

    def __eq__(self, other):
        if isinstance(other, (int, GaussianRational, PolyExp)):
            other = RatExp(other)
        if not isinstance(other, RatExp):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        _, ma, mb = self.den.merge(other.den)
        return self.num * ma == other.num * mb

    __hash__ = None

    def evalf(self, x: complex, bound: float = 700.0) -> complex:
        d = polyexp_eval(self.den.expand(), x, bound)
        return polyexp_eval(self.num, x, bound) / d

    def to_text(self) -> str:
        if not self.den.factors:
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    def to_latex(self) -> str:
        if not self.den.factors:
            return self.num.to_latex()
        return f"\\frac{{{self.num.to_latex()}}}{{{self.den.to_latex()}}}"

    def __repr__(self):
        return f"RatExp({self.to_text()})"

    __str__ = to_text


def binomial(n: int, k: int) -> int:
    return comb(n, k)
