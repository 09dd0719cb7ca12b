"""Translational-differential operators in z and the map b from x-side operators.

An element is ``sum_l P_l(z, Dz) S[l]`` with every shift ``S[l]: f(z) -> f(z+l)``
kept to the right of the rational coefficients and the derivatives.
"""

from __future__ import annotations

from math import comb

from .exactfield import GQ, ZERO, ONE, Poly, PolyExp, RatExp, NotPolyExp
from .opx import DiffOpX

__all__ = ["RatFunZ", "TransDiffOpZ", "tdiff_mul", "ratfun_shift", "b_map"]


class RatFunZ:
    """A rational function of z in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, Poly.const(1)
            return
        if den.degree > 0:
            g = num.gcd(den)
            if g.degree > 0:
                num = num // g
                den = den // g
        lc = den.lc()
        if lc != ONE:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def coerce(cls, v) -> "RatFunZ":
        if isinstance(v, RatFunZ):
            return v
        return cls(v)

    @classmethod
    def z(cls) -> "RatFunZ":
        return cls(Poly.var())

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, (int, GQ, Poly)):
            other = RatFunZ(other)
        if not isinstance(other, RatFunZ):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = RatFunZ.coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        d1, d2 = self.den, other.den
        if d1 == d2:
            return RatFunZ(self.num + other.num, d1)
        g = d1.gcd(d2)
        if g.degree == 0:
            return _raw(self.num * d2 + other.num * d1, d1 * d2)
        a, b = d1 // g, d2 // g
        num = self.num * b + other.num * a
        if num.is_zero():
            return RatFunZ()
        # only factors of g can cancel
        h = num.gcd(g)
        if h.degree > 0:
            num, g = num // h, g // h
        return _raw(num, a * b * g)

    __radd__ = __add__

    def __neg__(self):
        r = object.__new__(RatFunZ)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        return self + (-RatFunZ.coerce(other))

    def __rsub__(self, other):
        return RatFunZ.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatFunZ):
            if isinstance(other, (int, GQ)):
                return _raw(self.num.scale(other), self.den) if other else RatFunZ()
            other = RatFunZ.coerce(other)
        if self.is_zero() or other.is_zero():
            return RatFunZ()
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d2.degree > 0 and n1.degree > 0:
            g = n1.gcd(d2)
            if g.degree > 0:
                n1, d2 = n1 // g, d2 // g
        if d1.degree > 0 and n2.degree > 0:
            g = n2.gcd(d1)
            if g.degree > 0:
                n2, d1 = n2 // g, d1 // g
        num, den = n1 * n2, d1 * d2
        lc = den.lc()
        if lc != ONE:
            inv = lc.inverse()
            num, den = num.scale(inv), den.scale(inv)
        return _raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunZ":
        return RatFunZ(self.den, self.num)

    def __truediv__(self, other):
        return self * RatFunZ.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunZ.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = object.__new__(RatFunZ)
        r.num, r.den = self.num ** k, self.den ** k
        return r

    def derive(self) -> "RatFunZ":
        if self.den.degree == 0:
            r = object.__new__(RatFunZ)
            r.num, r.den = self.num.derive(), self.den
            return r
        return RatFunZ(self.num.derive() * self.den - self.num * self.den.derive(),
                       self.den * self.den)

    def shift(self, lam) -> "RatFunZ":
        return ratfun_shift(self, lam)

    def __call__(self, v):
        return self.num(v) / self.den(v)

    def evalf(self, z: complex) -> complex:
        return self.num.evalf(z) / self.den.evalf(z)

    def to_text(self) -> str:
        n = self.num.to_text("z", descending=True, spaced=False)
        if self.den.degree == 0:
            return n
        return f"({n})/({self.den.to_text('z', descending=True, spaced=False)})"

    def to_latex(self) -> str:
        n = self.num.to_latex("z")
        if self.den.degree == 0:
            return n
        return f"\\frac{{{n}}}{{{self.den.to_latex('z')}}}"

    def __repr__(self):
        return f"RatFunZ({self.to_text()})"

    __str__ = to_text


def _raw(num: Poly, den: Poly) -> RatFunZ:
    """Build from an already reduced pair with monic denominator."""
    r = object.__new__(RatFunZ)
    r.num, r.den = num, den
    return r


def _sum(items) -> RatFunZ:
    """Sum of many rational functions, grouping equal denominators first."""
    groups = {}
    for r in items:
        if r.is_zero():
            continue
        groups[r.den] = groups[r.den] + r.num if r.den in groups else r.num
    out = RatFunZ()
    for den, num in groups.items():
        if not num.is_zero():
            out = out + RatFunZ(num, den)
    return out


def ratfun_shift(r: RatFunZ, lam) -> RatFunZ:
    """``r(z + lam)``."""
    lam = GQ.coerce(lam)
    if not lam:
        return r
    out = object.__new__(RatFunZ)
    # shifting preserves coprimality and monicity
    out.num, out.den = r.num.shift(lam), r.den.shift(lam)
    return out


# ---------------------------------------------------------------------------

def _leibniz(P: tuple, Q: tuple) -> list:
    """Product of two differential operators in z given by coefficient tuples."""
    if not P or not Q:
        return []
    parts = [[] for _ in range(len(P) + len(Q) - 1)]
    derivs = []
    for q in Q:
        row = [q]
        for _ in range(len(P) - 1):
            row.append(row[-1].derive())
        derivs.append(row)
    for i, p in enumerate(P):
        if p.is_zero():
            continue
        for j in range(len(Q)):
            for k in range(i + 1):
                qk = derivs[j][k]
                if qk.is_zero():
                    continue
                parts[i - k + j].append(p * qk * comb(i, k))
    return [_sum(ps) for ps in parts]


def _trim(cs) -> tuple:
    cs = list(cs)
    while cs and cs[-1].is_zero():
        cs.pop()
    return tuple(cs)


class TransDiffOpZ:
    """``sum_l sum_k r_{l,k}(z) Dz^k S[l]`` in normal form."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            terms = terms.items()
        acc = {}
        for lam, cs in terms:
            lam = GQ.coerce(lam)
            cs = [RatFunZ.coerce(c) for c in cs]
            if lam in acc:
                cs = _add_coeffs(acc[lam], cs)
            acc[lam] = cs
        self.terms = _canon(acc)

    @classmethod
    def _from_dict(cls, acc: dict) -> "TransDiffOpZ":
        op = object.__new__(cls)
        op.terms = _canon(acc)
        return op

    @classmethod
    def mult(cls, r) -> "TransDiffOpZ":
        return cls([(ZERO, [r])])

    @classmethod
    def Dz(cls, k: int = 1) -> "TransDiffOpZ":
        return cls([(ZERO, [0] * k + [1])])

    @classmethod
    def S(cls, lam) -> "TransDiffOpZ":
        return cls([(lam, [1])])

    def shifts(self) -> list:
        return [lam for lam, _ in self.terms]

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_differential(self) -> bool:
        """True when only the shift ``S[0]`` occurs."""
        return all(not lam for lam, _ in self.terms)

    def order(self) -> int:
        return max((len(cs) - 1 for _, cs in self.terms), default=-1)

    def as_function(self):
        """The multiplication function if this is an order-0 shift-free operator."""
        if not self.terms:
            return RatFunZ()
        if self.is_differential() and len(self.terms[0][1]) == 1:
            return self.terms[0][1][0]
        return None

    def __eq__(self, other):
        if isinstance(other, (int, GQ, Poly, RatFunZ)):
            other = TransDiffOpZ.mult(other)
        if not isinstance(other, TransDiffOpZ):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        other = _coerce_op(other)
        acc = self.as_dict()
        for lam, cs in other.terms:
            acc[lam] = _add_coeffs(acc[lam], cs) if lam in acc else cs
        return TransDiffOpZ._from_dict(acc)

    __radd__ = __add__

    def __neg__(self):
        return TransDiffOpZ._from_dict({lam: tuple(-c for c in cs) for lam, cs in self.terms})

    def __sub__(self, other):
        return self + (-_coerce_op(other))

    def __rsub__(self, other):
        return _coerce_op(other) - self

    def __mul__(self, other):
        return tdiff_mul(self, _coerce_op(other))

    def __rmul__(self, other):
        return tdiff_mul(_coerce_op(other), self)

    def __pow__(self, k: int):
        out = TransDiffOpZ.mult(1)
        for _ in range(k):
            out = out * self
        return out

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for lam, cs in self.terms:
            for k in range(len(cs) - 1, -1, -1):
                r = cs[k]
                if r.is_zero():
                    continue
                s = f"({r.to_text()})"
                if k:
                    s += "*Dz" if k == 1 else f"*Dz^{k}"
                if lam:
                    s += f"*S[{lam.to_text()}]"
                parts.append(s)
        return " + ".join(parts)

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for lam, cs in self.terms:
            for k in range(len(cs) - 1, -1, -1):
                r = cs[k]
                if r.is_zero():
                    continue
                s = f"\\left({r.to_latex()}\\right)"
                if k:
                    s += "\\partial_z" if k == 1 else f"\\partial_z^{{{k}}}"
                if lam:
                    s += f"\\mathbf{{S}}_{{{lam.to_latex()}}}"
                parts.append(s)
        return " + ".join(parts)

    def __repr__(self):
        return f"TransDiffOpZ({self.to_text()})"

    __str__ = to_text


def _add_coeffs(a, b) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, v in enumerate(b):
        out[k] = out[k] + v
    return tuple(out)


def _canon(acc: dict) -> tuple:
    items = []
    for lam, cs in acc.items():
        cs = _trim(cs)
        if cs:
            items.append((lam, cs))
    items.sort(key=lambda t: t[0].key())
    return tuple(items)


def _coerce_op(v) -> TransDiffOpZ:
    if isinstance(v, TransDiffOpZ):
        return v
    return TransDiffOpZ.mult(v)


def tdiff_mul(A: TransDiffOpZ, B: TransDiffOpZ) -> TransDiffOpZ:
    """Composition ``A o B`` using ``S[l] o r(z) = r(z+l) o S[l]`` and Leibniz."""
    acc = {}
    for lam, P in A.terms:
        for mu, Q in B.terms:
            Q_shifted = tuple(ratfun_shift(q, lam) for q in Q)
            prod = _leibniz(P, Q_shifted)
            key = lam + mu
            acc[key] = _add_coeffs(acc[key], prod) if key in acc else tuple(prod)
    return TransDiffOpZ._from_dict(acc)


def b_map(L: DiffOpX) -> TransDiffOpZ:
    """The anti-isomorphism defined by ``L[e^{xz}] = b(L)[e^{xz}]``.

    ``c x^a e^{l x} D^j  ->  c z^j Dz^a S[l]``.  Only defined for operators
    whose coefficients are polynomial-exponential.
    """
    if not L.has_polyexp_coeffs():
        try:
            L = L.certify()
        except NotPolyExp as err:
            raise NotPolyExp("b is only defined on polynomial-exponential coefficients") from err
    acc = {}
    for j, a in enumerate(L.coeffs):
        for lam, p in a.num.terms:
            cs = acc.setdefault(lam, {})
            for deg, c in enumerate(p.c):
                if c:
                    cs[deg] = cs.get(deg, Poly()) + Poly.monomial(j, c)
    out = {}
    for lam, cs in acc.items():
        top = max(cs)
        out[lam] = tuple(RatFunZ(cs.get(k, Poly())) for k in range(top + 1))
    return TransDiffOpZ._from_dict(out)
