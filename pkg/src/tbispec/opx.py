"""Differential operators in x with rational-exponential coefficients."""

from __future__ import annotations

from math import comb

from .exactfield import GQ, PolyExp, RatExp, NotPolyExp, Poly, _DEN_ONE

__all__ = [
    "DiffOpX", "diffop_mul", "diffop_apply", "right_divide", "wronskian",
    "kbar_from_kernel", "conjugate_by_function", "DegenerateKernel",
]


class DegenerateKernel(ValueError):
    """The kernel functions are linearly dependent (zero Wronskian)."""


class DiffOpX:
    """``sum_i a_i(x) D^i`` with ``a_i`` rational-exponential, ``D = d/dx``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [RatExp.coerce(a) for a in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, cs: list) -> "DiffOpX":
        while cs and cs[-1].is_zero():
            cs.pop()
        op = object.__new__(cls)
        op.coeffs = tuple(cs)
        return op

    @classmethod
    def D(cls, k: int = 1) -> "DiffOpX":
        return cls([0] * k + [1])

    @classmethod
    def mult(cls, f) -> "DiffOpX":
        """Multiplication by the function ``f``."""
        return cls([f])

    @classmethod
    def from_poly_in_D(cls, p: Poly) -> "DiffOpX":
        """The constant-coefficient operator ``p(D)``."""
        return cls([PolyExp.const(v) for v in p.c])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def lc(self) -> RatExp:
        return self.coeffs[-1]

    def has_polyexp_coeffs(self) -> bool:
        return all(a.is_polyexp() for a in self.coeffs)

    def certify(self) -> "DiffOpX":
        """Return the same operator with every coefficient certified PolyExp.

        Raises :class:`NotPolyExp` if some coefficient is genuinely rational.
        """
        if self.has_polyexp_coeffs():
            return self
        return DiffOpX._raw([RatExp._make(a.to_polyexp(), _DEN_ONE) for a in self.coeffs])

    def polyexp_coeffs(self) -> list:
        if not self.has_polyexp_coeffs():
            raise NotPolyExp("operator has non-polynomial-exponential coefficients")
        return [a.num for a in self.coeffs]

    def reduce(self) -> "DiffOpX":
        return DiffOpX._raw([a.reduce() for a in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, DiffOpX):
            if isinstance(other, (int, GQ, PolyExp, RatExp)):
                other = DiffOpX.mult(other)
            else:
                return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def __add__(self, other):
        other = _coerce_op(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = out[i] + v
        return DiffOpX._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOpX._raw([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-_coerce_op(other))

    def __rsub__(self, other):
        return _coerce_op(other) - self

    def __mul__(self, other):
        return diffop_mul(self, _coerce_op(other))

    def __rmul__(self, other):
        return diffop_mul(_coerce_op(other), self)

    def __pow__(self, k: int):
        out = DiffOpX.mult(1)
        for _ in range(k):
            out = out * self
        return out

    def scale_left(self, f) -> "DiffOpX":
        f = RatExp.coerce(f)
        return DiffOpX._raw([f * a for a in self.coeffs])

    def apply(self, f):
        return diffop_apply(self, f)

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if a.is_zero():
                continue
            d = "" if i == 0 else "D" if i == 1 else f"D^{i}"
            c = a.to_text()
            if not d:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*{d}")
        return " + ".join(parts)

    def to_latex(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if a.is_zero():
                continue
            d = "" if i == 0 else "\\partial_x" if i == 1 else f"\\partial_x^{{{i}}}"
            parts.append(f"\\left({a.to_latex()}\\right){d}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOpX({self.to_text()})"

    __str__ = to_text


def _coerce_op(v) -> DiffOpX:
    if isinstance(v, DiffOpX):
        return v
    return DiffOpX.mult(v)


def _derivative_table(a: RatExp, n: int) -> list:
    out = [a]
    for _ in range(n):
        out.append(out[-1].derive())
    return out


def diffop_mul(A: DiffOpX, B: DiffOpX) -> DiffOpX:
    """Composition ``A o B`` using ``D o f = f o D + f'``."""
    if not A.coeffs or not B.coeffs:
        return DiffOpX._raw([])
    out = [RatExp()] * (A.order + B.order + 1)
    derivs = [_derivative_table(b, A.order) for b in B.coeffs]
    for i, a in enumerate(A.coeffs):
        if a.is_zero():
            continue
        for j in range(len(B.coeffs)):
            for k in range(i + 1):
                bk = derivs[j][k]
                if bk.is_zero():
                    continue
                out[i - k + j] = out[i - k + j] + a * bk * comb(i, k)
    return DiffOpX._raw(out)


def diffop_apply(L: DiffOpX, f) -> RatExp:
    """``sum a_i f^{(i)}``; a :class:`RatExp` (den 1 when everything is PolyExp)."""
    f = RatExp.coerce(f)
    acc = RatExp()
    cur = f
    for i, a in enumerate(L.coeffs):
        if i:
            cur = cur.derive()
        if not a.is_zero():
            acc = acc + a * cur
    return acc


def right_divide(A: DiffOpX, B: DiffOpX):
    """Euclidean right division: ``A = Q o B + R`` with ``ord R < ord B``."""
    if B.is_zero():
        raise ZeroDivisionError("right division by the zero operator")
    n = B.order
    inv_lc = B.lc().inverse()
    R = A
    q = [RatExp()] * max(A.order - n + 1, 0)
    # D^k o B for k = 0..ord A - n, built incrementally
    shifted = [B]
    while R.coeffs and R.order >= n:
        k = R.order - n
        while len(shifted) <= k:
            shifted.append(DiffOpX.D() * shifted[-1])
        c = (R.lc() * inv_lc).reduce()
        q[k] = q[k] + c
        R = R - shifted[k].scale_left(c)
        if R.coeffs and R.order == k + n:
            raise ArithmeticError("leading coefficient failed to cancel")
    return DiffOpX._raw(q), R


def wronskian(fs) -> PolyExp:
    """Wronskian determinant of PolyExp functions (fraction-free expansion)."""
    fs = list(fs)
    if not fs:
        raise ValueError("wronskian of an empty list")
    n = len(fs)
    rows = list(zip(*[f.derivatives(n - 1) for f in fs]))
    return _det([list(r) for r in rows])


def _det(M: list) -> PolyExp:
    """Cofactor expansion along the first row; memoized on column subsets."""
    n = len(M)
    memo = {}

    def minor(row: int, cols: tuple) -> PolyExp:
        if row == n:
            return PolyExp.const(1)
        if cols in memo:
            return memo[cols]
        acc = PolyExp()
        for idx, c in enumerate(cols):
            v = M[row][c]
            if v.is_zero():
                continue
            sub = minor(row + 1, cols[:idx] + cols[idx + 1:])
            t = v * sub
            acc = acc - t if idx % 2 else acc + t
        memo[cols] = acc
        return acc

    return minor(0, tuple(range(n)))


def kbar_from_kernel(fs) -> DiffOpX:
    """``Wr(f_1, ..., f_n, .)`` as an operator: order n, leading coefficient ``Wr(fs)``."""
    fs = list(fs)
    n = len(fs)
    tau = wronskian(fs) if fs else PolyExp.const(1)
    if tau.is_zero():
        raise DegenerateKernel("kernel functions are linearly dependent")
    # rows 0..n are derivatives; the last column holds f^{(row)}
    table = list(zip(*[f.derivatives(n) for f in fs])) if fs else [()]
    coeffs = []
    for j in range(n + 1):
        rows = [list(table[r]) for r in range(n + 1) if r != j]
        minor = _det(rows) if rows and rows[0] else PolyExp.const(1)
        coeffs.append(minor if (n + j) % 2 == 0 else -minor)
    return DiffOpX(coeffs)


def conjugate_by_function(L: DiffOpX, g, side: str = "right-compose") -> DiffOpX:
    """``L o g`` (right-compose), ``g o L`` (left-compose) or ``g^-1 o L o g``."""
    g = RatExp.coerce(g)
    if side == "right-compose":
        return L * DiffOpX.mult(g)
    if side == "left-compose":
        return L.scale_left(g)
    if side == "conjugate":
        if g.is_zero():
            raise ZeroDivisionError("conjugation by zero")
        return (L * DiffOpX.mult(g)).scale_left(g.inverse())
    raise ValueError(f"unknown side {side!r}")
