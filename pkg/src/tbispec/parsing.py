"""Parser for the text forms printed by the rest of the package.

One grammar covers every kind of value::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?
    atom   := integer | "i" | "x" | "z" | "D" | "Dz" | "exp(" expr ")"
            | "S[" expr "]" | "(" expr ")"

The text is first turned into a small syntax tree, which is then evaluated
in a target domain: scalars, functions of x, functions of z, operators in x,
operators in z, or two-variable wave forms.
"""

from __future__ import annotations

import re

from .exactfield import GQ, ZERO, ONE, Poly, PolyExp, RatExp, Den
from .opx import DiffOpX
from .opz import RatFunZ, TransDiffOpZ
from .waveform import WaveForm, _zpoly_add, _zpoly_mul_z, _zpoly_scale_x, _trim

__all__ = [
    "ParseError", "parse_scalar", "parse_polyexp", "parse_ratexp", "parse_ratfunz",
    "parse_poly", "parse_diffop", "parse_tdiffop", "parse_waveform",
]


class ParseError(ValueError):
    """Malformed text or a value outside the requested domain."""


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+)|(.))")


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        pos = m.end()
        num, ident, sym = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("id", ident))
        elif sym is not None and not sym.isspace():
            if sym not in "+-*/^()[]":
                raise ParseError(f"unexpected character {sym!r}")
            out.append(("op", sym))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        if not self.toks:
            raise ParseError("empty expression")
        node = self.expr()
        if self.pos != len(self.toks):
            raise ParseError(f"trailing input at {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = ("mul" if op == "*" else "div", node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            node = ("pow", node, self.unary())
        return node

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return ("num", val)
        if kind == "id":
            self.take()
            if val == "exp":
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return ("exp", arg)
            if val == "S":
                self.take("op", "[")
                arg = self.expr()
                self.take("op", "]")
                return ("shift", arg)
            if val in ("i", "x", "z", "D", "Dz"):
                return ("sym", val)
            raise ParseError(f"unknown name {val!r}")
        if (kind, val) == ("op", "("):
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        raise ParseError(f"unexpected {val!r}")


def _tree(text: str):
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation

class _Domain:
    """Maps syntax nodes to values; subclasses supply atoms and division."""

    name = "value"

    def eval(self, node):
        tag = node[0]
        if tag == "num":
            return self.const(GQ(node[1]))
        if tag == "sym":
            if node[1] == "i":
                return self.const(GQ(0, 1))
            return self.symbol(node[1])
        if tag == "neg":
            return -self.eval(node[1])
        if tag == "add":
            return self.eval(node[1]) + self.eval(node[2])
        if tag == "sub":
            return self.eval(node[1]) - self.eval(node[2])
        if tag == "mul":
            return self.eval(node[1]) * self.eval(node[2])
        if tag == "div":
            return self.div(self.eval(node[1]), self.eval(node[2]))
        if tag == "pow":
            return self.pow(self.eval(node[1]), _integer(node[2]))
        if tag == "exp":
            return self.exp(_exp_rate(node[1]))
        if tag == "shift":
            return self.shift(_scalar(node[1]))
        raise ParseError(f"bad node {tag}")

    def symbol(self, name):
        raise ParseError(f"{name!r} is not allowed in a {self.name}")

    def exp(self, lam):
        raise ParseError(f"exp(...) is not allowed in a {self.name}")

    def shift(self, lam):
        raise ParseError(f"S[...] is not allowed in a {self.name}")

    def pow(self, v, k):
        if k < 0:
            return self.div(self.const(ONE), self.pow(v, -k))
        out = self.const(ONE)
        for _ in range(k):
            out = out * v
        return out


class _Scalars(_Domain):
    name = "scalar"

    def const(self, c):
        return c

    def div(self, a, b):
        if not b:
            raise ParseError("division by zero")
        return a / b


class _XFunctions(_Domain):
    name = "function of x"

    def const(self, c):
        return RatExp(PolyExp.const(c))

    def symbol(self, name):
        if name != "x":
            super().symbol(name)
        return RatExp(PolyExp.x())

    def exp(self, lam):
        return RatExp(PolyExp.exp(lam))

    def div(self, a, b):
        if b.is_zero():
            raise ParseError("division by zero")
        return a / b


class _ZFunctions(_Domain):
    name = "function of z"

    def const(self, c):
        return RatFunZ(c)

    def symbol(self, name):
        if name != "z":
            super().symbol(name)
        return RatFunZ.z()

    def div(self, a, b):
        if b.is_zero():
            raise ParseError("division by zero")
        return a / b


class _XOperators(_Domain):
    name = "operator in x"

    def const(self, c):
        return DiffOpX.mult(c)

    def symbol(self, name):
        if name == "x":
            return DiffOpX.mult(PolyExp.x())
        if name == "D":
            return DiffOpX.D()
        super().symbol(name)

    def exp(self, lam):
        return DiffOpX.mult(PolyExp.exp(lam))

    def div(self, a, b):
        if b.order != 0 or b.is_zero():
            raise ParseError("can only divide by a nonzero function")
        return a * DiffOpX.mult(b.coeffs[0].inverse())


class _ZOperators(_Domain):
    name = "operator in z"

    def const(self, c):
        return TransDiffOpZ.mult(RatFunZ(c))

    def symbol(self, name):
        if name == "z":
            return TransDiffOpZ.mult(RatFunZ.z())
        if name == "Dz":
            return TransDiffOpZ.Dz()
        super().symbol(name)

    def shift(self, lam):
        return TransDiffOpZ.S(lam)

    def div(self, a, b):
        f = b.as_function() if b.is_differential() and b.order() == 0 else None
        if f is None or f.is_zero():
            raise ParseError("can only divide by a nonzero function of z")
        return a * TransDiffOpZ.mult(f.inverse())


class _Mixed:
    """``N(x, z) / (xden(x) zden(z)) * exp(x z)^k`` during parsing."""

    __slots__ = ("N", "xden", "zden", "k")

    def __init__(self, N, xden=None, zden=None, k=0):
        self.N = _trim(N)
        self.xden = xden if xden is not None else Den()
        self.zden = zden if zden is not None else Poly.const(1)
        self.k = k if self.N else 0

    def is_zero(self):
        return not self.N

    def __neg__(self):
        return _Mixed(tuple(-c for c in self.N), self.xden, self.zden, self.k)

    def __add__(self, other):
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.k != other.k:
            raise ParseError("sum mixes different powers of exp(x*z)")
        D, ma, mb = self.xden.merge(other.xden)
        E = self.zden.lcm(other.zden) if self.zden != other.zden else self.zden
        N = _zpoly_add(_zpoly_mul_z(_zpoly_scale_x(self.N, ma), E // self.zden),
                       _zpoly_mul_z(_zpoly_scale_x(other.N, mb), E // other.zden))
        return _Mixed(N, D, E, self.k)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return _Mixed(())
        out = [PolyExp()] * (len(self.N) + len(other.N) - 1)
        for i, a in enumerate(self.N):
            if a.is_zero():
                continue
            for j, b in enumerate(other.N):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return _Mixed(out, self.xden * other.xden, self.zden * other.zden, self.k + other.k)

    def separable_parts(self):
        """``(c(x), p(z))`` with ``N = c p``, or ``None`` when ``N`` has rank above one."""
        j0 = next(j for j, c in enumerate(self.N) if not c.is_zero())
        base = self.N[j0]
        lam, bp = base.terms[0]
        a0 = next(k for k, v in enumerate(bp.c) if v)
        pivot = bp.c[a0]
        coeffs = []
        for c in self.N:
            if c.is_zero():
                coeffs.append(ZERO)
                continue
            p = dict(c.terms).get(lam)
            v = p.c[a0] if p is not None and a0 < len(p.c) else ZERO
            alpha = v / pivot
            if not alpha or c != base.scale(alpha):
                return None
            coeffs.append(alpha)
        return base, Poly(coeffs)


class _Waves(_Domain):
    name = "wave form"

    def const(self, c):
        return _Mixed((PolyExp.const(c),))

    def symbol(self, name):
        if name == "x":
            return _Mixed((PolyExp.x(),))
        if name == "z":
            return _Mixed((PolyExp(), PolyExp.const(1)))
        super().symbol(name)

    def eval(self, node):
        if node[0] == "exp" and _is_xz(node[1]):
            return _Mixed((PolyExp.const(1),), k=1)
        return super().eval(node)

    def exp(self, lam):
        return _Mixed((PolyExp.exp(lam),))

    def div(self, a, b):
        if b.is_zero():
            raise ParseError("division by zero")
        parts = b.separable_parts()
        if parts is None:
            raise ParseError("divisor is not a product of a function of x and a function of z")
        c, p = parts
        unit, cden = Den.from_polyexp(c)
        N = _zpoly_mul_z(_zpoly_scale_x(a.N, b.xden.expand() * unit), b.zden)
        return _Mixed(N, a.xden * cden, a.zden * p, a.k - b.k)


def _is_xz(node) -> bool:
    return node[0] == "mul" and {node[1], node[2]} == {("sym", "x"), ("sym", "z")}


def _scalar(node) -> GQ:
    return _Scalars().eval(node)


def _integer(node) -> int:
    v = _scalar(node)
    if v.im or v.re.denominator != 1:
        raise ParseError("exponent must be an integer")
    return int(v.re)


def _exp_rate(node) -> GQ:
    """The ``lam`` of an argument ``lam*x``."""
    f = _XFunctions().eval(node)
    if not f.is_polyexp():
        raise ParseError("exponent must be linear in x")
    p = f.to_polyexp()
    if len(p.terms) != 1 or p.terms[0][0] or p.terms[0][1].degree != 1 or p.terms[0][1].c[0]:
        raise ParseError("exponent must be a multiple of x")
    return p.terms[0][1].c[1]


def parse_scalar(text: str) -> GQ:
    """Parse ``a/b+c/d*i`` and any other constant expression."""
    return _scalar(_tree(text))


def parse_ratexp(text: str) -> RatExp:
    return _XFunctions().eval(_tree(text))


def parse_polyexp(text: str) -> PolyExp:
    f = parse_ratexp(text)
    if not f.is_polyexp():
        raise ParseError("not a polynomial-exponential function")
    return f.to_polyexp()


def parse_ratfunz(text: str) -> RatFunZ:
    return _ZFunctions().eval(_tree(text))


def parse_poly(text: str, var: str = "z") -> Poly:
    """A polynomial in ``z`` (or in ``x`` with ``var='x'``)."""
    if var == "z":
        r = parse_ratfunz(text)
        if not r.is_poly():
            raise ParseError("not a polynomial")
        return r.num.scale(r.den.c[0].inverse())
    f = parse_polyexp(text)
    if any(lam for lam, _ in f.terms):
        raise ParseError("not a polynomial")
    return f.terms[0][1] if f.terms else Poly()


def parse_diffop(text: str) -> DiffOpX:
    return _XOperators().eval(_tree(text))


def parse_tdiffop(text: str) -> TransDiffOpZ:
    return _ZOperators().eval(_tree(text))


def parse_waveform(text: str) -> WaveForm:
    v = _Waves().eval(_tree(text))
    if v.is_zero():
        return WaveForm()
    if v.k != 1:
        raise ParseError("a wave form carries exactly one factor exp(x*z)")
    return WaveForm(v.N, v.xden, v.zden)
