"""Closed forms ``N(x, z) / (delta(x) E(z)) * exp(x*z)`` acted on by both operator rings.

``N`` is a polynomial in z with polynomial-exponential coefficients; the
denominator is always separable.  Nothing is reduced automatically and
equality is cross-multiplication.
"""

from __future__ import annotations

from math import comb

from .exactfield import (GQ, ONE, Poly, PolyExp, RatExp, Den, polyexp_eval, try_divide, _DEN_ONE,
                         _pair, _from_flint)
from .opx import DiffOpX
from .opz import RatFunZ, TransDiffOpZ

__all__ = [
    "WaveForm", "waveform_apply_x", "waveform_apply_z", "waveform_scale",
    "waveform_eval", "waveform_sum", "diffop_symbol", "PoleProximityError",
]

_PE0 = PolyExp()
_X = PolyExp.x()


class PoleProximityError(ArithmeticError):
    """A sample point is too close to a zero of a denominator."""


def _trim(cs) -> tuple:
    cs = list(cs)
    while cs and cs[-1].is_zero():
        cs.pop()
    return tuple(cs)


def _zpoly_add(a, b) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, v in enumerate(b):
        out[k] = out[k] + v
    return _trim(out)


def _zpoly_scale_x(N, f: PolyExp) -> tuple:
    if f == 1:
        return N
    return _trim(c * f for c in N)


def _zpoly_mul_z(N, p: Poly) -> tuple:
    """Multiply a z-polynomial with PolyExp coefficients by a scalar z-polynomial."""
    if not N or p.is_zero():
        return ()
    if p.degree == 0 and p.c[0] == ONE:
        return N
    out = [_PE0] * (len(N) + p.degree)
    for i, c in enumerate(N):
        if c.is_zero():
            continue
        for j, v in enumerate(p.c):
            if v:
                out[i + j] = out[i + j] + c.scale(v)
    return _trim(out)


def _zpoly_derive_z(N) -> tuple:
    return _trim(c.scale(k) for k, c in enumerate(N) if k)


def _zpoly_derive_x(N) -> tuple:
    return _trim(c.derive() for c in N)


def _zpoly_shift(N, lam: GQ) -> tuple:
    """``N(x, z + lam)``."""
    if not lam:
        return N
    out = [_PE0] * len(N)
    for k, c in enumerate(N):
        if c.is_zero():
            continue
        p = lam ** 0
        for j in range(k, -1, -1):
            out[j] = out[j] + c.scale(p * comb(k, j))
            p = p * lam
    return _trim(out)


class WaveForm:
    """``(sum_k c_k(x) z^k) / (xden(x) * zden(z)) * exp(x*z)``."""

    __slots__ = ("coeffs", "xden", "zden", "_roots")

    def __init__(self, coeffs=(), xden=None, zden=None):
        N = _trim(c if isinstance(c, PolyExp) else PolyExp.const(c) for c in coeffs)
        if xden is None:
            xden = _DEN_ONE
        elif not isinstance(xden, (PolyExp, Den)):
            xden = PolyExp.const(xden)
        if isinstance(xden, PolyExp):
            inv, xden = Den.from_polyexp(xden)
            N = _zpoly_scale_x(N, inv)
        if zden is None:
            zden = Poly.const(1)
        elif not isinstance(zden, Poly):
            zden = Poly.const(zden)
        if zden.is_zero():
            raise ZeroDivisionError("zero z-denominator")
        lc = zden.lc()
        if lc != ONE:
            N = _trim(c.scale(lc.inverse()) for c in N)
            zden = zden.monic()
        self._set(N, xden, zden)

    def _set(self, N, xden, zden):
        self.coeffs = N
        self.xden = xden if N else _DEN_ONE
        self.zden = zden if N else Poly.const(1)
        self._roots = None

    @classmethod
    def _make(cls, N, xden: Den, zden: Poly) -> "WaveForm":
        w = object.__new__(cls)
        w._set(_trim(N), xden, zden)
        return w

    @classmethod
    def exp_xz(cls) -> "WaveForm":
        return cls([PolyExp.const(1)])

    @classmethod
    def separable(cls, fx, rz) -> "WaveForm":
        """``fx(x) * rz(z) * exp(x*z)``."""
        fx = RatExp.coerce(fx)
        rz = RatFunZ.coerce(rz)
        N = _zpoly_mul_z((fx.num,), rz.num)
        return cls._make(N, fx.den, rz.den)

    def is_zero(self):
        return not self.coeffs

    def numerator_expanded(self) -> tuple:
        return self.coeffs

    def __eq__(self, other):
        if not isinstance(other, WaveForm):
            return NotImplemented
        if self.xden == other.xden:
            ma = mb = PolyExp.const(1)
        else:
            _, ma, mb = self.xden.merge(other.xden)
        lhs = _zpoly_mul_z(_zpoly_scale_x(self.coeffs, ma), other.zden)
        rhs = _zpoly_mul_z(_zpoly_scale_x(other.coeffs, mb), self.zden)
        return lhs == rhs

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, WaveForm):
            return NotImplemented
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        D, ma, mb = self.xden.merge(other.xden)
        if self.zden == other.zden:
            E, za, zb = self.zden, Poly.const(1), Poly.const(1)
        else:
            E = self.zden.lcm(other.zden)
            za, zb = E // self.zden, E // other.zden
        N = _zpoly_add(_zpoly_mul_z(_zpoly_scale_x(self.coeffs, ma), za),
                       _zpoly_mul_z(_zpoly_scale_x(other.coeffs, mb), zb))
        return WaveForm._make(N, D, E)

    def __neg__(self):
        return WaveForm._make(tuple(-c for c in self.coeffs), self.xden, self.zden)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RatFunZ):
            return waveform_scale(self, 1, other)
        if isinstance(other, (RatExp, PolyExp)):
            return waveform_scale(self, other, 1)
        if isinstance(other, (int, GQ)):
            return waveform_scale(self, other, 1)
        if isinstance(other, Poly):
            return waveform_scale(self, 1, RatFunZ(other))
        return NotImplemented

    __rmul__ = __mul__

    def reduce(self, x_side: bool = True) -> "WaveForm":
        """Cancel common factors: z-side by polynomial gcd, x-side by trial division."""
        if not self.coeffs:
            return self
        N, D, E = self.coeffs, self.xden, self.zden
        if E.degree > 0:
            g = E
            for part in _z_components(N):
                g = g.gcd(part)
                if g.degree == 0:
                    break
            if g.degree > 0:
                N = _zpoly_div_z(N, g)
                E = E // g
        if x_side and D.factors:
            fac = D.as_dict()
            for f, e in D.factors:
                while fac[f]:
                    qs = []
                    for c in N:
                        q = try_divide(c, f) if c.terms else c
                        if q is None:
                            break
                        qs.append(q)
                    else:
                        N = tuple(qs)
                        fac[f] -= 1
                        continue
                    break
            D = Den(fac)
        return WaveForm._make(N, D, E)

    def evalf(self, x: complex, z: complex, margin: float = 1e-9) -> complex:
        return waveform_eval(self, x, z, margin)

    def z_roots(self) -> list:
        if self._roots is None:
            self._roots = self.zden.roots()
        return self._roots

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            z = "" if k == 0 else "*z" if k == 1 else f"*z^{k}"
            parts.append(f"({c.to_text()}){z}")
        num = " + ".join(parts)
        dens = []
        if self.xden.factors:
            dens.append(self.xden.to_text())
        if self.zden.degree > 0:
            dens.append(f"({self.zden.to_text('z', descending=True, spaced=False)})")
        if dens:
            return f"({num})/({'*'.join(dens)})*exp(x*z)"
        if len(self.coeffs) == 1 and self.coeffs[0] == ONE:
            return "exp(x*z)"
        return f"({num})*exp(x*z)"

    def to_latex(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            z = "" if k == 0 else "z" if k == 1 else f"z^{{{k}}}"
            parts.append(f"\\left({c.to_latex()}\\right){z}")
        num = " + ".join(parts)
        den = ""
        if self.xden.factors:
            den += self.xden.to_latex()
        if self.zden.degree > 0:
            den += f"\\left({self.zden.to_latex('z')}\\right)"
        if den:
            return f"\\frac{{{num}}}{{{den}}}e^{{xz}}"
        return f"\\left({num}\\right)e^{{xz}}"

    def __repr__(self):
        return f"WaveForm({self.to_text()})"

    __str__ = to_text


def _z_components(N) -> list:
    """The scalar z-polynomials multiplying each ``x^a e^{l x}`` in ``N``."""
    comps = {}
    for k, c in enumerate(N):
        for lam, p in c.terms:
            for a, v in enumerate(p.c):
                if v:
                    comps.setdefault((lam, a), {})[k] = v
    out = []
    for cs in comps.values():
        arr = [0] * (max(cs) + 1)
        for k, v in cs.items():
            arr[k] = v
        out.append(Poly(arr))
    return out


def _components(N) -> dict:
    """``{(lam, a): scalar z-polynomial}`` for the monomials ``x^a e^{lam x}`` of ``N``."""
    comps = {}
    for k, c in enumerate(N):
        for lam, p in c.terms:
            for a, v in enumerate(p.c):
                if v:
                    comps.setdefault((lam, a), {})[k] = v
    out = {}
    for key, cs in comps.items():
        arr = [0] * (max(cs) + 1)
        for k, v in cs.items():
            arr[k] = v
        out[key] = Poly(arr)
    return out


def _from_components(comps: dict) -> tuple:
    acc = {}
    for (lam, a), zp in comps.items():
        for k, v in enumerate(zp.c):
            if v:
                acc.setdefault(k, {}).setdefault(lam, {})[a] = v
    out = [_PE0] * (max(acc) + 1 if acc else 0)
    for k, byexp in acc.items():
        terms = {}
        for lam, cs in byexp.items():
            arr = [0] * (max(cs) + 1)
            for a, v in cs.items():
                arr[a] = v
            terms[lam] = Poly(arr)
        out[k] = PolyExp(terms)
    return _trim(out)


def waveform_sum(items) -> WaveForm:
    """Sum of many waveforms over one common denominator.

    Each item is a waveform or a pair ``(waveform, rz)`` standing for ``rz * W``.
    """
    parts = []
    for it in items:
        W, r = it if isinstance(it, tuple) else (it, None)
        if W.is_zero() or (r is not None and r.is_zero()):
            continue
        parts.append((W, r))
    if not parts:
        return WaveForm()
    D = parts[0][0].xden
    for W, _ in parts[1:]:
        if W.xden != D:
            D, _, _ = D.merge(W.xden)
    dens = [W.zden * r.den if r is not None and r.den.degree > 0 else W.zden for W, r in parts]
    E = dens[0]
    for d in dens[1:]:
        if d != E:
            E = E.lcm(d)
    # accumulate in (re, im) FLINT pairs to avoid repeated conversions
    total = {}
    for (W, r), d in zip(parts, dens):
        N = W.coeffs
        if W.xden != D:
            N = _zpoly_scale_x(N, D.quotient(W.xden))
        mult = E // d if d != E else None
        if r is not None and r.num != 1:
            mult = r.num if mult is None else mult * r.num
        mf = _pair(mult) if mult is not None else None
        for k, zp in _components(N).items():
            v = _pair(zp)
            if mf is not None:
                v = (v[0] * mf[0] - v[1] * mf[1], v[0] * mf[1] + v[1] * mf[0])
            if k in total:
                t = total[k]
                total[k] = (t[0] + v[0], t[1] + v[1])
            else:
                total[k] = v
    total = {k: _from_flint(*v) for k, v in total.items()}
    total = {k: v for k, v in total.items() if not v.is_zero()}
    return WaveForm._make(_from_components(total), D, E)


def _zpoly_div_z(N, g: Poly) -> tuple:
    """Exact division of every scalar component of ``N`` by ``g``."""
    comps = {}
    for k, c in enumerate(N):
        for lam, p in c.terms:
            for a, v in enumerate(p.c):
                if v:
                    comps.setdefault((lam, a), {})[k] = v
    acc = {}
    for (lam, a), cs in comps.items():
        arr = [0] * (max(cs) + 1)
        for k, v in cs.items():
            arr[k] = v
        q, r = Poly(arr).divmod(g)
        if not r.is_zero():
            raise ArithmeticError("z-polynomial not divisible")
        for k, v in enumerate(q.c):
            if v:
                acc.setdefault(k, {}).setdefault(lam, {})[a] = v
    out = [_PE0] * (max(acc) + 1 if acc else 0)
    for k, byexp in acc.items():
        terms = {}
        for lam, cs in byexp.items():
            arr = [0] * (max(cs) + 1)
            for a, v in cs.items():
                arr[a] = v
            terms[lam] = Poly(arr)
        out[k] = PolyExp(terms)
    return _trim(out)


# ---------------------------------------------------------------------------

def diffop_symbol(L: DiffOpX) -> WaveForm:
    """``L[e^{xz}] = (sum a_i(x) z^i) e^{xz}``; needs PolyExp coefficients."""
    return WaveForm(L.polyexp_coeffs())


def waveform_scale(W: WaveForm, fx=1, rz=1) -> WaveForm:
    """``fx(x) * rz(z) * W`` exactly."""
    fx = RatExp.coerce(fx)
    rz = RatFunZ.coerce(rz)
    if fx.is_zero() or rz.is_zero():
        return WaveForm()
    N = _zpoly_mul_z(_zpoly_scale_x(W.coeffs, fx.num), rz.num)
    D = W.xden * fx.den if fx.den.factors else W.xden
    E = W.zden * rz.den if rz.den.degree > 0 else W.zden
    return WaveForm._make(N, D, E)


def _dx(N, D: Den):
    """One application of d/dx to ``N/D * exp(x z)``; returns ``(N', D')``."""
    # d/dx (c z^k e^{xz}) = (c' z^k + c z^{k+1}) e^{xz}
    Nx = _zpoly_add(_zpoly_derive_x(N), (_PE0,) + tuple(N) if N else ())
    if not D.factors:
        return Nx, D
    P, S = D.log_derivative_parts()
    out = _zpoly_add(_zpoly_scale_x(Nx, P), tuple(-c for c in _zpoly_scale_x(N, S)))
    return out, D * D.radical()


def waveform_apply_x(L: DiffOpX, W: WaveForm) -> WaveForm:
    """Apply ``sum a_i(x) D^i`` to ``W``."""
    if not L.coeffs or not W.coeffs:
        return WaveForm()
    acc = []
    N, D = W.coeffs, W.xden
    for i, a in enumerate(L.coeffs):
        if i:
            N, D = _dx(N, D)
        if a.is_zero():
            continue
        acc.append(WaveForm._make(_zpoly_scale_x(N, a.num), D * a.den, W.zden))
    return waveform_sum(acc)


def _shift_z(W: WaveForm, lam: GQ) -> WaveForm:
    """``S[lam]``: ``c(x) r(z) e^{xz} -> e^{lam x} c(x) r(z+lam) e^{xz}``."""
    if not lam:
        return W
    N = tuple(c.mul_exp(lam) for c in _zpoly_shift(W.coeffs, lam))
    return WaveForm._make(N, W.xden, W.zden.shift(lam))


def _dz_powers(W: WaveForm, k: int) -> list:
    """``[Dz^j W for j = 0..k]`` with the z-denominator kept as a power of ``E``."""
    out = [W]
    N, E = W.coeffs, W.zden
    dE = E.derive()
    const = E.degree == 0
    for j in range(k):
        # d/dz (N e^{xz}/E^{j+1}) = ((N_z + x N) E - (j+1) N E') / E^{j+2}
        base = _zpoly_add(_zpoly_derive_z(N), _zpoly_scale_x(N, _X))
        if const:
            N = base
            out.append(WaveForm._make(N, W.xden, E))
        else:
            N = _zpoly_add(_zpoly_mul_z(base, E), tuple(-c for c in _zpoly_mul_z(N, dE.scale(j + 1))))
            out.append(WaveForm._make(N, W.xden, E ** (j + 2)))
    return out


def waveform_apply_z(T: TransDiffOpZ, W: WaveForm) -> WaveForm:
    """Apply ``sum r_{l,k}(z) Dz^k S[l]`` to ``W``."""
    if not T.terms or not W.coeffs:
        return WaveForm()
    items = []
    for lam, cs in T.terms:
        V = _shift_z(W, lam)
        derivs = _dz_powers(V, len(cs) - 1)
        for k, r in enumerate(cs):
            if not r.is_zero():
                items.append((derivs[k], r))
    return waveform_sum(items).reduce(x_side=False)


def waveform_eval(W: WaveForm, x: complex, z: complex, margin: float = 1e-9) -> complex:
    """Floating value of ``W`` at ``(x, z)``; raises :class:`PoleProximityError` near poles."""
    import cmath
    x, z = complex(x), complex(z)
    for r in W.z_roots():
        if abs(z - r) < margin:
            raise PoleProximityError(f"z={z} within {margin} of pole {r}")
    d = polyexp_eval(W.xden.expand(), x)
    scale = sum(abs(polyexp_eval(PolyExp([(lam, p)]), x)) for lam, p in W.xden.expand().terms)
    if abs(d) <= margin * max(scale, 1.0):
        raise PoleProximityError(f"x={x} too close to a zero of the x-denominator")
    num = 0j
    zp = 1 + 0j
    for c in W.coeffs:
        num += polyexp_eval(c, x) * zp
        zp *= z
    return num / (d * W.zden.evalf(z)) * cmath.exp(x * z)
