"""Floating-point cross-checks of exact identities.

Both sides of an identity are evaluated at random points of the annulus
``0.5 <= |x|, |z| <= 1.5``, away from the zeros of every denominator.  A side
is either a :class:`WaveForm` (evaluated from its closed form) or a
:class:`NumericSide` built by :func:`z_action` or :func:`x_action`, which
apply an operator numerically through truncated Taylor series of the wave
form and never touch the symbolic operator algebra.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Callable

from .exactfield import GQ, PolyExp, Poly, polyexp_eval
from .opx import DiffOpX
from .opz import TransDiffOpZ
from .waveform import WaveForm, PoleProximityError

__all__ = ["OracleReport", "OracleError", "NumericSide", "check_identity", "z_action", "x_action"]

R_MIN, R_MAX = 0.5, 1.5
MARGIN = 0.1


class OracleError(RuntimeError):
    """No pole-free sample could be drawn."""


@dataclass(frozen=True)
class OracleReport:
    identity: str
    samples: int
    max_residual: float
    tol: float
    passed: bool
    seed: int

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (f"{self.identity}: {verdict} (max residual {self.max_residual:.2e}, "
                f"{self.samples} samples, tol {self.tol:g}, seed {self.seed})")


@dataclass
class NumericSide:
    """A numerically evaluated function of ``(x, z)`` with its known singular sets."""

    fn: Callable[[complex, complex], complex]
    z_poles: list
    x_dens: list

    def __call__(self, x, z):
        return self.fn(x, z)


def _singular_sets(side):
    if isinstance(side, WaveForm):
        return list(side.z_roots()), [side.xden.expand()] if side.xden.factors else []
    return list(side.z_poles), list(side.x_dens)


def _x_near_zero(f: PolyExp, x: complex, margin: float) -> bool:
    if len(f.terms) == 1:
        # polynomial times a nowhere-vanishing exponential
        return any(abs(x - r) < margin for r in f.terms[0][1].roots())
    value = polyexp_eval(f, x)
    scale = sum(abs(polyexp_eval(PolyExp([t]), x)) for t in f.terms)
    return abs(value) < margin * scale


def _draw(rng: random.Random) -> complex:
    return cmath.rect(rng.uniform(R_MIN, R_MAX), rng.uniform(0, 2 * math.pi))


def _evaluate(side, x, z):
    if isinstance(side, WaveForm):
        return side.evalf(x, z, margin=0.0)
    return side(x, z)


def check_identity(lhs, rhs, samples: int = 20, tol: float = 1e-6, seed: int = 0,
                   identity: str = "identity", max_tries: int = 200) -> OracleReport:
    """Compare ``lhs`` and ``rhs`` at ``samples`` random pole-free points."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = random.Random(seed)
    zp, xd = [], []
    for side in (lhs, rhs):
        a, b = _singular_sets(side)
        zp += a
        xd += b
    worst = 0.0
    taken = 0
    tries = 0
    while taken < samples:
        tries += 1
        if tries > max_tries * samples:
            raise OracleError(f"could not find {samples} pole-free samples for {identity}")
        x, z = _draw(rng), _draw(rng)
        if any(abs(z - r) < MARGIN for r in zp):
            continue
        if any(_x_near_zero(f, x, MARGIN) for f in xd):
            continue
        try:
            l, r = _evaluate(lhs, x, z), _evaluate(rhs, x, z)
        except (PoleProximityError, ZeroDivisionError, OverflowError):
            continue
        res = abs(l - r) / (1 + max(abs(l), abs(r)))
        if math.isnan(res):
            res = math.inf
        worst = max(worst, res)
        taken += 1
    return OracleReport(identity, taken, worst, tol, worst < tol, seed)


# ---------------------------------------------------------------------------
# Truncated power series in a small increment h

def _s_mul(a, b, n):
    out = [0j] * n
    for i, u in enumerate(a[:n]):
        if u:
            for j in range(min(len(b), n - i)):
                out[i + j] += u * b[j]
    return out


def _s_inv(a, n):
    out = [0j] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        acc = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out[k] = -acc / a[0]
    return out


def _s_exp(rate, n):
    out = [1 + 0j]
    for j in range(1, n):
        out.append(out[-1] * rate / j)
    return out


def _s_poly(coeffs, t0, n):
    """Taylor coefficients of ``sum c_k t^k`` at ``t0``."""
    out = [0j] * n
    for k, c in enumerate(coeffs):
        if not c:
            continue
        for j in range(min(k, n - 1) + 1):
            out[j] += c * math.comb(k, j) * t0 ** (k - j)
    return out


def _s_polyexp(f: PolyExp, x0, n):
    out = [0j] * n
    for lam, p in f.terms:
        lc = complex(lam)
        ser = _s_mul(_s_poly([complex(v) for v in p.c], x0, n), _s_exp(lc, n), n)
        scale = cmath.exp(lc * x0)
        for j in range(n):
            out[j] += scale * ser[j]
    return out


def _z_derivatives(W: WaveForm, x: complex, z0: complex, order: int) -> list:
    n = order + 1
    cx = [polyexp_eval(c, x) for c in W.coeffs]
    num = _s_poly(cx, z0, n)
    den = _s_poly([complex(v) for v in W.zden.c], z0, n)
    ser = _s_mul(_s_mul(num, _s_inv(den, n), n), _s_exp(x, n), n)
    d = polyexp_eval(W.xden.expand(), x)
    base = cmath.exp(x * z0) / d
    return [base * ser[k] * math.factorial(k) for k in range(n)]


def _x_derivatives(W: WaveForm, x0: complex, z: complex, order: int) -> list:
    n = order + 1
    num = [0j] * n
    zk = 1 + 0j
    for c in W.coeffs:
        s = _s_polyexp(c, x0, n)
        for j in range(n):
            num[j] += s[j] * zk
        zk *= z
    den = _s_polyexp(W.xden.expand(), x0, n)
    ser = _s_mul(_s_mul(num, _s_inv(den, n), n), _s_exp(z, n), n)
    base = cmath.exp(x0 * z) / W.zden.evalf(z)
    return [base * ser[k] * math.factorial(k) for k in range(n)]


def _ratfun_value(r, z: complex) -> complex:
    # expanded high-degree coefficients lose digits near clustered roots in
    # floating point; evaluate exactly at the (exactly representable) sample
    if r.den.degree == 0 and r.num.degree <= 1:
        return r.evalf(z)
    return complex(r(GQ(Fraction(z.real), Fraction(z.imag))))


def z_action(T: TransDiffOpZ, W: WaveForm) -> NumericSide:
    """``T`` applied to ``W`` numerically: shifts by re-evaluation, derivatives by Taylor series."""
    poles = []
    roots = W.z_roots()
    for lam, cs in T.terms:
        poles += [r - complex(lam) for r in roots]
        for r in cs:
            if r.den.degree > 0:
                poles += list(r.den.roots())

    def fn(x, z):
        total = 0j
        for lam, cs in T.terms:
            ders = _z_derivatives(W, x, z + complex(lam), len(cs) - 1)
            for k, r in enumerate(cs):
                if not r.is_zero():
                    total += _ratfun_value(r, z) * ders[k]
        return total

    dens = [W.xden.expand()] if W.xden.factors else []
    return NumericSide(fn, poles, dens)


def x_action(L: DiffOpX, W: WaveForm) -> NumericSide:
    """``L`` applied to ``W`` numerically through Taylor series in x."""
    dens = [W.xden.expand()] if W.xden.factors else []
    dens += [a.den.expand() for a in L.coeffs if a.den.factors]

    def fn(x, z):
        ders = _x_derivatives(W, x, z, L.order)
        total = 0j
        for i, a in enumerate(L.coeffs):
            if not a.is_zero():
                total += a.evalf(x) * ders[i]
        return total

    return NumericSide(fn, list(W.z_roots()), dens)
