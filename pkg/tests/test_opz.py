import sympy as sp
import pytest
from hypothesis import given, settings, strategies as st

import reference as ref
from strategies import monomial_ops, polys, scalars, shifts, tdiffops
from tbispec.exactfield import GQ, NotPolyExp, Poly, PolyExp, RatExp
from tbispec.opx import DiffOpX
from tbispec.opz import RatFunZ, TransDiffOpZ, b_map, ratfun_shift, tdiff_mul

z = Poly.var()
Z = TransDiffOpZ.mult(RatFunZ.z())
Dz = TransDiffOpZ.Dz()
S = TransDiffOpZ.S
X = PolyExp.x()
D = DiffOpX.D()


def test_ratfun_lowest_terms():
    r = RatFunZ(z ** 2 - 1, 2 * z ** 2 + 2 * z)
    assert r.num == (z - 1).scale(GQ(1) / 2) and r.den == z
    assert RatFunZ(z, z) == RatFunZ(1)


def test_mul_examples():
    assert S(1) * Z == TransDiffOpZ.mult(RatFunZ(z + 1)) * S(1)
    assert Dz * Z == Z * Dz + 1
    assert tdiff_mul(Z * S(1), Z * S(-1)) == TransDiffOpZ.mult(RatFunZ(z * (z + 1)))


def test_shift_examples():
    assert ratfun_shift(RatFunZ(z ** 2), 1) == RatFunZ(z ** 2 + 2 * z + 1)
    assert ratfun_shift(RatFunZ(1, z), -1) == RatFunZ(1, z - 1)
    assert ratfun_shift(RatFunZ(z - 1, z), 1) == RatFunZ(z, z + 1)


def test_b_map_examples():
    assert b_map(D) == Z
    assert b_map(DiffOpX.mult(X)) == Dz
    assert b_map(DiffOpX.mult(PolyExp.exp(GQ(0, 1)))) == S(GQ(0, 1))
    assert b_map(DiffOpX.mult(X) * D) == Z * Dz
    assert b_map(D * DiffOpX.mult(X)) == Z * Dz + 1


def test_b_map_checked_on_exp_xz_with_sympy():
    L = DiffOpX.mult(X) * D
    e = sp.exp(ref.x * ref.z)
    assert sp.simplify(ref.apply_z(b_map(L), e) - ref.apply_x(L, e)) == 0


def test_b_map_requires_polyexp_coefficients():
    with pytest.raises(NotPolyExp):
        b_map(DiffOpX([RatExp(PolyExp.const(1), X)]))


def test_text_rendering():
    assert (Z * Dz * S(2)).to_text() == "(z)*Dz*S[2]"
    assert TransDiffOpZ().to_text() == "0"


# --- properties -----------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(monomial_ops(), monomial_ops())
def test_b_is_an_anti_homomorphism(L, M):
    assert b_map(L * M) == b_map(M) * b_map(L)


@settings(max_examples=30, deadline=None)
@given(tdiffops(), tdiffops(), tdiffops())
def test_associativity(A, B, C):
    assert (A * B) * C == A * (B * C)


@settings(max_examples=30, deadline=None)
@given(shifts, shifts)
def test_shifts_compose(a, b):
    assert S(a) * S(b) == S(GQ.coerce(a) + GQ.coerce(b))


@settings(max_examples=30, deadline=None)
@given(tdiffops(), tdiffops())
def test_differential_subring_closed(A, B):
    A = TransDiffOpZ([t for t in A.terms if not t[0]])
    B = TransDiffOpZ([t for t in B.terms if not t[0]])
    assert (A * B).is_differential()


@settings(max_examples=30, deadline=None)
@given(polys(2), polys(2).filter(lambda p: not p.is_zero()), scalars)
def test_shift_is_a_substitution(p, q, lam):
    r = ratfun_shift(RatFunZ(p, q), lam)
    want = (ref.poly(p, ref.z) / ref.poly(q, ref.z)).subs(ref.z, ref.z + ref.gq(lam))
    assert sp.simplify(ref.ratfunz(r) - want) == 0
