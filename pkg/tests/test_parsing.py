import pytest
from hypothesis import given, settings

from strategies import diffops, polyexps, polys, scalars, tdiffops, waveforms
from tbispec.exactfield import GQ, Poly, PolyExp, RatExp
from tbispec.opz import RatFunZ
from tbispec.parsing import (ParseError, parse_diffop, parse_poly, parse_polyexp, parse_ratexp,
                             parse_ratfunz, parse_scalar, parse_tdiffop, parse_waveform)

X = PolyExp.x()
E = PolyExp.exp
z = Poly.var()


@pytest.mark.parametrize("text,value", [
    ("3/4", GQ(3, 0) / 4), ("-i", GQ(0, -1)), ("(1+2*i)/2", GQ(1, 2) / 2), ("2^3", GQ(8)),
])
def test_scalars(text, value):
    assert parse_scalar(text) == value


def test_functions():
    assert parse_polyexp("x^2*exp(x) - exp(-x)") == X ** 2 * E(1) - E(-1)
    assert parse_polyexp("exp(x)^2*exp(i*x/2)") == E(GQ(2, 0) + GQ(0, 1) / 2)
    assert parse_ratexp("(x^2-1)/(x-1)") == RatExp(X + 1)
    assert parse_ratfunz("1/(z-1) - 1/z") == RatFunZ(1, z * (z - 1))
    assert parse_poly("z^4-2*z^3-z^2+2*z") == z * (z - 1) * (z + 1) * (z - 2)


def test_operators():
    assert parse_diffop("x*D^2 + D") == parse_diffop("D*x*D")
    assert parse_tdiffop("S[1]*z") == parse_tdiffop("(z+1)*S[1]")
    assert parse_tdiffop("z^-2*(z*S[-1])*z^2") == parse_tdiffop("(z-1)^2/z*S[-1]")


@pytest.mark.parametrize("text", [
    "", "x+", "exp(x*x)", "1/(x-x)", "x/D", "S[z]", "x**", "(1+x", "exp(x)^(1/2)",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        (parse_diffop if "D" in text else parse_tdiffop if "S" in text else parse_polyexp)(text)


def test_ratexp_is_not_polyexp():
    with pytest.raises(ParseError):
        parse_polyexp("1/x")


@settings(max_examples=40, deadline=None)
@given(scalars)
def test_scalar_round_trip(v):
    assert parse_scalar(v.to_text()) == v


@settings(max_examples=40, deadline=None)
@given(polyexps())
def test_polyexp_round_trip(f):
    assert parse_polyexp(f.to_text()) == f


@settings(max_examples=40, deadline=None)
@given(polys(3))
def test_poly_round_trip(p):
    assert parse_poly(p.to_text("z", descending=True, spaced=False)) == p


@settings(max_examples=30, deadline=None)
@given(diffops())
def test_diffop_round_trip(L):
    assert parse_diffop(L.to_text()) == L


@settings(max_examples=30, deadline=None)
@given(tdiffops())
def test_tdiffop_round_trip(T):
    assert parse_tdiffop(T.to_text()) == T


@settings(max_examples=30, deadline=None)
@given(waveforms())
def test_waveform_round_trip(W):
    assert parse_waveform(W.to_text()) == W


def test_pipeline_outputs_round_trip(cm_data, soliton_data_cosh2):
    for d in (cm_data, soliton_data_cosh2):
        assert parse_waveform(d.psi.to_text()) == d.psi
        assert parse_tdiffop(d.lambda_op.to_text()) == d.lambda_op
        assert parse_diffop(d.kbar.to_text()) == d.kbar
        assert parse_polyexp(d.pi.to_text()) == d.pi
