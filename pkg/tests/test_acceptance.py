"""Acceptance criteria 1 to 11, one verdict line each.

Lines are printed as each criterion finishes and again in the terminal summary.
"""

import itertools
import random
import time

import pytest

from conftest import E, X, cm_space, soliton_space
from tbispec.core import (ConditionSpace, DegenerateSpace, Distribution, Lp, ad_operators, factorize,
                          is_point_supported, lambda_family_commute, qpoly, random_condition_space,
                          run_pipeline, tau, wavefunction)
from tbispec.exactfield import GQ, NotPolyExp, Poly, PolyExp, polyexp_exact_divide
from tbispec.opx import DiffOpX, right_divide
from tbispec.opz import b_map
from tbispec.oracle import check_identity, x_action, z_action
from tbispec.parsing import parse_tdiffop, parse_waveform
from tbispec.waveform import WaveForm, diffop_symbol, waveform_apply_x, waveform_apply_z

ONE = PolyExp.const(1)
TOL = 1e-6
SAMPLES = 20
FUZZ_COUNT = 20
FUZZ_SEED = 1
FUZZ_MAX_QDEG = 5

PSI_CM = "(1+(2+x-(2*x+x^2)*z)/(x^2*z^2))*exp(x*z)"
PSI_SOLITON = "(1-(6+(3*z-2)*exp(2*x)+2*z-z*exp(-2*x))/((exp(x)+exp(-x))^2*z^2))*exp(x*z)"
SOLITON_G = E(-2) * (ONE + E(2)) ** 2
SOLITON_PI = E(-3) * (ONE + E(2)) ** 4

CM_OPERATOR_AS_GIVEN = ("Dz^3 + 3/(z-z^2)*Dz^2 - (6*z^2-12*z+3)/(z^3*(z-1)^2)*Dz"
                        " + (12*z-6)/(z^2*(z-1)^2)")
CM_OPERATOR_CORRECTED = CM_OPERATOR_AS_GIVEN.replace("z^3*(z-1)^2", "z^2*(z-1)^2")
# with "z^n" taken as z^2 and a "+" inserted before the S[1] term
SOLITON_OPERATOR = (
    "z^-2*((20*z+11*z^2-8*z^3+z^4)*S[-3] + (60-68*z-z^2+8*z^3+z^4)*S[5]"
    " + (-36+24*z+16*z^2-16*z^3+4*z^4)*S[-1] + (-44-88*z-8*z^2+16*z^3+4*z^4)*S[3]"
    " + (-12-16*z-2*z^2+6*z^4)*S[1])*z^2/(z^4-2*z^3-z^2+2*z)")

RESULTS = {}


def record(n, title, ok, detail=""):
    line = f"criterion {n:>2} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    RESULTS[n] = line
    print(line)
    return ok


# ---------------------------------------------------------------------------

class Case:
    """One condition space with everything criteria 3, 5 and 10 need."""

    def __init__(self, name, C, g=None):
        self.name = name
        self.C = C
        self.data = run_pipeline(C, g=g, certify=False)
        d = self.data
        self.L = Lp(C, d.q, d.kbar, d.tau)
        _, self.remainder = right_divide(d.kbar * DiffOpX.from_poly_in_D(d.q), d.kbar)
        self.eq1_lhs = waveform_apply_x(self.L, d.psi)
        self.eq1_rhs = d.psi * d.q


@pytest.fixture(scope="module")
def cases():
    rng = random.Random(FUZZ_SEED)
    out = [Case("calogero_moser", cm_space()), Case("soliton", soliton_space()),
           Case("soliton_cosh2", soliton_space(), SOLITON_G)]
    for i in range(FUZZ_COUNT):
        C = random_condition_space(rng, max_dim=3, max_order=2, max_qdeg=FUZZ_MAX_QDEG)
        out.append(Case(f"fuzz{i}", C))
    return out


@pytest.fixture(scope="module")
def cm_x3():
    return run_pipeline(cm_space(), g=X * E(-1))


@pytest.fixture(scope="module")
def cm_ad():
    d = run_pipeline(cm_space(), certify=False)
    L = Lp(d.C, d.q, d.kbar, d.tau)
    return d, L, {m: ad_operators(d, L, d.q, m) for m in range(6)}


# ---------------------------------------------------------------------------

def test_criterion_1_calogero_moser():
    t0 = time.perf_counter()
    C = cm_space()
    psi, t = wavefunction(C), tau(C)
    elapsed = time.perf_counter() - t0
    ok = psi == parse_waveform(PSI_CM) and t == X ** 2 * E(1) and elapsed < 1.0
    assert record(1, "Calogero-Moser psi and tau", ok, f"tau = {t.to_text()}, {elapsed:.3f}s")


def test_criterion_2_soliton():
    t0 = time.perf_counter()
    C = soliton_space()
    psi, q = wavefunction(C), qpoly(C)
    elapsed = time.perf_counter() - t0
    ok = psi == parse_waveform(PSI_SOLITON) and q == Poly([0, 2, -1, -2, 1]) and elapsed < 1.0
    assert record(2, "soliton psi and q_C", ok,
                  f"q_C = {q.to_text('z', descending=True, spaced=False)}, {elapsed:.3f}s")


def test_criterion_3_main_identity(cases):
    bad = []
    for c in cases:
        d = c.data
        certified = d.Qbar.has_polyexp_coeffs() and isinstance(d.g, PolyExp)
        if not (certified and d.pi == d.g * d.tau and d.eigen_lhs() == d.eigen_rhs()):
            bad.append(c.name)
    fuzz = sum(1 for c in cases if c.name.startswith("fuzz"))
    assert record(3, "Lambda psi = pi psi exactly", not bad and fuzz >= 20,
                  f"2 examples (3 multipliers) + {fuzz} fuzzed spaces" + (f", failing {bad}" if bad else ""))


def test_criterion_4_soliton_eigenvalue():
    C = soliton_space()
    try:
        f = factorize(C, SOLITON_G)
    except NotPolyExp:
        # second branch: the expected eigenvalue divided by tau must be the multiplier
        quotient = polyexp_exact_divide(SOLITON_PI, tau(C))
        ok = quotient == SOLITON_G
        assert record(4, "soliton eigenvalue", ok,
                      "Q o g did not certify; pi_expected / tau_C = " + quotient.to_text())
        return
    d = run_pipeline(C, g=SOLITON_G)
    ok = f.pi == SOLITON_PI and d.eigen_lhs() == d.eigen_rhs()
    assert record(4, "soliton eigenvalue e^{-3x}(1+e^{2x})^4", ok, "pi = " + f.pi.to_text())


def test_criterion_5_lp_identity(cases):
    bad = [c.name for c in cases if not (c.remainder.is_zero() and c.eq1_lhs == c.eq1_rhs)]
    assert record(5, "L_q psi = q(z) psi and zero remainder", not bad,
                  f"{len(cases)} spaces" + (f", failing {bad}" if bad else ""))


def _random_monomial(rng):
    lam = rng.choice([GQ(0), GQ(1), GQ(-1), GQ(2), GQ(0, 1), GQ(1, -1)])
    coeff = rng.choice([1, -1, 2, GQ(0, 1)])
    f = PolyExp([(lam, Poly.monomial(rng.randint(0, 2), GQ.coerce(coeff)))])
    return DiffOpX([0] * rng.randint(0, 2) + [f])


def _random_operator(rng):
    return sum((_random_monomial(rng) for _ in range(rng.randint(1, 3))), DiffOpX())


def test_criterion_6_anti_isomorphism():
    rng = random.Random(6)
    pairs = [(_random_monomial(rng), _random_monomial(rng)) for _ in range(100)]
    anti = sum(b_map(L * M) == b_map(M) * b_map(L) for L, M in pairs)
    ops = [_random_operator(rng) for _ in range(25)]
    exz = WaveForm.exp_xz()
    defining = sum(waveform_apply_z(b_map(L), exz) == diffop_symbol(L) for L in ops)
    assert record(6, "b anti-isomorphism", anti == 100 and defining == 25,
                  f"{anti}/100 monomial pairs, {defining}/25 defining relations")


def test_criterion_7_ad_chain(cm_ad):
    d, L, ops = cm_ad
    A5, Ah5, B5, Bh5 = ops[5]
    vanish = B5.is_zero() and Bh5.is_zero()
    ident = all(waveform_apply_x(A, d.psi) == waveform_apply_z(Ah, d.psi)
                and waveform_apply_x(B, d.psi) == waveform_apply_z(Bh, d.psi)
                for m, (A, Ah, B, Bh) in ops.items() if m <= 3)
    ok = L.order == 4 and vanish and ident
    assert record(7, "Calogero-Moser ad-chain", ok,
                  f"ord L_p = {L.order}, B_5 = Bhat_5 = 0: {vanish}, A/B identities m <= 3: {ident}")


def test_criterion_8_commutative_family():
    out = {}
    for name, C in (("calogero_moser", cm_space()), ("soliton", soliton_space())):
        d = run_pipeline(C, certify=False)
        for label, h in (("1+x", ONE + X), ("e^{2x}", E(2))):
            out[f"{name}/{label}"] = lambda_family_commute(C, h, d)
    ok = all(out.values())
    assert record(8, "[Lambda_g, Lambda_gh] = 0", ok,
                  ", ".join(f"{k}: {v}" for k, v in out.items()))


def _cm_as_given_residual(cm_x3):
    T = parse_tdiffop(CM_OPERATOR_AS_GIVEN)
    op_residual = T - cm_x3.lambda_op
    wave_residual = waveform_apply_z(T, cm_x3.psi) - cm_x3.psi * X ** 3
    return op_residual, wave_residual


def test_criterion_9_reference_operators(cm_x3):
    sol = run_pipeline(soliton_space(), g=SOLITON_G)
    T_sol = parse_tdiffop(SOLITON_OPERATOR)
    soliton_ok = (waveform_apply_z(T_sol, sol.psi) == sol.psi * SOLITON_PI
                  and T_sol == sol.lambda_op)
    T_cm = parse_tdiffop(CM_OPERATOR_CORRECTED)
    corrected_ok = waveform_apply_z(T_cm, cm_x3.psi) == cm_x3.psi * X ** 3 and T_cm == cm_x3.lambda_op
    op_residual, wave_residual = _cm_as_given_residual(cm_x3)
    as_given_ok = wave_residual.is_zero()
    record(9, "reference operators", soliton_ok and as_given_ok,
           f"soliton with two corrections exact: {soliton_ok}; "
           f"Calogero-Moser as given: {'exact' if as_given_ok else 'residual operator ' + op_residual.to_text()}; "
           f"Calogero-Moser with z^2(z-1)^2 in the Dz coefficient exact: {corrected_ok}")
    # the corrected operators must hold; the as-given check is the xfail below
    assert soliton_ok and corrected_ok


@pytest.mark.xfail(strict=True, reason="as given, the Dz coefficient has z^3 where z^2 is needed")
def test_criterion_9_calogero_moser_as_given(cm_x3):
    op_residual, wave_residual = _cm_as_given_residual(cm_x3)
    print("residual operator:", op_residual.to_text())
    print("residual Lambda psi - x^3 psi:", wave_residual.to_text())
    assert wave_residual.is_zero()


def test_criterion_10_oracle(cases, cm_ad):
    reports = []
    for c in cases:
        d = c.data
        reports.append(check_identity(d.eigen_lhs(), d.eigen_rhs(), SAMPLES, TOL,
                                      identity=f"{c.name}: theorem"))
        reports.append(check_identity(z_action(d.lambda_op, d.psi), d.eigen_rhs(), SAMPLES, TOL,
                                      identity=f"{c.name}: theorem, numeric action"))
        reports.append(check_identity(c.eq1_lhs, c.eq1_rhs, SAMPLES, TOL,
                                      identity=f"{c.name}: L_q"))
        reports.append(check_identity(x_action(c.L, d.psi), c.eq1_rhs, SAMPLES, TOL,
                                      identity=f"{c.name}: L_q, numeric action"))
    d, _, ops = cm_ad
    for m, (A, Ah, B, Bh) in ops.items():
        if m > 3:
            continue
        reports.append(check_identity(waveform_apply_x(A, d.psi), waveform_apply_z(Ah, d.psi),
                                      SAMPLES, TOL, identity=f"ad A_{m}"))
        reports.append(check_identity(x_action(A, d.psi), z_action(Ah, d.psi),
                                      SAMPLES, TOL, identity=f"ad A_{m}, numeric action"))
        reports.append(check_identity(waveform_apply_x(B, d.psi), waveform_apply_z(Bh, d.psi),
                                      SAMPLES, TOL, identity=f"ad B_{m}"))
        reports.append(check_identity(x_action(B, d.psi), z_action(Bh, d.psi),
                                      SAMPLES, TOL, identity=f"ad B_{m}, numeric action"))
    failed = [r.line() for r in reports if not r.passed or r.samples < SAMPLES]
    for line in failed:
        print(line)
    worst = max(r.max_residual for r in reports)
    assert record(10, "oracle concordance", not failed,
                  f"{len(reports)} identities x {SAMPLES} points, max residual {worst:.1e}")


def _point_supported_brute_force(u, v, keys):
    """Search small combinations of the input basis for single-point elements.

    With entries in {-1, 0, 1} every one-point direction of the span is
    proportional to a combination with coefficients in {-1, 0, 1}.
    """
    found = []
    for a, b in itertools.product((-1, 0, 1), repeat=2):
        w = [a * s + b * t for s, t in zip(u, v)]
        support = {keys[i][0] for i, c in enumerate(w) if c}
        if len(support) == 1:
            found.append(w)
    for w1, w2 in itertools.combinations(found, 2):
        if any(w1[i] * w2[j] - w1[j] * w2[i] for i in range(4) for j in range(i + 1, 4)):
            return True
    return False


def test_criterion_11_point_supported():
    keys = [(0, 0), (0, 1), (1, 0), (1, 1)]
    vectors = [v for v in itertools.product((-1, 0, 1), repeat=4) if any(v)]
    seen, checked, disagree = set(), 0, []
    for u, v in itertools.combinations(vectors, 2):
        basis = [Distribution([((GQ(l), n), GQ(c)) for (l, n), c in zip(keys, w) if c]) for w in (u, v)]
        try:
            C = ConditionSpace(basis)
        except DegenerateSpace:
            continue
        checked += 1
        key = C.to_text()
        if key in seen:
            continue
        seen.add(key)
        if is_point_supported(C) != _point_supported_brute_force(u, v, keys):
            disagree.append(key)
    examples = is_point_supported(cm_space()) and not is_point_supported(soliton_space())
    ok = examples and not disagree
    assert record(11, "point-supported predicate", ok,
                  f"examples correct: {examples}; {len(seen)} distinct spaces from {checked} bases, "
                  f"{len(disagree)} disagreements")
