import pytest

from tbispec.core import Lp
from tbispec.oracle import NumericSide, OracleError, check_identity, x_action, z_action
from tbispec.waveform import WaveForm

EXZ = WaveForm.exp_xz()


def test_identical_sides_have_zero_residual():
    rep = check_identity(EXZ, EXZ, samples=20)
    assert rep.passed and rep.max_residual == 0 and rep.samples == 20


def test_soliton_theorem_identity(soliton_data):
    rep = check_identity(soliton_data.eigen_lhs(), soliton_data.eigen_rhs(), samples=20, tol=1e-6)
    assert rep.passed and rep.samples == 20


def test_perturbed_rhs_fails(soliton_data):
    d = soliton_data
    bad = WaveForm([c + (1 if k == 0 else 0) for k, c in enumerate(d.eigen_rhs().coeffs)],
                   d.eigen_rhs().xden, d.eigen_rhs().zden)
    rep = check_identity(d.eigen_lhs(), bad, samples=20)
    assert not rep.passed


def test_numeric_actions_agree_with_exact_results(cm_data_x3, soliton_data):
    for d in (cm_data_x3, soliton_data):
        assert check_identity(z_action(d.lambda_op, d.psi), d.eigen_rhs()).passed
        L = Lp(d.C, d.q, d.kbar, d.tau)
        assert check_identity(x_action(L, d.psi), d.psi * d.q).passed


def test_report_is_reproducible(cm_data):
    a = check_identity(cm_data.eigen_lhs(), cm_data.eigen_rhs(), seed=4)
    b = check_identity(cm_data.eigen_lhs(), cm_data.eigen_rhs(), seed=4)
    assert a == b and a.seed == 4
    assert a.as_dict()["identity"] == "identity"
    assert "pass" in a.line()


def test_no_pole_free_samples():
    # poles on a 0.1 grid leave no point of the annulus outside the margin
    grid = [complex(a / 10, b / 10) for a in range(-16, 17) for b in range(-16, 17)]
    side = NumericSide(lambda x, z: 0j, grid, [])
    with pytest.raises(OracleError):
        check_identity(side, side, samples=5, max_tries=3)


def test_invalid_sample_count():
    with pytest.raises(ValueError):
        check_identity(EXZ, EXZ, samples=0)
