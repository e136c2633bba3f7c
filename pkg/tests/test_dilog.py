import numpy as np
import pytest

from vertexfsc.errors import BranchCut, OutOfInterval
from vertexfsc.models import ModelSpec, admissible_gamma_sup
from vertexfsc.dilog import (
    DilogCase, I_pm_eval, default_phi_grid, identity_residual, identity_terms,
    rogers_L, rogers_L_deriv,
)

PI2_6 = np.pi ** 2 / 6


def test_special_values():
    assert rogers_L(0.0) == 0
    assert rogers_L(1.0) == pytest.approx(PI2_6)
    assert rogers_L(0.5) == pytest.approx(PI2_6 / 2, abs=1e-14)


def test_euler_reflection():
    # L(z) + L(1-z) = pi^2/6 on (0, 1)
    for z in (0.1, 0.37, 0.81):
        assert rogers_L(z) + rogers_L(1 - z) == pytest.approx(PI2_6)


def test_cut_raises_without_continuation():
    with pytest.raises(BranchCut):
        rogers_L(2.0)
    with pytest.raises(BranchCut):
        rogers_L(-0.5)
    # continuation=True returns the principal branch instead
    assert np.isfinite(rogers_L(2.0, continuation=True).real)


def test_derivative_matches_finite_difference():
    h = 1e-6
    for z in (0.3, 0.7 + 0.2j):
        fd = (rogers_L(z + h) - rogers_L(z - h)) / (2 * h)
        assert rogers_L_deriv(z) == pytest.approx(fd, rel=1e-8)


@pytest.mark.parametrize("identity_id", [
    "A11_principal", "A11_dual", "A22_principal", "A22_dual",
    "A22_dual_minus", "A21_dual",
])
@pytest.mark.parametrize("N", [2, 3, 5, 8])
def test_identities(identity_id, N):
    for phi in default_phi_grid(N):
        case = DilogCase(identity_id=identity_id, n_param=N, phi=phi)
        assert identity_residual(case) < 1e-12


def test_identity_terms_at_untwisted_point():
    # at phi -> 0 the A11 terms become L(n(n+2)/(n+1)^2) plus the doubled pair
    terms = identity_terms("A11_principal", 4, 1e-8)
    assert len(terms) == 4
    assert terms[0][1] == pytest.approx(3 / 4, rel=1e-6)


def test_case_validation():
    with pytest.raises(ValueError):
        DilogCase(identity_id="bogus", n_param=4, phi=0.1j)
    with pytest.raises(ValueError):
        DilogCase(identity_id="A11_principal", n_param=1, phi=0.1j)


def i_pm(family, pq, n_fracs):
    spec = ModelSpec(family=family, pq=pq, series="principal", gamma=0.0,
                     n_sites=2 if family == "A11" else 4)
    sup = admissible_gamma_sup(family, pq, "principal")
    omegas = [np.exp(1j * g) for g in np.linspace(0.0, 0.95 * sup, n_fracs)]
    return I_pm_eval(spec, omegas)


def test_i_pm_values_and_constancy():
    out = i_pm("A11", (2, 3), 5)
    assert out["I_plus"][0] == pytest.approx(2 * np.pi ** 2 / 3)
    assert out["I_minus"][0] == pytest.approx(np.pi ** 2 / 3)
    assert np.ptp(out["I_plus"]) < 1e-12
    assert np.ptp(out["I_minus"]) < 1e-12


def test_i_pm_constancy_past_branch_point():
    # the A22 admissible interval extends past the twisted factor's passage
    # through -1; the continued sums must stay flat
    out = i_pm("A22", (4, 5), 7)
    assert np.ptp(out["I_plus"]) < 1e-12
    assert np.ptp(out["I_minus"]) < 1e-12
    assert out["I_plus"][0] == pytest.approx(4 * np.pi ** 2 / 3)


def test_i_pm_rejects_inadmissible_twist():
    spec = ModelSpec(family="A11", pq=(2, 3), series="principal", gamma=0.0,
                     n_sites=2)
    with pytest.raises(OutOfInterval):
        I_pm_eval(spec, [np.exp(2j)])
