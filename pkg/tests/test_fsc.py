import numpy as np
import pytest

from vertexfsc.errors import QuadratureFailure
from vertexfsc.models import ModelSpec, transfer_operator
from vertexfsc.spectra import groundstate
from vertexfsc.fsc import (
    bulk_duality_residual, bulk_free_energy, default_extraction_u,
    extract_c24, inversion_residual, log_kappa, log_kappa_bar, theta_of,
    vbs_extrapolate,
)


def spec_of(family, pq, series="principal", gamma=0.0, N=None):
    if N is None:
        N = {"A11": 2, "A22": 4, "A21": 3}[family]
    return ModelSpec(family=family, pq=pq, series=series, gamma=gamma,
                     n_sites=N)


# spot values frozen from a 30-digit mpmath evaluation of the t-integrals,
# at the strip centers plus two off-center dual points
KAPPA_ORACLE = [
    ("A11", (4, 5), "principal", 0.1 * np.pi, 0.10752290398053822),
    ("A22", (4, 5), "principal", 0.15 * np.pi, 0.3353795725321544),
    ("A22", (-4, 5), "dual", 0.05 * np.pi, 0.34407531340240727),
    ("A22", (-4, 5), "dual", 0.25 * np.pi, 1.0590887784325639),
    ("A21", (4, 5), "principal", 0.15 * np.pi, 0.32741891600651724),
]


def test_log_kappa_spot_values():
    for family, pq, series, u, expect in KAPPA_ORACLE:
        spec = spec_of(family, pq, series)
        assert log_kappa(spec, u) == pytest.approx(expect, abs=1e-11)


def test_log_kappa_a11_small_u_limit():
    # kappa(0) kappa(lam) -> 1
    spec = spec_of("A11", (4, 5))
    total = log_kappa(spec, 1e-7) + log_kappa(spec, spec.lam - 1e-7)
    assert abs(total) < 1e-5


def test_log_kappa_rejects_nonconvergent_point():
    with pytest.raises(QuadratureFailure):
        log_kappa(spec_of("A11", (4, 5)), 0.0)


def test_kappa_bar_is_crossing_partner():
    spec = spec_of("A21", (4, 5))
    u = 0.3 * spec.lam
    assert log_kappa_bar(spec, u) == pytest.approx(
        log_kappa(spec, spec.lam - u), abs=1e-14)
    with pytest.raises(ValueError):
        log_kappa_bar(spec_of("A11", (4, 5)), u)


@pytest.mark.parametrize("family,pq,series,scale", [
    ("A11", (4, 5), "principal", 0.5),
    ("A22", (4, 5), "principal", 1.0),
    ("A21", (4, 5), "principal", 1.0),
])
def test_inversion_relations(family, pq, series, scale):
    spec = spec_of(family, pq, series)
    for frac in np.linspace(0.05, 0.95, 10):
        u = frac * spec.lam * scale
        assert inversion_residual(spec, u) < 1e-9


def test_inversion_rejects_dual_a22():
    with pytest.raises(ValueError):
        inversion_residual(spec_of("A22", (-4, 5), "dual"), 0.3)


def test_dual_strip_involution():
    # T(lam, u) = T(pi - lam, pi - u) ties the dual regime to the principal
    spec = spec_of("A22", (-4, 5), "dual", N=6)
    for u in (0.2 * np.pi, 0.45 * np.pi):
        assert bulk_duality_residual(spec, u) < 1e-12


@pytest.mark.parametrize("family,pq,series,sizes", [
    ("A11", (4, 5), "principal", (4, 8, 12)),
    ("A22", (4, 5), "principal", (3, 5, 7, 9)),
    ("A22", (-4, 5), "dual", (4, 6, 8)),
])
def test_bulk_consistency_decay(family, pq, series, sizes):
    # (1/N) log T_N(u) + f_bulk(u) -> 0 faster than 1/N
    resid = []
    for N in sizes:
        spec = spec_of(family, pq, series, N=N)
        u = default_extraction_u(spec)
        val, _ = groundstate(transfer_operator(spec, u))
        resid.append(abs(np.log(abs(val)) / N + bulk_free_energy(spec, u)))
    slope = np.polyfit(np.log(sizes), np.log(resid), 1)[0]
    assert slope < -1.5


def test_theta_and_extraction_points():
    a11 = spec_of("A11", (4, 5))
    assert theta_of(a11, default_extraction_u(a11)) == pytest.approx(np.pi / 2)
    a22d = spec_of("A22", (-4, 5), "dual")
    assert default_extraction_u(a22d) == pytest.approx(1.5 * a22d.lam)
    assert theta_of(a22d, default_extraction_u(a22d)) \
        == pytest.approx(np.pi / 2)
    a21 = spec_of("A21", (4, 5))
    assert theta_of(a21, default_extraction_u(a21)) == pytest.approx(np.pi / 2)


def test_vbs_synthetic_sequences():
    ns = list(range(2, 13, 2))
    assert vbs_extrapolate([1 + 4 / n ** 2 for n in ns], ns=ns) \
        == pytest.approx(1.0, abs=1e-8)
    assert vbs_extrapolate([1 + 1 / n ** 2 + 0.3 / n ** 4 for n in ns],
                           ns=ns) == pytest.approx(1.0, abs=1e-6)
    assert vbs_extrapolate([2.5] * 6, ns=ns) == pytest.approx(2.5, abs=1e-12)
    # non-integer correction exponent, the case the omega scan is for
    assert vbs_extrapolate([1 + 2 / n ** 1.5 for n in ns], ns=ns) \
        == pytest.approx(1.0, abs=1e-6)


def test_vbs_input_validation():
    with pytest.raises(ValueError):
        vbs_extrapolate([1.0, 2.0])


def test_extract_c24_a11_untwisted():
    specs = [spec_of("A11", (4, 5), N=n) for n in range(2, 13, 2)]
    out = extract_c24(specs)
    assert [n for n, _ in out.raw] == list(range(2, 13, 2))
    assert out.extrapolated == pytest.approx(1.0, abs=1e-3)
    assert np.isfinite(out.error_estimate)


def test_extract_c24_rejects_bad_sets():
    specs = [spec_of("A11", (4, 5), N=n) for n in (2, 4)]
    with pytest.raises(ValueError):
        extract_c24(specs)
    specs = [spec_of("A11", (4, 5), N=n) for n in (2, 4, 4)]
    with pytest.raises(ValueError):
        extract_c24(specs)


def test_extract_c24_twist_monotonicity():
    # c - 24 Delta decreases in gamma^2, matching the closed formulas
    outs = []
    for g in (0.0, 0.2, 0.4):
        specs = [spec_of("A11", (4, 5), gamma=g, N=n) for n in (4, 6, 8, 10)]
        outs.append(extract_c24(specs).extrapolated)
    assert outs[0] > outs[1] > outs[2]
