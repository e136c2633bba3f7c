import numpy as np
import pytest

from vertexfsc.errors import NonDivisible
from vertexfsc.laurent import lp_div, lp_eval, lp_zeros
from vertexfsc.models import ModelSpec, f_factor, f_poly
from vertexfsc.spectra import eigen_curve
from vertexfsc.fusion import (
    contour_zero_count, default_probe_grid, fuse, fused_value,
    one_minus_y_numerator, one_minus_z_numerator, tsystem_residual,
    y_functions, ysystem_residual,
)


def curve_and_fused(family, pq, series, gamma, N):
    spec = ModelSpec(family=family, pq=pq, series=series, gamma=gamma,
                     n_sites=N)
    curve = eigen_curve(spec)
    return spec, curve, fuse(spec, curve.poly)


def test_fuse_seed_and_exactness_a11():
    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.1, 4)
    # the scalar seed of the hierarchy is the f-factor polynomial
    f = f_poly(spec, -1)
    for k, c in f.items():
        assert F[(0, 0)][k] == pytest.approx(c)
    assert set(F) >= {(m, 0) for m in range(5)}


def test_fused_value_matches_polys():
    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.0, 4)
    for u in (0.3 + 0.2j, 1.0 - 0.5j):
        for m in (1, 2, 3):
            assert fused_value(spec, F, m, 0, u) \
                == pytest.approx(lp_eval(F[(m, 0)], u), rel=1e-9)


def test_one_plus_t_identity():
    # 1 + t^n assembled two ways: from the definition of t^n and from the
    # bilinear combination T^n_0 T^n_1 / (f_{-1} f_n)
    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.1, 4)
    lam = spec.lam
    yf = y_functions(spec, F)
    for u in default_probe_grid(spec, n_points=7):
        for n in (1, 2, 3):
            lhs = 1.0 + yf[f"t{n}"](u)
            rhs = (fused_value(spec, F, n, 0, u)
                   * fused_value(spec, F, n, 0, u + lam)
                   / (f_factor(spec, -1, u) * f_factor(spec, n, u)))
            assert lhs == pytest.approx(rhs, rel=1e-9)


def test_braid_asymptotics():
    # far up the imaginary axis the Y-functions approach twist-dependent
    # constants; at omega = 1 these are n(n+2)
    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.0, 4)
    yf = y_functions(spec, F)
    u_inf = 0.3 + 40j
    for n in (1, 2, 3):
        assert yf[f"t{n}"](u_inf) == pytest.approx(n * (n + 2), rel=1e-8)

    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.1, 4)
    yf = y_functions(spec, F)
    w = spec.omega
    for n in (1, 2, 3):
        expect = ((w ** n - w ** -n) * (w ** (n + 2) - w ** -(n + 2))
                  / (w - 1 / w) ** 2)
        assert yf[f"t{n}"](u_inf) == pytest.approx(expect, rel=1e-8)
    x_expect = (w ** 4 - w ** -4) / (w - 1 / w)
    assert yf["x"](u_inf) == pytest.approx(x_expect, rel=1e-8)


@pytest.mark.parametrize("family,pq,N", [
    ("A11", (4, 5), 4),
    ("A22", (4, 5), 4),
    ("A21", (4, 5), 3),
])
def test_tsystem_numeric(family, pq, N):
    spec, curve, F = curve_and_fused(family, pq, "principal", 0.1, N)
    assert tsystem_residual(spec, F) < 1e-10


def test_tsystem_symbolic_a11():
    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.1, 4)
    assert tsystem_residual(spec, F, mode="symbolic") < 1e-12


@pytest.mark.parametrize("family,pq,series,N,tol", [
    ("A11", (4, 5), "principal", 4, 1e-9),
    ("A11", (1, 5), "dual", 4, 1e-8),
    ("A22", (4, 5), "principal", 4, 1e-9),
    ("A21", (4, 5), "principal", 3, 1e-9),
])
def test_ysystem(family, pq, series, N, tol):
    spec, curve, F = curve_and_fused(family, pq, series, 0.1, N)
    yf = y_functions(spec, F)
    assert ysystem_residual(spec, yf) < tol


def test_dual_reciprocal_labels():
    spec, curve, F = curve_and_fused("A11", (1, 5), "dual", 0.1, 4)
    yf = y_functions(spec, F)
    assert "t1~" in yf and "x~" in yf
    u = default_probe_grid(spec)[3]
    assert yf["t1~"](u) == pytest.approx(1.0 / yf["t1"](u), rel=1e-10)


def test_fuse_rejects_corrupted_curve():
    spec, curve, F = curve_and_fused("A11", (4, 5), "principal", 0.0, 4)
    bad = dict(curve.poly)
    k = max(bad)
    bad[k] = bad[k] * (1 + 1e-4)
    with pytest.raises(NonDivisible):
        fuse(spec, bad)


def test_one_minus_z_numerator_factorization():
    # the numerator carries an exact f_{-1} factor
    spec, curve, F = curve_and_fused("A21", (4, 5), "principal", 0.0, 3)
    num = one_minus_z_numerator(spec, F)
    _, rnorm = lp_div(num, f_poly(spec, -1))
    assert rnorm < 1e-9


def test_one_minus_y_matches_direct_evaluation():
    spec, curve, F = curve_and_fused("A21", (4, 5), "principal", 0.0, 3)
    yf = y_functions(spec, F)
    num = one_minus_y_numerator(spec, F)
    top = spec.pq[1] - 1
    for u in (0.4 + 0.3j, 1.2 - 0.6j):
        denom = (fused_value(spec, F, 0, top, u)
                 * fused_value(spec, F, top, 0, u))
        assert lp_eval(num, u) / denom \
            == pytest.approx(1.0 - yf["y"](u), rel=1e-8)


def test_contour_zero_count():
    assert contour_zero_count(lambda u: np.sin(u) ** 2, (-1, 1, -1, 1)) == 2
    assert contour_zero_count(lambda u: np.cos(u), (-1, 1, -1, 1)) == 0
    zs = lp_zeros({2: 1 / 2j, -2: -1 / 2j}, strip=(-1, 1))
    assert len(zs) == 1 and contour_zero_count(
        lambda u: lp_eval({2: 1 / 2j, -2: -1 / 2j}, u), (-1, 1, -1, 1)) == 1
