import numpy as np
import pytest

from vertexfsc.laurent import lp_eval, lp_mul, lp_zeros
from vertexfsc.models import ModelSpec, transfer_operator
from vertexfsc import spectra
from vertexfsc.spectra import (
    default_u0, eigen_curve, groundstate, zero_pattern,
)


class StubOp:
    """Minimal operator interface for groundstate()."""

    def __init__(self, mat):
        self._m = np.asarray(mat, dtype=complex)
        self.dim = self._m.shape[0]

    def matvec(self, v):
        return self._m @ v

    def dense(self):
        return self._m


def a11(N=4, gamma=0.0):
    return ModelSpec(family="A11", pq=(4, 5), series="principal",
                     gamma=gamma, n_sites=N)


def test_groundstate_dense_toy():
    val, vec = groundstate(StubOp(np.diag([3.0, 1.0])))
    assert val == pytest.approx(3.0)
    assert np.allclose(vec, [1.0, 0.0])


def test_groundstate_arnoldi_matches_dense(monkeypatch):
    spec = a11(N=4, gamma=0.1)
    op = transfer_operator(spec, default_u0(spec))
    val_d, vec_d = groundstate(op)
    monkeypatch.setattr(spectra, "DENSE_CUTOFF", 1)
    val_a, vec_a = groundstate(transfer_operator(spec, default_u0(spec)))
    assert val_a == pytest.approx(val_d, rel=1e-9)
    assert abs(abs(np.vdot(vec_a, vec_d)) - 1.0) < 1e-8


def test_eigen_curve_reproduces_operator_eigenvalue():
    spec = a11(N=4, gamma=0.1)
    curve = eigen_curve(spec)  # internal invariants asserted by check=True
    # independent spot check away from u0
    u = 0.9
    op = transfer_operator(spec, u)
    w = op.matvec(curve.vector)
    assert np.linalg.norm(w - curve(u) * curve.vector) \
        < 1e-9 * np.linalg.norm(w)


def test_eigen_curve_periodicity():
    # the A11 eigenvalue has period pi: only exponents divisible by 4
    curve = eigen_curve(a11(N=4))
    assert all(k % 4 == 0 for k in curve.poly)
    for u in (0.3, 1.1 - 0.2j):
        assert curve(u + np.pi) == pytest.approx(curve(u), rel=1e-10)


def test_zero_symmetry_under_reflection():
    # groundstate zeros come in pairs mirrored through u -> lam - u
    spec = a11(N=6)
    curve = eigen_curve(spec)
    zs = [u for u, _ in lp_zeros(curve.poly)]
    for z in zs:
        mirrored = spec.lam - z
        d = min(min(abs(mirrored - z2 - k * np.pi) for z2 in zs)
                for k in (-1, 0, 1))
        assert d < 1e-6


def test_zero_pattern_classification():
    sin_u = {2: 1 / 2j, -2: -1 / 2j}
    # zeros of sin(u - 0.3) sit on the line Re(u) = 0.3
    shifted = {k: c * np.exp(-0.5j * k * 0.3) for k, c in sin_u.items()}
    rep = zero_pattern(shifted, [0.3, 1.0], tol=0.05)
    assert len(rep["on_line"][0.3]) == 1 and not rep["off_line"]
    rep = zero_pattern(shifted, [1.0], tol=0.05)
    assert len(rep["off_line"]) == 1
    # distances fold modulo the period: a zero at 0 matches the line 2*pi
    rep = zero_pattern(sin_u, [2 * np.pi], tol=0.05)
    assert len(rep["on_line"][2 * np.pi]) == 1


def test_zero_pattern_multiplicity():
    sin_u = {2: 1 / 2j, -2: -1 / 2j}
    rep = zero_pattern(lp_mul(sin_u, sin_u), [0.0], tol=0.01,
                       cluster_tol=1e-4)
    assert rep["on_line"][0.0] == [(pytest.approx(0.0, abs=1e-6), 2)]
