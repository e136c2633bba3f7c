import math

import numpy as np
import pytest

from vertexfsc.errors import OutOfInterval
from vertexfsc.laurent import lp_eval
from vertexfsc.models import (
    ModelSpec, admissible_gamma_sup, f_factor, f_poly, rcheck, sector_basis,
    symbolic_transfer, transfer_operator, twist_matrix,
)

rng = np.random.default_rng(42)


def a11(N=4, gamma=0.0, series="principal"):
    pq = (4, 5) if series == "principal" else (1, 5)
    return ModelSpec(family="A11", pq=pq, series=series, gamma=gamma,
                     n_sites=N)


def test_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec(family="A12", pq=(4, 5), series="principal", gamma=0.0,
                  n_sites=4)
    with pytest.raises(ValueError):  # not coprime
        ModelSpec(family="A11", pq=(2, 4), series="principal", gamma=0.0,
                  n_sites=4)
    with pytest.raises(ValueError):  # principal needs p = p'-1
        ModelSpec(family="A11", pq=(2, 5), series="principal", gamma=0.0,
                  n_sites=4)
    with pytest.raises(ValueError):  # odd N for A11
        ModelSpec(family="A11", pq=(4, 5), series="principal", gamma=0.0,
                  n_sites=5)
    with pytest.raises(ValueError):  # A21 principal needs N = 0 mod 3
        ModelSpec(family="A21", pq=(4, 5), series="principal", gamma=0.0,
                  n_sites=4)
    with pytest.raises(OutOfInterval):
        ModelSpec(family="A11", pq=(4, 5), series="principal",
                  gamma=admissible_gamma_sup("A11", (4, 5), "principal"),
                  n_sites=4)


def test_spec_defaults_and_units():
    s = a11()
    assert s.sector == "zero_mag"
    assert s.lam == pytest.approx(np.pi / 5)
    assert s.local_dim == 2
    d = ModelSpec(family="A22", pq=(-4, 5), series="dual", gamma=0.0,
                  n_sites=4)
    assert d.lam == pytest.approx(9 * np.pi / 10)
    assert d.lam_bar == pytest.approx(np.pi / 10)
    t = ModelSpec(family="A21", pq=(4, 5), series="principal", gamma=0.0,
                  n_sites=6)
    assert t.sector == "equal_thirds"


def test_json_roundtrip():
    s = ModelSpec(family="A22", pq=(4, 5), series="principal", gamma=0.1,
                  n_sites=6)
    assert ModelSpec.from_json_dict(s.to_json_dict()) == s


def test_rcheck_identity_at_zero():
    # the local operator reduces to the identity at u = 0
    for family, lam in [("A11", np.pi / 5), ("A21", np.pi / 5),
                        ("A22", np.pi / 10)]:
        R = rcheck(family, lam, 0.0)
        assert np.allclose(R, np.eye(R.shape[0]), atol=1e-14)


def test_twist_matrix():
    g = 0.3
    w = np.exp(1j * g)
    assert np.allclose(twist_matrix("A11", g), np.diag([w, 1 / w]))
    assert np.allclose(twist_matrix("A22", g), np.diag([w, 1.0, 1 / w]))


def test_sector_dimensions():
    # counted combinatorially: C(N, N/2) spin-up placements,
    # sum_k N!/(k! k! (N-2k)!) up/down/vacancy splittings,
    # N!/((N/3)!)^3 equal-thirds arrangements
    assert len(sector_basis(a11(N=6))) == math.comb(6, 3)
    a22 = ModelSpec(family="A22", pq=(4, 5), series="principal", gamma=0.0,
                    n_sites=4)
    expect = sum(math.factorial(4) // (math.factorial(k) ** 2
                                       * math.factorial(4 - 2 * k))
                 for k in range(3))
    assert len(sector_basis(a22)) == expect == 19
    a21 = ModelSpec(family="A21", pq=(4, 5), series="principal", gamma=0.0,
                    n_sites=6)
    assert len(sector_basis(a21)) == math.factorial(6) // 2 ** 3 == 90


@pytest.mark.parametrize("spec", [
    a11(N=4, gamma=0.1),
    ModelSpec(family="A22", pq=(4, 5), series="principal", gamma=0.1,
              n_sites=4),
    ModelSpec(family="A21", pq=(4, 5), series="principal", gamma=0.1,
              n_sites=3),
])
def test_commuting_family(spec):
    u1, u2 = 0.31, -0.77
    T1 = transfer_operator(spec, u1).dense()
    T2 = transfer_operator(spec, u2).dense()
    comm = T1 @ T2 - T2 @ T1
    scale = np.linalg.norm(T1) * np.linalg.norm(T2)
    assert np.linalg.norm(comm) < 1e-12 * scale


def test_f_poly_matches_f_factor():
    for spec in [a11(N=4), ModelSpec(family="A22", pq=(4, 5),
                                     series="principal", gamma=0.0,
                                     n_sites=4)]:
        for k in (-3, -1, 0, 2):
            p = f_poly(spec, k)
            for u in rng.normal(size=4) + 1j * rng.normal(size=4):
                assert lp_eval(p, u) == pytest.approx(f_factor(spec, k, u),
                                                      rel=1e-10)


def test_symbolic_transfer_matches_numeric():
    spec = a11(N=2, gamma=0.1)
    sym = symbolic_transfer(spec)
    for u in [0.17, 0.9 - 0.4j]:
        num = transfer_operator(spec, u).dense()
        got = np.array([[lp_eval(sym[i, j], u) for j in range(num.shape[1])]
                        for i in range(num.shape[0])])
        assert np.allclose(got, num, atol=1e-10)


def test_untwisted_limit():
    # gamma = 0 twist insertion is the plain auxiliary trace
    spec0 = a11(N=4, gamma=0.0)
    T = transfer_operator(spec0, 0.41)
    assert np.allclose(T._theta, np.ones(2))
    vals = np.linalg.eigvals(T.dense())
    # the largest eigenvalue of the untwisted six-vertex sector matrix is
    # real positive in the physical neighborhood
    top = vals[np.argmax(np.abs(vals))]
    assert abs(top.imag) < 1e-10 * abs(top)
