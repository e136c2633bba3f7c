# Model definitions: parameters, local weights, R-matrices, twist matrices,
# sector bases and single-row transfer operators.
#
# Families:
#   A11 - six-vertex model, local space C^2
#   A21 - 15-vertex model, local space C^3
#   A22 - Izergin-Korepin 19-vertex model, local space C^3
#
# The integer pair is (p, p') for A11/A21 and (a, b) for A22.  The crossing
# parameter is lam = pi(p'-p)/p' resp. pi(b-a)/(2b).

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleSector, OutOfInterval, SingularWeight
from .laurent import lp_eval, lp_from_samples, lp_mul, lp_prune

FAMILIES = ("A11", "A21", "A22")

# exponent of e^{iu} contributed by one site (conservative bound)
SITE_DEGREE = {"A11": 1, "A21": 1, "A22": 2}


def admissible_gamma_sup(family, pq, series):
    """Upper end of the admissible twist interval (0, sup)."""
    n = pq[1]  # p' or b
    if family == "A11":
        return np.pi / n
    if series == "principal":
        return 2 * np.pi * (n - 1) / n ** 2
    return 2 * np.pi / (n + 1)


@dataclass(frozen=True)
class ModelSpec:
    """Single source of truth for one model instance."""

    family: str
    pq: tuple
    series: str  # "principal" or "dual"
    gamma: float
    n_sites: int
    sector: str = ""  # filled per family when omitted

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.series not in ("principal", "dual"):
            raise ValueError(f"unknown series {self.series!r}")
        lo, hi = self.pq
        if math.gcd(abs(lo), abs(hi)) != 1:
            raise ValueError(f"pair {self.pq} not coprime")
        if self.family in ("A11", "A21"):
            if self.series == "principal" and lo != hi - 1:
                raise ValueError("principal series needs p = p'-1")
            if self.series == "dual" and lo != 1:
                raise ValueError("dual series needs p = 1")
        else:
            if self.series == "principal" and lo != hi - 1:
                raise ValueError("principal series needs a = b-1")
            if self.series == "dual" and lo != 1 - hi:
                raise ValueError("dual series needs a = 1-b")
        N = self.n_sites
        if self.family == "A11" and N % 2:
            raise ValueError("A11 needs even N")
        if self.family == "A21":
            mod = 3 if self.series == "principal" else 6
            if N % mod:
                raise ValueError(f"A21 {self.series} needs N = 0 mod {mod}")
        if self.family == "A22" and self.series == "dual" and N % 2:
            raise ValueError("A22 dual needs even N")
        sup = admissible_gamma_sup(self.family, self.pq, self.series)
        if not (0 <= self.gamma < sup):
            raise OutOfInterval(
                f"gamma={self.gamma} outside [0, {sup:.6f})")
        if not self.sector:
            default = "equal_thirds" if self.family == "A21" else "zero_mag"
            object.__setattr__(self, "sector", default)
        if self.sector not in ("zero_mag", "equal_thirds"):
            raise ValueError(f"unknown sector {self.sector!r}")

    @property
    def lam(self):
        lo, hi = self.pq
        if self.family == "A22":
            return np.pi * (hi - lo) / (2 * hi)
        return np.pi * (hi - lo) / hi

    @property
    def lam_bar(self):
        """Dual unit: pi/p' (A11/A21) or pi/(2b) (A22)."""
        hi = self.pq[1]
        if self.family == "A22":
            return np.pi / (2 * hi)
        return np.pi / hi

    @property
    def omega(self):
        return np.exp(1j * self.gamma)

    @property
    def local_dim(self):
        return 2 if self.family == "A11" else 3

    @property
    def twist_eigenvalue(self):
        """Eigenvalue of e^{i Lambda} in the groundstate sector."""
        return self.omega ** self.pq[1]

    def to_json_dict(self):
        return {"family": self.family, "pair": list(self.pq),
                "series": self.series, "gamma": self.gamma,
                "N": self.n_sites, "sector": self.sector}

    @classmethod
    def from_json_dict(cls, d):
        return cls(family=d["family"], pq=tuple(d["pair"]),
                   series=d["series"], gamma=float(d["gamma"]),
                   n_sites=int(d["N"]), sector=d.get("sector", ""))


def twist_matrix(family, gamma):
    """Diagonal twist on the auxiliary space."""
    w = np.exp(1j * gamma)
    if family == "A11":
        return np.diag([w, 1 / w])
    return np.diag([w, 1.0 + 0j, 1 / w])


def face_weights_a22(lam, u):
    """The nine local weights of the 19-vertex face operator."""
    s2, s3 = np.sin(2 * lam), np.sin(3 * lam)
    if abs(s2) < 1e-12 or abs(s3) < 1e-12:
        raise SingularWeight(f"sin 2*lam or sin 3*lam vanishes at lam={lam}")
    su, s3u = np.sin(u), np.sin(3 * lam - u)
    rho1 = 1 + su * s3u / (s2 * s3)
    rho2 = s3u / s3
    rho4 = su / s3
    rho6 = su * s3u / (s2 * s3)
    rho8 = np.sin(2 * lam - u) * s3u / (s2 * s3)
    rho9 = -su * np.sin(lam - u) / (s2 * s3)
    return np.array([rho1, rho2, rho2, rho4, rho4, rho6, rho6, rho8, rho9])


def rcheck(family, lam, u, mode="numeric"):
    """The local R-check matrix, exactly as printed.

    mode="numeric" gives a complex matrix at the given u.  The symbolic
    (Laurent) version of transfer operators is reconstructed from numeric
    samples, so only the numeric mode is needed here.
    """
    if mode != "numeric":
        raise ValueError("only numeric mode is implemented at matrix level")
    if family in ("A11", "A21") and abs(np.sin(lam)) < 1e-12:
        raise SingularWeight(f"sin lam vanishes at lam={lam}")

    def s(k, x):
        return np.sin(k * lam + x) / np.sin(lam)

    if family == "A11":
        e_p, e_m = np.exp(1j * u), np.exp(-1j * u)
        s1m, s0 = s(1, -u), s(0, u)
        return np.array([
            [s1m, 0, 0, 0],
            [0, e_p, s0, 0],
            [0, s0, e_m, 0],
            [0, 0, 0, s1m],
        ], dtype=complex)

    if family == "A21":
        e_p, e_m = np.exp(1j * u), np.exp(-1j * u)
        s1m, s0 = s(1, -u), s(0, u)
        R = np.zeros((9, 9), dtype=complex)
        R[0, 0] = s1m
        R[1, 1] = 1; R[1, 3] = s0
        R[2, 2] = e_p; R[2, 6] = s0
        R[3, 1] = s0; R[3, 3] = 1
        R[4, 4] = s1m
        R[5, 5] = 1; R[5, 7] = s0
        R[6, 2] = s0; R[6, 6] = e_m
        R[7, 5] = s0; R[7, 7] = 1
        R[8, 8] = s1m
        return R

    # A22, 19 vertices
    r = face_weights_a22(lam, u)
    rho1, rho2, rho3, rho4, rho5, rho6, rho7, rho8, rho9 = r
    e2, e4 = np.exp(2j * lam), np.exp(4j * lam)
    R = np.zeros((9, 9), dtype=complex)
    R[0, 0] = rho8
    R[1, 1] = rho2; R[1, 3] = rho7
    R[2, 2] = rho8 - rho9 * e4; R[2, 4] = 1j * rho4 * e2; R[2, 6] = rho9
    R[3, 1] = rho6; R[3, 3] = rho3
    R[4, 2] = 1j * rho5 * e2; R[4, 4] = rho1; R[4, 6] = -1j * rho5 / e2
    R[5, 5] = rho3; R[5, 7] = rho6
    R[6, 2] = rho9; R[6, 4] = -1j * rho4 / e2; R[6, 6] = rho8 - rho9 / e4
    R[7, 5] = rho7; R[7, 7] = rho2
    R[8, 8] = rho8
    return R


def f_factor(spec, k, u):
    """Normalisation scalar f_k at the point u."""
    lam, N = spec.lam, spec.n_sites
    if spec.family == "A22":
        denom = np.sqrt(complex(np.sin(2 * lam) * np.sin(3 * lam)))
    else:
        denom = np.sin(lam)
    return (np.sin(u + k * lam) / denom) ** N


def f_poly(spec, k):
    """f_k as a Laurent polynomial in w = exp(i*u/2)."""
    lam, N = spec.lam, spec.n_sites
    if spec.family == "A22":
        denom = np.sqrt(complex(np.sin(2 * lam) * np.sin(3 * lam)))
    else:
        denom = np.sin(lam)
    c = np.exp(1j * k * lam)
    base = {2: c / (2j * denom), -2: -1 / (2j * denom * c)}
    out = {0: 1.0 + 0j}
    for _ in range(N):
        out = lp_mul(out, base)
    return out


def sector_basis(spec):
    """Ordered basis of the groundstate sector, as base-q integers.

    Site 1 is the least-significant digit.
    """
    q, N = spec.local_dim, spec.n_sites
    states = []
    if spec.sector == "zero_mag":
        if q == 2:
            if N % 2:
                raise IncompatibleSector("zero magnetisation needs even N")
            want = N // 2
            for s in range(2 ** N):
                if bin(s).count("1") == want:
                    states.append(s)
        else:
            # states 0 (up), 1 (vacancy), 2 (down); need #up == #down
            for s in range(3 ** N):
                x, nu, nd = s, 0, 0
                for _ in range(N):
                    d = x % 3
                    x //= 3
                    if d == 0:
                        nu += 1
                    elif d == 2:
                        nd += 1
                if nu == nd:
                    states.append(s)
            if not states:
                raise IncompatibleSector("empty zero-magnetisation sector")
    else:  # equal thirds
        if N % 3:
            raise IncompatibleSector("equal thirds needs N = 0 mod 3")
        want = N // 3
        for s in range(3 ** N):
            x, counts = s, [0, 0, 0]
            for _ in range(N):
                counts[x % 3] += 1
                x //= 3
            if counts == [want, want, want]:
                states.append(s)
    return states


class TransferOperator:
    """Single-row transfer operator restricted to the groundstate sector.

    Convention (pinned for reproducibility): auxiliary space is the leftmost
    factor, the local operators R = P * Rcheck are applied to sites N down
    to 1 (site 1 acts first in the product), and the twist is inserted once
    before the auxiliary trace:  T = Tr_a[ Theta_a R_{a,N} ... R_{a,1} ].
    """

    def __init__(self, spec, u):
        self.spec = spec
        self.u = u
        self.twist_applied = True
        q = spec.local_dim
        rc = rcheck(spec.family, spec.lam, u)
        # R = P * Rcheck:  R[(a', s'), (a, s)] = Rcheck[(s', a'), (a, s)]
        R = rc.reshape(q, q, q, q).transpose(1, 0, 2, 3).reshape(q * q, q * q)
        self._R2 = R
        self._theta = np.diag(twist_matrix(spec.family, spec.gamma))
        self.basis = sector_basis(spec)
        self.index = {s: i for i, s in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._dense = None

    def _apply_full(self, v):
        """Apply T to a vector on the full (q^N)-dimensional chain."""
        spec = self.spec
        q, N, d = spec.local_dim, spec.n_sites, spec.local_dim
        # Phi[a_out, a_in, s1..sN]; site i lives on axis 2 + (i-1)
        Phi = np.tensordot(np.eye(d, dtype=complex),
                           v.reshape((q,) * N), axes=0)
        Phi = Phi.reshape((d, d) + (q,) * N)
        for i in range(N):
            axis = 2 + i
            Phi = np.moveaxis(Phi, axis, 1)
            shape = Phi.shape
            Phi = self._R2 @ Phi.reshape(d * q, -1)
            Phi = Phi.reshape(shape)
            Phi = np.moveaxis(Phi, 1, axis)
        out = np.zeros((q,) * N, dtype=complex)
        for a in range(d):
            out += self._theta[a] * Phi[a, a]
        return out.reshape(-1)

    def matvec(self, v):
        """Apply T to a sector vector."""
        spec = self.spec
        q, N = spec.local_dim, spec.n_sites
        full = np.zeros(q ** N, dtype=complex)
        full[self.basis] = v
        # base-q integer s has site 1 in the least-significant digit while
        # the tensor axes put site 1 first; these orderings agree when the
        # flattened index is little-endian in the site axes, so reverse.
        res = self._apply_full(full.reshape((q,) * N).transpose()
                               .reshape(-1))
        res = res.reshape((q,) * N).transpose().reshape(-1)
        return res[self.basis]

    def dense(self):
        """Dense sector matrix, built column by column."""
        if self._dense is None:
            T = np.empty((self.dim, self.dim), dtype=complex)
            e = np.zeros(self.dim, dtype=complex)
            for j in range(self.dim):
                e[j] = 1.0
                T[:, j] = self.matvec(e)
                e[j] = 0.0
            self._dense = T
        return self._dense


def transfer_operator(spec, u):
    """Factory kept as the public entry point."""
    return TransferOperator(spec, u)


def symbolic_transfer(spec, entry_tol=1e-10):
    """Dense sector transfer matrix with Laurent-polynomial entries.

    Reconstructed from numeric samples on one period (the eigenvectors and
    matrix entries are trigonometric polynomials of bounded degree).  Only
    sensible for small N.
    """
    if spec.n_sites > 6:
        raise ValueError("symbolic mode is capped at N = 6")
    K = SITE_DEGREE[spec.family] * spec.n_sites
    us = np.linspace(0, 2 * np.pi, 2 * K + 1, endpoint=False)
    mats = [transfer_operator(spec, u).dense() for u in us]
    dim = mats[0].shape[0]
    out = np.empty((dim, dim), dtype=object)
    stack = np.array(mats)  # (samples, dim, dim)
    for i in range(dim):
        for j in range(dim):
            out[i, j] = lp_prune(
                lp_from_samples(us, stack[:, i, j], -2 * K, 2 * K, stride=2))
    return out
