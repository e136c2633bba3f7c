# Rogers dilogarithm and the closed-form identity families attached to the
# braid/bulk terminal values of the integral-equation hierarchy.
#
# All identities are evaluated in complex arithmetic; the conjugate pairing of
# the twisted terms makes the left-hand sides real, and the residual includes
# the imaginary part as a free branch test.

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .errors import BranchCut, OutOfInterval

# half-width of the exclusion tube around the cut (-inf,0] u [1,inf)
CUT_TOL = 1e-13

PI2_6 = np.pi ** 2 / 6


def rogers_L(z, continuation=False):
    """Rogers dilogarithm L(z) = Li2(z) + log(z)log(1-z)/2.

    The known values L(0)=0 and L(1)=pi^2/6 are returned directly.  Points on
    the cut (-inf,0] u [1,inf) raise BranchCut unless continuation=True, in
    which case the principal branch is used.
    """
    z = complex(z)
    if abs(z) < CUT_TOL:
        return 0j
    if abs(z - 1) < CUT_TOL:
        return complex(PI2_6)
    if abs(z.imag) < CUT_TOL * max(1.0, abs(z.real)):
        if z.real < 0 or z.real > 1:
            if not continuation:
                raise BranchCut(f"L({z}) lies on the cut")
    v = mp.polylog(2, z) + mp.log(z) * mp.log(1 - z) / 2
    return complex(v)


def rogers_L_deriv(z):
    """dL/dz = -(log(1-z)/z + log(z)/(1-z))/2."""
    z = complex(z)
    return -0.5 * (np.log(1 - z) / z + np.log(z) / (1 - z))


IDENTITY_RHS = {
    "A11_principal": lambda N: (N - 1) * PI2_6,
    "A11_dual": lambda N: PI2_6,
    "A22_principal": lambda N: (N - 1) * PI2_6,
    "A22_dual": lambda N: 3 * PI2_6,
    "A22_dual_minus": lambda N: 1.5 * PI2_6,
    "A21_dual": lambda N: 2 * PI2_6,
}


def identity_terms(identity_id, N, phi):
    """The list of (sign, L-argument) pairs for one identity instance.

    Each family packages the braid (or bulk) terminal values of its hierarchy
    into closed trigonometric forms of a free parameter phi.
    """
    f = complex(phi)
    sin, cos, exp = np.sin, np.cos, np.exp
    terms = []
    if identity_id == "A11_principal":
        for n in range(1, N - 1):
            terms.append((1, sin((n + 2) * f) * sin(n * f) / sin((n + 1) * f) ** 2))
        r = sin((N - 1) * f) / sin(N * f)
        terms.append((1, exp(1j * f) * r))
        terms.append((1, exp(-1j * f) * r))
    elif identity_id == "A11_dual":
        for n in range(1, N - 1):
            terms.append((1, sin(f) ** 2 / sin((n + 1) * f) ** 2))
        r = sin(f) / sin(N * f)
        terms.append((1, exp(1j * (N - 1) * f) * r))
        terms.append((1, exp(-1j * (N - 1) * f) * r))
    elif identity_id == "A22_principal":
        for n in range(1, N - 1):
            terms.append((1, sin(n * f / 2) * sin((n + 3) * f / 2)
                          / (sin((n + 1) * f / 2) * sin((n + 2) * f / 2))))
        terms.append((1, sin((N - 1) * f / 2) / (2 * sin(N * f / 2) * cos(f / 2))))
        r = sin((N - 1) * f / 2) / sin(N * f)
        terms.append((1, exp(1j * (N + 1) * f / 2) * r))
        terms.append((1, exp(-1j * (N + 1) * f / 2) * r))
        terms.append((1, sin((N - 1) * f / 2) ** 2 / sin((N + 1) * f / 2) ** 2))
    elif identity_id in ("A22_dual", "A21_dual"):
        mult = 2 if identity_id == "A21_dual" else 1
        for n in range(1, N - 1):
            terms.append((mult, sin(f / 2) * sin(f)
                          / (sin((n + 1) * f / 2) * sin((n + 2) * f / 2))))
        terms.append((1, sin((N + 1) * f / 2) / (2 * sin(N * f / 2) * cos(f / 2))))
        r = sin((N + 1) * f / 2) / sin(N * f)
        terms.append((1, exp(1j * (N - 1) * f / 2) * r))
        terms.append((1, exp(-1j * (N - 1) * f / 2) * r))
        terms.append((1, sin(N * f) * sin(f) / sin((N + 1) * f / 2) ** 2))
        if identity_id == "A21_dual":
            terms.append((-1, sin((N - 1) * f / 2) / (2 * sin(N * f / 2) * cos(f / 2))))
            rb = sin((N - 1) * f / 2) / sin(N * f)
            terms.append((-1, exp(1j * (N + 1) * f / 2) * rb))
            terms.append((-1, exp(-1j * (N + 1) * f / 2) * rb))
            terms.append((-1, sin((N - 1) * f / 2) ** 2 / sin((N + 1) * f / 2) ** 2))
    elif identity_id == "A22_dual_minus":
        terms.append((1, 0.5 + 0j))
        terms.append((1, exp(1j * N * f / 2) / (2 * cos(N * f / 2))))
        terms.append((1, exp(-1j * N * f / 2) / (2 * cos(N * f / 2))))
    else:
        raise ValueError(f"unknown identity {identity_id!r}")
    return terms


@dataclass
class DilogCase:
    """One identity instance: which family, the size parameter and phi."""

    identity_id: str
    n_param: int
    phi: complex
    terms: list = field(default_factory=list)
    expected: float = 0.0

    def __post_init__(self):
        if self.identity_id not in IDENTITY_RHS:
            raise ValueError(f"unknown identity {self.identity_id!r}")
        if self.n_param < 2:
            raise ValueError("identities require N >= 2")
        if not self.terms:
            self.terms = identity_terms(self.identity_id, self.n_param, self.phi)
        self.expected = IDENTITY_RHS[self.identity_id](self.n_param)


def identity_residual(case, continuation=True):
    """|LHS - RHS| for one identity instance (the imaginary part counts)."""
    lhs = 0j
    for sign, arg in case.terms:
        lhs += sign * rogers_L(arg, continuation=continuation)
    return abs(lhs - case.expected)


def default_phi_grid(N, n_imag=20, n_real=5):
    """Default scan: points on the imaginary axis plus small real values."""
    grid = [1j * t for t in np.linspace(0.05, 2.0, n_imag)]
    grid += list(np.linspace(0.0, np.pi / (4 * N), n_real + 2)[1:-1])
    return grid


def _terminal_contribution(sigma, eps, a):
    """One index's contribution to I+-: the antiderivative at a terminal."""
    if eps == 1:
        if a == 0:
            return 0j
        return sigma * 2 * rogers_L(a / (1 + a), continuation=True)
    # continued along the real axis L(a) = pi^2/3 - L(1/a) past a = 1
    if abs(a.imag if isinstance(a, complex) else 0.0) < CUT_TOL \
            and (a.real if isinstance(a, complex) else a) > 1:
        return -sigma * 2 * (2 * PI2_6 - rogers_L(1.0 / a))
    return -sigma * 2 * rogers_L(a, continuation=True)


def I_pm_eval(spec, omega_samples):
    """The separate terminal sums I+ and I- at each supplied twist omega.

    The terminals come from the closed braid/bulk values; both lists should be
    constant in omega.
    """
    from .models import admissible_gamma_sup
    from .tba import braid_values, bulk_values, standardized_terminals

    sup = admissible_gamma_sup(spec.family, spec.pq, spec.series)
    rho = abs(spec.pq[1])
    out = {"I_plus": [], "I_minus": []}
    for w in omega_samples:
        g = float(np.angle(complex(w)))
        if not 0 <= g < sup:
            raise OutOfInterval(f"omega angle {g} outside [0, {sup})")
        plus = standardized_terminals(spec, complex(w), braid_values)
        minus = standardized_terminals(spec, complex(w), bulk_values)
        ip = sum(_terminal_contribution(s, e, a) for s, e, a in plus).real
        im = sum(_terminal_contribution(s, e, a) for s, e, a in minus).real
        # past the point where the twisted product factor reaches -1 the
        # principal branch picks up an extra 2*pi times the twist angle
        if rho * g > np.pi:
            ip -= 2 * np.pi * g
            if spec.series == "principal":
                im -= 2 * np.pi * g * rho / (rho - 1)
        out["I_plus"].append(ip)
        out["I_minus"].append(im)
    return out
