# Scaling non-linear integral equations: kernels, asymptotics, fixed-point
# solver and the dilogarithm integral J evaluated both from the solved
# profiles (driving side) and from the braid/bulk terminal values.
#
# Conventions: z is the scaling variable, profiles live on a uniform grid
# z in [-L, L) with M points and z[M//2] = 0.  All profiles are real on the
# real axis for the groundstate.

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve

from .errors import (BranchJump, NoConvergence, OutOfInterval, PoleProximity,
                     QuadratureFailure, SingularKMatrix)
from .models import admissible_gamma_sup

SQ3 = np.sqrt(3.0)

# total integrals of the closed-form kernels (convolution of a constant)
KERNEL_TOTAL = {"A11": 0.5, "A22_K": 1.0, "A22_Kt": 2.0}


def _checked_ratio(num, den, where):
    if abs(den) < 1e-8 * max(1.0, abs(num)):
        raise PoleProximity(f"kernel pole near z={where}")
    val = num / den
    if isinstance(val, complex) and abs(val.imag) < 1e-14 * max(1, abs(val)):
        return val.real
    return val


def kernel_eval(label, z):
    """Closed-form kernel value at z (complex allowed).

    Labels: "A11", "A22_K", "A22_Kt", "A21_Kt1", "A21_Kt2", and the dual
    first-row kernels "A11_dual:<p'>:<n>" and "A22_dual:<b>:<n>".
    """
    z = complex(z)
    if label == "A11":
        return _checked_ratio(1.0, 2 * np.pi * np.cosh(z), z)
    if label == "A22_K":
        if abs(z) < 1e-12:
            return 2 * SQ3 / (3 * np.pi)
        return _checked_ratio(SQ3 / np.pi * np.sinh(2 * z), np.sinh(3 * z), z)
    if label == "A22_Kt":
        return _checked_ratio(3 / np.pi * np.cosh(2 * z), np.cosh(3 * z), z)
    if label == "A21_Kt1":
        return _checked_ratio(np.cosh(z / 3), np.pi * SQ3 * np.cosh(z), z)
    if label == "A21_Kt2":
        if abs(z) < 1e-12:
            return 1.0 / (3 * np.pi * SQ3)
        return _checked_ratio(np.sinh(z / 3), np.pi * SQ3 * np.sinh(z), z)
    if label.startswith(("A11_dual:", "A22_dual:")):
        _, size, n = label.split(":")
        size, n = int(size), int(n)
        if label.startswith("A11_dual:"):
            r, half = size - 1, 2.0
        else:
            r, half = 2 * size - 3, 1.0
        s = np.sin(np.pi * n / (half * r))
        den = np.sinh(z / r) ** 2 + s ** 2
        return _checked_ratio(s * np.cosh(z / r), np.pi * r * den, z)
    raise ValueError(f"unknown kernel label {label!r}")


def _kernel_grid(label, z):
    """Vectorized kernel values on a real grid (poles are off the axis)."""
    z = np.asarray(z, dtype=float)
    if label == "A11":
        return 1.0 / (2 * np.pi * np.cosh(z))
    if label == "A22_K":
        out = np.empty_like(z)
        small = np.abs(z) < 1e-12
        out[small] = 2 * SQ3 / (3 * np.pi)
        zz = z[~small]
        out[~small] = SQ3 / np.pi * np.sinh(2 * zz) / np.sinh(3 * zz)
        return out
    if label == "A22_Kt":
        return 3 / np.pi * np.cosh(2 * z) / np.cosh(3 * z)
    raise ValueError(f"no grid form for kernel {label!r}")


# ---------------------------------------------------------------------------
# k-space kernel matrices

@dataclass
class KSpaceKernel:
    """Matrix kernel defined by inverting the printed k-space linear system."""

    spec: object
    n_funcs: int
    labels: tuple

    def sample(self, k, which=1):
        try:
            return self._matrix(float(k), which)
        except np.linalg.LinAlgError:
            try:
                return 0.5 * (self._matrix(k + 1e-6, which)
                              + self._matrix(k - 1e-6, which))
            except np.linalg.LinAlgError as exc:
                raise SingularKMatrix(f"singular k-space system at k={k}") \
                    from exc

    def _matrix(self, k, which):
        if self.spec.family == "A11":
            return _khat_a11_dual(self.spec.pq[1], k)
        if self.spec.family == "A22":
            return _khat_a22_dual(self.spec.pq[1], k)
        return _khat_a21_principal(self.spec.pq[1], k, which)


def _khat_a11_dual(pp, k):
    P = pp - 1
    c = np.cosh(np.pi * k / 2)
    M = np.zeros((P, P))
    R = np.zeros((P, P))
    for i in range(P):
        M[i, i] = -2 * c
        if i + 1 < P:
            M[i, i + 1] = M[i + 1, i] = 1.0
            R[i, i + 1] = R[i + 1, i] = 1.0
    M[P - 2, P - 1] = 2.0
    return np.linalg.solve(M, R)


def _khat_a22_dual(b, k):
    C, c = np.cosh(np.pi * k), np.cosh(np.pi * k / 2)
    M = np.zeros((b, b))
    R = np.zeros((b, b))
    for i in range(b - 2):
        M[i, i] = -2 * C
        R[i, i] = -1.0
        if i > 0:
            M[i, i - 1] = R[i, i - 1] = 1.0
        if i + 1 <= b - 3:
            M[i, i + 1] = 1.0
        if i + 1 <= b - 2:
            R[i, i + 1] = 1.0
    M[b - 3, b - 2] = 1 - 2 * C
    M[b - 3, b - 1] = 2 * c
    R[b - 3, b - 2] = 1.0
    M[b - 2, b - 3] = 1.0
    M[b - 2, b - 1] = -2 * c
    R[b - 2, b - 3] = 1.0
    R[b - 2, b - 2] = -1.0
    M[b - 1, b - 2] = 2 * c
    R[b - 1, b - 1] = 1.0
    return np.linalg.solve(M, R)


def _khat_a21_principal(pp, k, which):
    c2 = np.cosh(np.pi * k / 2)
    if which == 1:
        diag, corner, den = -1.0, np.cosh(np.pi * k / 4), 2 * c2 - 1
    else:
        diag, corner, den = 1.0, -np.sinh(np.pi * k / 4), 2 * c2 + 1
    R = np.zeros((pp, pp))
    for i in range(pp - 2):
        R[i, i] = diag
        if i > 0:
            R[i, i - 1] = 1.0
        if i + 1 <= pp - 3:
            R[i, i + 1] = 1.0
    R[pp - 3, pp - 2] = 1.0
    R[pp - 3, pp - 1] = 2 * corner if which == 2 else -2 * corner
    R[pp - 2, pp - 3] = 1.0
    R[pp - 2, pp - 2] = diag
    R[pp - 2, pp - 1] = 2 * corner
    R[pp - 1, pp - 3] = 2 * corner
    R[pp - 1, pp - 2] = -2 * corner if which == 1 else 2 * corner
    R[pp - 1, pp - 1] = 2 * c2 + 2 * diag * (-1 if which == 1 else 1)
    return R / den


def kernel_matrix_kspace(spec):
    """The k-space kernel matrix family for the matrix-defined series."""
    key = (spec.family, spec.series)
    if key == ("A11", "dual"):
        return KSpaceKernel(spec, spec.pq[1] - 1, ("K",))
    if key == ("A22", "dual"):
        return KSpaceKernel(spec, spec.pq[1], ("K",))
    if key == ("A21", "principal"):
        return KSpaceKernel(spec, spec.pq[1], ("K1", "K2"))
    raise ValueError(f"no k-space kernel for {key}")


# ---------------------------------------------------------------------------
# braid and bulk asymptotics

def _gamma_of(spec, omega):
    if omega is None:
        return spec.gamma
    g = float(np.angle(complex(omega)))
    sup = admissible_gamma_sup(spec.family, spec.pq, spec.series)
    if not 0 <= g < sup:
        raise OutOfInterval(f"twist angle {g} outside [0, {sup:.6f})")
    return g


def _a11_ladder(pp, g):
    """sin(n g) sin((n+2) g)/sin^2 g for n < p'-1, then the top ratio."""
    if g == 0:
        return [float(n * (n + 2)) for n in range(1, pp - 1)] + [pp - 1.0]
    s = np.sin
    vals = [s(n * g) * s((n + 2) * g) / s(g) ** 2 for n in range(1, pp - 1)]
    return vals + [s((pp - 1) * g) / s(g)]


def _a22_ladder_braid(b, g):
    if g == 0:
        vals = [n * (n + 3) / 2.0 for n in range(1, b - 1)]
        x = (b - 1.0) / (b + 1.0)
    else:
        s = lambda k: np.sin(k * g / 2)
        vals = [s(n) * s(n + 3) / (s(1) * s(2)) for n in range(1, b - 1)]
        x = s(b - 1) / s(b + 1)
    return vals + [x, x ** 2]


def _a22_ladder_bulk(b, g):
    gb = g * b / (b - 1.0)
    if g == 0:
        vals = [(n - 1) * (n + 2) / 2.0 for n in range(1, b - 1)]
        x = (b - 2.0) / b
    else:
        s = lambda k: np.sin(k * gb / 2)
        vals = [s(n - 1) * s(n + 2) / (s(1) * s(2)) for n in range(1, b - 1)]
        x = s(b - 2) / s(b)
    return vals + [x, x ** 2]


def _a22_dual_braid(b, g):
    if g == 0:
        vals = [2.0 / (n * (n + 3)) for n in range(1, b - 1)]
        return vals + [(b + 1.0) / (b - 1.0), 4.0 * b / (b - 1.0) ** 2]
    s = lambda k: np.sin(k * g / 2)
    vals = [s(1) * s(2) / (s(n) * s(n + 3)) for n in range(1, b - 1)]
    return vals + [s(b + 1) / s(b - 1), s(2 * b) * s(2) / s(b - 1) ** 2]


def _check_positive(vals):
    if any(v <= 0 or not np.isfinite(v) for v in vals):
        raise OutOfInterval("asymptotic values leave the positive regime")


def braid_values(spec, omega=None):
    """z -> +infinity limits of the scaling functions.

    A11/A22 return one array; A21 returns (unbarred, barred).
    """
    g = _gamma_of(spec, omega)
    n = spec.pq[1]
    key = (spec.family, spec.series)
    if key == ("A11", "principal"):
        vals = _a11_ladder(n, g)
    elif key == ("A11", "dual"):
        vals = [1.0 / v for v in _a11_ladder(n, g)]
    elif key == ("A22", "principal"):
        vals = _a22_ladder_braid(n, g)
    elif key == ("A22", "dual"):
        vals = _a22_dual_braid(n, g)
    elif key == ("A21", "principal"):
        vals = _a22_ladder_braid(n, g)
        _check_positive(vals)
        return np.array(vals), np.array(vals)
    else:  # A21 dual: barred values invert the two top entries
        vals = _a22_dual_braid(n, g)
        bar = vals[:n - 2] + [1.0 / vals[n - 2], 1.0 / vals[n - 1]]
        _check_positive(vals)
        _check_positive(bar)
        return np.array(vals), np.array(bar)
    _check_positive(vals)
    return np.array(vals)


def bulk_values(spec, omega=None):
    """z -> -infinity limits of the scaling functions."""
    g = _gamma_of(spec, omega)
    n = spec.pq[1]
    key = (spec.family, spec.series)
    if key == ("A11", "principal"):
        gb = g * n / (n - 1.0)
        if g == 0:
            vals = [float((m - 1) * (m + 1)) for m in range(1, n - 1)]
            vals.append(n - 2.0)
        else:
            s = np.sin
            vals = [s((m - 1) * gb) * s((m + 1) * gb) / s(gb) ** 2
                    for m in range(1, n - 1)]
            vals.append(s((n - 2) * gb) / s(gb))
        return np.array(vals)
    if key == ("A11", "dual"):
        return np.zeros(n - 1)
    if key == ("A22", "principal"):
        return np.array(_a22_ladder_bulk(n, g))
    if key == ("A22", "dual"):
        vals = np.zeros(n)
        vals[n - 2] = 1.0
        return vals
    if key == ("A21", "principal"):
        vals = np.array(_a22_ladder_bulk(n, g))
        return vals, vals.copy()
    return np.zeros(n), np.zeros(n)  # A21 dual


# ---------------------------------------------------------------------------
# standardized index tables (signs and special product maps)

def _index_table(spec):
    """Per-index (sigma, eps, map) with map in plain/minus/double/triple."""
    n = spec.pq[1]
    if spec.family == "A11":
        return [(1, 1, "plain")] * (n - 2) + [(1, 1, "double")]
    if spec.series == "principal":  # A22 and A21 share the layout
        return [(1, 1, "plain")] * (n - 2) + [(1, 1, "triple"),
                                              (-1, -1, "minus")]
    return [(1, 1, "plain")] * (n - 2) + [(1, 1, "triple"), (1, 1, "plain")]


def _barred_index_table(spec):
    """A21 only: the barred copy differs in the dual series top signs."""
    n = spec.pq[1]
    if spec.series == "principal":
        return _index_table(spec)
    return [(1, 1, "plain")] * (n - 2) + [(-1, 1, "triple"), (-1, 1, "plain")]


def _rho(spec):
    """Exponent of the twist factors in the special product maps."""
    return abs(spec.pq[1])


def log_A_map(spec, kind, a, gamma=None):
    """log of the composite function A of a for one index."""
    g = spec.gamma if gamma is None else gamma
    if kind == "plain":
        return np.log1p(a)
    if kind == "minus":
        if np.any(np.asarray(a) >= 1.0):
            raise BranchJump("1 - a crosses zero")
        return np.log1p(-a)
    core = np.log1p(2 * np.cos(_rho(spec) * g) * a + a * a)
    if kind == "double":
        return core
    return core + np.log1p(a)  # triple


def _expand_terminal(spec, omega, sigma, eps, kind, a):
    """Split a special-product index into its unit-twist factor entries."""
    if kind in ("plain", "minus"):
        return [(sigma, eps, complex(a))]
    w = complex(omega) ** _rho(spec)
    if kind == "double":
        return [(sigma, eps, w * a), (sigma, eps, a / w)]
    return [(sigma, eps, w * a), (sigma, eps, complex(a)), (sigma, eps, a / w)]


def standardized_terminals(spec, omega, values_fn):
    """(sigma, eps, a) entries at one end, special products expanded."""
    vals = values_fn(spec, omega)
    out = []
    if spec.family == "A21":
        for table, row in zip((_index_table(spec), _barred_index_table(spec)),
                              vals):
            for (s, e, kind), a in zip(table, row):
                out += _expand_terminal(spec, omega, s, e, kind, a)
    else:
        for (s, e, kind), a in zip(_index_table(spec), vals):
            out += _expand_terminal(spec, omega, s, e, kind, a)
    return out


# ---------------------------------------------------------------------------
# the solver

@dataclass
class TBAProblem:
    """Everything needed to iterate one scaling system to its fixed point."""

    spec: object
    n_funcs: int
    kernel: str  # closed-form kernel family used by the solver
    driving: list  # per function (delta, rate): delta * exp(-z/rate)
    special_products: dict
    signs: dict
    grid: dict = field(default_factory=lambda: {"L": 36.0, "M": 4096})


@dataclass
class TBASolution:
    a_profiles: list
    A_profiles: list
    asymptotics: dict
    J: float
    iterations: int
    converged: bool
    problem: TBAProblem
    z: np.ndarray


def tba_problem(spec, L=None, M=4096):
    """Build the solvable scaling problems (principal A11 and A22)."""
    n = spec.pq[1]
    if L is None:
        # the braid limit is approached at a rate that slows with the
        # ladder size; stretch the grid so the tails settle below 1e-7
        L = max(36.0, 9.5 * n)
    key = (spec.family, spec.series)
    if key == ("A11", "principal"):
        n_funcs, kernel = n - 1, "A11"
        driving = [(-2.0, 1.0)] + [(0.0, 1.0)] * (n - 2)
        special = {n - 2: "double"}
    elif key == ("A22", "principal"):
        n_funcs, kernel = n, "A22"
        driving = [(-2.0 * SQ3, 1.0)] + [(0.0, 1.0)] * (n - 1)
        special = {n - 2: "triple"}
    else:
        raise ValueError(f"no direct solver for {key}")
    table = _index_table(spec)
    return TBAProblem(spec=spec, n_funcs=n_funcs, kernel=kernel,
                      driving=driving, special_products=special,
                      signs={"sigma": [t[0] for t in table],
                             "eps": [t[1] for t in table]},
                      grid={"L": L, "M": M})


class _Convolver:
    """K * logA with the asymptotic-constant splitting.

    logA(y) = c_minus + (c_plus - c_minus) s(y) + rest(y) with s a smooth
    step; the constant part uses the known total integral, the step part a
    precomputed quadrature, and the decaying rest goes through an FFT.
    """

    def __init__(self, label, z):
        self.total = KERNEL_TOTAL[label]
        self.h = z[1] - z[0]
        self.kgrid = _kernel_grid(label, z)
        t = np.linspace(-50.0, 50.0, 4001)
        kt = _kernel_grid(label, t)
        ks = np.empty_like(z)
        chunk = 512
        for i in range(0, len(z), chunk):
            zz = z[i:i + chunk, None]
            ks[i:i + chunk] = np.trapezoid(
                kt[None, :] / (1.0 + np.exp(-(zz - t[None, :]))), t, axis=1)
        self.kstep = ks
        self.step = 1.0 / (1.0 + np.exp(-z))

    def __call__(self, logA, c_minus, c_plus):
        rest = logA - c_minus - (c_plus - c_minus) * self.step
        out = c_minus * self.total + (c_plus - c_minus) * self.kstep
        # full convolution sliced so the kernel peak (index M//2) aligns
        # with zero lag; "same" mode is off by one sample for even M
        m = len(self.kgrid)
        out += fftconvolve(rest, self.kgrid)[m // 2:m // 2 + m] * self.h
        return out


class _System:
    """Grid, drivings, asymptotics and one fixed-point application."""

    def __init__(self, problem):
        self.problem = problem
        spec = problem.spec
        L, M = problem.grid["L"], problem.grid["M"]
        h = 2.0 * L / M
        self.z = -L + h * np.arange(M)
        self.nf = problem.n_funcs
        self.kinds = [t[2] for t in _index_table(spec)]
        self.braid = braid_values(spec)
        self.bulk = bulk_values(spec)
        self.c_plus = np.array([log_A_map(spec, k, b)
                                for k, b in zip(self.kinds, self.braid)])
        self.c_minus = np.array([log_A_map(spec, k, b)
                                 for k, b in zip(self.kinds, self.bulk)])
        self.d = [delta * np.exp(-self.z / rate)
                  for delta, rate in problem.driving]
        if problem.kernel == "A11":
            self.conv = {"K": _Convolver("A11", self.z)}
        else:
            self.conv = {"K": _Convolver("A22_K", self.z),
                         "Kt": _Convolver("A22_Kt", self.z)}

    def log_A(self, loga, clip=False):
        spec = self.problem.spec
        a = np.exp(loga)
        if clip:
            # transient overshoots of a "minus" index past 1 are harmless
            # mid-iteration; only the converged profile must stay below
            for i, kind in enumerate(self.kinds):
                if kind == "minus":
                    a[i] = np.minimum(a[i], 1.0 - 1e-12)
        return np.array([log_A_map(spec, self.kinds[i], a[i])
                         for i in range(self.nf)])

    def apply(self, loga):
        """One application of the fixed-point map."""
        return np.array(self.d) + self.convolution_rhs(loga)

    def convolution_rhs(self, loga, clip=False):
        """The convolution part of the map (driving terms excluded)."""
        logA = self.log_A(loga, clip=clip)
        cache = {}

        def C(name, m):
            if (name, m) not in cache:
                cache[name, m] = self.conv[name](logA[m], self.c_minus[m],
                                                 self.c_plus[m])
            return cache[name, m]

        out = np.zeros_like(loga)
        if self.problem.kernel == "A11":
            for i in range(self.nf):
                if i > 0:
                    out[i] += C("K", i - 1)
                if i + 1 < self.nf:
                    out[i] += C("K", i + 1)
            return out
        b = self.nf
        for i in range(b - 3):
            out[i] = -C("K", i) + C("K", i + 1)
            if i > 0:
                out[i] += C("K", i - 1)
        out[b - 3] = (C("K", b - 4) - C("K", b - 3) + C("K", b - 2)
                      - C("Kt", b - 1))
        out[b - 2] = C("K", b - 3) - C("K", b - 2) + C("Kt", b - 1)
        out[b - 1] = (C("Kt", b - 3) - C("Kt", b - 2) + 3 * C("K", b - 1)
                      + logA[b - 1])
        return out

    def initial(self):
        """Driving plus a smooth bulk-to-braid interpolation."""
        step = 1.0 / (1.0 + np.exp(-self.z))
        floor = -2.0 * self.problem.grid["L"]
        rows = []
        for i in range(self.nf):
            lb = np.log(self.bulk[i]) if self.bulk[i] > 0 else floor
            rows.append(self.d[i] + step * np.log(self.braid[i])
                        + (1 - step) * lb)
        return np.array(rows)


def solve_nlie(problem, damping=None, max_iter=5000, tol=1e-12):
    """Damped fixed-point iteration of the scaling system.

    With damping=None a small ladder of damping factors is tried; the map
    gain grows toward the edge of the admissible twist interval.
    """
    if damping is not None:
        return _solve_nlie(problem, damping, max_iter, tol)
    start = 0.5 if problem.kernel == "A11" else 0.3
    err = None
    for d in (start, start / 2, start / 4, start / 8):
        try:
            return _solve_nlie(problem, d, max_iter, tol)
        except (NoConvergence, BranchJump) as exc:
            err = exc
    raise err


def _solve_nlie(problem, damping, max_iter, tol):
    sys = _System(problem)
    dmat = np.array(sys.d)
    c = sys.initial() - dmat  # iterate on the convolution part only:
    last = np.inf             # the driving tail swamps float resolution
    for it in range(1, max_iter + 1):
        new = sys.convolution_rhs(dmat + c, clip=True)
        delta = float(np.max(np.abs(new - c)))
        c = (1 - damping) * c + damping * new
        if delta < tol:
            break
        last = delta
    else:
        raise NoConvergence(max_iter, last)
    loga = dmat + c
    a = np.exp(loga)
    for i in range(sys.nf):
        gap = abs(a[i][-1] - sys.braid[i])
        if gap > 1e-7 * max(1.0, sys.braid[i]):
            raise NoConvergence(it, gap)
    sol = TBASolution(a_profiles=list(a), A_profiles=list(sys.log_A(loga)),
                      asymptotics={"braid": sys.braid, "bulk": sys.bulk},
                      J=np.nan, iterations=it, converged=True,
                      problem=problem, z=sys.z)
    sol.J = dilog_integral_J(sol)[0]
    return sol


def nlie_residual(solution, margin=8):
    """Sup-norm defect of a solved instance under one fixed-point step.

    The defect is measured on the convolution part; where the profile
    underflows toward subnormals the log carries no usable digits.
    """
    sys = _System(solution.problem)
    dmat = np.array(sys.d)
    a = np.array(solution.a_profiles)
    with np.errstate(divide="ignore"):
        loga = np.log(a)
    diff = np.abs(sys.convolution_rhs(loga) - (loga - dmat))
    diff = diff[:, margin:-margin]
    mask = a[:, margin:-margin] > 1e-290
    return float(np.max(diff[mask & np.isfinite(diff)]))


# ---------------------------------------------------------------------------
# the dilogarithm integral J

def _terminal_integrand(spec, kind, gamma):
    if kind == "plain":
        return lambda t: np.log1p(t) / t - np.log(t) / (1 + t)
    if kind == "minus":
        return lambda t: np.log1p(-t) / t + np.log(t) / (1 - t)
    c = 2 * np.cos(_rho(spec) * gamma)

    def A(t):
        v = 1 + c * t + t * t
        return v * (1 + t) if kind == "triple" else v

    def dA(t):
        v = c + 2 * t
        if kind == "triple":
            return v * (1 + t) + (1 + c * t + t * t)
        return v

    return lambda t: np.log(A(t)) / t - dA(t) / A(t) * np.log(t)


def terminal_J(spec, gamma=None):
    """J assembled from the closed braid/bulk terminals by quadrature."""
    g = spec.gamma if gamma is None else gamma
    omega = np.exp(1j * g)
    braid = braid_values(spec, omega)
    bulk = bulk_values(spec, omega)
    if spec.family == "A21":
        pairs = [(_index_table(spec), braid[0], bulk[0]),
                 (_barred_index_table(spec), braid[1], bulk[1])]
    else:
        pairs = [(_index_table(spec), braid, bulk)]
    total = 0.0
    for table, up, down in pairs:
        for (sigma, eps, kind), hi, lo in zip(table, up, down):
            f = _terminal_integrand(spec, kind, g)
            try:
                val, err = quad(f, max(float(lo), 1e-300), float(hi),
                                limit=400, epsabs=1e-12, epsrel=1e-12)
            except Exception as exc:
                raise QuadratureFailure(str(exc)) from exc
            if err > 1e-9:
                raise QuadratureFailure(f"terminal quadrature error {err:.2e}")
            total += sigma * val
    return total


def a21_dual_terminal_J(spec):
    """J for the A21 dual series from closed terminal values only.

    Assembled as the Rogers-L sum over both copies' braid terminals (the
    bulk terminals all vanish) plus the twist-quadratic correction from
    the integration-constant bookkeeping.
    """
    if (spec.family, spec.series) != ("A21", "dual"):
        raise ValueError("only the A21 dual series is assembled this way")
    from .dilog import _terminal_contribution
    terms = standardized_terminals(spec, spec.omega, braid_values)
    total = sum(_terminal_contribution(s, e, a) for s, e, a in terms).real
    return total - 2 * spec.pq[1] * spec.gamma ** 2


def dilog_integral_J(solution):
    """(driving-side, terminal-side) values of J for a solved instance."""
    prob = solution.problem
    z = solution.z
    logA1 = solution.A_profiles[0]
    integrand = np.exp(-z) * logA1
    # the left tail is an exact zero (logA1 vanishes superexponentially)
    integrand[~np.isfinite(integrand)] = 0.0
    pref = 4.0 if prob.kernel == "A11" else 4.0 * SQ3
    j_driving = pref * float(np.trapezoid(integrand, z))
    return j_driving, float(terminal_J(prob.spec))


def c24delta_formula(spec):
    """Closed-form c - 24*Delta for the family and series."""
    g2 = spec.gamma ** 2
    n = spec.pq[1]
    key = (spec.family, spec.series)
    if key == ("A11", "principal"):
        return 1 - 6 * g2 * n / (np.pi ** 2 * (n - 1))
    if key == ("A11", "dual"):
        return 1 - 6 * g2 * n / np.pi ** 2
    if key == ("A22", "principal"):
        return 1 - 3 * g2 * n / (np.pi ** 2 * (n - 1))
    if key == ("A22", "dual"):
        return 1.5 - 3 * g2 * n / np.pi ** 2
    if key == ("A21", "principal"):
        return 2 - 6 * g2 * n / (np.pi ** 2 * (n - 1))
    return 2 - 6 * g2 * n / np.pi ** 2
