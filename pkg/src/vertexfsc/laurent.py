# Laurent polynomial arithmetic in the variable w = exp(i*u/2).
#
# A polynomial is stored as a plain dictionary {exponent: coefficient} with
# integer exponents (powers of w) and complex coefficients.  Evaluation is
# always done in the spectral parameter u, so lp_eval({k: c}, u) means
# c * exp(i*k*u/2).  Most quantities in this package only use even exponents
# (integer powers of exp(i*u)), but half-integer shifts show up in fused
# combinations, hence the half-angle variable.

import json
import math

import numpy as np

from .errors import EmptyPolynomial

# Coefficients below PRUNE_REL * max|coeff| are dropped.
PRUNE_REL = 1e-14


def lp_prune(d, rel=PRUNE_REL):
    """Remove negligible (and exactly zero) coefficients."""
    if not d:
        return {}
    top = max(abs(c) for c in d.values())
    if top == 0.0:
        return {}
    return {k: c for k, c in d.items() if abs(c) > rel * top}


def lp_add(a, b):
    """Coefficient-wise sum of two Laurent dictionaries."""
    return lp_prune({k: a.get(k, 0) + b.get(k, 0) for k in set(a) | set(b)})


def lp_scale(a, c):
    """Multiply a polynomial by the scalar c."""
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def lp_mul(a, b):
    """Product; support bounds add."""
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            out[k] = out.get(k, 0) + ca * cb
    return lp_prune(out)


def lp_eval(p, u):
    """Evaluate sum_k c_k exp(i*k*u/2) at u (scalar or array)."""
    u = np.asarray(u, dtype=complex)
    out = np.zeros(u.shape, dtype=complex)
    for k, c in p.items():
        out += c * np.exp(0.5j * k * u)
    if out.ndim == 0:
        return complex(out)
    return out


def lp_deriv(p):
    """d/du of the polynomial: c_k -> c_k * (i*k/2)."""
    return {k: c * (0.5j * k) for k, c in p.items() if k != 0}


def lp_shift(p, klam):
    """Return the polynomial representing p(u + klam).

    A single mode c*exp(i*k*u/2) picks up the phase exp(i*k*klam/2).
    """
    return {k: c * np.exp(0.5j * k * klam) for k, c in p.items()}


def lp_degree(d):
    if not d:
        return -math.inf
    return max(d.keys())


def lp_valuation(d):
    if not d:
        return math.inf
    return min(d.keys())


def lp_coeff_array(p):
    """Dense coefficient array from valuation upward, plus the valuation."""
    if not p:
        raise EmptyPolynomial("zero polynomial has no coefficient array")
    v = lp_valuation(p)
    top = lp_degree(p)
    arr = np.zeros(top - v + 1, dtype=complex)
    for k, c in p.items():
        arr[k - v] = c
    return arr, v


def lp_div(num, den):
    """Polynomial long division num/den in w.

    Returns (quotient, remainder_norm) where remainder_norm is relative to
    the size of the numerator coefficients.  Exactness is the caller's
    business (see fusion.fuse).
    """
    a, va = lp_coeff_array(lp_prune(num))
    b, vb = lp_coeff_array(lp_prune(den))
    n_q = len(a) - len(b) + 1
    if n_q < 1:
        return {}, float(np.max(np.abs(a)) and 1.0)
    # least-squares deconvolution: far more stable than synthetic long
    # division when the root radii straddle the unit circle
    C = np.zeros((len(a), n_q), dtype=complex)
    idx = np.arange(n_q)
    for i, bi in enumerate(b):
        C[idx + i, idx] = bi
    q, *_ = np.linalg.lstsq(C, a, rcond=None)
    scale = np.max(np.abs(a)) or 1.0
    rnorm = float(np.max(np.abs(a - C @ q)) / scale)
    return lp_prune({i + va - vb: c for i, c in enumerate(q)}), rnorm


def lp_zeros(p, strip=None, cluster_tol=1e-6, dedupe_tol=1e-8):
    """Zeros of u -> lp_eval(p, u) with Re(u) inside the given strip.

    strip is a (re_min, re_max) pair; it defaults to one full period of the
    polynomial, (-period/2, period/2].  Roots are found as companion-matrix
    eigenvalues of the w-polynomial (after factoring out the minimal power
    and reducing by the common exponent stride), mapped back through
    u = -2i log w, polished by two Newton steps when the root is simple
    enough for Newton to help, de-duplicated within dedupe_tol and clustered
    into multiplicity groups within cluster_tol.

    Returns a list of (u, multiplicity) pairs sorted by real part.
    """
    p = lp_prune(p)
    if not p:
        raise EmptyPolynomial("cannot locate zeros of the zero polynomial")
    ks = sorted(p.keys())
    v = ks[0]
    if len(ks) == 1:
        return []  # monomial: no zeros away from w=0
    g = 0
    for k in ks:
        g = math.gcd(g, k - v)
    # polynomial in W = w^g of degree (top-v)/g
    deg = (ks[-1] - v) // g
    coeffs = np.zeros(deg + 1, dtype=complex)
    for k, c in p.items():
        coeffs[(k - v) // g] = c
    wroots = np.roots(coeffs[::-1])
    period = 4.0 * np.pi / g  # u-period: W = exp(i*g*u/2)
    if strip is None:
        strip = (-period / 2.0, period / 2.0)
    re_min, re_max = strip

    deriv = lp_deriv(p)
    roots_u = []
    for W in wroots:
        if W == 0:
            continue
        u0 = -2j * np.log(W) / g
        # slide the real part into the strip
        n_lo = math.ceil((re_min - u0.real) / period - 1e-12)
        n_hi = math.floor((re_max - u0.real) / period + 1e-12)
        for n in range(n_lo, n_hi + 1):
            u = u0 + n * period
            if not (re_min - 1e-12 <= u.real <= re_max + 1e-12):
                continue
            # Newton polish, but only where the derivative is healthy:
            # for near-multiple roots Newton bounces around and we keep the
            # companion value instead.
            for _ in range(2):
                fu = lp_eval(p, u)
                dfu = lp_eval(deriv, u)
                if abs(dfu) < 1e-8 * max(1.0, abs(fu)) ** 0.5:
                    break
                step = fu / dfu
                if abs(step) > 10 * cluster_tol:
                    # far from the seed: likely a multiple-root artefact
                    break
                u = u - step
            roots_u.append(complex(u))

    # After the stride reduction every companion root maps to exactly one u
    # per period, so coincident values are genuine multiplicities: cluster
    # them by centroid linkage (a sort-order scan can interleave members of
    # different clusters when their real parts straddle each other).
    tol = max(cluster_tol, dedupe_tol)
    clusters = []  # [centroid, multiplicity]
    for z in roots_u:
        best = None
        for cl in clusters:
            d = abs(z - cl[0])
            if d < tol and (best is None or d < abs(z - best[0])):
                best = cl
        if best is None:
            clusters.append([z, 1])
        else:
            best[0] = (best[0] * best[1] + z) / (best[1] + 1)
            best[1] += 1
    clustered = [(z, m) for z, m in clusters]
    clustered.sort(key=lambda t: (t[0].real, t[0].imag))
    return clustered


def lp_to_json(p):
    """Serialize as {"var": "exp(i*u/2)", "coeffs": [[k, re, im], ...]}."""
    coeffs = [[int(k), float(np.real(c)), float(np.imag(c))]
              for k, c in sorted(p.items())]
    return json.dumps({"var": "exp(i*u/2)", "coeffs": coeffs})


def lp_from_json(s):
    data = json.loads(s)
    if data.get("var") != "exp(i*u/2)":
        raise ValueError("unexpected variable tag %r" % data.get("var"))
    return {int(k): complex(re, im) for k, re, im in data["coeffs"]}


def lp_from_samples(us, values, k_min, k_max, stride=2, cond_limit=1e12):
    """Fit a Laurent polynomial through (u, value) samples.

    The support is the exponent lattice k_min..k_max with the given stride
    (2 = integer powers of exp(i*u)).  With equally spaced u on one period
    the system is a unitary DFT and perfectly conditioned; the condition
    guard matters only for irregular sample sets.
    """
    from .errors import IllConditionedFit

    ks = np.arange(k_min, k_max + 1, stride)
    us = np.asarray(us, dtype=complex)
    M = np.exp(0.5j * np.outer(us, ks))
    if M.shape[0] == M.shape[1]:
        cond = np.linalg.cond(M)
        if cond > cond_limit:
            raise IllConditionedFit(f"condition number {cond:.3e}")
        c = np.linalg.solve(M, np.asarray(values, dtype=complex))
    else:
        c, *_ = np.linalg.lstsq(M, np.asarray(values, dtype=complex),
                                rcond=None)
    return lp_prune({int(k): complex(ci) for k, ci in zip(ks, c)})
