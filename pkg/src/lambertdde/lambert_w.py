"""Multi-branch Lambert W function.

``W_k(z)`` is the ``k``-th solution of ``w * exp(w) = z``.  The branch
partition of the w-plane follows Corless et al. (1996): the boundary between
branches ``k`` and ``k + 1`` (``k >= 0``) is the curve ``-y cot(y) + i y`` with
``y`` in ``(2k pi, (2k + 1) pi)``, its mirror image separates ``-k`` from
``-k - 1``, and the real half-line ``w < -1`` belongs to ``W_{-1}``.  Every
branch is closed on its upper boundary, which is the counter-clockwise
continuity convention used by mainstream implementations (scipy, mpmath).

The iteration is Halley's method on ``f(w) = w exp(w) - z`` started from
region-specific seeds; the branch of the converged value is certified with
:func:`branch_of` before it is returned.
"""

import cmath
import math

from .errors import ConvergenceError, DomainError, SingularityError

__all__ = [
    "lambert_w",
    "lambert_w_real",
    "w_derivative",
    "branch_of",
    "OMEGA",
]

#: The omega constant, ``W_0(1)``.
OMEGA = 0.567143290409783872999968662210355549753815787186512508135

_INV_E = math.exp(-1.0)
_TWO_PI = 2.0 * math.pi
_MAX_ITER = 50
_STEP_TOL = 1e-14

# Puiseux coefficients of W about the branch point -1/e in p = +-sqrt(2(ez + 1)).
_BRANCH_POINT_SERIES = (
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
)


def _branch_point_series(p):
    w = 0.0
    for c in reversed(_BRANCH_POINT_SERIES):
        w = w * p + c
    return w


def _asymptotic_seed(z, k):
    l1 = cmath.log(z) + _TWO_PI * k * 1j
    if l1 == 0:
        return None
    l2 = cmath.log(l1)
    return l1 - l2 + l2 / l1


def _halley(z, w):
    """Run Halley's iteration from ``w``; return the iterate or None on failure."""
    for _ in range(_MAX_ITER):
        try:
            ew = cmath.exp(w)
        except OverflowError:
            return None
        wew = w * ew
        f = wew - z
        # Residual at rounding level: near w = -1 the step test alone stalls.
        if abs(f) <= 2e-16 * (abs(z) + abs(wew)):
            return w
        wp1 = w + 1.0
        if wp1 == 0:
            return None
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0:
            return w if f == 0 else None
        dw = f / denom
        w = w - dw
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            return None
        if abs(dw) <= _STEP_TOL * (1.0 + abs(w)):
            return w
    return None


def _in_branch(w, k):
    """True when ``w`` lies in branch ``k`` or within rounding of its boundary."""
    if branch_of(w) == k:
        return True
    d = 1e-10 * (1.0 + abs(w))
    return any(branch_of(w + e) == k for e in (d, -d, d * 1j, -d * 1j))


def _seeds(k, z):
    # Two of the three branches meeting at -1/e are reached with p = -sqrt(...):
    # W_{-1} from the closed upper side of the cut and W_1 from below it.
    near_bp = abs(z + _INV_E) < 0.3
    p = cmath.sqrt(2.0 * (math.e * z + 1.0))
    seeds = []
    if k == 0:
        if near_bp:
            seeds.append(_branch_point_series(p))
        if abs(z) < 0.5:
            seeds.append(z - z * z + 1.5 * z ** 3)
        seeds.append(_asymptotic_seed(z, 0))
        if z != -1:
            seeds.append(cmath.log(1.0 + z))
        seeds.append(1.0 + 0j)
    else:
        if near_bp and ((k == -1 and z.imag >= 0) or (k == 1 and z.imag < 0)):
            seeds.append(_branch_point_series(-p))
        seeds.append(_asymptotic_seed(z, k))
        # Wrong-side start for the +-1 branches next to the branch point.
        if abs(k) == 1:
            seeds.append(_branch_point_series(-p))
            seeds.append(complex(-2.0, 2.0 * k))
    return [s for s in seeds if s is not None]


def lambert_w(k, z):
    """Branch ``k`` of the Lambert W function at ``z``.

    Parameters
    ----------
    k : int
        Branch index; ``k = 0`` is the principal branch.
    z : complex
        Argument.  A real ``z`` on a branch cut is taken on its upper side.

    Returns
    -------
    complex
        ``w`` with ``w * exp(w) == z`` and ``branch_of(w) == k``.

    Raises
    ------
    DomainError
        If ``k != 0`` and ``z == 0`` (logarithmic singularity).
    ConvergenceError
        If no seed leads to a certified root.
    """
    k = int(k)
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z!r}")
    # Normalise a signed zero imaginary part onto the upper side of the cut.
    z = complex(z.real, z.imag + 0.0)
    if z == 0:
        if k == 0:
            return 0j
        raise DomainError(f"W_{k}(0) is undefined for k != 0")
    if z.imag == 0:
        x = z.real
        if k == 0 and x >= -_INV_E:
            return complex(lambert_w_real("principal", x), 0.0)
        if k == -1 and -_INV_E <= x < 0:
            return complex(lambert_w_real("lower", x), 0.0)

    p = cmath.sqrt(2.0 * (math.e * z + 1.0))
    if abs(p) < 1e-2:
        if k == 0:
            return _branch_point_series(p)
        if (k == -1 and z.imag >= 0) or (k == 1 and z.imag < 0):
            return _branch_point_series(-p)

    for seed in _seeds(k, z):
        w = _halley(z, seed)
        if w is not None and _in_branch(w, k):
            return w
    raise ConvergenceError(f"Lambert W iteration failed for k={k}, z={z!r}")


def lambert_w_real(branch, x):
    """Real branches of Lambert W.

    ``branch`` is ``"principal"`` (defined for ``x >= -1/e``, returns
    ``w >= -1``) or ``"lower"`` (defined for ``-1/e <= x < 0``, returns
    ``w <= -1``).
    """
    x = float(x)
    if branch not in ("principal", "lower"):
        raise ValueError(f"unknown real branch {branch!r}")
    if not math.isfinite(x):
        raise DomainError(f"non-finite argument {x!r}")
    # Tolerate x rounding a hair below -1/e.
    q = 2.0 * (math.e * x + 1.0)
    if q < -1e-15:
        raise DomainError(f"x = {x!r} is below the branch point -1/e")
    sign = 1.0 if branch == "principal" else -1.0
    if branch == "lower" and x >= 0:
        raise DomainError(f"lower real branch needs -1/e <= x < 0, got {x!r}")
    if x == 0:
        return 0.0

    p = sign * math.sqrt(max(q, 0.0))
    if abs(p) < 1e-2:
        return _branch_point_series(p)
    if x < -0.25:
        w = _branch_point_series(p)
    elif branch == "principal":
        if x <= 3.0:
            lp = math.log1p(x)
            w = lp * (1.0 - math.log1p(lp) / (2.0 + lp))
        else:
            l1 = math.log(x)
            l2 = math.log(l1)
            w = l1 - l2 + l2 / l1
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1

    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= 2e-16 * (abs(x) + abs(w * ew)):
            return w
        wp1 = w + 1.0
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= _STEP_TOL * (1.0 + abs(w)):
            return w
    raise ConvergenceError(f"real Lambert W iteration failed for x={x!r}")


def w_derivative(k, z):
    """Derivative ``W_k'(z) = W / (z (1 + W))``."""
    z = complex(z)
    if z == 0 or abs(z + _INV_E) <= 1e-15:
        raise SingularityError(f"W' is singular at z = {z!r}")
    w = lambert_w(k, z)
    return w / (z * (1.0 + w))


def branch_of(w):
    """Index of the Lambert W branch whose range contains ``w``.

    Boundary points go to the branch below them (each branch is closed on
    its upper boundary).
    """
    w = complex(w)
    x, y = w.real, w.imag
    if y == 0:
        return 0 if x >= -1.0 else -1
    ay = abs(y)
    # Boundary curves lying entirely between w and the real axis.
    count = int(math.floor((ay / math.pi + 1.0) / 2.0))
    m = int(math.floor(ay / _TWO_PI))
    if m * _TWO_PI < ay < (2 * m + 1) * math.pi:
        xc = -ay / math.tan(ay)
        # Points within rounding of the curve count as on it; arguments on the
        # negative real axis below -1/e map exactly onto these curves.
        tol = 1e-12 * (1.0 + abs(xc))
        if (x < xc - tol) if y > 0 else (x <= xc + tol):
            count += 1
    return count if y > 0 else -count
