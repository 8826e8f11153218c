"""Characteristic roots of the delay system, branch by branch.

A root ``S`` of ``delta(s) = s - a - sum_j a_j exp(-j s h)`` satisfies

    (S - a) h = W_k(Q(S)),   Q(s) = sum_j a_j h exp(-j a h) exp(-(j - 1)(s - a) h),

for exactly one Lambert W branch ``k``.  :func:`solve_branch` runs a damped
Newton iteration on that fixed-branch equation, so every converged iterate is
labelled with its branch.  Roots in branches ``k < 0`` are conjugates of
roots in ``k >= 0``, apart from real roots with ``(S - a) h < -1``, which sit
on the real half-line of ``W_{-1}`` and are found by a real-axis scan.

The conjugate of a branch ``k`` root normally lies in branch ``-k``.  When
``Q(S)`` is real and below ``-1/e`` (any oscillatory single-delay system) it
lies on the cut, and since each branch is closed on its upper boundary the
conjugate belongs to branch ``-k - 1``.  Truncation therefore follows the
upper-half-plane member of each pair rather than the label of the conjugate.
"""

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DegenerateRootError, DomainError
from .lambert_w import branch_of, lambert_w
from .model import delta, delta_prime, phi_laplace

__all__ = [
    "Root",
    "BranchSolution",
    "Spectrum",
    "Stability",
    "seed_guess",
    "solve_branch",
    "compute_spectrum",
    "residues",
    "stability",
    "real_roots",
]

NEWTON_TOL = 1e-10
RESIDUAL_TOL = 1e-9
DEDUP_TOL = 1e-8
MAX_NEWTON = 60
MAX_HALVINGS = 20


class Stability(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class Root:
    """One characteristic root with its residues.

    ``n`` is the position in the spectral series, ``k`` the Lambert W branch
    of ``(S - a) h`` and ``seed_j`` the seed family that first reached it or
    its conjugate (0 for roots found by the real-axis scan).
    """

    n: int
    k: int
    seed_j: int
    S: complex
    C: complex = 0j
    CI: complex = 0j
    residual: float = 0.0
    iterations: int = 0


@dataclass(frozen=True)
class BranchSolution:
    k: int
    roots: tuple
    expected: int

    @property
    def count(self):
        return len(self.roots)

    @property
    def short(self):
        return self.count < self.expected


@dataclass(frozen=True)
class Spectrum:
    """Conjugate-closed set of roots ordered by series index ``n``."""

    system: object
    roots: tuple
    depth: int
    counts: dict = field(default_factory=dict)
    warnings: tuple = ()

    @property
    def S0(self):
        return self.root(0).S

    def root(self, n):
        for r in self.roots:
            if r.n == n:
                return r
        raise KeyError(n)

    @property
    def S(self):
        return np.array([r.S for r in self.roots])

    @property
    def C(self):
        return np.array([r.C for r in self.roots])

    @property
    def CI(self):
        return np.array([r.CI for r in self.roots])

    def truncate(self, depth):
        """Sub-spectrum of the roots found in branches ``0..depth`` and their conjugates."""
        if depth >= self.depth:
            return self
        upper = {r.S for r in self.roots if r.n >= 0 and abs(r.k) <= depth}
        kept = tuple(
            r for r in self.roots if (r.S if r.n >= 0 else r.S.conjugate()) in upper
        )
        counts = {k: c for k, c in self.counts.items() if abs(k) <= depth}
        return replace(self, roots=kept, depth=depth, counts=counts)

    def __len__(self):
        return len(self.roots)


class _Branch:
    """Scalar evaluation of ``g(s) = (s - a) h - W_k(Q(s))`` and its derivative."""

    def __init__(self, sys, k):
        self.a, self.h, self.k = sys.a, sys.h, k
        self.q = [
            c * sys.h * math.exp(-(j + 1) * sys.a * sys.h)
            for j, c in enumerate(sys.delay_coeffs)
        ]

    def __call__(self, s):
        """Return ``(g, g')`` at ``s``; raises on overflow or W domain errors."""
        h = self.h
        u = (s - self.a) * h
        Q = 0j
        dQ = 0j
        for j, qj in enumerate(self.q):
            if qj == 0.0:
                continue
            e = qj * cmath.exp(-j * u)
            Q += e
            dQ -= j * h * e
        w = lambert_w(self.k, Q)
        dW = 1.0 if Q == 0 else w / (Q * (1.0 + w))
        return u - w, h - dW * dQ


_STEP_FAILURES = (DomainError, ConvergenceError, OverflowError, ZeroDivisionError)


def _newton(g, s, tol):
    """Damped Newton iteration; returns ``(root, iterations)`` or ``None``."""
    try:
        gs, dg = g(s)
    except _STEP_FAILURES:
        return None
    for it in range(1, MAX_NEWTON + 1):
        if dg == 0:
            return None
        step = gs / dg
        if abs(step) <= tol:
            return s - step, it
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = s - lam * step
            try:
                gt, dt = g(trial)
            except _STEP_FAILURES:
                gt = None
            if gt is not None and abs(gt) < abs(gs):
                break
            lam *= 0.5
        else:
            return None
        if abs(lam * step) <= tol:
            return trial, it
        s, gs, dg = trial, gt, dt
    return None


def _seed_argument(sys):
    for j, c in enumerate(sys.delay_coeffs, start=1):
        if c != 0.0:
            return c * sys.h * math.exp(-j * sys.a * sys.h)
    raise AssertionError("DelaySystem guarantees a non-zero delay coefficient")


def seed_guess(sys, k, j):
    """Initial guess for the ``j``-th root of branch ``k >= 0``.

    The single-delay root ``W_k(a_1 h exp(-a h)) / h + a`` shifted vertically
    so that the ``N`` seeds spread over one branch strip: by ``pi / (N - 1)``
    steps on the principal branch and ``N pi`` steps above it.
    """
    if not 1 <= j <= sys.N:
        raise IndexError(f"seed index j={j} outside 1..{sys.N}")
    base = lambert_w(k, _seed_argument(sys)) / sys.h + sys.a
    N = sys.N
    if N == 1:
        return base
    shift = -(j - 1) if N == 2 else j - (N + 1) / 2
    spacing = math.pi / (N - 1) if k == 0 else N * math.pi
    return base + 1j * shift * spacing / sys.h


def _ladder(sys):
    offsets = [0]
    for m in range(1, 2 * sys.N + 1):
        offsets += [m, -m]
    return [1j * m * math.pi / sys.h for m in offsets]


def _snap_real(sys, s):
    """Replace a numerically real root by its real-arithmetic refinement."""
    if abs(s.imag) > 1e-10 * (1.0 + abs(s)):
        return s
    x = s.real
    for _ in range(3):
        x -= delta(sys, x).real / delta_prime(sys, x).real
    return complex(x, 0.0)


def _add_unique(found, s, payload):
    for t, _ in found:
        if abs(t - s) <= DEDUP_TOL:
            return False
    found.append((s, payload))
    return True


def solve_branch(sys, k, seeds=None, tol=NEWTON_TOL):
    """Roots of the characteristic equation lying in Lambert W branch ``k >= 0``.

    Each seed is tried as given and then along a ladder of imaginary offsets
    ``m pi / h``, ``|m| <= 2 N``.  Converged points are kept when
    ``|delta(S)| <= 1e-9`` and de-duplicated at distance ``1e-8``.  The
    returned :class:`BranchSolution` reports a shortfall when fewer than
    ``N`` roots (one on the principal branch) were found; it does not raise.
    """
    if k < 0:
        raise ValueError("solve_branch works on k >= 0; negative branches are conjugates")
    g = _Branch(sys, k)
    if seeds is None:
        seeds = [seed_guess(sys, k, j) for j in range(1, sys.N + 1)]
    found = []
    for offset in _ladder(sys):
        for j, seed in enumerate(seeds, start=1):
            out = _newton(g, complex(seed) + offset, tol)
            if out is None:
                continue
            s, iters = out
            s = _snap_real(sys, s)
            if abs(delta(sys, s)) > RESIDUAL_TOL:
                continue
            _add_unique(found, s, (j, iters))
    roots = tuple(
        Root(n=0, k=k, seed_j=j, S=s, residual=float(abs(delta(sys, s))), iterations=it)
        for s, (j, it) in found
    )
    return BranchSolution(k=k, roots=roots, expected=1 if k == 0 else sys.N)


def _real_bounds(sys):
    ad = np.abs(sys.delay_coeffs)
    hi = max(0.0, sys.a + ad.sum()) + 1.0
    lo = min(0.0, sys.a) - 1.0
    N, h = sys.N, sys.h
    lead = ad[-1]
    for _ in range(100000):
        rest = abs(lo - sys.a) + sum(ad[j] * math.exp(-(j + 1) * lo * h) for j in range(N - 1))
        if lead * math.exp(-N * lo * h) > 2.0 * rest:
            break
        lo -= 0.25 * h
    return lo, hi


def real_roots(sys, samples=4000):
    """All real roots of the characteristic function, ascending."""
    lo, hi = _real_bounds(sys)
    xs = np.linspace(lo, hi, samples)
    f = lambda x: float(delta(sys, x).real)
    vals = np.array([f(x) for x in xs])
    out = []
    for x0, x1, f0, f1 in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if f0 == 0.0:
            out.append(float(x0))
        elif f0 * f1 < 0:
            out.append(brentq(f, x0, x1, xtol=1e-15, rtol=1e-15))
    if vals[-1] == 0.0:
        out.append(float(xs[-1]))
    # A tangent (repeated) root has no sign change; look for it where delta'
    # vanishes.
    fp = lambda x: float(delta_prime(sys, x).real)
    dvals = np.array([fp(x) for x in xs])
    for x0, x1, d0, d1 in zip(xs[:-1], xs[1:], dvals[:-1], dvals[1:]):
        if d0 * d1 < 0:
            x = brentq(fp, x0, x1, xtol=1e-15, rtol=1e-15)
            if abs(f(x)) <= RESIDUAL_TOL and all(abs(x - y) > DEDUP_TOL for y in out):
                out.append(x)
    return sorted(out)


def residues(sys, pre, S):
    """Residue ``C = 1 / delta'(S)`` and history coefficient ``CI`` at a root ``S``.

    ``CI = C * sum_j a_j exp(-j S h) Phi_j(S)``; ``pre=None`` means zero history.
    """
    S = complex(S)
    if abs(delta(sys, S)) > RESIDUAL_TOL:
        raise ValueError(f"{S!r} is not a characteristic root (|delta| = {abs(delta(sys, S)):.3g})")
    dp = delta_prime(sys, S)
    if abs(dp) < 1e-12:
        raise DegenerateRootError(f"repeated characteristic root at {S!r}")
    C = 1.0 / dp
    if pre is None:
        return complex(C), 0j
    acc = 0j
    for j, c in enumerate(sys.delay_coeffs, start=1):
        if c != 0.0:
            acc += c * cmath.exp(-j * S * sys.h) * phi_laplace(pre, sys, j, S)
    return complex(C), complex(C * acc)


def _order_key(r):
    return (abs(r.k), -r.S.real, r.S.imag)


def compute_spectrum(sys, depth, preshape=None, tol=NEWTON_TOL, threads=1):
    """Roots from branches ``|k| <= depth`` with residues, numbered as a series.

    ``S_0`` is the root of largest real part.  Upper-half-plane roots (and any
    further real roots) take indices ``1, 2, ...`` ordered by ``|k|``, then by
    decreasing real part, then increasing imaginary part.  Conjugates take
    the negative indices: ``S_{-n} = conj(S_n)`` when ``S_0`` is real and
    ``S_{-(n+1)} = conj(S_n)`` otherwise.
    """
    if depth < 0:
        raise ValueError("branch depth must be non-negative")
    if preshape is not None:
        preshape.check_covers(sys)
    ks = list(range(depth + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            branches = list(pool.map(lambda k: solve_branch(sys, k, tol=tol), ks))
    else:
        branches = [solve_branch(sys, k, tol=tol) for k in ks]

    warnings = []
    counts = {}
    upper, reals = [], []
    for br in branches:
        counts[br.k] = br.count
        if br.short:
            warnings.append(
                f"branch {br.k}: found {br.count} root(s), expected {br.expected}"
            )
        for r in br.roots:
            if r.S.imag > 0:
                _add_unique(upper, r.S, r)
            elif r.S.imag < 0:
                # Principal-branch roots come in conjugate pairs inside the branch.
                _add_unique(upper, r.S.conjugate(), replace(r, S=r.S.conjugate()))
            else:
                _add_unique(reals, r.S, r)
    for x in real_roots(sys):
        k = branch_of(complex((x - sys.a) * sys.h, 0.0))
        if abs(k) <= depth:
            s = complex(x, 0.0)
            if _add_unique(reals, s, Root(n=0, k=k, seed_j=0, S=s)):
                counts[k] = counts.get(k, 0) + 1

    candidates = [r for _, r in upper] + [r for _, r in reals]
    if not candidates:
        raise ConvergenceError("no characteristic roots found")
    first = max(candidates, key=lambda r: (r.S.real, r.S.imag == 0, -abs(r.S.imag)))
    rest = sorted((r for r in candidates if r is not first), key=_order_key)

    ordered = [replace(first, n=0)]
    negatives = []
    if first.S.imag != 0:
        negatives.append(first)
    for n, r in enumerate(rest, start=1):
        ordered.append(replace(r, n=n))
        if r.S.imag != 0:
            negatives.append(r)
    for n, r in enumerate(negatives, start=1):
        S = r.S.conjugate()
        # Usually -k; one lower when Q(S) sits on the cut of W (single delay).
        k = branch_of((S - sys.a) * sys.h)
        ordered.append(replace(r, n=-n, k=k, S=S))

    roots = []
    for r in ordered:
        if r.n >= 0:
            C, CI = residues(sys, preshape, r.S)
        else:
            # Conjugate of an already-computed root: all system data is real.
            twin = next(q for q in roots if q.S == r.S.conjugate())
            C, CI = twin.C.conjugate(), twin.CI.conjugate()
        roots.append(replace(r, C=C, CI=CI, residual=float(abs(delta(sys, r.S)))))
    roots.sort(key=lambda r: r.n)
    return Spectrum(
        system=sys,
        roots=tuple(roots),
        depth=depth,
        counts=counts,
        warnings=tuple(warnings),
    )


def stability(spec, tolerance=1e-9):
    """Verdict from the sign of ``Re(S_0)`` with a marginal band of ``tolerance``."""
    if not spec.roots:
        raise ValueError("empty spectrum")
    x = spec.S0.real
    if x < -tolerance:
        return Stability.STABLE
    if x > tolerance:
        return Stability.UNSTABLE
    return Stability.MARGINAL
