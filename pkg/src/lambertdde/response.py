"""Time response as a truncated exponential series over the characteristic roots.

With ``C_n = 1 / delta'(S_n)`` and the history coefficients ``CI_n``,

    x(t) = sum_n (C_n x0 + CI_n) exp(S_n t)
           + b sum_n C_n int_0^t exp(S_n (t - tau)) u(tau) d tau.

Conjugate pairs are summed as ``2 Re(.)`` over the upper-half-plane member,
so every returned value is real by construction.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import Zero
from .spectrum import compute_spectrum

__all__ = [
    "ResponseSeries",
    "Trajectory",
    "psi",
    "initial_response",
    "forced_response",
    "total_response",
    "truncation_error_curve",
]


@dataclass(frozen=True)
class ResponseSeries:
    spectrum: object
    x0: float
    preshape: object
    input: object
    b: float

    @classmethod
    def build(cls, sys, preshape, u=None, depth=5, threads=1):
        spec = compute_spectrum(sys, depth, preshape, threads=threads)
        return cls(spec, preshape.x0, preshape, u if u is not None else Zero(), sys.b)

    def with_spectrum(self, spectrum):
        return ResponseSeries(spectrum, self.x0, self.preshape, self.input, self.b)


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("response is defined for t >= 0")
    return t


def _representatives(spec):
    """Upper-half-plane and real roots with their pair weights (2 or 1)."""
    S = spec.S
    keep = S.imag >= 0
    weights = np.where(S.imag > 0, 2.0, 1.0)[keep]
    return keep, S[keep], weights


def _modes(S, t):
    with np.errstate(under="ignore"):
        return np.exp(np.multiply.outer(np.atleast_1d(t), S))


def _series(spec, coeffs, t):
    """``Re sum_n coeffs_n exp(S_n t)`` by paired summation, plus the imaginary
    part of the unpaired full sum (which should vanish)."""
    t = _times(t)
    keep, S, w = _representatives(spec)
    terms = _modes(S, t) * np.asarray(coeffs)[keep]
    value = (terms.real * w).sum(axis=-1)
    full = (_modes(spec.S, t) * np.asarray(coeffs)).sum(axis=-1)
    return value.reshape(t.shape), np.abs(full.imag).reshape(t.shape)


def psi(spec, t):
    """State transition function ``Psi(t) = sum_n C_n exp(S_n t)``."""
    value, _ = _series(spec, spec.C, t)
    return value[()]


def initial_response(rs, t):
    """Response to ``x0`` and the history with zero input."""
    spec = rs.spectrum
    value, _ = _series(spec, spec.C * rs.x0 + spec.CI, t)
    return value[()]


def forced_response(rs, t):
    """Response to ``b u`` from rest."""
    t = _times(t)
    if isinstance(rs.input, Zero) or rs.b == 0:
        return np.zeros_like(t)[()]
    spec = rs.spectrum
    keep, S, w = _representatives(spec)
    conv = rs.input.convolve(S, t.ravel(), panel_width=spec.system.h / 4)
    value = rs.b * (conv * spec.C[keep]).real @ w
    return value.reshape(t.shape)[()]


def total_response(rs, times):
    """Initial plus forced response on an ascending grid of times."""
    times = _times(times)
    spec = rs.spectrum
    init, imag_init = _series(spec, spec.C * rs.x0 + spec.CI, times)
    forced = np.atleast_1d(forced_response(rs, times))
    return Trajectory(
        times,
        init + forced,
        {
            "depth": spec.depth,
            "terms": len(spec),
            "imag_residue": float(imag_init.max(initial=0.0)),
            "warnings": list(spec.warnings),
            "initial": init,
            "forced": forced,
        },
    )


def truncation_error_curve(sys, pre, u, depths, times, oracle_values, x0=None, threads=1):
    """Sup-norm distance to a reference trajectory for each truncation depth.

    The spectrum is computed once at the largest depth and truncated, which is
    the same as recomputing because branches are solved independently.
    """
    times = _times(times)
    oracle_values = np.asarray(oracle_values, dtype=float)
    if oracle_values.shape != times.shape:
        raise ValueError("oracle trajectory must live on the same grid")
    full = compute_spectrum(sys, max(depths), pre, threads=threads)
    rs = ResponseSeries(full, pre.x0 if x0 is None else x0, pre, u if u is not None else Zero(), sys.b)
    out = []
    for K in depths:
        traj = total_response(rs.with_spectrum(full.truncate(K)), times)
        out.append((K, float(np.max(np.abs(traj.values - oracle_values)))))
    return out
