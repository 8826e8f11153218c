"""Cancellation-free exponential helpers shared by the model and response code."""

import numpy as np


def cexpm1(z):
    """``exp(z) - 1`` for complex arrays, accurate near ``z = 0``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    s = np.sin(0.5 * y)
    re = np.expm1(x) * np.cos(y) - 2.0 * s * s
    im = np.exp(x) * np.sin(y)
    return re + 1j * im


def exprel(z):
    """``(exp(z) - 1) / z`` with the removable singularity filled in."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + 0.5 * z, cexpm1(safe) / safe)


def exp_moments(x, degree):
    """Moments ``k_m(x) = int_0^1 v^m exp(x (1 - v)) dv`` for ``m = 0..degree``.

    Returns an array of shape ``x.shape + (degree + 1,)``.  Forward recurrence
    is used where it is stable (``|x| >= degree``), otherwise the top moment
    comes from its power series and the rest from the backward recurrence.
    """
    x = np.asarray(x, dtype=complex)
    out = np.empty(x.shape + (degree + 1,), dtype=complex)
    out[..., 0] = exprel(x)
    if degree == 0:
        return out

    ax = np.abs(x)
    fwd = ax >= degree
    if np.any(fwd):
        xf = x[fwd]
        k = out[..., 0][fwd]
        cols = [k]
        for m in range(1, degree + 1):
            k = (m * k - 1.0) / xf
            cols.append(k)
        out[fwd] = np.stack(cols, axis=-1)
    bwd = ~fwd
    if np.any(bwd):
        xb = x[bwd]
        # k_M(x) = M! sum_i x^i / (M + i + 1)!
        term = np.full(xb.shape, 1.0 / (degree + 1), dtype=complex)
        total = term.copy()
        i = 0
        while True:
            i += 1
            term = term * xb / (degree + 1 + i)
            total = total + term
            if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or i > 200:
                break
        k = total
        cols = [k]
        for m in range(degree, 0, -1):
            k = (xb * k + 1.0) / m
            cols.append(k)
        out[bwd] = np.stack(cols[::-1], axis=-1)
    return out
