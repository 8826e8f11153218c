"""Method-of-steps RK4 integrator used as the reference solution.

The step is ``dt = h / m``, so multiples of ``h`` fall on the grid and no RK
step straddles a breakpoint.  Delayed values at full steps are grid values;
the half-step stages read a cubic Hermite interpolant of the stored history,
built from the one-sided derivatives at each grid point.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ModelError
from .model import Preshape, Zero
from .response import Trajectory

__all__ = ["DenseHistory", "integrate", "psi_oracle"]


@dataclass(frozen=True)
class DenseHistory:
    """Grid solution with left/right derivatives for Hermite interpolation.

    ``dright[i]`` is ``x'(t_i+)`` and ``dleft[i]`` is ``x'(t_i-)``; they
    differ where the right-hand side jumps (delayed arguments crossing 0).
    """

    dt: float
    values: np.ndarray
    dright: np.ndarray
    dleft: np.ndarray
    preshape: Preshape

    @property
    def times(self):
        return self.dt * np.arange(len(self.values))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape)
        for idx, tt in np.ndenumerate(t):
            if tt < 0:
                out[idx] = self.preshape(tt)
                continue
            i = min(int(tt // self.dt), len(self.values) - 2)
            if i < 0:
                raise ValueError("history is empty")
            theta = tt / self.dt - i
            if theta > 1.0 + 1e-9:
                raise ValueError(f"t = {tt} beyond the integrated range")
            out[idx] = _hermite(
                self.values[i], self.values[i + 1], self.dright[i], self.dleft[i + 1], self.dt, theta
            )
        return out[()]


def _hermite(x0, x1, d0, d1, dt, theta):
    t2 = theta * theta
    t3 = t2 * theta
    return (
        (2 * t3 - 3 * t2 + 1) * x0
        + (t3 - 2 * t2 + theta) * dt * d0
        + (-2 * t3 + 3 * t2) * x1
        + (t3 - t2) * dt * d1
    )


def integrate(sys, pre, u=None, t_end=10.0, steps_per_delay=64):
    """Integrate the delay system with classical RK4 on the grid ``i h / m``.

    Returns a :class:`~lambertdde.response.Trajectory` on the full grid up to
    the first grid point ``>= t_end``; ``metadata["dense"]`` holds the
    :class:`DenseHistory` for evaluation between grid points.
    """
    m = int(steps_per_delay)
    if m < 4 or m != steps_per_delay:
        raise ModelError(f"steps_per_delay must be an integer >= 4, got {steps_per_delay!r}")
    if not t_end > 0:
        raise ModelError("t_end must be positive")
    pre.check_covers(sys)
    u = u if u is not None else Zero()
    dt = sys.h / m
    n_steps = int(np.ceil(t_end / dt - 1e-9))
    a, b = sys.a, sys.b
    coeffs = [(j, c) for j, c in enumerate(sys.delay_coeffs, start=1) if c != 0.0]

    x = np.empty(n_steps + 1)
    dright = np.empty(n_steps + 1)
    dleft = np.empty(n_steps + 1)
    x[0] = pre.x0
    dleft[0] = np.nan

    def delayed(i, theta):
        """State on past interval ``[i dt, (i + 1) dt]`` at fraction ``theta``."""
        if i < 0:
            if theta == 0.0:
                return pre(i * dt, side="right")
            if theta == 1.0:
                return pre((i + 1) * dt, side="left")
            return pre((i + theta) * dt)
        if theta == 0.0:
            return x[i]
        if theta == 1.0:
            return x[i + 1]
        return _hermite(x[i], x[i + 1], dright[i], dleft[i + 1], dt, theta)

    def rhs(n, theta, state):
        t = (n + theta) * dt
        acc = a * state + b * float(u(t))
        for j, c in coeffs:
            acc += c * delayed(n - j * m, theta)
        return acc

    with np.errstate(over="ignore", invalid="ignore"):
        _march(x, dright, dleft, n_steps, dt, rhs)
    dright[n_steps] = rhs(n_steps, 0.0, x[n_steps])

    dense = DenseHistory(dt, x, dright, dleft, pre)
    return Trajectory(dense.times, x.copy(), {"dense": dense, "steps_per_delay": m})


def _march(x, dright, dleft, n_steps, dt, rhs):
    for n in range(n_steps):
        xn = x[n]
        k1 = rhs(n, 0.0, xn)
        dright[n] = k1
        k2 = rhs(n, 0.5, xn + 0.5 * dt * k1)
        k3 = rhs(n, 0.5, xn + 0.5 * dt * k2)
        k4 = rhs(n, 1.0, xn + dt * k3)
        x[n + 1] = xn + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if not np.isfinite(x[n + 1]):
            raise BlowUpError(f"state became non-finite at t = {(n + 1) * dt:g}", (n + 1) * dt)
        dleft[n + 1] = rhs(n, 1.0, x[n + 1])


def psi_oracle(sys, t_end=10.0, steps_per_delay=64):
    """Fundamental solution: zero history, ``x(0) = 1``, no input."""
    return integrate(sys, Preshape.zero(sys.history_span, x0=1.0), Zero(), t_end, steps_per_delay)
