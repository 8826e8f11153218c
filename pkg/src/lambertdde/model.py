"""Delay systems, histories and forcing inputs.

The system is the scalar retarded equation

    x'(t) = a x(t) + sum_j a_j x(t - j h) + b u(t),   t > 0,

with ``x(0) = x0`` and ``x = phi`` on ``[-N h, 0)``.  The history is a
piecewise polynomial so that its Laplace transforms are available in closed
form.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from ._numerics import exp_moments, exprel
from .errors import ModelError

__all__ = [
    "DelaySystem",
    "Piece",
    "Preshape",
    "InputSignal",
    "Zero",
    "Constant",
    "Step",
    "Cosine",
    "Exponential",
    "Polynomial",
    "Sampled",
    "Combination",
    "input_eval",
    "input_from_dict",
    "delta",
    "delta_prime",
    "phi_laplace",
]

MAX_PRESHAPE_DEGREE = 10


@dataclass(frozen=True)
class DelaySystem:
    """Coefficients of ``x' = a x + sum_j a_j x(t - j h) + b u``.

    Trailing zero delay coefficients are trimmed so that ``N`` is the index
    of the largest delay actually present.
    """

    a: float
    delay_coeffs: tuple
    h: float
    b: float = 1.0

    def __post_init__(self):
        coeffs = [float(c) for c in self.delay_coeffs]
        while coeffs and coeffs[-1] == 0.0:
            coeffs.pop()
        if not coeffs:
            raise ModelError("at least one delay coefficient must be non-zero")
        h = float(self.h)
        if not h > 0 or not np.isfinite(h):
            raise ModelError(f"delay h must be positive and finite, got {self.h!r}")
        if not all(np.isfinite(coeffs)) or not np.isfinite(self.a) or not np.isfinite(self.b):
            raise ModelError("system coefficients must be finite")
        object.__setattr__(self, "delay_coeffs", tuple(coeffs))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "b", float(self.b))

    @property
    def N(self):
        return len(self.delay_coeffs)

    @property
    def history_span(self):
        """Length ``N h`` of the history interval."""
        return self.N * self.h


@dataclass(frozen=True)
class Piece:
    """Polynomial ``sum_m coeffs[m] * tau**m`` on ``[left, right)``."""

    left: float
    right: float
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", float(self.left))
        object.__setattr__(self, "right", float(self.right))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))
        if not self.left < self.right:
            raise ModelError(f"empty preshape piece [{self.left}, {self.right})")
        if len(self.coeffs) - 1 > MAX_PRESHAPE_DEGREE:
            raise ModelError(f"preshape degree exceeds {MAX_PRESHAPE_DEGREE}")


@dataclass(frozen=True)
class Preshape:
    """Piecewise-polynomial history ``phi`` on ``[-span, 0)`` plus ``x0 = x(0)``.

    ``x0`` need not equal ``phi(0-)``.
    """

    pieces: tuple
    x0: float

    def __post_init__(self):
        pieces = tuple(
            p if isinstance(p, Piece) else Piece(*p) for p in self.pieces
        )
        if not pieces:
            raise ModelError("preshape needs at least one piece")
        pieces = tuple(sorted(pieces, key=lambda p: p.left))
        for prev, nxt in zip(pieces, pieces[1:]):
            if abs(prev.right - nxt.left) > 1e-12 * max(1.0, abs(nxt.left)):
                raise ModelError(
                    f"preshape pieces must tile: gap/overlap at {prev.right} vs {nxt.left}"
                )
        if abs(pieces[-1].right) > 1e-12:
            raise ModelError("preshape must end at tau = 0")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "x0", float(self.x0))

    @classmethod
    def constant(cls, value, span, x0=None):
        """History ``phi = value`` on ``[-span, 0)``; ``x0`` defaults to ``value``."""
        return cls((Piece(-span, 0.0, (value,)),), value if x0 is None else x0)

    @classmethod
    def zero(cls, span, x0=0.0):
        return cls.constant(0.0, span, x0)

    @property
    def span(self):
        return -self.pieces[0].left

    def check_covers(self, sys):
        if self.span < sys.history_span * (1.0 - 1e-12):
            raise ModelError(
                f"preshape covers [-{self.span}, 0) but the system needs [-{sys.history_span}, 0)"
            )

    def _piece_index(self, tau, side):
        for i, p in enumerate(self.pieces):
            if side == "right" and p.left <= tau < p.right:
                return i
            if side == "left" and p.left < tau <= p.right:
                return i
        raise ModelError(f"tau = {tau} outside the preshape interval")

    def __call__(self, tau, side="right"):
        """Evaluate ``phi(tau)``; ``side="left"`` returns the left limit at piece joins."""
        p = self.pieces[self._piece_index(float(tau), side)]
        return float(P.polyval(tau, p.coeffs))

    def is_zero(self):
        return all(not any(p.coeffs) for p in self.pieces)


def delta(sys, s):
    """Characteristic function ``s - a - sum_j a_j exp(-j s h)``."""
    s = np.asarray(s, dtype=complex)
    j = np.arange(1, sys.N + 1)
    ad = np.asarray(sys.delay_coeffs)
    terms = ad * np.exp(-np.multiply.outer(s, j) * sys.h)
    out = s - sys.a - terms.sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def delta_prime(sys, s):
    """``d delta / ds = 1 + sum_j j a_j h exp(-j s h)``."""
    s = np.asarray(s, dtype=complex)
    j = np.arange(1, sys.N + 1)
    ad = np.asarray(sys.delay_coeffs)
    terms = j * ad * sys.h * np.exp(-np.multiply.outer(s, j) * sys.h)
    out = 1.0 + terms.sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def phi_laplace(pre, sys, j, s):
    """``Phi_j(s) = int_{-j h}^0 phi(tau) exp(-s tau) d tau`` in closed form."""
    if not 1 <= j <= sys.N:
        raise IndexError(f"delay index j={j} outside 1..{sys.N}")
    pre.check_covers(sys)
    lo = -j * sys.h
    s = complex(s)
    total = 0j
    for p in pre.pieces:
        left, right = max(p.left, lo), p.right
        if right <= left:
            continue
        length = right - left
        # p(left + length * u) as a polynomial in u.
        d = _shift_poly(p.coeffs, left, length)
        k = exp_moments(s * length, len(d) - 1)
        total += length * np.exp(-s * right) * np.dot(d, k)
    return complex(total)


def _shift_poly(coeffs, origin, scale):
    out = np.zeros(len(coeffs))
    basis = np.array([1.0])
    lin = np.array([origin, scale])
    for c in coeffs:
        out[: len(basis)] += c * basis
        basis = P.polymul(basis, lin)
    return out


def _exp_conv(lam, S, t):
    """``int_0^t exp(S (t - tau)) exp(lam tau) d tau`` for broadcast arrays.

    The exponent with the larger real part is factored out so that strongly
    damped modes underflow to zero instead of producing ``0 * inf``.
    """
    lam = np.asarray(lam, dtype=complex)
    S = np.asarray(S, dtype=complex)
    t = np.asarray(t, dtype=float)
    lead = np.where(lam.real >= S.real, lam, S)
    other = np.where(lam.real >= S.real, S, lam)
    with np.errstate(under="ignore"):
        return t * np.exp(lead * t) * exprel((other - lead) * t)


class InputSignal:
    """Base class of the forcing-function variants."""

    kind = None

    def __call__(self, t):
        raise NotImplementedError

    def convolve(self, S, t, panel_width=0.25):
        """``int_0^t exp(S (t - tau)) u(tau) d tau`` with shape ``(len(t), len(S))``."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    @staticmethod
    def _grid(S, t):
        S = np.atleast_1d(np.asarray(S, dtype=complex))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return S[None, :], t[:, None]


@dataclass(frozen=True)
class Zero(InputSignal):
    kind = "zero"

    def __call__(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        return np.zeros(np.broadcast_shapes(S.shape, t.shape), dtype=complex)

    def to_dict(self):
        return {"type": self.kind}


@dataclass(frozen=True)
class Constant(InputSignal):
    value: float
    kind = "constant"

    def __call__(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.value)[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        return self.value * _exp_conv(0.0, S, t)

    def to_dict(self):
        return {"type": self.kind, "value": self.value}


@dataclass(frozen=True)
class Step(InputSignal):
    amplitude: float
    onset: float = 0.0
    kind = "step"

    def __post_init__(self):
        if self.onset < 0:
            raise ModelError("step onset must be non-negative")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= self.onset, self.amplitude, 0.0)[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        dt = np.maximum(t - self.onset, 0.0)
        return self.amplitude * dt * exprel(S * dt)

    def to_dict(self):
        return {"type": self.kind, "amplitude": self.amplitude, "onset": self.onset}


@dataclass(frozen=True)
class Cosine(InputSignal):
    """``amplitude * cos(omega t + phase)``."""

    amplitude: float = 1.0
    omega: float = 1.0
    phase: float = 0.0
    kind = "cosine"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (self.amplitude * np.cos(self.omega * t + self.phase))[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        iw = 1j * self.omega
        up = np.exp(1j * self.phase) * _exp_conv(iw, S, t)
        down = np.exp(-1j * self.phase) * _exp_conv(-iw, S, t)
        return 0.5 * self.amplitude * (up + down)

    def to_dict(self):
        return {
            "type": self.kind,
            "amplitude": self.amplitude,
            "omega": self.omega,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class Exponential(InputSignal):
    """``amplitude * exp(rate t)``."""

    amplitude: float
    rate: float
    kind = "exponential"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (self.amplitude * np.exp(self.rate * t))[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        return self.amplitude * _exp_conv(self.rate, S, t)

    def to_dict(self):
        return {"type": self.kind, "amplitude": self.amplitude, "rate": self.rate}


@dataclass(frozen=True)
class Polynomial(InputSignal):
    """``sum_m coeffs[m] * t**m``."""

    coeffs: tuple
    kind = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))

    def __call__(self, t):
        return P.polyval(np.asarray(t, dtype=float), self.coeffs)[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        deg = len(self.coeffs) - 1
        # int_0^t tau^m exp(S (t - tau)) d tau = t^(m+1) k_m(S t)
        k = exp_moments(S * t, deg)
        powers = t[..., None] ** np.arange(1, deg + 2)
        return np.einsum("...m,m->...", k * powers, np.asarray(self.coeffs))

    def to_dict(self):
        return {"type": self.kind, "coeffs": list(self.coeffs)}


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class Sampled(InputSignal):
    """Linear interpolation of samples, zero outside ``[times[0], times[-1]]``."""

    times: tuple
    values: tuple
    kind = "sampled"

    def __post_init__(self):
        times = tuple(float(x) for x in self.times)
        values = tuple(float(x) for x in self.values)
        if len(times) < 2 or len(times) != len(values):
            raise ModelError("sampled input needs >= 2 (time, value) pairs")
        if np.any(np.diff(times) <= 0):
            raise ModelError("sample times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.times, self.values, left=0.0, right=0.0)[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        S = S[0]
        out = np.zeros((t.shape[0], S.shape[0]), dtype=complex)
        knots = np.asarray(self.times)
        for row, tt in enumerate(t[:, 0]):
            if tt <= 0:
                continue
            inner = knots[(knots > 0) & (knots < tt)]
            edges = np.unique(np.concatenate(([0.0, tt], inner)))
            acc = np.zeros(S.shape, dtype=complex)
            for lo, hi in zip(edges[:-1], edges[1:]):
                n = max(1, int(np.ceil((hi - lo) / panel_width)))
                for p in range(n):
                    a = lo + (hi - lo) * p / n
                    b = lo + (hi - lo) * (p + 1) / n
                    tau = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
                    w = 0.5 * (b - a) * _GL_WEIGHTS * self(tau)
                    acc += np.exp(np.multiply.outer(tt - tau, S)).T @ w
            out[row] = acc
        return out

    def to_dict(self):
        return {"type": self.kind, "times": list(self.times), "values": list(self.values)}


@dataclass(frozen=True)
class Combination(InputSignal):
    """Weighted sum of other inputs."""

    terms: tuple = field(default_factory=tuple)
    kind = "sum"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return sum((w * np.asarray(u(t)) for w, u in self.terms), np.zeros_like(t))[()]

    def convolve(self, S, t, panel_width=0.25):
        S, t = self._grid(S, t)
        out = np.zeros(np.broadcast_shapes(S.shape, t.shape), dtype=complex)
        for w, u in self.terms:
            out = out + w * u.convolve(S[0], t[:, 0], panel_width)
        return out

    def to_dict(self):
        return {
            "type": self.kind,
            "terms": [{"weight": w, "input": u.to_dict()} for w, u in self.terms],
        }


def input_eval(u, t):
    """Value of the forcing function ``u`` at time ``t >= 0``."""
    return float(u(t))


def input_from_dict(d):
    """Build an :class:`InputSignal` from its JSON description."""
    if d is None:
        return Zero()
    d = dict(d)
    kind = d.pop("type", None)
    try:
        if kind == "zero":
            return Zero()
        if kind == "constant":
            return Constant(float(d["value"]))
        if kind == "step":
            return Step(float(d["amplitude"]), float(d.get("onset", 0.0)))
        if kind == "cosine":
            return Cosine(
                float(d.get("amplitude", 1.0)),
                float(d.get("omega", 1.0)),
                float(d.get("phase", 0.0)),
            )
        if kind == "exponential":
            return Exponential(float(d["amplitude"]), float(d["rate"]))
        if kind == "polynomial":
            return Polynomial(tuple(d["coeffs"]))
        if kind == "sampled":
            return Sampled(tuple(d["times"]), tuple(d["values"]))
        if kind == "sum":
            return Combination(
                tuple((float(x["weight"]), input_from_dict(x["input"])) for x in d["terms"])
            )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"bad {kind!r} input description: {exc}") from exc
    raise ModelError(f"unknown input type {kind!r}")

