"""Small explicit Runge-Kutta integrators for low-dimensional autonomous systems.

States are plain lists of floats; the systems here have at most six
components, where list arithmetic beats numpy's per-call overhead.
"""

from __future__ import annotations

import math
from typing import Callable, List, Sequence

Vector = List[float]
RHS = Callable[[Sequence[float]], Vector]

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# fifth-order minus embedded fourth-order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


class IntegrationError(RuntimeError):
    """Integration produced a non-finite state or could not meet tolerance.

    ``t_last`` and ``y_last`` hold the last accepted (finite) state.
    """

    def __init__(self, message: str, t_last: float, y_last: Sequence[float]):
        super().__init__(f"{message} (last good t={t_last!r})")
        self.t_last = t_last
        self.y_last = list(y_last)


def _axpy(y, h, coeffs, ks):
    out = list(y)
    for a, k in zip(coeffs, ks):
        if a:
            ha = h * a
            for i, ki in enumerate(k):
                out[i] += ha * ki
    return out


def _finite(y) -> bool:
    return all(math.isfinite(v) for v in y)


class DormandPrince:
    """Adaptive Dormand-Prince 5(4) stepper with FSAL and a PI step controller.

    ``advance(y, t0, t1)`` integrates exactly to t1; intermediate step sizes are
    carried over between calls so that sampling on a grid costs little.
    """

    order = 5

    def __init__(self, rhs: RHS, rtol: float = 1e-10, atol: float = 1e-10,
                 h_init: float | None = None, h_min: float = 1e-14, max_steps: int = 10_000_000):
        if rtol <= 0 or atol <= 0:
            raise ValueError("tolerances must be positive")
        self.rhs = rhs
        self.rtol, self.atol = rtol, atol
        self.h = h_init
        self.h_min = h_min
        self.max_steps = max_steps
        self.n_steps = 0
        self.n_rejected = 0
        self._err_prev = 1e-4

    def _initial_step(self, y, f0, span):
        scale = [self.atol + self.rtol * abs(v) for v in y]
        d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y, scale)) / len(y))
        d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f0, scale)) / len(y))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        return min(h, abs(span))

    def advance(self, y: Sequence[float], t0: float, t1: float) -> Vector:
        y = list(y)
        if t1 == t0:
            return y
        direction = 1.0 if t1 > t0 else -1.0
        t = t0
        try:
            f = self.rhs(y)
        except OverflowError:
            raise IntegrationError("non-finite state", t0, y) from None
        h = self.h if self.h else self._initial_step(y, f, t1 - t0)
        h = abs(h)
        while direction * (t1 - t) > 0.0:
            if self.n_steps >= self.max_steps:
                raise IntegrationError("step budget exhausted", t, y)
            remaining = abs(t1 - t)
            last = h >= remaining * (1.0 - 1e-12)
            step = remaining if last else h
            if not last and step < max(self.h_min, 8.0 * math.ulp(t)):
                raise IntegrationError("step size underflow", t, y)
            hs = direction * step
            ks = [f]
            try:
                for stage in range(1, 7):
                    ks.append(self.rhs(_axpy(y, hs, _A[stage], ks)))
                y_new = _axpy(y, hs, _B, ks)
                err_vec = _axpy([0.0] * len(y), hs, _E, ks)
                err = max(
                    abs(e) / (self.atol + self.rtol * max(abs(a), abs(b)))
                    for e, a, b in zip(err_vec, y, y_new)
                )
            except OverflowError:
                y_new, err = y, math.inf
            if not math.isfinite(err) or not _finite(y_new):
                if step <= self.h_min:
                    raise IntegrationError("non-finite state", t, y)
                h = 0.25 * step
                self.n_rejected += 1
                continue
            if err <= 1.0:
                t = t1 if last else t + hs
                y = y_new
                f = ks[6]
                self.n_steps += 1
                # PI controller (Hairer-Wanner, beta = 0.04)
                factor = 0.9 * err ** (-0.7 / 5) * self._err_prev ** (0.04) if err > 0 else 5.0
                factor = min(5.0, max(0.2, factor))
                self._err_prev = max(err, 1e-4)
                if not last or step >= h:
                    h = step * factor
            else:
                self.n_rejected += 1
                h = step * max(0.2, 0.9 * err ** (-1 / 5))
                if h < self.h_min:
                    raise IntegrationError("step size underflow", t, y)
        self.h = h
        return y


def rk4_step(rhs: RHS, y: Sequence[float], h: float) -> Vector:
    k1 = rhs(y)
    k2 = rhs([a + 0.5 * h * b for a, b in zip(y, k1)])
    k3 = rhs([a + 0.5 * h * b for a, b in zip(y, k2)])
    k4 = rhs([a + h * b for a, b in zip(y, k3)])
    return [a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]


class FixedRK4:
    """Classical fourth-order Runge-Kutta with a fixed maximal step."""

    order = 4

    def __init__(self, rhs: RHS, dt: float = 1e-3):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.rhs = rhs
        self.dt = dt
        self.n_steps = 0

    def advance(self, y: Sequence[float], t0: float, t1: float) -> Vector:
        y = list(y)
        span = t1 - t0
        if span == 0:
            return y
        n = max(1, math.ceil(abs(span) / self.dt - 1e-9))
        h = span / n
        for i in range(n):
            try:
                y_next = rk4_step(self.rhs, y, h)
            except OverflowError:
                y_next = [math.nan]
            if not _finite(y_next):
                raise IntegrationError("non-finite state", t0 + i * h, y)
            y = y_next
            self.n_steps += 1
        return y


def richardson_error(rhs: RHS, y0: Sequence[float], t1: float, dt: float) -> float:
    """Richardson estimate of the global RK4 error at t1 for step dt.

    Compares runs with dt and dt/2; for a fourth-order method the error of
    the finer run is about |y_dt/2 - y_dt| / 15.
    """
    coarse = FixedRK4(rhs, dt).advance(y0, 0.0, t1)
    fine = FixedRK4(rhs, dt / 2).advance(y0, 0.0, t1)
    return max(abs(a - b) for a, b in zip(coarse, fine)) / 15.0
