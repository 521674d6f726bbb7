"""Normal and abnormal extremals of the SH(2) problem and their pendulum reduction.

In the normal case the controls are u1 = h1, u2 = h2 and the extremals solve

    h1' = h2 h3,   h2' = -h1 h3,   h3' = h1 h2,
    x'  = h1 cosh z,   y' = h1 sinh z,   z' = h2,

with H = (h1^2 + h2^2) / 2 = 1/2 on the initial cylinder. Writing
h1 = cos(alpha), h2 = sin(alpha), gamma = 2 alpha and c = 2 h3, the vertical
part has the pendulum energy E = c^2/2 - cos(gamma) = 2 h3^2 - h1^2 + h2^2 as
a first integral, and the cylinder splits into the strata C1..C5 by E.

Note on orientation: along the vertical flow alpha' = -h3, so the image of
an extremal under ``to_pendulum`` solves gamma' = -c, c' = sin(gamma). That
is the pendulum gamma' = c, c' = -sin(gamma) with the momentum reflected
(c -> -c), equivalently run backwards in time. Energies and strata are
unaffected.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .group import IDENTITY, GroupElement
from .ode import DormandPrince, FixedRK4, IntegrationError, richardson_error

DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-11
DEFAULT_SAMPLE_DT = 0.01
DEFAULT_RK4_DT = 1e-3
EPS_E = 1e-9
CYLINDER_TOL = 1e-9
FOUR_PI = 4.0 * math.pi

__all__ = [
    "Covector",
    "PendulumState",
    "Stratum",
    "ExtremalState",
    "Trajectory",
    "CylinderError",
    "IntegrationError",
    "hamiltonian",
    "normal_rhs",
    "vertical_rhs",
    "pendulum_rhs",
    "integrate_extremal",
    "integrate_pendulum",
    "abnormal_trajectory",
    "to_pendulum",
    "energy",
    "classify",
]


class CylinderError(ValueError):
    """Covector does not lie on the initial cylinder h1^2 + h2^2 = 1."""


@dataclass(frozen=True)
class Covector:
    h1: float
    h2: float
    h3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.h1, self.h2, self.h3)

    def cylinder_defect(self) -> float:
        return self.h1 * self.h1 + self.h2 * self.h2 - 1.0

    @classmethod
    def initial(cls, h1: float, h2: float, h3: float, tol: float = 1e-12) -> "Covector":
        """Covector on the initial cylinder; rejects |h1^2 + h2^2 - 1| > tol."""
        h = cls(float(h1), float(h2), float(h3))
        if not all(math.isfinite(v) for v in h.as_tuple()):
            raise CylinderError(f"non-finite covector {h}")
        if abs(h.cylinder_defect()) > tol:
            raise CylinderError(f"{h} is off the cylinder (defect {h.cylinder_defect():.3e})")
        return h

    @classmethod
    def from_angle(cls, alpha: float, h3: float) -> "Covector":
        return cls(math.cos(alpha), math.sin(alpha), float(h3))

    @classmethod
    def from_pendulum(cls, gamma: float, c: float) -> "Covector":
        """Inverse of ``to_pendulum``: alpha = gamma/2, h3 = c/2."""
        return cls.from_angle(0.5 * gamma, 0.5 * c)


@dataclass(frozen=True)
class PendulumState:
    gamma: float
    c: float

    def energy(self) -> float:
        return 0.5 * self.c * self.c - math.cos(self.gamma)


class Stratum(str, enum.Enum):
    C1 = "C1"  # oscillation, E in (-1, 1)
    C2 = "C2"  # rotation, E > 1
    C3 = "C3"  # separatrix, E = 1 and c != 0
    C4 = "C4"  # stable equilibrium, E = -1
    C5 = "C5"  # unstable equilibrium, E = 1 and c = 0

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ExtremalState:
    q: GroupElement
    h: Covector


def hamiltonian(h) -> float:
    h1, h2 = h[0], h[1]
    return 0.5 * (h1 * h1 + h2 * h2)


def _as_h(h) -> tuple[float, float, float]:
    if isinstance(h, Covector):
        return h.as_tuple()
    h1, h2, h3 = h
    return float(h1), float(h2), float(h3)


def _normal_vec(s):
    x, y, z, h1, h2, h3 = s
    return [h1 * math.cosh(z), h1 * math.sinh(z), h2, h2 * h3, -h1 * h3, h1 * h2]


def _vertical_vec(h):
    h1, h2, h3 = h
    return [h2 * h3, -h1 * h3, h1 * h2]


def _pendulum_vec(p):
    gamma, c = p
    return [c, -math.sin(gamma)]


def normal_rhs(s: ExtremalState) -> ExtremalState:
    """Right-hand side of the normal Hamiltonian system.

    The derivative is returned in the same container: the ``q`` slot holds
    (x', y', z') and the ``h`` slot holds (h1', h2', h3').
    """
    d = _normal_vec(list(s.q.as_tuple()) + list(_as_h(s.h)))
    return ExtremalState(GroupElement(*d[:3]), Covector(*d[3:]))


def vertical_rhs(h) -> Covector:
    return Covector(*_vertical_vec(_as_h(h)))


def pendulum_rhs(p: PendulumState) -> PendulumState:
    return PendulumState(*_pendulum_vec((p.gamma, p.c)))


@dataclass
class Trajectory:
    """Samples (t, q, h) of an extremal; arrays have one row per sample."""

    t: np.ndarray
    q: np.ndarray
    h: np.ndarray
    meta: dict = field(default_factory=dict)

    CSV_HEADER = "t,x,y,z,h1,h2,h3"

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self) -> Iterator[tuple[float, ExtremalState]]:
        for t, q, h in zip(self.t, self.q, self.h):
            yield float(t), ExtremalState(GroupElement(*q), Covector(*map(float, h)))

    def state(self, i: int) -> ExtremalState:
        return ExtremalState(GroupElement(*self.q[i]), Covector(*map(float, self.h[i])))

    def to_csv(self, extra: Optional[dict[str, np.ndarray]] = None) -> str:
        """CSV text with 17 significant digits; ``extra`` appends named columns."""
        extra = extra or {}
        buf = io.StringIO()
        buf.write(",".join([self.CSV_HEADER, *extra]) + "\n")
        cols = [self.t, *self.q.T, *self.h.T, *extra.values()]
        for row in zip(*cols):
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        header = lines[0].split(",")
        if header[:7] != cls.CSV_HEADER.split(","):
            raise ValueError(f"unexpected trajectory header {lines[0]!r}")
        data = np.array([[float(v) for v in ln.split(",")[:7]] for ln in lines[1:]]).reshape(-1, 7)
        return cls(data[:, 0], data[:, 1:4], data[:, 4:7])


def sample_times(t1: float, dt: float) -> np.ndarray:
    """Uniform grid from 0 to t1 with spacing at most dt (t1 = 0 gives one sample)."""
    if t1 < 0 or not math.isfinite(t1):
        raise ValueError(f"t1 must be finite and >= 0, got {t1!r}")
    if dt <= 0:
        raise ValueError(f"sample spacing must be positive, got {dt!r}")
    if t1 == 0:
        return np.zeros(1)
    n = max(1, math.ceil(t1 / dt - 1e-9))
    return np.linspace(0.0, t1, n + 1)


def _make_stepper(rhs, method: str, rtol: float, atol: float, rk4_dt: float):
    if method == "dp45":
        return DormandPrince(rhs, rtol=rtol, atol=atol)
    if method == "rk4":
        return FixedRK4(rhs, dt=rk4_dt)
    raise ValueError(f"unknown integration method {method!r}")


def _run(rhs, y0, times, method, rtol, atol, rk4_dt):
    stepper = _make_stepper(rhs, method, rtol, atol, rk4_dt)
    out = np.empty((len(times), len(y0)))
    y = list(y0)
    out[0] = y
    for i in range(1, len(times)):
        y = stepper.advance(y, float(times[i - 1]), float(times[i]))
        out[i] = y
    return out, stepper


def integrate_extremal(
    h0,
    t1: float,
    *,
    dt: float = DEFAULT_SAMPLE_DT,
    method: str = "dp45",
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    rk4_dt: float = DEFAULT_RK4_DT,
    q0: GroupElement = IDENTITY,
    richardson: bool = False,
    cylinder_tol: float = CYLINDER_TOL,
) -> Trajectory:
    """Integrate the normal extremal with initial covector h0 up to time t1.

    Samples are taken on a uniform grid of spacing <= dt; the adaptive
    stepper lands exactly on every sample time. With ``method="rk4"`` a
    fixed-step classical Runge-Kutta scheme is used, and ``richardson=True``
    adds a step-doubling estimate of its global error to ``meta``.

    Raises CylinderError for h0 off the cylinder and IntegrationError
    (carrying the last good time) if the state blows up.
    """
    h = _as_h(h0)
    if abs(h[0] ** 2 + h[1] ** 2 - 1.0) > cylinder_tol:
        raise CylinderError(f"initial covector {h} is off the cylinder")
    times = sample_times(t1, dt)
    y0 = [q0.x, q0.y, q0.z, *h]
    out, stepper = _run(_normal_vec, y0, times, method, rtol, atol, rk4_dt)
    meta = {"method": method, "n_steps": stepper.n_steps, "dt": dt}
    if method == "dp45":
        meta.update(rtol=rtol, atol=atol, n_rejected=stepper.n_rejected)
    else:
        meta["rk4_dt"] = rk4_dt
        if richardson and t1 > 0:
            meta["richardson_error"] = richardson_error(_normal_vec, y0, float(t1), rk4_dt)
    return Trajectory(times, out[:, :3].copy(), out[:, 3:].copy(), meta)


def propagate(state: ExtremalState, t0: float, t1: float, rtol: float = DEFAULT_RTOL,
              atol: float = DEFAULT_ATOL) -> ExtremalState:
    """Advance a single extremal state from t0 to t1 (either direction)."""
    y0 = [*state.q.as_tuple(), *_as_h(state.h)]
    y = DormandPrince(_normal_vec, rtol=rtol, atol=atol).advance(y0, t0, t1)
    return ExtremalState(GroupElement(*y[:3]), Covector(*y[3:]))


def integrate_vertical(h0, t1: float, *, dt: float = DEFAULT_SAMPLE_DT, rtol: float = DEFAULT_RTOL,
                       atol: float = DEFAULT_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Integrate only the (h1, h2, h3) subsystem; returns (t, h) arrays."""
    times = sample_times(t1, dt)
    out, _ = _run(_vertical_vec, list(_as_h(h0)), times, "dp45", rtol, atol, DEFAULT_RK4_DT)
    return times, out


def integrate_pendulum(p0: PendulumState, t1: float, *, dt: float = DEFAULT_SAMPLE_DT,
                       method: str = "dp45", rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                       rk4_dt: float = DEFAULT_RK4_DT) -> tuple[np.ndarray, np.ndarray]:
    """Integrate gamma' = c, c' = -sin(gamma); returns (t, [gamma, c]) with gamma unwrapped."""
    times = sample_times(t1, dt)
    out, _ = _run(_pendulum_vec, [p0.gamma, p0.c], times, method, rtol, atol, rk4_dt)
    return times, out


def abnormal_trajectory(q0: GroupElement, t1: float, *, dt: float = DEFAULT_SAMPLE_DT,
                        h3: float = 1.0) -> Trajectory:
    """Abnormal extremal: h1 = h2 = 0, u = 0, so q stays at q0."""
    if h3 == 0:
        raise ValueError("abnormal extremals need h3 != 0")
    times = sample_times(t1, dt)
    n = len(times)
    q = np.tile(np.array(q0.as_tuple()), (n, 1))
    h = np.tile(np.array([0.0, 0.0, float(h3)]), (n, 1))
    return Trajectory(times, q, h, {"method": "abnormal"})


def _check_cylinder(h, tol: float) -> tuple[float, float, float]:
    h = _as_h(h)
    defect = h[0] * h[0] + h[1] * h[1] - 1.0
    if not abs(defect) <= tol:
        raise CylinderError(f"covector {h} is off the cylinder (defect {defect:.3e})")
    return h


def to_pendulum(h, tol: float = CYLINDER_TOL) -> PendulumState:
    """(gamma, c) = (2 atan2(h2, h1) mod 4 pi, 2 h3)."""
    h1, h2, h3 = _check_cylinder(h, tol)
    gamma = math.fmod(2.0 * math.atan2(h2, h1), FOUR_PI)
    if gamma < 0.0:
        gamma += FOUR_PI
    if gamma >= FOUR_PI:
        gamma = 0.0
    return PendulumState(gamma, 2.0 * h3)


def energy(h) -> float:
    h1, h2, h3 = _as_h(h)
    return 2.0 * h3 * h3 - h1 * h1 + h2 * h2


def classify(h, eps_E: float = EPS_E, tol: float = CYLINDER_TOL) -> Stratum:
    """Stratum of a covector on the cylinder by pendulum energy.

    E within eps_E of -1 is C4; within eps_E of 1 it is C3 when |c| > eps_E and
    C5 otherwise; the remaining covectors are C1 (E < 1) or C2 (E > 1).
    """
    h1, h2, h3 = _check_cylinder(h, tol)
    e = energy((h1, h2, h3))
    c = 2.0 * h3
    if abs(e + 1.0) <= eps_E:
        return Stratum.C4
    if abs(e - 1.0) <= eps_E:
        return Stratum.C3 if abs(c) > eps_E else Stratum.C5
    return Stratum.C1 if e < 1.0 else Stratum.C2
