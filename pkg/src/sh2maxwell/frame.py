"""Left-invariant frame, metric, contact form and Lie-rank test on SH(2).

Vector fields are handled in the coordinate basis (d/dx, d/dy, d/dz). The
distribution is spanned by

    X1 = cosh z d/dx + sinh z d/dy,    X2 = d/dz,

and X3 = [X1, X2] = -sinh z d/dx - cosh z d/dy completes the frame.
Brackets follow [v, w] = (v . grad) w - (w . grad) v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .group import DEFAULT_ATOL, GroupElement, allclose

FD_STEP = 1e-6
METRIC = np.diag([1.0, -1.0, 1.0])

Coeffs = Callable[[float, float, float], Sequence[float]]
Jacobian = Callable[[float, float, float], np.ndarray]


class ContractError(ValueError):
    """Raised when tangent vectors are combined at different base points."""


@dataclass(frozen=True)
class TangentVector:
    base: GroupElement
    components: tuple[float, float, float]

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if len(comps) != 3 or not all(math.isfinite(c) for c in comps):
            raise ValueError(f"tangent vector needs 3 finite components, got {self.components!r}")
        object.__setattr__(self, "components", comps)

    def as_array(self) -> np.ndarray:
        return np.array(self.components)


def fd_jacobian(coeffs: Coeffs, point: Sequence[float], h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian J[k, i] = d f^k / d q_i.

    The step is taken as the representable difference (q+h) - (q-h), which
    keeps linear coefficient functions exact up to rounding.
    """
    q = np.asarray(point, dtype=float)
    jac = np.empty((3, 3))
    for i in range(3):
        hi, lo = q.copy(), q.copy()
        hi[i] += h
        lo[i] -= h
        step = hi[i] - lo[i]
        jac[:, i] = (np.asarray(coeffs(*hi), dtype=float) - np.asarray(coeffs(*lo), dtype=float)) / step
    return jac


@dataclass(frozen=True)
class CoordinateVectorField:
    """Vector field given by coefficient functions (f_x, f_y, f_z) of (x, y, z).

    ``jacobian``, when supplied, returns the closed-form J[k, i] = d f^k / d q_i;
    otherwise derivatives are taken by central differences.
    """

    coeffs: Coeffs
    jacobian: Optional[Jacobian] = None
    name: str = ""

    def __call__(self, x: float, y: float, z: float) -> np.ndarray:
        return np.asarray(self.coeffs(x, y, z), dtype=float)

    def at(self, q: GroupElement) -> TangentVector:
        return TangentVector(q, tuple(self(q.x, q.y, q.z)))

    def jac(self, q: Sequence[float], mode: str = "analytic", h: float = FD_STEP) -> np.ndarray:
        if mode == "analytic" and self.jacobian is not None:
            return np.asarray(self.jacobian(*q), dtype=float)
        if mode not in ("analytic", "fd"):
            raise ValueError(f"unknown derivative mode {mode!r}")
        return fd_jacobian(self.coeffs, q, h)


def _zeros(x, y, z):
    return np.zeros((3, 3))


X1 = CoordinateVectorField(
    lambda x, y, z: (math.cosh(z), math.sinh(z), 0.0),
    lambda x, y, z: np.array([[0.0, 0.0, math.sinh(z)], [0.0, 0.0, math.cosh(z)], [0.0, 0.0, 0.0]]),
    name="X1",
)
X2 = CoordinateVectorField(lambda x, y, z: (0.0, 0.0, 1.0), _zeros, name="X2")
X3 = CoordinateVectorField(
    lambda x, y, z: (-math.sinh(z), -math.cosh(z), 0.0),
    lambda x, y, z: np.array([[0.0, 0.0, -math.cosh(z)], [0.0, 0.0, -math.sinh(z)], [0.0, 0.0, 0.0]]),
    name="X3",
)


def _point(q) -> tuple[float, float, float]:
    if isinstance(q, GroupElement):
        return q.as_tuple()
    x, y, z = q
    return float(x), float(y), float(z)


def eval_frame(q: GroupElement) -> tuple[TangentVector, TangentVector, TangentVector]:
    return X1.at(q), X2.at(q), X3.at(q)


def _check_base(q: GroupElement, *vectors: TangentVector) -> None:
    for v in vectors:
        if not allclose(v.base, q, DEFAULT_ATOL):
            raise ContractError(f"tangent vector based at {v.base} used at {q}")


def metric_eval(q: GroupElement, v: TangentVector, w: TangentVector) -> float:
    """g = dx^2 - dy^2 + dz^2 applied to (v, w)."""
    _check_base(q, v, w)
    (vx, vy, vz), (wx, wy, wz) = v.components, w.components
    return vx * wx - vy * wy + vz * wz


def contact_coeffs(x: float, y: float, z: float) -> tuple[float, float, float]:
    """Coefficients (e_x, e_y, e_z) of omega = cosh z dy - sinh z dx."""
    return (-math.sinh(z), math.cosh(z), 0.0)


def contact_form_eval(q: GroupElement, v: TangentVector) -> float:
    _check_base(q, v)
    vx, vy, _ = v.components
    return math.cosh(q.z) * vy - math.sinh(q.z) * vx


def contact_volume(q, h: float = FD_STEP) -> float:
    """Coefficient of omega ^ d(omega) on dx^dy^dz, i.e. e . curl(e).

    The curl is taken by central differences so the check does not rely on
    the closed form (which is -1 everywhere).
    """
    jac = fd_jacobian(contact_coeffs, _point(q), h)
    curl = np.array([jac[2, 1] - jac[1, 2], jac[0, 2] - jac[2, 0], jac[1, 0] - jac[0, 1]])
    return float(np.dot(contact_coeffs(*_point(q)), curl))


def lie_bracket(v: CoordinateVectorField, w: CoordinateVectorField, q, mode: str = "analytic") -> TangentVector:
    """Coordinate bracket [v, w] at q.

    mode="analytic" uses closed-form Jacobians where the fields provide them
    and falls back to central differences otherwise; mode="fd" forces
    differences for both fields.
    """
    p = _point(q)
    base = q if isinstance(q, GroupElement) else GroupElement(*p)
    vq, wq = v(*p), w(*p)
    out = w.jac(p, mode) @ vq - v.jac(p, mode) @ wq
    return TangentVector(base, tuple(out))


def lie_rank(q, generators: Sequence[CoordinateVectorField] = (X1, X2), tol: float = 1e-8) -> int:
    """Rank of the generators together with their pairwise brackets at q.

    One level of brackets is enough for a contact distribution in dimension 3.
    """
    p = _point(q)
    columns = [g(*p) for g in generators]
    for i in range(len(generators)):
        for j in range(i + 1, len(generators)):
            columns.append(lie_bracket(generators[i], generators[j], p).as_array())
    return int(np.linalg.matrix_rank(np.column_stack(columns), tol=tol))


def is_controllable_at(q, generators: Sequence[CoordinateVectorField] = (X1, X2)) -> bool:
    return lie_rank(q, generators) == 3
