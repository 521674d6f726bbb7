"""The group SH(2) of motions of the pseudo-Euclidean plane.

A motion m(x, y, z) acts on a plane point a = (a1, a2) by a hyperbolic
rotation through angle z followed by the translation (x, y):

    b1 = a1 cosh z + a2 sinh z + x
    b2 = a1 sinh z + a2 cosh z + y

Elements are stored as raw coordinate triples; the 3x3 matrix form is only
built on request.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_ATOL = 1e-10


@dataclass(frozen=True)
class GroupElement:
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"GroupElement.{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_matrix(self) -> np.ndarray:
        """Homogeneous 3x3 matrix acting on column vectors (a1, a2, 1)."""
        ch, sh = math.cosh(self.z), math.sinh(self.z)
        return np.array([[ch, sh, self.x], [sh, ch, self.y], [0.0, 0.0, 1.0]])

    @classmethod
    def from_matrix(cls, mat) -> "GroupElement":
        mat = np.asarray(mat, dtype=float)
        return cls(mat[0, 2], mat[1, 2], math.atanh(mat[1, 0] / mat[0, 0]))

    def to_csv(self) -> str:
        return f"{self.x!r},{self.y!r},{self.z!r}"

    @classmethod
    def from_csv(cls, text: str) -> "GroupElement":
        parts = text.strip().split(",")
        if len(parts) != 3:
            raise ValueError(f"expected 'x,y,z', got {text!r}")
        return cls(*(float(p) for p in parts))

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "GroupElement":
        data = json.loads(text)
        return cls(data["x"], data["y"], data["z"])


IDENTITY = GroupElement(0.0, 0.0, 0.0)


class PlanePoint(NamedTuple):
    a1: float
    a2: float


@dataclass(frozen=True)
class HyperbolicRotation:
    """The motion m(0, 0, -s): a boost of the pseudo-Euclidean plane."""

    s: float

    def as_matrix(self) -> np.ndarray:
        ch, sh = math.cosh(self.s), math.sinh(self.s)
        return np.array([[ch, -sh, 0.0], [-sh, ch, 0.0], [0.0, 0.0, 1.0]])

    def as_element(self) -> GroupElement:
        return GroupElement(0.0, 0.0, -self.s)


def compose(m1: GroupElement, m2: GroupElement) -> GroupElement:
    """Product m1 . m2 (apply m2 first, then m1)."""
    ch, sh = math.cosh(m1.z), math.sinh(m1.z)
    return GroupElement(
        m2.x * ch + m2.y * sh + m1.x,
        m2.x * sh + m2.y * ch + m1.y,
        m1.z + m2.z,
    )


def inverse(m: GroupElement) -> GroupElement:
    ch, sh = math.cosh(m.z), math.sinh(m.z)
    return GroupElement(-m.x * ch + m.y * sh, m.x * sh - m.y * ch, -m.z)


def act_on_plane(m: GroupElement, p) -> PlanePoint:
    a1, a2 = p
    ch, sh = math.cosh(m.z), math.sinh(m.z)
    return PlanePoint(a1 * ch + a2 * sh + m.x, a1 * sh + a2 * ch + m.y)


def rotation_apply(r: HyperbolicRotation | float, m: GroupElement) -> GroupElement:
    """Left-multiply m by the boost m(0, 0, -s).

    Componentwise (x cosh s - y sinh s, y cosh s - x sinh s, z - s).
    """
    s = r.s if isinstance(r, HyperbolicRotation) else float(r)
    ch, sh = math.cosh(s), math.sinh(s)
    return GroupElement(m.x * ch - m.y * sh, m.y * ch - m.x * sh, m.z - s)


def quadratic_form(p) -> float:
    """Pseudo-Euclidean square a1**2 - a2**2, preserved by every boost."""
    a1, a2 = p
    return a1 * a1 - a2 * a2


def allclose(m1: GroupElement, m2: GroupElement, atol: float = DEFAULT_ATOL) -> bool:
    return all(abs(u - v) <= atol for u, v in zip(m1.as_tuple(), m2.as_tuple()))
