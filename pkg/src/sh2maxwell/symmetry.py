"""Infinitesimal symmetries of the SH(2) sub-Riemannian structure.

A field v is a symmetry when it preserves the distribution and the metric:
omega([v, X_j]) = 0 for j = 1, 2 and L_v g = 0. The symmetry algebra is
spanned by

    v1 = -y d/dx - x d/dy - d/dz,   v2 = d/dx,   v3 = d/dy,

with [v1, v2] = v3, [v1, v3] = v2, [v2, v3] = 0. The flow of v1 is the boost
(x, y, z) -> (x cosh s - y sinh s, y cosh s - x sinh s, z - s), i.e. left
multiplication by m(0, 0, -s); its fixed points form the axis S = {(0, 0, z)}.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .extremal import Trajectory
from .frame import METRIC, X1, X2, CoordinateVectorField, contact_coeffs
from .group import DEFAULT_ATOL, GroupElement, rotation_apply

DEFAULT_SAMPLES = 200
DEFAULT_BOX = (-5.0, 5.0)
DEFAULT_SEED = 0
DEFAULT_THRESHOLD = 1e-6


def _const_jac(mat):
    mat = np.array(mat, dtype=float)
    return lambda x, y, z: mat


V1 = CoordinateVectorField(
    lambda x, y, z: (-y, -x, -1.0),
    _const_jac([[0, -1, 0], [-1, 0, 0], [0, 0, 0]]),
    name="v1",
)
V2 = CoordinateVectorField(lambda x, y, z: (1.0, 0.0, 0.0), _const_jac(np.zeros((3, 3))), name="v2")
V3 = CoordinateVectorField(lambda x, y, z: (0.0, 1.0, 0.0), _const_jac(np.zeros((3, 3))), name="v3")
GENERATORS = {"v1": V1, "v2": V2, "v3": V3}


@dataclass
class SymmetryReport:
    field: str
    residual_contact: float
    residual_metric: float
    samples: int
    tolerance: float
    valid: bool = True

    @property
    def passed(self) -> bool:
        return self.valid and max(self.residual_contact, self.residual_metric) < self.tolerance

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = self.passed
        if not self.valid:
            out["residual_contact"] = out["residual_metric"] = None
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def sample_points(n: int = DEFAULT_SAMPLES, box: Sequence[float] = DEFAULT_BOX,
                  seed: int = DEFAULT_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(box[0], box[1], size=(n, 3))


def metric_lie_derivative(v: CoordinateVectorField, p: Sequence[float], mode: str = "analytic") -> np.ndarray:
    """(L_v g)_ij = g_kj d_i v^k + g_ik d_j v^k for the constant metric diag(1, -1, 1)."""
    jac = v.jac(p, mode)
    return jac.T @ METRIC + METRIC @ jac


def contact_residuals(v: CoordinateVectorField, p: Sequence[float], mode: str = "analytic") -> tuple[float, float]:
    """omega([v, X1]) and omega([v, X2]) at p; frame derivatives are closed-form."""
    jac_v = v.jac(p, mode)
    vp = v(*p)
    omega = np.asarray(contact_coeffs(*p))
    out = []
    for frame_field in (X1, X2):
        bracket = frame_field.jac(p, "analytic") @ vp - jac_v @ frame_field(*p)
        out.append(float(omega @ bracket))
    return out[0], out[1]


def verify_symmetry(
    v: CoordinateVectorField | str,
    points: Optional[Iterable[Sequence[float]]] = None,
    *,
    mode: str = "fd",
    threshold: float = DEFAULT_THRESHOLD,
    n: int = DEFAULT_SAMPLES,
    box: Sequence[float] = DEFAULT_BOX,
    seed: int = DEFAULT_SEED,
) -> SymmetryReport:
    """Check both symmetry conditions at sample points and report max residuals.

    ``mode`` selects how derivatives of v are taken ("fd" or "analytic").
    Default samples: 200 uniform points in [-5, 5]^3 from a fixed seed.
    """
    if isinstance(v, str):
        v = GENERATORS[v]
    pts = sample_points(n, box, seed) if points is None else np.asarray(list(points), dtype=float)
    res_c = res_m = 0.0
    valid = True
    for p in pts:
        try:
            c1, c2 = contact_residuals(v, p, mode)
            lg = metric_lie_derivative(v, p, mode)
        except (ArithmeticError, ValueError):
            valid = False
            break
        vals = [abs(c1), abs(c2), *np.abs(lg[np.triu_indices(3)])]
        if not all(math.isfinite(x) for x in vals):
            valid = False
            break
        res_c = max(res_c, abs(c1), abs(c2))
        res_m = max(res_m, float(np.max(np.abs(lg[np.triu_indices(3)]))))
    return SymmetryReport(v.name or "field", res_c, res_m, len(pts), threshold, valid)


@dataclass
class BracketTable:
    """Structure constants c[(a, b)] with [a, b] = sum_k c_k v_k, plus the
    largest pointwise deviation seen while estimating them."""

    constants: dict
    residual: float
    samples: int

    def to_dict(self) -> dict:
        return {
            "constants": {f"[{a},{b}]": dict(zip(GENERATORS, map(float, c))) for (a, b), c in self.constants.items()},
            "residual": self.residual,
            "samples": self.samples,
        }


EXPECTED_BRACKETS = {
    ("v1", "v2"): (0.0, 0.0, 1.0),
    ("v1", "v3"): (0.0, 1.0, 0.0),
    ("v2", "v3"): (0.0, 0.0, 0.0),
}


def bracket_table(n: int = 20, box: Sequence[float] = DEFAULT_BOX, seed: int = DEFAULT_SEED,
                  mode: str = "fd") -> BracketTable:
    """Estimate the structure constants of span{v1, v2, v3} by finite-difference brackets.

    v1, v2, v3 form a pointwise basis of the tangent space, so each bracket
    is decomposed in that basis at every sample point; the reported constants
    are the sample means and ``residual`` is the max deviation from the
    expected table [v1,v2] = v3, [v1,v3] = v2, [v2,v3] = 0.
    """
    pts = sample_points(n, box, seed)
    names = list(GENERATORS)
    coeffs = {pair: [] for pair in EXPECTED_BRACKETS}
    for p in pts:
        basis = np.column_stack([GENERATORS[k](*p) for k in names])
        for a, b in EXPECTED_BRACKETS:
            va, vb = GENERATORS[a], GENERATORS[b]
            br = vb.jac(p, mode) @ va(*p) - va.jac(p, mode) @ vb(*p)
            coeffs[(a, b)].append(np.linalg.solve(basis, br))
    constants = {pair: np.mean(vals, axis=0) for pair, vals in coeffs.items()}
    residual = max(
        float(np.max(np.abs(np.array(vals) - np.array(EXPECTED_BRACKETS[pair]))))
        for pair, vals in coeffs.items()
    )
    return BracketTable(constants, residual, len(pts))


def flow_v1(q: GroupElement, s: float) -> GroupElement:
    """Time-s flow of v1; the same map as ``group.rotation_apply``."""
    return rotation_apply(s, q)


def flow_generator(q: GroupElement, h: float = 1e-3) -> np.ndarray:
    """d/ds flow_v1(q, s) at s = 0 by Richardson-extrapolated central differences."""

    def central(step):
        fp, fm = flow_v1(q, step), flow_v1(q, -step)
        return (np.array(fp.as_tuple()) - np.array(fm.as_tuple())) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def map_geodesic(traj: Trajectory, s: float) -> Trajectory:
    """Apply flow_v1 to every sample; covectors (hence controls) are kept."""
    ch, sh = math.cosh(s), math.sinh(s)
    x, y, z = traj.q.T
    q = np.column_stack([x * ch - y * sh, y * ch - x * sh, z - s])
    meta = dict(traj.meta, symmetry_s=float(s))
    return Trajectory(traj.t.copy(), q, traj.h.copy(), meta)


def sample_velocity(t: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Fourth-order central-difference velocity at interior samples 2..n-3.

    Assumes a uniform time grid.
    """
    if len(t) < 5:
        raise ValueError("need at least 5 samples for the velocity stencil")
    dt = t[1] - t[0]
    return (q[:-4] - 8.0 * q[1:-3] + 8.0 * q[3:-1] - q[4:]) / (12.0 * dt)


def admissibility_residuals(traj: Trajectory) -> tuple[float, float]:
    """Residuals of a sampled curve against the horizontal system.

    Returns (max |omega(q')|, max |q' - (h1 cosh z, h1 sinh z, h2)|) over
    interior samples, with q' from ``sample_velocity``.
    """
    vel = sample_velocity(traj.t, traj.q)
    q = traj.q[2:-2]
    h = traj.h[2:-2]
    z = q[:, 2]
    contact = np.abs(np.cosh(z) * vel[:, 1] - np.sinh(z) * vel[:, 0])
    model = np.column_stack([h[:, 0] * np.cosh(z), h[:, 0] * np.sinh(z), h[:, 1]])
    return float(contact.max()), float(np.abs(vel - model).max())


def is_fixed_point(q: GroupElement, tol: float = DEFAULT_ATOL) -> bool:
    """Membership in S = {(0, 0, z)}: max(|x|, |y|) <= tol."""
    return max(abs(q.x), abs(q.y)) <= tol


# -- user-supplied fields ---------------------------------------------------

_MATH_NAMES = {
    name: getattr(math, name)
    for name in ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "atan", "asin", "acos")
}
_MATH_NAMES.update(pi=math.pi, e=math.e)
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)
_BASIS = ("dx", "dy", "dz")


class FieldParseError(ValueError):
    pass


def parse_field(text: str) -> CoordinateVectorField:
    """Parse an expression such as ``"-y*dx - x*dy - dz"`` into a vector field.

    The expression must be linear in the basis symbols dx, dy, dz, with
    coefficients built from x, y, z, numbers and common math functions.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise FieldParseError(f"cannot parse field {text!r}: {exc.msg}") from None
    allowed_names = {"x", "y", "z", *_BASIS, *_MATH_NAMES}
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise FieldParseError(f"unsupported syntax {type(node).__name__} in {text!r}")
        if isinstance(node, ast.Name) and node.id not in allowed_names:
            raise FieldParseError(f"unknown name {node.id!r} in {text!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id in _MATH_NAMES):
            raise FieldParseError(f"unsupported call in {text!r}")
    code = compile(tree, "<field>", "eval")

    def evaluate(x, y, z, basis):
        env = dict(_MATH_NAMES, x=x, y=y, z=z, **dict(zip(_BASIS, basis)))
        return float(eval(code, {"__builtins__": {}}, env))

    def coeffs(x, y, z):
        base = evaluate(x, y, z, (0.0, 0.0, 0.0))
        return tuple(evaluate(x, y, z, unit) - base for unit in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))

    # linearity probe: f(0) = 0, f(a + b) = f(a) + f(b), f(2a) = 2 f(a)
    a, b = (0.7, -1.3, 0.4), (-0.2, 0.9, 1.1)
    probes = ((0.0, 0.0, 0.0), a, b, tuple(u + w for u, w in zip(a, b)), tuple(2.0 * u for u in a))
    try:
        f0, fa, fb, fab, f2a = (evaluate(0.3, -0.2, 0.1, p) for p in probes)
    except (ArithmeticError, ValueError, TypeError) as exc:
        raise FieldParseError(f"cannot evaluate field {text!r}: {exc}") from None
    scale = 1e-9 * (1.0 + abs(fa) + abs(fb))
    if abs(f0) > 1e-12 or abs(fab - fa - fb) > scale or abs(f2a - 2.0 * fa) > scale:
        raise FieldParseError(f"field {text!r} is not linear in dx, dy, dz")
    return CoordinateVectorField(coeffs, None, name=text)
