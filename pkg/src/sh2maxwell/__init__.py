"""Sub-Riemannian geodesics, symmetries and Maxwell points on the group SH(2)."""

from .elliptic import complete_E, complete_K, incomplete_E, jacobi_am, jacobi_sn_cn_dn
from .extremal import (
    Covector,
    PendulumState,
    Stratum,
    Trajectory,
    abnormal_trajectory,
    classify,
    energy,
    integrate_extremal,
    to_pendulum,
)
from .group import IDENTITY, GroupElement, compose, inverse, rotation_apply
from .maxwell import find_k0, first_maxwell_time, g_function, g_scan, numeric_maxwell_search
from .symmetry import bracket_table, flow_v1, map_geodesic, verify_symmetry

__version__ = "0.1.0"

__all__ = [
    "GroupElement", "IDENTITY", "compose", "inverse", "rotation_apply",
    "Covector", "PendulumState", "Stratum", "Trajectory",
    "abnormal_trajectory", "classify", "energy", "integrate_extremal", "to_pendulum",
    "complete_E", "complete_K", "incomplete_E", "jacobi_am", "jacobi_sn_cn_dn",
    "bracket_table", "flow_v1", "map_geodesic", "verify_symmetry",
    "find_k0", "first_maxwell_time", "g_function", "g_scan", "numeric_maxwell_search",
]
