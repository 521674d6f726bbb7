"""Complete/incomplete elliptic integrals and Jacobi elliptic functions.

All functions take the *modulus* k (not the parameter m = k**2) and work on
plain Python floats. K and E use the arithmetic-geometric mean, the Jacobi
functions use the descending Landen (AGM) recursion, and the incomplete
integral of the second kind uses Carlson's symmetric forms R_F and R_D.

Accuracy is close to machine precision for 0 <= k < 1 - 1e-8. Above that the
complementary modulus k' carries only a few significant digits and K(k), being
logarithmically singular at k = 1, degrades accordingly.
"""

from __future__ import annotations

import math

__all__ = [
    "EllipticDomainError",
    "complementary_modulus",
    "complete_K",
    "complete_E",
    "jacobi_am",
    "jacobi_sn_cn_dn",
    "incomplete_E",
    "legendre_E",
    "carlson_rf",
    "carlson_rd",
]

_EPS = 2.220446049250313e-16
_MAX_AGM_ITER = 64


class EllipticDomainError(ValueError):
    """Raised when a modulus or argument lies outside the admissible domain."""


def _check_modulus(k: float, *, allow_one: bool = False) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0.0 or k > 1.0 or (k == 1.0 and not allow_one):
        bound = "[0, 1]" if allow_one else "[0, 1)"
        raise EllipticDomainError(f"modulus k={k!r} outside {bound}")
    return k


def complementary_modulus(k: float) -> float:
    """k' = sqrt(1 - k**2), evaluated as sqrt((1-k)(1+k)) to limit cancellation."""
    k = _check_modulus(k, allow_one=True)
    return math.sqrt((1.0 - k) * (1.0 + k))


def _agm_sequence(k: float) -> tuple[list[float], list[float]]:
    # a_n and c_n of the AGM started from (1, k'), c_0 = k.
    a, b, c = 1.0, complementary_modulus(k), k
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_AGM_ITER):
        if abs(c) <= _EPS * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind K(k).

    Raises EllipticDomainError for k outside [0, 1); K diverges at k = 1.
    """
    k = _check_modulus(k)
    a_seq, _ = _agm_sequence(k)
    return math.pi / (2.0 * a_seq[-1])


def complete_E(k: float) -> float:
    """Complete elliptic integral of the second kind E(k), 0 <= k <= 1."""
    k = _check_modulus(k, allow_one=True)
    if k == 1.0:
        return 1.0
    a_seq, c_seq = _agm_sequence(k)
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))
    return math.pi / (2.0 * a_seq[-1]) * (1.0 - s)


def _am_reduced(u: float, k: float) -> float:
    # Amplitude by descending Landen recursion, valid for any finite u.
    if k == 0.0:
        return u
    a_seq, c_seq = _agm_sequence(k)
    n = len(a_seq) - 1
    phi = 2.0**n * a_seq[n] * u
    for j in range(n, 0, -1):
        ratio = c_seq[j] / a_seq[j]
        phi = 0.5 * (phi + math.asin(ratio * math.sin(phi)))
    return phi


def _reduce(u: float, k: float) -> tuple[float, int]:
    # u = r + 2 n K with |r| <= K
    quarter = complete_K(k)
    n = round(u / (2.0 * quarter))
    return u - 2.0 * n * quarter, n


def jacobi_am(u: float, k: float) -> float:
    """Jacobi amplitude am(u, k).

    Continuous and strictly increasing in u, with am(u + 2K) = am(u) + pi.
    """
    k = _check_modulus(k)
    u = float(u)
    if not math.isfinite(u):
        raise EllipticDomainError(f"argument u={u!r} is not finite")
    if k == 0.0:
        return u
    r, n = _reduce(u, k)
    return _am_reduced(r, k) + n * math.pi


def jacobi_sn_cn_dn(u: float, k: float) -> tuple[float, float, float]:
    """Return (sn, cn, dn) at argument u and modulus k, 0 <= k <= 1.

    k = 1 is handled by the hyperbolic limits sn = tanh, cn = dn = sech.
    """
    k = _check_modulus(k, allow_one=True)
    u = float(u)
    if k == 1.0:
        sech = 1.0 / math.cosh(u)
        return math.tanh(u), sech, sech
    phi = jacobi_am(u, k)
    sn, cn = math.sin(phi), math.cos(phi)
    kp = complementary_modulus(k)
    dn = math.sqrt(kp * kp + k * k * cn * cn)
    return sn, cn, dn


def carlson_rf(x: float, y: float, z: float, rtol: float = 1e-16) -> float:
    """Carlson's symmetric integral R_F(x, y, z); at most one argument may be zero."""
    if min(x, y, z) < 0.0 or (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise EllipticDomainError(f"R_F undefined at ({x}, {y}, {z})")
    a = (x + y + z) / 3.0
    q = (3.0 * rtol) ** (-1.0 / 6.0) * max(abs(a - x), abs(a - y), abs(a - z))
    while q >= abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z, a = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam), 0.25 * (a + lam)
        q *= 0.25
    dx, dy = 1.0 - x / a, 1.0 - y / a
    dz = -dx - dy
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(a)


def carlson_rd(x: float, y: float, z: float, rtol: float = 1e-16) -> float:
    """Carlson's degenerate integral R_D(x, y, z) = R_J(x, y, z, z)."""
    if min(x, y) < 0.0 or z <= 0.0 or (x == 0.0 and y == 0.0):
        raise EllipticDomainError(f"R_D undefined at ({x}, {y}, {z})")
    a = (x + y + 3.0 * z) / 5.0
    q = (0.25 * rtol) ** (-1.0 / 6.0) * max(abs(a - x), abs(a - y), abs(a - z))
    tail, scale = 0.0, 1.0
    while q >= abs(a):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        tail += scale / (sz * (z + lam))
        x, y, z, a = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam), 0.25 * (a + lam)
        scale *= 0.25
        q *= 0.25
    dx, dy = 1.0 - x / a, 1.0 - y / a
    dz = -(dx + dy) / 3.0
    xy, zz = dx * dy, dz * dz
    e2 = xy - 6.0 * zz
    e3 = (3.0 * xy - 8.0 * zz) * dz
    e4 = 3.0 * (xy - zz) * zz
    e5 = xy * zz * dz
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return scale * series / (a * math.sqrt(a)) + 3.0 * tail


def legendre_E(phi: float, k: float) -> float:
    """Legendre incomplete integral of the second kind, E(phi, k) = int_0^phi sqrt(1 - k^2 sin^2 t) dt."""
    k = _check_modulus(k, allow_one=True)
    phi = float(phi)
    n = round(phi / math.pi)
    r = phi - n * math.pi
    s, c = math.sin(r), math.cos(r)
    s2 = s * s
    kp = complementary_modulus(k)
    y = c * c + kp * kp * s2
    if k == 0.0:
        base = r
    elif s == 0.0:
        base = 0.0
    else:
        base = s * carlson_rf(c * c, y, 1.0) - k * k * s * s2 * carlson_rd(c * c, y, 1.0) / 3.0
    return base + 2.0 * n * complete_E(k) if n else base


def incomplete_E(u: float, k: float) -> float:
    """Jacobi's epsilon function, int_0^u dn(t, k)^2 dt.

    Equals E(am(u, k), k); it satisfies eps(K) = E(k) and
    eps(u + 4K) = eps(u) + 4 E(k).
    """
    k = _check_modulus(k)
    u = float(u)
    if k == 0.0:
        return u
    r, n = _reduce(u, k)
    return legendre_E(_am_reduced(r, k), k) + 2.0 * n * complete_E(k)
