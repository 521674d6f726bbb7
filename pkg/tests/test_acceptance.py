"""Acceptance suite: one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import io
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import integrate

from sh2maxwell import elliptic, frame, group, maxwell, symmetry
from sh2maxwell.cli import main
from sh2maxwell.extremal import (
    Covector,
    PendulumState,
    Stratum,
    classify,
    integrate_extremal,
    integrate_pendulum,
)
from sh2maxwell.group import IDENTITY, GroupElement


def quad_K(k):
    return integrate.quad(lambda t: 1 / math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                          epsabs=0, epsrel=1e-13, limit=200)[0]


def quad_E(k):
    return integrate.quad(lambda t: math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                          epsabs=0, epsrel=1e-13, limit=200)[0]


def rel_err(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.criterion(1, "elliptic kernel: identities, Legendre relation, quadrature agreement, < 5 s")
def test_criterion_1_elliptic():
    start = time.perf_counter()
    rng = np.random.default_rng(101)

    worst_identity = 0.0
    for u, k in zip(rng.uniform(-50, 50, 10_000), rng.uniform(0, 1, 10_000)):
        sn, cn, dn = elliptic.jacobi_sn_cn_dn(u, k)
        worst_identity = max(worst_identity, abs(sn * sn + cn * cn - 1), abs(dn * dn + k * k * sn * sn - 1))

    def legendre(k):
        kp = elliptic.complementary_modulus(k)
        K, E, Kp, Ep = elliptic.complete_K(k), elliptic.complete_E(k), elliptic.complete_K(kp), elliptic.complete_E(kp)
        return E * Kp + Ep * K - K * Kp

    worst_legendre = max(rel_err(legendre(k), math.pi / 2) for k in np.arange(1, 10) / 10)
    worst_legendre_random = max(rel_err(legendre(k), math.pi / 2) for k in rng.uniform(0.01, 0.99, 10_000))

    worst_quad = 0.0
    for k in np.linspace(0.0, 0.99, 100):
        worst_quad = max(worst_quad, rel_err(elliptic.complete_K(k), quad_K(k)),
                         rel_err(elliptic.complete_E(k), quad_E(k)))
    elapsed = time.perf_counter() - start

    print(f"\n[1] identity {worst_identity:.2e}  legendre {worst_legendre:.2e} / {worst_legendre_random:.2e}  "
          f"quadrature {worst_quad:.2e}  {elapsed:.2f} s")
    assert worst_identity < 1e-12
    assert worst_legendre < 1e-10 and worst_legendre_random < 1e-10
    assert worst_quad < 1e-10
    assert elapsed < 5.0


@pytest.mark.criterion(2, "group axioms on 1e4 triples, rotation_apply = left translation, < 1 s")
def test_criterion_2_group():
    rng = np.random.default_rng(202)
    xy = rng.uniform(-10, 10, size=(3, 10_000, 2))
    zs = rng.uniform(-3, 3, size=(3, 10_000))
    triples = [[GroupElement(x, y, z) for (x, y), z in zip(xy[i], zs[i])] for i in range(3)]
    svals = rng.uniform(-3, 3, 10_000)

    start = time.perf_counter()
    worst_group = worst_rot = 0.0
    compose, inverse = group.compose, group.inverse
    for m1, m2, m3, s in zip(*triples, svals):
        a = compose(compose(m1, m2), m3).as_tuple()
        b = compose(m1, compose(m2, m3)).as_tuple()
        e1 = compose(m1, IDENTITY).as_tuple()
        e2 = compose(IDENTITY, m1).as_tuple()
        i1 = compose(m1, inverse(m1)).as_tuple()
        i2 = compose(inverse(m1), m1).as_tuple()
        m = m1.as_tuple()
        worst_group = max(worst_group,
                          *(abs(p - q) for p, q in zip(a, b)),
                          *(abs(p - q) for p, q in zip(e1, m)),
                          *(abs(p - q) for p, q in zip(e2, m)),
                          *map(abs, i1), *map(abs, i2))
        r = group.rotation_apply(s, m2).as_tuple()
        c = compose(GroupElement(0.0, 0.0, -s), m2).as_tuple()
        worst_rot = max(worst_rot, *(abs(p - q) for p, q in zip(r, c)))
    elapsed = time.perf_counter() - start

    print(f"\n[2] axioms {worst_group:.2e}  rotation {worst_rot:.2e}  {elapsed:.2f} s")
    assert worst_group < 1e-10
    assert worst_rot < 1e-12
    assert elapsed < 1.0


@pytest.mark.criterion(3, "frame: bracket table (fd), Lie rank 3, ker omega = span{X1,X2}, contact")
def test_criterion_3_frame():
    rng = np.random.default_rng(303)
    pts = [GroupElement(*p) for p in rng.uniform(-5, 5, size=(1000, 3))]

    worst_bracket = 0.0
    for q in pts[:200]:
        p = q.as_tuple()
        worst_bracket = max(
            worst_bracket,
            float(np.max(np.abs(frame.lie_bracket(frame.X1, frame.X2, q, "fd").as_array() - frame.X3(*p)))),
            float(np.max(np.abs(frame.lie_bracket(frame.X2, frame.X3, q, "fd").as_array() + frame.X1(*p)))),
            float(np.max(np.abs(frame.lie_bracket(frame.X1, frame.X3, q, "fd").as_array()))),
        )
    ranks = {frame.lie_rank(q) for q in pts}

    # omega(v) is scaled by |e| |v|: the components of a X1 already carry
    # rounding of order |a| cosh z * 1e-16, which omega multiplies by sinh z
    worst_kernel = worst_kernel_unit = 0.0
    for q, (a, b) in zip(pts, rng.uniform(-3, 3, size=(1000, 2))):
        e1, e2, _ = frame.eval_frame(q)
        v = frame.TangentVector(q, tuple(a * e1.as_array() + b * e2.as_array()))
        scale = np.linalg.norm(frame.contact_coeffs(*q.as_tuple())) * np.linalg.norm(v.as_array())
        worst_kernel = max(worst_kernel, abs(frame.contact_form_eval(q, v)) / scale)
        if abs(q.z) <= 1.0:
            worst_kernel_unit = max(worst_kernel_unit, abs(frame.contact_form_eval(q, v)))
    volume = min(abs(frame.contact_volume(q)) for q in pts[:100])

    print(f"\n[3] bracket {worst_bracket:.2e}  ranks {sorted(ranks)}  kernel {worst_kernel:.2e} "
          f"(|z| <= 1 absolute {worst_kernel_unit:.2e})  "
          f"min |omega ^ d omega| {volume:.6f}")
    assert worst_bracket < 1e-6
    assert ranks == {3}
    assert worst_kernel < 1e-12 and worst_kernel_unit < 1e-12
    assert volume > 0.5


@pytest.mark.criterion(4, "extremals: H and cylinder drift < 1e-9 (100 runs to t=50), pendulum energy, C4/C5")
def test_criterion_4_extremal():
    rng = np.random.default_rng(404)
    worst_h = worst_cyl = 0.0
    for alpha, h3 in zip(rng.uniform(0, 2 * math.pi, 100), rng.uniform(-2, 2, 100)):
        traj = integrate_extremal(Covector.from_angle(alpha, h3), 50.0)
        s = traj.h[:, 0] ** 2 + traj.h[:, 1] ** 2
        worst_h = max(worst_h, float(np.max(np.abs(0.5 * s - 0.5))))
        worst_cyl = max(worst_cyl, float(np.max(np.abs(s - 1.0))))

    worst_pend = 0.0
    for gamma, c in zip(rng.uniform(0, 4 * math.pi, 10), rng.uniform(-3, 3, 10)):
        _, y = integrate_pendulum(PendulumState(gamma, c), 100.0)
        e = 0.5 * y[:, 1] ** 2 - np.cos(y[:, 0])
        worst_pend = max(worst_pend, float(np.max(np.abs(e - e[0]))))

    c4 = integrate_extremal((1, 0, 0), 50.0)
    c5 = integrate_extremal((0, 1, 0), 50.0)
    err_c4 = float(np.max(np.abs(c4.q - np.column_stack([c4.t, 0 * c4.t, 0 * c4.t]))))
    err_c5 = float(np.max(np.abs(c5.q - np.column_stack([0 * c5.t, 0 * c5.t, c5.t]))))

    print(f"\n[4] H {worst_h:.2e}  cylinder {worst_cyl:.2e}  pendulum {worst_pend:.2e}  "
          f"C4 {err_c4:.2e}  C5 {err_c5:.2e}")
    assert worst_h < 1e-9 and worst_cyl < 1e-9
    assert worst_pend < 1e-9
    assert err_c4 < 1e-9 and err_c5 < 1e-9


@pytest.mark.criterion(5, "symmetries: verify v1-v3, counterexample, flow generator, brackets, admissibility")
def test_criterion_5_symmetry():
    reports = [symmetry.verify_symmetry(name) for name in ("v1", "v2", "v3")]
    worst_gen = max(max(r.residual_contact, r.residual_metric) for r in reports)

    perturbed = frame.CoordinateVectorField(lambda x, y, z: (-y + 0.01 * x, -x, -1.0), name="v1+0.01x dx")
    bad = symmetry.verify_symmetry(perturbed)
    worst_bad = max(bad.residual_contact, bad.residual_metric)

    worst_flow = max(
        float(np.max(np.abs(symmetry.flow_generator(GroupElement(*p)) - symmetry.V1(*p))))
        for p in symmetry.sample_points(200, seed=505)
    )
    table = symmetry.bracket_table()

    worst_adm = 0.0
    rng = np.random.default_rng(505)
    for alpha, h3, s in zip(rng.uniform(0, 2 * math.pi, 5), rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5)):
        traj = integrate_extremal(Covector.from_angle(alpha, h3), 10.0)
        contact, model = symmetry.admissibility_residuals(symmetry.map_geodesic(traj, s))
        worst_adm = max(worst_adm, contact, model)

    print(f"\n[5] generators {worst_gen:.2e}  perturbed {worst_bad:.2e}  flow {worst_flow:.2e}  "
          f"brackets {table.residual:.2e}  admissibility {worst_adm:.2e}")
    assert worst_gen < 1e-6
    assert worst_bad > 1e-3
    assert worst_flow < 1e-8
    assert table.residual < 1e-6
    assert worst_adm < 1e-6


def random_c1(rng, n):
    out = []
    while len(out) < n:
        h = Covector.from_angle(rng.uniform(0, 2 * math.pi), rng.uniform(-1, 1))
        if classify(h) is Stratum.C1:
            out.append(h)
    return out


@pytest.mark.criterion(6, "Maxwell: g(0), g' = kK, h2 lattice identity, S-intersections for C1 and C5, < 60 s")
def test_criterion_6_maxwell():
    start = time.perf_counter()
    g0 = abs(maxwell.g_function(0.0))
    worst_gprime = max(rel_err(maxwell.g_derivative_fd(k), k * elliptic.complete_K(k))
                       for k in np.linspace(0.05, 0.95, 181))

    rng = np.random.default_rng(606)
    worst_lattice = 0.0
    for psi, k in zip(rng.uniform(-10, 10, 200), rng.uniform(0.01, 0.99, 200)):
        K, g = elliptic.complete_K(k), maxwell.g_function(k)
        for n in (1, 2, 3):
            h2 = maxwell.L1_L2_C2(psi, psi + 4 * n * K, k, 1.0).h2
            worst_lattice = max(worst_lattice, rel_err(h2, 4 * n * g))

    hits = 0
    closest = math.inf
    for h0 in random_c1(rng, 50):
        v = maxwell.numeric_maxwell_search(h0, t_max=50.0, tol=1e-6)
        hits += len(v.maxwell_points)
        closest = min(closest, v.diagnostics["min_distance"])
    c5 = [maxwell.numeric_maxwell_search((0, sgn, 0), t_max=50.0, tol=1e-6) for sgn in (1, -1)]
    elapsed = time.perf_counter() - start

    print(f"\n[6] g(0) {g0:.1e}  g' {worst_gprime:.2e}  lattice {worst_lattice:.2e}  C1 hits {hits} "
          f"(closest {closest:.2e})  C5 continuous {[v.diagnostics['continuous_intersection'] for v in c5]}  "
          f"{elapsed:.1f} s")
    assert g0 <= 1e-12
    assert worst_gprime < 1e-5
    assert worst_lattice < 1e-9
    assert hits == 0
    assert all(v.diagnostics["continuous_intersection"] for v in c5)
    assert all(len(v.maxwell_points) == v.diagnostics["samples"] for v in c5)
    assert elapsed < 60.0


@pytest.mark.criterion(7, "k0 discrepancy: boundary-root diagnostic, root-finder self-tests, 4kK(k)")
def test_criterion_7_k0():
    report = maxwell.find_k0()
    single = maxwell.find_k0(func=lambda k: k - 0.5)
    double = maxwell.find_k0(func=lambda k: (k - 0.3) * (k - 0.7))
    times = {k: maxwell.first_maxwell_time((0.6, 0.8, 1.0), k0=k).first_time for k in (0.3, 0.6, 0.9)}
    print(f"\n[7] {report.message}; injected {single.roots} {double.roots}; T(k0) {times}")
    assert not report.interior_root_found and report.boundary_roots == [0.0]
    assert len(single.roots) == 1 and abs(single.roots[0] - 0.5) <= 1e-12
    assert len(double.roots) == 2
    assert abs(double.roots[0] - 0.3) <= 1e-12 and abs(double.roots[1] - 0.7) <= 1e-12
    for k, t in times.items():
        assert t == 4 * k * elliptic.complete_K(k)
        assert rel_err(t, 4 * k * quad_K(k)) < 1e-12


def _cli(*argv, env_seed="0"):
    env = dict(os.environ, PYTHONHASHSEED=env_seed)
    return subprocess.run([sys.executable, "-m", "sh2maxwell", *argv], capture_output=True, env=env, check=False)


@pytest.mark.criterion(8, "CLI: byte-identical output, exit-code contract, --symmetry columns to 1e-12")
def test_criterion_8_cli(capsys):
    runs = [
        ("integrate", "--pendulum", "1.0,0.5", "--tmax", "5", "--symmetry", "0.5"),
        ("integrate", "--h", "0.6,0.8,1", "--tmax", "2", "--format", "json"),
        ("maxwell", "--pendulum", "1.0,0.5", "--tmax", "10"),
        ("gscan",),
        ("verify", "--seed", "11"),
        ("classify", "--h", "0.6,0.8,1", "--format", "json"),
        ("brackets",),
    ]
    identical = []
    for argv in runs:
        a, b = _cli(*argv, env_seed="1"), _cli(*argv, env_seed="2")
        identical.append(a.returncode == 0 and a.stdout == b.stdout and a.stdout != b"")

    def code(*argv):
        rc = main(list(argv))
        capsys.readouterr()
        return rc

    exit_codes = {
        "classify ok": (code("classify", "--h", "1,0,0"), 0),
        "classify off-cylinder": (code("classify", "--h", "1,1,0"), 2),
        "integrate ok": (code("integrate", "--h", "1,0,0", "--tmax", "1"), 0),
        "integrate bad covector": (code("integrate", "--h", "x,0,0"), 2),
        "integrate overflow": (code("integrate", "--h", "0,1,0", "--tmax", "1000"), 3),
        "maxwell ok": (code("maxwell", "--h", "1,0,0", "--tmax", "5"), 0),
        "maxwell bad k0": (code("maxwell", "--h", "0.6,0.8,1", "--k0", "2"), 2),
        "gscan ok": (code("gscan", "--n", "10"), 0),
        "gscan bad bounds": (code("gscan", "--kmin", "0.5", "--kmax", "0.4"), 2),
        "verify ok": (code("verify"), 0),
        "verify bad field": (code("verify", "--field", "dx*"), 2),
        "brackets ok": (code("brackets"), 0),
    }

    main(["integrate", "--pendulum", "1.0,0.5", "--tmax", "10", "--symmetry", "0.5"])
    text = capsys.readouterr().out
    header = text.splitlines()[0].split(",")
    data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
    col = {name: data[:, i] for i, name in enumerate(header)}
    s = 0.5
    worst_sym = max(
        float(np.max(np.abs(col["xs"] - (col["x"] * math.cosh(s) - col["y"] * math.sinh(s))))),
        float(np.max(np.abs(col["ys"] - (col["y"] * math.cosh(s) - col["x"] * math.sinh(s))))),
        float(np.max(np.abs(col["zs"] - (col["z"] - s)))),
    )

    bad_codes = {k: v for k, v in exit_codes.items() if v[0] != v[1]}
    print(f"\n[8] identical {identical}  exit-code mismatches {bad_codes}  symmetry columns {worst_sym:.2e}")
    assert all(identical)
    assert not bad_codes
    assert worst_sym <= 1e-12
