"""Quick oracle checks runnable from an installed package (``lowres-mimo selftest``)."""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .analytic import AnalyticInputs, LimitKind, se_limit, se_perfect_approx_all, se_rayleigh_perfect
from .channel import complex_normal, phi, steering_matrix
from .quantization import QuantizerModel, rho_for_bits
from .scenario import UserLink
from .spectral_efficiency import sinr_perfect


def _loop_sinr(G, n, kappa, rho, p_u):
    M, N = G.shape
    gn = G[:, n]
    sig = abs(np.vdot(gn, gn)) ** 2
    intf = sum(abs(np.vdot(gn, G[:, i])) ** 2 for i in range(N) if i != n)
    quad = 0.0
    for m in range(M):
        dm = sum(abs(G[m, i]) ** 2 for i in range(N))
        quad += abs(gn[m]) ** 2 * dm
    return kappa * p_u * sig / (kappa * p_u * intf + np.vdot(gn, gn).real + rho * p_u * quad)


def _check_rho():
    ok = abs(rho_for_bits(1) - (1 - 2 / math.pi)) < 1e-10
    ok &= 0.117 <= rho_for_bits(2) <= 0.118 and 0.0344 <= rho_for_bits(3) <= 0.0347
    return ok, f"rho(1..3) = {rho_for_bits(1):.6f}, {rho_for_bits(2):.6f}, {rho_for_bits(3):.6f}"


def _check_phi():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        M = int(rng.integers(1, 64))
        t = rng.uniform(-math.pi / 2, math.pi / 2, 2)
        H = steering_matrix(M, t, 0.5)
        worst = max(worst, abs(abs(phi(M, t[0], t[1])) - abs(np.vdot(H[:, 0], H[:, 1]))))
    return worst < 1e-10, f"max gap {worst:.2e}"


def _check_sinr():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        M, N = int(rng.integers(1, 9)), int(rng.integers(1, 5))
        G = complex_normal(rng, (M, N))
        q = QuantizerModel.from_bits(int(rng.integers(1, 5)))
        p_u = float(rng.uniform(0.1, 10))
        for n in range(N):
            a = sinr_perfect(G, n, q, p_u)
            b = _loop_sinr(G, n, q.kappa, q.rho, p_u)
            worst = max(worst, abs(a - b) / b)
    return worst < 1e-12, f"max rel gap {worst:.2e} ({kernels.BACKEND} backend)"


def _check_rayleigh():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        N = int(rng.integers(1, 12))
        users = [UserLink(float(b), 0.0, float(t)) for b, t in
                 zip(rng.uniform(0.01, 2, N), rng.uniform(-1.5, 1.5, N))]
        inp = AnalyticInputs(users, int(rng.integers(1, 512)), QuantizerModel.from_bits(int(rng.integers(1, 6))),
                             float(rng.uniform(0.1, 100)))
        a, b = se_perfect_approx_all(inp), se_rayleigh_perfect(inp)
        worst = max(worst, float(np.max(np.abs(a - b) / b)))
    return worst < 1e-12, f"max rel gap {worst:.2e}"


def _check_limit():
    q = QuantizerModel.from_bits(2)
    M = 10**8
    users = [UserLink(1.0, 10.0, 0.2)]
    se = se_perfect_approx_all(AnalyticInputs(users, M, q, 1.0 / M))[0]
    lim = se_limit(LimitKind.PERFECT_SCALED, kappa=q.kappa, E_u=1.0, beta=1.0)
    return abs(se - lim) < 1e-3, f"gap {abs(se - lim):.2e} bits"


def _check_backends():
    backends = kernels.available_backends()
    rng = np.random.default_rng(5)
    A = complex_normal(rng, (16, 12, 5))
    B = complex_normal(rng, (16, 12, 5))
    ref = backends["python"].mrc_terms(A, B)
    worst = 0.0
    for mod in backends.values():
        out = mod.mrc_terms(A, B)
        worst = max(worst, max(float(np.max(np.abs(o - r) / np.abs(r))) for o, r in zip(out, ref)))
    return worst < 1e-12, f"backends {sorted(backends)} max rel gap {worst:.2e}"


CHECKS = (
    ("lloyd-max distortion", _check_rho),
    ("dirichlet kernel vs inner product", _check_phi),
    ("vectorized vs loop SINR", _check_sinr),
    ("K=0 reduction to Rayleigh form", _check_rayleigh),
    ("scaled-power large-array limit", _check_limit),
    ("kernel backend agreement", _check_backends),
)


def run_selftest(stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    all_ok = True
    for name, fn in CHECKS:
        ok, detail = fn()
        all_ok &= bool(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=stream)
    return all_ok
