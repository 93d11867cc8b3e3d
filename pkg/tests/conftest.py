import math

import numpy as np
import pytest

from lowres_mimo import kernels
from lowres_mimo.channel import complex_normal

ACCEPTANCE_LINES = []


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    """Each importable kernel backend module in turn."""
    return kernels.available_backends()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def loop_sinr_perfect(G, n, kappa, rho, p_u):
    """Straight-line evaluation of the perfect-CSI MRC SINR."""
    M, N = G.shape
    a = G[:, n]
    num = 0j
    for m in range(M):
        num += np.conj(a[m]) * G[m, n]
    signal = kappa * p_u * abs(num) ** 2
    interf = 0.0
    for i in range(N):
        if i == n:
            continue
        s = 0j
        for m in range(M):
            s += np.conj(a[m]) * G[m, i]
        interf += abs(s) ** 2
    norm = sum(abs(a[m]) ** 2 for m in range(M))
    quad = 0.0
    for m in range(M):
        d = sum(abs(G[m, i]) ** 2 for i in range(N))
        quad += abs(a[m]) ** 2 * d
    return signal / (kappa * p_u * interf + norm + rho * p_u * quad)


def loop_sinr_imperfect(G_hat, Xi, sigma_sq, n, kappa, rho, p_u):
    """Straight-line evaluation of the imperfect-CSI MRC SINR."""
    M, N = G_hat.shape
    G = G_hat - Xi
    a = G_hat[:, n]
    inner = lambda x, y: sum(np.conj(x[m]) * y[m] for m in range(M))
    signal = kappa * p_u * abs(inner(a, G_hat[:, n])) ** 2
    interf = sum(abs(inner(a, G_hat[:, i])) ** 2 for i in range(N) if i != n)
    norm = sum(abs(a[m]) ** 2 for m in range(M))
    diag_term = 0.0
    for m in range(M):
        d = p_u * sum(abs(G[m, i]) ** 2 for i in range(N)) + 1.0
        diag_term += abs(a[m]) ** 2 * d
    psi = kappa * p_u * interf + kappa * p_u * norm * sum(sigma_sq) + kappa * norm + rho * diag_term
    return signal / psi


def chunked_mean(fn, total, rng, chunk=100_000):
    """Average of ``fn(rng, size)`` (returning per-sample values) over ``total`` samples."""
    acc, sq, done = 0.0, 0.0, 0
    while done < total:
        n = min(chunk, total - done)
        v = np.asarray(fn(rng, n), dtype=float)
        acc += v.sum()
        sq += (v**2).sum()
        done += n
    mean = acc / total
    var = sq / total - mean**2
    return mean, math.sqrt(max(var, 0.0) / total)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


__all__ = ["complex_normal"]
