"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way (trial division, linear
scans, loop-built matrices, an off-the-shelf interior-point QP) so that
agreement with the fast paths is meaningful evidence rather than a tautology.
"""

from __future__ import annotations

import numpy as np


def trial_division_is_prime(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % f == 0:
            return False
        f += 1
    return True


def safe_prime_scan(bits: int) -> tuple[int, int]:
    """Smallest odd ``bits``-bit prime q with 2q + 1 prime, as (p, q)."""
    q = (1 << (bits - 1)) + 1
    while q < (1 << bits):
        if trial_division_is_prime(q) and trial_division_is_prime(2 * q + 1):
            return 2 * q + 1, q
        q += 2
    raise AssertionError(f"no {bits}-bit safe-prime order")


def pow_loop(base: int, exponent: int, modulus: int) -> int:
    out = 1 % modulus
    for _ in range(exponent):
        out = out * base % modulus
    return out


def dlog_scan(p: int, g: int, q: int, h: int) -> int:
    x = 1
    for e in range(q):
        if x == h:
            return e
        x = x * g % p
    raise AssertionError(f"{h} is not a power of {g} mod {p}")


def _tight_cvxopt():
    import cvxopt

    cvxopt.solvers.options["show_progress"] = False
    cvxopt.solvers.options["abstol"] = 1e-12
    cvxopt.solvers.options["reltol"] = 1e-12
    cvxopt.solvers.options["feastol"] = 1e-10
    return cvxopt


def qp_svm(kernel: np.ndarray, y: np.ndarray, c: float) -> tuple[np.ndarray, float]:
    """Box-and-hyperplane QP via cvxopt; returns (alpha, dual objective)."""
    cvxopt = _tight_cvxopt()
    n = y.size
    quad = np.outer(y, y) * kernel
    sol = cvxopt.solvers.qp(
        cvxopt.matrix(quad + 1e-10 * np.eye(n)),
        cvxopt.matrix(-np.ones(n)),
        cvxopt.matrix(np.vstack([-np.eye(n), np.eye(n)])),
        cvxopt.matrix(np.hstack([np.zeros(n), c * np.ones(n)])),
        cvxopt.matrix(y.reshape(1, -1)),
        cvxopt.matrix(np.zeros(1)),
    )
    alpha = np.array(sol["x"]).ravel()
    return alpha, float(alpha.sum() - 0.5 * alpha @ quad @ alpha)


def qp_svmplus(
    kernel: np.ndarray,
    kernel_star: np.ndarray,
    y: np.ndarray,
    c: float,
    c_star: float,
) -> tuple[np.ndarray, np.ndarray, float]:
    """The (alpha, beta) dual as one 2n-variable QP; returns (a, b, objective)."""
    cvxopt = _tight_cvxopt()
    n = y.size
    quad = np.outer(y, y) * kernel
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = quad + kernel_star / c_star
    m[:n, n:] = kernel_star / c_star
    m[n:, :n] = kernel_star / c_star
    m[n:, n:] = kernel_star / c_star
    ks1 = kernel_star @ np.ones(n)
    lin = np.hstack([-np.ones(n) - (c / c_star) * ks1, -(c / c_star) * ks1])
    eq = np.zeros((2, 2 * n))
    eq[0, :n] = y
    eq[1, :] = 1.0
    sol = cvxopt.solvers.qp(
        cvxopt.matrix(m + 1e-10 * np.eye(2 * n)),
        cvxopt.matrix(lin),
        cvxopt.matrix(-np.eye(2 * n)),
        cvxopt.matrix(np.zeros(2 * n)),
        cvxopt.matrix(eq),
        cvxopt.matrix(np.array([0.0, n * c])),
    )
    z = np.array(sol["x"]).ravel()
    alpha, beta = z[:n], z[n:]
    u = alpha + beta - c
    objective = float(
        alpha.sum()
        - 0.5 * (alpha * y) @ kernel @ (alpha * y)
        - 0.5 * u @ kernel_star @ u / c_star
    )
    return alpha, beta, objective


def hamiltonian_loops(n: int, delta_over_omega: float, r0_over_a: float, omega: float = 1.0) -> np.ndarray:
    """Dense Hamiltonian assembled state by state from the definition."""
    scale = omega if omega > 0 else 1.0
    dim = 2**n
    h = np.zeros((dim, dim))
    for state in range(dim):
        occ = [(state >> (j - 1)) & 1 for j in range(1, n + 1)]
        e = -delta_over_omega * scale * sum(occ)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                d = min(j - i, n - (j - i))
                e += scale * r0_over_a**6 * occ[i - 1] * occ[j - 1] / d**6
        h[state, state] = e
        for j in range(n):
            h[state ^ (1 << j), state] += omega / 2.0
    return h


def order_params_loops(amplitudes: np.ndarray, n: int) -> tuple[float, float]:
    """RMS staggered densities via per-state complex sums."""
    oz2 = 0.0
    oz3 = 0.0
    for state, amp in enumerate(amplitudes):
        p = float(amp) ** 2
        m2 = sum((-1) ** j * ((state >> (j - 1)) & 1) for j in range(1, n + 1))
        m3 = sum(
            np.exp(2j * np.pi * j / 3) * ((state >> (j - 1)) & 1)
            for j in range(1, n + 1)
        )
        oz2 += p * (2.0 * m2 / n) ** 2
        oz3 += p * abs(3.0 * m3 / n) ** 2
    return float(np.sqrt(oz2)), float(np.sqrt(oz3))
