"""Rydberg chain ground states and density-wave phase labels.

Dimensionless Hamiltonian in units of the drive Omega, sites j = 1..N on a
ring (pair distances are minimum-image, each pair counted once):

    H / Omega = 1/2 sum_j sigma^x_j  -  (Delta/Omega) sum_j n_j
                + (R0/a)^6 sum_{i<j} n_i n_j / d(i, j)^6

with n_j = |r><r| at site j.  Basis states are integers whose bit j-1 holds
the occupation of site j.  Order parameters are root-mean-square staggered
densities, which are insensitive to how a degenerate ordered manifold is
resolved:

    O_Z2 = sqrt(< M2^2 >),   M2 = (2/N) sum_j (-1)^j n_j
    O_Z3 = sqrt(< |M3|^2 >), M3 = (3/N) sum_j exp(2 pi i j / 3) n_j
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import CapacityError, ConvergenceError

PHASES = ("disordered", "z2", "z3")


@dataclass(frozen=True)
class RydbergParams:
    n_atoms: int
    delta_over_omega: float
    r0_over_a: float
    omega: float = 1.0

    def __post_init__(self) -> None:
        if self.n_atoms < 1:
            raise ValueError(f"need at least one atom, got {self.n_atoms}")
        if not self.r0_over_a > 0:
            raise ValueError(f"blockade radius must be positive, got {self.r0_over_a}")
        if self.omega < 0:
            raise ValueError(f"drive must be nonnegative, got {self.omega}")

    @property
    def coupling_scale(self) -> float:
        """Scale multiplying the ratio couplings; unit scale when the drive is off."""
        return self.omega if self.omega > 0 else 1.0


@lru_cache(maxsize=16)
def _basis_tables(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-basis-state occupation bits, counts, pair weights and squared staggered values.

    The squared order-parameter tables are built from integer site counts:
    with (a, b, c) occupations over the three phase classes, |sum of cube
    roots of unity|^2 = a^2 + b^2 + c^2 - ab - bc - ca exactly, so ordered
    product states score exactly 1.
    """
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    ibits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    bits = ibits.astype(float)
    pop = bits.sum(axis=1)
    pair = np.zeros(dim)
    for i in range(n):
        for j in range(i + 1, n):
            d = min(j - i, n - (j - i))
            pair += bits[:, i] * bits[:, j] / d**6
    sites = np.arange(1, n + 1)
    stag = ibits @ ((-1) ** sites)
    m2sq = (4 * stag * stag).astype(float) / n**2
    cnt = [ibits @ (sites % 3 == r).astype(np.int64) for r in range(3)]
    a, b, c = cnt
    m3sq = (9 * (a * a + b * b + c * c - a * b - b * c - c * a)).astype(float) / n**2
    return bits, pop, pair, m2sq, m3sq


def diagonal_energies(params: RydbergParams) -> np.ndarray:
    """Classical part of the Hamiltonian for every basis state."""
    _, pop, pair, _, _ = _basis_tables(params.n_atoms)
    delta = params.delta_over_omega * params.coupling_scale
    v_nn = params.coupling_scale * params.r0_over_a**6
    return -delta * pop + v_nn * pair


def apply_hamiltonian(params: RydbergParams, vec: np.ndarray) -> np.ndarray:
    """Matrix-free H @ vec; the drive term is applied by axis reversal."""
    n = params.n_atoms
    out = diagonal_energies(params) * vec
    half = 0.5 * params.omega
    for i in range(n):
        flipped = vec.reshape(1 << (n - 1 - i), 2, 1 << i)[:, ::-1, :]
        out += half * flipped.reshape(vec.shape)
    return out


def build_hamiltonian(params: RydbergParams, dense_budget: int = 16) -> np.ndarray:
    """Dense symmetric matrix, for small chains only."""
    n = params.n_atoms
    if n > dense_budget:
        raise CapacityError(f"dense Hamiltonian for {n} atoms exceeds budget {dense_budget}")
    dim = 1 << n
    h = np.zeros((dim, dim))
    idx = np.arange(dim)
    h[idx, idx] = diagonal_energies(params)
    half = 0.5 * params.omega
    for i in range(n):
        h[idx ^ (1 << i), idx] += half
    return h


@dataclass(frozen=True)
class GroundState:
    params: RydbergParams
    energy: float
    amplitudes: np.ndarray


def _canonical_sign(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    return -vec if vec[k] < 0 else vec


def ground_state(
    params: RydbergParams,
    method: str = "auto",
    auto_dense_max: int = 9,
    dense_budget: int = 16,
    lanczos_budget: int = 24,
    tol: float = 1e-11,
    max_basis: int = 400,
) -> GroundState:
    """Lowest eigenpair by dense diagonalization or Lanczos.

    "auto" picks dense up to ``auto_dense_max`` atoms and Lanczos beyond,
    up to ``lanczos_budget``.  Both routes use deterministic inputs, so
    repeated calls reproduce the state bit for bit.
    """
    n = params.n_atoms
    if method == "auto":
        method = "dense" if n <= auto_dense_max else "lanczos"
    if method == "dense":
        h = build_hamiltonian(params, dense_budget=dense_budget)
        vals, vecs = np.linalg.eigh(h)
        energy, amp = float(vals[0]), vecs[:, 0]
    elif method == "lanczos":
        if n > lanczos_budget:
            raise CapacityError(f"{n} atoms exceeds the Lanczos budget {lanczos_budget}")
        energy, amp = _lanczos_ground(params, tol=tol, max_basis=max_basis)
    else:
        raise ValueError(f"method must be auto, dense or lanczos, got {method!r}")
    amp = _canonical_sign(amp)
    norm = float(np.linalg.norm(amp))
    if abs(norm - 1.0) > 1e-10:
        raise ConvergenceError(f"ground state norm {norm} is off unity")
    residual = float(np.linalg.norm(apply_hamiltonian(params, amp) - energy * amp))
    scale = max(1.0, abs(energy))
    if residual > 1e-8 * scale:
        raise ConvergenceError(f"eigenresidual {residual:.3e} too large", residual=residual)
    return GroundState(params=params, energy=energy, amplitudes=amp)


def _lanczos_ground(params: RydbergParams, tol: float, max_basis: int) -> tuple[float, np.ndarray]:
    """Lanczos with full reorthogonalization from a deterministic start.

    The start vector is uniform in magnitude with sign (-1)^popcount.  In
    the gauge that flips the drive sign the Hamiltonian has nonpositive
    off-diagonal entries, so by Perron-Frobenius the ground state carries
    exactly this sign pattern and the start overlaps it with certainty.
    A plain uniform start can be orthogonal to the ground state (it is for
    a single driven atom at zero detuning) and then Lanczos converges to
    an excited level.
    """
    from scipy.linalg import eigh_tridiagonal

    _, pop, _, _, _ = _basis_tables(params.n_atoms)
    dim = 1 << params.n_atoms
    v = (-1.0) ** pop * dim**-0.5
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    theta = None
    for k in range(min(dim, max_basis)):
        w = apply_hamiltonian(params, basis[k])
        a = float(np.dot(w, basis[k]))
        alphas.append(a)
        w -= a * basis[k]
        if k > 0:
            w -= betas[k - 1] * basis[k - 1]
        # full reorthogonalization, two passes
        stack = np.asarray(basis)
        for _ in range(2):
            w -= stack.T @ (stack @ w)
        b = float(np.linalg.norm(w))
        vals, vecs = eigh_tridiagonal(alphas, betas, select="i", select_range=(0, 0))
        theta = float(vals[0])
        bound = b * abs(vecs[-1, 0])
        if bound <= tol * max(1.0, abs(theta)) or b < 1e-14:
            amp = np.asarray(basis).T @ vecs[:, 0]
            amp /= np.linalg.norm(amp)
            return theta, amp
        betas.append(b)
        basis.append(w / b)
    raise ConvergenceError(f"Lanczos basis limit {max_basis} reached (theta {theta})")


def order_parameters(state: GroundState) -> tuple[float, float]:
    """(O_Z2, O_Z3) of a ground state."""
    _, _, _, m2sq, m3sq = _basis_tables(state.params.n_atoms)
    prob = state.amplitudes**2
    o_z2 = float(math.sqrt(max(0.0, float(prob @ m2sq))))
    o_z3 = float(math.sqrt(max(0.0, float(prob @ m3sq))))
    return o_z2, o_z3


def assign_phase(o_z2: float, o_z3: float, threshold: float = 0.8) -> str:
    """Label by the dominant order parameter; ties and weak order fall to disordered."""
    if o_z2 > o_z3 and o_z2 > threshold:
        return "z2"
    if o_z3 > o_z2 and o_z3 > threshold:
        return "z3"
    return "disordered"


@dataclass(frozen=True)
class PhaseSample:
    delta_over_omega: float
    r0_over_a: float
    o_z2: float
    o_z3: float
    label: str

    def to_json_dict(self) -> dict:
        return {
            "delta_over_omega": self.delta_over_omega,
            "r0_over_a": self.r0_over_a,
            "o_z2": self.o_z2,
            "o_z3": self.o_z3,
            "label": self.label,
        }


def builtin_grid() -> list[tuple[float, float]]:
    """Default parameter grid: 31 detunings in [-2, 4] by 21 radii in [1, 3]."""
    deltas = np.round(np.linspace(-2.0, 4.0, 31), 10)
    radii = np.round(np.linspace(1.0, 3.0, 21), 10)
    return [(float(d), float(r)) for d in deltas for r in radii]


def generate_dataset(
    points: list[tuple[float, float]],
    n_atoms: int,
    seed: int | None = None,
    method: str = "auto",
) -> list[PhaseSample]:
    """Solve every grid point and label it.

    ``seed`` is accepted for interface symmetry with the samplers but has
    no effect: diagonalization is deterministic.
    """
    del seed
    samples = []
    for delta, r0 in points:
        params = RydbergParams(n_atoms=n_atoms, delta_over_omega=delta, r0_over_a=r0)
        state = ground_state(params, method=method)
        o_z2, o_z3 = order_parameters(state)
        samples.append(
            PhaseSample(
                delta_over_omega=delta,
                r0_over_a=r0,
                o_z2=o_z2,
                o_z3=o_z3,
                label=assign_phase(o_z2, o_z3),
            )
        )
    return samples


def write_jsonl(samples: list[PhaseSample], path) -> None:
    with open(path, "w") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_json_dict()) + "\n")


def read_dataset(path) -> list[PhaseSample]:
    samples = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            if d["label"] not in PHASES:
                raise ValueError(f"unknown phase label {d['label']!r}")
            samples.append(
                PhaseSample(
                    delta_over_omega=float(d["delta_over_omega"]),
                    r0_over_a=float(d["r0_over_a"]),
                    o_z2=float(d["o_z2"]),
                    o_z3=float(d["o_z3"]),
                    label=d["label"],
                )
            )
    return samples
