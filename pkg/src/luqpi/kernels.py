"""Kernel functions shared by the decision and correcting spaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("linear", "polynomial", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family with its parameters.

    linear:      <a, b>
    polynomial:  (gamma <a, b> + coef0)^degree
    rbf:         exp(-gamma ||a - b||^2)
    """

    kind: str = "rbf"
    gamma: float = 1.0
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValueError(f"degree must be a positive integer, got {self.degree}")


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gram matrix K[i, j] = k(a_i, b_j)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    if spec.kind == "linear":
        return a @ b.T
    if spec.kind == "polynomial":
        return (spec.gamma * (a @ b.T) + spec.coef0) ** spec.degree
    sq = (
        np.sum(a * a, axis=1)[:, None]
        - 2.0 * (a @ b.T)
        + np.sum(b * b, axis=1)[None, :]
    )
    return np.exp(-spec.gamma * np.maximum(sq, 0.0))


def kernel_eval(spec: KernelSpec, a, b) -> float:
    """Single kernel value k(a, b)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return float(kernel_matrix(spec, a, b)[0, 0])
