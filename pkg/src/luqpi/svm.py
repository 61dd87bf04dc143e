"""Soft-margin kernel SVM with an SMO-style dual solver.

The dual

    max  sum_k a_k - 1/2 sum_{k,k'} a_k a_{k'} y_k y_{k'} K(x_k, x_{k'})
    s.t. sum_k a_k y_k = 0,   0 <= a_k <= C

is solved by SMO steps on one violating pair at a time: the first index is
the maximal violator, the partner is chosen by the largest objective gain
actually attainable under the box clip.  Two stopping rules run side by
side.  The violation m(a) - M(a) is compared against tol times the gradient
scale, so huge-magnitude kernels (high-degree polynomials, large C) stop at
sensible relative precision instead of chasing an absolute target below
float resolution.  A duality-gap certificate catches the remaining flat
valleys: low-dimensional polynomial Gram matrices are rank-deficient, the
dual optimum is a whole face, and pairwise ascent can wander along it
forever while the primal decision function stays put.  Estimators follow
the fit/predict convention and standardize features on the training split
by default.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import DegenerateDataError
from .kernels import KernelSpec, kernel_matrix


def solve_svm_dual(
    kernel: np.ndarray,
    y: np.ndarray,
    c: float,
    tol: float = 1e-6,
    max_iter: int = 200_000,
) -> tuple[np.ndarray, float, dict]:
    """Maximal-violating-pair SMO on a precomputed Gram matrix.

    Returns (alpha, bias, info).  info carries the dual objective, the final
    KKT violation, the iteration count and a converged flag.  Hitting the
    iteration cap emits a ConvergenceWarning and returns the current iterate,
    matching the usual estimator behaviour.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if kernel.shape != (n, n):
        raise ValueError(f"kernel shape {kernel.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not c > 0:
        raise ValueError(f"C must be positive, got {c}")

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a'Qa - 1'a with Q = yy'K
    kd = np.diag(kernel)
    eps = 1e-12 * max(1.0, c)
    it = 0
    converged = True
    while True:
        if it and it % 4096 == 0:
            # wash out incremental float drift
            grad = y * (kernel @ (alpha * y)) - 1.0
        # m = max violation over the "can move up" set, M over "can move down"
        up = ((y > 0) & (alpha < c - eps)) | ((y < 0) & (alpha > eps))
        lo = ((y < 0) & (alpha < c - eps)) | ((y > 0) & (alpha > eps))
        score = -y * grad
        if not up.any() or not lo.any():
            violation = 0.0
            break
        i = np.flatnonzero(up)[np.argmax(score[up])]
        down = np.flatnonzero(lo)
        viol = score[i] - score[down]
        violation = float(viol.max())
        scale = max(1.0, float(np.abs(grad).max()))
        if violation <= tol * scale:
            break
        if it >= 1024 and it % 256 == 0:
            # certificate for flat valleys the violation never resolves:
            # primal at the current iterate minus the dual bounds the
            # remaining suboptimality (margins y_k f_k = grad + 1, w'w =
            # a.(grad + 1), bias from the KKT interval midpoint)
            w2 = float(np.dot(alpha, grad) + alpha.sum())
            dual = float(alpha.sum()) - 0.5 * w2
            bias_est = 0.5 * (float(score[i]) + float(score[down].min()))
            hinge = float(np.maximum(0.0, 1.0 - (grad + 1.0) - y * bias_est).sum())
            if 0.5 * w2 + c * hinge - dual <= tol * max(1.0, abs(dual)):
                break
        if it >= max_iter:
            warnings.warn(
                f"SMO hit the {max_iter}-iteration cap (violation {violation:.3e})",
                ConvergenceWarning,
            )
            converged = False
            break
        # partner by attainable gain along d = y_i e_i - y_j e_j, box-clipped
        keep = (viol > 0) & (down != i)
        down, viol = down[keep], viol[keep]
        eta = np.maximum(kd[i] + kd[down] - 2.0 * kernel[i, down], 1e-15)
        t_max_i = (c - alpha[i]) if y[i] > 0 else alpha[i]
        t_max_j = np.where(y[down] > 0, alpha[down], c - alpha[down])
        t = np.minimum(viol / eta, np.minimum(t_max_i, t_max_j))
        gain = viol * t - 0.5 * eta * t * t
        b = int(np.argmax(gain))
        j, t = int(down[b]), float(t[b])
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        grad += t * y * (kernel[:, i] - kernel[:, j])
        it += 1

    objective = float(alpha.sum() - 0.5 * np.dot(alpha * y, kernel @ (alpha * y)))
    bias = _bias(kernel, y, alpha, c)
    info = {
        "objective": objective,
        "kkt_violation": float(violation),
        "iterations": it,
        "converged": converged,
    }
    return alpha, bias, info


def _bias(kernel: np.ndarray, y: np.ndarray, alpha: np.ndarray, c: float) -> float:
    """Mean over free support vectors; bound-interval midpoint when none are free."""
    margins = kernel @ (alpha * y)
    eps = 1e-8 * max(1.0, c)
    free = (alpha > eps) & (alpha < c - eps)
    if free.any():
        return float(np.mean(y[free] - margins[free]))
    up = ((y > 0) & (alpha < c - eps)) | ((y < 0) & (alpha > eps))
    lo = ((y < 0) & (alpha < c - eps)) | ((y > 0) & (alpha > eps))
    vals = y - margins
    hi = np.max(vals[up]) if up.any() else 0.0
    lo_ = np.min(vals[lo]) if lo.any() else 0.0
    return float((hi + lo_) / 2.0)


class _Standardizer:
    """Per-feature zero mean, unit variance, fit on the training split only."""

    def fit(self, x: np.ndarray) -> "_Standardizer":
        self.mean_ = x.mean(axis=0)
        scale = x.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        return self

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean_) / self.scale_


class SvmClassifier(BaseEstimator, ClassifierMixin):
    """Binary kernel SVM.

    Parameters mirror the kernel spec plus the box constraint C.  A zero
    decision value is resolved to the positive class.
    """

    def __init__(
        self,
        kernel: str = "rbf",
        C: float = 1.0,
        gamma: float = 1.0,
        degree: int = 3,
        coef0: float = 0.0,
        standardize: bool = True,
        tol: float = 1e-6,
        max_iter: int = 200_000,
    ):
        self.kernel = kernel
        self.C = C
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.standardize = standardize
        self.tol = tol
        self.max_iter = max_iter

    def _spec(self) -> KernelSpec:
        return KernelSpec(
            kind=self.kernel, gamma=self.gamma, degree=self.degree, coef0=self.coef0
        )

    def fit(self, X, y) -> "SvmClassifier":
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise DegenerateDataError("training data contains a single class")
        if len(self.classes_) > 2:
            raise ValueError("binary classifier got more than two classes")
        signs = np.where(y == self.classes_[1], 1.0, -1.0)
        self.scaler_ = _Standardizer().fit(X) if self.standardize else None
        xs = self.scaler_.transform(X) if self.scaler_ else np.asarray(X, dtype=float)
        gram = kernel_matrix(self._spec(), xs, xs)
        alpha, bias, info = solve_svm_dual(
            gram, signs, self.C, tol=self.tol, max_iter=self.max_iter
        )
        self.X_train_ = xs
        self.y_train_ = signs
        self.alpha_ = alpha
        self.bias_ = bias
        self.dual_objective_ = info["objective"]
        self.kkt_violation_ = info["kkt_violation"]
        self.n_iter_ = info["iterations"]
        self.converged_ = info["converged"]
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "alpha_")
        X = check_array(X)
        xs = self.scaler_.transform(X) if self.scaler_ else np.asarray(X, dtype=float)
        gram = kernel_matrix(self._spec(), xs, self.X_train_)
        return gram @ (self.alpha_ * self.y_train_) + self.bias_

    def predict(self, X) -> np.ndarray:
        margins = self.decision_function(X)
        return self.classes_[(margins >= 0).astype(int)]


class OneVsAllClassifier(BaseEstimator, ClassifierMixin):
    """One binary estimator per class; ties resolve to the lowest class.

    Extra fit keyword arguments (privileged matrices, for instance) are
    forwarded unchanged to every per-class fit.
    """

    def __init__(self, estimator):
        self.estimator = estimator

    def fit(self, X, y, **fit_params) -> "OneVsAllClassifier":
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise DegenerateDataError("training data contains a single class")
        self.estimators_ = []
        for cls in self.classes_:
            binary = clone(self.estimator)
            signs = np.where(y == cls, 1, -1)
            binary.fit(X, signs, **fit_params)
            self.estimators_.append(binary)
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "estimators_")
        return np.column_stack([est.decision_function(X) for est in self.estimators_])

    def predict(self, X) -> np.ndarray:
        margins = self.decision_function(X)
        return self.classes_[np.argmax(margins, axis=1)]
