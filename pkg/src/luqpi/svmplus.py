"""SVM+ : learning with privileged information via a correcting function.

Privileged vectors x* exist only at training time.  They parameterize a
correcting function that models the slack of each training point, giving the
dual

    max  sum_k a_k - 1/2 sum_{k,k'} a_k a_{k'} y_k y_{k'} K(x_k, x_{k'})
         - 1/(2 C*) sum_{k,k'} (a_k + b_k - C)(a_{k'} + b_{k'} - C) K*(x*_k, x*_{k'})
    s.t. sum_k a_k y_k = 0,  sum_k (a_k + b_k - C) = 0,  a, b >= 0.

Both equalities are preserved by three families of closed-form working-set
moves (within-class alpha transfer, beta transfer, and a cross-class
alpha/beta exchange).  Each step takes the move with the largest exactly
attainable objective gain under its box clip; first-order violation only
decides when to stop, measured relative to the gradient scale.  Selecting
on raw violation instead is prone to a slow tail where the most violating
pair allows only a microscopic step.
Prediction uses the decision kernel only, so deployment never sees
privileged data.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import DegenerateDataError
from .kernels import KernelSpec, kernel_matrix
from .svm import _Standardizer


def solve_svmplus_dual(
    kernel: np.ndarray,
    kernel_star: np.ndarray,
    y: np.ndarray,
    c: float,
    c_star: float,
    tol: float = 1e-6,
    max_iter: int = 500_000,
) -> tuple[np.ndarray, np.ndarray, float, float, dict]:
    """Working-set ascent on the (alpha, beta) dual.

    Starts at the feasible point alpha = 0, beta = C.  Returns
    (alpha, beta, bias, bias_star, info).
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if kernel.shape != (n, n) or kernel_star.shape != (n, n):
        raise ValueError("kernel matrices must be n x n")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not (c > 0 and c_star > 0):
        raise ValueError("C and C* must be positive")
    pos = y > 0
    neg = ~pos
    if not pos.any() or not neg.any():
        raise DegenerateDataError("both classes are required")

    alpha = np.zeros(n)
    beta = np.full(n, float(c))
    margins = np.zeros(n)  # K (alpha * y)
    v = np.zeros(n)  # K* (alpha + beta - C) / C*
    kd = np.diag(kernel)
    ksd = np.diag(kernel_star)
    indices = np.arange(n)

    def line_step(viol, eta, cap):
        eta = np.maximum(eta, 1e-15)
        t = np.minimum(viol / eta, cap)
        gain = viol * t - 0.5 * eta * t * t
        b = int(np.argmax(gain))
        return float(t[b]), float(gain[b]), b

    it = 0
    violation = np.inf
    converged = True
    while True:
        if it and it % 4096 == 0:
            # wash out incremental float drift
            margins = kernel @ (alpha * y)
            v = kernel_star @ (alpha + beta - c) / c_star
        ga = 1.0 - y * margins - v
        gb = -v
        scale = max(1.0, float(np.abs(ga).max()), float(np.abs(gb).max()))
        violation = 0.0
        best_gain = 0.0
        best_move = None

        # within-class alpha transfer: alpha_i up, alpha_j down
        for mask in (pos, neg):
            idx = np.flatnonzero(mask)
            i = idx[int(np.argmax(ga[idx]))]
            donors = idx[(alpha[idx] > 0.0) & (idx != i)]
            if not donors.size:
                continue
            viol = ga[i] - ga[donors]
            violation = max(violation, float(viol.max()))
            keep = viol > 0
            if keep.any():
                d, viol = donors[keep], viol[keep]
                eta = (
                    kd[i] + kd[d] - 2.0 * kernel[i, d]
                    + (ksd[i] + ksd[d] - 2.0 * kernel_star[i, d]) / c_star
                )
                t, gain, b = line_step(viol, eta, alpha[d])
                if gain > best_gain:
                    best_gain, best_move = gain, ("a", i, int(d[b]), t)

        # beta transfer: beta_k up, beta_l down
        k = int(np.argmax(gb))
        donors = np.flatnonzero((beta > 0.0) & (indices != k))
        if donors.size:
            viol = gb[k] - gb[donors]
            violation = max(violation, float(viol.max()))
            keep = viol > 0
            if keep.any():
                d, viol = donors[keep], viol[keep]
                eta = (ksd[k] + ksd[d] - 2.0 * kernel_star[k, d]) / c_star
                t, gain, b = line_step(viol, eta, beta[d])
                if gain > best_gain:
                    best_gain, best_move = gain, ("b", k, int(d[b]), t)

        # cross-class exchange up: alpha_i, alpha_j up, one beta down twice
        ip = np.flatnonzero(pos)[int(np.argmax(ga[pos]))]
        jn = np.flatnonzero(neg)[int(np.argmax(ga[neg]))]
        donors = np.flatnonzero(beta > 0.0)
        if donors.size:
            viol = ga[ip] + ga[jn] - 2.0 * gb[donors]
            violation = max(violation, float(viol.max()))
            keep = viol > 0
            if keep.any():
                d, viol = donors[keep], viol[keep]
                eta = (
                    kd[ip] + kd[jn] - 2.0 * kernel[ip, jn]
                    + (
                        ksd[ip] + ksd[jn] + 4.0 * ksd[d]
                        + 2.0 * kernel_star[ip, jn]
                        - 4.0 * kernel_star[ip, d]
                        - 4.0 * kernel_star[jn, d]
                    ) / c_star
                )
                t, gain, b = line_step(viol, eta, beta[d] / 2.0)
                if gain > best_gain:
                    best_gain, best_move = gain, ("x+", ip, jn, int(d[b]), t)

        # cross-class exchange down: alpha_i, alpha_j down, one beta up twice
        pos_movable = pos & (alpha > 0.0)
        neg_movable = neg & (alpha > 0.0)
        if pos_movable.any() and neg_movable.any():
            ip = np.flatnonzero(pos_movable)[int(np.argmin(ga[pos_movable]))]
            jn = np.flatnonzero(neg_movable)[int(np.argmin(ga[neg_movable]))]
            viol = 2.0 * gb - ga[ip] - ga[jn]
            violation = max(violation, float(viol.max()))
            keep = viol > 0
            if keep.any():
                d, viol = indices[keep], viol[keep]
                eta = (
                    kd[ip] + kd[jn] - 2.0 * kernel[ip, jn]
                    + (
                        ksd[ip] + ksd[jn] + 4.0 * ksd[d]
                        + 2.0 * kernel_star[ip, jn]
                        - 4.0 * kernel_star[ip, d]
                        - 4.0 * kernel_star[jn, d]
                    ) / c_star
                )
                cap = np.full(d.size, min(alpha[ip], alpha[jn]))
                t, gain, b = line_step(viol, eta, cap)
                if gain > best_gain:
                    best_gain, best_move = gain, ("x-", ip, jn, int(d[b]), t)

        if violation <= tol * scale or best_move is None:
            break
        if it >= 1024 and it % 256 == 0:
            # duality-gap certificate for flat valleys (near-constant K*,
            # rank-deficient K): the slack model is v + b*, so the cheapest
            # feasible primal choice of (b, b*) is closed-form
            u = alpha + beta - c
            w2 = float(np.dot(alpha * y, margins))
            corr2 = float(np.dot(u, v))
            dual = float(alpha.sum()) - 0.5 * w2 - 0.5 * corr2
            need_p = 1.0 - margins[pos] - v[pos]
            need_n = 1.0 + margins[neg] - v[neg]
            bstar = max(
                float(-v.min()),
                0.5 * (float(need_p.max()) + float(need_n.max())),
            )
            primal = 0.5 * w2 + 0.5 * corr2 + c * (float(v.sum()) + n * bstar)
            if primal - dual <= tol * max(1.0, abs(dual)):
                break
        if it >= max_iter:
            warnings.warn(
                f"SVM+ solver hit the {max_iter}-iteration cap"
                f" (violation {violation:.3e})",
                ConvergenceWarning,
            )
            converged = False
            break

        kind = best_move[0]
        if kind == "a":
            _, i, j, t = best_move
            alpha[i] += t
            alpha[j] -= t
            margins += t * (kernel[:, i] - kernel[:, j]) * y[i]
            v += t * (kernel_star[:, i] - kernel_star[:, j]) / c_star
        elif kind == "b":
            _, k, l, t = best_move
            beta[k] += t
            beta[l] -= t
            v += t * (kernel_star[:, k] - kernel_star[:, l]) / c_star
        else:
            _, i, j, m, t = best_move
            sign = 1.0 if kind == "x+" else -1.0
            alpha[i] += sign * t
            alpha[j] += sign * t
            beta[m] -= sign * 2.0 * t
            margins += sign * t * (kernel[:, i] * y[i] + kernel[:, j] * y[j])
            v += sign * t * (
                kernel_star[:, i] + kernel_star[:, j] - 2.0 * kernel_star[:, m]
            ) / c_star
        it += 1

    bias, bias_star = _recover_biases(y, alpha, beta, margins, v, c)
    u = alpha + beta - c
    objective = float(
        alpha.sum()
        - 0.5 * np.dot(alpha * y, margins)
        - 0.5 * np.dot(u, v)
    )
    info = {
        "objective": objective,
        "kkt_violation": float(violation),
        "iterations": it,
        "converged": converged,
    }
    return alpha, beta, bias, bias_star, info


def _recover_biases(y, alpha, beta, margins, v, c) -> tuple[float, float]:
    """Least squares over the active KKT equalities.

    alpha_k > 0:  y_k b + b* = 1 - y_k f_k - v_k
    beta_k  > 0:  b* = -v_k
    """
    eps = 1e-9 * max(1.0, c)
    rows, rhs = [], []
    for k in np.flatnonzero(alpha > eps):
        rows.append((y[k], 1.0))
        rhs.append(1.0 - y[k] * margins[k] - v[k])
    for k in np.flatnonzero(beta > eps):
        rows.append((0.0, 1.0))
        rhs.append(-v[k])
    if rows:
        a = np.array(rows)
        b = np.array(rhs)
        if np.linalg.matrix_rank(a) == 2:
            sol, *_ = np.linalg.lstsq(a, b, rcond=None)
            return float(sol[0]), float(sol[1])
    # degenerate actives: place b* against the flattest correcting value,
    # then center b inside the margin interval it leaves open
    bias_star = float(-np.min(v))
    xi = np.maximum(v + bias_star, 0.0)
    lo = np.max((1.0 - xi - margins)[y > 0]) if (y > 0).any() else 0.0
    hi = np.min((xi - 1.0 - margins)[y < 0]) if (y < 0).any() else 0.0
    return float((lo + hi) / 2.0), bias_star


class SvmPlusClassifier(BaseEstimator, ClassifierMixin):
    """Binary SVM+ estimator.

    fit takes the privileged matrix as a keyword argument; predict and
    decision_function take plain inputs only.  correcting_value exposes the
    learned slack model for diagnostics.
    """

    def __init__(
        self,
        kernel: str = "rbf",
        C: float = 1.0,
        gamma: float = 1.0,
        degree: int = 3,
        coef0: float = 0.0,
        priv_kernel: str = "rbf",
        Cstar: float = 1.0,
        priv_gamma: float = 1.0,
        priv_degree: int = 3,
        priv_coef0: float = 0.0,
        standardize: bool = True,
        tol: float = 1e-6,
        max_iter: int = 500_000,
    ):
        self.kernel = kernel
        self.C = C
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.priv_kernel = priv_kernel
        self.Cstar = Cstar
        self.priv_gamma = priv_gamma
        self.priv_degree = priv_degree
        self.priv_coef0 = priv_coef0
        self.standardize = standardize
        self.tol = tol
        self.max_iter = max_iter

    def _spec(self) -> KernelSpec:
        return KernelSpec(
            kind=self.kernel, gamma=self.gamma, degree=self.degree, coef0=self.coef0
        )

    def _priv_spec(self) -> KernelSpec:
        return KernelSpec(
            kind=self.priv_kernel,
            gamma=self.priv_gamma,
            degree=self.priv_degree,
            coef0=self.priv_coef0,
        )

    def fit(self, X, y, X_priv=None) -> "SvmPlusClassifier":
        if X_priv is None:
            raise ValueError("SVM+ training requires the privileged matrix X_priv")
        X, y = check_X_y(X, y)
        X_priv = check_array(X_priv)
        if X_priv.shape[0] != X.shape[0]:
            raise ValueError("X and X_priv must have the same number of rows")
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise DegenerateDataError("training data contains a single class")
        if len(self.classes_) > 2:
            raise ValueError("binary classifier got more than two classes")
        signs = np.where(y == self.classes_[1], 1.0, -1.0)
        self.scaler_ = _Standardizer().fit(X) if self.standardize else None
        self.priv_scaler_ = _Standardizer().fit(X_priv) if self.standardize else None
        xs = self.scaler_.transform(X) if self.scaler_ else np.asarray(X, dtype=float)
        xps = (
            self.priv_scaler_.transform(X_priv)
            if self.priv_scaler_
            else np.asarray(X_priv, dtype=float)
        )
        gram = kernel_matrix(self._spec(), xs, xs)
        gram_star = kernel_matrix(self._priv_spec(), xps, xps)
        alpha, beta, bias, bias_star, info = solve_svmplus_dual(
            gram, gram_star, signs, self.C, self.Cstar,
            tol=self.tol, max_iter=self.max_iter,
        )
        self.X_train_ = xs
        self.X_priv_train_ = xps
        self.y_train_ = signs
        self.alpha_ = alpha
        self.beta_ = beta
        self.bias_ = bias
        self.bias_star_ = bias_star
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

    def correcting_value(self, X_priv) -> np.ndarray:
        """Learned slack model evaluated at privileged vectors."""
        check_is_fitted(self, "alpha_")
        X_priv = check_array(X_priv)
        xps = (
            self.priv_scaler_.transform(X_priv)
            if self.priv_scaler_
            else np.asarray(X_priv, dtype=float)
        )
        gram = kernel_matrix(self._priv_spec(), xps, self.X_priv_train_)
        u = self.alpha_ + self.beta_ - self.C
        return gram @ u / self.Cstar + self.bias_star_
