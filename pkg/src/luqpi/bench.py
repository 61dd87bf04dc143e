"""Benchmark harness: sampling strategies, CV model selection, SVM vs SVM+.

The workflow mirrors the phase-classification study:

  1. draw class-balanced training sets from a labeled phase dataset,
     optionally concentrated near the 0.8 order-parameter threshold;
  2. pick hyperparameters once per strategy by stratified k-fold CV on an
     anchor-size draw, reusing them across training sizes;
  3. for every (strategy, size, repeat) fit a plain SVM on the parameter
     features and an SVM+ that additionally sees the order parameters of
     the training points, both one-vs-all;
  4. score on the full grid and report Student-t confidence intervals,
     including the paired SVM+ minus SVM difference.

Privileged columns flow only through ``PhaseDataset.privileged``, which
counts every row it serves; scoring reads features alone, so the counter
audits the train-time-only contract.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path

import numpy as np
from scipy import stats
from sklearn.model_selection import StratifiedKFold

from .exceptions import DegenerateDataError, StratificationError
from .rydberg import PHASES, PhaseSample
from .svm import OneVsAllClassifier, SvmClassifier
from .svmplus import SvmPlusClassifier

DEFAULT_CLASS_RATIO = (0.56, 0.27, 0.17)
STRATEGY_WEIGHTS = {"uniform": 0.0, "light_boundary": 2.0, "hard_boundary": 6.0}


@dataclass(frozen=True)
class SamplingStrategy:
    kind: str
    boundary_weight: float
    class_ratio: tuple[float, float, float] = DEFAULT_CLASS_RATIO

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_WEIGHTS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.boundary_weight < 0:
            raise ValueError("boundary weight must be nonnegative")
        if len(self.class_ratio) != len(PHASES):
            raise ValueError("class ratio needs one entry per phase")
        if any(r < 0 for r in self.class_ratio):
            raise ValueError("class ratio entries must be nonnegative")
        if abs(sum(self.class_ratio) - 1.0) > 1e-9:
            raise ValueError(f"class ratio must sum to 1, got {sum(self.class_ratio)}")


def make_strategy(kind: str, class_ratio: tuple[float, float, float] = DEFAULT_CLASS_RATIO) -> SamplingStrategy:
    """Preset boundary weights: uniform 0, light 2, hard 6."""
    return SamplingStrategy(kind=kind, boundary_weight=STRATEGY_WEIGHTS[kind], class_ratio=tuple(class_ratio))


def proximity(o_z2: float, o_z3: float) -> float:
    """Triangular boundary score peaking at the 0.8 threshold, half-width 0.2."""
    return max(0.0, 1.0 - abs(max(o_z2, o_z3) - 0.8) / 0.2)


class PhaseDataset:
    """Phase samples split into open features and audited privileged columns."""

    def __init__(self, samples: list[PhaseSample]):
        if not samples:
            raise DegenerateDataError("empty phase dataset")
        self.samples = list(samples)
        self.features = np.array([[s.delta_over_omega, s.r0_over_a] for s in self.samples])
        self.labels = np.array([s.label for s in self.samples])
        self._privileged = np.array([[s.o_z2, s.o_z3] for s in self.samples])
        self.proximities = np.array([proximity(s.o_z2, s.o_z3) for s in self.samples])
        self.priv_reads = 0

    def __len__(self) -> int:
        return len(self.samples)

    def privileged(self, indices: np.ndarray) -> np.ndarray:
        """Order-parameter columns for the given rows; every served row is counted."""
        indices = np.asarray(indices)
        self.priv_reads += int(indices.size)
        return self._privileged[indices].copy()

    def require_all_phases(self) -> None:
        present = set(self.labels.tolist())
        missing = [p for p in PHASES if p not in present]
        if missing:
            raise DegenerateDataError(f"dataset lacks phase classes: {', '.join(missing)}")


def class_counts(size: int, ratio: tuple[float, float, float]) -> tuple[int, ...]:
    """Per-phase counts: rounded shares, remainder assigned to the largest-ratio class."""
    counts = [round(size * r) for r in ratio]
    counts[int(np.argmax(ratio))] += size - sum(counts)
    return tuple(counts)


def sample_training_set(
    dataset: PhaseDataset,
    strategy: SamplingStrategy,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw `size` row indices without replacement, class-stratified and boundary-weighted."""
    if size > len(dataset):
        raise DegenerateDataError(f"requested {size} points from a dataset of {len(dataset)}")
    chosen: list[np.ndarray] = []
    for phase, need in zip(PHASES, class_counts(size, strategy.class_ratio)):
        pool = np.flatnonzero(dataset.labels == phase)
        if len(pool) < need:
            raise DegenerateDataError(f"class {phase} has {len(pool)} points, need {need}")
        if need == 0:
            continue
        weights = np.exp(strategy.boundary_weight * dataset.proximities[pool])
        chosen.append(rng.choice(pool, size=need, replace=False, p=weights / weights.sum()))
    return np.sort(np.concatenate(chosen))


_DEFAULT_C = (1, 10, 50, 100, 250, 500, 1000, 2500)
_DEFAULT_GAMMA = (0.01, 0.1, 1.0, 10.0, 100.0)
_DEFAULT_KERNELS = ("rbf", "polynomial")
_DEFAULT_CSTAR = (1, 10, 100, 1000, 10000, 100000)
_DEFAULT_GAMMASTAR = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    strategies: tuple[str, ...] = ("uniform", "light_boundary", "hard_boundary")
    train_sizes: tuple[int, ...] = (15, 20, 30, 40)
    repeats: int = 30
    cv_folds: int = 5
    anchor_size: int = 40
    class_ratio: tuple[float, float, float] = DEFAULT_CLASS_RATIO
    svm_c: tuple[float, ...] = _DEFAULT_C
    svm_gamma: tuple[float, ...] = _DEFAULT_GAMMA
    kernels: tuple[str, ...] = _DEFAULT_KERNELS
    svmplus_cstar: tuple[float, ...] = _DEFAULT_CSTAR
    svmplus_gammastar: tuple[float, ...] = _DEFAULT_GAMMASTAR
    standardize: bool = True
    eval_disjoint: bool = False
    solver_tol: float = 1e-3
    solver_max_iter: int = 20_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if not self.solver_tol > 0:
            raise ValueError("solver_tol must be positive")
        if self.cv_folds < 2:
            raise ValueError("cv_folds must be at least 2")
        if not self.train_sizes or any(s < 1 for s in self.train_sizes):
            raise ValueError("train sizes must be positive")
        for kind in self.strategies:
            if kind not in STRATEGY_WEIGHTS:
                raise ValueError(f"unknown strategy kind {kind!r}")
        if abs(sum(self.class_ratio) - 1.0) > 1e-9:
            raise ValueError("class ratio must sum to 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        coerced = {
            key: tuple(value) if isinstance(value, list) else value
            for key, value in raw.items()
        }
        return cls(**coerced)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        data = path.read_bytes()
        if path.suffix.lower() == ".toml":
            import tomli

            raw = tomli.loads(data.decode())
        else:
            raw = json.loads(data.decode())
        return cls.from_dict(raw)


@dataclass(frozen=True)
class ResultRow:
    method: str
    strategy: str
    train_size: int
    repeat: int
    accuracy: float
    params: dict


def _svm_configs(config: ExperimentConfig):
    for kernel in config.kernels:
        for c in config.svm_c:
            for gamma in config.svm_gamma:
                yield {"kernel": kernel, "C": c, "gamma": gamma}


def _svmplus_configs(config: ExperimentConfig):
    for base in _svm_configs(config):
        for cstar in config.svmplus_cstar:
            for gammastar in config.svmplus_gammastar:
                yield {**base, "Cstar": cstar, "gammastar": gammastar}


def _make_model(method: str, params: dict, config: ExperimentConfig) -> OneVsAllClassifier:
    if method == "svm":
        base = SvmClassifier(
            kernel=params["kernel"],
            C=params["C"],
            gamma=params["gamma"],
            standardize=config.standardize,
            tol=config.solver_tol,
            max_iter=config.solver_max_iter,
        )
    elif method == "svmplus":
        base = SvmPlusClassifier(
            kernel=params["kernel"],
            C=params["C"],
            gamma=params["gamma"],
            Cstar=params["Cstar"],
            priv_gamma=params["gammastar"],
            standardize=config.standardize,
            tol=config.solver_tol,
            max_iter=config.solver_max_iter,
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return OneVsAllClassifier(base)


def _sort_key(params: dict, config: ExperimentConfig) -> tuple:
    return (
        params["C"],
        params["gamma"],
        params.get("Cstar", 0),
        params.get("gammastar", 0),
        config.kernels.index(params["kernel"]),
    )


def cv_select(
    x: np.ndarray,
    y: np.ndarray,
    x_priv: np.ndarray | None,
    method: str,
    config: ExperimentConfig,
    rng: np.random.Generator,
) -> dict:
    """Pick the grid configuration with the lowest mean validation error.

    Ties break toward smaller C, then gamma, then Cstar, then gammastar,
    then kernel order as configured.
    """
    _, counts = np.unique(y, return_counts=True)
    if counts.min() < config.cv_folds:
        raise StratificationError(
            f"smallest class has {counts.min()} members, cannot stratify {config.cv_folds} folds"
        )
    splitter = StratifiedKFold(
        n_splits=config.cv_folds,
        shuffle=True,
        random_state=int(rng.integers(2**32)),
    )
    folds = list(splitter.split(x, y))
    candidates = _svm_configs(config) if method == "svm" else _svmplus_configs(config)
    best: tuple | None = None
    for params in candidates:
        errors = []
        for train_idx, val_idx in folds:
            model = _make_model(method, params, config)
            if method == "svmplus":
                model.fit(x[train_idx], y[train_idx], X_priv=x_priv[train_idx])
            else:
                model.fit(x[train_idx], y[train_idx])
            errors.append(float(np.mean(model.predict(x[val_idx]) != y[val_idx])))
        key = (float(np.mean(errors)), *_sort_key(params, config))
        if best is None or key < best[0]:
            best = (key, params)
    return best[1]


def _rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def run_experiment(config: ExperimentConfig, dataset: PhaseDataset) -> tuple[list[ResultRow], dict]:
    """Full protocol; deterministic for a given config.

    RNG streams derive from (seed, role, task indices), so results do not
    depend on execution order and tasks could run concurrently.
    """
    dataset.require_all_phases()
    rows: list[ResultRow] = []
    chosen: dict[str, dict[str, dict]] = {}
    for s_idx, kind in enumerate(config.strategies):
        strategy = make_strategy(kind, config.class_ratio)
        anchor_idx = sample_training_set(
            dataset, strategy, config.anchor_size, _rng_for(config.seed, 0, s_idx)
        )
        anchor_x = dataset.features[anchor_idx]
        anchor_y = dataset.labels[anchor_idx]
        anchor_priv = dataset.privileged(anchor_idx)
        chosen[kind] = {}
        for method, priv in (("svm", None), ("svmplus", anchor_priv)):
            try:
                chosen[kind][method] = cv_select(
                    anchor_x, anchor_y, priv, method, config, _rng_for(config.seed, 1, s_idx)
                )
            except Exception as exc:
                raise type(exc)(f"cv_select failed for strategy {kind}: {exc}") from exc
        for size_idx, size in enumerate(config.train_sizes):
            for rep in range(config.repeats):
                draw_rng = _rng_for(config.seed, 2, s_idx, size_idx, rep)
                train_idx = sample_training_set(dataset, strategy, size, draw_rng)
                x_tr = dataset.features[train_idx]
                y_tr = dataset.labels[train_idx]
                priv_tr = dataset.privileged(train_idx)
                if config.eval_disjoint:
                    eval_mask = np.ones(len(dataset), dtype=bool)
                    eval_mask[train_idx] = False
                else:
                    eval_mask = np.ones(len(dataset), dtype=bool)
                eval_x = dataset.features[eval_mask]
                eval_y = dataset.labels[eval_mask]
                for method in ("svm", "svmplus"):
                    params = chosen[kind][method]
                    model = _make_model(method, params, config)
                    try:
                        if method == "svmplus":
                            model.fit(x_tr, y_tr, X_priv=priv_tr)
                        else:
                            model.fit(x_tr, y_tr)
                    except Exception as exc:
                        raise type(exc)(
                            f"fit failed at strategy={kind} size={size} repeat={rep}: {exc}"
                        ) from exc
                    accuracy = float(np.mean(model.predict(eval_x) == eval_y))
                    rows.append(
                        ResultRow(
                            method=method,
                            strategy=kind,
                            train_size=size,
                            repeat=rep,
                            accuracy=accuracy,
                            params=params,
                        )
                    )
    return rows, summarize(rows, config, chosen)


def _t_interval(values: np.ndarray) -> dict:
    n = len(values)
    mean = float(np.mean(values))
    if n < 2:
        half = 0.0
    else:
        half = float(stats.t.ppf(0.975, n - 1) * np.std(values, ddof=1) / np.sqrt(n))
    return {"n": n, "mean": mean, "ci_halfwidth": half, "ci_low": mean - half, "ci_high": mean + half}


def summarize(rows: list[ResultRow], config: ExperimentConfig, chosen: dict) -> dict:
    """Per-cell accuracy intervals plus the paired SVM+ minus SVM difference."""
    cells = []
    diffs = []
    for kind in config.strategies:
        for size in config.train_sizes:
            per_method = {}
            for method in ("svm", "svmplus"):
                acc = np.array(
                    [
                        r.accuracy
                        for r in rows
                        if r.method == method and r.strategy == kind and r.train_size == size
                    ]
                )
                per_method[method] = acc
                cells.append(
                    {"method": method, "strategy": kind, "train_size": size, **_t_interval(acc)}
                )
            # repeats are index-aligned across methods: same training draw
            diffs.append(
                {
                    "strategy": kind,
                    "train_size": size,
                    **_t_interval(per_method["svmplus"] - per_method["svm"]),
                }
            )
    return {
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(config).items()},
        "chosen_hyperparameters": chosen,
        "cells": cells,
        "paired_diff_svmplus_minus_svm": diffs,
    }


def emit_report(rows: list[ResultRow], summary: dict, out_dir) -> dict[str, Path]:
    """Write results.csv, summary.json and per-strategy plot data; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        plot_dir = out / "plotdata"
        plot_dir.mkdir(exist_ok=True)
        csv_path = out / "results.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["method", "strategy", "train_size", "repeat", "accuracy", "C", "gamma", "Cstar", "gammastar"]
            )
            for r in rows:
                writer.writerow(
                    [
                        r.method,
                        r.strategy,
                        r.train_size,
                        r.repeat,
                        repr(r.accuracy),
                        r.params["C"],
                        r.params["gamma"],
                        r.params.get("Cstar", ""),
                        r.params.get("gammastar", ""),
                    ]
                )
        summary_path = out / "summary.json"
        summary_path.write_text(json.dumps(summary, indent=2) + "\n")
        paths = {"results": csv_path, "summary": summary_path}
        strategies = summary["config"]["strategies"]
        sizes = summary["config"]["train_sizes"]
        for kind in strategies:
            series = []
            for method in ("svm", "svmplus"):
                pick = {
                    c["train_size"]: c
                    for c in summary["cells"]
                    if c["strategy"] == kind and c["method"] == method
                }
                series.append(
                    {
                        "method": method,
                        "x": list(sizes),
                        "y": [pick[s]["mean"] for s in sizes],
                        "ci_low": [pick[s]["ci_low"] for s in sizes],
                        "ci_high": [pick[s]["ci_high"] for s in sizes],
                    }
                )
            panel = plot_dir / f"{kind}.json"
            panel.write_text(json.dumps({"strategy": kind, "series": series}, indent=2) + "\n")
            paths[f"plotdata/{kind}"] = panel
        return paths
    except OSError as exc:
        raise OSError(f"failed writing report under {out}: {exc}") from exc
