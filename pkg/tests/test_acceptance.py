"""End-to-end guarantees, one test per headline criterion.

Each criterion runs at its stated tolerance and prints a single PASS/FAIL
scoreboard line with the measured runtime.  Run

    pytest tests/test_acceptance.py -v -s

to see every line; the runtime budgets are asserted, not just reported.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from contextlib import contextmanager
from math import gcd

import numpy as np
import pytest

from luqpi.bench import (
    ExperimentConfig,
    PhaseDataset,
    emit_report,
    run_experiment,
    summarize,
)
from luqpi.dcr import (
    DcrConcept,
    dcr_feature_extract,
    dcr_semisupervised_learn,
    eval_dcr,
    gen_3rsa,
)
from luqpi.eek import (
    EekConcept,
    eval_eek,
    rerandomize,
    sample_beek,
    sample_circular,
    sample_eek,
    sentinel_label,
)
from luqpi.groups import gen_group, subgroup_elements
from luqpi.learning import (
    ExtendedExample,
    evaluate_hypothesis,
    extended_beek_sample,
    extended_eek_sample,
    learn_beek,
    learn_eek,
)
from luqpi.rydberg import (
    GroundState,
    RydbergParams,
    assign_phase,
    builtin_grid,
    generate_dataset,
    ground_state,
    order_parameters,
)
from luqpi.svm import SvmClassifier, solve_svm_dual
from luqpi.svmplus import SvmPlusClassifier, solve_svmplus_dual

from .oracles import qp_svm, qp_svmplus, trial_division_is_prime
from .test_cli import _benchmark_inputs, _run_twice
from .test_eek import _decrypt_bit
from .test_rydberg import _basis_state
from .test_svm import _random_problems as svm_problems
from .test_svm import kkt_residual as svm_kkt
from .test_svmplus import _margin_separated
from .test_svmplus import _random_problems as svmplus_problems
from .test_svmplus import kkt_residual as svmplus_kkt


@contextmanager
def _criterion(name: str, budget_s: float | None = None):
    """Time a criterion body and print one scoreboard line either way."""
    start = time.perf_counter()
    failed = True
    try:
        yield
        failed = False
    finally:
        elapsed = time.perf_counter() - start
        over = budget_s is not None and elapsed >= budget_s
        status = "FAIL" if failed or over else "PASS"
        suffix = f" / budget {budget_s:.0f} s" if budget_s is not None else ""
        print(f"\n[{status}] {name}: {elapsed:.1f} s{suffix}")
    if budget_s is not None:
        assert elapsed < budget_s, f"{name} took {elapsed:.1f} s, budget {budget_s:.0f} s"


def _random_key(rng: random.Random, n: int) -> str:
    return format(rng.getrandbits(n), f"0{n}b")


def test_criterion_1_eek_exact_learning():
    rng = random.Random(20260814)
    with _criterion("exact learning from one featured sample, n in 2..16", 30.0):
        for n in range(2, 17):
            group = gen_group(n)
            members = sorted(subgroup_elements(group)) if n <= 4 else None
            for _ in range(50):
                concept = EekConcept(group, _random_key(rng, n))
                hypothesis = learn_eek(group, [extended_eek_sample(concept, rng)])
                assert hypothesis.meta["key"] == concept.key
                if members is not None:
                    for inputs in itertools.product(members, repeat=n):
                        assert hypothesis(inputs) == eval_eek(concept, inputs)
                else:

                    def draw():
                        sample = sample_eek(concept, rng)
                        return sample.inputs, sample.label

                    assert evaluate_hypothesis(hypothesis, draw, 1000) == 0.0


def test_criterion_2_beek_degradation_bound():
    rng = random.Random(31415)
    draws = 100_000
    with _criterion("binary-variant error bounded by the sentinel rate", 120.0):
        for n in range(4, 13):
            group = gen_group(n)
            concept = EekConcept(group, _random_key(rng, n))
            sentinel = sentinel_label(n)
            hits = sum(
                sample_beek(concept, rng).label == sentinel for _ in range(draws)
            )
            p_hat = hits / draws
            sigma = math.sqrt(p_hat * (1.0 - p_hat) / draws)
            # n * (1 / (n ln n)) = 1 / ln n
            assert p_hat <= 1.0 / math.log(n) + 3.0 * sigma

            train = [extended_beek_sample(concept, rng) for _ in range(200)]
            hypothesis = learn_beek(group, train)

            def draw():
                sample = sample_beek(concept, rng)
                return sample.inputs, sample.label

            assert evaluate_hypothesis(hypothesis, draw, 2000) <= p_hat


def test_criterion_3_circular_tuples():
    rng = random.Random(777)
    with _criterion("circular tuples decrypt; random tuples rarely decode", 10.0):
        group = gen_group(8)
        key = _random_key(rng, 8)
        k = EekConcept(group, key).exponent

        for q_columns in range(1, 21):
            tup = sample_circular(group, key, q_columns, "real", rng)
            assert tup.q_columns == q_columns
            for column in tup.pairs:
                assert "".join(_decrypt_bit(group, k, pair) for pair in column) == key

        base = sample_circular(group, key, 1, "real", rng)
        for q_columns in (2, 7, 20):
            fresh = rerandomize(base, q_columns, rng)
            assert fresh.public == base.public
            for column in fresh.pairs:
                assert "".join(_decrypt_bit(group, k, pair) for pair in column) == key

        cells = 0
        valid = 0
        for _ in range(2500):
            tup = sample_circular(group, key, 1, "random", rng)
            for column in tup.pairs:
                for pair in column:
                    cells += 1
                    valid += _decrypt_bit(group, k, pair) is not None
        bound = 2.0 / group.q
        sigma = math.sqrt(bound * (1.0 - bound) / cells)
        assert valid / cells <= bound + 5.0 * sigma


def test_criterion_4_dcr_cube_root_identity():
    rng = random.Random(20260814)
    with _criterion("cube-root identity on every small modulus", 30.0):
        limit = 10_000
        primes = [
            m
            for m in range(3, limit // 3 + 1, 2)
            if m % 3 != 1 and trial_division_is_prime(m)
        ]
        seen = set()
        for i, p in enumerate(primes):
            if p * p > limit:
                break
            for q in primes[i + 1 :]:
                if p * q > limit:
                    break
                concept = DcrConcept(p, q, 0)
                modulus = concept.modulus
                for x in range(1, modulus):
                    if gcd(x, modulus) == 1:
                        assert pow(eval_dcr(concept, x), 3, modulus) == x
                seen.add(modulus)
        assert min(seen) == 15 and 55 in seen and 35 not in seen
        assert len(seen) >= 300

        for bits in (8, 10, 12):
            modulus, p, q = gen_3rsa(bits, seed=bits)
            concept = DcrConcept(p, q, rng.randrange(modulus))
            half = modulus // 2
            featured = [
                ExtendedExample(
                    inputs=(x, modulus),
                    features=dcr_feature_extract(x, modulus),
                    label=None,
                )
                for x in range(1, half)
                if gcd(x, modulus) == 1
            ][:4]
            labeled = [
                ExtendedExample(
                    inputs=(x, modulus), features=None, label=eval_dcr(concept, x)
                )
                for x in range(half, modulus)
                if gcd(x, modulus) == 1
            ][:4]
            assert {e.inputs for e in featured}.isdisjoint(e.inputs for e in labeled)
            hypothesis = dcr_semisupervised_learn(featured, labeled)
            wrong = sum(
                hypothesis((x, modulus)) != eval_dcr(concept, x)
                for x in range(modulus)
            )
            assert wrong == 0


def test_criterion_5_solver_oracle_equivalence():
    with _criterion("dual solvers match the QP oracle on 50 datasets", 60.0):
        for kernel, y, c in svm_problems(50, seed=29):
            alpha, bias, info = solve_svm_dual(kernel, y, c, tol=1e-9)
            _, oracle_obj = qp_svm(kernel, y, c)
            assert abs(info["objective"] - oracle_obj) <= 1e-5 * max(1.0, abs(oracle_obj))
            assert svm_kkt(kernel, y, alpha, bias, c) <= 1e-6
        for kernel, kernel_star, y, c, c_star in svmplus_problems(50, seed=31):
            alpha, beta, bias, bias_star, info = solve_svmplus_dual(
                kernel, kernel_star, y, c, c_star, tol=1e-10
            )
            _, _, oracle_obj = qp_svmplus(kernel, kernel_star, y, c, c_star)
            assert abs(info["objective"] - oracle_obj) <= 1e-5 * max(1.0, abs(oracle_obj))
            residual = svmplus_kkt(
                kernel, kernel_star, y, alpha, beta, bias, bias_star, c, c_star
            )
            assert residual <= 1e-6


def test_criterion_6_constant_privilege_collapse():
    with _criterion("constant privileged features collapse to the plain solver"):
        rng = np.random.default_rng(41)
        agree = []
        for _ in range(20):
            n = int(rng.integers(8, 14))
            x, y, _ = _margin_separated(rng, n)
            x_priv = np.full((n, 2), 1.9)
            fresh = rng.normal(size=(200, 2))
            plain = SvmClassifier(kernel="rbf", C=10.0, gamma=1.0, tol=1e-8)
            plus = SvmPlusClassifier(
                kernel="rbf", C=10.0, Cstar=1.0, gamma=1.0, tol=1e-8
            )
            plain.fit(x, y)
            plus.fit(x, y, X_priv=x_priv)
            agree.append(float(np.mean(plain.predict(fresh) == plus.predict(fresh))))
        assert np.mean(agree) >= 0.99


def test_criterion_7_physics_sanity():
    with _criterion("chain solver sanity and cross-method agreement", 120.0):
        lone = ground_state(RydbergParams(1, 0.0, 1.0, omega=2.0), method="dense")
        assert abs(lone.energy - (-1.0)) <= 1e-10

        neel = GroundState(
            params=RydbergParams(4, 3.0, 1.2),
            energy=0.0,
            amplitudes=_basis_state(4, (1, 3)),
        )
        assert order_parameters(neel)[0] == 1.0
        period3 = GroundState(
            params=RydbergParams(6, 3.0, 2.4),
            energy=0.0,
            amplitudes=_basis_state(6, (1, 4)),
        )
        assert order_parameters(period3)[1] == 1.0

        for n in range(2, 13):
            params = RydbergParams(n, 2.0, 1.25)
            dense = ground_state(params, method="dense")
            lanczos = ground_state(params, method="lanczos")
            assert abs(dense.energy - lanczos.energy) <= 1e-8
            od = order_parameters(dense)
            ol = order_parameters(lanczos)
            assert abs(od[0] - ol[0]) <= 1e-6
            assert abs(od[1] - ol[1]) <= 1e-6

        deep = ground_state(RydbergParams(12, 3.5, 1.2), method="lanczos")
        o_z2, o_z3 = order_parameters(deep)
        assert o_z2 > 0.8
        assert assign_phase(o_z2, o_z3) == "z2"


@pytest.mark.filterwarnings("ignore::sklearn.exceptions.ConvergenceWarning")
def test_criterion_8_experiment_pipeline(tmp_path):
    with _criterion("hard-boundary pipeline on a self-generated dataset", 1800.0):
        grid = builtin_grid()
        assert len(grid) >= 600
        samples = generate_dataset(grid, 12)
        config = ExperimentConfig(
            strategies=("hard_boundary",),
            train_sizes=(15, 20, 30, 40),
            repeats=30,
            cv_folds=5,
            anchor_size=40,
            svm_c=(1.0, 10.0, 100.0, 1000.0),
            svm_gamma=(0.1, 1.0, 10.0),
            kernels=("rbf",),
            svmplus_cstar=(10.0, 1000.0),
            svmplus_gammastar=(0.01, 0.1),
            seed=0,
        )

        dataset = PhaseDataset(samples)
        rows, chosen = run_experiment(config, dataset)
        assert len(rows) == 2 * len(config.train_sizes) * config.repeats
        # privileged firewall: reads happen only for the anchor selection and
        # the svmplus training slices, never for evaluation or the svm arm
        expected_reads = config.anchor_size + sum(config.train_sizes) * config.repeats
        assert dataset.priv_reads == expected_reads

        rerun_dataset = PhaseDataset(samples)
        rows2, chosen2 = run_experiment(config, rerun_dataset)
        assert rows == rows2
        assert chosen == chosen2

        summary = summarize(rows, config, chosen)
        cells = {(c["method"], c["train_size"]): c for c in summary["cells"]}
        for method in ("svm", "svmplus"):
            for size in config.train_sizes:
                cell = cells[(method, size)]
                assert cell["n"] == config.repeats
                assert 0.0 <= cell["mean"] <= 1.0
                assert 0.0 <= cell["ci_halfwidth"] < 1.0

        paths = emit_report(rows, summary, tmp_path / "run_a")
        paths2 = emit_report(rows2, summarize(rows2, config, chosen2), tmp_path / "run_b")
        assert set(paths) == set(paths2)
        for name in paths:
            assert paths[name].read_bytes() == paths2[name].read_bytes()

        for diff in summary["paired_diff_svmplus_minus_svm"]:
            low = diff["mean"] - diff["ci_halfwidth"]
            high = diff["mean"] + diff["ci_halfwidth"]
            print(
                f"  svmplus minus svm at size {diff['train_size']}: "
                f"{diff['mean']:+.4f} (95% CI {low:+.4f} .. {high:+.4f})"
            )


def test_criterion_9_cli_determinism(tmp_path):
    with _criterion("every command is byte-identical across repeated runs"):
        _run_twice(lambda p: ["gen-group", "--n", "5", "--out", p], tmp_path, "group")
        _run_twice(
            lambda p: [
                "eek-demo", "--n", "4", "--samples", "25", "--seed", "3",
                "--reveal-key", "--out", p,
            ],
            tmp_path,
            "eek",
        )
        _run_twice(
            lambda p: [
                "eek-demo", "--n", "4", "--samples", "25", "--seed", "3",
                "--beek", "--out", p,
            ],
            tmp_path,
            "beek",
        )
        _run_twice(
            lambda p: [
                "luqpi-run", "--task", "eek", "--n", "4", "--trials", "2",
                "--seed", "1", "--train-size", "16", "--test-size", "60", "--out", p,
            ],
            tmp_path,
            "run_eek",
        )
        _run_twice(
            lambda p: [
                "luqpi-run", "--task", "beek", "--n", "4", "--trials", "2",
                "--seed", "2", "--train-size", "16", "--test-size", "60", "--out", p,
            ],
            tmp_path,
            "run_beek",
        )
        _run_twice(
            lambda p: [
                "dcr-demo", "--bits", "10", "--labeled", "2", "--featured", "3",
                "--seed", "4", "--test-size", "100", "--out", p,
            ],
            tmp_path,
            "dcr",
        )
        grid_path = tmp_path / "grid.json"
        grid_path.write_text(json.dumps([[-1.0, 1.5], [3.5, 1.2], [3.0, 2.4]]))
        _run_twice(
            lambda p: [
                "rydberg-gen", "--atoms", "5", "--grid", str(grid_path),
                "--seed", "6", "--out", p,
            ],
            tmp_path,
            "ryd",
        )
        dataset_path, config_path = _benchmark_inputs(tmp_path)
        _run_twice(
            lambda p: [
                "benchmark", "--dataset", str(dataset_path), "--config",
                str(config_path), "--out", p, "--seed", "9",
            ],
            tmp_path,
            "bench",
        )
