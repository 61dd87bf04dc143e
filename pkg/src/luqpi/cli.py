"""Command line entry points.

Every subcommand is deterministic: a fixed seed reproduces output files
byte for byte.  Big integers are rendered as decimal strings so the JSON
survives parsers without arbitrary-precision numbers.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import random
import sys

from . import bench, dcr, eek, groups, learning, rydberg


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _label_dict(label) -> dict:
    public, cells = label
    return {"public": str(public), "cells": [str(c) for c in cells]}


def _trial_rng(seed: int, trial: int) -> random.Random:
    # injective for trial < 1_000_003, keeping trial streams independent
    return random.Random(seed * 1_000_003 + trial)


def cmd_gen_group(args) -> None:
    group = groups.gen_group(args.n)
    _emit(json.dumps(group.to_json_dict()) + "\n", args.out)


def cmd_eek_demo(args) -> None:
    group = groups.gen_group(args.n)
    rng = random.Random(args.seed)
    key = "".join(str(rng.randrange(2)) for _ in range(args.n))
    concept = eek.EekConcept(group, key)
    header = {
        "task": "beek" if args.beek else "eek",
        "group": group.to_json_dict(),
        "samples": args.samples,
    }
    if args.reveal_key:
        header["key"] = key
    lines = [json.dumps(header)]
    for _ in range(args.samples):
        if args.beek:
            sample = eek.sample_beek(concept, rng)
            inputs = list(sample.inputs)
        else:
            sample = eek.sample_eek(concept, rng)
            inputs = [str(h) for h in sample.inputs]
        lines.append(json.dumps({"inputs": inputs, "label": _label_dict(sample.label)}))
    _emit("\n".join(lines) + "\n", args.out)


def cmd_luqpi_run(args) -> None:
    group = groups.gen_group(args.n)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["trial", "n", "train_size", "test_error", "key_recovered"])
    for trial in range(args.trials):
        rng = _trial_rng(args.seed, trial)
        key = "".join(str(rng.randrange(2)) for _ in range(args.n))
        concept = eek.EekConcept(group, key)
        if args.task == "eek":
            train = [learning.extended_eek_sample(concept, rng) for _ in range(args.train_size)]
            hypothesis = learning.learn_eek(group, train)

            def draw():
                s = eek.sample_eek(concept, rng)
                return s.inputs, s.label

        else:
            train = [learning.extended_beek_sample(concept, rng) for _ in range(args.train_size)]
            hypothesis = learning.learn_beek(group, train)

            def draw():
                s = eek.sample_beek(concept, rng)
                return s.inputs, s.label

        error = learning.evaluate_hypothesis(hypothesis, draw, args.test_size)
        writer.writerow([trial, args.n, args.train_size, repr(error), int(hypothesis.meta["key"] == key)])
    _emit(buf.getvalue(), args.out)


def cmd_dcr_demo(args) -> None:
    rng = random.Random(args.seed)
    modulus, p, q = dcr.gen_3rsa(args.bits, rng)
    concept = dcr.DcrConcept(p, q, rng.randrange(modulus))
    featured = [
        learning.ExtendedExample(
            inputs=(x, modulus), features=dcr.dcr_feature_extract(x, modulus), label=None
        )
        for x in (rng.randrange(modulus) for _ in range(args.featured))
    ]
    labeled = [
        learning.ExtendedExample(inputs=(x, modulus), features=None, label=dcr.eval_dcr(concept, x))
        for x in (rng.randrange(modulus) for _ in range(args.labeled))
    ]
    hypothesis = dcr.dcr_semisupervised_learn(featured, labeled)
    wrong = sum(
        hypothesis((x, modulus)) != dcr.eval_dcr(concept, x)
        for x in (rng.randrange(modulus) for _ in range(args.test_size))
    )
    report = {
        "bits": args.bits,
        "modulus": str(modulus),
        "featured": args.featured,
        "labeled": args.labeled,
        "learned_shift": str(hypothesis.meta["shift"]),
        "shift_recovered": hypothesis.meta["shift"] == concept.k,
        "test_error": wrong / args.test_size,
    }
    _emit(json.dumps(report) + "\n", args.out)


def cmd_rydberg_gen(args) -> None:
    if args.grid == "builtin":
        points = rydberg.builtin_grid()
    else:
        with open(args.grid) as fh:
            points = [(float(d), float(r)) for d, r in json.load(fh)]
    samples = rydberg.generate_dataset(points, args.atoms, seed=args.seed)
    rydberg.write_jsonl(samples, args.out)


def cmd_benchmark(args) -> None:
    dataset = bench.PhaseDataset(rydberg.read_dataset(args.dataset))
    if args.config:
        config = bench.ExperimentConfig.from_file(args.config)
    else:
        config = bench.ExperimentConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    rows, summary = bench.run_experiment(config, dataset)
    bench.emit_report(rows, summary, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="luqpi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-group", help="print the canonical n-bit safe-prime group as JSON")
    p.add_argument("--n", type=int, required=True, help="bit size of the subgroup order")
    p.add_argument("--out", default=None, help="write to a file instead of stdout")
    p.set_defaults(func=cmd_gen_group)

    p = sub.add_parser("eek-demo", help="emit JSON-lines of concept samples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--beek", action="store_true", help="emit binary-variant samples")
    p.add_argument("--reveal-key", action="store_true", help="include the secret key in the header")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eek_demo)

    p = sub.add_parser("luqpi-run", help="run learning trials and emit a CSV")
    p.add_argument("--task", choices=("eek", "beek"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--train-size", type=int, default=64)
    p.add_argument("--test-size", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_luqpi_run)

    p = sub.add_parser("dcr-demo", help="semi-supervised cube-root demo")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--labeled", type=int, required=True)
    p.add_argument("--featured", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--test-size", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dcr_demo)

    p = sub.add_parser("rydberg-gen", help="diagonalize a parameter grid into a JSONL dataset")
    p.add_argument("--atoms", type=int, required=True)
    p.add_argument("--grid", default="builtin", help="'builtin' or a JSON file of [delta, r0] pairs")
    p.add_argument("--out", required=True)
    p.add_argument(
        "--seed", type=int, default=0,
        help="accepted for interface symmetry; diagonalization is deterministic",
    )
    p.set_defaults(func=cmd_rydberg_gen)

    p = sub.add_parser("benchmark", help="run the SVM vs SVM+ comparison")
    p.add_argument("--dataset", required=True, help="JSONL phase dataset")
    p.add_argument("--config", default=None, help="TOML or JSON experiment config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
