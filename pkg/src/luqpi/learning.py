"""Key recovery from a single featured sample.

Training examples carry privileged features: the discrete logs of the input
group elements.  One featured sample pins down the hidden key exactly, and
the returned hypothesis re-evaluates the concept without ever touching the
feature extractor again.  A module-level call meter makes that deployment
contract checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .eek import (
    EekConcept,
    Label,
    embed,
    eval_beek,
    eval_eek,
    sample_beek,
    sample_eek,
    sentinel_label,
)
from .exceptions import InconsistentSampleError, LearningFailureError
from .groups import GroupDescription, discrete_log


class _CallMeter:
    """Counts feature-extractor invocations."""

    def __init__(self) -> None:
        self.calls = 0


EXTRACTION_METER = _CallMeter()


def extraction_count() -> int:
    return EXTRACTION_METER.calls


@dataclass(frozen=True)
class ExtendedExample:
    """An input with an optional privileged feature tuple and optional label."""

    inputs: Any
    features: tuple[int, ...] | None
    label: Any


@dataclass
class Hypothesis:
    """A deployable predictor plus diagnostic metadata."""

    predict: Callable[[Any], Any]
    meta: dict = field(default_factory=dict)

    def __call__(self, x: Any) -> Any:
        return self.predict(x)


def extract_features_eek(group: GroupDescription, inputs: Sequence[int]) -> tuple[int, ...]:
    """Privileged features of a group-element tuple: per-coordinate discrete logs."""
    EXTRACTION_METER.calls += 1
    return tuple(discrete_log(group, h) for h in inputs)


def extract_features_beek(group: GroupDescription, inputs: Sequence[str]) -> tuple[int, ...]:
    """Privileged features of a bit-string tuple: discrete logs of the embeddings."""
    EXTRACTION_METER.calls += 1
    return tuple(discrete_log(group, embed(group, z)) for z in inputs)


def recover_key(group: GroupDescription, label: Label, features: Sequence[int]) -> str:
    """Reconstruct the hidden key from one label and its input features.

    With r_i the discrete log of the i-th input, c_i * public^(-r_i) equals
    g^{y_i}, so each cipher component decodes to one key bit.  Anything other
    than 1 or g, or a public element that disagrees with the decoded key,
    means the sample is not an honest concept evaluation.
    """
    public, ciphers = label
    if len(ciphers) != len(features):
        raise ValueError("features and cipher components must align")
    group.require_member(public)
    g, p, q = group.g, group.p, group.q
    bits = []
    for c, r in zip(ciphers, features):
        group.require_member(c)
        val = c * pow(public, (q - r % q) % q, p) % p
        if val == 1:
            bits.append("0")
        elif val == g:
            bits.append("1")
        else:
            raise InconsistentSampleError(
                f"cipher component decodes to {val}, expected 1 or {g}"
            )
    key = "".join(bits)
    if EekConcept(group, key).public_element != public:
        raise InconsistentSampleError("public element disagrees with the decoded key")
    return key


def learn_eek(group: GroupDescription, examples: Sequence[ExtendedExample]) -> Hypothesis:
    """Exact learner: recover the key from the first featured example.

    Remaining examples are replayed against the recovered concept as a data
    integrity check.  The hypothesis closes over the concept only; evaluating
    it performs no feature extraction.
    """
    featured = [ex for ex in examples if ex.features is not None]
    if not featured:
        raise LearningFailureError("no featured examples to learn from")
    first = featured[0]
    key = recover_key(group, first.label, first.features)
    concept = EekConcept(group, key)
    for ex in examples:
        if eval_eek(concept, ex.inputs) != ex.label:
            raise InconsistentSampleError("example disagrees with the recovered key")
    return Hypothesis(
        predict=lambda inputs: eval_eek(concept, inputs),
        meta={"task": "eek", "key": key, "n": group.n},
    )


def learn_beek(
    group: GroupDescription,
    examples: Sequence[ExtendedExample],
    zero_key_fallback: bool = True,
) -> Hypothesis:
    """Binary-variant learner: recover the key from a non-sentinel example.

    Sentinel-labeled examples are uninformative.  When every label is the
    all-ones tuple the only key whose honest labels always look like that is
    the zero key, which is returned when ``zero_key_fallback`` is set;
    otherwise learning fails.
    """
    sentinel = sentinel_label(group.n)
    informative = [
        ex for ex in examples if ex.label != sentinel and ex.features is not None
    ]
    if informative:
        first = informative[0]
        key = recover_key(group, first.label, first.features)
    elif zero_key_fallback and len(examples) > 0:
        key = "0" * group.n
    else:
        raise LearningFailureError("every example carries the sentinel label")
    concept = EekConcept(group, key)
    for ex in examples:
        if eval_beek(concept, ex.inputs) != ex.label:
            raise InconsistentSampleError("example disagrees with the recovered key")
    return Hypothesis(
        predict=lambda inputs: eval_beek(concept, inputs),
        meta={"task": "beek", "key": key, "n": group.n},
    )


def extended_eek_sample(concept: EekConcept, rng) -> ExtendedExample:
    """Honest featured training example for the group-element task."""
    sample = sample_eek(concept, rng)
    features = extract_features_eek(concept.group, sample.inputs)
    return ExtendedExample(inputs=sample.inputs, features=features, label=sample.label)


def extended_beek_sample(concept: EekConcept, rng) -> ExtendedExample:
    """Honest featured training example for the binary task."""
    sample = sample_beek(concept, rng)
    features = extract_features_beek(concept.group, sample.inputs)
    return ExtendedExample(inputs=sample.inputs, features=features, label=sample.label)


def evaluate_hypothesis(
    hypothesis: Hypothesis,
    sample_fn: Callable[[], tuple[Any, Any]],
    trials: int,
) -> float:
    """Fraction of freshly drawn labeled inputs the hypothesis gets wrong."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    wrong = 0
    for _ in range(trials):
        x, label = sample_fn()
        if hypothesis(x) != label:
            wrong += 1
    return wrong / trials
