"""Decisional-composite-residuosity style demonstrator: shifted cube roots.

Concepts evaluate x -> (x^d + k) mod N, where d inverts cubing modulo a
3-RSA modulus N = p * q (neither p - 1 nor q - 1 divisible by 3).  The
privileged feature of an input is the factorization of N, which a trusted
generator records in a local registry; small moduli fall back to trial
division.  Knowing the factors plus one labeled point pins down the concept.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .exceptions import CapacityError, InconsistentSampleError, LearningFailureError
from .groups import is_prime
from .learning import ExtendedExample, Hypothesis

_FACTOR_REGISTRY: dict[int, tuple[int, int]] = {}


def _valid_factor(m: int) -> bool:
    return m > 2 and m % 3 != 1 and is_prime(m)


@dataclass(frozen=True)
class DcrConcept:
    """A 3-RSA modulus with a secret additive shift."""

    p: int
    q: int
    k: int

    def __post_init__(self) -> None:
        if self.p == self.q:
            raise ValueError("factors must be distinct")
        for m in (self.p, self.q):
            if not _valid_factor(m):
                raise ValueError(f"{m} is not an odd prime with m - 1 coprime to 3")
        if not 0 <= self.k < self.p * self.q:
            raise ValueError("shift must lie in [0, N)")

    @property
    def modulus(self) -> int:
        return self.p * self.q

    @property
    def d(self) -> int:
        """Cube-root exponent: the inverse of 3 modulo (p-1)(q-1)."""
        return pow(3, -1, (self.p - 1) * (self.q - 1))


def gen_3rsa(bits: int, seed) -> tuple[int, int, int]:
    """Deterministic-by-seed 3-RSA modulus of exactly ``bits`` bits.

    Returns (N, p, q) and records the factorization in the registry.  The
    factor sizes start at an even split and widen every few rounds so that
    small bit sizes with sparse prime pairs still terminate.
    """
    if bits < 6:
        raise ValueError(f"modulus size must be >= 6 bits, got {bits}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    max_shrink = max(1, bits // 2 - 1)
    for round_ in itertools.count():
        shrink = (round_ // 64) % max_shrink
        p_bits = bits // 2 - shrink
        q_bits = bits - p_bits
        p = rng.getrandbits(p_bits - 1) | (1 << (p_bits - 1)) | 1
        q = rng.getrandbits(q_bits - 1) | (1 << (q_bits - 1)) | 1
        if p == q or not _valid_factor(p) or not _valid_factor(q):
            continue
        n = p * q
        if n.bit_length() != bits:
            continue
        _FACTOR_REGISTRY[n] = (min(p, q), max(p, q))
        return n, p, q
    raise AssertionError("unreachable")


def eval_dcr(concept: DcrConcept, x: int) -> int:
    """Concept value (x^d + k) mod N."""
    n = concept.modulus
    if not 0 <= x < n:
        raise ValueError(f"input must lie in [0, {n})")
    return (pow(x, concept.d, n) + concept.k) % n


def dcr_feature_extract(x: int, modulus: int, trial_budget: int = 10**6) -> tuple[int, int]:
    """Privileged feature of (x, N): the ordered factor pair of N.

    Moduli produced by gen_3rsa are answered from the registry.  Unknown
    moduli are factored by trial division as long as the smallest factor is
    within ``trial_budget``; beyond that the request is refused.
    """
    known = _FACTOR_REGISTRY.get(modulus)
    if known is not None:
        return known
    if modulus < 9 or modulus % 2 == 0:
        raise ValueError(f"{modulus} is not an odd semiprime")
    f = 3
    while f * f <= modulus:
        if f > trial_budget:
            raise CapacityError(
                f"factoring {modulus} needs trial division past {trial_budget}"
            )
        if modulus % f == 0:
            other = modulus // f
            if not (is_prime(f) and is_prime(other)):
                raise ValueError(f"{modulus} is not a semiprime")
            return (f, other) if f <= other else (other, f)
        f += 2
    raise ValueError(f"{modulus} is prime, not a semiprime")


def dcr_semisupervised_learn(
    featured: list[ExtendedExample],
    labeled: list[ExtendedExample],
) -> Hypothesis:
    """Combine featured-but-unlabeled and labeled-but-unfeatured points.

    The featured set supplies the factorization (hence d); the first labeled
    point then determines the shift k, and every further labeled point must
    agree with it.  The two sets may be completely disjoint.
    """
    if not featured or not labeled:
        raise LearningFailureError("need at least one featured and one labeled example")
    moduli = {ex.inputs[1] for ex in featured} | {ex.inputs[1] for ex in labeled}
    if len(moduli) != 1:
        raise ValueError(f"examples span several moduli: {sorted(moduli)}")
    modulus = moduli.pop()
    first = featured[0]
    if first.features is None:
        raise LearningFailureError("featured example carries no features")
    p, q = first.features
    if p * q != modulus:
        raise InconsistentSampleError(f"features {p} * {q} do not factor {modulus}")
    d = pow(3, -1, (p - 1) * (q - 1))
    x0, _ = labeled[0].inputs
    k = (labeled[0].label - pow(x0, d, modulus)) % modulus
    for ex in labeled[1:]:
        x, _ = ex.inputs
        if (pow(x, d, modulus) + k) % modulus != ex.label:
            raise InconsistentSampleError("labeled examples disagree on the shift")

    def predict(point: tuple[int, int]) -> int:
        x, n = point
        if n != modulus:
            raise ValueError(f"hypothesis was trained for modulus {modulus}, got {n}")
        if not 0 <= x < n:
            raise ValueError(f"input must lie in [0, {n})")
        return (pow(x, d, n) + k) % n

    return Hypothesis(predict=predict, meta={"modulus": modulus, "shift": k, "d": d})


def registry_size() -> int:
    return len(_FACTOR_REGISTRY)
