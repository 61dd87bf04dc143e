"""Encrypted-key concept classes over safe-prime groups.

A concept hides an n-bit key y.  Evaluated on a tuple of subgroup elements
(h_1, ..., h_n) it returns the ElGamal-like label

    ( g^iota(y), { h_i^iota(y) * g^{y_i} } )

where iota reads a bit string as an MSB-first integer.  The binary variant
(BEEK) accepts raw bit strings, maps each through a concept-friendly group
embedding, and reserves the all-ones label as a sentinel for embedding
failures.  Circular encryption tuples of the same shape are provided for
hardness experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

from .exceptions import CapacityError
from .groups import GroupDescription, subgroup_elements

Label = tuple[int, tuple[int, ...]]


@lru_cache(maxsize=64)
def _sorted_members(group: GroupDescription) -> tuple[int, ...] | None:
    """Sorted subgroup for index-based uniform draws; None for large groups."""
    if group.q > (1 << 18):
        return None
    return tuple(sorted(subgroup_elements(group)))


def iota(bits: str) -> int:
    """MSB-first integer value of a bit string: iota("101") = 5."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"expected a non-empty bit string, got {bits!r}")
    return int(bits, 2)


def bits_of(value: int, width: int) -> str:
    """Fixed-width MSB-first rendering of a non-negative integer."""
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b")


@dataclass(frozen=True)
class EekConcept:
    """A secret n-bit key over a fixed group."""

    group: GroupDescription
    key: str

    def __post_init__(self) -> None:
        if len(self.key) != self.group.n or any(c not in "01" for c in self.key):
            raise ValueError(f"key must be a {self.group.n}-bit string")

    @cached_property
    def exponent(self) -> int:
        return iota(self.key) % self.group.q

    @cached_property
    def public_element(self) -> int:
        return pow(self.group.g, self.exponent, self.group.p)


@dataclass(frozen=True)
class EekSample:
    inputs: tuple[int, ...]
    label: Label


@dataclass(frozen=True)
class BeekSample:
    inputs: tuple[str, ...]
    label: Label


def eval_eek(concept: EekConcept, inputs: Sequence[int]) -> Label:
    """Concept label on a tuple of n subgroup members."""
    group = concept.group
    if len(inputs) != group.n:
        raise ValueError(f"expected {group.n} inputs, got {len(inputs)}")
    for h in inputs:
        group.require_member(h)
    k = concept.exponent
    g, p = group.g, group.p
    ciphers = []
    for h, bit in zip(inputs, concept.key):
        c = pow(h, k, p)
        if bit == "1":
            c = c * g % p
        ciphers.append(c)
    return concept.public_element, tuple(ciphers)


def sample_eek(concept: EekConcept, rng) -> EekSample:
    """Honest sample: uniform subgroup members plus their label."""
    group = concept.group
    members = _sorted_members(group)
    if members is not None:
        inputs = tuple(rng.choice(members) for _ in range(group.n))
    else:
        inputs = tuple(
            pow(group.g, rng.randrange(group.q), group.p) for _ in range(group.n)
        )
    return EekSample(inputs=inputs, label=eval_eek(concept, inputs))


# --- concept-friendly embedding -------------------------------------------

def nu_chunks(n: int) -> int:
    """Number of embedding attempts per input, ceil(log_{4/3}(n ln n)), at least 1.

    Each chunk succeeds with probability q / 2^(n+1) >= 1/4, so nu attempts
    leave an all-fail probability of at most (3/4)^nu <= 1 / (n ln n).
    """
    if n < 2:
        raise ValueError(f"bit size must be >= 2, got {n}")
    return max(1, math.ceil(math.log(n * math.log(n), 4 / 3)))


def embedded_length(n: int) -> int:
    """Canonical bit length of one embedded input: (n + 1) * nu."""
    return (n + 1) * nu_chunks(n)


def _member_test(group: GroupDescription):
    try:
        return subgroup_elements(group).__contains__
    except CapacityError:
        return lambda t: pow(t, group.q, group.p) == 1


def _embed_int(group: GroupDescription, value: int, nchunks: int, member) -> int:
    """Embedding on the integer form of a bit string; 1 when every chunk fails."""
    width = group.n + 1
    mask = (1 << width) - 1
    for i in range(nchunks - 1, -1, -1):
        t = (value >> (width * i)) & mask
        if 1 <= t < group.p and member(t):
            return t
    return 1


def embed(group: GroupDescription, v: str) -> int:
    """Map a bit string into the subgroup.

    The string is split MSB-first into chunks of n + 1 bits.  The first chunk
    whose integer value lands in [1, p) and in the subgroup is returned; when
    every chunk fails the identity element 1 is returned.  Any positive
    multiple of n + 1 is accepted as input length; honest samples use the
    canonical embedded_length(n).
    """
    width = group.n + 1
    if not v or any(c not in "01" for c in v):
        raise ValueError(f"expected a non-empty bit string, got {v!r}")
    if len(v) % width != 0:
        raise ValueError(f"bit length {len(v)} is not a multiple of {width}")
    return _embed_int(group, int(v, 2), len(v) // width, _member_test(group))


def _sample_preimage_int(group: GroupDescription, target: int, nchunks: int, rng, member) -> int:
    """Uniform element of the embedding preimage of a subgroup member.

    Rejection-samples whole inputs until one has a succeeding chunk, then
    overwrites that chunk with the unique encoding of the target.  Each
    (prefix, suffix) pattern is hit with probability proportional to its
    preimage mass, so the result is exactly uniform.
    """
    width = group.n + 1
    mask = (1 << width) - 1
    total = width * nchunks
    while True:
        v = rng.getrandbits(total)
        for i in range(nchunks - 1, -1, -1):
            t = (v >> (width * i)) & mask
            if 1 <= t < group.p and member(t):
                shift = width * i
                return (v & ~(mask << shift)) | (target << shift)


def sample_preimage(group: GroupDescription, target: int, rng) -> str:
    """Uniform bit string of canonical length embedding to ``target``.

    The identity is rejected: it also owns the all-chunks-fail fallback
    preimage, so it has no clean preimage of this form.
    """
    group.require_member(target)
    if target == 1:
        raise ValueError("the identity element has no unique embedding preimage")
    nu = nu_chunks(group.n)
    v = _sample_preimage_int(group, target, nu, rng, _member_test(group))
    return bits_of(v, (group.n + 1) * nu)


# --- binary variant --------------------------------------------------------

def sentinel_label(n: int) -> Label:
    """All-ones label marking an embedding failure: n + 1 ones."""
    return 1, (1,) * n


def eval_beek(concept: EekConcept, inputs: Sequence[str]) -> Label:
    """Binary concept label: embed each input, then evaluate.

    Any input embedding to the identity yields the sentinel label.
    """
    group = concept.group
    if len(inputs) != group.n:
        raise ValueError(f"expected {group.n} inputs, got {len(inputs)}")
    length = embedded_length(group.n)
    for z in inputs:
        if len(z) != length:
            raise ValueError(f"inputs must have {length} bits, got {len(z)}")
    embedded = [embed(group, z) for z in inputs]
    if any(e == 1 for e in embedded):
        return sentinel_label(group.n)
    return eval_eek(concept, embedded)


def sample_beek(concept: EekConcept, rng) -> BeekSample:
    """Honest binary sample: uniform bit strings plus their label."""
    n = concept.group.n
    length = embedded_length(n)
    inputs = tuple(bits_of(rng.getrandbits(length), length) for _ in range(n))
    return BeekSample(inputs=inputs, label=eval_beek(concept, inputs))


def beek_from_eek(group: GroupDescription, samples: Sequence[EekSample], rng) -> list[BeekSample]:
    """Rewrite group-element samples as distribution-matching binary samples.

    Per sample: draw fresh uniform bit strings; if any of them embeds to the
    identity, emit them with the sentinel label.  Otherwise replace each one
    with a uniform preimage of the corresponding group element and keep the
    original label.  Inputs equal to the identity (probability 1/q per
    coordinate in honest samples) have no informative preimage; those samples
    are emitted with a natural encoding of the identity and the sentinel
    label, which keeps every output consistent with eval_beek.
    """
    member = _member_test(group)
    n = group.n
    nu = nu_chunks(n)
    length = (n + 1) * nu
    out = []
    for sample in samples:
        if len(sample.inputs) != n:
            raise ValueError(f"expected {n} inputs per sample")
        fresh = [rng.getrandbits(length) for _ in range(n)]
        if any(_embed_int(group, z, nu, member) == 1 for z in fresh):
            inputs = tuple(bits_of(z, length) for z in fresh)
            out.append(BeekSample(inputs=inputs, label=sentinel_label(n)))
            continue
        degenerate = any(h == 1 for h in sample.inputs)
        replaced = tuple(
            bits_of(_sample_preimage_int(group, h, nu, rng, member), length)
            for h in sample.inputs
        )
        label = sentinel_label(n) if degenerate else sample.label
        out.append(BeekSample(inputs=replaced, label=label))
    return out


# --- circular encryption tuples --------------------------------------------

Pair = tuple[int, int]


@dataclass(frozen=True)
class CircularTuple:
    """Q columns of n ElGamal pairs under one public element.

    Real columns encrypt the key bits under the key's own exponent; random
    columns carry independent group elements in the second slot.
    """

    group: GroupDescription
    public: int
    pairs: tuple[tuple[Pair, ...], ...]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("real", "random"):
            raise ValueError(f"kind must be 'real' or 'random', got {self.kind!r}")
        if not self.pairs or not all(len(col) == len(self.pairs[0]) for col in self.pairs):
            raise ValueError("pairs must be a non-empty rectangular column list")

    @property
    def q_columns(self) -> int:
        return len(self.pairs)


def sample_circular(group: GroupDescription, key: str, q_columns: int, kind: str, rng) -> CircularTuple:
    """Draw a Q-column tuple for the given key, real or random."""
    if q_columns < 1:
        raise ValueError(f"q_columns must be >= 1, got {q_columns}")
    concept = EekConcept(group, key)
    k = concept.exponent
    g, p, q = group.g, group.p, group.q
    columns = []
    for _ in range(q_columns):
        col = []
        for bit in key:
            b = rng.randrange(q)
            c = pow(g, b, p)
            if kind == "real":
                z = pow(g, (b * k + (1 if bit == "1" else 0)) % q, p)
            elif kind == "random":
                z = pow(g, rng.randrange(q), p)
            else:
                raise ValueError(f"kind must be 'real' or 'random', got {kind!r}")
            col.append((c, z))
        columns.append(tuple(col))
    return CircularTuple(group=group, public=concept.public_element, pairs=tuple(columns), kind=kind)


def rerandomize(base: CircularTuple, q_columns: int, rng) -> CircularTuple:
    """Expand a single-column tuple into Q fresh-looking columns.

    Each output pair multiplies the base pair by (g^r, public^r) for a fresh
    exponent r, which preserves the plaintext of real pairs.
    """
    if base.q_columns != 1:
        raise ValueError(f"rerandomization starts from one column, got {base.q_columns}")
    group = base.group
    g, p, q = group.g, group.p, group.q
    columns = []
    for _ in range(q_columns):
        col = []
        for c, z in base.pairs[0]:
            r = rng.randrange(q)
            col.append((c * pow(g, r, p) % p, z * pow(base.public, r, p) % p))
        columns.append(tuple(col))
    return CircularTuple(group=group, public=base.public, pairs=tuple(columns), kind=base.kind)
