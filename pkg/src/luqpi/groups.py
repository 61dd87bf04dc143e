"""Prime-order subgroups of Z_p* with deterministic generation and discrete logs.

All arithmetic is exact integer arithmetic.  Group elements are plain ints.
Every search below is a deterministic scan, so a given bit size always yields
the same group and repeated runs are bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .exceptions import CapacityError, MembershipError

# Deterministic Miller-Rabin witness sets.  Each entry (bound, witnesses) is
# exact for all candidates below the bound; the last bound exceeds 2**64.
_MR_THRESHOLDS = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (9080191, (31, 73)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (4759123141, (2, 7, 61)),
    (1122004669633, (2, 13, 23, 1662803)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318665857834031151167461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
    (3317044064679887385961981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)),
)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

# Witnesses appended beyond the proven range; still deterministic, heuristic.
_EXTRA_WITNESSES = (53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103)


def _mr_witness_passes(m: int, a: int, d: int, r: int) -> bool:
    """Return True when witness a does not prove m composite."""
    a %= m
    if a == 0:
        return True
    x = pow(a, d, m)
    if x == 1 or x == m - 1:
        return True
    for _ in range(r - 1):
        x = x * x % m
        if x == m - 1:
            return True
    return False


def is_prime(m: int, extra_rounds: int = 0) -> bool:
    """Deterministic Miller-Rabin primality test.

    Exact for every m below 3.3e24 (well past 64 bits).  Above that the fixed
    witness set plus ``extra_rounds`` further fixed witnesses is used, which
    keeps the test deterministic at the cost of a heuristic guarantee.
    """
    if m < 2:
        return False
    for sp in _SMALL_PRIMES:
        if m == sp:
            return True
        if m % sp == 0:
            return False
    d = m - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    witnesses: tuple[int, ...] = _MR_THRESHOLDS[-1][1]
    for bound, ws in _MR_THRESHOLDS:
        if m < bound:
            witnesses = ws
            break
    else:
        witnesses = witnesses + _EXTRA_WITNESSES[: max(0, extra_rounds)]
    return all(_mr_witness_passes(m, a, d, r) for a in witnesses)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Square-and-multiply exponentiation, base**exponent mod modulus."""
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ValueError(f"exponent must be >= 0, got {exponent}")
    return pow(base % modulus, exponent, modulus)


def gen_safe_prime(n: int) -> tuple[int, int]:
    """Smallest odd n-bit prime q with p = 2q + 1 also prime; returns (p, q).

    The scan starts at 2**(n-1) + 1 and walks odd candidates upward, so the
    result is a pure function of n.
    """
    if n < 2:
        raise ValueError(f"bit size must be >= 2, got {n}")
    q = (1 << (n - 1)) + 1
    while q < (1 << n):
        if is_prime(q) and is_prime(2 * q + 1):
            return 2 * q + 1, q
        q += 2
    raise ValueError(f"no {n}-bit safe-prime order found")


def find_generator(p: int, q: int) -> int:
    """Smallest g > 1 generating the order-q subgroup of Z_p*."""
    for g in range(2, p):
        if pow(g, q, p) == 1:
            return g
    raise ValueError(f"no generator of order {q} found modulo {p}")


@dataclass(frozen=True)
class GroupDescription:
    """An order-q subgroup of Z_p* for a safe prime p = 2q + 1."""

    n: int
    p: int
    q: int
    g: int

    def __post_init__(self) -> None:
        if self.p != 2 * self.q + 1:
            raise ValueError("p must equal 2q + 1")
        if self.q.bit_length() != self.n:
            raise ValueError(f"q must be an {self.n}-bit integer")
        if not (1 < self.g < self.p) or pow(self.g, self.q, self.p) != 1:
            raise ValueError("g does not generate an order-q subgroup")

    @cached_property
    def _member_set(self) -> frozenset[int] | None:
        # desk-scale groups sit in hot evaluation loops; one eager
        # enumeration buys O(1) membership checks from then on
        return subgroup_elements(self) if self.q <= (1 << 18) else None

    def contains(self, x: int) -> bool:
        """Subgroup membership: x in [1, p) and x^q = 1 (mod p)."""
        members = self._member_set
        if members is not None:
            return x in members
        return 1 <= x < self.p and pow(x, self.q, self.p) == 1

    def require_member(self, x: int) -> None:
        if not self.contains(x):
            raise MembershipError(f"{x} is not in the order-{self.q} subgroup mod {self.p}")

    def to_json_dict(self) -> dict:
        """Serialize with big integers as decimal strings."""
        return {"n": self.n, "p": str(self.p), "q": str(self.q), "g": str(self.g)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "GroupDescription":
        return cls(n=int(d["n"]), p=int(d["p"]), q=int(d["q"]), g=int(d["g"]))


def gen_group(n: int) -> GroupDescription:
    """Deterministic group for bit size n: safe prime scan plus smallest generator."""
    p, q = gen_safe_prime(n)
    return GroupDescription(n=n, p=p, q=q, g=find_generator(p, q))


@lru_cache(maxsize=64)
def subgroup_elements(group: GroupDescription) -> frozenset[int]:
    """The full order-q subgroup as a set.  Only for desk-scale groups."""
    if group.q > (1 << 22):
        raise CapacityError(f"subgroup of order {group.q} is too large to enumerate")
    elems = set()
    x = 1
    for _ in range(group.q):
        elems.add(x)
        x = x * group.g % group.p
    return frozenset(elems)


def discrete_log(group: GroupDescription, h: int, max_table: int = 1 << 21) -> int:
    """Discrete log of h base g via baby-step giant-step.

    Deterministic, O(sqrt(q)) time and memory.  Raises MembershipError for
    non-members and CapacityError when the baby-step table would exceed
    ``max_table`` entries.
    """
    group.require_member(h)
    if h == 1:
        return 0
    m = math.isqrt(group.q - 1) + 1
    if m > max_table:
        raise CapacityError(f"baby-step table of {m} entries exceeds budget {max_table}")
    table = {}
    x = 1
    for j in range(m):
        table.setdefault(x, j)
        x = x * group.g % group.p
    giant = pow(group.g, (group.p - 1 - m) % (group.p - 1), group.p)
    gamma = h
    for i in range(m):
        j = table.get(gamma)
        if j is not None:
            return (i * m + j) % group.q
        gamma = gamma * giant % group.p
    raise MembershipError(f"no discrete log of {h} found (corrupt group?)")
