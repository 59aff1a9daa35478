"""Set families over [n] as bitmasks, closure predicates and exact weighted abundances.

A set A of [n] is stored as an int whose bit j-1 is set iff j is in A.
Elements are 1-based everywhere in the public API.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ElementAbsent, FamilyTooSmall, GroundSetTooLarge

MAX_N = 24
ENUM_CAP = 4
_CHUNK = 1 << 16


class ClosureOp(str, enum.Enum):
    INTERSECTION = "intersection"
    UNION = "union"

    def apply(self, a: int, b: int) -> int:
        return a & b if self is ClosureOp.INTERSECTION else a | b


def popcount(a: int) -> int:
    return bin(a).count("1")


def mask_to_elements(a: int) -> list[int]:
    out = []
    j = 1
    while a:
        if a & 1:
            out.append(j)
        a >>= 1
        j += 1
    return out


def elements_to_mask(elems: Iterable[int]) -> int:
    a = 0
    for j in elems:
        a |= 1 << (int(j) - 1)
    return a


@dataclass(frozen=True)
class SetFamily:
    """Canonical family of distinct subsets of [n], sorted by bitmask."""

    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1 or self.n > MAX_N:
            raise ValueError(f"ground set size must be in 1..{MAX_N}, got {self.n!r}")
        canon = tuple(sorted(set(int(a) for a in self.sets)))
        for a in canon:
            if a < 0 or a >> self.n:
                raise ValueError(f"bitmask {a} is not a subset of [{self.n}]")
        object.__setattr__(self, "sets", canon)

    @classmethod
    def from_lists(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        masks = []
        for s in sets:
            s = list(s)
            if any(int(j) < 1 or int(j) > n for j in s):
                raise ValueError(f"element out of range 1..{n} in {s}")
            masks.append(elements_to_mask(s))
        return cls(n, tuple(masks))

    @classmethod
    def from_char_mask(cls, n: int, char: int) -> "SetFamily":
        return cls(n, tuple(a for a in range(1 << n) if char >> a & 1))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sets)

    def __contains__(self, a: int) -> bool:
        return a in self._members

    @cached_property
    def _members(self) -> frozenset[int]:
        return frozenset(self.sets)

    @property
    def support(self) -> int:
        """Bitmask of the union of all member sets."""
        u = 0
        for a in self.sets:
            u |= a
        return u

    @property
    def char_mask(self) -> int:
        """Characteristic bitmask of the family over the 2^n subsets."""
        c = 0
        for a in self.sets:
            c |= 1 << a
        return c

    def elements(self) -> list[int]:
        return mask_to_elements(self.support)

    def to_lists(self) -> list[list[int]]:
        return [mask_to_elements(a) for a in self.sets]


def is_closed(f: SetFamily, op: ClosureOp) -> bool:
    members = set(f.sets)
    sets = f.sets
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if op.apply(a, b) not in members:
                return False
    return True


def is_intersection_closed(f: SetFamily) -> bool:
    return is_closed(f, ClosureOp.INTERSECTION)


def is_union_closed(f: SetFamily) -> bool:
    return is_closed(f, ClosureOp.UNION)


def close_under(f: SetFamily, op: ClosureOp) -> SetFamily:
    """Smallest superset of ``f`` closed under ``op``."""
    if len(f) == 0:
        raise ValueError("cannot close an empty family")
    members = set(f.sets)
    frontier = list(members)
    while frontier:
        new = []
        for a in frontier:
            for b in list(members):
                c = op.apply(a, b)
                if c not in members:
                    members.add(c)
                    new.append(c)
        frontier = new
    return SetFamily(f.n, tuple(members))


def dualize(f: SetFamily) -> SetFamily:
    full = (1 << f.n) - 1
    return SetFamily(f.n, tuple(full ^ a for a in f.sets))


# -- weights -----------------------------------------------------------------


@dataclass(frozen=True)
class WeightSpec:
    """Per-coordinate (k_i, m_i) pairs; in Boltzmann mode every pair is (den t, num t).

    The weight of a set A is the product of m_j/k_j over j in A.
    """

    kvec: tuple[int, ...]
    mvec: tuple[int, ...]
    t: Fraction | None = field(default=None)

    def __post_init__(self):
        kvec = tuple(int(k) for k in self.kvec)
        mvec = tuple(int(m) for m in self.mvec)
        if len(kvec) != len(mvec) or not kvec:
            raise ValueError("kvec and mvec must be non-empty and of equal length")
        if min(kvec) < 1 or min(mvec) < 1:
            raise ValueError("all k_i and m_i must be positive integers")
        object.__setattr__(self, "kvec", kvec)
        object.__setattr__(self, "mvec", mvec)
        if self.t is not None:
            t = Fraction(self.t)
            if not (0 < t <= 1):
                raise ValueError(f"temperature parameter t must lie in (0, 1], got {t}")
            if kvec != (t.denominator,) * len(kvec) or mvec != (t.numerator,) * len(kvec):
                raise ValueError("Boltzmann weights must use k = denominator(t), m = numerator(t)")
            object.__setattr__(self, "t", t)

    @classmethod
    def product(cls, kvec: Sequence[int], mvec: Sequence[int]) -> "WeightSpec":
        return cls(tuple(kvec), tuple(mvec))

    @classmethod
    def uniform(cls, n: int, k: int = 1, m: int = 1) -> "WeightSpec":
        return cls((k,) * n, (m,) * n)

    @classmethod
    def boltzmann(cls, n: int, t) -> "WeightSpec":
        t = Fraction(t)
        return cls((t.denominator,) * n, (t.numerator,) * n, t)

    @property
    def n(self) -> int:
        return len(self.kvec)

    @property
    def is_boltzmann(self) -> bool:
        return self.t is not None

    @property
    def beta(self) -> float:
        """Inverse temperature log(1/t); only meaningful in Boltzmann mode."""
        if self.t is None:
            raise ValueError("beta is defined only for Boltzmann weights")
        return math.log(1 / self.t)

    def ratio(self, j: int) -> Fraction:
        """m_j / k_j for the 1-based coordinate j."""
        return Fraction(self.mvec[j - 1], self.kvec[j - 1])

    def in_theorem_regime(self) -> bool:
        return all(k >= 5 and m * m <= k for k, m in zip(self.kvec, self.mvec))


def weight(a: int, w: WeightSpec) -> Fraction:
    if a < 0 or a >> w.n:
        raise ValueError(f"bitmask {a} is not a subset of [{w.n}]")
    if w.t is not None:
        return w.t ** popcount(a)
    out = Fraction(1)
    for j in mask_to_elements(a):
        out *= w.ratio(j)
    return out


def _check(f: SetFamily, w: WeightSpec) -> None:
    if w.n != f.n:
        raise ValueError(f"weights are for n={w.n} but family has n={f.n}")
    if len(f) < 2:
        raise FamilyTooSmall(f"family has {len(f)} set(s); at least two are required")


def normalized_weights(f: SetFamily, w: WeightSpec) -> dict[int, Fraction]:
    """Probability of each member set under the weighted distribution."""
    ws = {a: weight(a, w) for a in f.sets}
    total = sum(ws.values())
    return {a: x / total for a, x in ws.items()}


def abundance(f: SetFamily, w: WeightSpec, i: int) -> Fraction:
    """Weighted fraction of member sets that avoid element ``i``."""
    _check(f, w)
    bit = 1 << (i - 1)
    if i < 1 or not f.support & bit:
        raise ElementAbsent(f"element {i} is not in any set of the family")
    num = Fraction(0)
    den = Fraction(0)
    for a in f.sets:
        x = weight(a, w)
        den += x
        if not a & bit:
            num += x
    return num / den


def union_abundance(f: SetFamily, w: WeightSpec, i: int) -> Fraction:
    """Fraction of sets containing ``i`` under weights prod k_j/m_j (union-closed form)."""
    _check(f, w)
    bit = 1 << (i - 1)
    if i < 1 or not f.support & bit:
        raise ElementAbsent(f"element {i} is not in any set of the family")
    num = Fraction(0)
    den = Fraction(0)
    for a in f.sets:
        x = 1 / weight(a, w)
        den += x
        if a & bit:
            num += x
    return num / den


def all_abundances(f: SetFamily, w: WeightSpec) -> dict[int, Fraction]:
    _check(f, w)
    ws = [(a, weight(a, w)) for a in f.sets]
    den = sum(x for _, x in ws)
    out = {}
    for i in f.elements():
        bit = 1 << (i - 1)
        out[i] = sum((x for a, x in ws if not a & bit), Fraction(0)) / den
    return out


def best_element(f: SetFamily, w: WeightSpec) -> tuple[int, Fraction]:
    """Element of maximal abundance, smallest index on ties."""
    ab = all_abundances(f, w)
    best = max(ab.values())
    i = min(j for j, v in ab.items() if v == best)
    return i, best


@dataclass(frozen=True)
class VerificationRecord:
    best_element: int
    best_value: Fraction
    passed: bool
    abundances: dict[int, Fraction]

    def to_dict(self) -> dict:
        return {
            "best_element": self.best_element,
            "best_value": str(self.best_value),
            "pass": self.passed,
            "abundances": {str(i): str(v) for i, v in self.abundances.items()},
        }


def verify_frankl(f: SetFamily, w: WeightSpec) -> VerificationRecord:
    ab = all_abundances(f, w)
    best = max(ab.values())
    i = min(j for j, v in ab.items() if v == best)
    return VerificationRecord(i, best, best >= Fraction(1, 2), ab)


# -- enumeration -------------------------------------------------------------


def _closed_mask(chars: np.ndarray, n: int, op: ClosureOp) -> tuple[np.ndarray, np.ndarray]:
    nsub = 1 << n
    bits = ((chars[:, None] >> np.arange(nsub, dtype=np.uint64)) & np.uint64(1)).astype(bool)
    ok = np.ones(len(chars), dtype=bool)
    for a in range(nsub):
        for b in range(a + 1, nsub):
            c = op.apply(a, b)
            if c == a or c == b:
                continue
            ok &= ~(bits[:, a] & bits[:, b]) | bits[:, c]
    return ok, bits.sum(axis=1)


def enumeration_size(n: int) -> int:
    return 1 << (1 << n)


def enumerate_closed_families(
    n: int,
    op: ClosureOp = ClosureOp.INTERSECTION,
    min_size: int = 2,
    *,
    allow_n5: bool = False,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[SetFamily]:
    """Yield every closed family on [n] with at least ``min_size`` sets.

    Families come out in ascending order of their characteristic bitmask.
    ``start``/``stop`` restrict the characteristic range so callers can split
    the work. n = 5 scans 2^32 candidates and takes hours; it needs ``allow_n5``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > ENUM_CAP and not (n == 5 and allow_n5):
        raise GroundSetTooLarge(
            f"exhaustive enumeration is capped at n={ENUM_CAP} (n=5 needs allow_n5; 2^32 candidates)"
        )
    total = enumeration_size(n)
    stop = total if stop is None else min(stop, total)
    lo = start
    while lo < stop:
        hi = min(lo + _CHUNK, stop)
        chars = np.arange(lo, hi, dtype=np.uint64)
        ok, sizes = _closed_mask(chars, n, op)
        for c in chars[ok & (sizes >= min_size)]:
            yield SetFamily.from_char_mask(n, int(c))
        lo = hi


def random_closed_family(
    n: int,
    op: ClosureOp = ClosureOp.INTERSECTION,
    density: float = 0.5,
    seed: int = 0,
    max_retries: int = 64,
) -> SetFamily:
    """Include each subset of [n] with probability ``density``, then close.

    Empty draws are re-drawn from the next substream; after ``max_retries``
    a single uniformly chosen subset is used.
    """
    if not (0 < density <= 1):
        raise ValueError("density must lie in (0, 1]")
    if n < 1 or n > MAX_N:
        raise ValueError(f"n must be in 1..{MAX_N}")
    nsub = 1 << n
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        picked = np.flatnonzero(rng.random(nsub) < density)
        if len(picked):
            return close_under(SetFamily(n, tuple(int(a) for a in picked)), op)
    rng = np.random.default_rng([seed, max_retries])
    return close_under(SetFamily(n, (int(rng.integers(nsub)),)), op)
