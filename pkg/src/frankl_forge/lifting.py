"""Lifted families: each base set A is blown up into all symbol tuples over A.

Coordinate j of a lifted tuple takes values in the alphabet
``0, e^1..e^(k_j-1), 1, z^1..z^(m_j-1)`` where ``e`` is nilpotent of order
k_j and ``z`` is a root of unity of order m_j. Coordinates in A carry
``1`` or a power of ``z``; coordinates outside A carry ``0`` or a power of
``e``. The uniform distribution on the lift pushes forward to the weighted
distribution on the base.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import (
    BudgetExceeded,
    ExponentOutOfRange,
    LevelEqualityError,
    SetAbsent,
    ZeroProbabilityPrefix,
)
from .families import SetFamily, WeightSpec, weight
from .functional import DiscreteMeasure

DEFAULT_BUDGET = 10**6
BUDGET_ENV = "FRANKL_FORGE_BUDGET"


class Kind(IntEnum):
    # declaration order is the alphabet order used for sorting and prefixes
    ZERO = 0
    EPS = 1
    ONE = 2
    ZETA = 3


class Symbol(NamedTuple):
    kind: Kind
    power: int = 0

    def __str__(self) -> str:
        if self.kind is Kind.ZERO:
            return "0"
        if self.kind is Kind.ONE:
            return "1"
        base = "e" if self.kind is Kind.EPS else "z"
        return base if self.power == 1 else f"{base}^{self.power}"


ZERO = Symbol(Kind.ZERO)
ONE = Symbol(Kind.ONE)


def eps(j: int) -> Symbol:
    return Symbol(Kind.EPS, j)


def zeta(j: int) -> Symbol:
    return Symbol(Kind.ZETA, j)


def validate_symbol(s: Symbol, k: int, m: int) -> None:
    kind, p = Kind(s.kind), s.power
    if kind in (Kind.ZERO, Kind.ONE):
        ok = p == 0
    elif kind is Kind.EPS:
        ok = 1 <= p <= k - 1
    else:
        ok = 1 <= p <= m - 1
    if not ok:
        raise ExponentOutOfRange(f"{kind.name} exponent {p} invalid for k={k}, m={m}")


def alphabet(k: int, m: int) -> list[Symbol]:
    return [ZERO] + [eps(j) for j in range(1, k)] + [ONE] + [zeta(j) for j in range(1, m)]


def zero_fiber(k: int) -> list[Symbol]:
    """Symbols that project to 0."""
    return [ZERO] + [eps(j) for j in range(1, k)]


def one_fiber(m: int) -> list[Symbol]:
    """Symbols that project to 1."""
    return [ONE] + [zeta(j) for j in range(1, m)]


def mul_symbol(a: Symbol, b: Symbol, k: int, m: int) -> Symbol:
    validate_symbol(a, k, m)
    validate_symbol(b, k, m)
    return _mul(Symbol(Kind(a.kind), a.power), Symbol(Kind(b.kind), b.power), k, m)


def _mul(a: Symbol, b: Symbol, k: int, m: int) -> Symbol:
    # unchecked product; ZERO < EPS < ONE < ZETA lets us order the pair
    if a.kind > b.kind:
        a, b = b, a
    if a.kind is Kind.ZERO or b.kind is Kind.ONE:
        return a
    if a.kind is Kind.EPS:
        if b.kind is Kind.EPS:
            s = a.power + b.power
            return eps(s) if s < k else ZERO
        return a  # e^j z^l = e^j
    if a.kind is Kind.ONE:
        return b
    s = (a.power + b.power) % m
    return zeta(s) if s else ONE


def mul_tuple(u: Sequence[Symbol], v: Sequence[Symbol], kvec: Sequence[int], mvec: Sequence[int]) -> tuple:
    return tuple(_mul(a, b, k, m) for a, b, k, m in zip(u, v, kvec, mvec))


def theta(t: Sequence[Symbol]) -> int:
    """Bitmask of the coordinates whose symbol projects to 1."""
    out = 0
    for j, s in enumerate(t):
        if s.kind >= Kind.ONE:
            out |= 1 << j
    return out


def fiber_size(a: int, w: WeightSpec) -> int:
    out = 1
    for j in range(w.n):
        out *= w.mvec[j] if a >> j & 1 else w.kvec[j]
    return out


def lifted_size(f: SetFamily, w: WeightSpec) -> int:
    return sum(fiber_size(a, w) for a in f.sets)


def default_budget() -> int:
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class LiftedFamily:
    base: SetFamily
    weights: WeightSpec
    tuples: tuple[tuple[Symbol, ...], ...]
    size: int
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    def params(self, i: int) -> tuple[int, int]:
        """(k_i, m_i) for the 1-based coordinate i."""
        self._check_coord(i)
        return self.weights.kvec[i - 1], self.weights.mvec[i - 1]

    def _check_coord(self, i: int) -> None:
        if not (1 <= i <= self.n):
            raise ValueError(f"coordinate {i} outside 1..{self.n}")

    def prefix_table(self, i: int) -> dict[tuple, Counter]:
        """Map each length-(i-1) prefix to the counts of the i-th symbol.

        Keys come out in lexicographic alphabet order.
        """
        self._check_coord(i)
        key = ("prefix", i)
        if key not in self._cache:
            table: dict[tuple, Counter] = {}
            for t in self.tuples:
                table.setdefault(t[: i - 1], Counter())[t[i - 1]] += 1
            self._cache[key] = dict(sorted(table.items()))
        return self._cache[key]


def lift(f: SetFamily, w: WeightSpec, budget: int | None = None) -> LiftedFamily:
    if w.n != f.n:
        raise ValueError(f"weights are for n={w.n} but family has n={f.n}")
    budget = default_budget() if budget is None else budget
    size = lifted_size(f, w)
    if size > budget:
        raise BudgetExceeded(size, budget)
    zeros = [zero_fiber(k) for k in w.kvec]
    ones = [one_fiber(m) for m in w.mvec]
    tuples = []
    for a in f.sets:
        fibers = [ones[j] if a >> j & 1 else zeros[j] for j in range(f.n)]
        tuples.extend(itertools.product(*fibers))
    tuples.sort()
    return LiftedFamily(f, w, tuple(tuples), size)


def is_mul_closed(lf: LiftedFamily) -> bool:
    members = set(lf.tuples)
    kv, mv = lf.weights.kvec, lf.weights.mvec
    return all(mul_tuple(u, v, kv, mv) in members for u in lf.tuples for v in lf.tuples)


def base_marginal(lf: LiftedFamily, a: int) -> Fraction:
    """Probability that a uniform lifted tuple projects to the base set ``a``."""
    if a not in lf.base:
        raise SetAbsent(f"set {a:#b} is not in the base family")
    count = sum(1 for t in lf.tuples if theta(t) == a)
    return Fraction(count, lf.size)


def _level_check(counts: Counter, i: int, prefix: tuple, k: int, m: int) -> None:
    z = counts[ZERO]
    if any(counts[eps(j)] != z for j in range(1, k)):
        raise LevelEqualityError(f"nilpotent levels differ at coordinate {i}, prefix {prefix}")
    o = counts[ONE]
    if any(counts[zeta(j)] != o for j in range(1, m)):
        raise LevelEqualityError(f"root-of-unity levels differ at coordinate {i}, prefix {prefix}")


def conditional_zero_prob(lf: LiftedFamily, i: int, prefix: Sequence[Symbol]) -> Fraction:
    """P[X_i = 0 | X_<i = prefix], after checking that every level is equally likely."""
    prefix = tuple(prefix)
    if len(prefix) != i - 1:
        raise ValueError(f"prefix for coordinate {i} must have length {i - 1}")
    table = lf.prefix_table(i)
    counts = table.get(prefix)
    if counts is None:
        raise ZeroProbabilityPrefix(f"prefix {tuple(map(str, prefix))} has probability 0")
    k, m = lf.params(i)
    _level_check(counts, i, prefix, k, m)
    return Fraction(counts[ZERO], sum(counts.values()))


@dataclass(frozen=True)
class PrefixRow:
    prefix: tuple
    prob: Fraction
    zero_prob: Fraction


def zero_profile(lf: LiftedFamily, i: int) -> list[PrefixRow]:
    """Every positive-probability prefix with its mass and conditional zero probability."""
    rows = []
    for prefix, counts in lf.prefix_table(i).items():
        rows.append(PrefixRow(prefix, Fraction(sum(counts.values()), lf.size), conditional_zero_prob(lf, i, prefix)))
    return rows


def zero_marginal(lf: LiftedFamily, i: int) -> Fraction:
    """P[X_i = 0] by direct count."""
    lf._check_coord(i)
    return Fraction(sum(1 for t in lf.tuples if t[i - 1] == ZERO), lf.size)


def mu_exact(lf: LiftedFamily, i: int) -> dict[Fraction, Fraction]:
    """Atoms k_i * P[X_i=0 | prefix] weighted by prefix mass, merged exactly."""
    k, _ = lf.params(i)
    out: dict[Fraction, Fraction] = {}
    for row in zero_profile(lf, i):
        x = k * row.zero_prob
        out[x] = out.get(x, Fraction(0)) + row.prob
    return dict(sorted(out.items()))


def mu_i(lf: LiftedFamily, i: int) -> DiscreteMeasure:
    return DiscreteMeasure(tuple((float(x), float(p)) for x, p in mu_exact(lf, i).items()))


def expected_marginal(f: SetFamily, w: WeightSpec, a: int) -> Fraction:
    """Normalized product weight of ``a``; the value base_marginal must reproduce."""
    return weight(a, w) / sum(weight(b, w) for b in f.sets)
