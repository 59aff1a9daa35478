"""Shannon entropies of lifted families and brute-force checks of the entropy identities.

Brute-force quantities are computed from exact counts over the lifted family
(or over ordered pairs of lifted tuples) and never use ``h``, ``g`` or ``F``;
the closed forms from the functional module are only evaluated on the other
side of each comparison. Natural logarithms throughout, 0 log 0 = 0.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded
from .functional import F, FunctionalParams, g, h
from .lifting import LiftedFamily, mu_i, mul_tuple, zero_profile

PAIR_BUDGET = 10**7
TOL = 1e-9


@dataclass(frozen=True)
class FiniteDistribution:
    outcomes: tuple[Hashable, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.outcomes) != len(self.masses):
            raise ValueError("outcomes and masses differ in length")
        if any(p < 0 for p in self.masses):
            raise ValueError("masses must be nonnegative")
        if sum(self.masses) != 1:
            raise ValueError("masses must sum to exactly 1")

    @classmethod
    def from_counts(cls, counts: Counter) -> "FiniteDistribution":
        total = sum(counts.values())
        items = sorted(counts.items())
        return cls(tuple(o for o, _ in items), tuple(Fraction(c, total) for _, c in items))

    @classmethod
    def uniform(cls, outcomes: Iterable[Hashable]) -> "FiniteDistribution":
        outcomes = tuple(outcomes)
        p = Fraction(1, len(outcomes))
        return cls(outcomes, (p,) * len(outcomes))

    def marginal(self, project) -> "FiniteDistribution":
        acc: dict = {}
        for o, p in zip(self.outcomes, self.masses):
            key = project(o)
            acc[key] = acc.get(key, Fraction(0)) + p
        items = sorted(acc.items())
        return FiniteDistribution(tuple(o for o, _ in items), tuple(p for _, p in items))


def entropy(d: FiniteDistribution) -> float:
    return -math.fsum(float(p) * math.log(p) for p in d.masses if p > 0)


def count_entropy(counts: Iterable[int]) -> float:
    """Entropy of the distribution proportional to the given counts."""
    counts = [c for c in counts if c > 0]
    total = sum(counts)
    return math.log(total) - math.fsum(c * math.log(c) for c in counts) / total


def _conditional(joint: Counter, cond: Counter) -> float:
    # H(U, V) - H(U) from counts over the same population
    return count_entropy(joint.values()) - count_entropy(cond.values())


def _check_pairs(lf: LiftedFamily, budget: int) -> None:
    pairs = lf.size * lf.size
    if pairs > budget:
        raise BudgetExceeded(pairs, budget, what="pair distribution")


def joint_product_distribution(lf: LiftedFamily, budget: int = PAIR_BUDGET) -> FiniteDistribution:
    _check_pairs(lf, budget)
    return FiniteDistribution.uniform(itertools.product(lf.tuples, lf.tuples))


def entropy_X(lf: LiftedFamily) -> float:
    return count_entropy(Counter(lf.tuples).values())


def product_counts(lf: LiftedFamily, budget: int = PAIR_BUDGET) -> Counter:
    """Counts of the component-wise product over all ordered pairs."""
    _check_pairs(lf, budget)
    key = ("products",)
    if key not in lf._cache:
        kv, mv = lf.weights.kvec, lf.weights.mvec
        lf._cache[key] = Counter(mul_tuple(u, v, kv, mv) for u in lf.tuples for v in lf.tuples)
    return lf._cache[key]


def entropy_XY(lf: LiftedFamily, budget: int = PAIR_BUDGET) -> float:
    return count_entropy(product_counts(lf, budget).values())


def chain_terms(lf: LiftedFamily) -> list[float]:
    """H(X_i | X_<i) for i = 1..n, by counting prefixes."""
    out = []
    for i in range(1, lf.n + 1):
        joint = Counter(t[:i] for t in lf.tuples)
        cond = Counter(t[: i - 1] for t in lf.tuples)
        out.append(_conditional(joint, cond))
    return out


def cond_entropy_product(lf: LiftedFamily, i: int, budget: int = PAIR_BUDGET) -> float:
    """H(X_i Y_i | X_<i, Y_<i) over ordered pairs of independent uniform tuples."""
    _check_pairs(lf, budget)
    k, m = lf.params(i)
    # group tuples by (prefix, symbol); pairs of groups carry product counts
    groups = Counter((t[: i - 1], t[i - 1]) for t in lf.tuples)
    joint: Counter = Counter()
    cond: Counter = Counter()
    for (pa, sa), ca in groups.items():
        for (pb, sb), cb in groups.items():
            prod = mul_tuple((sa,), (sb,), (k,), (m,))[0]
            joint[(pa, pb, prod)] += ca * cb
            cond[(pa, pb)] += ca * cb
    return _conditional(joint, cond)


def cond_entropy_product_chain(lf: LiftedFamily, i: int, budget: int = PAIR_BUDGET) -> float:
    """H(X_i Y_i | X_1 Y_1, ..., X_{i-1} Y_{i-1}), conditioning only on the products."""
    counts = product_counts(lf, budget)
    joint: Counter = Counter()
    cond: Counter = Counter()
    for w, c in counts.items():
        joint[w[:i]] += c
        cond[w[: i - 1]] += c
    return _conditional(joint, cond)


# -- closed-form sides -------------------------------------------------------


def hf_sum(lf: LiftedFamily, i: int) -> float:
    k, m = lf.params(i)
    rows = zero_profile(lf, i)
    ps = np.array([float(r.prob) for r in rows])
    qs = np.array([float(r.zero_prob) for r in rows])
    return math.fsum(ps * np.atleast_1d(h(k, m, qs)))


def hfmin_sum(lf: LiftedFamily, i: int) -> float:
    k, m = lf.params(i)
    rows = zero_profile(lf, i)
    ps = np.array([float(r.prob) for r in rows])
    qs = np.array([float(r.zero_prob) for r in rows])
    G = np.atleast_2d(g(k, m, qs[:, None], qs[None, :]))
    return math.fsum((np.outer(ps, ps) * G).ravel())


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    """lhs versus rhs; identities pass when |lhs - rhs| < tol, inequalities when lhs <= rhs + tol."""

    instance: str
    i: int | None
    lhs: float
    rhs: float
    residual: float
    passed: bool
    check: str = ""

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "i": self.i,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "pass": self.passed,
        }


def describe(lf: LiftedFamily) -> str:
    w = lf.weights
    return f"n={lf.n} sets={lf.base.to_lists()} k={list(w.kvec)} m={list(w.mvec)}"


def _identity(lf, i, lhs, rhs, check, tol) -> ResidualReport:
    r = abs(lhs - rhs)
    return ResidualReport(describe(lf), i, lhs, rhs, r, r < tol, check)


def _inequality(lf, i, lhs, rhs, check, tol) -> ResidualReport:
    r = lhs - rhs
    return ResidualReport(describe(lf), i, lhs, rhs, r, r <= tol, check)


def verify_basic_inequality(lf: LiftedFamily, tol: float = TOL, budget: int = PAIR_BUDGET) -> ResidualReport:
    """H(X_1 Y_1, ..., X_n Y_n) <= H(X_1, ..., X_n)."""
    return _inequality(lf, None, entropy_XY(lf, budget), entropy_X(lf), "basic", tol)


def verify_chain_rule(lf: LiftedFamily, tol: float = TOL) -> ResidualReport:
    return _identity(lf, None, math.fsum(chain_terms(lf)), entropy_X(lf), "chain", tol)


def verify_hf(lf: LiftedFamily, i: int, tol: float = TOL) -> ResidualReport:
    return _identity(lf, i, chain_terms(lf)[i - 1], hf_sum(lf, i), "hf", tol)


def verify_hfmin(lf: LiftedFamily, i: int, tol: float = TOL, budget: int = PAIR_BUDGET) -> ResidualReport:
    return _identity(lf, i, cond_entropy_product(lf, i, budget), hfmin_sum(lf, i), "hfmin", tol)


def verify_difference_identity(
    lf: LiftedFamily, i: int, tol: float = TOL, budget: int = PAIR_BUDGET
) -> ResidualReport:
    lhs = cond_entropy_product(lf, i, budget) - chain_terms(lf)[i - 1]
    k, m = lf.params(i)
    return _identity(lf, i, lhs, F(FunctionalParams(k, m), mu_i(lf, i)), "diff", tol)


def verify_chain_inequality(
    lf: LiftedFamily, i: int, tol: float = TOL, budget: int = PAIR_BUDGET
) -> ResidualReport:
    """Conditioning on both prefixes gives no more entropy than conditioning on their product."""
    lhs = cond_entropy_product(lf, i, budget)
    rhs = cond_entropy_product_chain(lf, i, budget)
    return _inequality(lf, i, lhs, rhs, "chain2", tol)


CHECKS = ("hf", "hfmin", "diff", "basic", "chain", "chain2")


def verify_all(
    lf: LiftedFamily, which: Sequence[str] = CHECKS, tol: float = TOL, budget: int = PAIR_BUDGET
) -> list[ResidualReport]:
    unknown = set(which) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    out = []
    if "basic" in which:
        out.append(verify_basic_inequality(lf, tol, budget))
    if "chain" in which:
        out.append(verify_chain_rule(lf, tol))
    per_coord = {
        "hf": lambda i: verify_hf(lf, i, tol),
        "hfmin": lambda i: verify_hfmin(lf, i, tol, budget),
        "diff": lambda i: verify_difference_identity(lf, i, tol, budget),
        "chain2": lambda i: verify_chain_inequality(lf, i, tol, budget),
    }
    for name in CHECKS:
        if name in which and name in per_coord:
            out.extend(per_coord[name](i) for i in range(1, lf.n + 1))
    return out
