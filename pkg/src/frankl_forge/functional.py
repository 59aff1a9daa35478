"""The entropy-difference functional F_{k,m} on finitely supported measures on [0, 1].

``h`` and ``g`` are the per-prefix conditional entropies of one coordinate of
the lifted family (single copy and product of two independent copies), written
as functions of the conditional probability of the zero symbol. ``F`` averages
them over a measure. All logs are natural.

``h`` and ``g`` accept numpy arrays and broadcast; scalar inputs give floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import DomainError
from .families import SetFamily, popcount

LOG_SLACK = 1e-12
MASS_TOL = 1e-12


def _xlogx(v):
    """v log v with 0 log 0 = 0; arguments in [-LOG_SLACK, 0] count as 0."""
    v = np.asarray(v, dtype=float)
    if np.any(v < -LOG_SLACK):
        raise DomainError(f"log argument {float(np.min(v)):.3e} is negative")
    pos = v > 0
    safe = np.where(pos, v, 1.0)
    return np.where(pos, safe * np.log(safe), 0.0)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _check_prob(k: int, t, name: str) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < -LOG_SLACK) or np.any(t > 1.0 / k + LOG_SLACK):
        raise DomainError(f"{name} must lie in [0, 1/{k}]")
    return np.clip(t, 0.0, 1.0 / k)


def _check_km(k: int, m: int) -> None:
    if int(k) != k or int(m) != m or k < 1 or m < 1:
        raise DomainError(f"k and m must be positive integers, got k={k}, m={m}")


def h(k: int, m: int, t):
    """Conditional entropy of one coordinate given P[zero] = t, t in [0, 1/k]."""
    _check_km(k, m)
    t = _check_prob(k, t, "t")
    rest = 1.0 - k * t
    return _out(-k * _xlogx(t) - _xlogx(rest) + rest * math.log(m))


def g(k: int, m: int, x, y):
    """Entropy of the product of two independent coordinates with P[zero] = x and y."""
    _check_km(k, m)
    x = _check_prob(k, x, "x")
    y = _check_prob(k, y, "y")
    x, y = np.broadcast_arrays(x, y)
    c = k * (k - 1) / 2 - 1
    unit = (1.0 - k * x) * (1.0 - k * y)
    xy = x * y
    out = -_xlogx(unit) - _xlogx(x + y + c * xy) + unit * math.log(m)
    if k > 1:
        coef = 2 * k - np.arange(1, k) + 1
        levels = (x + y)[..., None] - coef * xy[..., None]
        out = out - _xlogx(levels).sum(axis=-1)
    return _out(out)


@dataclass(frozen=True)
class FunctionalParams:
    k: int
    m: int

    def __post_init__(self):
        _check_km(self.k, self.m)

    @property
    def in_theorem_regime(self) -> bool:
        return self.k >= 5 and self.m * self.m <= self.k

    @property
    def concavity_proved(self) -> bool:
        return self.k >= 3


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on [0, 1].

    Atoms are sorted by location; coincident locations are merged and
    zero masses dropped on construction.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        merged: dict[float, float] = {}
        for x, p in self.atoms:
            x, p = float(x), float(p)
            if not (0.0 <= x <= 1.0):
                raise DomainError(f"atom location {x} outside [0, 1]")
            if p < 0:
                raise DomainError(f"negative mass {p}")
            if p > 0:
                merged[x] = merged.get(x, 0.0) + p
        if not merged:
            raise DomainError("measure has no mass")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > MASS_TOL:
            raise DomainError(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    @classmethod
    def from_atoms(cls, xs: Iterable[float], ps: Iterable[float]) -> "DiscreteMeasure":
        return cls(tuple(zip(xs, ps)))

    @classmethod
    def dirac(cls, x: float) -> "DiscreteMeasure":
        return cls(((x, 1.0),))

    @property
    def locations(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms])

    @property
    def masses(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    def mean(self) -> float:
        return math.fsum(x * p for x, p in self.atoms)

    def mix(self, other: "DiscreteMeasure", lam: float) -> "DiscreteMeasure":
        """lam * self + (1 - lam) * other."""
        if not (0.0 <= lam <= 1.0):
            raise DomainError("mixing weight must lie in [0, 1]")
        atoms = [(x, lam * p) for x, p in self.atoms] + [(x, (1 - lam) * p) for x, p in other.atoms]
        return DiscreteMeasure(tuple(atoms))

    def to_dict(self) -> dict:
        return {"atoms": [[x, p] for x, p in self.atoms]}


def F(params: FunctionalParams, mu: DiscreteMeasure) -> float:
    k, m = params.k, params.m
    xs = mu.locations / k
    ps = mu.masses
    G = np.atleast_2d(g(k, m, xs[:, None], xs[None, :]))
    H = np.atleast_1d(h(k, m, xs))
    return math.fsum((np.outer(ps, ps) * G).ravel()) - math.fsum(ps * H)


def two_point_F(params: FunctionalParams, x1, p1, x2, p2):
    """F of p1 delta_{x1} + p2 delta_{x2}, vectorized over array arguments.

    Masses are taken as given (p1 + p2 = 1 is the caller's job), so the same
    formula covers the degenerate cases x1 = x2 or a zero mass.
    """
    k, m = params.k, params.m
    x1 = np.asarray(x1, dtype=float) / k
    x2 = np.asarray(x2, dtype=float) / k
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    val = (
        p1 * p1 * g(k, m, x1, x1)
        + 2 * p1 * p2 * g(k, m, x1, x2)
        + p2 * p2 * g(k, m, x2, x2)
        - p1 * h(k, m, x1)
        - p2 * h(k, m, x2)
    )
    return _out(val)


# -- measure classes ---------------------------------------------------------


def _check_phi(phi: float) -> None:
    if not (0.0 < phi < 1.0):
        raise DomainError(f"phi must lie in (0, 1), got {phi}")


def _type2_x(phi: float, x: float) -> float:
    """Validate phi <= x <= 1 up to LOG_SLACK and clamp."""
    _check_phi(phi)
    if not (phi - LOG_SLACK <= x <= 1.0 + LOG_SLACK):
        raise DomainError(f"type II needs phi <= x <= 1, got x={x}")
    return min(max(x, phi), 1.0)


def _type3_x(phi: float, x: float) -> float:
    """Validate 0 <= x <= phi up to LOG_SLACK and clamp."""
    _check_phi(phi)
    if not (-LOG_SLACK <= x <= phi + LOG_SLACK):
        raise DomainError(f"type III needs 0 <= x <= phi, got x={x}")
    return min(max(x, 0.0), phi)


def type2_measure(phi: float, x: float) -> DiscreteMeasure:
    """(1 - phi/x) delta_0 + (phi/x) delta_x."""
    x = _type2_x(phi, x)
    p = phi / x
    return DiscreteMeasure(((0.0, 1.0 - p), (x, p)))


def type3_measure(phi: float, x: float) -> DiscreteMeasure:
    """((phi - x)/(1 - x)) delta_1 + ((1 - phi)/(1 - x)) delta_x."""
    x = _type3_x(phi, x)
    return DiscreteMeasure(((1.0, (phi - x) / (1.0 - x)), (x, (1.0 - phi) / (1.0 - x))))


def F_type2(params: FunctionalParams, phi: float, x: float) -> float:
    x = _type2_x(phi, x)
    p = phi / x
    return two_point_F(params, 0.0, 1.0 - p, x, p)


def F_type3(params: FunctionalParams, phi: float, x: float) -> float:
    x = _type3_x(phi, x)
    return two_point_F(params, 1.0, (phi - x) / (1.0 - x), x, (1.0 - phi) / (1.0 - x))


def _ylogy(v: float) -> float:
    return float(_xlogx(v))


def F_type1(params: FunctionalParams, phi: float) -> float:
    """F(delta_phi) from its expanded closed form (independent of ``g``/``h``)."""
    if not (0.0 <= phi <= 1.0):
        raise DomainError(f"phi must lie in [0, 1], got {phi}")
    k, m = params.k, params.m
    c = k * (k - 1) / 2 - 1
    terms = [
        -_ylogy((1 - phi) ** 2),
        -_ylogy(2 * phi / k + c * phi**2 / k**2),
    ]
    terms += [-_ylogy(2 * phi / k - (2 * k - j + 1) * phi**2 / k**2) for j in range(1, k)]
    terms += [
        phi * math.log(phi / k) if phi > 0 else 0.0,
        _ylogy(1 - phi),
        -phi * (1 - phi) * math.log(m),
    ]
    return math.fsum(terms)


def F_type2_expanded(params: FunctionalParams, phi: float, x: float) -> float:
    """Type II value from its expanded closed form; cross-check for ``F_type2``."""
    x = _type2_x(phi, x)
    k, m = params.k, params.m
    c = k * (k - 1) / 2 - 1
    r = phi / x
    inner = [_ylogy((1 - x) ** 2), _ylogy(2 * x / k + c * x**2 / k**2)]
    inner += [_ylogy(2 * x / k - (2 * k - j + 1) * x**2 / k**2) for j in range(1, k)]
    single = x * math.log(x / k) + _ylogy(1 - x)
    return math.fsum([-r * r * math.fsum(inner), -r * (1 - 2 * r) * single, -phi * (1 - phi) * math.log(m)])


def F_type2_at_one(params: FunctionalParams, phi: float) -> float:
    """Closed form of F((1 - phi) delta_0 + phi delta_1)."""
    k, m = params.k, params.m
    c = k * (k - 1) / 2 - 1
    inner = [_ylogy(2 / k + c / k**2)]
    inner += [_ylogy(2 / k - (2 * k - j + 1) / k**2) for j in range(1, k)]
    return math.fsum([
        -phi * phi * math.fsum(inner),
        phi * (1 - 2 * phi) * math.log(k),
        -phi * (1 - phi) * math.log(m),
    ])


def _xlog(x: float, y: float) -> float:
    """x * log(y), taken as 0 when x == 0."""
    return 0.0 if x == 0 else x * math.log(y)


def _type3_common(k: int, x: float, phi: float) -> tuple[float, float, list[float]]:
    # Terms shared by the expanded type III value and its lower bound B.
    c = k * (k - 1) / 2 - 1
    L = math.log(k)
    P = (phi - x) / (1 - x)
    Q = (1 - phi) / (1 - x)
    terms = [
        -2 * P * Q * (_ylogy(x / k + 1 / k + c * x / k**2) + L * (k - 1) * (k * (x - 2) + 2 * x) / (2 * k**2)),
        2 * P * Q * (1 / k) * _ylogy(1 - x / k),
        -Q * Q * (
            _ylogy((1 - x) ** 2)
            + _ylogy(2 * x / k + c * x**2 / k**2)
            + L * x * (k - 1) * (2 * x + k * (3 * x - 4)) / (2 * k**2)
        ),
        Q * Q * _xlog(x * (x + k * (3 * x - 4)) / (2 * k), x),
        (1 / k) * Q * Q * _ylogy(2 * x - (k + 1) * x**2 / k),
        -P * P * (_ylogy(2 / k + c / k**2) - L * (k - 1) * (k - 2) / (2 * k**2)),
        P * P * (1 / k) * _ylogy((k - 1) / k),
        Q * (_xlog(x, x / k) + _ylogy(1 - x)),
        -P * L,
    ]
    return P, Q, terms


def F_type3_expanded(params: FunctionalParams, phi: float, x: float) -> float:
    """Type III value from its expanded closed form; cross-check for ``F_type3``."""
    x = _type3_x(phi, x)
    k, m = params.k, params.m
    P, Q, terms = _type3_common(k, x, phi)
    js = range(k)
    terms.append(-2 * P * Q * math.fsum(_ylogy(1 - (1 - j / k) * x) / k for j in js))
    terms.append(-Q * Q * math.fsum(_xlog(2 * x - (2 - j / k) * x * x, 2 - (2 - j / k) * x) / k for j in js))
    terms.append(-P * P * math.fsum(_ylogy(j / k) / k for j in js))
    terms.append(-phi * (1 - phi) * math.log(m))
    return math.fsum(terms)


def B_lower_bound(k: int, x: float, phi: float) -> float:
    """Closed-form lower bound for the type III value, valid for every m <= sqrt(k).

    The Riemann sums of the exact value are replaced by integrals, one
    nonnegative sum is dropped and the m-dependence is fixed at m = sqrt(k).
    """
    _check_km(k, 1)
    x = _type3_x(phi, x)
    P, Q, terms = _type3_common(k, x, phi)
    if x == 0:
        tail = 0.0
    else:
        tail = -2 + x - 2 * (1 - x) ** 2 * math.log1p(-x) / x
    terms.append(-0.5 * P * Q * tail)
    terms.append(
        -0.25 * Q * Q * (x * (3 * x - 4) - 8 * (1 - x) ** 2 * math.log(2 * (1 - x)) + 2 * (2 - x) * _ylogy(2 - x))
    )
    terms.append(-0.5 * phi * (1 - phi) * math.log(k))
    return math.fsum(terms)


def boltzmann_expected_energy(f: SetFamily, t) -> float:
    """Mean set size under the Boltzmann weights t^|A|."""
    if isinstance(t, (int, Fraction)):
        t = Fraction(t)
        num = sum((popcount(a) * t ** popcount(a) for a in f.sets), Fraction(0))
        den = sum((t ** popcount(a) for a in f.sets), Fraction(0))
        return float(num / den)
    t = float(t)
    if not (0.0 < t):
        raise DomainError("t must be positive")
    sizes = np.array([popcount(a) for a in f.sets], dtype=float)
    # shift by the minimal size so small t does not underflow
    w = t ** (sizes - sizes.min())
    return float(np.dot(sizes, w) / w.sum())
