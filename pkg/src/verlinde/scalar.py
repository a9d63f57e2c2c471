"""Exact phases, guarded trigonometry and deterministic spectral sampling.

Everything here is pure and stateless; all tolerances are explicit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Union

from .errors import ExceptionalPoint, NotNearInteger

#: golden-ratio increment of the additive low-discrepancy sequence
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances: integer rounding, limit agreement, exceptional-set distance."""

    eps_round: float = 1e-6
    eps_limit: float = 1e-8
    eps_exclusion: float = 1e-9

    def __post_init__(self):
        if min(self.eps_round, self.eps_limit, self.eps_exclusion) <= 0.0:
            raise ValueError("all tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class RationalPhase:
    """The unit complex number exp(i*pi*q) for an exact rational exponent q.

    Exponents are reduced modulo 2, so equal phases compare equal.  Products
    and powers stay exact; `value()` converts to a complex float at the end.
    """

    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q) % 2)

    @property
    def numerator(self) -> int:
        return self.q.numerator

    @property
    def denominator(self) -> int:
        return self.q.denominator

    def __mul__(self, other: "RationalPhase") -> "RationalPhase":
        return RationalPhase(self.q + other.q)

    def __truediv__(self, other: "RationalPhase") -> "RationalPhase":
        return RationalPhase(self.q - other.q)

    def __pow__(self, n: int) -> "RationalPhase":
        return RationalPhase(self.q * n)

    def conjugate(self) -> "RationalPhase":
        return RationalPhase(-self.q)

    def value(self) -> complex:
        # quarter turns are exact; everything else goes through exp
        if self.q.denominator == 1:
            return 1.0 + 0.0j if self.q.numerator % 2 == 0 else -1.0 + 0.0j
        if self.q.denominator == 2:
            return 1.0j if self.q.numerator % 4 == 1 else -1.0j
        return cmath.exp(1j * math.pi * float(self.q))


def phase(q) -> complex:
    """exp(i*pi*q) for rational q, exact on quarter turns."""
    return RationalPhase(Fraction(q)).value()


def trig_quotient(s: int, x: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """sin(pi*s*x)/sin(pi*x), the degree-(s-1) Chebyshev character of the second kind.

    Raises ExceptionalPoint when the denominator vanishes within tolerance.
    """
    if s < 1:
        raise ValueError("s must be a positive integer")
    den = math.sin(math.pi * x)
    if abs(den) < tol.eps_exclusion:
        raise ExceptionalPoint(f"sin(pi*x) vanishes at x={x!r}")
    return math.sin(math.pi * s * x) / den


def round_to_integer(x, tol: Tolerance = DEFAULT_TOL) -> int:
    """Nearest integer to x, provided x is within eps_round of one."""
    z = complex(x)
    n = round(z.real)
    dist = abs(z - n)
    if dist >= tol.eps_round:
        raise NotNearInteger(z, dist)
    return int(n)


def low_discrepancy(seed: int) -> Iterator[float]:
    """Additive golden-ratio sequence in (0,1), deterministic in the seed."""
    u = (seed * GOLDEN + 0.5) % 1.0
    while True:
        u = (u + GOLDEN) % 1.0
        yield u


def lattice_distance(x: float, step: float) -> float:
    """Distance from x to the lattice step*Z."""
    d = x % step
    return min(d, step - d)


def sample_reals(
    n: int,
    seed: int,
    *,
    lo: float,
    hi: float,
    exclusion: Callable[[float], float] | None = None,
    margin: float = 0.02,
) -> list[float]:
    """n low-discrepancy reals in (lo,hi) with exclusion(x) > margin.

    `exclusion` returns the distance from x to the exceptional set.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out: list[float] = []
    gen = low_discrepancy(seed)
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 1000 * (n + 10):
            raise ExceptionalPoint("exclusion zone rejects almost every sample")
        x = lo + (hi - lo) * next(gen)
        if exclusion is not None and exclusion(x) <= margin:
            continue
        out.append(x)
    return out


@dataclass(frozen=True)
class RealPoint:
    """Spectral point of a theory whose kernels are functions of one real weight."""

    mu: float


@dataclass(frozen=True)
class Sl2Point:
    """Spectral point (l', lam', r', s') labelling a standard sl2 module."""

    ell: int
    lam: float
    r: int
    s: int


SpectralPoint = Union[RealPoint, Sl2Point]


def sample_points(theory, n: int, seed: int, tol: Tolerance = DEFAULT_TOL):
    """Deterministic spectral samples avoiding the theory's exceptional set.

    Delegates to the theory, which knows its own exceptional set; identical
    (theory, n, seed) always yields the identical sequence.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return theory.sample_points(n, seed, tol)
