"""Semisimple Verlinde data: Virasoro minimal series, Heisenberg Fock kernels, Pi(0).

The minimal-model layer is finite (S-matrix, closed fusion window, Verlinde
sums over canonical labels); the Heisenberg and Pi(0) layers are continuous
families of multiplicative characters.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import SingularMatrix
from .labels import GrothendieckVector, MinimalLabel, PiLabel, canonicalize, kac_window_check
from .scalar import DEFAULT_TOL, Tolerance, low_discrepancy, round_to_integer

# ---------------------------------------------------------------------------
# Virasoro minimal series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimalModelTheory:
    """Minimal Virasoro series at level k = -2 + u/v, coprime u,v >= 2."""

    u: int
    v: int

    def __post_init__(self):
        if self.u < 2 or self.v < 2:
            raise ValueError("u and v must be >= 2")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError("u and v must be coprime")

    @property
    def level(self) -> Fraction:
        return Fraction(self.u, self.v) - 2

    @property
    def central_charge(self) -> Fraction:
        # c = 13 - 6/(k+2) - 6(k+2) with k+2 = u/v
        return Fraction(13) - 6 * Fraction(self.v, self.u) - 6 * Fraction(self.u, self.v)

    def labels(self) -> list[MinimalLabel]:
        """Canonical labels, one per isomorphism class, sorted."""
        return _canonical_labels(self.u, self.v)

    def vacuum(self) -> MinimalLabel:
        return canonicalize(MinimalLabel(1, 1), self)

    def qdim(self, a: MinimalLabel, rho: MinimalLabel) -> float:
        """Normalized S-ratio S_{a,rho}/S_{vac,rho}."""
        return vir_S(self, a, rho) / vir_S(self, self.vacuum(), rho)


@lru_cache(maxsize=None)
def _canonical_labels(u: int, v: int) -> list[MinimalLabel]:
    theory = MinimalModelTheory(u, v)
    found = {canonicalize(MinimalLabel(r, s), theory) for r in range(1, u) for s in range(1, v)}
    return sorted(found)


def vir_S(theory: MinimalModelTheory, a: MinimalLabel, b: MinimalLabel) -> float:
    """S-matrix entry -2 sqrt(2/uv) (-1)^{rs'+r's} sin(pi v r r'/u) sin(pi u s s'/v)."""
    u, v = theory.u, theory.v
    kac_window_check(u, v, a.r, a.s)
    kac_window_check(u, v, b.r, b.s)
    sign = -1.0 if (a.r * b.s + b.r * a.s) % 2 else 1.0
    return (
        -2.0 * math.sqrt(2.0 / (u * v)) * sign
        * math.sin(math.pi * v * a.r * b.r / u)
        * math.sin(math.pi * u * a.s * b.s / v)
    )


@lru_cache(maxsize=None)
def vir_S_matrix(theory: MinimalModelTheory) -> np.ndarray:
    """S-matrix over canonical labels, row/column order matching theory.labels()."""
    labels = theory.labels()
    n = len(labels)
    S = np.empty((n, n))
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            S[i, j] = vir_S(theory, a, b)
    return S


def fusion_window(w: int, t: int, t2: int, t3: int) -> int:
    """The 0/1 window coefficient at weight w: |t-t2|+1 <= t3 <= min(t+t2-1, 2w-t-t2-1), odd sum."""
    if (t + t2 + t3) % 2 == 0:
        return 0
    return 1 if abs(t - t2) + 1 <= t3 <= min(t + t2 - 1, 2 * w - t - t2 - 1) else 0


def vir_fusion_closed(theory: MinimalModelTheory, a: MinimalLabel, b: MinimalLabel,
                      c: MinimalLabel) -> int:
    """Closed-form fusion coefficient N_{ab}^c, folded onto the class of c."""
    u, v = theory.u, theory.v
    a = canonicalize(a, theory)
    b = canonicalize(b, theory)
    c = canonicalize(c, theory)
    total = 0
    for (rc, sc) in ((c.r, c.s), (u - c.r, v - c.s)):
        total += fusion_window(u, a.r, b.r, rc) * fusion_window(v, a.s, b.s, sc)
    return total


def vir_fusion_product(theory: MinimalModelTheory, a: MinimalLabel,
                       b: MinimalLabel) -> GrothendieckVector:
    """Fusion product of two classes as a Grothendieck vector over canonical labels."""
    return GrothendieckVector(
        (c, vir_fusion_closed(theory, a, b, c)) for c in theory.labels()
    )


def vir_fusion_verlinde(theory: MinimalModelTheory, a: MinimalLabel, b: MinimalLabel,
                        c: MinimalLabel, tol: Tolerance = DEFAULT_TOL) -> int:
    """Verlinde sum over canonical labels, rounded; must equal the closed form."""
    labels = theory.labels()
    idx = {lab: i for i, lab in enumerate(labels)}
    S = vir_S_matrix(theory)
    ia = idx[canonicalize(a, theory)]
    ib = idx[canonicalize(b, theory)]
    ic = idx[canonicalize(c, theory)]
    i0 = idx[theory.vacuum()]
    total = float(np.sum(S[ia] * S[ib] * S[ic] / S[i0]))
    return round_to_integer(total, tol)


def vir_fusion_tensor_closed(theory: MinimalModelTheory) -> np.ndarray:
    """Integer tensor N[a,b,c] from the closed window formula."""
    labels = theory.labels()
    n = len(labels)
    N = np.zeros((n, n, n), dtype=int)
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            for k, c in enumerate(labels):
                N[i, j, k] = vir_fusion_closed(theory, a, b, c)
    return N


def vir_fusion_tensor_verlinde(theory: MinimalModelTheory) -> np.ndarray:
    """Float tensor of Verlinde sums, before rounding."""
    S = vir_S_matrix(theory)
    i0 = theory.labels().index(theory.vacuum())
    return np.einsum("al,bl,cl->abc", S, S, S / S[i0])


# ---------------------------------------------------------------------------
# Heisenberg Fock layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeisenbergTheory:
    """Rank-n Heisenberg theory with symmetric Gram matrix M and shift vector b."""

    gram: tuple[tuple[float, ...], ...]
    shift: tuple[float, ...] = ()

    def __post_init__(self):
        gram = tuple(tuple(float(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if any(len(row) != n for row in gram):
            raise ValueError("gram matrix must be square")
        if any(abs(gram[i][j] - gram[j][i]) > 1e-12 for i in range(n) for j in range(n)):
            raise ValueError("gram matrix must be symmetric")
        shift = tuple(float(x) for x in self.shift) if self.shift else (0.0,) * n
        if len(shift) != n:
            raise ValueError("shift vector length must match the rank")
        object.__setattr__(self, "shift", shift)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def central_charge(self) -> float:
        b = np.asarray(self.shift)
        return self.rank - 12.0 * float(b @ self.gram_inverse() @ b)

    def matrix(self) -> np.ndarray:
        return np.asarray(self.gram)

    def gram_inverse(self) -> np.ndarray:
        return _gram_inverse(self.gram)

    def sample_weights(self, n: int, seed: int) -> list[tuple[float, ...]]:
        """Deterministic real weight vectors in (0,1)^rank."""
        gen = low_discrepancy(seed)
        return [tuple(next(gen) for _ in range(self.rank)) for _ in range(n)]


@lru_cache(maxsize=None)
def _gram_inverse(gram: tuple[tuple[float, ...], ...]) -> np.ndarray:
    m = np.asarray(gram)
    det = np.linalg.det(m)
    if abs(det) < 1e-12:
        raise SingularMatrix(f"det M = {det:.3e}")
    return np.linalg.inv(m)


def _vec(x, rank: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.shape != (rank,):
        raise ValueError(f"expected a weight vector of length {rank}")
    return v


def heis_S_kernel(theory: HeisenbergTheory, lam, mu) -> complex:
    """S-kernel exp(-2 pi i (lam+b, M^{-1}(mu+b))) / sqrt(det M)."""
    minv = theory.gram_inverse()
    b = np.asarray(theory.shift)
    lam = _vec(lam, theory.rank)
    mu = _vec(mu, theory.rank)
    det = np.linalg.det(theory.matrix())
    return cmath.exp(-2j * math.pi * float((lam + b) @ minv @ (mu + b))) / cmath.sqrt(det)


def heis_qdim(theory: HeisenbergTheory, lam, rho) -> complex:
    """Quantum dimension exp(-2 pi i (lam, M^{-1}(rho+b))) = S_{lam,rho}/S_{0,rho}."""
    minv = theory.gram_inverse()
    b = np.asarray(theory.shift)
    lam = _vec(lam, theory.rank)
    rho = _vec(rho, theory.rank)
    return cmath.exp(-2j * math.pi * float(lam @ minv @ (rho + b)))


def heis_fusion(lam, mu) -> tuple[float, ...]:
    """Fock fusion is additive on weights."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    return tuple(float(x) for x in lam + mu)


# ---------------------------------------------------------------------------
# Pi(0) layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiTheory:
    """Pi(0) theory at level k = -2 + u/v with coprime u,v >= 2."""

    u: int
    v: int

    def __post_init__(self):
        if self.u < 2 or self.v < 2:
            raise ValueError("u and v must be >= 2")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError("u and v must be coprime")

    @property
    def level(self) -> Fraction:
        return Fraction(self.u, self.v) - 2

    def sample_labels(self, n: int, seed: int) -> list[PiLabel]:
        """Deterministic Pi-labels with small spectral flow and generic weight."""
        flows = [0, 1, -1, 2, -2, 3, -3]
        gen = low_discrepancy(seed)
        return [PiLabel(flows[i % len(flows)], next(gen)) for i in range(n)]


def pi0_S_kernel(theory: PiTheory, x: PiLabel, y: PiLabel) -> complex:
    """S-kernel exp(-i pi (k l l' - k + 2 lam'(l+1) + 2 lam(l'+1))).

    The overall phase convention is only meaningful at the level of quantum
    dimensions (ratios), which is what every check here consumes.
    """
    k = float(theory.level)
    expo = k * x.ell * y.ell - k + 2 * y.lam * (x.ell + 1) + 2 * x.lam * (y.ell + 1)
    return cmath.exp(-1j * math.pi * expo)


def pi0_qdim(theory: PiTheory, x: PiLabel, y: PiLabel) -> complex:
    """Quantum dimension exp(-i pi (k l l' + 2 lam' l + 2 lam(l'+1)))."""
    k = float(theory.level)
    expo = k * x.ell * y.ell + 2 * y.lam * x.ell + 2 * x.lam * (y.ell + 1)
    return cmath.exp(-1j * math.pi * expo)


def pi0_fusion(x: PiLabel, y: PiLabel) -> PiLabel:
    """Componentwise addition, weight reduced mod 1."""
    return PiLabel(x.ell + y.ell, (x.lam + y.lam) % 1.0)
