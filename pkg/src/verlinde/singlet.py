"""The singlet theory at integer p >= 2: exact sequences, resolutions, qdims, fusion.

Atypical Fock modules F_{r,s} sit in short exact sequences with the simple
modules M_{r,s}; splicing those gives the 2-periodic standard resolution of
M_{r,s} whose closed form and double limit reproduce the trigonometric
quantum dimensions.  Fusion products are decomposed by sampling quantum
dimensions and solving an integer linear system.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
import numpy as np

from .errors import ExceptionalPoint, IllConditioned, IncompleteBasis, OutOfRange
from .labels import (GrothendieckVector, SingletAtom, SingletFbar, SingletFock,
                     SingletFockRS, canonicalize, render_label, singlet_alpha_rs)
from .resolution import PeriodicResolution, StandardTerm, closed_form
from .scalar import (DEFAULT_TOL, RealPoint, Tolerance, lattice_distance,
                     round_to_integer, sample_reals)

FockLike = SingletFock | SingletFockRS


@dataclass(frozen=True)
class SingletTheory:
    """Singlet theory parameterized by p >= 2; alpha+ = sqrt(2p), alpha- = -sqrt(2/p)."""

    p: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be >= 2")

    @property
    def alpha_plus(self) -> float:
        return math.sqrt(2 * self.p)

    @property
    def alpha_minus(self) -> float:
        return -math.sqrt(2 / self.p)

    @property
    def alpha_zero(self) -> float:
        return self.alpha_plus + self.alpha_minus

    def alpha_rs(self, r: int, s: int) -> float:
        return singlet_alpha_rs(self.p, r, s)

    def fock_weight(self, label: FockLike) -> float:
        if isinstance(label, SingletFockRS):
            return self.alpha_rs(label.r, label.s)
        return label.lam

    def rho(self, label: FockLike) -> float:
        """Grading of a standard label: alpha+ * weight; integer on F_{r,s}."""
        if isinstance(label, SingletFockRS):
            return float(label.s - 1 - self.p * (label.r - 1))
        return self.alpha_plus * label.lam

    def vacuum(self) -> SingletAtom:
        return SingletAtom(1, 1)

    def exclusion_distance(self, mu: float) -> float:
        """Distance from mu to the exceptional set (1/alpha+) Z."""
        return lattice_distance(mu, 1.0 / self.alpha_plus)

    def sample_points(self, n: int, seed: int, tol: Tolerance = DEFAULT_TOL,
                      margin: float = 0.02) -> list[RealPoint]:
        """mu samples in (0.05, 0.95) kept clear of the exceptional set."""
        margin = max(margin, tol.eps_exclusion)
        mus = sample_reals(n, seed, lo=0.05, hi=0.95,
                           exclusion=self.exclusion_distance, margin=margin)
        return [RealPoint(mu) for mu in mus]


def _check_s(theory: SingletTheory, s: int) -> None:
    if not 1 <= s <= theory.p - 1:
        raise OutOfRange(f"s={s} outside 1..{theory.p - 1}")


# ---------------------------------------------------------------------------
# exact sequences and resolutions
# ---------------------------------------------------------------------------

def ses_F(theory: SingletTheory, r: int, s: int) -> tuple[SingletAtom, SingletFockRS, SingletAtom]:
    """0 -> M_{r-1,p-s} -> F_{r-1,p-s} -> M_{r,s} -> 0."""
    _check_s(theory, s)
    return (SingletAtom(r - 1, theory.p - s), SingletFockRS(r - 1, theory.p - s), SingletAtom(r, s))


def ses_Fbar(theory: SingletTheory, r: int, s: int) -> tuple[SingletAtom, SingletFbar, SingletAtom]:
    """0 -> M_{r,s} -> Fbar_{r,s} -> M_{r-1,p-s} -> 0."""
    _check_s(theory, s)
    return (SingletAtom(r, s), SingletFbar(r, s), SingletAtom(r - 1, theory.p - s))


def _make_shift(p: int):
    # one period moves two steps down the splice: r -> r-2, weight -> weight + alpha+
    def shift(label: FockLike, j: int) -> FockLike:
        if isinstance(label, SingletFockRS):
            return SingletFockRS(label.r - 2 * j, label.s)
        if isinstance(label, SingletFock):
            return SingletFock(label.lam + j * math.sqrt(2 * p))
        raise TypeError(f"cannot shift {label!r}")
    return shift


def resolution_of_M(theory: SingletTheory, r: int, s: int) -> PeriodicResolution:
    """2-periodic standard resolution ... -> F_{r-2,s} -> F_{r-1,p-s} -> M_{r,s} -> 0."""
    _check_s(theory, s)
    p = theory.p
    slot0 = SingletFockRS(r - 1, p - s)
    slot1 = SingletFockRS(r - 2, s)
    base = theory.rho(slot0)
    block = (
        (StandardTerm(slot0, 0),),
        (StandardTerm(slot1, int(theory.rho(slot1) - base)),),
    )
    return PeriodicResolution(
        block=block,
        z_shift=2 * p,
        period_shift=_make_shift(p),
        base_degree=base,
        target=render_label(SingletAtom(r, s)),
        shift_note="r -> r-2 per period (weight += alpha+)",
    )


def resolution_of_F(theory: SingletTheory, r: int, s: int) -> PeriodicResolution:
    """Spliced (horseshoe) standard resolution of the atypical Fock F_{r,s}.

    Glues the resolutions of its two composition factors M_{r,s} and
    M_{r+1,p-s}; strictly rho-ordered, same period data as resolution_of_M.
    """
    _check_s(theory, s)
    ra = resolution_of_M(theory, r + 1, theory.p - s)   # quotient factor
    rb = resolution_of_M(theory, r, s)                  # submodule factor
    base = ra.base_degree
    off = int(rb.base_degree - base)
    block = tuple(
        sa + tuple(StandardTerm(t.label, t.z_degree + off) for t in sb)
        for sa, sb in zip(ra.block, rb.block)
    )
    return PeriodicResolution(
        block=block,
        z_shift=2 * theory.p,
        period_shift=_make_shift(theory.p),
        base_degree=base,
        target=render_label(SingletFockRS(r, s)),
        shift_note=ra.shift_note,
    )


def trivial_resolution(theory: SingletTheory, label: FockLike) -> PeriodicResolution:
    """0 -> X -> X -> 0 for a standard label X."""
    return PeriodicResolution(
        prefix=((StandardTerm(label, 0),),),
        base_degree=theory.rho(label),
        target=render_label(label),
    )


# ---------------------------------------------------------------------------
# quantum dimensions
# ---------------------------------------------------------------------------

def qdim_A_fock(theory: SingletTheory, label: FockLike, point: RealPoint) -> complex:
    """Unnormalized standard qdim exp(-2 pi i * weight * mu) at the shifted argument."""
    return cmath.exp(-2j * math.pi * theory.fock_weight(label) * point.mu)


def zeta(theory: SingletTheory, mu: float) -> complex:
    """The unit phase exp(-i pi alpha+ mu)."""
    return cmath.exp(-1j * math.pi * theory.alpha_plus * mu)


def zeta_power(theory: SingletTheory, mu: float, expo: float) -> complex:
    """exp(-i pi alpha+ mu * expo); continuous in mu, unlike a principal-branch power."""
    return cmath.exp(-1j * math.pi * theory.alpha_plus * mu * expo)


def _check_mu(theory: SingletTheory, mu: float, tol: Tolerance) -> None:
    if theory.exclusion_distance(mu) <= tol.eps_exclusion:
        raise ExceptionalPoint(f"mu={mu!r} lies in (1/alpha+) Z")


def qdim_F(theory: SingletTheory, lam: float, mu: float,
           tol: Tolerance = DEFAULT_TOL) -> complex:
    """Vacuum-normalized qdim of F_lam:
    -(sin(pi a+ mu)/sin(pi a- mu)) exp(-2 pi i lam mu) zeta^(1/p - 1)."""
    _check_mu(theory, mu, tol)
    num = math.sin(math.pi * theory.alpha_plus * mu)
    den = math.sin(math.pi * theory.alpha_minus * mu)
    if abs(den) < tol.eps_exclusion:
        raise ExceptionalPoint(f"sin(pi alpha- mu) vanishes at mu={mu!r}")
    return (-(num / den) * cmath.exp(-2j * math.pi * lam * mu)
            * zeta_power(theory, mu, 1.0 / theory.p - 1.0))


def qdim_M(theory: SingletTheory, r: int, s: int, mu: float,
           tol: Tolerance = DEFAULT_TOL) -> complex:
    """Vacuum-normalized qdim of M_{r,s}:
    sin(pi s a- mu)/sin(pi a- mu) * zeta^(1-r)."""
    _check_s(theory, s)
    _check_mu(theory, mu, tol)
    den = math.sin(math.pi * theory.alpha_minus * mu)
    if abs(den) < tol.eps_exclusion:
        raise ExceptionalPoint(f"sin(pi alpha- mu) vanishes at mu={mu!r}")
    num = math.sin(math.pi * s * theory.alpha_minus * mu)
    return (num / den) * zeta(theory, mu) ** (1 - r)


def qdim_label(theory: SingletTheory, label, mu: float,
               tol: Tolerance = DEFAULT_TOL) -> complex:
    """Vacuum-normalized qdim of any singlet label (Fbar through its factors)."""
    label = canonicalize(label, theory, tol)
    if isinstance(label, SingletAtom):
        return qdim_M(theory, label.r, label.s, mu, tol)
    if isinstance(label, SingletFockRS):
        return qdim_F(theory, theory.alpha_rs(label.r, label.s), mu, tol)
    if isinstance(label, SingletFock):
        return qdim_F(theory, label.lam, mu, tol)
    if isinstance(label, SingletFbar):
        sub, _, quot = ses_Fbar(theory, label.r, label.s)
        return (qdim_M(theory, sub.r, sub.s, mu, tol)
                + qdim_M(theory, quot.r, quot.s, mu, tol))
    raise TypeError(f"not a singlet label: {label!r}")


def qdim_N(theory: SingletTheory, mu: float, z: float = 1.0) -> complex:
    """Graded qdim of the induced algebra object: sum_n z^{-2n} exp(-2 pi i n a- mu).

    Its p composition factors sit at weights n*alpha- (grading -2n); at z = 1
    this is the scalar whose product with the vacuum resolution value is 1.
    """
    am = theory.alpha_minus
    total = 0.0 + 0.0j
    for n in range(theory.p):
        total += z ** (-2 * n) * cmath.exp(-2j * math.pi * n * am * mu)
    return total


def engine_qdim_A(theory: SingletTheory, r: int, s: int, point: RealPoint,
                  tol: Tolerance = DEFAULT_TOL) -> complex:
    """Unnormalized qdim of M_{r,s} through the resolution engine (value at t=z=1)."""
    res = resolution_of_M(theory, r, s)
    return closed_form(res, lambda lab, sp: qdim_A_fock(theory, lab, sp), point, tol).at_one(tol)


# ---------------------------------------------------------------------------
# Grothendieck fusion
# ---------------------------------------------------------------------------

def standard_fusion(theory: SingletTheory, a: FockLike, b: FockLike) -> GrothendieckVector:
    """[F_x][F_y] = sum_{j=0..p-1} [F_{x+y+j alpha-}], snapped onto atypical labels.

    This is the product of standard classes (the induced algebra object
    contributes the p weight shifts j*alpha-).
    """
    lam = theory.fock_weight(a) + theory.fock_weight(b)
    out = []
    for j in range(theory.p):
        w = lam + j * theory.alpha_minus
        out.append((canonicalize(SingletFock(w), theory), 1))
    return GrothendieckVector(out)


def fock_candidates(theory: SingletTheory, lam_total: float,
                    half_grid: bool = False) -> list[FockLike]:
    """Candidate Fock classes on the grid lam_total + j alpha-, |j| <= p-1.

    With half_grid the step is alpha-/2 and the range doubles; products of
    non-standard simples can land on both parities of the grading lattice.
    """
    step = theory.alpha_minus / 2 if half_grid else theory.alpha_minus
    width = 2 * (theory.p - 1) if half_grid else theory.p - 1
    out = []
    for j in range(-width, width + 1):
        out.append(canonicalize(SingletFock(lam_total + j * step), theory))
    seen: list[FockLike] = []
    for lab in out:
        if all(not _same_class(theory, lab, other) for other in seen):
            seen.append(lab)
    return seen


def _same_class(theory: SingletTheory, a: FockLike, b: FockLike) -> bool:
    return abs(theory.fock_weight(a) - theory.fock_weight(b)) < 1e-9


def atom_candidates(theory: SingletTheory, a: SingletAtom, b: SingletAtom) -> list:
    """Candidate constituents of [M][M]: same-phase atoms plus Fock classes."""
    cands: list = [SingletAtom(a.r + b.r - 1, s) for s in range(1, theory.p)]
    lam = theory.alpha_rs(a.r, a.s) + theory.alpha_rs(b.r, b.s)
    cands.extend(fock_candidates(theory, lam, half_grid=True))
    return cands


def grothendieck_decompose(theory: SingletTheory, product, candidates,
                           points: list[RealPoint],
                           tol: Tolerance = DEFAULT_TOL) -> GrothendieckVector:
    """Integer decomposition of a sampled qdim product over candidate classes.

    `product` is a callable mu -> complex (normalized qdim of the product).
    Solves the least-squares system over the samples, demands integer
    coefficients and a small residual.  Raises IllConditioned when the
    candidate functions are degenerate on the sample set and IncompleteBasis
    when the residual betrays a missing constituent.
    """
    cands = list(candidates)
    if len(points) < 2 * len(cands):
        raise ValueError("need at least 2 samples per candidate")
    A = np.array([[qdim_label(theory, c, pt.mu, tol) for c in cands] for pt in points])
    y = np.array([complex(product(pt.mu)) for pt in points])
    Ar = np.vstack([A.real, A.imag])
    yr = np.concatenate([y.real, y.imag])
    sing = np.linalg.svd(Ar, compute_uv=False)
    if sing[0] == 0 or sing[-1] / sing[0] < 1e-9:
        raise IllConditioned(f"singular-value ratio {sing[-1] / sing[0]:.3e}")
    coeffs, *_ = np.linalg.lstsq(Ar, yr, rcond=None)
    try:
        ints = [round_to_integer(c, tol) for c in coeffs]
    except Exception as exc:
        raise IncompleteBasis(f"non-integer coefficients {coeffs!r}") from exc
    residual = float(np.max(np.abs(A @ np.array(ints, dtype=float) - y)))
    if residual >= tol.eps_round:
        raise IncompleteBasis(f"residual {residual:.3e} after rounding")
    return GrothendieckVector(zip(cands, ints))


def fuse(theory: SingletTheory, x, y, *, n_samples: int | None = None,
         seed: int = 42, tol: Tolerance = DEFAULT_TOL) -> GrothendieckVector:
    """Fusion product of two singlet classes by sampled decomposition.

    Fbar inputs are replaced by the atypical Fock label with the same class.
    """
    x = canonicalize(x, theory, tol)
    y = canonicalize(y, theory, tol)
    if isinstance(x, SingletFbar):
        x = SingletFockRS(x.r - 1, theory.p - x.s)
    if isinstance(y, SingletFbar):
        y = SingletFockRS(y.r - 1, theory.p - y.s)
    if isinstance(x, SingletAtom) and isinstance(y, SingletAtom):
        cands = atom_candidates(theory, x, y)
    elif isinstance(x, SingletAtom) or isinstance(y, SingletAtom):
        atom, fock = (x, y) if isinstance(x, SingletAtom) else (y, x)
        lam = theory.fock_weight(fock) + theory.alpha_rs(atom.r, atom.s)
        cands = list(fock_candidates(theory, lam))
    else:
        cands = list(fock_candidates(theory, theory.fock_weight(x) + theory.fock_weight(y)))
    if n_samples is None:
        n_samples = max(2 * len(cands), 8)
    pts = theory.sample_points(n_samples, seed, tol)

    def product(mu: float) -> complex:
        return qdim_label(theory, x, mu, tol) * qdim_label(theory, y, mu, tol)

    return grothendieck_decompose(theory, product, cands, pts, tol)
