"""Admissible-level sl2 weight-module calculus: spectral flow, Grothendieck
fusion, resolutions of the non-standard simples, projective lifts, and fusion
products of simple and projective modules.

Conventions.  A standard label sigma^l E_{lam; (r,s)} factorizes through a
Virasoro-times-lattice realization; its unnormalized quantum dimension at the
spectral point (l', lam', r', s') is

    exp(-i pi (k l l' + lam'(l+1) + lam l')) * S^Vir_{(r,s),(r',s')} / S^Vir_{(1,1),(r',s')}

with k = -2 + u/v.  The z-grading of resolutions is the spectral-flow index l
(the categorical grading is l+1; the constant offset never affects limits).
All non-generic simples are canonicalized to flowed D- labels; the vacuum is
sigma^1 D-_{u-1,v-1}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (ExceptionalPoint, NotProjectiveClass, OutOfRange,
                     UnsupportedPair)
from .labels import (GrothendieckVector, Sl2DMinus, Sl2DPlus, Sl2EMinus,
                     Sl2EPlus, Sl2L, Sl2Stag, Sl2Std, canonicalize,
                     kac_window_check, lambda_rs, mod_dist, render_label)
from .resolution import PeriodicResolution, StandardTerm, closed_form
from .scalar import DEFAULT_TOL, Sl2Point, Tolerance, low_discrepancy
from .semisimple import MinimalModelTheory, fusion_window

ProjectiveObject = Sl2Std | Sl2Stag  # generic standards and staggered modules


@dataclass(frozen=True)
class Sl2Theory:
    """Admissible level k = -2 + u/v, coprime u,v >= 2."""

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
    def kf(self) -> float:
        return float(self.level)

    @property
    def virasoro(self) -> MinimalModelTheory:
        return MinimalModelTheory(self.u, self.v)

    def lam_rs(self, r: int, s: int) -> Fraction:
        return lambda_rs(self.u, self.v, r, s)

    def vacuum(self) -> Sl2DMinus:
        return Sl2DMinus(1, self.u - 1, self.v - 1)

    def rho(self, label) -> float:
        """z-grading of a standard label: its spectral-flow index."""
        if isinstance(label, (Sl2Std, Sl2EPlus, Sl2EMinus)):
            return float(label.ell)
        raise TypeError(f"rho is defined on standard labels, not {label!r}")

    def weight_of(self, label) -> float:
        """Weight mod 2 of a standard label."""
        if isinstance(label, Sl2Std):
            return label.lam % 2.0
        if isinstance(label, Sl2EPlus):
            return float(self.lam_rs(label.r, label.s)) % 2.0
        if isinstance(label, Sl2EMinus):
            return float(self.lam_rs(self.u - label.r, self.v - label.s)) % 2.0
        raise TypeError(f"not a standard label: {label!r}")

    def exclusion_distance(self, lam: float) -> float:
        """Distance (mod 2) from lam to every denominator zero of the qdim kernels."""
        k = self.kf
        dists = [mod_dist(self.v * lam, 1.0) / self.v]
        for s in range(1, self.v):
            for base in (0.0, 1.0):
                for sign in (1.0, -1.0):
                    dists.append(mod_dist(lam - base - sign * k * s, 2.0))
        return min(dists)

    def sample_points(self, n: int, seed: int, tol: Tolerance = DEFAULT_TOL,
                      margin: float = 0.02) -> list[Sl2Point]:
        """Deterministic spectral points (l', lam', r', s') clear of the exceptional set."""
        margin = max(margin, tol.eps_exclusion)
        flows = [0, 1, -1, 2, -2]
        pts: list[Sl2Point] = []
        gen = low_discrepancy(seed)
        i = 0
        guard = 0
        while len(pts) < n:
            guard += 1
            if guard > 1000 * (n + 10):
                raise ExceptionalPoint("exclusion zone rejects almost every sample")
            lam = 2.0 * next(gen)
            if self.exclusion_distance(lam) <= margin:
                continue
            r = 1 + i % (self.u - 1)
            s = 1 + (i // (self.u - 1)) % (self.v - 1)
            pts.append(Sl2Point(flows[i % len(flows)], lam, r, s))
            i += 1
        return pts


def _vir_ratio(theory: Sl2Theory, r: int, s: int, point: Sl2Point) -> float:
    """S-ratio by the raw sine formula; vanishes (rather than erring) at s = v."""
    u, v = theory.u, theory.v
    rp, sp = point.r, point.s
    sign = -1.0 if (r * sp + rp * s + sp + rp) % 2 else 1.0
    num = math.sin(math.pi * v * r * rp / u) * math.sin(math.pi * u * s * sp / v)
    den = math.sin(math.pi * v * rp / u) * math.sin(math.pi * u * sp / v)
    return sign * num / den


# ---------------------------------------------------------------------------
# exact sequences and resolutions
# ---------------------------------------------------------------------------

def ses_Eplus(theory: Sl2Theory, ell: int, r: int, s: int
              ) -> tuple[Sl2DMinus, Sl2EPlus, Sl2DMinus]:
    """The non-split sequence 0 -> sub -> sigma^l E+_{r,s} -> quot -> 0 in D- labels."""
    u, v = theory.u, theory.v
    kac_window_check(u, v, r, s)
    if s != v - 1:
        sub = Sl2DMinus(ell + 1, u - r, v - s - 1)
    else:
        sub = Sl2DMinus(ell + 2, r, v - 1)
    return (sub, Sl2EPlus(ell, r, s), Sl2DMinus(ell, u - r, v - s))


def _dminus_walk(theory: Sl2Theory, ell: int, r: int, s: int, n: int
                 ) -> list[Sl2EPlus]:
    """First n slots of the spliced standard resolution of sigma^ell D-_{r,s}."""
    u, v = theory.u, theory.v
    slots = []
    l, a, b = ell, r, s
    for _ in range(n):
        slots.append(Sl2EPlus(l, u - a, v - b))
        if b != 1:
            l, a, b = l + 1, a, b - 1
        else:
            l, a, b = l + 2, u - a, v - 1
    return slots


def _make_shift(v: int):
    def shift(label, j: int):
        if isinstance(label, Sl2EPlus):
            return Sl2EPlus(label.ell + 2 * v * j, label.r, label.s)
        raise TypeError(f"cannot shift {label!r}")
    return shift


def resolution_of_Dminus(theory: Sl2Theory, ell: int, r: int, s: int) -> PeriodicResolution:
    """Standard resolution of sigma^ell D-_{r,s}: period 2(v-1), flow shift 2v per period."""
    kac_window_check(theory.u, theory.v, r, s)
    period = 2 * (theory.v - 1)
    slots = _dminus_walk(theory, ell, r, s, period)
    base = float(slots[0].ell)
    block = tuple((StandardTerm(lab, lab.ell - slots[0].ell),) for lab in slots)
    return PeriodicResolution(
        block=block,
        z_shift=2 * theory.v,
        period_shift=_make_shift(theory.v),
        base_degree=base,
        target=render_label(Sl2DMinus(ell, r, s)),
        shift_note="spectral flow l -> l + 2v per period",
    )


def resolution_of_L(theory: Sl2Theory, r: int) -> PeriodicResolution:
    """Standard resolution ... -> sigma^2 E+_{r,2} -> sigma^1 E+_{r,1} -> L_{r,0} -> 0."""
    if not 1 <= r <= theory.u - 1:
        raise OutOfRange(f"r={r} outside 1..{theory.u - 1}")
    res = resolution_of_Dminus(theory, 1, theory.u - r, theory.v - 1)
    return PeriodicResolution(
        block=res.block,
        z_shift=res.z_shift,
        period_shift=res.period_shift,
        base_degree=res.base_degree,
        target=render_label(Sl2L(0, r)),
        shift_note=res.shift_note,
    )


def trivial_resolution(theory: Sl2Theory, label) -> PeriodicResolution:
    """0 -> X -> X -> 0 for a standard label X."""
    return PeriodicResolution(
        prefix=((StandardTerm(label, 0),),),
        base_degree=theory.rho(label),
        target=render_label(label),
    )


# ---------------------------------------------------------------------------
# quantum dimensions
# ---------------------------------------------------------------------------

def qdim_standard(theory: Sl2Theory, label, point: Sl2Point,
                  tol: Tolerance = DEFAULT_TOL) -> complex:
    """Unnormalized qdim of a standard label: lattice character times Virasoro S-ratio."""
    if isinstance(label, Sl2EMinus):
        label = Sl2EPlus(label.ell, theory.u - label.r, theory.v - label.s)
    if isinstance(label, Sl2EPlus):
        r, s = label.r, label.s
        lam = float(theory.lam_rs(r, s))
    elif isinstance(label, Sl2Std):
        r, s = label.r, label.s
        lam = label.lam
    else:
        raise TypeError(f"not a standard label: {label!r}")
    k = theory.kf
    ph = cmath.exp(-1j * math.pi * (k * label.ell * point.ell
                                    + point.lam * (label.ell + 1)
                                    + lam * point.ell))
    return ph * _vir_ratio(theory, r, s, point)


@lru_cache(maxsize=1 << 18)
def _qdim_dminus(theory: Sl2Theory, ell: int, r: int, s: int, point: Sl2Point,
                 tol: Tolerance) -> complex:
    res = resolution_of_Dminus(theory, ell, r, s)
    qd = lambda lab, sp: qdim_standard(theory, lab, sp, tol)
    return closed_form(res, qd, point, tol).at_one(tol)


def qdim_A(theory: Sl2Theory, label, point: Sl2Point,
           tol: Tolerance = DEFAULT_TOL) -> complex:
    """Unnormalized qdim of any label; non-standard simples go through their resolution."""
    label = canonicalize(label, theory, tol)
    if isinstance(label, (Sl2Std, Sl2EPlus, Sl2EMinus)):
        return qdim_standard(theory, label, point, tol)
    if isinstance(label, Sl2DMinus):
        return _qdim_dminus(theory, label.ell, label.r, label.s, point, tol)
    if isinstance(label, Sl2Stag):
        return sum(c * qdim_standard(theory, lab, point, tol)
                   for lab, c in grothendieck_image(theory, label).items())
    raise TypeError(f"cannot evaluate qdim of {label!r}")


def qdim_vacuum(theory: Sl2Theory, point: Sl2Point,
                tol: Tolerance = DEFAULT_TOL) -> complex:
    """Closed unnormalized vacuum qdim exp(-i pi lam') / (2cos(pi lam') + 2(-1)^{r'} cos(pi k s'))."""
    k = theory.kf
    den = 2.0 * math.cos(math.pi * point.lam) + 2.0 * (-1.0) ** point.r * math.cos(math.pi * k * point.s)
    if abs(den) < tol.eps_exclusion:
        raise ExceptionalPoint(f"vacuum qdim denominator vanishes at {point!r}")
    return cmath.exp(-1j * math.pi * point.lam) / den


def qdim_L_closed(theory: Sl2Theory, r: int, point: Sl2Point,
                  tol: Tolerance = DEFAULT_TOL) -> complex:
    """Closed form of the resolution limit for L_{r,0}.

    With x = exp(-i pi lam'), phi = exp(-i pi l'(r-1)), eps = (-1)^{u s' + v(1+r')}:

        x * V_r * (phi + eps x^v / phi)
        -------------------------------------------------------------
        (1 + eps x^v) (2 cos(pi lam') + 2 (-1)^{r'} cos(pi k s'))

    where V_r = (-1)^{(r-1) s'} sin(pi v r r'/u)/sin(pi v r'/u).
    """
    u, v = theory.u, theory.v
    if not 1 <= r <= u - 1:
        raise OutOfRange(f"r={r} outside 1..{u - 1}")
    k = theory.kf
    lp, rp, sp = point.ell, point.r, point.s
    x = cmath.exp(-1j * math.pi * point.lam)
    xv = x**v
    den = 2.0 * math.cos(math.pi * point.lam) + 2.0 * (-1.0) ** rp * math.cos(math.pi * k * sp)
    if abs(den) < tol.eps_exclusion:
        raise ExceptionalPoint(f"qdim denominator vanishes at {point!r}")
    eps = (-1.0) ** (u * sp + v * (1 + rp))
    if abs(1.0 + eps * xv) < tol.eps_exclusion:
        raise ExceptionalPoint(f"lattice denominator vanishes at {point!r}")
    vr = (-1.0) ** ((r - 1) * sp) * math.sin(math.pi * v * r * rp / u) / math.sin(math.pi * v * rp / u)
    phi = cmath.exp(-1j * math.pi * lp * (r - 1))
    return x * vr * (phi + eps * xv / phi) / ((1.0 + eps * xv) * den)


def qdim_N(theory: Sl2Theory, point: Sl2Point, z: float = 1.0) -> complex:
    """Graded qdim of the induced algebra object, from its three standard factors.

    The factors sit at flow gradings +1, -1 and 0 (in the l-convention used
    for resolutions).  At z = 1 this equals 1/qdim_vacuum; both routes are
    kept as a cross-check.
    """
    k = theory.kf
    mp = -point.ell - 1
    lpip = (k - point.lam) / 2.0

    def lattice(m: int, lpi: float) -> complex:
        return cmath.exp(-1j * math.pi * (k * m * mp + 2 * lpip * m + 2 * lpi * (mp + 1)))

    uv = theory.u / theory.v
    return (z * lattice(0, 0.0)
            + lattice(2, -uv) / z
            + lattice(1, -uv / 2.0) * _vir_ratio(theory, 1, 2, point))


# ---------------------------------------------------------------------------
# Grothendieck fusion
# ---------------------------------------------------------------------------

def _std_data(theory: Sl2Theory, label) -> tuple[int, float, int, int]:
    """(ell, weight, r, s) of a standard-class label (E- replaced by its class)."""
    if isinstance(label, Sl2EMinus):
        label = Sl2EPlus(label.ell, theory.u - label.r, theory.v - label.s)
    if isinstance(label, Sl2EPlus):
        return (label.ell, float(theory.lam_rs(label.r, label.s)), label.r, label.s)
    if isinstance(label, Sl2Std):
        return (label.ell, label.lam, label.r, label.s)
    raise TypeError(f"not a standard label: {label!r}")


def _std(theory: Sl2Theory, ell: int, lam: float, r: int, s: int,
         tol: Tolerance) -> GrothendieckVector:
    return GrothendieckVector.unit(canonicalize(Sl2Std(ell, lam % 2.0, r, s), theory, tol))


def gr_fusion_standard(theory: Sl2Theory, x, y,
                       tol: Tolerance = DEFAULT_TOL) -> GrothendieckVector:
    """Grothendieck product of two standard classes.

    Three families of output standards: flows l+l'+-1 at weights lam+lam'-+k
    with the plain Virasoro window, and flow l+l' at weight lam+lam' with the
    s'-shifted windows.  Atypical output weights snap onto E+ classes.
    """
    u, v = theory.u, theory.v
    k = theory.kf
    l1, a1, r1, s1 = _std_data(theory, x)
    l2, a2, r2, s2 = _std_data(theory, y)
    out = GrothendieckVector.zero()
    for rpp in range(1, u):
        for spp in range(1, v):
            n = (fusion_window(u, r1, r2, rpp) * fusion_window(v, s1, s2, spp))
            if n:
                out = out + n * _std(theory, l1 + l2 + 1, a1 + a2 - k, rpp, spp, tol)
                out = out + n * _std(theory, l1 + l2 - 1, a1 + a2 + k, rpp, spp, tol)
            m = fusion_window(u, r1, r2, rpp) * (
                (fusion_window(v, s1, s2 - 1, spp) if s2 - 1 >= 1 else 0)
                + (fusion_window(v, s1, s2 + 1, spp) if s2 + 1 <= v - 1 else 0))
            if m:
                out = out + m * _std(theory, l1 + l2, a1 + a2, rpp, spp, tol)
    return out


def gr_fusion_with_Dplus(theory: Sl2Theory, x, y: Sl2DPlus,
                         tol: Tolerance = DEFAULT_TOL) -> GrothendieckVector:
    """Grothendieck product of a standard class with sigma^l' D+_{r',s'}."""
    u, v = theory.u, theory.v
    kac_window_check(u, v, y.r, y.s)
    l1, a1, r1, s1 = _std_data(theory, x)
    l2, r2, s2 = y.ell, y.r, y.s
    lam_a = float(theory.lam_rs(r2, s2))
    lam_b = float(theory.lam_rs(r2, s2 + 1))
    out = GrothendieckVector.zero()
    for rpp in range(1, u):
        for spp in range(1, v):
            n1 = fusion_window(u, r1, r2, rpp) * (
                fusion_window(v, s1, s2 + 1, spp) if s2 + 1 <= v - 1 else 0)
            if n1:
                out = out + n1 * _std(theory, l1 + l2, a1 + lam_a, rpp, spp, tol)
            n2 = fusion_window(u, r1, r2, rpp) * fusion_window(v, s1, s2, spp)
            if n2:
                out = out + n2 * _std(theory, l1 + l2 + 1, a1 + lam_b, rpp, spp, tol)
    return out


def gr_fusion_Dplus_Dplus(theory: Sl2Theory, x: Sl2DPlus, y: Sl2DPlus,
                          tol: Tolerance = DEFAULT_TOL) -> GrothendieckVector:
    """Grothendieck product of two D+ classes (two-case split on s+s' against v)."""
    u, v = theory.u, theory.v
    kac_window_check(u, v, x.r, x.s)
    kac_window_check(u, v, y.r, y.s)
    l1, r1, s1 = x.ell, x.r, x.s
    l2, r2, s2 = y.ell, y.r, y.s
    out = GrothendieckVector.zero()
    below = s1 + s2 < v
    for rpp in range(1, u):
        for spp in range(1, v):
            if below:
                n = fusion_window(u, r1, r2, rpp) * fusion_window(v, s1, s2, spp)
            else:
                n = fusion_window(u, r1, r2, rpp) * fusion_window(v, s1 + 1, s2 + 1, spp)
            if n:
                lam = float(theory.lam_rs(rpp, s1 + s2 + 1))
                out = out + n * _std(theory, l1 + l2 + 1, lam, rpp, spp, tol)
        nd = fusion_window(u, r1, r2, rpp)  # the v-part window at (1,1)->1 is 1
        if nd:
            if below:
                dlab = Sl2DPlus(l1 + l2, rpp, s1 + s2)
            else:
                dlab = Sl2DPlus(l1 + l2 + 1, u - rpp, s1 + s2 - v + 1)
            out = out + nd * GrothendieckVector.unit(canonicalize(dlab, theory, tol), 1)
    return out


def omega_twist(theory: Sl2Theory, label):
    """The Weyl-reflection twist on labels: flips spectral flow and mirrors the kind."""
    if isinstance(label, Sl2DPlus):
        return Sl2DMinus(-label.ell, label.r, label.s)
    if isinstance(label, Sl2DMinus):
        return Sl2DPlus(-label.ell, label.r, label.s)
    if isinstance(label, Sl2EPlus):
        return Sl2EMinus(-label.ell, label.r, label.s)
    if isinstance(label, Sl2EMinus):
        return Sl2EPlus(-label.ell, label.r, label.s)
    if isinstance(label, Sl2Std):
        return Sl2Std(-label.ell, (-label.lam) % 2.0, label.r, label.s)
    if isinstance(label, Sl2L):
        return Sl2L(-label.ell, label.r)
    raise TypeError(f"cannot twist {label!r}")


def gr_class(theory: Sl2Theory, label):
    """Class representative of a label in the Grothendieck basis.

    Mirror atypical standards have the same composition factors as their
    partner: [sigma^l E-_{r,s}] = [sigma^l E+_{u-r,v-s}].
    """
    label = canonicalize(label, theory)
    if isinstance(label, Sl2EMinus):
        return Sl2EPlus(label.ell, theory.u - label.r, theory.v - label.s)
    return label


def _omega_vector(theory: Sl2Theory, vec: GrothendieckVector,
                  tol: Tolerance) -> GrothendieckVector:
    return GrothendieckVector(
        (gr_class(theory, omega_twist(theory, lab)), c) for lab, c in vec.items()
    )


def gr_fusion(theory: Sl2Theory, x, y, tol: Tolerance = DEFAULT_TOL) -> GrothendieckVector:
    """Grothendieck product of two classes, dispatching on label kinds.

    Covers every pair: standard x standard, standard x discrete, and
    discrete x discrete (after canonicalization all discrete simples are
    flowed D- labels, and the Weyl-reflection twist turns those into D+
    pairs); staggered inputs distribute over their standard factors.
    """
    x = canonicalize(x, theory, tol)
    y = canonicalize(y, theory, tol)
    if isinstance(x, Sl2Stag) or isinstance(y, Sl2Stag):
        stag, other = (x, y) if isinstance(x, Sl2Stag) else (y, x)
        out = GrothendieckVector.zero()
        for lab, c in grothendieck_image(theory, stag).items():
            out = out + c * gr_fusion(theory, lab, other, tol)
        return out
    xd, yd = isinstance(x, Sl2DMinus), isinstance(y, Sl2DMinus)
    if not xd and not yd:
        return gr_fusion_standard(theory, x, y, tol)
    if xd and yd:
        tx, ty = omega_twist(theory, x), omega_twist(theory, y)
        return _omega_vector(theory, gr_fusion_Dplus_Dplus(theory, tx, ty, tol), tol)
    if xd:
        x, y = y, x
    # standard x D-: twist to standard x D+ and twist back
    tx = omega_twist(theory, x)
    ty = omega_twist(theory, y)
    return _omega_vector(theory, gr_fusion_with_Dplus(theory, tx, ty, tol), tol)


# ---------------------------------------------------------------------------
# projective objects and actual fusion
# ---------------------------------------------------------------------------

def _stag_partner(theory: Sl2Theory, ell: int, r: int, s: int) -> Sl2EPlus:
    # second member of the standard filtration of sigma^ell S_{r,s}
    if s != theory.v - 1:
        return Sl2EPlus(ell + 1, r, s + 1)
    return Sl2EPlus(ell + 2, theory.u - r, 1)


def grothendieck_image(theory: Sl2Theory, obj: ProjectiveObject) -> GrothendieckVector:
    """Class of a projective object in the standard basis.

    A staggered module sigma^ell S_{r,s} is the projective cover of the top of
    sigma^ell E+_{r,s}; its standard filtration pairs that atypical standard
    with the one whose socle is the same simple (sigma^{ell+1} E+_{r,s+1} for
    s < v-1, else sigma^{ell+2} E+_{u-r,1}).  The pairing is stable under the
    Weyl-reflection twist.
    """
    u, v = theory.u, theory.v
    if isinstance(obj, Sl2Stag):
        kac_window_check(u, v, obj.r, obj.s)
        return GrothendieckVector([
            (Sl2EPlus(obj.ell, obj.r, obj.s), 1),
            (_stag_partner(theory, obj.ell, obj.r, obj.s), 1),
        ])
    if isinstance(obj, Sl2Std):
        lab = canonicalize(obj, theory)
        if not isinstance(lab, Sl2Std):
            raise NotProjectiveClass(lab)
        return GrothendieckVector.unit(lab)
    raise TypeError(f"not a projective object: {obj!r}")


def projective_lift(theory: Sl2Theory, vec: GrothendieckVector,
                    tol: Tolerance = DEFAULT_TOL) -> list[ProjectiveObject]:
    """Invert the Grothendieck image map on the projective span.

    Greedy matching in increasing spectral flow: the least remaining atypical
    class can only start a staggered pair.  Raises NotProjectiveClass when the
    vector is not a nonnegative combination of projective classes.
    """
    v = theory.v
    generic: list[ProjectiveObject] = []
    atypical: dict[tuple[int, int, int], int] = {}
    for lab, c in vec.items():
        lab = canonicalize(lab, theory, tol)
        if c < 0:
            raise NotProjectiveClass(GrothendieckVector.unit(lab, c))
        if isinstance(lab, Sl2Std):
            generic.extend([lab] * c)
        elif isinstance(lab, Sl2EPlus):
            key = (lab.ell, lab.r, lab.s)
            atypical[key] = atypical.get(key, 0) + c
        else:
            raise NotProjectiveClass(GrothendieckVector.unit(lab, c))
    out: list[ProjectiveObject] = list(generic)
    for key in sorted(atypical):
        c = atypical[key]
        if c <= 0:
            if c < 0:
                raise NotProjectiveClass(GrothendieckVector.unit(Sl2EPlus(*key), c))
            continue
        ell, r, s = key
        p = _stag_partner(theory, ell, r, s)
        partner = (p.ell, p.r, p.s)
        have = atypical.get(partner, 0)
        if have < c:
            raise NotProjectiveClass(GrothendieckVector.unit(Sl2EPlus(*key), c - have))
        atypical[key] = 0
        atypical[partner] = have - c
        out.extend([Sl2Stag(ell, r, s)] * c)
    leftover = {k: c for k, c in atypical.items() if c}
    if leftover:
        raise NotProjectiveClass(GrothendieckVector(
            (Sl2EPlus(*k), c) for k, c in leftover.items()))
    return sorted(out, key=lambda o: (isinstance(o, Sl2Stag), render_label(o)))


@dataclass(frozen=True)
class FusionResult:
    """Actual fusion product: summands with multiplicities plus its Grothendieck class."""

    summands: tuple[tuple[object, int], ...]
    gr: GrothendieckVector
    max_residual: float = 0.0
    notes: tuple[str, ...] = ()

    def render(self) -> str:
        if not self.summands:
            return "0"
        parts = []
        for obj, c in self.summands:
            head = "" if c == 1 else f"{c}*"
            parts.append(f"{head}{render_label(obj)}")
        return " + ".join(parts)


def _image_of_summands(theory: Sl2Theory, summands) -> GrothendieckVector:
    total = GrothendieckVector.zero()
    for obj, c in summands:
        if isinstance(obj, (Sl2Std, Sl2Stag)):
            total = total + c * grothendieck_image(theory, obj)
        else:
            total = total + c * GrothendieckVector.unit(canonicalize(obj, theory))
    return total


def _collect(summands: list) -> tuple[tuple[object, int], ...]:
    # GrothendieckVector coalesces float weights split across computation paths
    vec = GrothendieckVector((obj, 1) for obj in summands)
    return tuple(sorted(vec.items(), key=lambda kv: render_label(kv[0])))


def _is_projective(theory: Sl2Theory, label) -> bool:
    if isinstance(label, Sl2Stag):
        return True
    if isinstance(label, Sl2Std):
        return isinstance(canonicalize(label, theory), Sl2Std)
    return False


def fusion(theory: Sl2Theory, x, y, *, n_check: int = 4, seed: int = 42,
           tol: Tolerance = DEFAULT_TOL) -> FusionResult:
    """Actual fusion product of two simple or projective modules.

    Projective inputs (generic standards, staggered modules) lift the
    Grothendieck product through the projective-lift map; D+ x D+ and the
    mirrored D- x D- use the explicit direct-sum rule; fusion with the vacuum
    is the identity.  Pairs the theory does not determine raise
    UnsupportedPair.  Every output is re-verified against the Grothendieck
    product, and (by default) against the qdim product at sampled points.
    """
    x0 = canonicalize(x, theory, tol)
    y0 = canonicalize(y, theory, tol)
    notes: list[str] = []
    if x0 == theory.vacuum() or y0 == theory.vacuum():
        other = y0 if x0 == theory.vacuum() else x0
        vec = (grothendieck_image(theory, other) if isinstance(other, Sl2Stag)
               else GrothendieckVector.unit(other))
        result = FusionResult(((other, 1),), vec)
    elif _is_projective(theory, x0) or _is_projective(theory, y0):
        vec = gr_fusion(theory, x0, y0, tol)
        lifted = projective_lift(theory, vec, tol)
        result = FusionResult(_collect(lifted), vec)
    elif (isinstance(x0, Sl2EPlus) and isinstance(y0, Sl2EMinus)) or \
            (isinstance(x0, Sl2EMinus) and isinstance(y0, Sl2EPlus)):
        vec = gr_fusion(theory, x0, y0, tol)
        lifted = projective_lift(theory, vec, tol)
        result = FusionResult(_collect(lifted), vec)
        notes.append("product of mirror atypical standards is projective")
    elif isinstance(x0, Sl2DMinus) and isinstance(y0, Sl2DMinus):
        tw = fusion_dplus_dplus(theory, omega_twist(theory, x0), omega_twist(theory, y0), tol)
        flat = [canonicalize(omega_twist(theory, lab), theory, tol)
                for lab, c in tw.summands for _ in range(c)]
        result = FusionResult(_collect(flat), gr_fusion(theory, x0, y0, tol))
    else:
        raise UnsupportedPair(f"{render_label(x0)} x {render_label(y0)}")

    image = _image_of_summands(theory, result.summands)
    if not image.isclose(result.gr, 1e-9):
        raise NotProjectiveClass(image - result.gr)
    residual = _qdim_residual(theory, x0, y0, result, n_check, seed, tol)
    return FusionResult(result.summands, result.gr, residual, tuple(notes))


def fusion_dplus_dplus(theory: Sl2Theory, x: Sl2DPlus, y: Sl2DPlus,
                       tol: Tolerance = DEFAULT_TOL) -> FusionResult:
    """Explicit direct sum for D+ x D+: generic standards plus D+ summands."""
    u, v = theory.u, theory.v
    summands: list = []
    if x.s + y.s < v:
        for rpp in range(1, u):
            for spp in range(1, v):
                n = fusion_window(u, x.r, y.r, rpp) * fusion_window(v, x.s, y.s, spp)
                if n:
                    lam = float(theory.lam_rs(rpp, x.s + y.s + 1)) % 2.0
                    lab = canonicalize(Sl2Std(x.ell + y.ell + 1, lam, rpp, spp), theory, tol)
                    summands.extend([lab] * n)
            n = fusion_window(u, x.r, y.r, rpp)
            if n:
                summands.extend([Sl2DPlus(x.ell + y.ell, rpp, x.s + y.s)] * n)
    else:
        for rpp in range(1, u):
            for spp in range(1, v):
                n = fusion_window(u, x.r + 0, y.r, rpp) * fusion_window(v, x.s + 1, y.s + 1, spp)
                if n:
                    lam = float(theory.lam_rs(rpp, x.s + y.s + 1)) % 2.0
                    lab = canonicalize(Sl2Std(x.ell + y.ell + 1, lam, rpp, spp), theory, tol)
                    summands.extend([lab] * n)
            n = fusion_window(u, x.r, y.r, rpp)
            if n:
                summands.extend([Sl2DPlus(x.ell + y.ell + 1, u - rpp, x.s + y.s - v + 1)] * n)
    for lab in summands:
        if isinstance(lab, Sl2EPlus):
            raise NotProjectiveClass(GrothendieckVector.unit(lab))
    vec = gr_fusion_Dplus_Dplus(theory, x, y, tol)
    return FusionResult(_collect(summands), vec)


def _qdim_residual(theory: Sl2Theory, x, y, result: FusionResult,
                   n_check: int, seed: int, tol: Tolerance) -> float:
    if n_check <= 0:
        return 0.0
    pts = theory.sample_points(n_check, seed, tol)
    worst = 0.0
    for pt in pts:
        lhs = qdim_A(theory, x, pt, tol) * qdim_A(theory, y, pt, tol) * qdim_N(theory, pt)
        rhs = sum(c * qdim_A(theory, lab, pt, tol) for lab, c in result.gr.items())
        worst = max(worst, abs(lhs - rhs))
    return worst
