"""Named verification suites over the module invariants.

Each check returns a CheckResult with the worst deviation it saw; the CLI
`verify` command fans these out across worker threads and merges the results
in name order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import singlet as sg
from . import sl2 as s2
from .errors import CalculusError
from .labels import (GrothendieckVector, Sl2DPlus, Sl2Std, SingletFock,
                     canonicalize)
from .resolution import closed_form, double_limit, series_truncation
from .scalar import DEFAULT_TOL, Tolerance
from .semisimple import (HeisenbergTheory, MinimalModelTheory, PiTheory,
                         heis_qdim, pi0_fusion, pi0_qdim, vir_fusion_tensor_closed,
                         vir_fusion_tensor_verlinde, vir_S_matrix)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    cases: int
    threshold: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.note})" if self.note else ""
        return (f"{status}  {self.name}: max deviation {self.max_deviation:.3e} "
                f"over {self.cases} cases, threshold {self.threshold:.1e}{extra}")


# ---------------------------------------------------------------------------
# minimal models
# ---------------------------------------------------------------------------

def minimal_smatrix(theory: MinimalModelTheory) -> CheckResult:
    """S S^T = 1 on canonical labels."""
    S = vir_S_matrix(theory)
    dev = float(np.max(np.abs(S @ S.T - np.eye(len(S)))))
    return CheckResult("smatrix-orthogonality", dev < 1e-10, dev, len(S) ** 2, 1e-10)

def minimal_verlinde_vs_closed(theory: MinimalModelTheory) -> CheckResult:
    """Float Verlinde sums round to the closed window coefficients, all triples."""
    closed = vir_fusion_tensor_closed(theory)
    summed = vir_fusion_tensor_verlinde(theory)
    dev = float(np.max(np.abs(summed - closed)))
    return CheckResult("verlinde-vs-closed", dev < 1e-9, dev, closed.size, 1e-9)

def minimal_associativity(theory: MinimalModelTheory) -> CheckResult:
    """(N_a N_b) N_c contracted both ways agrees."""
    N = vir_fusion_tensor_closed(theory)
    lhs = np.einsum("abx,xcd->abcd", N, N)
    rhs = np.einsum("bcx,axd->abcd", N, N)
    dev = float(np.max(np.abs(lhs - rhs)))
    return CheckResult("fusion-associativity", dev == 0.0, dev, lhs.size, 0.5)


# ---------------------------------------------------------------------------
# singlet
# ---------------------------------------------------------------------------

def singlet_resolution_limits(theory: sg.SingletTheory, n_samples: int = 20,
                              seed: int = 42, tol: Tolerance = DEFAULT_TOL,
                              r_range: tuple[int, int] = (-3, 3)) -> CheckResult:
    """Resolution double limits (both orders) against the closed qdim forms."""
    pts = theory.sample_points(n_samples, seed, tol)
    qd = lambda lab, sp: sg.qdim_A_fock(theory, lab, sp)
    dev = 0.0
    cases = 0
    for pt in pts:
        v0 = double_limit(closed_form(sg.resolution_of_M(theory, 1, 1), qd, pt, tol), "tz", tol)
        for r in range(r_range[0], r_range[1] + 1):
            for s in range(1, theory.p):
                q = closed_form(sg.resolution_of_M(theory, r, s), qd, pt, tol)
                v_tz = double_limit(q, "tz", tol)
                v_zt = double_limit(q, "zt", tol)
                want = sg.qdim_M(theory, r, s, pt.mu, tol)
                dev = max(dev, abs(v_tz / v0 - want), abs(v_tz - v_zt))
                cases += 1
    return CheckResult("resolution-limits", dev < 1e-8, dev, cases, 1e-8)

def singlet_euler(theory: sg.SingletTheory, n_samples: int = 20, seed: int = 42,
                  tol: Tolerance = DEFAULT_TOL,
                  r_range: tuple[int, int] = (-3, 3)) -> CheckResult:
    """qdim(mid) = qdim(sub) + qdim(quot) on every short exact sequence."""
    pts = theory.sample_points(n_samples, seed, tol)
    dev = 0.0
    cases = 0
    for r in range(r_range[0], r_range[1] + 1):
        for s in range(1, theory.p):
            for ses in (sg.ses_F(theory, r, s), sg.ses_Fbar(theory, r, s)):
                sub, mid, quot = ses
                for pt in pts:
                    lhs = sg.qdim_label(theory, mid, pt.mu, tol)
                    rhs = (sg.qdim_label(theory, sub, pt.mu, tol)
                           + sg.qdim_label(theory, quot, pt.mu, tol))
                    dev = max(dev, abs(lhs - rhs))
                    cases += 1
    return CheckResult("euler-additivity", dev < 1e-10, dev, cases, 1e-10)

def singlet_vacuum_product(theory: sg.SingletTheory, n_samples: int = 20,
                           seed: int = 42, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Engine vacuum value times the independently assembled algebra qdim is 1."""
    pts = theory.sample_points(n_samples, seed, tol)
    dev = 0.0
    for pt in pts:
        v0 = sg.engine_qdim_A(theory, 1, 1, pt, tol)
        dev = max(dev, abs(sg.qdim_N(theory, pt.mu) * v0 - 1.0))
    return CheckResult("vacuum-normalization", dev < 1e-8, dev, len(pts), 1e-8)

def singlet_homomorphism(theory: sg.SingletTheory, n_pairs: int = 20,
                         seed: int = 42, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Sampled fusion decompositions reproduce qdim products on fresh samples."""
    rng = random.Random(seed)
    pts = theory.sample_points(10, seed + 1, tol)
    dev = 0.0
    cases = 0
    for _ in range(n_pairs):
        if rng.random() < 0.5:
            x = sg.SingletAtom(rng.randint(-2, 3), rng.randint(1, theory.p - 1))
        else:
            x = SingletFock(rng.uniform(-2.0, 2.0))
        if rng.random() < 0.5:
            y = sg.SingletAtom(rng.randint(-2, 3), rng.randint(1, theory.p - 1))
        else:
            y = SingletFock(rng.uniform(-2.0, 2.0))
        vec = sg.fuse(theory, x, y, seed=seed + 7, tol=tol)
        for pt in pts:
            lhs = sg.qdim_label(theory, x, pt.mu, tol) * sg.qdim_label(theory, y, pt.mu, tol)
            rhs = sum(c * sg.qdim_label(theory, lab, pt.mu, tol) for lab, c in vec.items())
            dev = max(dev, abs(lhs - rhs))
            cases += 1
    return CheckResult("qdim-homomorphism", dev < 1e-8, dev, cases, 1e-8)


# ---------------------------------------------------------------------------
# sl2
# ---------------------------------------------------------------------------

def sl2_resolution_limits(theory: s2.Sl2Theory, n_samples: int = 20, seed: int = 42,
                          tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Series truncation vs closed form (order 40 at t=z=0.9) and limits vs closed qdim."""
    pts = theory.sample_points(n_samples, seed, tol)
    qd = lambda lab, sp: s2.qdim_standard(theory, lab, sp, tol)
    dev_series = 0.0
    dev_limit = 0.0
    cases = 0
    powers = 0.9 ** np.arange(41)
    for r in range(1, theory.u):
        res = s2.resolution_of_L(theory, r)
        for pt in pts:
            q = closed_form(res, qd, pt, tol)
            c1 = series_truncation(res, qd, pt, 40, 0.9)
            c2 = q.series(0.9, 40)
            dev_series = max(dev_series, float(np.max(np.abs((c1 - c2) * powers))))
            lim = double_limit(q, "tz", tol)
            dev_limit = max(dev_limit, abs(lim - s2.qdim_L_closed(theory, r, pt, tol)))
            cases += 1
    dev = max(dev_series, dev_limit)
    passed = dev_series < 1e-10 and dev_limit < 1e-8
    note = f"series {dev_series:.2e}, limit {dev_limit:.2e}"
    return CheckResult("resolution-limits", passed, dev, cases, 1e-8, note)

def sl2_euler(theory: s2.Sl2Theory, n_samples: int = 10, seed: int = 42,
              tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """qdim additivity across the atypical-standard exact sequences."""
    pts = theory.sample_points(n_samples, seed, tol)
    dev = 0.0
    cases = 0
    for ell in (-1, 0, 1):
        for r in range(1, theory.u):
            for s in range(1, theory.v):
                sub, mid, quot = s2.ses_Eplus(theory, ell, r, s)
                for pt in pts:
                    lhs = s2.qdim_standard(theory, mid, pt, tol)
                    rhs = s2.qdim_A(theory, sub, pt, tol) + s2.qdim_A(theory, quot, pt, tol)
                    dev = max(dev, abs(lhs - rhs))
                    cases += 1
    return CheckResult("euler-additivity", dev < 1e-8, dev, cases, 1e-8)

def sl2_vacuum_product(theory: s2.Sl2Theory, n_samples: int = 20, seed: int = 42,
                       tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """q_N * q_V = 1 through both the engine and the closed vacuum form."""
    pts = theory.sample_points(n_samples, seed, tol)
    dev = 0.0
    for pt in pts:
        qn = s2.qdim_N(theory, pt)
        dev = max(dev, abs(qn * s2.qdim_vacuum(theory, pt, tol) - 1.0),
                  abs(qn * s2.qdim_A(theory, theory.vacuum(), pt, tol) - 1.0))
    return CheckResult("vacuum-normalization", dev < 1e-8, dev, 2 * len(pts), 1e-8)

def _random_std(theory: s2.Sl2Theory, rng: random.Random) -> Sl2Std:
    while True:
        lab = Sl2Std(rng.randint(-2, 2), rng.uniform(0.0, 2.0),
                     rng.randint(1, theory.u - 1), rng.randint(1, theory.v - 1))
        if isinstance(canonicalize(lab, theory), Sl2Std):
            return lab

def sl2_homomorphism(theory: s2.Sl2Theory, n_pairs: int = 50, seed: int = 42,
                     n_samples: int = 20, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """Grothendieck fusion is a qdim homomorphism for Std x Std, Std x D+, D+ x D+."""
    rng = random.Random(seed)
    pts = theory.sample_points(n_samples, seed + 1, tol)
    dev = 0.0
    cases = 0
    for kind in ("std-std", "std-dplus", "dplus-dplus"):
        for _ in range(n_pairs):
            if kind == "std-std":
                x, y = _random_std(theory, rng), _random_std(theory, rng)
            elif kind == "std-dplus":
                x = _random_std(theory, rng)
                y = Sl2DPlus(rng.randint(-2, 2), rng.randint(1, theory.u - 1),
                             rng.randint(1, theory.v - 1))
            else:
                x = Sl2DPlus(rng.randint(-2, 2), rng.randint(1, theory.u - 1),
                             rng.randint(1, theory.v - 1))
                y = Sl2DPlus(rng.randint(-2, 2), rng.randint(1, theory.u - 1),
                             rng.randint(1, theory.v - 1))
            vec = s2.gr_fusion(theory, x, y, tol)
            for pt in pts:
                lhs = (s2.qdim_A(theory, x, pt, tol) * s2.qdim_A(theory, y, pt, tol)
                       * s2.qdim_N(theory, pt))
                rhs = sum(c * s2.qdim_A(theory, lab, pt, tol) for lab, c in vec.items())
                dev = max(dev, abs(lhs - rhs))
                cases += 1
    return CheckResult("qdim-homomorphism", dev < 1e-8, dev, cases, 1e-8)

def sl2_projective_roundtrip(theory: s2.Sl2Theory, n_multisets: int = 1000,
                             seed: int = 42, tol: Tolerance = DEFAULT_TOL) -> CheckResult:
    """projective_lift inverts the Grothendieck image on random projective multisets."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(n_multisets):
        objs = []
        for _ in range(rng.randint(1, 6)):
            if rng.random() < 0.5:
                objs.append(s2.Sl2Stag(rng.randint(-3, 3), rng.randint(1, theory.u - 1),
                                       rng.randint(1, theory.v - 1)))
            else:
                objs.append(canonicalize(_random_std(theory, rng), theory))
        vec = GrothendieckVector.zero()
        for o in objs:
            vec = vec + s2.grothendieck_image(theory, o)
        try:
            back = s2.projective_lift(theory, vec, tol)
        except CalculusError:
            bad += 1
            continue
        if sorted(map(repr, back)) != sorted(map(repr, objs)):
            bad += 1
    return CheckResult("projective-roundtrip", bad == 0, float(bad), n_multisets, 0.5)


# ---------------------------------------------------------------------------
# Heisenberg and Pi(0)
# ---------------------------------------------------------------------------

def heisenberg_homomorphism(theory: HeisenbergTheory, n_triples: int = 100,
                            seed: int = 42) -> CheckResult:
    """qdim(lam) qdim(mu) = qdim(lam+mu) at sampled spectral weights."""
    ws = theory.sample_weights(3 * n_triples, seed)
    dev = 0.0
    for i in range(n_triples):
        lam, mu, rho = ws[3 * i], ws[3 * i + 1], ws[3 * i + 2]
        lhs = heis_qdim(theory, lam, rho) * heis_qdim(theory, mu, rho)
        rhs = heis_qdim(theory, tuple(a + b for a, b in zip(lam, mu)), rho)
        dev = max(dev, abs(lhs - rhs))
    return CheckResult("qdim-homomorphism", dev < 1e-10, dev, n_triples, 1e-10)

def pi0_homomorphism(theory: PiTheory, n_triples: int = 100, seed: int = 42) -> CheckResult:
    """Normalized kernel is a multiplicative character of the fusion group."""
    labs = theory.sample_labels(3 * n_triples, seed)
    dev = 0.0
    for i in range(n_triples):
        x, y, z = labs[3 * i], labs[3 * i + 1], labs[3 * i + 2]
        lhs = pi0_qdim(theory, x, z) * pi0_qdim(theory, y, z)
        rhs = pi0_qdim(theory, pi0_fusion(x, y), z)
        dev = max(dev, abs(lhs - rhs))
    return CheckResult("qdim-homomorphism", dev < 1e-10, dev, n_triples, 1e-10)


# ---------------------------------------------------------------------------
# suite registry
# ---------------------------------------------------------------------------

SUITES = ("smatrix", "verlinde-vs-closed", "resolution-limits", "euler",
          "homomorphism", "all")


def run_suite(theory, suite: str, *, seed: int = 42, n_samples: int = 20,
              tol: Tolerance = DEFAULT_TOL) -> list[CheckResult]:
    """All checks of the named suite that apply to the given theory."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    out: list[CheckResult] = []

    def want(name: str) -> bool:
        return suite in (name, "all")

    if isinstance(theory, MinimalModelTheory):
        if want("smatrix"):
            out.append(minimal_smatrix(theory))
        if want("verlinde-vs-closed"):
            out.append(minimal_verlinde_vs_closed(theory))
            out.append(minimal_associativity(theory))
    elif isinstance(theory, sg.SingletTheory):
        if want("resolution-limits"):
            out.append(singlet_resolution_limits(theory, n_samples, seed, tol))
            out.append(singlet_vacuum_product(theory, n_samples, seed, tol))
        if want("euler"):
            out.append(singlet_euler(theory, n_samples, seed, tol))
        if want("homomorphism"):
            out.append(singlet_homomorphism(theory, 20, seed, tol))
    elif isinstance(theory, s2.Sl2Theory):
        if want("resolution-limits"):
            out.append(sl2_resolution_limits(theory, n_samples, seed, tol))
            out.append(sl2_vacuum_product(theory, n_samples, seed, tol))
        if want("euler"):
            out.append(sl2_euler(theory, min(n_samples, 10), seed, tol))
        if want("homomorphism"):
            out.append(sl2_homomorphism(theory, 50, seed, n_samples, tol))
            out.append(sl2_projective_roundtrip(theory, 1000, seed, tol))
    elif isinstance(theory, HeisenbergTheory):
        if want("homomorphism"):
            out.append(heisenberg_homomorphism(theory, 100, seed))
    elif isinstance(theory, PiTheory):
        if want("homomorphism"):
            out.append(pi0_homomorphism(theory, 100, seed))
    else:
        raise TypeError(f"unknown theory {theory!r}")
    return out
