"""Eventually periodic standard chain complexes and their q(t,z) calculus.

A resolution is a finite prefix followed by a periodic block whose labels
shift by a fixed rule each period.  Its quantum-dimension generating function
at a spectral point is then a polynomial plus a single geometric tail, so the
closed rational form, its power series, and the double limit t,z -> 1- are
all computable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Literal, Sequence

import numpy as np

from .errors import (CalculusError, ExceptionalPoint, FusionUndecomposable,
                     LimitDisagreement)
from .labels import GrothendieckVector
from .scalar import DEFAULT_TOL, RationalPhase, Tolerance

Label = Any
QDimEvaluator = Callable[[Label, Any], complex]


@dataclass(frozen=True)
class StandardTerm:
    """One basic standard label inside a slot, with its integer z-grading offset.

    z_degree is the rho-degree of the label relative to the resolution's
    base_degree (offsets within one resolution are always integers).
    """

    label: Label
    z_degree: int
    phase_hint: RationalPhase | None = None


Slot = tuple[StandardTerm, ...]


@dataclass(frozen=True)
class PeriodicResolution:
    """Chain complex: `prefix` slots, then `block` slots repeating with shifts.

    Unrolling period j applies `period_shift(label, j)` to block labels and
    adds j*z_shift to their z-degrees.  An empty block means a finite complex.
    """

    prefix: tuple[Slot, ...] = ()
    block: tuple[Slot, ...] = ()
    z_shift: int = 0
    period_shift: Callable[[Label, int], Label] | None = None
    base_degree: float = 0.0
    target: str = ""
    shift_note: str = ""

    @property
    def period_length(self) -> int:
        return len(self.block)

    @property
    def is_finite(self) -> bool:
        return not self.block

    def slot(self, i: int) -> Slot:
        if i < 0:
            raise IndexError(i)
        if i < len(self.prefix):
            return self.prefix[i]
        if self.is_finite:
            return ()
        off = i - len(self.prefix)
        j, o = divmod(off, len(self.block))
        if j == 0:
            return self.block[o]
        return tuple(
            StandardTerm(self.period_shift(t.label, j), t.z_degree + j * self.z_shift, t.phase_hint)
            for t in self.block[o]
        )

    def slots(self, n: int) -> list[Slot]:
        return [self.slot(i) for i in range(n)]

    def degrees(self, n: int) -> list[int]:
        """min z-degree per slot (the d-sequence, relative to base_degree)."""
        return [min(t.z_degree for t in s) for s in self.slots(n) if s]

    def is_strictly_ordered(self, n: int = 50) -> bool:
        d = self.degrees(n)
        return all(b > a for a, b in zip(d, d[1:]))

    def multiplicity(self, label: Label, depth: int) -> int:
        """Number of occurrences of `label` among the first `depth` slots."""
        return sum(sum(1 for t in s if t.label == label) for s in self.slots(depth))

    def index(self, label: Label, depth: int) -> int:
        """Euler index sum of (-1)^i [slot_i : label] over the first `depth` slots."""
        total = 0
        for i, s in enumerate(self.slots(depth)):
            total += (-1) ** i * sum(1 for t in s if t.label == label)
        return total

    def unroll_once(self) -> "PeriodicResolution":
        """Equivalent resolution with one period moved into the prefix."""
        if self.is_finite:
            return self
        shifted = tuple(
            tuple(
                StandardTerm(self.period_shift(t.label, 1), t.z_degree + self.z_shift, t.phase_hint)
                for t in s
            )
            for s in self.block
        )
        return PeriodicResolution(
            prefix=self.prefix + self.block,
            block=shifted,
            z_shift=self.z_shift,
            period_shift=self.period_shift,
            base_degree=self.base_degree,
            target=self.target,
            shift_note=self.shift_note,
        )

    def truncated(self, depth: int) -> "PeriodicResolution":
        """Finite prefix-only truncation (for series work at |t|,|z| < 1)."""
        return PeriodicResolution(
            prefix=tuple(self.slots(depth)),
            base_degree=self.base_degree,
            target=self.target + f" (truncated at {depth})",
        )

    def to_json_dict(self, render: Callable[[Label], str] = str) -> dict:
        """Serializable description (prefix/block/shifts) for reproducibility."""
        def enc(slots: Sequence[Slot]) -> list:
            return [
                [{"label": render(t.label), "z_degree": t.z_degree} for t in s]
                for s in slots
            ]

        return {
            "target": self.target,
            "prefix": enc(self.prefix),
            "block": enc(self.block),
            "period_length": self.period_length,
            "z_shift_per_period": self.z_shift,
            "base_degree": float(self.base_degree),
            "weight_shift_per_period": self.shift_note,
            "convention": "slot i carries sign (-1)^i; z-degrees are offsets from base_degree",
        }


@dataclass(frozen=True)
class QEvaluation:
    """q(t,z) at a fixed spectral point: polynomial part plus one geometric tail.

    Value is sum(c * t^a * z^b over prefix_terms) +
    sum(c * t^a * z^b over block_terms) / (1 - pole * t^pole_t * z^pole_z);
    `pole` already carries the per-period sign, and |pole| = 1.
    """

    point: Any
    prefix_terms: tuple[tuple[complex, int, int], ...]
    block_terms: tuple[tuple[complex, int, int], ...]
    pole: complex | None
    pole_t: int = 0
    pole_z: int = 0

    def __call__(self, t, z):
        t = np.asarray(t, dtype=complex)
        z = np.asarray(z, dtype=complex)
        val = np.zeros(np.broadcast(t, z).shape, dtype=complex)
        for c, a, b in self.prefix_terms:
            val = val + c * t**a * z**b
        if self.block_terms:
            blk = np.zeros_like(val)
            for c, a, b in self.block_terms:
                blk = blk + c * t**a * z**b
            val = val + blk / (1.0 - self.pole * t**self.pole_t * z**self.pole_z)
        if val.ndim == 0:
            return complex(val)
        return val

    def series(self, z: float, order: int) -> np.ndarray:
        """Coefficients of t^0..t^order of the rational form, at numeric z."""
        coeffs = np.zeros(order + 1, dtype=complex)
        for c, a, b in self.prefix_terms:
            if a <= order:
                coeffs[a] += c * z**b
        if self.block_terms:
            for c, a, b in self.block_terms:
                j = 0
                while a + j * self.pole_t <= order:
                    coeffs[a + j * self.pole_t] += c * self.pole**j * z**(b + j * self.pole_z)
                    j += 1
        return coeffs

    def at_one(self, tol: Tolerance = DEFAULT_TOL) -> complex:
        """Direct value of the rational form at t = z = 1."""
        val = sum(c for c, _, _ in self.prefix_terms)
        if self.block_terms:
            den = 1.0 - self.pole
            if abs(den) <= tol.eps_exclusion:
                raise ExceptionalPoint(f"pole factor {self.pole!r} is at 1")
            val += sum(c for c, _, _ in self.block_terms) / den
        return complex(val)


def closed_form(res: PeriodicResolution, qdim: QDimEvaluator, point,
                tol: Tolerance = DEFAULT_TOL) -> QEvaluation:
    """Evaluate slot quantum dimensions and assemble the closed rational form.

    The periodic block must have a single pole factor: the qdim ratio across
    one period, common to every block term (checked), of modulus 1.
    """
    pref = []
    for i, s in enumerate(res.prefix):
        sign = -1.0 if i % 2 else 1.0
        for term in s:
            pref.append((sign * qdim(term.label, point), i, term.z_degree))
    blk = []
    pole = None
    p0 = len(res.prefix)
    for o, s in enumerate(res.block):
        i = p0 + o
        sign = -1.0 if i % 2 else 1.0
        for term in s:
            q0 = qdim(term.label, point)
            q1 = qdim(res.period_shift(term.label, 1), point)
            if q0 == 0:
                raise ExceptionalPoint(f"vanishing qdim for {term.label!r}")
            ratio = q1 / q0
            if pole is None:
                pole = ratio
            elif abs(ratio - pole) > 1e-9 * (1 + abs(pole)):
                raise CalculusError(
                    "resolution does not have a single pole factor: "
                    f"{ratio!r} != {pole!r}"
                )
            blk.append((sign * q0, i, term.z_degree))
    if pole is not None:
        b = res.period_length
        if abs(abs(pole) - 1.0) > 1e-6:
            raise CalculusError(f"pole factor modulus {abs(pole)!r} is not 1")
        # fold the per-period sign (-1)^b into the geometric ratio
        pole = pole * ((-1.0) ** b)
        return QEvaluation(point, tuple(pref), tuple(blk), pole, b, res.z_shift)
    return QEvaluation(point, tuple(pref), (), None)


def series_truncation(res: PeriodicResolution, qdim: QDimEvaluator, point,
                      order: int, z: float) -> np.ndarray:
    """Coefficients of t^0..t^order of the defining alternating series, at numeric z.

    Walks the slots directly (no geometric resummation), so it is an
    independent route against `closed_form(...).series(...)`.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    coeffs = np.zeros(order + 1, dtype=complex)
    for i, s in enumerate(res.slots(order + 1)):
        sign = -1.0 if i % 2 else 1.0
        coeffs[i] = sign * sum(qdim(t.label, point) * z**t.z_degree for t in s)
    return coeffs


_LADDER = np.arange(4, 19)


def _richardson(values: np.ndarray) -> complex:
    """Limit of f(1 - 2^-j) for the ladder j = 4..18, by iterated extrapolation."""
    r = np.asarray(values, dtype=complex)
    for k in range(1, len(r)):
        f = 2.0**k
        r = (f * r[1:] - r[:-1]) / (f - 1.0)
    return complex(r[0])


def _limit_one_order(q: QEvaluation, order: Literal["tz", "zt"]) -> complex:
    steps = 1.0 - 0.5**_LADDER
    if order == "tz":
        outer = [_richardson(q(steps, zz)) for zz in steps]
    elif order == "zt":
        outer = [_richardson(q(tt, steps)) for tt in steps]
    else:
        raise ValueError(f"unknown limit order {order!r}")
    return _richardson(np.asarray(outer))


def double_limit(q: QEvaluation, order: Literal["tz", "zt"] = "tz",
                 tol: Tolerance = DEFAULT_TOL) -> complex:
    """Nested numeric limit of q(t,z) as t,z -> 1- in the given order.

    Both orders are computed along the ladder 1 - 2^-j and extrapolated; they
    must agree within eps_limit or LimitDisagreement is raised.  "tz" takes
    the t-limit first (inner), "zt" the z-limit first.
    """
    if q.pole is not None and abs(1.0 - q.pole) <= tol.eps_exclusion:
        raise ExceptionalPoint(f"pole factor {q.pole!r} too close to 1")
    v_tz = _limit_one_order(q, "tz")
    v_zt = _limit_one_order(q, "zt")
    if abs(v_tz - v_zt) > tol.eps_limit:
        raise LimitDisagreement(v_tz, v_zt)
    return v_tz if order == "tz" else v_zt


@dataclass(frozen=True)
class EquivalenceReport:
    """Pointwise comparison of the limits of two resolutions of the same object."""

    max_deviation: float
    deviations: tuple[float, ...]
    points: tuple[Any, ...]

    def within(self, eps: float) -> bool:
        return self.max_deviation <= eps


def resolution_equivalence(res1: PeriodicResolution, res2: PeriodicResolution,
                           qdim: QDimEvaluator, points: Iterable,
                           tol: Tolerance = DEFAULT_TOL) -> EquivalenceReport:
    """Check that two resolutions of the same object have equal quantum dimensions.

    Both double-limit orders are taken at every sampled point; the report
    lists |limit1 - limit2| per point.
    """
    devs = []
    pts = tuple(points)
    for sp in pts:
        v1 = double_limit(closed_form(res1, qdim, sp, tol), "tz", tol)
        v2 = double_limit(closed_form(res2, qdim, sp, tol), "tz", tol)
        devs.append(abs(v1 - v2))
    return EquivalenceReport(max(devs, default=0.0), tuple(devs), pts)


def total_complex(res1: PeriodicResolution, res2: PeriodicResolution,
                  standard_fusion: Callable[[Label, Label], GrothendieckVector],
                  rho: Callable[[Label], float],
                  depth: int = 48) -> PeriodicResolution:
    """Total complex of the slotwise fusion of two resolutions.

    slot k = sum over i+j=k of fusion(res1_i, res2_j); z-degrees add.  If at
    least one factor is a finite complex the result is exactly periodic;
    otherwise the slot contents grow and a depth-truncated finite complex is
    returned (sufficient for series work at |t|, |z| < 1).
    """

    def fused_slot(k: int) -> list[Label]:
        out: list[Label] = []
        for i in range(k + 1):
            s1 = res1.slot(i)
            s2 = res2.slot(k - i)
            for t1 in s1:
                for t2 in s2:
                    try:
                        vec = standard_fusion(t1.label, t2.label)
                    except Exception as exc:  # noqa: BLE001 - report the pair
                        raise FusionUndecomposable(
                            f"cannot decompose {t1.label!r} x {t2.label!r}: {exc}"
                        ) from exc
                    for lab, c in vec.items():
                        if c < 0:
                            raise FusionUndecomposable(
                                f"negative multiplicity in {t1.label!r} x {t2.label!r}"
                            )
                        out.extend([lab] * c)
        return out

    slot0 = fused_slot(0)
    if not slot0:
        raise FusionUndecomposable("empty zeroth slot")
    base = min(rho(lab) for lab in slot0)

    def make_slot(labels: list[Label]) -> Slot:
        terms = []
        for lab in labels:
            off = rho(lab) - base
            n = round(off)
            if abs(off - n) > 1e-6:
                raise CalculusError(f"non-integer z-degree offset {off!r} for {lab!r}")
            terms.append(StandardTerm(lab, int(n)))
        return tuple(terms)

    target = f"Tot({res1.target or '?'} (x) {res2.target or '?'})"

    if not res1.is_finite and not res2.is_finite:
        prefix = tuple(make_slot(fused_slot(k)) for k in range(depth))
        return PeriodicResolution(prefix=prefix, base_degree=base, target=target)

    fin, per = (res1, res2) if res1.is_finite else (res2, res1)
    if per.is_finite:
        n = len(res1.prefix) + len(res2.prefix)
        prefix = tuple(make_slot(fused_slot(k)) for k in range(max(n - 1, 1)))
        return PeriodicResolution(prefix=prefix, base_degree=base, target=target)

    n_pref = max(len(fin.prefix) - 1, 0) + len(per.prefix)
    b = per.period_length
    prefix = tuple(make_slot(fused_slot(k)) for k in range(n_pref))
    block = tuple(make_slot(fused_slot(k)) for k in range(n_pref, n_pref + b))
    result = PeriodicResolution(
        prefix=prefix,
        block=block,
        z_shift=per.z_shift,
        period_shift=per.period_shift,
        base_degree=base,
        target=target,
        shift_note=per.shift_note,
    )
    # the periodic continuation must reproduce the direct convolution
    check = make_slot(fused_slot(n_pref + b))
    got = result.slot(n_pref + b)
    if not _same_slot(check, got):
        raise FusionUndecomposable("fusion does not commute with the period shift")
    return result


def _same_slot(a: Slot, b: Slot) -> bool:
    from .labels import label_distance

    rest = list(b)
    if len(a) != len(rest):
        return False
    for t in a:
        hit = None
        for i, t2 in enumerate(rest):
            if t.z_degree == t2.z_degree and label_distance(t.label, t2.label) <= 1e-6:
                hit = i
                break
        if hit is None:
            return False
        rest.pop(hit)
    return True
