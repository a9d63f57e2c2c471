"""Canonical module labels for each theory and the identifications between them.

Only names and identification rules live here; no module structure.  The
canonical text rendering (used in JSON output and by the CLI) is stable:
``(2,1)``, ``F[lam=0.25]``, ``M[r=1,s=1]``, ``E[l=1;lam=0.25;r=2,s=1]``,
``D-[l=0;r=1,s=1]``, ``S[l=0;r=1,s=1]``, ``Pi[l=2;lam=0.4]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any, Iterable

from .errors import LabelParseError, OutOfRange
from .scalar import DEFAULT_TOL, Tolerance

Label = Any


# ---------------------------------------------------------------------------
# label types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class MinimalLabel:
    """Kac label (r,s) of a Virasoro minimal-series simple module."""

    r: int
    s: int


@dataclass(frozen=True)
class FockLabel:
    """Fock module of a Heisenberg theory, by its highest weight vector."""

    lam: tuple[float, ...]

    def __post_init__(self):
        lam = self.lam
        if isinstance(lam, (int, float)):
            lam = (float(lam),)
        object.__setattr__(self, "lam", tuple(float(x) for x in lam))


@dataclass(frozen=True)
class PiLabel:
    """Pi(0)-module Pi_l(lam); lam is periodic with period 1."""

    ell: int
    lam: float


@dataclass(frozen=True)
class SingletFock:
    """Generic singlet Fock label F_lam."""

    lam: float


@dataclass(frozen=True)
class SingletFockRS:
    """Designated atypical singlet Fock label F_{r,s} at weight alpha_{r,s}."""

    r: int
    s: int


@dataclass(frozen=True)
class SingletAtom:
    """Non-standard simple singlet module M_{r,s}, r in Z, 1 <= s <= p-1."""

    r: int
    s: int


@dataclass(frozen=True)
class SingletFbar:
    """The length-2 singlet module Fbar_{r,s}."""

    r: int
    s: int


@dataclass(frozen=True)
class Sl2Std:
    """Standard (relaxed) sl2 module: spectral flow ell, weight lam mod 2, Kac pair (r,s)."""

    ell: int
    lam: float
    r: int
    s: int


@dataclass(frozen=True)
class Sl2EPlus:
    """Atypical standard sl2 module at weight lambda_{r,s}."""

    ell: int
    r: int
    s: int


@dataclass(frozen=True)
class Sl2EMinus:
    """Mirror atypical standard sl2 module (weight lambda_{u-r,v-s} family)."""

    ell: int
    r: int
    s: int


@dataclass(frozen=True)
class Sl2DPlus:
    """Highest/lowest-weight discrete sl2 simple, + series."""

    ell: int
    r: int
    s: int


@dataclass(frozen=True)
class Sl2DMinus:
    """Discrete sl2 simple, - series; the canonical form of all non-generic simples."""

    ell: int
    r: int
    s: int


@dataclass(frozen=True)
class Sl2L:
    """sl2 simple L_{r,0} (finite-type top); identified with a flowed D- label."""

    ell: int
    r: int


@dataclass(frozen=True)
class Sl2Stag:
    """Staggered (projective, non-simple) sl2 module at a non-generic weight."""

    ell: int
    r: int
    s: int


# ---------------------------------------------------------------------------
# exact weight formulas
# ---------------------------------------------------------------------------

def delta_rs(u: int, v: int, r: int, s: int) -> Fraction:
    """Conformal weight ((vr-us)^2 - v^2) / (4uv), exact."""
    return Fraction((v * r - u * s) ** 2 - v * v, 4 * u * v)


def lambda_rs(u: int, v: int, r: int, s: int) -> Fraction:
    """Atypical sl2 weight r - 1 - (u/v) s, exact."""
    return Fraction(r - 1) - Fraction(u, v) * s


def singlet_alpha_rs(p: int, r: int, s: int) -> float:
    """Fock weight alpha_{r,s} = (1-r)/2 a+ + (1-s)/2 a- with a+ = sqrt(2p), a- = -sqrt(2/p)."""
    import math

    return (1 - r) / 2 * math.sqrt(2 * p) + (1 - s) / 2 * (-math.sqrt(2 / p))


def singlet_atypical(p: int, lam: float, eps: float = 1e-9) -> SingletFockRS | None:
    """Decode lam as alpha_{r,s} with 1 <= s <= p-1 if it is within eps of one.

    Works through the integer grading n = s-1-p(r-1) = a+ * lam.
    """
    import math

    rho = math.sqrt(2 * p) * lam
    n = round(rho)
    if abs(rho - n) > math.sqrt(2 * p) * eps:
        return None
    s = (n % p) + 1
    if s > p - 1:
        return None
    r = 1 + (s - 1 - n) // p
    return SingletFockRS(r, s)


def mod_dist(x: float, period: float) -> float:
    """Distance from x to 0 modulo the given period."""
    d = x % period
    return min(d, period - d)


# ---------------------------------------------------------------------------
# canonicalization
# ---------------------------------------------------------------------------

def kac_window_check(u: int, v: int, r: int, s: int) -> None:
    if not (1 <= r <= u - 1 and 1 <= s <= v - 1):
        raise OutOfRange(f"(r,s)=({r},{s}) outside the ({u},{v}) window")


def kac_representative(u: int, v: int, r: int, s: int) -> tuple[int, int]:
    """Representative of {(r,s), (u-r,v-s)} with smaller s, ties broken by smaller r."""
    a, b = (r, s), (u - r, v - s)
    return min(a, b, key=lambda t: (t[1], t[0]))


def canonicalize(label: Label, theory, tol: Tolerance = DEFAULT_TOL) -> Label:
    """Canonical representative of a label under the theory's identifications.

    Idempotent; raises OutOfRange for invalid indices.  Continuous weights
    within eps_exclusion of an atypical point are snapped onto it.
    """
    if isinstance(label, MinimalLabel):
        u, v = theory.u, theory.v
        kac_window_check(u, v, label.r, label.s)
        return MinimalLabel(*kac_representative(u, v, label.r, label.s))

    if isinstance(label, PiLabel):
        lam = label.lam % 1.0
        if 1.0 - lam <= tol.eps_exclusion:
            lam = 0.0
        return PiLabel(label.ell, lam)

    if isinstance(label, FockLabel):
        return label

    if isinstance(label, SingletFock):
        snapped = singlet_atypical(theory.p, label.lam, tol.eps_exclusion)
        return snapped if snapped is not None else label

    if isinstance(label, (SingletFockRS, SingletAtom, SingletFbar)):
        if not 1 <= label.s <= theory.p - 1:
            raise OutOfRange(f"s={label.s} outside 1..{theory.p - 1}")
        return label

    if isinstance(label, Sl2L):
        u, v = theory.u, theory.v
        if not 1 <= label.r <= u - 1:
            raise OutOfRange(f"r={label.r} outside 1..{u - 1}")
        # sigma^l L_{r,0} = sigma^{l+1} D-_{u-r,v-1}
        return Sl2DMinus(label.ell + 1, u - label.r, v - 1)

    if isinstance(label, Sl2DPlus):
        u, v = theory.u, theory.v
        kac_window_check(u, v, label.r, label.s)
        if label.s != v - 1:
            # sigma^l D+_{r,s} = sigma^{l+1} D-_{u-r,v-1-s}
            return Sl2DMinus(label.ell + 1, u - label.r, v - 1 - label.s)
        # sigma^l D+_{r,v-1} = sigma^{l+2} D-_{r,v-1}
        return Sl2DMinus(label.ell + 2, label.r, v - 1)

    if isinstance(label, (Sl2DMinus, Sl2EPlus, Sl2EMinus, Sl2Stag)):
        kac_window_check(theory.u, theory.v, label.r, label.s)
        return label

    if isinstance(label, Sl2Std):
        u, v = theory.u, theory.v
        kac_window_check(u, v, label.r, label.s)
        rc, sc = kac_representative(u, v, label.r, label.s)
        lam = label.lam % 2.0
        if 2.0 - lam <= tol.eps_exclusion:
            lam = 0.0
        for (a, b) in ((rc, sc), (u - rc, v - sc)):
            if mod_dist(lam - float(lambda_rs(u, v, a, b)), 2.0) <= tol.eps_exclusion:
                return Sl2EPlus(label.ell, a, b)
        return Sl2Std(label.ell, lam, rc, sc)

    raise TypeError(f"cannot canonicalize {type(label).__name__}")


# ---------------------------------------------------------------------------
# ordering, distances, rendering
# ---------------------------------------------------------------------------

_KIND_ORDER = [
    MinimalLabel, FockLabel, PiLabel,
    SingletAtom, SingletFockRS, SingletFock, SingletFbar,
    Sl2DMinus, Sl2DPlus, Sl2L, Sl2EPlus, Sl2EMinus, Sl2Std, Sl2Stag,
]


def label_sort_key(label: Label) -> tuple:
    """Deterministic total order across all label kinds."""
    kind = _KIND_ORDER.index(type(label))
    vals = []
    for f in fields(label):
        val = getattr(label, f.name)
        if isinstance(val, tuple):
            vals.extend(float(x) for x in val)
        else:
            vals.append(float(val))
    return (kind, tuple(vals))


def label_distance(a: Label, b: Label) -> float:
    """Distance between labels of the same kind; inf across kinds or integer mismatch.

    Continuous weights are compared modulo the lattice the theory identifies
    them under (2 for sl2 standards, 1 for Pi(0) labels).
    """
    if type(a) is not type(b):
        return float("inf")
    if isinstance(a, Sl2Std):
        if (a.ell, a.r, a.s) != (b.ell, b.r, b.s):
            return float("inf")
        return mod_dist(a.lam - b.lam, 2.0)
    if isinstance(a, PiLabel):
        if a.ell != b.ell:
            return float("inf")
        return mod_dist(a.lam - b.lam, 1.0)
    if isinstance(a, SingletFock):
        return abs(a.lam - b.lam)
    if isinstance(a, FockLabel):
        return max(abs(x - y) for x, y in zip(a.lam, b.lam)) if len(a.lam) == len(b.lam) else float("inf")
    return 0.0 if a == b else float("inf")


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def render_label(label: Label) -> str:
    """Stable text form of a label (inverse of `parse_label`)."""
    if isinstance(label, MinimalLabel):
        return f"({label.r},{label.s})"
    if isinstance(label, FockLabel):
        return f"Fock[lam={','.join(_fmt(x) for x in label.lam)}]"
    if isinstance(label, PiLabel):
        return f"Pi[l={label.ell};lam={_fmt(label.lam)}]"
    if isinstance(label, SingletFock):
        return f"F[lam={_fmt(label.lam)}]"
    if isinstance(label, SingletFockRS):
        return f"F[r={label.r},s={label.s}]"
    if isinstance(label, SingletAtom):
        return f"M[r={label.r},s={label.s}]"
    if isinstance(label, SingletFbar):
        return f"Fbar[r={label.r},s={label.s}]"
    if isinstance(label, Sl2Std):
        return f"E[l={label.ell};lam={_fmt(label.lam)};r={label.r},s={label.s}]"
    if isinstance(label, Sl2EPlus):
        return f"E+[l={label.ell};r={label.r},s={label.s}]"
    if isinstance(label, Sl2EMinus):
        return f"E-[l={label.ell};r={label.r},s={label.s}]"
    if isinstance(label, Sl2DPlus):
        return f"D+[l={label.ell};r={label.r},s={label.s}]"
    if isinstance(label, Sl2DMinus):
        return f"D-[l={label.ell};r={label.r},s={label.s}]"
    if isinstance(label, Sl2L):
        return f"L[l={label.ell};r={label.r}]"
    if isinstance(label, Sl2Stag):
        return f"S[l={label.ell};r={label.r},s={label.s}]"
    raise TypeError(f"cannot render {type(label).__name__}")


_PAIR_RE = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")
_BRACKET_RE = re.compile(r"^(\w[\w+-]*)\[(.*)\]$")


def _parse_kv(body: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for part in re.split(r"[;,]", body):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise LabelParseError(f"expected key=value, got {part!r}")
        key, val = part.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def parse_label(text: str) -> Label:
    """Parse the documented label grammar.

    Parenthesized integer pairs are Kac labels; bracketed key=value lists are
    composite labels keyed by the head symbol.
    """
    text = text.strip()
    m = _PAIR_RE.match(text)
    if m:
        return MinimalLabel(int(m.group(1)), int(m.group(2)))
    m = _BRACKET_RE.match(text)
    if not m:
        raise LabelParseError(f"unrecognized label {text!r}")
    head, body = m.group(1), m.group(2)
    kv = _parse_kv(body)
    try:
        if head == "Fock":
            return FockLabel(tuple(float(x) for x in kv["lam"].split(",")))
        if head == "Pi":
            return PiLabel(int(kv["l"]), float(kv["lam"]))
        if head == "F":
            if "lam" in kv:
                return SingletFock(float(kv["lam"]))
            return SingletFockRS(int(kv["r"]), int(kv["s"]))
        if head == "M":
            return SingletAtom(int(kv["r"]), int(kv["s"]))
        if head == "Fbar":
            return SingletFbar(int(kv["r"]), int(kv["s"]))
        if head == "E":
            return Sl2Std(int(kv["l"]), float(kv["lam"]), int(kv["r"]), int(kv["s"]))
        if head == "E+":
            return Sl2EPlus(int(kv["l"]), int(kv["r"]), int(kv["s"]))
        if head == "E-":
            return Sl2EMinus(int(kv["l"]), int(kv["r"]), int(kv["s"]))
        if head == "D+":
            return Sl2DPlus(int(kv["l"]), int(kv["r"]), int(kv["s"]))
        if head == "D-":
            return Sl2DMinus(int(kv["l"]), int(kv["r"]), int(kv["s"]))
        if head == "L":
            return Sl2L(int(kv["l"]), int(kv["r"]))
        if head == "S":
            return Sl2Stag(int(kv["l"]), int(kv["r"]), int(kv["s"]))
    except KeyError as exc:
        raise LabelParseError(f"label {text!r} is missing field {exc}") from exc
    except ValueError as exc:
        raise LabelParseError(f"label {text!r}: {exc}") from exc
    raise LabelParseError(f"unknown label head {head!r}")


# ---------------------------------------------------------------------------
# Grothendieck vectors
# ---------------------------------------------------------------------------

class GrothendieckVector:
    """Integer linear combination of canonical labels (free abelian group).

    Zero coefficients are never stored; iteration order is deterministic.
    """

    __slots__ = ("_coeffs",)

    #: labels closer than this in their continuous coordinates are the same class
    MERGE_TOL = 1e-9

    def __init__(self, items: Iterable[tuple[Label, int]] = ()):
        coeffs: dict[Label, int] = {}
        for label, c in items:
            if not c:
                continue
            if label not in coeffs:
                # coalesce float weights produced along different paths
                for key in coeffs:
                    if label_distance(label, key) <= self.MERGE_TOL:
                        label = key
                        break
            coeffs[label] = coeffs.get(label, 0) + c
            if coeffs[label] == 0:
                del coeffs[label]
        self._coeffs = coeffs

    @classmethod
    def unit(cls, label: Label, coeff: int = 1) -> "GrothendieckVector":
        return cls([(label, coeff)])

    @classmethod
    def zero(cls) -> "GrothendieckVector":
        return cls()

    def items(self) -> list[tuple[Label, int]]:
        return sorted(self._coeffs.items(), key=lambda kv: label_sort_key(kv[0]))

    def labels(self) -> list[Label]:
        return [label for label, _ in self.items()]

    def coeff(self, label: Label) -> int:
        return self._coeffs.get(label, 0)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __add__(self, other: "GrothendieckVector") -> "GrothendieckVector":
        return GrothendieckVector(list(self._coeffs.items()) + list(other._coeffs.items()))

    def __sub__(self, other: "GrothendieckVector") -> "GrothendieckVector":
        return self + (-1) * other

    def __rmul__(self, n: int) -> "GrothendieckVector":
        return GrothendieckVector((label, n * c) for label, c in self._coeffs.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, GrothendieckVector) and self._coeffs == other._coeffs

    def __hash__(self):
        raise TypeError("GrothendieckVector is unhashable")

    def __repr__(self) -> str:
        return f"GrothendieckVector({self.items()!r})"

    def map_labels(self, fn) -> "GrothendieckVector":
        return GrothendieckVector((fn(label), c) for label, c in self._coeffs.items())

    def isclose(self, other: "GrothendieckVector", weight_tol: float = 1e-9) -> bool:
        """Equality up to weight_tol in the continuous label coordinates."""
        mine = self.items()
        theirs = list(other.items())
        if len(mine) != len(theirs):
            return False
        for label, c in mine:
            hit = None
            for i, (lab2, c2) in enumerate(theirs):
                if c == c2 and label_distance(label, lab2) <= weight_tol:
                    hit = i
                    break
            if hit is None:
                return False
            theirs.pop(hit)
        return True

    def render(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for label, c in self.items():
            head = "" if c == 1 else ("-" if c == -1 else f"{c}*")
            parts.append(f"{head}{render_label(label)}")
        return " + ".join(parts).replace("+ -", "- ")
