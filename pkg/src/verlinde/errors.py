"""Exception types shared across the calculus engine."""

from __future__ import annotations


class CalculusError(Exception):
    """Base class for every error raised by this package."""


class ExceptionalPoint(CalculusError):
    """The spectral point lies in (or too close to) the exceptional set."""


class NotNearInteger(CalculusError):
    """A quantity that must round to an integer did not.

    Usually signals a wrong candidate basis or insufficient precision,
    never something to be silently clamped.
    """

    def __init__(self, value: complex, distance: float):
        super().__init__(f"{value!r} is {distance:.3e} from the nearest integer")
        self.value = value
        self.distance = distance


class OutOfRange(CalculusError):
    """Label indices outside the window admitted by the theory."""


class SingularMatrix(CalculusError):
    """Gram matrix of a Heisenberg theory is (numerically) degenerate."""


class LimitDisagreement(CalculusError):
    """The two iterated limit orders of a q(t,z) evaluation differ."""

    def __init__(self, value_tz: complex, value_zt: complex):
        super().__init__(
            f"t-then-z limit {value_tz!r} differs from z-then-t limit {value_zt!r}"
        )
        self.value_tz = value_tz
        self.value_zt = value_zt


class FusionUndecomposable(CalculusError):
    """A fusion callback could not decompose a product of standard labels."""


class IncompleteBasis(CalculusError):
    """Sampled decomposition left a residual: the candidate set misses a constituent."""


class IllConditioned(CalculusError):
    """The sampled linear system is too degenerate to trust."""


class NotProjectiveClass(CalculusError):
    """A Grothendieck vector is not a nonnegative combination of projective classes."""

    def __init__(self, remainder):
        super().__init__(f"unmatched remainder {remainder!r}")
        self.remainder = remainder


class UnsupportedPair(CalculusError):
    """Module kinds whose fusion product the theory does not determine."""


class LabelParseError(CalculusError):
    """A label string does not match the documented grammar."""
