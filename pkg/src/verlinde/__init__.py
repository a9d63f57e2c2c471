"""Fusion rules, modular S-kernels and quantum dimensions for four families of
module categories: Virasoro minimal series, Heisenberg Fock modules, the
lattice-type Pi(0) theory, the singlet theories, and admissible-level sl2.
"""

from . import labels, resolution, scalar, semisimple, singlet, sl2
from .errors import (CalculusError, ExceptionalPoint, FusionUndecomposable,
                     IllConditioned, IncompleteBasis, LabelParseError,
                     LimitDisagreement, NotNearInteger, NotProjectiveClass,
                     OutOfRange, SingularMatrix, UnsupportedPair)
from .labels import GrothendieckVector, canonicalize, parse_label, render_label
from .scalar import (DEFAULT_TOL, RationalPhase, RealPoint, Sl2Point,
                     Tolerance, phase, round_to_integer, sample_points,
                     trig_quotient)
from .semisimple import (HeisenbergTheory, MinimalModelTheory, PiTheory,
                         heis_qdim, heis_S_kernel, pi0_fusion, pi0_qdim,
                         pi0_S_kernel, vir_fusion_closed, vir_fusion_verlinde,
                         vir_S)
from .singlet import SingletTheory
from .sl2 import Sl2Theory

__version__ = "0.1.0"
