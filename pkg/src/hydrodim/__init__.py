"""Generalized fractal dimensions of pure-point spectral measures and the
transport of the corresponding bound states."""
from .measure import AtomicMeasure, ball_mass, min_gap, normalize
from .spectra import Custom, DegenerateScaleWarning, Hydrogen, PowerLaw, family_from_dict
from .states import (BoundState, eigen_state, hybrid_state, power_state, random_state,
                     sigma_state, spectral_measure)
from .dimensions import (DimensionScan, box_integral, correlation_sum, scan,
                         subsequence_scan, upper_envelope_check)
from .dynamics import Basis, moment_trace, transport_exponents

__version__ = "0.1.0"
