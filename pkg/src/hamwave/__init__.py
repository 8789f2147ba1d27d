"""hamwave: solitary waves and orbital stability for dispersive model equations
(fractional KdV / Benjamin-Ono family) and capillary-gravity water waves with
a submerged point vortex."""

__version__ = "0.1.0"

from . import errors, spectral, fkdv, pv
from .spectral import Grid, RealField, SpectralField, MultiplierSymbol
