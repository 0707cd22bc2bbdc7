"""D2Q9 lattice Boltzmann solver for linear elastic waves in 2-D solids."""

from .boundaries import BoundarySpec, EdgeSpec
from .core import FieldState, MaterialParams, NumericalDivergence
from .lattice import D2Q9, LatticeD2Q9, check_isotropy
from .solver import ElasticLBM
from .sources import SourceSpec
from .spectral import SpectralOracle

__all__ = [
    "BoundarySpec", "D2Q9", "EdgeSpec", "ElasticLBM", "FieldState", "LatticeD2Q9",
    "MaterialParams", "NumericalDivergence", "SourceSpec", "SpectralOracle",
    "check_isotropy",
]
__version__ = "0.1.0"
