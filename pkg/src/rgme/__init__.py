"""Fidelity-based (revised geometric) entanglement measure toolkit."""

from .linalg import DensityMatrix, NotPSDError, PureState, StructureError
from .measures import MeasureReport, bures_sq, fidelity, rgme_closed
from .separable import ProductEnsemble, SearchConfig, max_fidelity_separable, rgme_numeric
from .states import FamilyTag, StateFamily

__all__ = [
    "DensityMatrix", "PureState", "StructureError", "NotPSDError",
    "MeasureReport", "fidelity", "bures_sq", "rgme_closed",
    "ProductEnsemble", "SearchConfig", "max_fidelity_separable", "rgme_numeric",
    "FamilyTag", "StateFamily",
]
__version__ = "0.1.0"
