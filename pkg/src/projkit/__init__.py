"""Numerical toolkit for projections in truncated sequence models.

Submodules
----------
linalg
    Hermitian eigensolvers, spectral projections and Loewner-order tests.
pairgeom
    Geometry of a pair of projections: canonical decomposition, angle, distances.
seqmodel
    The truncated sequence model with alpha estimators and regularity checks.
nearest
    Nearby relatively compact and open/closed projections from a witness.
bounds
    Closed-form join bounds, their numeric oracles and sharpness witnesses.
catalog
    Worked examples with claimed values, plus matrix-lemma property suites.
"""

from . import bounds, catalog, linalg, nearest, pairgeom, seqmodel
from .config import DEFAULT_TOL, Tolerances

__version__ = "0.1.0"

__all__ = ["bounds", "catalog", "linalg", "nearest", "pairgeom", "seqmodel", "Tolerances", "DEFAULT_TOL"]
