"""
Selmer signature maps of odd degree number fields, modeled over F2.

Modules:
    f2linalg: Bit-packed vectors, matrices and canonical subspaces over F2
    symspace: Symmetric bilinear spaces, classification, Witt extension, isometry orders
    isotropic: Maximal totally isotropic subspaces of W ⊥ W' and the mass formula
    heuristics: Exact and certified predictions (2-ranks, signature ranks, splitting)
    montecarlo: Simulation of the random model against the predictions
    cubicforms: Binary cubic forms, reduction, maximality, field scans
    models: Dataclass models for CLI configuration and stored forms
    db: SQLite store of sampled cubic forms
    parser: Parsers for space and signature arguments
    errors: Exception hierarchy
"""

from .cubicforms import CubicForm, FormClassRecord
from .db import FormStore
from .errors import SelmerError
from .f2linalg import BitMatrix, BitVector, Subspace
from .heuristics import Signature, TruncatedReal
from .isotropic import IsoClass, MaxIsotropic, OrthoSum
from .models import CommandConfig, StoredForm
from .symspace import SpaceType, SymSpace

__all__ = [
    "BitMatrix",
    "BitVector",
    "CommandConfig",
    "CubicForm",
    "FormClassRecord",
    "FormStore",
    "IsoClass",
    "MaxIsotropic",
    "OrthoSum",
    "SelmerError",
    "Signature",
    "SpaceType",
    "StoredForm",
    "Subspace",
    "SymSpace",
    "TruncatedReal",
]
