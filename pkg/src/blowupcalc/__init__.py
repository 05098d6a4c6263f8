"""Blowup formulas for virtual integrals over moduli of sheaves, by wall-crossing.

The usual entry points:

    >>> from blowupcalc import donaldson_blowup, omega_series
    >>> donaldson_blowup(4)
    Fraction(-2, 1)
"""
from .chern import ChernCharacter, NotAdmissibleError, from_chern_classes, pullback, vdim
from .engine import (EngineError, ReductionResult, VerificationError, donaldson_blowup,
                     omega_series, reduce_to_base, standard_start)
from .geometry import SurfaceModel, generic_surface, projective_plane
from .insertion import parse_insertion
from .qseries import goettsche_euler, goettsche_poincare, z_a

__version__ = "0.1.0"

__all__ = [
    "ChernCharacter", "NotAdmissibleError", "from_chern_classes", "pullback", "vdim",
    "EngineError", "ReductionResult", "VerificationError", "donaldson_blowup",
    "omega_series", "reduce_to_base", "standard_start",
    "SurfaceModel", "generic_surface", "projective_plane", "parse_insertion",
    "goettsche_euler", "goettsche_poincare", "z_a",
]
