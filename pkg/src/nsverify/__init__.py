"""Exact and numerical verification of closed-form incompressible Navier-Stokes flows."""

from nsverify.exactfield import (
    ALPHA,
    Coeff,
    DecayField,
    FreqKey,
    NotAGradientError,
    RealTrigPoly,
    TrigPoly,
    heat_propagate,
    tp_add,
    tp_constant_mode,
    tp_diff,
    tp_eval,
    tp_mul,
    tp_potential,
    tp_subst_phases,
)

__all__ = [
    "ALPHA",
    "Coeff",
    "DecayField",
    "FreqKey",
    "NotAGradientError",
    "RealTrigPoly",
    "TrigPoly",
    "heat_propagate",
    "tp_add",
    "tp_constant_mode",
    "tp_diff",
    "tp_eval",
    "tp_mul",
    "tp_potential",
    "tp_subst_phases",
]

__version__ = "0.1.0"
