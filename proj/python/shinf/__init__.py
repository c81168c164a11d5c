"""Strong H-infinity norms and fixed-structure synthesis for delay differential-algebraic systems."""

from ._core import (
    CausalityViolation,
    Certificate,
    DimensionError,
    InputError,
    Interconnection,
    NoStabilizingStart,
    NumericalFailure,
    StrongStabilityViolation,
    System,
    TransmissionPole,
    check,
    dense_hinf,
    strong_hinf,
    strong_norm_Ta,
    sweep,
    transfer,
)

__all__ = [
    "CausalityViolation",
    "Certificate",
    "DimensionError",
    "InputError",
    "Interconnection",
    "NoStabilizingStart",
    "NumericalFailure",
    "StrongStabilityViolation",
    "System",
    "TransmissionPole",
    "check",
    "dense_hinf",
    "strong_hinf",
    "strong_norm_Ta",
    "sweep",
    "transfer",
]
