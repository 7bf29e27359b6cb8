"""
Models for the policy optimizer.
"""

from .policy_models import (
    CURVE_COLUMNS,
    KL_IDENTITY_TOLERANCE,
    AlignmentCurve,
    CurvePoint,
    Demonstration,
    PolicyPrompt,
    PpoConfig,
    PpoStats,
    SftConfig,
    SftTrace,
    Trajectory,
)

__all__ = [
    "CURVE_COLUMNS",
    "KL_IDENTITY_TOLERANCE",
    "AlignmentCurve",
    "CurvePoint",
    "Demonstration",
    "PolicyPrompt",
    "PpoConfig",
    "PpoStats",
    "SftConfig",
    "SftTrace",
    "Trajectory",
]
