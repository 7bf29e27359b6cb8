"""
Small helpers shared by the training loops.
"""

from .schedules import derive_seed, warmup_cosine_schedule

__all__ = ["derive_seed", "warmup_cosine_schedule"]
