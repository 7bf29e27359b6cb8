"""
KL coefficient controllers.

FixedKLController keeps beta constant. AdaptiveKLController nudges beta toward
a KL setpoint: the proportional error KL / target - 1 is clipped to
[-0.2, 0.2] and scaled by the number of trajectories over the horizon.
"""

from typing import Union

import numpy as np

from .models.policy_models import PpoConfig

# Bound of the proportional error per update
ERROR_CLIP = 0.2


class FixedKLController:
    def __init__(self, beta: float):
        self.beta = beta

    def update(self, current_kl: float, n_steps: int) -> float:
        return self.beta


class AdaptiveKLController:
    """
    Proportional controller on beta.

    Example:
        >>> controller = AdaptiveKLController(0.2, target=1.0, horizon=1000)
        >>> beta = controller.update(current_kl=3.0, n_steps=100)  # KL too high: beta rises to 0.204
    """

    def __init__(self, beta: float, target: float, horizon: int):
        self.beta = beta
        self.target = target
        self.horizon = horizon

    def update(self, current_kl: float, n_steps: int) -> float:
        if not np.isfinite(current_kl):
            return self.beta
        error = float(np.clip(current_kl / self.target - 1.0, -ERROR_CLIP, ERROR_CLIP))
        self.beta *= 1.0 + error * n_steps / self.horizon
        return self.beta


def make_kl_controller(config: PpoConfig) -> Union[FixedKLController, AdaptiveKLController]:
    if config.kl_target is None:
        return FixedKLController(config.beta)
    return AdaptiveKLController(config.beta, config.kl_target, config.kl_horizon)
