import math

import numpy as np
from torch.optim import Optimizer
from torch.optim.lr_scheduler import LambdaLR


def warmup_cosine_schedule(optimizer: Optimizer, warmup_steps: int, total_steps: int) -> LambdaLR:
    """
    Linear warmup from 0 over `warmup_steps`, then cosine decay to 0 at `total_steps`.

    Call scheduler.step() once after every optimizer.step().
    """

    def factor(step: int) -> float:
        if step < warmup_steps:
            return step / max(1, warmup_steps)
        progress = (step - warmup_steps) / max(1, total_steps - warmup_steps)
        return 0.5 * (1.0 + math.cos(math.pi * min(1.0, progress)))

    return LambdaLR(optimizer, factor)


def derive_seed(*parts: int) -> int:
    """Deterministic 32-bit seed from a root seed and loop counters."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])
