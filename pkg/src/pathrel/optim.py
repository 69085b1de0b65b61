"""AdaDelta parameter updates over a ParamStore."""

from __future__ import annotations

import numpy as np

from .autodiff import ParamStore


class AdaDeltaState:
    """Per-parameter running averages of squared gradients and updates.

    rho and epsilon default to the values from the method's original
    description; both accumulators start at zero and stay nonnegative.
    """

    def __init__(self, store: ParamStore, rho: float = 0.95, epsilon: float = 1e-6):
        if not 0.0 < rho < 1.0:
            raise ValueError(f"rho {rho} outside (0, 1)")
        if epsilon <= 0.0:
            raise ValueError(f"epsilon {epsilon} must be positive")
        self.rho = rho
        self.epsilon = epsilon
        self.sq_grad = {name: np.zeros_like(t.data) for name, t in store.items()}
        self.sq_update = {name: np.zeros_like(t.data) for name, t in store.items()}


def adadelta_step(store: ParamStore, state: AdaDeltaState) -> None:
    """Apply one accumulated-gradient update and zero the gradients.

    Per coordinate: E[g2] <- rho E[g2] + (1-rho) g2;
    dx = -(sqrt(E[dx2]+eps) / sqrt(E[g2]+eps)) g;
    E[dx2] <- rho E[dx2] + (1-rho) dx2;  x <- x + dx.
    Parameters with no accumulated gradient decay their E[g2] and move
    nowhere, matching g = 0.
    """
    rho, eps = state.rho, state.epsilon
    for name, tensor in store.items():
        g = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        eg2 = state.sq_grad[name]
        edx2 = state.sq_update[name]
        eg2 *= rho
        eg2 += (1.0 - rho) * g * g
        dx = -(np.sqrt(edx2 + eps) / np.sqrt(eg2 + eps)) * g
        edx2 *= rho
        edx2 += (1.0 - rho) * dx * dx
        tensor.data += dx
    store.zero_grad()
