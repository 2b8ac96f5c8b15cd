"""Adam optimizer over flat parameter vectors, functional style."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, InputError
from .backend import kernels as K


@dataclass
class AdamState:
    """First/second moment accumulators plus the 1-based step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.99
    eps: float = 1e-8

    @classmethod
    def fresh(cls, dim: int, beta1: float = 0.9, beta2: float = 0.99, eps: float = 1e-8) -> "AdamState":
        if dim < 1:
            raise InputError(f"parameter dimension must be >= 1, got {dim}")
        return cls(m=np.zeros(dim), v=np.zeros(dim), beta1=beta1, beta2=beta2, eps=eps)


def adam_step(params: np.ndarray, grad: np.ndarray, state: AdamState, lr: float) -> "tuple[np.ndarray, AdamState]":
    """One bias-corrected Adam update; returns new params and advanced state."""
    params = np.ascontiguousarray(params, dtype=np.float64)
    grad = np.ascontiguousarray(grad, dtype=np.float64)
    if grad.shape != params.shape or state.m.shape != params.shape:
        raise DimensionError(
            f"params {params.shape}, grad {grad.shape}, state {state.m.shape} must all match"
        )
    t = state.t + 1
    new_params, m, v = K.adam_update(
        params, grad, state.m, state.v, t, lr, state.beta1, state.beta2, state.eps
    )
    return new_params, AdamState(m=m, v=v, t=t, beta1=state.beta1, beta2=state.beta2, eps=state.eps)
