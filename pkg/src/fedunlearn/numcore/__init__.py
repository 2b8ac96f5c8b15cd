"""Numeric core: MLP forward/backward, Adam, cosine similarity.

Hot kernels come in two interchangeable flavors (vectorized numpy, and
numba-compiled explicit loops); see `backend` for how one is selected.
"""

from .backend import BACKEND_NAME, ENV_VAR, kernels, load_kernels
from .features import cosine_sim, cosine_sim_grad
from .net import (
    MlpArch,
    MlpModel,
    backprop,
    ce_grad,
    flatten,
    forward,
    gaussian_init,
    loss_ce,
    unflatten,
)
from .optim import AdamState, adam_step

__all__ = [
    "BACKEND_NAME",
    "ENV_VAR",
    "kernels",
    "load_kernels",
    "cosine_sim",
    "cosine_sim_grad",
    "MlpArch",
    "MlpModel",
    "backprop",
    "ce_grad",
    "flatten",
    "forward",
    "gaussian_init",
    "loss_ce",
    "unflatten",
    "AdamState",
    "adam_step",
]
