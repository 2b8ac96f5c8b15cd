"""Similarity measures over feature vectors."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateFeatureError, DimensionError

NORM_FLOOR = 1e-12


def cosine_sim(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two 1-D vectors.

    Rejects near-zero vectors outright instead of silently clamping: a
    contrastive loss on a degenerate feature is meaningless and usually
    signals a dead network.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionError(f"expected matching 1-D vectors, got {a.shape} and {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < NORM_FLOOR or nb < NORM_FLOOR:
        raise DegenerateFeatureError(
            f"feature norm below {NORM_FLOOR:g} (|a|={na:.3e}, |b|={nb:.3e})"
        )
    return float(np.dot(a, b) / (na * nb))


def cosine_sim_grad(a: np.ndarray, b: np.ndarray) -> "tuple[float, np.ndarray]":
    """cos(a, b) and its gradient w.r.t. the first argument."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise DimensionError(f"expected matching 1-D vectors, got {a.shape} and {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < NORM_FLOOR or nb < NORM_FLOOR:
        raise DegenerateFeatureError(
            f"feature norm below {NORM_FLOOR:g} (|a|={na:.3e}, |b|={nb:.3e})"
        )
    cos = float(np.dot(a, b) / (na * nb))
    grad = b / (na * nb) - cos * a / (na * na)
    return cos, grad
