"""Closed-form least-squares rigid alignment of corresponded 3D point sets.

Solves argmin over SE(3) of sum_i w_i ||target_i - (R @ source_i + T)||^2 via
the Kabsch construction: centroid subtraction, SVD of the cross-covariance,
and a determinant correction that excludes reflections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, NonPositiveWeightSumError, ShapeMismatchError
from .geometry import Pose

# Smallest-to-largest singular value ratio of the cross-covariance below which
# the rotation about the weak axis is unobservable.
DEGENERACY_THRESHOLD = 1e-9


@dataclass(frozen=True, eq=False)
class RegistrationResult:
    """Recovered transform plus fit diagnostics.

    ``condition`` is the smallest-to-largest singular value ratio of the
    cross-covariance; values near zero mean the geometry barely constrains
    the rotation.
    """

    pose: Pose
    rms_residual: float
    condition: float


def _as_point_set(points, name: str) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ShapeMismatchError(f"{name} must have shape (n, 3), got {pts.shape}")
    if pts.shape[0] < 3:
        raise ShapeMismatchError(f"{name} needs at least 3 points, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite coordinates")
    return pts


def register(target, source) -> RegistrationResult:
    """Best rigid transform taking ``source`` onto ``target``.

    Points correspond index-wise. Returns the global minimizer of
    sum_i ||target_i - (R @ source_i + T)||^2 with det(R) = +1.

    Raises ShapeMismatchError for unequal lengths and
    DegenerateGeometryError when the source geometry (collinear or
    coincident points) cannot pin down a unique rotation.
    """
    return register_weighted(target, source, None)


def register_weighted(target, source, weights) -> RegistrationResult:
    """As ``register`` but minimizing the ``weights``-weighted squared error.

    ``weights=None`` means uniform. With uniform weights the result matches
    ``register`` to floating-point precision.
    """
    tgt = _as_point_set(target, "target")
    src = _as_point_set(source, "source")
    if tgt.shape[0] != src.shape[0]:
        raise ShapeMismatchError(
            f"point sets must have equal lengths, got {tgt.shape[0]} and {src.shape[0]}"
        )
    n = src.shape[0]
    if weights is None:
        w = None
        w_sum = float(n)
        src_centroid = src.mean(axis=0)
        tgt_centroid = tgt.mean(axis=0)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise ShapeMismatchError(f"weights must have shape ({n},), got {w.shape}")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        w_sum = float(w.sum())
        if w_sum <= 0.0:
            raise NonPositiveWeightSumError("weights must sum to a positive value")
        src_centroid = (w[:, None] * src).sum(axis=0) / w_sum
        tgt_centroid = (w[:, None] * tgt).sum(axis=0) / w_sum

    src_c = src - src_centroid
    tgt_c = tgt - tgt_centroid
    if w is None:
        cross_cov = src_c.T @ tgt_c
    else:
        cross_cov = (w[:, None] * src_c).T @ tgt_c

    u, sing, vt = np.linalg.svd(cross_cov)
    condition = float(sing[2] / sing[0]) if sing[0] > 0.0 else 0.0
    if condition < DEGENERACY_THRESHOLD:
        raise DegenerateGeometryError(
            f"cross-covariance condition {condition:.3e} below {DEGENERACY_THRESHOLD:.0e}; "
            "source points are (near-)collinear or coincident"
        )
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    rotation = v @ np.diag([1.0, 1.0, d]) @ u.T
    translation = tgt_centroid - rotation @ src_centroid

    residuals = tgt - (src @ rotation.T + translation)
    sq = np.einsum("ij,ij->i", residuals, residuals)
    if w is None:
        rms = float(np.sqrt(sq.mean()))
    else:
        rms = float(np.sqrt((w * sq).sum() / w_sum))
    return RegistrationResult(Pose(rotation, translation), rms, condition)
