"""Recover camera poses and focal lengths from raxel images.

Inverts the raxel encoding in two closed-form steps per frame:

1. pose: the target raxel grid is a rigid transform of the reference
   grid (shared intrinsics), so flattening both to corresponded point
   sets and solving orthogonal Procrustes recovers the relative pose.
2. focal: rotate the rays back into the camera frame, then each pixel
   votes u*z/x for fx (and v*z/y for fy); the median of the votes is
   the estimate. The median makes the estimator immune to up to half
   the pixels being corrupted.

The principal point is taken as the image center unless the caller
supplies one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientInliersError, RaxelkitError, ShapeMismatchError
from .geometry import Pose
from .rays import RaxelImage, grid_pixel_coordinates
from .registration import RegistrationResult, register

INLIER_EPS = 1e-6
MIN_INLIER_FRACTION = 0.1


@dataclass(frozen=True)
class DecodedFrame:
    """One frame's recovered pose and focal lengths, with fit diagnostics."""

    pose: Pose
    fx_hat: float
    fy_hat: float
    pose_residual: float
    inlier_fraction: float


@dataclass(frozen=True)
class DecodeFailure:
    """A frame that could not be decoded: its position and the error."""

    position: int
    error: RaxelkitError


def recover_pose(target: RaxelImage, reference: RaxelImage) -> RegistrationResult:
    """Rigid transform taking the reference raxel bundle onto the target's.

    When the reference image is the canonical frame (identity pose), the
    recovered pose is the target frame's relative pose. Raises
    ShapeMismatchError on differing grids and DegenerateGeometryError when
    the bundles do not pin down a rotation.
    """
    if target.data.shape != reference.data.shape:
        raise ShapeMismatchError(
            f"raxel grids differ: {target.data.shape} vs {reference.data.shape}"
        )
    return register(target.data.reshape(-1, 3), reference.data.reshape(-1, 3))


def _lower_median(values: np.ndarray) -> float:
    k = (values.size - 1) // 2
    return float(np.partition(values, k)[k])


def recover_focal(
    target: RaxelImage,
    pose: Pose,
    width: int,
    height: int,
    cx: float | None = None,
    cy: float | None = None,
) -> tuple[float, float, float]:
    """Median-of-ratios focal estimate from one raxel image and its pose.

    Subtracts the pose translation, rotates the rays back to the camera
    frame, and takes per-pixel ratios u*z/x and v*z/y with (u, v) measured
    from the principal point (image center by default). Pixels whose
    denominator or z component is within INLIER_EPS of zero are excluded.

    Returns (fx_hat, fy_hat, inlier_fraction) where the fraction is the
    smaller of the two axes' inlier shares. Raises InsufficientInliersError
    if either axis keeps fewer than MIN_INLIER_FRACTION of the pixels.
    """
    if cx is None:
        cx = width / 2.0
    if cy is None:
        cy = height / 2.0
    u, v = grid_pixel_coordinates(width, height)
    if (v.size, u.size) != (target.height_r, target.width_r):
        raise ShapeMismatchError(
            f"image dimensions {width}x{height} map to a "
            f"{v.size}x{u.size} grid, but the raxel grid is "
            f"{target.height_r}x{target.width_r}"
        )

    local = (target.data - pose.translation) @ pose.rotation
    x, y, z = local[:, :, 0], local[:, :, 1], local[:, :, 2]
    u_c = np.broadcast_to((u - cx)[None, :], x.shape)
    v_c = np.broadcast_to((v - cy)[:, None], y.shape)

    z_ok = z > INLIER_EPS
    mask_x = z_ok & (np.abs(x) > INLIER_EPS)
    mask_y = z_ok & (np.abs(y) > INLIER_EPS)
    total = x.size
    frac_x = np.count_nonzero(mask_x) / total
    frac_y = np.count_nonzero(mask_y) / total
    if frac_x < MIN_INLIER_FRACTION or frac_y < MIN_INLIER_FRACTION:
        raise InsufficientInliersError(
            f"focal inlier fractions {frac_x:.3f}/{frac_y:.3f} below "
            f"{MIN_INLIER_FRACTION}"
        )

    fx_hat = _lower_median(u_c[mask_x] * z[mask_x] / x[mask_x])
    fy_hat = _lower_median(v_c[mask_y] * z[mask_y] / y[mask_y])
    return fx_hat, fy_hat, min(frac_x, frac_y)


def decode_trajectory(
    images: list[RaxelImage],
    reference_index: int,
    width: int,
    height: int,
    cx: float | None = None,
    cy: float | None = None,
) -> tuple[list[DecodedFrame | None], list[DecodeFailure]]:
    """Decode every raxel image against the reference frame's image.

    Frames are solved independently; a degenerate frame is reported in the
    failure list (with its position) and leaves a None placeholder, without
    aborting the remaining frames. The reference frame's pose is set to the
    exact identity, not solved.

    Returns (decoded, failures) where decoded matches the input order.
    """
    n = len(images)
    if not 0 <= reference_index < n:
        raise IndexError(f"reference_index {reference_index} out of range for {n} images")
    ref_shape = images[reference_index].data.shape
    for pos, img in enumerate(images):
        if img.data.shape != ref_shape:
            raise ShapeMismatchError(
                f"image {pos} grid {img.data.shape} differs from reference grid {ref_shape}"
            )

    decoded: list[DecodedFrame | None] = [None] * n
    failures: list[DecodeFailure] = []
    reference = images[reference_index]
    for pos, img in enumerate(images):
        try:
            if pos == reference_index:
                pose, residual = Pose.identity(), 0.0
            else:
                result = recover_pose(img, reference)
                pose, residual = result.pose, result.rms_residual
            fx_hat, fy_hat, inlier_fraction = recover_focal(
                img, pose, width, height, cx=cx, cy=cy
            )
        except RaxelkitError as err:
            failures.append(DecodeFailure(position=pos, error=err))
            continue
        decoded[pos] = DecodedFrame(
            pose=pose,
            fx_hat=fx_hat,
            fy_hat=fy_hat,
            pose_residual=residual,
            inlier_fraction=inlier_fraction,
        )
    return decoded, failures
