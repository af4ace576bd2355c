"""Pose-accuracy metrics, synthetic trajectories, perturbation models, and
the encode-perturb-decode-re-encode consistency harness.

The harness measures how well the closed-form decoders survive controlled
damage to the raxel images: additive Gaussian noise, uniform quantization
(a stand-in for storing raxels at reduced precision), and pixel dropout.
Clean inputs round-trip to within floating-point error; the perturbed
error curves are what the benchmark sweep records.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .decode import decode_trajectory
from .errors import (
    LengthMismatchError,
    RaxelkitError,
    ReferenceMismatchError,
    TooFewFramesError,
)
from .geometry import (
    CameraFrame,
    Intrinsics,
    Pose,
    Trajectory,
    axis_angle_rotation,
    canonicalize,
    geodesic_rotation_distance,
    rotation_angle,
)
from .rays import RaxelImage, encode_trajectory_raxels

Y_AXIS = np.array([0.0, 1.0, 0.0])
X_AXIS = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True, eq=False)
class PoseErrorReport:
    """Per-frame and mean pose errors of a predicted trajectory.

    Means are taken over the non-reference frames only (the reference is
    identity by construction on both sides).
    """

    rotation_error: np.ndarray
    translation_error: np.ndarray
    mean_rotation_error: float
    mean_translation_error: float


class PerturbationKind(enum.Enum):
    GAUSSIAN_PER_PIXEL = "gaussian"
    UNIFORM_QUANTIZE = "quantize"
    PIXEL_DROPOUT = "dropout"


class TrajectoryKind(enum.Enum):
    ARC_LEFT = "arcleft"
    ARC_RIGHT = "arcright"
    ORBIT = "orbit"
    LINE = "line"
    STILL = "still"


@dataclass(frozen=True)
class PerturbationSpec:
    """What to do to a raxel image: noise sigma, bit depth, or dropout
    fraction, depending on kind. Deterministic per seed."""

    kind: PerturbationKind
    magnitude: float
    seed: int = 0

    def __post_init__(self):
        m = self.magnitude
        if self.kind is PerturbationKind.GAUSSIAN_PER_PIXEL:
            if m < 0:
                raise ValueError(f"noise sigma must be >= 0, got {m}")
        elif self.kind is PerturbationKind.UNIFORM_QUANTIZE:
            if m != int(m) or not 1 <= m <= 16:
                raise ValueError(f"bit depth must be an integer in [1, 16], got {m}")
        else:
            if not 0.0 <= m < 1.0:
                raise ValueError(f"dropout fraction must lie in [0, 1), got {m}")


def pose_errors(predicted: Trajectory, ground_truth: Trajectory) -> PoseErrorReport:
    """Per-frame geodesic rotation error and translation distance.

    Both trajectories must be canonicalized to the same reference index so
    the per-frame poses are directly comparable.
    """
    if len(predicted) != len(ground_truth):
        raise LengthMismatchError(
            f"trajectory lengths differ: {len(predicted)} vs {len(ground_truth)}"
        )
    if predicted.reference_index != ground_truth.reference_index:
        raise ReferenceMismatchError(
            f"reference indices differ: {predicted.reference_index} "
            f"vs {ground_truth.reference_index}"
        )
    n = len(predicted)
    rot = np.empty(n)
    trans = np.empty(n)
    for k, (p, g) in enumerate(zip(predicted.frames, ground_truth.frames)):
        rot[k] = geodesic_rotation_distance(p.pose, g.pose)
        trans[k] = float(np.linalg.norm(p.pose.translation - g.pose.translation))
    keep = np.arange(n) != predicted.reference_index
    mean_rot = float(rot[keep].mean()) if keep.any() else 0.0
    mean_trans = float(trans[keep].mean()) if keep.any() else 0.0
    rot.flags.writeable = False
    trans.flags.writeable = False
    return PoseErrorReport(
        rotation_error=rot,
        translation_error=trans,
        mean_rotation_error=mean_rot,
        mean_translation_error=mean_trans,
    )


def mrra(predicted: Trajectory, ground_truth: Trajectory, tau: float = 30.0) -> float:
    """Fraction of unordered frame pairs whose relative-rotation error is
    at most tau degrees. Insensitive to the choice of reference frame."""
    if len(predicted) != len(ground_truth):
        raise LengthMismatchError(
            f"trajectory lengths differ: {len(predicted)} vs {len(ground_truth)}"
        )
    n = len(predicted)
    if n < 2:
        raise TooFewFramesError(f"mrra needs at least 2 frames, got {n}")
    tau_rad = np.deg2rad(tau)
    correct = 0
    total = 0
    for i in range(n):
        ri_p = predicted.frames[i].pose.rotation
        ri_g = ground_truth.frames[i].pose.rotation
        for j in range(i + 1, n):
            rel_p = ri_p.T @ predicted.frames[j].pose.rotation
            rel_g = ri_g.T @ ground_truth.frames[j].pose.rotation
            if rotation_angle(rel_p.T @ rel_g) <= tau_rad:
                correct += 1
            total += 1
    return correct / total


def generate_trajectory(
    kind: TrajectoryKind,
    frame_count: int,
    intrinsics: Intrinsics,
    scale: float = 2.0,
    rng_seed: int = 0,
) -> Trajectory:
    """Synthetic camera path of the requested kind, canonicalized to frame 0.

    ``scale`` is the circle radius for the arc and orbit kinds and the total
    path length for the line kind; the still kind ignores it. The arcs sweep
    a quarter circle at uniform angular speed while looking at the scene
    center; the orbit is a full uniform circle. All kinds are closed-form
    and seed-independent; ``rng_seed`` is accepted so that callers can treat
    every generator uniformly, and for future jittered variants.
    """
    if frame_count < 1:
        raise ValueError(f"frame_count must be >= 1, got {frame_count}")

    def look_at_center(phi):
        # camera on the circle, +z axis pointing at the origin
        rot = axis_angle_rotation(Y_AXIS, -phi)
        pos = scale * np.array([np.sin(phi), 0.0, -np.cos(phi)])
        return Pose(rot, pos)

    poses = []
    for k in range(frame_count):
        if kind is TrajectoryKind.STILL:
            poses.append(Pose.identity())
        elif kind is TrajectoryKind.LINE:
            step = 0.0 if frame_count == 1 else scale * k / (frame_count - 1)
            poses.append(Pose(np.eye(3), step * X_AXIS))
        elif kind is TrajectoryKind.ORBIT:
            poses.append(look_at_center(2.0 * np.pi * k / frame_count))
        else:
            sweep = 0.0 if frame_count == 1 else (np.pi / 2.0) * k / (frame_count - 1)
            sign = -1.0 if kind is TrajectoryKind.ARC_LEFT else 1.0
            poses.append(look_at_center(sign * sweep))

    frames = tuple(
        CameraFrame(intrinsics=intrinsics, pose=p, index=k) for k, p in enumerate(poses)
    )
    return canonicalize(Trajectory(frames=frames, reference_index=0), 0)


def reverse_trajectory(t: Trajectory) -> Trajectory:
    """Same physical camera path traversed backwards.

    Frames keep their poses and intrinsics but are renumbered by their new
    position; the reference index follows its frame. Applying this twice
    restores a trajectory whose indices were positional to begin with.
    """
    n = len(t)
    frames = tuple(
        CameraFrame(intrinsics=f.intrinsics, pose=f.pose, index=k)
        for k, f in enumerate(reversed(t.frames))
    )
    return Trajectory(frames=frames, reference_index=n - 1 - t.reference_index)


def perturb(image: RaxelImage, spec: PerturbationSpec) -> RaxelImage:
    """Damaged copy of a raxel image, per the given perturbation settings."""
    rng = np.random.default_rng(spec.seed)
    data = image.data
    if spec.kind is PerturbationKind.GAUSSIAN_PER_PIXEL:
        return RaxelImage(data + rng.normal(0.0, spec.magnitude, data.shape))
    if spec.kind is PerturbationKind.UNIFORM_QUANTIZE:
        lo = float(data.min())
        span = float(data.max()) - lo
        if span == 0.0:
            return RaxelImage(data.copy())
        levels = 2 ** int(spec.magnitude)
        step = span / levels
        bins = np.clip(np.floor((data - lo) / step), 0, levels - 1)
        return RaxelImage(lo + (bins + 0.5) * step)
    # pixel dropout: a seeded pixel subset collapses to the image mean
    flat = data.reshape(-1, 3).copy()
    count = int(round(spec.magnitude * flat.shape[0]))
    if count:
        chosen = rng.choice(flat.shape[0], size=count, replace=False)
        flat[chosen] = data.reshape(-1, 3).mean(axis=0)
    return RaxelImage(flat.reshape(data.shape))


def _frame_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count)


def cycle_consistency_run(
    ground_truth: Trajectory, spec: PerturbationSpec
) -> tuple[PoseErrorReport, float, float]:
    """Encode, perturb, decode, and re-encode one trajectory.

    Each frame's perturbation seed is derived from ``spec.seed``, so the
    run is deterministic regardless of evaluation order. Returns the pose
    error report against the ground truth, mRRA at 30 degrees, and the mean
    per-pixel distance between the re-encoded and the clean raxel images.
    Decode failures are raised with their frame position.
    """
    intr = ground_truth.frames[0].intrinsics
    for f in ground_truth.frames:
        if f.intrinsics != intr:
            raise ValueError("cycle consistency requires shared intrinsics")

    canonical = canonicalize(ground_truth, ground_truth.reference_index)
    clean = encode_trajectory_raxels(canonical)
    seeds = _frame_seeds(spec.seed, len(clean))
    damaged = [
        perturb(img, replace(spec, seed=int(s))) for img, s in zip(clean, seeds)
    ]
    decoded, failures = decode_trajectory(
        damaged, canonical.reference_index, intr.width, intr.height
    )
    if failures:
        first = failures[0]
        raise RaxelkitError(
            f"frame {first.position} failed to decode: {first.error}"
        ) from first.error

    predicted_frames = tuple(
        CameraFrame(
            intrinsics=Intrinsics(
                fx=d.fx_hat,
                fy=d.fy_hat,
                cx=intr.width / 2.0,
                cy=intr.height / 2.0,
                width=intr.width,
                height=intr.height,
            ),
            pose=d.pose,
            index=frame.index,
        )
        for d, frame in zip(decoded, canonical.frames)
    )
    predicted = Trajectory(frames=predicted_frames, reference_index=canonical.reference_index)

    report = pose_errors(predicted, canonical)
    mrra30 = mrra(predicted, canonical, tau=30.0)

    re_encoded = encode_trajectory_raxels(predicted)
    residual = float(
        np.mean(
            [
                np.linalg.norm(re_img.data - clean_img.data, axis=2).mean()
                for re_img, clean_img in zip(re_encoded, clean)
            ]
        )
    )
    return report, mrra30, residual
