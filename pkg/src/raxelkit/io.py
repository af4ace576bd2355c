"""File formats: a human-diffable trajectory text format and a bit-exact
binary format for ray grids.

Trajectory text format, one frame per line after the header:

    raxelkit-traj v1 <width> <height> <reference_index>
    <index> <fx> <fy> <cx> <cy> <r00> <r01> <r02> <t0> <r10> ... <t2>

The 12 pose numbers are the row-major 3x4 camera-to-world matrix [R | t].
Reals carry 17 significant digits, which reproduces 64-bit floats exactly,
so saving and loading is lossless. On load, rotations are accepted up to an
orthonormality drift of 1e-6 and polar-projected back onto a rotation.

Ray grid binary format: 4-byte magic (``RXL1`` for 3-channel raxel images,
``RXM1`` for 6-channel maps), three little-endian uint32 fields (height_r,
width_r, frame_index), then the row-major, channel-interleaved float64
payload. File length is checked exactly.

All writers stage to a temporary file in the target directory and rename,
so a partially written file is never observable under the target name.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import RaxelFileError, TrajectoryParseError
from .geometry import CameraFrame, Intrinsics, Pose, Trajectory
from .rays import RaxelImage, RayMap6, RayMapKind

TRAJ_HEADER_TAG = "raxelkit-traj"
TRAJ_VERSION = "v1"
RAXEL_MAGIC = b"RXL1"
RAYMAP_MAGIC = b"RXM1"
_HEADER_STRUCT = struct.Struct("<III")
LOAD_POSE_DRIFT = 1e-6


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_trajectory(trajectory: Trajectory) -> str:
    """Serialize a trajectory to the text format. All frames must share the
    same image dimensions (the header carries one width/height pair)."""
    first = trajectory.frames[0].intrinsics
    for f in trajectory.frames:
        if (f.intrinsics.width, f.intrinsics.height) != (first.width, first.height):
            raise ValueError("all frames must share image dimensions to serialize")
    lines = [
        f"{TRAJ_HEADER_TAG} {TRAJ_VERSION} {first.width} {first.height} "
        f"{trajectory.reference_index}"
    ]
    for f in trajectory.frames:
        i = f.intrinsics
        rt = np.hstack([f.pose.rotation, f.pose.translation.reshape(3, 1)])
        numbers = [i.fx, i.fy, i.cx, i.cy, *rt.reshape(-1)]
        lines.append(" ".join([str(f.index)] + [_fmt(x) for x in numbers]))
    return "\n".join(lines) + "\n"


def parse_trajectory(text: str) -> Trajectory:
    """Parse the text format back into a Trajectory.

    Raises TrajectoryParseError with the offending 1-based line number.
    """
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise TrajectoryParseError("empty trajectory file", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != TRAJ_HEADER_TAG or header[1] != TRAJ_VERSION:
        raise TrajectoryParseError(
            f"expected header '{TRAJ_HEADER_TAG} {TRAJ_VERSION} <width> <height> "
            f"<reference_index>', got {lines[0]!r}",
            1,
        )
    try:
        width, height, reference_index = (int(tok) for tok in header[2:])
    except ValueError:
        raise TrajectoryParseError(f"non-integer header fields in {lines[0]!r}", 1)

    frames = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        tokens = line.split()
        if len(tokens) != 17:
            raise TrajectoryParseError(
                f"expected 17 fields (index, 4 intrinsics, 12 pose), got {len(tokens)}",
                lineno,
            )
        try:
            index = int(tokens[0])
            values = np.array([float(tok) for tok in tokens[1:]])
        except ValueError as err:
            raise TrajectoryParseError(str(err), lineno)
        if not np.all(np.isfinite(values)):
            raise TrajectoryParseError("non-finite value", lineno)
        fx, fy, cx, cy = values[:4]
        rt = values[4:].reshape(3, 4)
        try:
            intrinsics = Intrinsics(
                fx=fx, fy=fy, cx=cx, cy=cy, width=width, height=height
            )
            pose = Pose(rt[:, :3], rt[:, 3], max_drift=LOAD_POSE_DRIFT)
            frames.append(CameraFrame(intrinsics=intrinsics, pose=pose, index=index))
        except ValueError as err:
            raise TrajectoryParseError(str(err), lineno)
    if not frames:
        raise TrajectoryParseError("no frame lines", 2)
    try:
        return Trajectory(frames=tuple(frames), reference_index=reference_index)
    except (ValueError, IndexError) as err:
        raise TrajectoryParseError(str(err), 1)


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_trajectory(path: str, trajectory: Trajectory) -> None:
    _atomic_write(path, format_trajectory(trajectory).encode("ascii"))


def load_trajectory(path: str) -> Trajectory:
    with open(path, "r", encoding="ascii") as fh:
        return parse_trajectory(fh.read())


def _pack_grid(magic: bytes, data: np.ndarray, frame_index: int) -> bytes:
    h, w = data.shape[:2]
    header = magic + _HEADER_STRUCT.pack(h, w, frame_index)
    return header + np.ascontiguousarray(data, dtype="<f8").tobytes()


def _unpack_grid(blob: bytes, magic: bytes, channels: int, path: str):
    if len(blob) < 16 or blob[:4] != magic:
        raise RaxelFileError(f"{path}: bad magic, expected {magic!r}")
    h, w, frame_index = _HEADER_STRUCT.unpack(blob[4:16])
    expected = 16 + h * w * channels * 8
    if len(blob) != expected:
        raise RaxelFileError(
            f"{path}: payload is {len(blob)} bytes, expected exactly {expected} "
            f"for a {h}x{w}x{channels} grid"
        )
    data = np.frombuffer(blob, dtype="<f8", offset=16).reshape(h, w, channels)
    return data.astype(float), frame_index


def save_raxel(path: str, image: RaxelImage, frame_index: int) -> None:
    _atomic_write(path, _pack_grid(RAXEL_MAGIC, image.data, frame_index))


def load_raxel(path: str) -> tuple[RaxelImage, int]:
    with open(path, "rb") as fh:
        blob = fh.read()
    data, frame_index = _unpack_grid(blob, RAXEL_MAGIC, 3, path)
    return RaxelImage(data), frame_index


def save_raymap(path: str, raymap: RayMap6, frame_index: int) -> None:
    _atomic_write(path, _pack_grid(RAYMAP_MAGIC, raymap.data, frame_index))


def load_raymap(path: str, kind: RayMapKind) -> tuple[RayMap6, int]:
    """Load a 6-channel map; the format does not record which layout was
    saved, so the caller states the kind it expects."""
    with open(path, "rb") as fh:
        blob = fh.read()
    data, frame_index = _unpack_grid(blob, RAYMAP_MAGIC, 6, path)
    return RayMap6(data, kind), frame_index
