"""Command-line interface.

Subcommands: encode (trajectory file to per-frame ray-grid files), decode
(the inverse), roundtrip (encode, perturb, decode, re-encode, report),
metrics (compare two trajectory files), synth (write a synthetic
trajectory), bench (noise-robustness sweep to CSV).

Exit codes: 0 success, 2 usage or parse failure, 3 I/O failure, 4 total
geometric degeneracy. Every command's output is a deterministic function
of its arguments.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import io as rkio
from .decode import decode_trajectory, recover_focal
from .errors import (
    DegenerateGeometryError,
    InsufficientInliersError,
    RaxelkitError,
)
from .evaluation import (
    PerturbationKind,
    PerturbationSpec,
    TrajectoryKind,
    cycle_consistency_run,
    generate_trajectory,
    mrra,
    pose_errors,
    reverse_trajectory,
)
from .geometry import (
    CameraFrame,
    Intrinsics,
    Pose,
    Trajectory,
    canonicalize,
)
from .rays import encode_plucker, encode_raxel, encode_raymap, ray_grid
from .registration import register

CSV_HEADER = (
    "kind,frames,magnitude,seed,"
    "mean_rot_err_rad,mean_trans_err,mrra30,reencode_residual"
)
DEFAULT_WIDTH = 832
DEFAULT_HEIGHT = 480
DEFAULT_FOV_DEG = 60.0
DEFAULT_RADIUS = 2.0
BENCH_KINDS = ("arcleft", "arcright", "orbit", "line")
BENCH_SIGMAS = (0.001, 0.005, 0.01, 0.05)
BENCH_SEEDS = 20
BENCH_FRAMES = 21

_KIND_BY_NAME = {k.value: k for k in TrajectoryKind}
_NOISE_BY_NAME = {
    "gaussian": PerturbationKind.GAUSSIAN_PER_PIXEL,
    "quantize": PerturbationKind.UNIFORM_QUANTIZE,
    "dropout": PerturbationKind.PIXEL_DROPOUT,
}


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _default_intrinsics(width: int, height: int, fov_deg: float) -> Intrinsics:
    focal = (width / 2.0) / math.tan(math.radians(fov_deg) / 2.0)
    return Intrinsics(
        fx=focal, fy=focal, cx=width / 2.0, cy=height / 2.0, width=width, height=height
    )


# ----------------------------------------------------------------- encode

def cmd_encode(args) -> int:
    trajectory = rkio.load_trajectory(args.trajectory)
    canonical = canonicalize(trajectory, trajectory.reference_index)
    os.makedirs(args.out_dir, exist_ok=True)
    for frame in canonical.frames:
        path = os.path.join(args.out_dir, f"frame_{frame.index}.rxl")
        if args.representation == "raxel":
            rkio.save_raxel(path, encode_raxel(frame, frame.pose), frame.index)
        elif args.representation == "plucker":
            rkio.save_raymap(path, encode_plucker(frame, frame.pose), frame.index)
        else:
            rkio.save_raymap(path, encode_raymap(frame, frame.pose), frame.index)
    return 0


# ----------------------------------------------------------------- decode

def _detect_reference(images, width: int, height: int) -> int | None:
    """Position of the image that looks most like an un-moved camera.

    For each candidate, recover a focal length under the identity-pose
    assumption, synthesize the ideal identity ray grid for it, and measure
    the registration residual; the true reference frame fits near-exactly.
    """
    best_pos, best_residual = None, np.inf
    for pos, image in enumerate(images):
        try:
            fx, fy, _ = recover_focal(image, Pose.identity(), width, height)
            intr = Intrinsics(
                fx=fx, fy=fy, cx=width / 2.0, cy=height / 2.0, width=width, height=height
            )
            grid = ray_grid(intr)
            result = register(image.data.reshape(-1, 3), grid.reshape(-1, 3))
        except (RaxelkitError, ValueError):
            continue
        if result.rms_residual < best_residual:
            best_pos, best_residual = pos, result.rms_residual
    return best_pos


def cmd_decode(args) -> int:
    names = sorted(n for n in os.listdir(args.raxel_dir) if n.endswith(".rxl"))
    if not names:
        print(f"error: no .rxl files in {args.raxel_dir}", file=sys.stderr)
        return 2
    loaded = []
    for name in names:
        image, frame_index = rkio.load_raxel(os.path.join(args.raxel_dir, name))
        loaded.append((frame_index, image))
    loaded.sort(key=lambda pair: pair[0])
    indices = [idx for idx, _ in loaded]
    images = [img for _, img in loaded]
    if len(set(indices)) != len(indices):
        print("error: duplicate frame indices in directory", file=sys.stderr)
        return 2
    shape = images[0].data.shape
    for idx, img in loaded:
        if img.data.shape != shape:
            print(
                f"error: frame {idx} grid {img.data.shape[:2]} differs from "
                f"{shape[:2]}",
                file=sys.stderr,
            )
            return 2

    width = args.width if args.width is not None else 2 * shape[1]
    height = args.height if args.height is not None else 2 * shape[0]

    if args.reference is not None:
        if args.reference not in indices:
            print(f"error: no frame with index {args.reference}", file=sys.stderr)
            return 2
        reference_pos = indices.index(args.reference)
    else:
        reference_pos = _detect_reference(images, width, height)
        if reference_pos is None:
            print("error: all frames degenerate", file=sys.stderr)
            return 4

    decoded, failures = decode_trajectory(images, reference_pos, width, height)
    for failure in failures:
        print(
            f"warning: frame {indices[failure.position]} failed: {failure.error}",
            file=sys.stderr,
        )
    if decoded[reference_pos] is None or all(d is None for d in decoded):
        print("error: all frames degenerate", file=sys.stderr)
        return 4

    frames = []
    for idx, d in zip(indices, decoded):
        if d is None:
            continue
        frames.append(
            CameraFrame(
                intrinsics=Intrinsics(
                    fx=d.fx_hat,
                    fy=d.fy_hat,
                    cx=width / 2.0,
                    cy=height / 2.0,
                    width=width,
                    height=height,
                ),
                pose=d.pose,
                index=idx,
            )
        )
    kept_positions = [pos for pos, d in enumerate(decoded) if d is not None]
    trajectory = Trajectory(
        frames=tuple(frames),
        reference_index=kept_positions.index(reference_pos),
    )
    rkio.save_trajectory(args.out_trajectory, trajectory)
    return 0


# -------------------------------------------------------------- roundtrip

def _cycle_report(trajectory, kind_name: str, magnitude: float, seed: int):
    spec = PerturbationSpec(_NOISE_BY_NAME[kind_name], magnitude, seed)
    return cycle_consistency_run(trajectory, spec)


def _append_csv_row(path: str, row: str) -> None:
    if os.path.exists(path):
        with open(path, "r", encoding="ascii") as fh:
            content = fh.read()
        if not content.endswith("\n"):
            content += "\n"
    else:
        content = CSV_HEADER + "\n"
    rkio._atomic_write(path, (content + row + "\n").encode("ascii"))


def cmd_roundtrip(args) -> int:
    trajectory = rkio.load_trajectory(args.trajectory)
    report, mrra30, residual = _cycle_report(
        trajectory, args.noise_kind, args.magnitude, args.seed
    )
    print(f"mean_rot_err={report.mean_rotation_error:.6f}")
    print(f"mean_trans_err={report.mean_translation_error:.6f}")
    print(f"mrra30={mrra30:.6f}")
    print(f"reencode_residual={residual:.6f}")
    if args.csv:
        stem = os.path.splitext(os.path.basename(args.trajectory))[0]
        row = ",".join(
            [
                stem,
                str(len(trajectory)),
                _g(args.magnitude),
                str(args.seed),
                _g(report.mean_rotation_error),
                _g(report.mean_translation_error),
                _g(mrra30),
                _g(residual),
            ]
        )
        _append_csv_row(args.csv, row)
    return 0


# ---------------------------------------------------------------- metrics

def cmd_metrics(args) -> int:
    predicted = rkio.load_trajectory(args.predicted)
    ground_truth = rkio.load_trajectory(args.ground_truth)
    predicted = canonicalize(predicted, ground_truth.reference_index)
    ground_truth = canonicalize(ground_truth, ground_truth.reference_index)
    report = pose_errors(predicted, ground_truth)
    mrra30 = mrra(predicted, ground_truth, tau=30.0)
    for k, frame in enumerate(ground_truth.frames):
        print(
            f"frame {frame.index}: rot_err={report.rotation_error[k]:.6f} "
            f"trans_err={report.translation_error[k]:.6f}"
        )
    print(f"mean_rot_err={report.mean_rotation_error:.6f}")
    print(f"mean_trans_err={report.mean_translation_error:.6f}")
    print(f"mrra30={mrra30:.6f}")
    return 0


# ------------------------------------------------------------------ synth

def cmd_synth(args) -> int:
    intrinsics = _default_intrinsics(args.width, args.height, args.fov)
    trajectory = generate_trajectory(
        _KIND_BY_NAME[args.kind],
        args.frames,
        intrinsics,
        scale=args.radius,
        rng_seed=args.seed,
    )
    if args.reverse:
        trajectory = reverse_trajectory(trajectory)
    rkio.save_trajectory(args.out_trajectory, trajectory)
    return 0


# ------------------------------------------------------------------ bench

def _bench_cell_key(kind: str, frames: int, magnitude: float, seed: int) -> tuple:
    return (kind, str(frames), _g(magnitude), str(seed))


def _existing_cells(path: str) -> tuple[list[str], set]:
    """Rows (without header) and their cell keys from a previous run."""
    if not os.path.exists(path):
        return [], set()
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} does not start with the expected CSV header")
    rows = lines[1:]
    keys = set()
    for row in rows:
        cols = row.split(",")
        if len(cols) != 8:
            raise ValueError(f"malformed CSV row: {row!r}")
        keys.add((cols[0], cols[1], _g(float(cols[2])), cols[3]))
    return rows, keys


def cmd_bench(args) -> int:
    rows, have = _existing_cells(args.out)
    intrinsics = _default_intrinsics(args.width, args.height, args.fov)
    for kind_name in args.kinds:
        trajectory_by_kind = generate_trajectory(
            _KIND_BY_NAME[kind_name],
            args.frames,
            intrinsics,
            scale=args.radius,
        )
        for magnitude in args.magnitudes:
            for seed in range(args.seeds):
                key = _bench_cell_key(kind_name, args.frames, magnitude, seed)
                if key in have:
                    continue
                report, mrra30, residual = _cycle_report(
                    trajectory_by_kind, args.noise_kind, magnitude, seed
                )
                rows.append(
                    ",".join(
                        [
                            kind_name,
                            str(args.frames),
                            _g(magnitude),
                            str(seed),
                            _g(report.mean_rotation_error),
                            _g(report.mean_translation_error),
                            _g(mrra30),
                            _g(residual),
                        ]
                    )
                )
                have.add(key)
    content = "\n".join([CSV_HEADER] + rows) + "\n"
    rkio._atomic_write(args.out, content.encode("ascii"))
    return 0


# ------------------------------------------------------------------ wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raxelkit",
        description="Camera trajectories as per-pixel ray images: encode, "
        "decode, and evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="trajectory file to per-frame ray grids")
    enc.add_argument("trajectory")
    enc.add_argument("out_dir")
    enc.add_argument(
        "--representation",
        choices=("raxel", "plucker", "raymap"),
        default="raxel",
    )
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help="ray-grid directory to trajectory file")
    dec.add_argument("raxel_dir")
    dec.add_argument("out_trajectory")
    dec.add_argument("--width", type=int, default=None,
                     help="full-resolution width (default: twice the grid width)")
    dec.add_argument("--height", type=int, default=None,
                     help="full-resolution height (default: twice the grid height)")
    dec.add_argument("--reference", type=int, default=None,
                     help="frame index of the reference (default: auto-detect)")
    dec.set_defaults(func=cmd_decode)

    rt = sub.add_parser("roundtrip", help="encode, perturb, decode, re-encode")
    rt.add_argument("trajectory")
    rt.add_argument("--noise-kind", choices=sorted(_NOISE_BY_NAME), default="gaussian")
    rt.add_argument("--magnitude", type=float, default=0.0)
    rt.add_argument("--seed", type=int, default=0)
    rt.add_argument("--csv", default=None, help="append a CSV row to this file")
    rt.set_defaults(func=cmd_roundtrip)

    met = sub.add_parser("metrics", help="compare two trajectory files")
    met.add_argument("predicted")
    met.add_argument("ground_truth")
    met.set_defaults(func=cmd_metrics)

    syn = sub.add_parser("synth", help="write a synthetic trajectory")
    syn.add_argument("kind", choices=sorted(_KIND_BY_NAME))
    syn.add_argument("frames", type=int)
    syn.add_argument("out_trajectory")
    syn.add_argument("--radius", type=float, default=DEFAULT_RADIUS,
                     help="circle radius (arcs, orbit) or path length (line)")
    syn.add_argument("--fov", type=float, default=DEFAULT_FOV_DEG,
                     help="horizontal field of view in degrees")
    syn.add_argument("--width", type=int, default=DEFAULT_WIDTH)
    syn.add_argument("--height", type=int, default=DEFAULT_HEIGHT)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--reverse", action="store_true",
                     help="traverse the path backwards")
    syn.set_defaults(func=cmd_synth)

    ben = sub.add_parser("bench", help="noise-robustness sweep to CSV")
    ben.add_argument("--out", default="bench.csv")
    ben.add_argument("--kinds", nargs="+", choices=sorted(_KIND_BY_NAME),
                     default=list(BENCH_KINDS))
    ben.add_argument("--magnitudes", nargs="+", type=float,
                     default=list(BENCH_SIGMAS))
    ben.add_argument("--noise-kind", choices=sorted(_NOISE_BY_NAME),
                     default="gaussian")
    ben.add_argument("--seeds", type=int, default=BENCH_SEEDS,
                     help="seeds 0..N-1 per cell")
    ben.add_argument("--frames", type=int, default=BENCH_FRAMES)
    ben.add_argument("--width", type=int, default=DEFAULT_WIDTH)
    ben.add_argument("--height", type=int, default=DEFAULT_HEIGHT)
    ben.add_argument("--fov", type=float, default=DEFAULT_FOV_DEG)
    ben.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    ben.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateGeometryError, InsufficientInliersError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    except RaxelkitError as err:
        if isinstance(err.__cause__, (DegenerateGeometryError, InsufficientInliersError)):
            print(f"error: {err}", file=sys.stderr)
            return 4
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, IndexError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
