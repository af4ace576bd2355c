"""How much pixel noise can the closed-form decoder absorb?

Perturb every raxel pixel with gaussian noise of growing sigma, decode,
and watch the pose error track sigma linearly while mRRA@30 stays pinned
at 1.0 far past any realistic corruption level.
"""

from raxelkit import (
    Intrinsics,
    PerturbationKind,
    PerturbationSpec,
    RaxelkitError,
    TrajectoryKind,
    cycle_consistency_run,
    generate_trajectory,
)

intrinsics = Intrinsics(fx=720.0, fy=720.0, cx=416.0, cy=240.0, width=832, height=480)
trajectory = generate_trajectory(TrajectoryKind.ARC_LEFT, 21, intrinsics)

print(f"{'sigma':>8} {'rot err (rad)':>14} {'trans err':>12} {'mrra@30':>8}")
for sigma in (0.0, 0.001, 0.005, 0.01, 0.05, 0.1):
    spec = PerturbationSpec(PerturbationKind.GAUSSIAN_PER_PIXEL, sigma, seed=7)
    report, mrra30, _ = cycle_consistency_run(trajectory, spec)
    print(f"{sigma:>8} {report.mean_rotation_error:>14.3e} "
          f"{report.mean_translation_error:>12.3e} {mrra30:>8.2f}")

print()
print("averaging ~50k ray directions per frame beats the per-pixel noise down")
print("by a factor of roughly sqrt(pixel count); quantization behaves likewise:")

for bits in (12, 8, 6, 4):
    spec = PerturbationSpec(PerturbationKind.UNIFORM_QUANTIZE, bits, seed=7)
    try:
        report, mrra30, _ = cycle_consistency_run(trajectory, spec)
    except RaxelkitError as err:
        print(f"{bits:>4} bits  decode fails: {err}")
        break
    print(f"{bits:>4} bits  rot err {report.mean_rotation_error:.3e}  mrra@30 {mrra30:.2f}")
