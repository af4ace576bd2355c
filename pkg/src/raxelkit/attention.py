"""Two-branch attention block: per-modality self-attention, then symmetric
cross-attention between the modalities.

The block keeps two token streams (video and ray) with fully separate
parameters. One forward pass runs in two stages plus a tail:

1. each stream attends to itself with its own branch weights;
2. each stream cross-attends to the *stage-1 output* of the other stream
   (both directions read the same state, neither sees the other's stage-2
   result);
3. each stream runs its own feed-forward.

Every sublayer is pre-normalized (layer norm with a learnable gain, no
bias) and wrapped in a residual connection. Rotary position encoding is
applied to queries and keys per head, with the head dimension split into
three equal segments for the (temporal, row, column) position axes, so
attention scores depend only on relative positions. Learnable per-modality
offset vectors are added to the token features on entry to the block.

All parameters are plain numpy arrays; there is no training code. The
seeded initializer exists so tests and demos are reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields

import numpy as np

from .errors import ShapeMismatchError

ROPE_BASE = 10000.0
LAYERNORM_EPS = 1e-6
POSITION_AXES = 3


class Modality(enum.Enum):
    VIDEO = "video"
    RAY = "ray"


@dataclass(frozen=True, eq=False)
class TokenSeq:
    """Token features with integer (temporal, row, column) positions."""

    tokens: np.ndarray
    positions: np.ndarray
    modality: Modality

    def __post_init__(self):
        tok = np.asarray(self.tokens, dtype=float)
        pos = np.asarray(self.positions)
        if tok.ndim != 2 or tok.shape[0] < 1:
            raise ValueError(f"tokens must be (n, d_model) with n >= 1, got {tok.shape}")
        if not np.all(np.isfinite(tok)):
            raise ValueError("tokens contain non-finite values")
        if pos.shape != (tok.shape[0], POSITION_AXES):
            raise ValueError(
                f"positions must be (n, {POSITION_AXES}), got {pos.shape} for n={tok.shape[0]}"
            )
        if not np.issubdtype(pos.dtype, np.integer):
            raise ValueError(f"positions must be integers, got dtype {pos.dtype}")
        if len({tuple(row) for row in pos.tolist()}) != pos.shape[0]:
            raise ValueError("positions must be unique within a sequence")
        object.__setattr__(self, "tokens", tok)
        object.__setattr__(self, "positions", pos.astype(np.int64))

    @property
    def count(self) -> int:
        return self.tokens.shape[0]

    @property
    def d_model(self) -> int:
        return self.tokens.shape[1]


@dataclass(frozen=True, eq=False)
class BranchParams:
    """Weights of one modality branch. All linear maps are bias-free."""

    self_query: np.ndarray
    self_key: np.ndarray
    self_value: np.ndarray
    self_output: np.ndarray
    cross_query: np.ndarray
    cross_key: np.ndarray
    cross_value: np.ndarray
    cross_output: np.ndarray
    ff_in: np.ndarray
    ff_out: np.ndarray
    gain_self: np.ndarray
    gain_cross: np.ndarray
    gain_ff: np.ndarray


@dataclass(frozen=True, eq=False)
class DscaBlockParams:
    """Both branches, the per-modality offsets, and the head count."""

    video: BranchParams
    ray: BranchParams
    offset_video: np.ndarray
    offset_ray: np.ndarray
    head_count: int

    def __post_init__(self):
        d = self.offset_video.shape[0]
        if self.offset_ray.shape != (d,):
            raise ShapeMismatchError(
                f"modality offsets disagree: {self.offset_video.shape} vs {self.offset_ray.shape}"
            )
        if self.head_count < 1 or d % self.head_count != 0:
            raise ShapeMismatchError(
                f"head_count {self.head_count} must divide d_model {d}"
            )
        if (d // self.head_count) % (2 * POSITION_AXES) != 0:
            raise ShapeMismatchError(
                f"head dimension {d // self.head_count} must be divisible by "
                f"{2 * POSITION_AXES} to pair rotary features over {POSITION_AXES} axes"
            )
        for branch in (self.video, self.ray):
            for f in fields(branch):
                w = getattr(branch, f.name)
                if f.name.startswith("gain_"):
                    ok = w.shape == (d,)
                elif f.name == "ff_in":
                    ok = w.ndim == 2 and w.shape[0] == d
                elif f.name == "ff_out":
                    ok = w.ndim == 2 and w.shape[1] == d and w.shape[0] == branch.ff_in.shape[1]
                else:
                    ok = w.shape == (d, d)
                if not ok:
                    raise ShapeMismatchError(f"{f.name} has shape {w.shape}, inconsistent with d_model {d}")

    @property
    def d_model(self) -> int:
        return self.offset_video.shape[0]

    def branch_for(self, modality: Modality) -> BranchParams:
        return self.video if modality is Modality.VIDEO else self.ray

    def offset_for(self, modality: Modality) -> np.ndarray:
        return self.offset_video if modality is Modality.VIDEO else self.offset_ray


def init_dsca_params(rng_seed: int, d_model: int, head_count: int, d_ff: int | None = None) -> DscaBlockParams:
    """Deterministic parameter set: matrices uniform in +-1/sqrt(fan_in),
    gains one, offsets uniform like a d_model fan-in matrix row."""
    if d_ff is None:
        d_ff = 4 * d_model
    rng = np.random.default_rng(rng_seed)

    def mat(n_in, n_out):
        bound = 1.0 / np.sqrt(n_in)
        return rng.uniform(-bound, bound, (n_in, n_out))

    def branch():
        return BranchParams(
            self_query=mat(d_model, d_model),
            self_key=mat(d_model, d_model),
            self_value=mat(d_model, d_model),
            self_output=mat(d_model, d_model),
            cross_query=mat(d_model, d_model),
            cross_key=mat(d_model, d_model),
            cross_value=mat(d_model, d_model),
            cross_output=mat(d_model, d_model),
            ff_in=mat(d_model, d_ff),
            ff_out=mat(d_ff, d_model),
            gain_self=np.ones(d_model),
            gain_cross=np.ones(d_model),
            gain_ff=np.ones(d_model),
        )

    video = branch()
    ray = branch()
    bound = 1.0 / np.sqrt(d_model)
    return DscaBlockParams(
        video=video,
        ray=ray,
        offset_video=rng.uniform(-bound, bound, d_model),
        offset_ray=rng.uniform(-bound, bound, d_model),
        head_count=head_count,
    )


def _rope_angles(length: int, positions: np.ndarray) -> np.ndarray:
    """Rotation angle for every feature pair: positions (n, axes) -> (n, length/2)."""
    axes = positions.shape[1]
    pairs_per_axis = length // (2 * axes)
    k = np.arange(pairs_per_axis)
    theta = ROPE_BASE ** (-2.0 * k / pairs_per_axis)
    # (n, axes, pairs_per_axis) -> (n, total_pairs)
    return (positions[:, :, None] * theta[None, None, :]).reshape(positions.shape[0], -1)


def _rope_apply(mat: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Rotate consecutive feature pairs of each row by its position angles."""
    n, length = mat.shape
    axes = positions.shape[1]
    if length % (2 * axes) != 0:
        raise ShapeMismatchError(
            f"feature length {length} not divisible by {2 * axes} "
            f"(2 x {axes} position axes)"
        )
    angles = _rope_angles(length, positions)
    cos, sin = np.cos(angles), np.sin(angles)
    even, odd = mat[:, 0::2], mat[:, 1::2]
    out = np.empty_like(mat)
    out[:, 0::2] = even * cos - odd * sin
    out[:, 1::2] = even * sin + odd * cos
    return out


def rope_rotate(vec: np.ndarray, position) -> np.ndarray:
    """Rotary position encoding of one feature vector.

    The vector is split into one contiguous segment per position axis; each
    segment's consecutive (even, odd) pairs rotate by position * theta_k,
    theta_k = 10000^(-2k / pairs_per_axis). Norm-preserving; position 0
    leaves the vector unchanged.
    """
    v = np.asarray(vec, dtype=float)
    if v.ndim != 1:
        raise ShapeMismatchError(f"expected a 1-D feature vector, got shape {v.shape}")
    pos = np.asarray(position, dtype=np.int64).reshape(1, -1)
    return _rope_apply(v.reshape(1, -1), pos)[0]


def _layer_norm(x: np.ndarray, gain: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=1, keepdims=True)
    var = x.var(axis=1, keepdims=True)
    return (x - mean) / np.sqrt(var + LAYERNORM_EPS) * gain


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _split_heads(x: np.ndarray, head_count: int) -> np.ndarray:
    n, d = x.shape
    return x.reshape(n, head_count, d // head_count).transpose(1, 0, 2)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    h, n, hd = x.shape
    return x.transpose(1, 0, 2).reshape(n, h * hd)


def _attend(
    q_tokens: np.ndarray,
    q_positions: np.ndarray,
    kv_tokens: np.ndarray,
    kv_positions: np.ndarray,
    w_query: np.ndarray,
    w_key: np.ndarray,
    w_value: np.ndarray,
    w_output: np.ndarray,
    head_count: int,
) -> np.ndarray:
    """Multi-head attention core shared by the self and cross paths.

    Inputs are already normalized; rotary encoding is applied per head to
    queries and keys. Returns the output projection (no residual).
    """
    d = q_tokens.shape[1]
    if w_query.shape[0] != d:
        raise ShapeMismatchError(
            f"token width {d} does not match parameter width {w_query.shape[0]}"
        )
    head_dim = d // head_count
    q = _split_heads(q_tokens @ w_query, head_count)
    k = _split_heads(kv_tokens @ w_key, head_count)
    v = _split_heads(kv_tokens @ w_value, head_count)
    for h in range(head_count):
        q[h] = _rope_apply(q[h], q_positions)
        k[h] = _rope_apply(k[h], kv_positions)
    scores = q @ k.transpose(0, 2, 1) / np.sqrt(head_dim)
    attn = _softmax_rows(scores)
    return _merge_heads(attn @ v) @ w_output


def self_attention(seq: TokenSeq, params: DscaBlockParams) -> TokenSeq:
    """Multi-head attention of a sequence over itself, with the branch
    selected by the sequence's modality. Pre-normalized, residual added."""
    if seq.d_model != params.d_model:
        raise ShapeMismatchError(
            f"token width {seq.d_model} does not match parameter width {params.d_model}"
        )
    branch = params.branch_for(seq.modality)
    h = _layer_norm(seq.tokens, branch.gain_self)
    out = _attend(
        h, seq.positions, h, seq.positions,
        branch.self_query, branch.self_key, branch.self_value, branch.self_output,
        params.head_count,
    )
    return TokenSeq(seq.tokens + out, seq.positions, seq.modality)


def cross_attention(
    queries_from: TokenSeq, keys_values_from: TokenSeq, params: DscaBlockParams
) -> TokenSeq:
    """Attention of one sequence over another.

    The query sequence's branch supplies every weight used here, including
    the normalization applied to the key/value stream; the peer sequence
    only contributes token features and positions. Residual added to the
    query sequence; output keeps the query modality.
    """
    if queries_from.d_model != keys_values_from.d_model:
        raise ShapeMismatchError(
            f"model widths differ: {queries_from.d_model} vs {keys_values_from.d_model}"
        )
    if queries_from.d_model != params.d_model:
        raise ShapeMismatchError(
            f"token width {queries_from.d_model} does not match parameter width {params.d_model}"
        )
    branch = params.branch_for(queries_from.modality)
    hq = _layer_norm(queries_from.tokens, branch.gain_cross)
    hkv = _layer_norm(keys_values_from.tokens, branch.gain_cross)
    out = _attend(
        hq, queries_from.positions, hkv, keys_values_from.positions,
        branch.cross_query, branch.cross_key, branch.cross_value, branch.cross_output,
        params.head_count,
    )
    return TokenSeq(queries_from.tokens + out, queries_from.positions, queries_from.modality)


def _gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + np.tanh(np.sqrt(2.0 / np.pi) * (x + 0.044715 * x**3)))


def _feed_forward(seq: TokenSeq, branch: BranchParams) -> TokenSeq:
    h = _layer_norm(seq.tokens, branch.gain_ff)
    out = _gelu(h @ branch.ff_in) @ branch.ff_out
    return TokenSeq(seq.tokens + out, seq.positions, seq.modality)


def dsca_block(
    video: TokenSeq, ray: TokenSeq, params: DscaBlockParams
) -> tuple[TokenSeq, TokenSeq]:
    """One full block pass over the two modality streams.

    Adds the per-modality offsets, runs self-attention within each stream,
    then both cross directions in parallel from the stage-1 state, then the
    per-branch feed-forward. Returns (video_out, ray_out).
    """
    if video.modality is not Modality.VIDEO or ray.modality is not Modality.RAY:
        raise ValueError("dsca_block expects (video, ray) sequences in that order")
    video = TokenSeq(video.tokens + params.offset_for(Modality.VIDEO), video.positions, video.modality)
    ray = TokenSeq(ray.tokens + params.offset_for(Modality.RAY), ray.positions, ray.modality)

    video_1 = self_attention(video, params)
    ray_1 = self_attention(ray, params)

    video_2 = cross_attention(video_1, ray_1, params)
    ray_2 = cross_attention(ray_1, video_1, params)

    video_out = _feed_forward(video_2, params.video)
    ray_out = _feed_forward(ray_2, params.ray)
    return video_out, ray_out
