"""Chunk-wise diagonal attention masks for streaming encoders.

Within every layer a frame may attend to its own chunk plus a fixed number of
frames of left context, and never past its chunk's right edge, so no future
audio leaks into the output. Stacking layers grows the effective receptive
field on the left side only: after L layers it spans chunk + L * left_context
frames, each frame covering subsample_factor * frame_stride_ms of audio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["MaskSpec", "make_stream_mask", "receptive_field", "frames_for_ms"]


@dataclass(frozen=True)
class MaskSpec:
    n_frames: int
    chunk_frames: int
    n_layers: int
    left_context: int
    subsample_factor: int = 8
    frame_stride_ms: float = 10.0

    def __post_init__(self) -> None:
        if self.chunk_frames < 1:
            raise ValueError("chunk_frames must be >= 1")
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        if self.n_frames < 1:
            raise ValueError("n_frames must be >= 1")
        if self.left_context < 0:
            raise ValueError("left_context must be >= 0")

    @property
    def frame_ms(self) -> float:
        """Duration of one subsampled frame."""
        return self.frame_stride_ms * self.subsample_factor


def frames_for_ms(ms: float, spec: MaskSpec) -> int:
    """Subsampled frame count closest to a duration in milliseconds."""
    return max(1, int(round(ms / spec.frame_ms)))


def make_stream_mask(spec: MaskSpec) -> list[np.ndarray]:
    """Per-layer boolean masks of shape (n_frames, n_frames); True = may attend.

    Frame i in chunk c attends to [chunk_start(c) - left_context, chunk_end(c)]
    clamped to the valid range.
    """
    n = spec.n_frames
    base = np.zeros((n, n), dtype=bool)
    for i in range(n):
        chunk = i // spec.chunk_frames
        lo = max(0, chunk * spec.chunk_frames - spec.left_context)
        hi = min(n, (chunk + 1) * spec.chunk_frames)  # exclusive; right edge of own chunk
        base[i, lo:hi] = True
    return [base.copy() for _ in range(spec.n_layers)]


@dataclass(frozen=True)
class ReceptiveField:
    frames: int
    ms: float


def receptive_field(spec: MaskSpec, n_layers: int | None = None) -> ReceptiveField:
    """Cumulative lookback after stacking n_layers masked layers.

    frames = chunk_frames + n_layers * left_context; ms converts via the
    subsampled frame duration.
    """
    layers = spec.n_layers if n_layers is None else n_layers
    if layers < 1:
        raise ValueError("n_layers must be >= 1")
    frames = spec.chunk_frames + layers * spec.left_context
    return ReceptiveField(frames=frames, ms=frames * spec.frame_ms)
