"""Span relations and their sinusoidal encodings.

Every ordered node pair is described by four signed distances between
the two spans' endpoints; each distance is embedded with a fixed
sinusoidal table and the four blocks are concatenated.  Sign survives
the embedding because the sine components are odd in the distance and
the cosine components even.
"""

from __future__ import annotations

import numpy as np

from .lattice import SpanNode

SINUSOID_BASE = 10000.0


def span_distances(a: SpanNode, b: SpanNode) -> tuple[int, int, int, int]:
    """(head-head, head-tail, tail-head, tail-tail) offsets of a vs b."""
    return (a.head - b.head, a.head - b.tail, a.tail - b.head, a.tail - b.tail)


def sinusoidal_encoding(distance: float, width: int) -> np.ndarray:
    """Interleaved sin/cos of the distance at geometric frequencies."""
    if width % 2 != 0:
        raise ValueError(f"width must be even, got {width}")
    k = np.arange(width // 2, dtype=np.float64)
    inv_freq = SINUSOID_BASE ** (-2.0 * k / width)
    angles = distance * inv_freq
    out = np.empty(width, dtype=np.float64)
    out[0::2] = np.sin(angles)
    out[1::2] = np.cos(angles)
    return out


def relation_features(nodes: list[SpanNode] | tuple[SpanNode, ...], d_z: int) -> np.ndarray:
    """n x n x d_z table of concatenated endpoint-distance encodings.

    Constant given the lattice; the learnable part (scale + ReLU) is
    applied by the encoder.
    """
    if d_z % 4 != 0:
        raise ValueError(f"d_z must be divisible by 4, got {d_z}")
    width = d_z // 4
    heads = np.array([n.head for n in nodes], dtype=np.float64)
    tails = np.array([n.tail for n in nodes], dtype=np.float64)
    d_hh = heads[:, None] - heads[None, :]
    d_ht = heads[:, None] - tails[None, :]
    d_th = tails[:, None] - heads[None, :]
    d_tt = tails[:, None] - tails[None, :]

    k = np.arange(width // 2, dtype=np.float64)
    inv_freq = SINUSOID_BASE ** (-2.0 * k / width)

    n = len(nodes)
    table = np.empty((n, n, d_z), dtype=np.float64)
    for block, dist in enumerate((d_hh, d_ht, d_th, d_tt)):
        angles = dist[:, :, None] * inv_freq[None, None, :]
        lo = block * width
        table[:, :, lo : lo + width : 2] = np.sin(angles)
        table[:, :, lo + 1 : lo + width : 2] = np.cos(angles)
    return table


def span_encoding(distances: tuple[int, int, int, int], scale: float, d_z: int) -> np.ndarray:
    """ReLU(scale * concat of the four distance encodings); width d_z."""
    if d_z % 4 != 0:
        raise ValueError(f"d_z must be divisible by 4, got {d_z}")
    width = d_z // 4
    parts = [sinusoidal_encoding(d, width) for d in distances]
    return np.maximum(0.0, scale * np.concatenate(parts))
