"""Grayscale image compression pipeline on top of the 2D codec.

Images rarely have sides of the required N*2^K + 1 form, so the pipeline
pads by edge replication up to the nearest valid size before encoding and
reports metrics on the padded real-valued array.  Pixel values are treated
as reals in [0, 255].
"""

from __future__ import annotations

import numpy as np

from ..eno_core import GhostPolicy
from .codec import MultiResRep2D, ThresholdSchedule, compression_rate, decode2d, encode2d, error_norms


def pad_to_valid(image, levels: int) -> np.ndarray:
    """Edge-replicate so both sides become multiples of 2^levels plus one."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError("image must be 2D grayscale")
    step = 1 << levels
    pads = []
    for n in image.shape:
        target = max((n - 1 + step - 1) // step, 1) * step + 1
        pads.append((0, target - n))
    return np.pad(image, pads, mode="edge")


def compress_image(image, p: int, schedule: ThresholdSchedule,
                   ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE):
    """Encode and decode an image; returns (rep, decoded, metrics dict)."""
    padded = pad_to_valid(image, schedule.levels)
    rep = encode2d(padded, p, schedule, ghost_policy)
    decoded = decode2d(rep, p, ghost_policy)
    norms = error_norms(padded, decoded)
    metrics = {
        "rel_l1": norms.rel_l1,
        "rel_l2": norms.rel_l2,
        "rel_linf": norms.rel_linf,
        "l1": norms.l1,
        "l2": norms.l2,
        "linf": norms.linf,
        "compression_rate": compression_rate(rep),
        "padded_shape": padded.shape,
    }
    return rep, decoded, metrics
