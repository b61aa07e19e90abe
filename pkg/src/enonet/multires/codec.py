"""Multi-resolution representation, threshold compression, and metrics.

Encoding walks the nested-grid hierarchy top-down to collect the exact
decimated levels, then rebuilds bottom-up: each level is predicted from the
*already thresholded* coarser reconstruction, the odd-node prediction errors
are thresholded per level, and the compressed reconstruction is propagated
upward.  Decoding replays prediction plus stored details.  The 2D variant
tensorizes the same predictor (x rows first, then y columns) and stores one
detail array per level against the full 2D prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..eno_core import GhostPolicy, predict_fine_level


@dataclass(frozen=True)
class ThresholdSchedule:
    """Per-level thresholds eps^k = eps * t^(K-k) for levels k = 1..K."""

    eps: float
    t: float
    levels: int

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("threshold eps must be non-negative")
        if not 0.0 < self.t < 1.0:
            raise ValueError("threshold decay t must lie in (0, 1)")
        if self.levels < 1:
            raise ValueError("need at least one level")

    def threshold(self, k: int) -> float:
        if not 1 <= k <= self.levels:
            raise ValueError(f"level {k} outside 1..{self.levels}")
        return self.eps * self.t ** (self.levels - k)


def hard_threshold(values, eps: float) -> np.ndarray:
    """Zero every entry with |value| <= eps (strict inequality keeps)."""
    values = np.asarray(values, dtype=float)
    return np.where(np.abs(values) <= eps, 0.0, values)


def _reconcile_details(kept, pred, target):
    """Nudge surviving details so pred + detail reproduces target bit-exactly.

    fl(pred + fl(target - pred)) can land one ulp off target; a zeroed slot
    is exact by definition (fl(target - pred) == 0 iff they are equal), so
    only survivors need the correction.  An exactly reconstructing
    coefficient exists unless the prediction overshoots the target's binade
    by more than the detail's ulp (then the sum lattice is coarser than the
    target's rounding window); in that corner the nearest representable
    reconstruction is kept.  Data whose significands leave headroom for the
    dyadic prediction weights (images, quantized signals) round-trip exactly
    by construction.
    """
    mask = kept != 0.0
    if not mask.any():
        return kept
    k = kept.copy()
    for _ in range(3):
        s = pred + k
        bad = mask & (s != target)
        if not bad.any():
            return k
        step = target[bad] - s[bad]
        k[bad] += step
    s = pred + k
    bad = mask & (s != target)
    for _ in range(4):
        if not bad.any():
            return k
        # one-ulp steps of the detail; a no-op here means no exact solution
        nudged = np.nextafter(k[bad], np.where(s[bad] < target[bad], np.inf, -np.inf))
        if np.array_equal(nudged, k[bad]):
            break
        k[bad] = nudged
        s = pred + k
        bad = mask & (s != target)
    return k


@dataclass(frozen=True)
class MultiResRep:
    """Coarsest data plus per-level thresholded details (odd-node errors)."""

    q0: np.ndarray
    details: list = field(default_factory=list)

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def n0(self) -> int:
        return self.q0.size - 1

    def fine_size(self) -> int:
        return self.n0 * (1 << self.levels) + 1


@dataclass(frozen=True)
class MultiResRep2D:
    """2D analogue; level-k details are full (Nx_k+1, Ny_k+1) arrays that are
    structurally zero at even-even nodes (those copy the coarser level)."""

    q0: np.ndarray
    details: list = field(default_factory=list)

    @property
    def levels(self) -> int:
        return len(self.details)


def _check_1d_shape(fine, levels):
    fine = np.asarray(fine, dtype=float)
    if fine.ndim != 1:
        raise ValueError("fine data must be one-dimensional")
    n = fine.size - 1
    step = 1 << levels
    if n < step or n % step:
        raise ValueError(
            f"fine size {fine.size} is not of the form N0*2^{levels}+1; "
            f"nearest valid sizes are {(n // step) * step + 1} and {(n // step + 1) * step + 1}"
        )
    return fine, n // step


def encode(fine, p: int, schedule: ThresholdSchedule,
           ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE) -> MultiResRep:
    """Compressed multi-resolution encoding with error feedback."""
    fine, _ = _check_1d_shape(fine, schedule.levels)
    levels = [fine]
    for _ in range(schedule.levels):
        levels.append(levels[-1][::2])
    levels.reverse()  # levels[k] is the exact level-k data
    q0 = levels[0]
    rec = q0.copy()
    details = []
    for k in range(1, schedule.levels + 1):
        predicted = predict_fine_level(rec, p, ghost_policy)
        raw = levels[k][1::2] - predicted[1::2]
        kept = hard_threshold(raw, schedule.threshold(k))
        kept = _reconcile_details(kept, predicted[1::2], levels[k][1::2])
        details.append(kept)
        # even nodes of `predicted` already copy the previous feedback state
        rec = predicted
        rec[1::2] += kept
    return MultiResRep(q0, details)


def decode(rep: MultiResRep, p: int,
           ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE) -> np.ndarray:
    """Invert :func:`encode` (exactly reproduces the encoder's feedback state)."""
    rec = np.asarray(rep.q0, dtype=float).copy()
    for k, det in enumerate(rep.details, start=1):
        det = np.asarray(det, dtype=float)
        if det.size != rec.size - 1:
            raise ValueError(f"level {k} details have {det.size} entries, expected {rec.size - 1}")
        rec = predict_fine_level(rec, p, ghost_policy)
        rec[1::2] += det
    return rec


def _predict2d(coarse, p, ghost_policy):
    coarse = np.asarray(coarse, dtype=float)
    nx, ny = coarse.shape
    mid = np.empty((2 * nx - 1, ny))
    for j in range(ny):
        mid[:, j] = predict_fine_level(coarse[:, j], p, ghost_policy)
    out = np.empty((2 * nx - 1, 2 * ny - 1))
    for i in range(mid.shape[0]):
        out[i, :] = predict_fine_level(mid[i, :], p, ghost_policy)
    return out


def _check_2d_shape(fine, levels):
    fine = np.asarray(fine, dtype=float)
    if fine.ndim != 2:
        raise ValueError("fine data must be two-dimensional")
    step = 1 << levels
    for n in fine.shape:
        if (n - 1) < step or (n - 1) % step:
            raise ValueError(
                f"2D shape {fine.shape} is not (Nx0*2^{levels}+1, Ny0*2^{levels}+1); "
                f"each side must be a multiple of {step} plus one"
            )
    return fine


def encode2d(fine, p: int, schedule: ThresholdSchedule,
             ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE) -> MultiResRep2D:
    """Tensorized 2D encoding; details cover all nodes except even-even ones."""
    fine = _check_2d_shape(fine, schedule.levels)
    levels = [fine]
    for _ in range(schedule.levels):
        levels.append(levels[-1][::2, ::2])
    levels.reverse()
    q0 = levels[0]
    rec = q0.copy()
    details = []
    for k in range(1, schedule.levels + 1):
        predicted = _predict2d(rec, p, ghost_policy)
        raw = levels[k] - predicted
        raw[::2, ::2] = 0.0  # even-even nodes copy the coarser level
        kept = hard_threshold(raw, schedule.threshold(k))
        kept = _reconcile_details(kept, predicted, levels[k])
        details.append(kept)
        rec = predicted + kept
    return MultiResRep2D(q0, details)


def decode2d(rep: MultiResRep2D, p: int,
             ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE) -> np.ndarray:
    rec = np.asarray(rep.q0, dtype=float).copy()
    for k, det in enumerate(rep.details, start=1):
        det = np.asarray(det, dtype=float)
        expected = (2 * rec.shape[0] - 1, 2 * rec.shape[1] - 1)
        if det.shape != expected:
            raise ValueError(f"level {k} details have shape {det.shape}, expected {expected}")
        rec = _predict2d(rec, p, ghost_policy) + det
    return rec


def compression_rate(rep) -> float:
    """Fraction of detail slots zeroed out (coarse nodes excluded)."""
    if isinstance(rep, MultiResRep):
        # detail slots sum to N_K - N0, the nodes beyond the coarse grid
        total = sum(det.size for det in rep.details)
        surviving = sum(int(np.count_nonzero(det)) for det in rep.details)
    elif isinstance(rep, MultiResRep2D):
        total = 0
        surviving = 0
        shape = rep.q0.shape
        for det in rep.details:
            fine_nodes = det.shape[0] * det.shape[1]
            coarse_nodes = ((det.shape[0] + 1) // 2) * ((det.shape[1] + 1) // 2)
            total += fine_nodes - coarse_nodes
            surviving += int(np.count_nonzero(det))
    else:
        raise TypeError("expected a MultiResRep or MultiResRep2D")
    if total == 0:
        return 1.0
    return 1.0 - surviving / total


@dataclass(frozen=True)
class ErrorNorms:
    l1: float
    l2: float
    linf: float
    rel_l1: float
    rel_l2: float
    rel_linf: float

    def as_tuple(self):
        return (self.l1, self.l2, self.linf)


def error_norms(a, b, h: float = 1.0) -> ErrorNorms:
    """Discrete norms of a-b: L1 = h*sum|d|, L2 = sqrt(h*sum d^2), Linf = max|d|.

    Relative variants divide by the same norm of `a`; an exactly zero
    reference norm yields a relative error of zero when the absolute error
    is zero and inf otherwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = (a - b).ravel()
    l1 = h * np.abs(diff).sum()
    l2 = float(np.sqrt(h * np.square(diff).sum()))
    linf = float(np.max(np.abs(diff))) if diff.size else 0.0
    ref = a.ravel()
    r1 = h * np.abs(ref).sum()
    r2 = float(np.sqrt(h * np.square(ref).sum()))
    rinf = float(np.max(np.abs(ref))) if ref.size else 0.0

    def rel(err, refn):
        if refn == 0.0:
            return 0.0 if err == 0.0 else float("inf")
        return err / refn

    return ErrorNorms(float(l1), l2, linf, rel(float(l1), float(r1)), rel(l2, r2), rel(linf, rinf))
