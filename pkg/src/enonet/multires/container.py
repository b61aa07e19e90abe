"""Binary container for multi-resolution representations.

Layout: the magic bytes ``ENOMR1`` and a newline, one line of compact JSON
metadata, a newline, then raw little-endian float64 payload: the coarse data
followed by the level-1..K details (2D arrays row-major).
"""

from __future__ import annotations

import json

import numpy as np

from .codec import MultiResRep, MultiResRep2D, ThresholdSchedule

MAGIC = b"ENOMR1"


class ContainerError(ValueError):
    pass


def _floats_le(arr) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def write_container(path, rep, p: int, schedule: ThresholdSchedule, ghost_policy) -> None:
    ghost = getattr(ghost_policy, "value", str(ghost_policy))
    header = {
        "p": int(p),
        "K": int(rep.levels),
        "eps": float(schedule.eps),
        "t": float(schedule.t),
        "ghost_policy": ghost,
    }
    if isinstance(rep, MultiResRep):
        header["N0"] = int(rep.q0.size - 1)
    elif isinstance(rep, MultiResRep2D):
        header["Nx0"] = int(rep.q0.shape[0] - 1)
        header["Ny0"] = int(rep.q0.shape[1] - 1)
    else:
        raise TypeError("expected a MultiResRep or MultiResRep2D")
    with open(path, "wb") as fh:
        fh.write(MAGIC + b"\n")
        fh.write(json.dumps(header, sort_keys=True, allow_nan=False).encode("utf-8") + b"\n")
        fh.write(_floats_le(rep.q0))
        for det in rep.details:
            fh.write(_floats_le(det))


def read_container(path):
    """Returns (rep, header dict)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(MAGIC + b"\n"):
        raise ContainerError("bad magic; not an ENOMR1 container")
    nl = data.find(b"\n", len(MAGIC) + 1)
    if nl < 0:
        raise ContainerError("missing metadata line")
    try:
        header = json.loads(data[len(MAGIC) + 1:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"malformed metadata: {exc}") from exc
    payload = np.frombuffer(data[nl + 1:], dtype="<f8")
    k = int(header["K"])
    pos = 0

    def take(count, shape):
        nonlocal pos
        if pos + count > payload.size:
            raise ContainerError("payload shorter than the header promises")
        out = payload[pos:pos + count].reshape(shape).astype(float)
        pos += count
        return out

    if "N0" in header:
        n0 = int(header["N0"])
        q0 = take(n0 + 1, (n0 + 1,))
        details = [take(n0 * (1 << (level - 1)), (n0 * (1 << (level - 1)),))
                   for level in range(1, k + 1)]
        rep = MultiResRep(q0, details)
    else:
        nx0, ny0 = int(header["Nx0"]), int(header["Ny0"])
        q0 = take((nx0 + 1) * (ny0 + 1), (nx0 + 1, ny0 + 1))
        details = []
        for level in range(1, k + 1):
            nx = nx0 * (1 << level) + 1
            ny = ny0 * (1 << level) + 1
            details.append(take(nx * ny, (nx, ny)))
        rep = MultiResRep2D(q0, details)
    if pos != payload.size:
        raise ContainerError(f"{payload.size - pos} trailing floats after the declared levels")
    return rep, header
