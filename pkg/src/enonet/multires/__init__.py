"""Multi-resolution representation, compression codec, and image tooling."""

from .codec import (
    ErrorNorms,
    MultiResRep,
    MultiResRep2D,
    ThresholdSchedule,
    compression_rate,
    decode,
    decode2d,
    encode,
    encode2d,
    error_norms,
    hard_threshold,
)
from .container import ContainerError, read_container, write_container
from .image import compress_image, pad_to_valid
from .pgm import PgmError, read_pgm, write_pgm

__all__ = [
    "ContainerError",
    "ErrorNorms",
    "MultiResRep",
    "MultiResRep2D",
    "PgmError",
    "ThresholdSchedule",
    "compress_image",
    "compression_rate",
    "decode",
    "decode2d",
    "encode",
    "encode2d",
    "error_norms",
    "hard_threshold",
    "pad_to_valid",
    "read_container",
    "read_pgm",
    "write_container",
    "write_pgm",
]
