"""Uniform sampling over Z_3329^256 from SHAKE-128: three samplers, a Monte
Carlo harness, randomness tests and a clock-cycle datapath model."""

from .bitstream import ByteVector, DoublePushBack, NibbleReader
from .matrixgen import MatrixA, generate_matrix
from .samplers import (
    N,
    Q,
    SAMPLERS,
    Polynomial,
    SampleReport,
    SamplingExhausted,
    sample_conventional,
    sample_modified,
    sample_spdm3,
)
from .xof import Exhausted, XofStream, new_stream, shake128

__version__ = "0.1.0"

__all__ = [
    "ByteVector", "DoublePushBack", "NibbleReader", "MatrixA", "generate_matrix", "N", "Q",
    "SAMPLERS", "Polynomial", "SampleReport", "SamplingExhausted", "sample_conventional",
    "sample_modified", "sample_spdm3", "Exhausted", "XofStream", "new_stream", "shake128",
]
