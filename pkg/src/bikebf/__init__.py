"""Layered bit-flipping decoding of QC-MDPC codes.

Submodules: ``gf2`` (vectors, keys, syndromes), ``threshold`` (affine
threshold and quantization), ``decoder``, ``calibration``, ``dfr``,
``cost`` and ``cli``.
"""

from .decoder import DecodeOutcome, DecoderConfig, count_upc, decode, decode_and_check
from .gf2 import BitVector, CodeParams, SparseKey, column, is_invertible, keygen, sample_error, syndrome
from .threshold import ThresholdCoefficients, f_eval, quantize, threshold

__version__ = "0.1.0"

__all__ = [
    "BitVector",
    "CodeParams",
    "DecodeOutcome",
    "DecoderConfig",
    "SparseKey",
    "ThresholdCoefficients",
    "column",
    "count_upc",
    "decode",
    "decode_and_check",
    "f_eval",
    "is_invertible",
    "keygen",
    "quantize",
    "sample_error",
    "syndrome",
    "threshold",
]
