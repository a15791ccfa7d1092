"""States over time on multi-matrix algebras and the entropy measures built from them."""

from .channel import (Channel, amplitude_damping, bitflip, classical_channel, compose, from_kraus,
                      from_unitary, identity_channel, povm_channel, ptrace_channel, pvm_channel)
from .entropy import ext_entropy, even_entropy
from .measures import MeasureReport, all_measures, measures_of
from .mmalg import AlgebraShape, AlgElement, classical_algebra, matrix_algebra, tensor_shape
from .sot import (COMPOUND, LEFT, LS, RIGHT, SYM_BLOOM, Process, SotKind, p_bloom, sot, sot_value,
                  sym_p_bloom)

__version__ = "0.1.0"

__all__ = [
    "AlgElement", "AlgebraShape", "COMPOUND", "Channel", "LEFT", "LS", "MeasureReport", "Process",
    "RIGHT", "SYM_BLOOM", "SotKind", "all_measures", "amplitude_damping", "bitflip",
    "classical_algebra", "classical_channel", "compose", "even_entropy", "ext_entropy",
    "from_kraus", "from_unitary", "identity_channel", "matrix_algebra", "measures_of",
    "p_bloom", "povm_channel", "ptrace_channel", "pvm_channel", "sot", "sot_value",
    "sym_p_bloom", "tensor_shape",
]
