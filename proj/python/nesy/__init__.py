"""Knowledge compilation, weighted model counting and constraint losses."""

from ._nesy import (
    CircuitHandle,
    ComputationError,
    NesyError,
    ParseError,
    batch_loss,
    compile_dimacs,
    compile_dsl,
    full_entropy,
    load_circuit,
    parse_circuit,
)

__all__ = [
    "CircuitHandle",
    "ComputationError",
    "NesyError",
    "ParseError",
    "batch_loss",
    "compile_dimacs",
    "compile_dsl",
    "full_entropy",
    "load_circuit",
    "parse_circuit",
]
