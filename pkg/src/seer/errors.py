"""Exception hierarchy shared across the pipeline.

Every error names the offending element so callers (and the CLI) can emit
structured diagnostics instead of bare strings.
"""

from __future__ import annotations


class SeerError(Exception):
    """Base class for all pipeline errors."""

    #: short machine-readable tag, overridden by subclasses
    code = "error"

    def __init__(self, message: str, *, element: str | None = None):
        super().__init__(message)
        self.element = element

    def to_dict(self) -> dict:
        out: dict = {"error": self.code, "detail": str(self)}
        if self.element is not None:
            out["element"] = self.element
        return out


class SchemaError(SeerError):
    code = "schema_violation"


class UnknownFieldError(SchemaError):
    code = "unknown_field"


class DuplicateNodeError(SeerError):
    code = "duplicate_id"


class DanglingEdgeError(SeerError):
    code = "dangling_endpoint"


class SelfLoopError(SeerError):
    code = "self_loop"


class DuplicateEdgeError(SeerError):
    code = "parallel_edge"


class UnknownNodeError(SeerError):
    code = "unknown_id"


class PerturbationError(SeerError):
    code = "invalid_perturbation"


class NonSymmetricMatrixError(SeerError):
    code = "not_symmetric"


class NegativeEigenvalueError(SeerError):
    code = "negative_eigenvalue"


class NodeSetMismatchError(SeerError):
    code = "node_set_mismatch"


class MicrographParameterError(SeerError):
    code = "parameter_below_minimum"


class OrderingViolationError(SeerError):
    code = "ordering_violation"


class NonpositiveValueError(SeerError):
    code = "nonpositive_value"


class UnknownSymbolError(SeerError):
    code = "unknown_symbol"


class UnknownContextError(SeerError):
    code = "unknown_context"


class SequenceLengthError(SeerError):
    code = "sequence_length"


class SequenceOverflowError(SeerError):
    code = "sequence_overflow"


class EmptyCorpusError(SeerError):
    code = "empty_corpus"


class CorpusSpecError(SeerError):
    code = "invalid_corpus_spec"


class SplitError(SeerError):
    code = "invalid_split"


class ShapeError(SeerError):
    code = "shape_mismatch"


class NonFiniteError(SeerError):
    code = "non_finite"


class CheckpointError(SeerError):
    code = "bad_checkpoint"
