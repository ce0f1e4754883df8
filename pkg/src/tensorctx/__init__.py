"""Tensor product operators as explicit values.

Build operators with :func:`canonical`, :func:`from_twist` or
:func:`from_basis_images`, then ask which states are separable and which
operators are local *relative to that operator*.
"""

from .analysis import (
    OperatorFactorization,
    SchmidtDecomposition,
    conjugate,
    factorize_operator,
    factorize_state,
    schmidt,
    unfold,
)
from .circuit import (
    Circuit,
    Gate,
    Trace,
    build_teleportation,
    enumerate_branches,
    local_gate,
    local_measurement,
    measurement_gate,
    simulate,
    swap_bridge,
    transform_circuit,
    unitary_gate,
)
from .composition import (
    MultipartiteContext,
    PairingOperator,
    Part,
    make_pairing,
    pair_apply,
    pair_lift,
    rebase,
    standard_context_3q,
)
from .errors import (
    ContextMismatch,
    DecompositionError,
    DimensionMismatch,
    NotHermitian,
    NotNormalized,
    NotOrthonormal,
    NotUnitary,
    ParseError,
    ResolutionError,
    TensorCtxError,
    TypeMismatch,
    WrongCount,
)
from .measurement import MeasurementResult, Observable, measure, observable_from, sample
from .numerics import approx_eq_phase, dagger, eig_hermitian, kron, svd
from .tensor_op import (
    AxiomReport,
    TensorProductOperator,
    TensorType,
    canonical,
    from_basis_images,
    from_twist,
    relating_unitary,
    verify_axioms,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "Circuit",
    "ContextMismatch",
    "DecompositionError",
    "DimensionMismatch",
    "Gate",
    "MeasurementResult",
    "MultipartiteContext",
    "NotHermitian",
    "NotNormalized",
    "NotOrthonormal",
    "NotUnitary",
    "Observable",
    "OperatorFactorization",
    "PairingOperator",
    "ParseError",
    "Part",
    "ResolutionError",
    "SchmidtDecomposition",
    "TensorCtxError",
    "TensorProductOperator",
    "TensorType",
    "Trace",
    "TypeMismatch",
    "WrongCount",
    "approx_eq_phase",
    "build_teleportation",
    "canonical",
    "conjugate",
    "dagger",
    "eig_hermitian",
    "enumerate_branches",
    "factorize_operator",
    "factorize_state",
    "from_basis_images",
    "from_twist",
    "kron",
    "local_gate",
    "local_measurement",
    "make_pairing",
    "measure",
    "measurement_gate",
    "observable_from",
    "pair_apply",
    "pair_lift",
    "rebase",
    "relating_unitary",
    "sample",
    "schmidt",
    "simulate",
    "standard_context_3q",
    "svd",
    "swap_bridge",
    "transform_circuit",
    "unfold",
    "unitary_gate",
    "verify_axioms",
]
