"""Spectral analysis of algebras over colored operads.

Modules map one to one onto the pipeline: ``linalg`` (eigenvalues,
holomorphic calculus, exact quotients), ``operad`` and ``algebra`` (data
model and axiom checks), ``spectral`` (residue, Hochschild object, operadic
and analytic spectra), ``basechange`` (functor transport checks) and ``cli``.
"""
from .algebra import (
    AlgebraMorphism,
    PAlgebra,
    block_algebra,
    block_operator,
    network_algebra,
    nogo_witness_pair,
    poly_calculus,
    trivial_algebra,
    validate_algebra,
)
from .basechange import (
    FunctorHandle,
    check_functor_coherence,
    check_hochschild_transport,
    check_residue_transport,
    check_spectral_mapping,
    check_spectrum_transport,
    get_functor,
    pushforward_algebra,
    register,
)
from .errors import *
from .linalg import (
    BUILTIN_FUNCTIONS,
    HoloFunction,
    SpectrumSet,
    eigenvalues,
    holo_apply,
    resolvent,
    resolvent_identity_check,
    schur,
)
from .operad import (
    ColoredOperad,
    Digraph,
    Edge,
    Signature,
    matrix_block_operad,
    network_operad,
    trivial_operad,
    validate_operad,
)
from .spectral import (
    analytic_spectrum,
    balanced_tensor,
    decompose,
    hochschild,
    naive_spectrum,
    operadic_spectrum,
    residue,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_FUNCTIONS",
    "AlgebraMorphism",
    "ColoredOperad",
    "ConvergenceFailure",
    "Digraph",
    "DimensionMismatch",
    "DomainViolation",
    "Edge",
    "EmptyGraph",
    "FunctorHandle",
    "HoloFunction",
    "InconsistentDecomposition",
    "IndexMismatch",
    "MissingDistinguished",
    "NonRealData",
    "NonSquare",
    "PAlgebra",
    "ParseError",
    "SOCError",
    "Signature",
    "SpectralPoint",
    "SpectrumSet",
    "UnregisteredFunctor",
    "UnsupportedLevel",
    "ValidationFailure",
    "analytic_spectrum",
    "balanced_tensor",
    "block_algebra",
    "block_operator",
    "check_functor_coherence",
    "check_hochschild_transport",
    "check_residue_transport",
    "check_spectral_mapping",
    "check_spectrum_transport",
    "decompose",
    "eigenvalues",
    "get_functor",
    "hochschild",
    "holo_apply",
    "matrix_block_operad",
    "naive_spectrum",
    "network_algebra",
    "network_operad",
    "nogo_witness_pair",
    "operadic_spectrum",
    "poly_calculus",
    "pushforward_algebra",
    "register",
    "residue",
    "resolvent",
    "resolvent_identity_check",
    "schur",
    "trivial_algebra",
    "trivial_operad",
    "validate_algebra",
    "validate_operad",
]
