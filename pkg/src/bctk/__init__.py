"""bctk: exact process-theoretic semantics for bilocal classical theory,
its classical (ontological) model, and the latent-classical falsifier."""

from .systems import PureLabel, SystemShape, TRIVIAL, bct_dim
from .classical import ClassicalMap
from .bct import AtomicTerm, Effect, Instrument, ReversibleSpec, State, Transformation
from .ontic import OnticSpace, Report
from .lct import CandidateModel, LctInstance, ViolationCertificate

__version__ = "0.1.0"

__all__ = [
    "AtomicTerm",
    "CandidateModel",
    "ClassicalMap",
    "Effect",
    "Instrument",
    "LctInstance",
    "OnticSpace",
    "PureLabel",
    "Report",
    "ReversibleSpec",
    "State",
    "SystemShape",
    "Transformation",
    "TRIVIAL",
    "ViolationCertificate",
    "bct_dim",
    "__version__",
]
