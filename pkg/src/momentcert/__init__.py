"""Certification toolkit for truncated multidimensional moment problems."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    IncompletenessError,
    InconsistencyError,
    InfeasibleError,
    MomentError,
    PositivityError,
    PSDDefectError,
    TruncationDepthError,
)
from .families import (  # noqa: E402
    MeasureFamily,
    generate_certificate,
    polarize,
    sesquilinear_audit,
    verify_moment_conditions,
    verify_parallelogram_positivity,
)
from .sequences import (  # noqa: E402
    AtomicMeasure,
    CoefficientVector,
    SignedAtomicMeasure,
    TruncatedSequence,
    localize,
    moments_of,
    poly_eval,
)
