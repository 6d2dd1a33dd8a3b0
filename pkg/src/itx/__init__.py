"""Index transform with a squared Whittaker kernel.

Forward transform (direct and through the Laplace and Olevskii maps),
inversion, and a harness that checks the transform's bounds and identities
numerically. Hot kernels come from a compiled extension when it is built,
else from a numpy fallback; ``backend()`` says which.
"""

from ._kernels import backend
from .curves import SampledCurve, TailModel, fit_tail
from .errors import (
    AccuracyLossError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    EnvelopeError,
    ItxError,
    MissingTailError,
    NumericalError,
    OverflowRangeError,
    PoleError,
    PreconditionError,
)
from .functions import CORPUS, IndexFunction, by_name, f1, f2, f3
from .quadrature import KERNEL_CFG, OUTER_CFG, QuadratureConfig
from .transforms import (
    TransformParams,
    build_g_curve,
    forward_composed,
    forward_curve,
    forward_direct,
    frac_derivative_right,
    frac_integral_rl,
    invert_general,
    invert_mu0,
    laplace_of_curve,
    mellin_factorization_residual,
    olevskii_forward,
    olevskii_inverse_mu0,
    parseval_residual,
)
from .verify import VerifyReport

__version__ = "0.1.0"
