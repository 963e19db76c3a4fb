"""Method-of-moments learning of DPP kernels with cycle-basis sign recovery."""

__version__ = "0.1.0"

from .errors import CapabilityError, InputError, NumericError  # noqa: E402
from .estimator import EstimateResult, MomentTable, estimate, success_metrics  # noqa: E402
from .kernel import Kernel, SignAssignment, rho  # noqa: E402
from .sampler import RngSeed, SampleSet, sample  # noqa: E402

__all__ = [
    "__version__",
    "CapabilityError", "InputError", "NumericError",
    "EstimateResult", "MomentTable", "estimate", "success_metrics",
    "Kernel", "SignAssignment", "rho",
    "RngSeed", "SampleSet", "sample",
]
