"""Sharp Nikolskii constants for spherical polynomials.

Closed forms, numerical lower bounds from zonal optimization, limit
extrapolation, the reproducing-kernel scaling limit, and node-set checks.
"""

from .constants import *  # noqa: F401,F403
from .designs import *  # noqa: F401,F403
from .errors import DomainError, NumericError
from .extrapolation import estimate_limit, richardson_tableau
from .kernel import *  # noqa: F401,F403
from .quadrature import *  # noqa: F401,F403
from .special import *  # noqa: F401,F403
from .zonal import OptimizeOptions, ZonalObjective, optimize_zonal_constant, zonal_ratio

__version__ = "0.1.0"
