"""laxlab: spectral curves and scattering data for two integrable models.

Subpackage layout:

- elliptic: elliptic integrals, Jacobi/Neville functions
- kdv: KdV elliptic travelling waves, curve data, charges, divisor
- chm: continuous Heisenberg magnet states (spin waves, solitons, elliptic)
- transport: Lax connections, parallel transport, monodromy, curve extraction
- scattering: infinite-line scattering data, dispersion relations, charges
- limits: finite-length windows and infinite-length limit laws
- cli: command-line entry point
"""

from . import chm  # noqa: F401
from . import elliptic  # noqa: F401
from . import kdv  # noqa: F401
from . import transport  # noqa: F401

__version__ = "0.1.0"
