"""quasiloc: finite-scale numerics for quasi-periodic Schrodinger operators.

The package computes transfer-matrix cocycles, Lyapunov exponents and
acceleration, zero structures of trace functions on annuli, large deviation
sets, and eigenfunction decay for the operator

    (H phi)_n = phi_{n+1} + phi_{n-1} + v(theta + n*omega) phi_n .
"""

__version__ = "0.1.0"

from .errors import QuasilocError  # noqa: F401
