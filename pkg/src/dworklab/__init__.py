"""dworklab: exact verification of p-adic valuation bounds for
exponentials of power series, subgroup/homomorphism counting for finite
groups and their free products, and related congruence checks.
"""

from .exactcore import INFINITY, Rat, legendre_valuation, vp
from .kernels import BACKEND as KERNEL_BACKEND

__all__ = ["INFINITY", "Rat", "vp", "legendre_valuation", "KERNEL_BACKEND"]
__version__ = "0.1.0"
