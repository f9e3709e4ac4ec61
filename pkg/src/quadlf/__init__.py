"""quadlf: exact quadratic Dirichlet L-functions over F_q[x].

Computes the full ensemble of L-polynomials attached to monic square-free
polynomials of odd degree, evaluates the predicted main terms (ratio averages,
twisted shifted moments, one-level density) via degree-grouped Euler products,
and verifies the exact identities and desk-scale asymptotics relating the two.
"""

from .polyfq import FieldError, Poly, check_field
from .lfun import LPolynomial, TrigPoly, l_coefficients
from .mainterms import TwistPoly

__version__ = "0.1.0"

__all__ = [
    "FieldError",
    "Poly",
    "check_field",
    "LPolynomial",
    "TrigPoly",
    "l_coefficients",
    "TwistPoly",
    "__version__",
]
