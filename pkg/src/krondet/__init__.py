"""Determinants of ``G = sum_n A[n] kron x[n] y[n]^T``.

The closed form ``prod_n det(A[n]) * det(X)**F * det(Y)**F`` evaluated from
the factors, a dense oracle that builds G, and permutation-expansion checks
of the block-diagonal terms.
"""

from .closed_form import (ClosedFormBreakdown, bareiss_det, batched_sign_log_det,
                          closed_form_det, closed_form_value, lu_sign_log_det)
from .core import (BoundsError, DenseMatrix, DetValue, KronRankOneInstance, ModeError,
                   PermutationTuple, ResourceError, ScalarMode, ShapeError, SignLogDet,
                   VerificationError, column, compose, matrix_get, perm_sign)
from .dense_oracle import kron, leibniz_det, materialize, materialized_det, outer
from .generator import Profile, random_instance
from .verify import VerificationReport, verify_instance, within_tolerance

__version__ = "0.1.0"
