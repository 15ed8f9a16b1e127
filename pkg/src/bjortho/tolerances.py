"""Numerical tolerances shared across the package."""

from __future__ import annotations

import numpy as np

# relative symmetry defect accepted by herm_eig
EPS_HERM = 1e-12
# eigen / singular residual budgets (relative)
EPS_EIG = 1e-9
EPS_SVD = 1e-9
# width of the undecided band for numerical-range and orthogonality verdicts
DELTA_MARGIN = 1e-7
# relative eigenvalue gap used to cluster the top eigenspace of A*A
EPS_RANK = 1e-10
# a matrix whose spectral norm is at most this is treated as zero
DELTA_ZERO = float(np.finfo(float).tiny)
# |y*My| accepted as an exact zero when certifying a numerical-range witness
EPS_CERT = 1e-10
# minimiser deficits smaller than this count as round-off, not descent;
# evaluation noise of ||A + lam B|| is about 1e-15 relative
EPS_RES = 1e-14
