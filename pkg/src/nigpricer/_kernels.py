"""Hot accumulation kernels for the residue-series pricers.

Series terms are assembled in log-magnitude + sign form (the individual
Gamma / Bessel / power factors overflow double precision long before the
terms themselves do) and bucketed into partial sums: anti-diagonals
``n1 + n2`` for the double series, hyper-shells ``max(n1, n2, n3)`` for the
triple series.  The buckets are then combined in index order with
compensated (Kahan) accumulation.

Each kernel ships in two variants: a numba ``@njit`` scalar loop and a
vectorized pure-numpy fallback (see ``_backend``).  Both are importable for
benchmarking regardless of the active backend.
"""

import math

import numpy as np

from ._backend import HAVE_NUMBA, USE_NUMBA

if HAVE_NUMBA:
    from numba import njit


def kahan_sum(values: np.ndarray) -> float:
    """Compensated sum in array order."""
    acc = 0.0
    carry = 0.0
    for v in values:
        y = v - carry
        t = acc + y
        carry = (t - acc) - y
        acc = t
    return acc


# ---------------------------------------------------------------------------
# double grid: term(n1, n2) = sA sB sG * exp(logA[n1] + logB[n2] + logG[n2-n1+off])
# ---------------------------------------------------------------------------


def _grid_sum_py(logA, sgnA, logB, sgnB, logG, sgnG, n2_start):
    r1 = logA.shape[0] - 1
    r2 = logB.shape[0] - 1
    bins = np.zeros(r1 + r2 + 1)
    evaluated = 0
    zeros = 0
    for n1 in range(r1 + 1):
        la = logA[n1]
        sa = sgnA[n1]
        for n2 in range(n2_start, r2 + 1):
            s = sa * sgnB[n2] * sgnG[n2 - n1 + r1]
            if s == 0:
                zeros += 1
                continue
            evaluated += 1
            bins[n1 + n2] += s * math.exp(la + logB[n2] + logG[n2 - n1 + r1])
    return bins, evaluated, zeros


def _grid_sum_numpy(logA, sgnA, logB, sgnB, logG, sgnG, n2_start):
    r1 = logA.shape[0] - 1
    r2 = logB.shape[0] - 1
    n1 = np.arange(r1 + 1)
    n2 = np.arange(n2_start, r2 + 1)
    midx = n2[None, :] - n1[:, None] + r1
    sgn = (sgnA[:, None] * sgnB[None, n2_start:]).astype(np.float64) * sgnG[midx]
    logt = logA[:, None] + logB[None, n2_start:] + logG[midx]
    terms = sgn * np.exp(np.where(sgn == 0.0, -np.inf, logt))
    bins = np.bincount(
        (n1[:, None] + n2[None, :]).ravel(), weights=terms.ravel(), minlength=r1 + r2 + 1
    )
    evaluated = int(np.count_nonzero(sgn))
    return bins, evaluated, sgn.size - evaluated


# ---------------------------------------------------------------------------
# triple grid: term(n1, n2, n3) adds a Pochhammer table P[j, n2], j = n1 - n3,
# and reads the G table at m = n2 - j; bucketed by shell = max(n1, n2, n3)
# ---------------------------------------------------------------------------


def _triple_sum_py(logA, sgnA, logB, sgnB, logP, sgnP, logG, sgnG, n3_start, n3_end):
    r = logA.shape[0] - 1
    bins = np.zeros(r + 1)
    evaluated = 0
    zeros = 0
    for n1 in range(r + 1):
        la = logA[n1]
        sa = sgnA[n1]
        for n3 in range(n3_start, n3_end + 1):
            j = n1 - n3
            hi = n1 if n1 > n3 else n3
            for n2 in range(r + 1):
                s = sa * sgnB[n2] * sgnP[j + r, n2] * sgnG[n2 - j + r]
                if s == 0:
                    zeros += 1
                    continue
                evaluated += 1
                shell = hi if hi > n2 else n2
                bins[shell] += s * math.exp(
                    la + logB[n2] + logP[j + r, n2] + logG[n2 - j + r]
                )
    return bins, evaluated, zeros


def _triple_sum_numpy(logA, sgnA, logB, sgnB, logP, sgnP, logG, sgnG, n3_start, n3_end):
    r = logA.shape[0] - 1
    n1 = np.arange(r + 1)
    n2 = np.arange(r + 1)
    bins = np.zeros(r + 1)
    evaluated = 0
    zeros = 0
    max12 = np.maximum(n1[:, None], n2[None, :])
    for n3 in range(n3_start, n3_end + 1):
        j = n1 - n3  # per n1
        midx = n2[None, :] - j[:, None] + r
        sgn = (sgnA[:, None] * sgnB[None, :]) * sgnP[j + r, :] * sgnG[midx]
        logt = logA[:, None] + logB[None, :] + logP[j + r, :] + logG[midx]
        terms = sgn * np.exp(np.where(sgn == 0.0, -np.inf, logt))
        shell = np.maximum(max12, n3)
        bins += np.bincount(shell.ravel(), weights=terms.ravel(), minlength=r + 1)
        nz = int(np.count_nonzero(sgn))
        evaluated += nz
        zeros += sgn.size - nz
    return bins, evaluated, zeros


if HAVE_NUMBA:
    _grid_sum_numba = njit(cache=True)(_grid_sum_py)
    _triple_sum_numba = njit(cache=True)(_triple_sum_py)
    _kahan_sum_numba = njit(cache=True)(kahan_sum)
else:  # pragma: no cover
    _grid_sum_numba = None
    _triple_sum_numba = None
    _kahan_sum_numba = None

if USE_NUMBA:
    grid_sum = _grid_sum_numba
    triple_sum = _triple_sum_numba
else:
    grid_sum = _grid_sum_numpy
    triple_sum = _triple_sum_numpy
