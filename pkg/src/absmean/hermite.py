"""Probabilists' Hermite polynomials and their normal-moment formulas.

The family is defined by H_0 = 1, H_1(y) = y and the three-term recurrence

    H_{k+1}(y) = y * H_k(y) - k * H_{k-1}(y),

orthogonal under the standard normal density phi with integral of
H_k^2 * phi equal to k!.  The property the estimators in this package build
on: for X ~ N(mu, 1), E H_k(X) = mu^k, so empirical means of H_k are
unbiased estimators of pure powers of the mean.  The exact second moment

    E H_k(X)^2 = k! * sum_{j=0..k} C(k, j) mu^{2j} / j!

gives the variance control; it is bounded by e^{mu^2} k^k in general and by
(2 M^2)^k when |mu| <= M with M^2 >= k.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegreeOverflowError, DomainError, RangeError

DEFAULT_MAX_DEGREE = 200

_MAX_FLOAT = np.finfo(np.float64).max
_LOG_MAX_FLOAT = math.log(_MAX_FLOAT)
# switch the second-moment accumulation to log-space before intermediates
# can overflow
_DIRECT_LIMIT = 1e300


def _check_degree(k: int, max_degree: int) -> None:
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {k!r}")
    if k > max_degree:
        raise DegreeOverflowError(f"degree {k} exceeds the configured maximum {max_degree}")


def hermite_eval(k: int, y: float, max_degree: int = DEFAULT_MAX_DEGREE) -> float:
    """Evaluate H_k(y) by the three-term recurrence."""
    _check_degree(k, max_degree)
    y = float(y)
    if not math.isfinite(y):
        raise DomainError(f"y must be finite, got {y!r}")
    if k == 0:
        return 1.0
    prev, cur = 1.0, y
    for j in range(1, k):
        prev, cur = cur, y * cur - j * prev
    return cur


def hermite_eval_batch(k_max: int, y, max_degree: int = DEFAULT_MAX_DEGREE) -> np.ndarray:
    """Evaluate [H_0(y), ..., H_{k_max}(y)] in one recurrence pass.

    `y` may be a scalar or an ndarray; the output has shape
    (k_max + 1,) + shape(y).  Element j agrees exactly with
    hermite_eval(j, y): both run the identical recurrence.
    """
    _check_degree(k_max, max_degree)
    arr = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("y must be finite")
    out = np.empty((k_max + 1,) + arr.shape, dtype=np.float64)
    out[0] = 1.0
    if k_max >= 1:
        out[1] = arr
    for j in range(1, k_max):
        out[j + 1] = arr * out[j] - j * out[j - 1]
    return out


def hermite_second_moment(k: int, mu: float, max_degree: int = DEFAULT_MAX_DEGREE) -> float:
    """Exact E H_k(X)^2 for X ~ N(mu, 1).

    Uses the closed form k! * sum_j C(k,j) mu^{2j} / j!, accumulated
    multiplicatively; switches to log-space (logsumexp) if any intermediate
    would exceed the direct-evaluation range.  Raises RangeError when even
    the final value overflows double precision.
    """
    _check_degree(k, max_degree)
    mu = float(mu)
    if not math.isfinite(mu):
        raise DomainError(f"mu must be finite, got {mu!r}")

    if k <= 170:  # k! representable, try the direct accumulation
        term = float(math.factorial(k))
        total = term
        mu2 = mu * mu
        ok = True
        for j in range(k):
            # term ratio: C(k,j+1)/C(k,j) * mu^2 * j!/(j+1)! = mu^2 (k-j)/(j+1)^2
            term *= mu2 * (k - j) / ((j + 1) * (j + 1))
            total += term
            if total > _DIRECT_LIMIT:
                ok = False
                break
        if ok:
            return total

    # log-space path
    if mu == 0.0:
        log_terms = [math.lgamma(k + 1)]
    else:
        log_mu2 = 2.0 * math.log(abs(mu))
        log_terms = []
        for j in range(k + 1):
            log_c = math.lgamma(k + 1) - math.lgamma(j + 1) - math.lgamma(k - j + 1)
            log_terms.append(log_c + j * log_mu2 + math.lgamma(k + 1) - math.lgamma(j + 1))
    peak = max(log_terms)
    log_total = peak + math.log(sum(math.exp(t - peak) for t in log_terms))
    if log_total > _LOG_MAX_FLOAT:
        raise RangeError(f"second moment overflows double range for k={k}, mu={mu}")
    return math.exp(log_total)
