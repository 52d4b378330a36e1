"""Minimax lower-bound machinery for mean-absolute-value estimation.

Three ingredients:

* A constructive pair of symmetric priors on [-1, 1] whose moments agree
  up to order k while their means of |t| differ by 2 * delta_k, where
  delta_k is the best uniform error of degree-k even polynomial
  approximation to |x|.  The construction solves a small linear system on
  the alternation points of the best approximation, with the alternation
  signs prescribing which prior receives each atom.

* Chi-square distances between the induced Gaussian mixtures: an adaptive
  quadrature for one coordinate, the exact product identity
  I_n^2 = (1 + I_1^2)^n - 1 for n independent coordinates, and closed-form
  upper bounds driven by the number of matched moments.

* The constrained risk inequality: if an estimator does very well under
  one prior, it must pay under another, quantitatively in terms of the
  chi-square distance.  ``verify_constrained_risk`` checks all three forms
  of the inequality by exact enumeration on finite discrete models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .errors import (
    ConstructionError,
    DomainError,
    IntegrationError,
    PreconditionError,
)
from .polyapprox import remez_best_approx

_COND_LIMIT = 1e12
_LP_GRID = 2001
_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# priors

@dataclass(frozen=True)
class SymmetricDiscretePrior:
    """Finitely supported symmetric probability measure, atoms scaled by M.

    positions/weights list every atom (mirror atoms listed explicitly);
    construction validates symmetry and total mass 1.
    """

    positions: tuple[float, ...]
    weights: tuple[float, ...]
    M: float = 1.0

    def __post_init__(self):
        if len(self.positions) != len(self.weights) or len(self.positions) == 0:
            raise ConstructionError("positions and weights must be nonempty and aligned")
        if any(w < 0 for w in self.weights):
            raise ConstructionError("prior weights must be nonnegative")
        total = sum(self.weights)
        if abs(total - 1.0) > 1e-9:
            raise ConstructionError(f"prior weights sum to {total}, expected 1")
        atlas = {}
        for t, w in zip(self.positions, self.weights):
            atlas[round(t, 12)] = atlas.get(round(t, 12), 0.0) + w
        for t, w in atlas.items():
            if abs(atlas.get(-t, 0.0) - w) > 1e-9:
                raise ConstructionError(f"prior is not symmetric at t = {t}")

    def moment(self, order: int) -> float:
        p = np.asarray(self.positions)
        w = np.asarray(self.weights)
        return float(np.dot(w, p ** order))

    def mean_abs(self) -> float:
        p = np.asarray(self.positions)
        w = np.asarray(self.weights)
        return float(np.dot(w, np.abs(p)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(np.asarray(self.positions), size=size, p=np.asarray(self.weights))


def scale_prior(prior: SymmetricDiscretePrior, M: float) -> SymmetricDiscretePrior:
    """Push the prior forward by t -> M t."""
    if not (isinstance(M, (int, float)) and math.isfinite(M)) or M <= 0:
        raise DomainError(f"M must be a finite positive number, got {M!r}")
    return SymmetricDiscretePrior(
        tuple(float(M) * t for t in prior.positions), prior.weights, M=prior.M * float(M)
    )


def _prior_pair_lp(k: int) -> tuple[tuple, tuple, float]:
    """Fallback construction: total-variation LP on a symmetric grid.

    Maximizes integral of |t| d(nu1 - nu0) subject to matching moments up to
    order k and total variation 2; the optimum equals 2 delta_k by duality
    with best polynomial approximation.
    """
    grid = np.linspace(-1.0, 1.0, _LP_GRID)
    m = len(grid)
    # variables: positive part p then negative part q, both >= 0
    rows = []
    rhs = []
    for order in range(0, k + 1):
        basis = np.cos(order * np.arccos(grid))   # T_order, well conditioned
        rows.append(np.concatenate([basis, -basis]))
        rhs.append(0.0)
    rows.append(np.ones(2 * m))
    rhs.append(2.0)
    cost = -np.concatenate([np.abs(grid), -np.abs(grid)])
    res = optimize.linprog(
        cost, A_eq=np.asarray(rows), b_eq=np.asarray(rhs), bounds=[(0, None)] * (2 * m),
        method="highs",
    )
    if not res.success:
        raise ConstructionError(f"fallback LP failed: {res.message}")
    p, q = res.x[:m], res.x[m:]
    delta = float(-res.fun) / 2.0

    def collect(weights):
        keep = weights > 1e-9
        pos = grid[keep]
        w = weights[keep]
        # symmetrize against LP asymmetry, then renormalize
        both = {}
        for t, wt in zip(pos, w):
            key = round(abs(t), 9)
            both[key] = both.get(key, 0.0) + wt
        pts, wts = [], []
        for key, wt in sorted(both.items()):
            if key == 0.0:
                pts.append(0.0)
                wts.append(wt)
            else:
                pts.extend([-key, key])
                wts.extend([wt / 2.0, wt / 2.0])
        total = sum(wts)
        return tuple(pts), tuple(wt / total for wt in wts)

    pos1, w1 = collect(p)
    pos0, w0 = collect(q)
    return (pos0, w0), (pos1, w1), delta


@lru_cache(maxsize=None)
def _prior_pair_data(k: int) -> tuple[tuple, tuple, float]:
    sol = remez_best_approx(k // 2)
    K = k // 2
    # nonnegative alternation points with their error signs
    half = [(x, s) for x, s in zip(sol.alternation_points, sol.alternation_signs) if x >= 0.0]
    pts = np.asarray([x for x, _ in half])
    signs = np.asarray([s for _, s in half], dtype=float)
    if pts[0] != 0.0 or len(pts) != K + 2:
        raise ConstructionError("unexpected alternation structure from the exchange solve")

    # Unknown magnitudes v_j >= 0 of the signed measure with weight v_0 at 0
    # and v_j at each of +-t_j.  Moment conditions are expressed through
    # T_i(2t^2 - 1) (same span as the monomials t^{2i}, i <= K, but well
    # conditioned); the last row fixes total variation 2.
    v = 2.0 * pts * pts - 1.0
    mult = np.where(pts > 0.0, 2.0, 1.0)   # mirror atoms counted once
    cheb_rows = [np.ones_like(v), v]
    while len(cheb_rows) < K + 1:
        cheb_rows.append(2.0 * v * cheb_rows[-1] - cheb_rows[-2])
    A = np.empty((K + 2, K + 2))
    for i in range(K + 1):
        A[i, :] = signs * mult * cheb_rows[i]
    A[K + 1, :] = mult
    b = np.zeros(K + 2)
    b[K + 1] = 2.0

    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        return _prior_pair_lp(k)
    mag = np.linalg.solve(A, b)
    if np.any(mag < -1e-9):
        raise ConstructionError(f"negative weight where a positive one was expected: {mag}")
    mag = np.clip(mag, 0.0, None)

    def collect(which_sign):
        pts_out, w_out = [], []
        for t, s, w in zip(pts, signs, mag):
            if s != which_sign or w == 0.0:
                continue
            if t == 0.0:
                pts_out.append(0.0)
                w_out.append(float(w))
            else:
                pts_out.extend([-float(t), float(t)])
                w_out.extend([float(w), float(w)])
        total = sum(w_out)
        if abs(total - 1.0) > 1e-8:
            raise ConstructionError(f"prior part sums to {total}, expected 1")
        return tuple(pts_out), tuple(w / total for w in w_out)

    nu0 = collect(-1.0)   # error -delta at these atoms
    nu1 = collect(+1.0)
    return nu0, nu1, float(sol.delta)


def construct_prior_pair(k: int) -> tuple[SymmetricDiscretePrior, SymmetricDiscretePrior, float]:
    """Symmetric priors (nu0, nu1) on [-1,1] matching moments to order k.

    Returns (nu0, nu1, delta_k): all moments of order <= k agree, while
    mean_abs(nu1) - mean_abs(nu0) = 2 delta_k.  nu1 sits on the alternation
    points where the best-approximation error is +delta, nu0 where it is
    -delta (always including the origin).
    """
    if not isinstance(k, (int, np.integer)) or k % 2 != 0 or not 2 <= k <= 80:
        raise DomainError(f"k must be an even integer in [2, 80], got {k!r}")
    (p0, w0), (p1, w1), delta = _prior_pair_data(int(k))
    return (
        SymmetricDiscretePrior(p0, w0),
        SymmetricDiscretePrior(p1, w1),
        delta,
    )


# ---------------------------------------------------------------------------
# moments of the functional under a prior

@dataclass(frozen=True)
class PriorMoments:
    """Means of |theta| under two priors and the per-coordinate variance term.

    v0_sq is Var_{mu0}(|theta_1|) / n: the variance of the n-average of
    |theta_i| when coordinates are drawn iid from mu0.
    """

    m0: float
    m1: float
    v0_sq: float

    @property
    def gap(self) -> float:
        return abs(self.m1 - self.m0)


def prior_moments(mu0: SymmetricDiscretePrior, mu1: SymmetricDiscretePrior, n: int) -> PriorMoments:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    m0 = mu0.mean_abs()
    var0 = mu0.moment(2) - m0 * m0
    return PriorMoments(m0=m0, m1=mu1.mean_abs(), v0_sq=max(var0, 0.0) / float(n))


# ---------------------------------------------------------------------------
# chi-square distances

def chi_square_gaussian_mixtures(
    positions0, weights0, positions1, weights1, abs_tol: float = 1e-10
) -> float:
    """Squared chi-square distance between two unit-variance Gaussian mixtures.

    Integrates (f1 - f0)^2 / f0 over the real line by adaptive quadrature,
    where f_i(y) = sum_j w_ij phi(y - t_ij).  No symmetry is required of
    the mixing measures.
    """
    p0 = np.asarray(positions0, dtype=float)
    w0 = np.asarray(weights0, dtype=float)
    p1 = np.asarray(positions1, dtype=float)
    w1 = np.asarray(weights1, dtype=float)
    for w in (w0, w1):
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise DomainError("mixture weights must be nonnegative and sum to 1")
    span = float(max(np.max(np.abs(p0)), np.max(np.abs(p1))))
    lo, hi = -span - 10.0, span + 10.0

    def density(y, pos, w):
        return float(np.dot(w, np.exp(-0.5 * (y - pos) ** 2))) / _SQRT_2PI

    tiny = np.finfo(float).tiny

    def integrand(y):
        f0 = max(density(y, p0, w0), tiny)
        diff = density(y, p1, w1) - f0
        return diff * diff / f0

    breaks = sorted(set(float(t) for t in np.concatenate([p0, p1])))
    value, err = integrate.quad(
        integrand, lo, hi, epsabs=abs_tol, epsrel=1e-10, limit=400,
        points=[b for b in breaks if lo < b < hi],
    )
    if err > max(abs_tol, 1e-8 * abs(value)):
        raise IntegrationError(
            f"quadrature error estimate {err:.3e} exceeds the requested tolerance",
            achieved_tolerance=err,
        )
    return max(float(value), 0.0)


def chi_square_mixture_1d(mu0: SymmetricDiscretePrior, mu1: SymmetricDiscretePrior) -> float:
    """Squared chi-square distance for one coordinate under the two priors."""
    return chi_square_gaussian_mixtures(mu0.positions, mu0.weights, mu1.positions, mu1.weights)


def chi_square_product_n(I1_sq: float, n: int) -> float:
    """Exact product identity: I_n^2 = (1 + I_1^2)^n - 1, in log space."""
    if I1_sq < 0:
        raise DomainError(f"I1_sq must be nonnegative, got {I1_sq!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if math.isinf(I1_sq):
        return math.inf
    log_total = n * math.log1p(I1_sq)
    if log_total > math.log(np.finfo(float).max):
        return math.inf
    return float(math.expm1(log_total))


def chi_square_tail_bound_1d(M: float, k_n: int) -> float:
    """Moment-matching tail bound e^{M^2/2} sum_{k > k_n} M^{2k}/k! for one coordinate."""
    if not (isinstance(M, (int, float)) and math.isfinite(M)) or M <= 0:
        raise DomainError(f"M must be a finite positive number, got {M!r}")
    if not isinstance(k_n, (int, np.integer)) or k_n < 1:
        raise DomainError(f"k_n must be a positive integer, got {k_n!r}")
    m2 = M * M
    # term-by-term from k_n+1; no cancellation, geometric-factorial decay
    log_term = (k_n + 1) * math.log(m2) - math.lgamma(k_n + 2)
    term = math.exp(log_term)
    total = 0.0
    k = k_n + 1
    while term > 1e-30 * max(total, 1.0) or k <= k_n + 3:
        total += term
        k += 1
        term *= m2 / k
        if k > k_n + 10000:
            break
    return math.exp(0.5 * m2) * total


def chi_square_single_term_bound_1d(M: float, k_n: int) -> float:
    """Single-term form e^{3M^2/2} (e M^2 / k_n)^{k_n} dominating the tail bound."""
    if not (isinstance(M, (int, float)) and math.isfinite(M)) or M <= 0:
        raise DomainError(f"M must be a finite positive number, got {M!r}")
    if not isinstance(k_n, (int, np.integer)) or k_n < 1:
        raise DomainError(f"k_n must be a positive integer, got {k_n!r}")
    log_val = 1.5 * M * M + k_n * (1.0 + 2.0 * math.log(M) - math.log(k_n))
    if log_val > math.log(np.finfo(float).max):
        return math.inf
    return math.exp(log_val)


def chi_square_bound_n(M: float, k_n: int, n: int) -> float:
    """(1 + e^{3M^2/2}(e M^2/k_n)^{k_n})^n - 1, saturating to inf, in log space."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    x = chi_square_single_term_bound_1d(M, k_n)
    if math.isinf(x):
        return math.inf
    log1p_x = math.log1p(x)
    if n * log1p_x > math.log(np.finfo(float).max):
        return math.inf
    return float(math.expm1(n * log1p_x))


def select_kn_bounded(n: int) -> int:
    """Smallest even integer >= ln n/ln ln n + ln n/(ln ln n)^{3/2}."""
    if not isinstance(n, (int, np.integer)) or n < 17:
        raise DomainError(f"n must be an integer >= 17, got {n!r}")
    log_n = math.log(n)
    loglog = math.log(log_n)
    target = log_n / loglog + log_n / loglog ** 1.5
    k = math.ceil(target)
    return k + (k % 2)


@dataclass(frozen=True)
class MixtureDistance:
    """Chi-square distance between n-fold product mixtures, with its analytic bound."""

    I: float
    I_squared_bound: float
    n: int

    def __post_init__(self):
        if self.I < 0:
            raise ConstructionError("distance must be nonnegative")
        if math.isfinite(self.I_squared_bound) and self.I * self.I > self.I_squared_bound * (1 + 1e-9) + 1e-12:
            raise ConstructionError(
                f"I^2 = {self.I**2} exceeds its analytic bound {self.I_squared_bound}"
            )


# ---------------------------------------------------------------------------
# the constrained risk inequality

@dataclass(frozen=True)
class LowerBoundValue:
    value: float
    hypothesis_holds: bool   # whether |m1 - m0| > v0 * I


def minimax_lower_bound(pm: PriorMoments, I: float) -> LowerBoundValue:
    """(|m1 - m0| - v0 I)^2 / (I + 2)^2 when the gap beats v0 I, else 0."""
    if I < 0 or not math.isfinite(I) and I != math.inf:
        raise DomainError(f"I must be a nonnegative real, got {I!r}")
    v0 = math.sqrt(pm.v0_sq)
    if math.isinf(I) or pm.gap <= v0 * I:
        return LowerBoundValue(0.0, False)
    num = pm.gap - v0 * I
    return LowerBoundValue((num / (I + 2.0)) ** 2, True)


@dataclass(frozen=True)
class DiscreteModel:
    """Finite experiment: parameter i has functional value T_values[i] and
    observation distribution obs_probs[i] over a finite alphabet."""

    T_values: tuple[float, ...]
    obs_probs: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if len(self.T_values) == 0 or len(self.obs_probs) != len(self.T_values):
            raise ConstructionError("need one observation row per parameter")
        width = len(self.obs_probs[0])
        for row in self.obs_probs:
            if len(row) != width or any(p <= 0 for p in row) or abs(sum(row) - 1.0) > 1e-9:
                raise ConstructionError("observation rows must be positive and sum to 1")


@dataclass(frozen=True)
class CriVerification:
    """Exact enumeration record for the three risk inequalities on one rule."""

    I: float
    m0: float
    m1: float
    v0: float
    risk0: float
    risk1: float
    lb1_lhs: float
    lb1_rhs: float
    bayes_ok: bool
    minimax_rhs: float
    lambda_star_matches: bool

    @property
    def lb1_ok(self) -> bool:
        return self.lb1_lhs >= self.lb1_rhs - 1e-10

    @property
    def minimax_ok(self) -> bool:
        return max(self.risk0, self.risk1) >= self.minimax_rhs - 1e-10

    @property
    def all_ok(self) -> bool:
        return self.lb1_ok and self.bayes_ok and self.minimax_ok and self.lambda_star_matches


def verify_constrained_risk(model: DiscreteModel, mu0, mu1, rule, eps: float) -> CriVerification:
    """Check the constrained risk inequality by exact enumeration.

    mu0/mu1: prior weights over the model's parameters.  rule: the
    estimator, one real per observation symbol.  eps: risk budget under
    mu0; the precondition risk0 <= eps^2 is enforced.
    """
    T = np.asarray(model.T_values, dtype=float)
    P = np.asarray(model.obs_probs, dtype=float)
    u0 = np.asarray(mu0, dtype=float)
    u1 = np.asarray(mu1, dtype=float)
    d = np.asarray(rule, dtype=float)
    for u in (u0, u1):
        if u.shape != T.shape or np.any(u < 0) or abs(u.sum() - 1.0) > 1e-9:
            raise DomainError("priors must be distributions over the parameter set")
    if d.shape != (P.shape[1],):
        raise DomainError("rule must assign one value per observation symbol")

    sq_err = (d[None, :] - T[:, None]) ** 2          # (params, symbols)
    risk_theta = np.sum(P * sq_err, axis=1)
    risk0 = float(np.dot(u0, risk_theta))
    risk1 = float(np.dot(u1, risk_theta))
    if risk0 > eps * eps * (1.0 + 1e-12) + 1e-15:
        raise PreconditionError(f"risk under mu0 is {risk0}, exceeding eps^2 = {eps * eps}")

    m0 = float(np.dot(u0, T))
    m1 = float(np.dot(u1, T))
    v0 = math.sqrt(max(float(np.dot(u0, (T - m0) ** 2)), 0.0))

    f0 = u0 @ P
    f1 = u1 @ P
    I = math.sqrt(max(float(np.sum((f1 - f0) ** 2 / f0)), 0.0))

    bias = P @ d - T                                  # B(theta)
    lb1_lhs = abs(float(np.dot(u1, bias)) - float(np.dot(u0, bias)))
    lb1_rhs = abs(m1 - m0) - (eps + v0) * I

    gap = abs(m1 - m0) - v0 * I
    if gap > 0:
        lams = np.concatenate([np.linspace(0.0, 1.0, 11), [(I + 1.0) / (I + 2.0)]])
        rhs = lams * (1 - lams) * gap * gap / (lams + (1 - lams) * (I + 1.0) ** 2)
        lhs = lams * risk0 + (1 - lams) * risk1
        bayes_ok = bool(np.all(lhs >= rhs - 1e-10))
        minimax_rhs = gap * gap / (I + 2.0) ** 2
        lam_star = (I + 1.0) / (I + 2.0)
        star_rhs = lam_star * (1 - lam_star) * gap * gap / (lam_star + (1 - lam_star) * (I + 1.0) ** 2)
        lambda_star_matches = abs(star_rhs - minimax_rhs) <= 1e-12 * max(minimax_rhs, 1.0)
    else:
        bayes_ok = True
        minimax_rhs = 0.0
        lambda_star_matches = True

    return CriVerification(
        I=I, m0=m0, m1=m1, v0=v0, risk0=risk0, risk1=risk1,
        lb1_lhs=lb1_lhs, lb1_rhs=lb1_rhs, bayes_ok=bayes_ok,
        minimax_rhs=minimax_rhs, lambda_star_matches=lambda_star_matches,
    )


def random_discrete_model(
    rng: np.random.Generator, max_params: int = 4, max_outcomes: int = 6
) -> tuple[DiscreteModel, np.ndarray, np.ndarray]:
    """A random finite experiment with strictly positive observation rows."""
    p = int(rng.integers(2, max_params + 1))
    m = int(rng.integers(2, max_outcomes + 1))
    T = rng.uniform(-1.0, 1.0, size=p)
    probs = rng.dirichlet(np.ones(m), size=p) * 0.9 + 0.1 / m   # keep rows >= 0.1/m
    probs /= probs.sum(axis=1, keepdims=True)
    mu0 = rng.dirichlet(np.ones(p))
    mu1 = rng.dirichlet(np.ones(p))
    model = DiscreteModel(tuple(T), tuple(tuple(row) for row in probs))
    return model, mu0, mu1


# ---------------------------------------------------------------------------
# end-to-end pipeline used by the CLI

def lower_bound_pipeline(n: int, M: float, k_n: int | None = None) -> dict:
    """Construct priors at scale M, compute distances, and evaluate the bound.

    Returns the record emitted by the command-line `lowerbound` subcommand:
    keys k_n, delta_k, m_gap, v0_sq, I, bound_value.
    """
    if k_n is None:
        k_n = select_kn_bounded(n)
    nu0, nu1, delta = construct_prior_pair(k_n)
    mu0 = scale_prior(nu0, M)
    mu1 = scale_prior(nu1, M)
    pm = prior_moments(mu0, mu1, n)
    I1_sq = chi_square_mixture_1d(mu0, mu1)
    In_sq = chi_square_product_n(I1_sq, n)
    I_n = math.sqrt(In_sq)
    # tail-sum bound per coordinate is valid whenever moments match to k_n;
    # the dataclass check below ties the quadrature back to the analytics
    tail = chi_square_tail_bound_1d(M, k_n)
    MixtureDistance(I=I_n, I_squared_bound=chi_square_product_n(tail, n), n=n)
    bound = minimax_lower_bound(pm, I_n)
    return {
        "k_n": int(k_n),
        "delta_k": float(delta),
        "m_gap": pm.gap,
        "v0_sq": pm.v0_sq,
        "I": I_n,
        "bound_value": bound.value,
    }
