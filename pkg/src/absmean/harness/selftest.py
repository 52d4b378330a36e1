"""Invariant self-tests runnable from the CLI.

Two variance facts used by the risk analysis are checked by exact
enumeration on random finite distributions, alongside quick closed-form
checks of the approximation, prior, and chi-square machinery and a
determinism check of the engine:

* mixture variance decomposition: for F = sum_j w_j F_j,
  Var_F(X) = sum_j w_j Var_j(X) + sum_j w_j (mean_j - mean_F)^2;
* monotone truncation: Var(min(X, C)) <= Var(X) for any constant C.
"""

from __future__ import annotations

import math

import numpy as np

from ..estimators import EstimatorSpec
from ..lowerbound import (
    chi_square_gaussian_mixtures,
    construct_prior_pair,
    random_discrete_model,
    verify_constrained_risk,
)
from ..polyapprox import remez_best_approx
from ..rng import stream
from .engine import render_csv, run_scenario
from .scenarios import Scenario, ZeroVector


def mixture_variance_gap(weights, atoms, probs) -> float:
    """|direct variance - total-variance decomposition| for a finite mixture.

    weights: mixing weights over components; atoms[j]/probs[j]: the j-th
    component distribution.  Zero up to roundoff for any valid input.
    """
    w = np.asarray(weights, dtype=float)
    means = np.array([np.dot(p, a) for a, p in zip(atoms, probs)])
    seconds = np.array([np.dot(p, np.asarray(a) ** 2) for a, p in zip(atoms, probs)])
    grand_mean = float(np.dot(w, means))
    direct = float(np.dot(w, seconds)) - grand_mean ** 2
    within = float(np.dot(w, seconds - means ** 2))
    between = float(np.dot(w, (means - grand_mean) ** 2))
    return abs(direct - (within + between))


def truncation_variance_pair(atoms, probs, cap: float) -> tuple[float, float]:
    """(Var(min(X, C)), Var(X)) for discrete X; the first never exceeds the second."""
    a = np.asarray(atoms, dtype=float)
    p = np.asarray(probs, dtype=float)
    t = np.minimum(a, cap)
    var_x = float(np.dot(p, a ** 2) - np.dot(p, a) ** 2)
    var_t = float(np.dot(p, t ** 2) - np.dot(p, t) ** 2)
    return var_t, var_x


def random_mixture(rng: np.random.Generator, max_components: int = 4, max_atoms: int = 6):
    m = int(rng.integers(2, max_components + 1))
    weights = rng.dirichlet(np.ones(m))
    atoms = [rng.uniform(-3.0, 3.0, size=int(rng.integers(2, max_atoms + 1))) for _ in range(m)]
    probs = [rng.dirichlet(np.ones(len(a))) for a in atoms]
    return weights, atoms, probs


def random_discrete_rv(rng: np.random.Generator, max_atoms: int = 8):
    k = int(rng.integers(2, max_atoms + 1))
    atoms = rng.uniform(-5.0, 5.0, size=k)
    probs = rng.dirichlet(np.ones(k))
    cap = float(rng.uniform(-6.0, 6.0))
    return atoms, probs, cap


def check_mixture_variance(trials: int, seed: int = 0) -> int:
    """Number of identity violations beyond 1e-12 over `trials` random mixtures."""
    rng = stream(seed, 0, 61, 0)
    bad = 0
    for _ in range(trials):
        if mixture_variance_gap(*random_mixture(rng)) > 1e-12:
            bad += 1
    return bad


def check_truncation_variance(trials: int, seed: int = 0) -> int:
    """Number of Var(min(X,C)) > Var(X) violations over `trials` random draws."""
    rng = stream(seed, 0, 71, 0)
    bad = 0
    for _ in range(trials):
        atoms, probs, cap = random_discrete_rv(rng)
        var_t, var_x = truncation_variance_pair(atoms, probs, cap)
        if var_t > var_x + 1e-12:
            bad += 1
    return bad


def run_selftest(out=print) -> bool:
    """Quick invariant suite; prints one line per check, returns overall pass."""
    ok = True

    def report(name: str, passed: bool):
        nonlocal ok
        ok = ok and passed
        out(f"{'ok  ' if passed else 'FAIL'} {name}")

    sol = remez_best_approx(1)
    report("degree-2 minimax error 1/8", abs(sol.delta - 0.125) < 1e-9)
    alt = sorted(set(round(abs(x), 9) for x in sol.alternation_points))
    report("degree-2 alternation set {0, 1/2, 1}", np.allclose(alt, [0.0, 0.5, 1.0]))

    nu0, nu1, delta = construct_prior_pair(2)
    w0 = dict(zip(nu0.positions, nu0.weights))
    report(
        "order-2 prior pair closed form",
        abs(delta - 0.125) < 1e-9
        and abs(w0.get(0.0, 0) - 0.75) < 1e-9
        and abs(w0.get(1.0, 0) - 0.125) < 1e-9
        and abs(dict(zip(nu1.positions, nu1.weights)).get(0.5, 0) - 0.5) < 1e-9,
    )
    worst = max(abs(nu1.moment(j) - nu0.moment(j)) for j in range(3))
    report("order-2 prior moments match", worst < 1e-10)

    i2 = chi_square_gaussian_mixtures((0.0,), (1.0,), (1.0,), (1.0,))
    report("chi-square point-mass identity", abs(i2 - math.expm1(1.0)) < 1e-8)

    rng = stream(0, 0, 81, 0)
    cri_bad = 0
    for _ in range(100):
        model, mu0, mu1 = random_discrete_model(rng)
        T = np.asarray(model.T_values)
        P = np.asarray(model.obs_probs)
        rule = tuple(rng.uniform(-1.0, 1.0, size=P.shape[1]))
        risk0 = float(
            np.dot(mu0, np.sum(P * (np.asarray(rule)[None, :] - T[:, None]) ** 2, axis=1))
        )
        rec = verify_constrained_risk(model, mu0, mu1, rule, math.sqrt(risk0) * 1.000001)
        if not rec.all_ok:
            cri_bad += 1
    report("constrained risk inequality, 100 random models", cri_bad == 0)

    report("mixture variance identity, 200 cases", check_mixture_variance(200) == 0)
    report("truncation variance monotone, 200 cases", check_truncation_variance(200) == 0)

    scenario = Scenario(
        id="selftest-determinism",
        family=ZeroVector(),
        n=64,
        replications=40,
        estimator=EstimatorSpec(variant="bounded", M=1.0, K_override=1),
    )
    a = render_csv([run_scenario(scenario, seed=7, scenario_index=0, workers=1)])
    b = render_csv([run_scenario(scenario, seed=7, scenario_index=0, workers=3)])
    report("engine determinism across worker counts", a == b)

    return ok
