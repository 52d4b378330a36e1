"""Scenario and run-configuration types for the risk engine.

A scenario fixes a mean-vector family, a dimension, a replication count,
and an estimator description.  Families are either deterministic (the same
theta every replication) or random (theta redrawn per replication from a
least-favorable prior).  Configurations come from JSON documents; the schema
is documented in the package README.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..estimators import EstimatorSpec
from ..lowerbound import SymmetricDiscretePrior, construct_prior_pair, scale_prior


@dataclass(frozen=True)
class ZeroVector:
    """theta = 0."""


@dataclass(frozen=True)
class ConstantAt:
    """Every coordinate equals `value`."""

    value: float

    def __post_init__(self):
        if not (isinstance(self.value, (int, float)) and math.isfinite(self.value)):
            raise DomainError(f"value must be a finite number, got {self.value!r}")


@dataclass(frozen=True)
class AlternationAtoms:
    """Coordinates drawn iid from a least-favorable prior scaled to [-M, M].

    The pair (nu0, nu1) matches moments to order k; `prior` picks which one
    feeds the scenario.  Redrawn every replication.
    """

    k: int
    M: float
    prior: str = "nu1"

    def __post_init__(self):
        if self.prior not in ("nu0", "nu1"):
            raise DomainError(f"prior must be 'nu0' or 'nu1', got {self.prior!r}")
        if not (isinstance(self.M, (int, float)) and math.isfinite(self.M)) or self.M <= 0:
            raise DomainError(f"M must be a finite positive number, got {self.M!r}")
        construct_prior_pair(self.k)   # validates k, warms the cache

    def scaled_prior(self) -> SymmetricDiscretePrior:
        nu0, nu1, _ = construct_prior_pair(self.k)
        return scale_prior(nu0 if self.prior == "nu0" else nu1, self.M)


@dataclass(frozen=True)
class TwoSpike:
    """Sparse pattern: the first `count` coordinates alternate +value, -value,
    the rest are zero."""

    count: int
    value: float

    def __post_init__(self):
        if not isinstance(self.count, int) or self.count < 1:
            raise DomainError(f"count must be a positive integer, got {self.count!r}")
        if not (isinstance(self.value, (int, float)) and math.isfinite(self.value)):
            raise DomainError(f"value must be a finite number, got {self.value!r}")


@dataclass(frozen=True)
class CustomVector:
    """Explicit mean vector."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0 or not all(
            isinstance(v, (int, float)) and math.isfinite(v) for v in self.values
        ):
            raise DomainError("values must be a nonempty tuple of finite numbers")


FAMILIES = (ZeroVector, ConstantAt, AlternationAtoms, TwoSpike, CustomVector)


def family_is_random(family) -> bool:
    return isinstance(family, AlternationAtoms)


def draw_theta(family, n: int, rng: np.random.Generator) -> np.ndarray:
    """Realize the mean vector; consumes `rng` only for random families."""
    if isinstance(family, ZeroVector):
        return np.zeros(n)
    if isinstance(family, ConstantAt):
        return np.full(n, float(family.value))
    if isinstance(family, AlternationAtoms):
        return family.scaled_prior().sample(rng, n)
    if isinstance(family, TwoSpike):
        if family.count > n:
            raise DomainError(f"spike count {family.count} exceeds n = {n}")
        theta = np.zeros(n)
        spikes = np.full(family.count, float(family.value))
        spikes[1::2] *= -1.0
        theta[: family.count] = spikes
        return theta
    if isinstance(family, CustomVector):
        if len(family.values) != n:
            raise DomainError(f"custom vector has length {len(family.values)}, scenario n = {n}")
        return np.asarray(family.values, dtype=np.float64)
    raise DomainError(f"unknown theta family {family!r}")


@dataclass(frozen=True)
class Scenario:
    id: str
    family: object
    n: int
    replications: int
    estimator: EstimatorSpec

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise DomainError("scenario id must be a nonempty string")
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.replications, int) or self.replications < 2:
            raise DomainError(f"replications must be an integer >= 2, got {self.replications!r}")
        if not isinstance(self.family, FAMILIES):
            raise DomainError(f"unknown theta family {self.family!r}")
        if not isinstance(self.estimator, EstimatorSpec):
            raise DomainError("estimator must be an EstimatorSpec")
        if isinstance(self.family, CustomVector) and len(self.family.values) != self.n:
            raise DomainError("custom vector length must equal n")
        if isinstance(self.family, TwoSpike) and self.family.count > self.n:
            raise DomainError("spike count must not exceed n")
        if self.estimator.n is not None and self.estimator.n != self.n:
            raise DomainError("estimator n disagrees with scenario n")


@dataclass(frozen=True)
class RunConfig:
    scenarios: tuple[Scenario, ...]
    seed: int
    output_path: str
    format: str = "csv"
    workers: int = 1
    compliance_slack: float = 2.0

    def __post_init__(self):
        if len(self.scenarios) == 0:
            raise DomainError("config needs at least one scenario")
        seen = set()
        for s in self.scenarios:
            if s.id in seen:
                raise DomainError(f"duplicate scenario id {s.id!r}")
            seen.add(s.id)
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if self.format not in ("csv", "json"):
            raise DomainError(f"format must be 'csv' or 'json', got {self.format!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise DomainError(f"workers must be a positive integer, got {self.workers!r}")
        if not (self.compliance_slack > 0 and math.isfinite(self.compliance_slack)):
            raise DomainError("compliance_slack must be finite and positive")


# ---------------------------------------------------------------------------
# JSON configuration

_FAMILY_KINDS = {
    "zero": (ZeroVector, ()),
    "constant": (ConstantAt, ("value",)),
    "alternation": (AlternationAtoms, ("k", "M", "prior")),
    "two_spike": (TwoSpike, ("count", "value")),
    "custom": (CustomVector, ("values",)),
}


def _parse_family(obj) -> object:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("family must be an object with a 'kind' key")
    kind = obj["kind"]
    if kind not in _FAMILY_KINDS:
        raise DomainError(f"unknown family kind {kind!r}; expected one of {sorted(_FAMILY_KINDS)}")
    cls, fields = _FAMILY_KINDS[kind]
    extra = set(obj) - {"kind"} - set(fields)
    if extra:
        raise DomainError(f"unexpected keys {sorted(extra)} in family {kind!r}")
    kwargs = {k: obj[k] for k in fields if k in obj}
    if kind == "custom":
        vals = kwargs.get("values")
        if not isinstance(vals, list):
            raise DomainError("custom family needs a 'values' list")
        kwargs["values"] = tuple(float(v) for v in vals)
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise DomainError(f"bad family {kind!r}: {e}") from e


def _parse_estimator(obj) -> EstimatorSpec:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise DomainError("estimator must be an object with a 'variant' key")
    allowed = {"variant", "M", "K", "basis", "kn", "c", "seed"}
    extra = set(obj) - allowed
    if extra:
        raise DomainError(f"unexpected keys {sorted(extra)} in estimator")
    return EstimatorSpec(
        variant=obj["variant"],
        M=float(obj["M"]) if "M" in obj else None,
        K_override=obj.get("K"),
        basis=obj.get("basis"),
        k_n=obj.get("kn"),
        c=float(obj.get("c", 2.0)),
        seed=obj.get("seed", 0),
    )


def _parse_scenario(obj) -> Scenario:
    if not isinstance(obj, dict):
        raise DomainError("each scenario must be a JSON object")
    required = {"id", "family", "n", "replications", "estimator"}
    missing = required - set(obj)
    if missing:
        raise DomainError(f"scenario missing keys {sorted(missing)}")
    extra = set(obj) - required
    if extra:
        raise DomainError(f"unexpected keys {sorted(extra)} in scenario")
    return Scenario(
        id=obj["id"],
        family=_parse_family(obj["family"]),
        n=obj["n"],
        replications=obj["replications"],
        estimator=_parse_estimator(obj["estimator"]),
    )


def parse_config(text: str) -> RunConfig:
    """Parse a JSON configuration document into a validated RunConfig."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DomainError(f"config is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise DomainError("config must be a JSON object")
    allowed = {"scenarios", "seed", "output_path", "format", "workers", "compliance_slack"}
    extra = set(doc) - allowed
    if extra:
        raise DomainError(f"unexpected config keys {sorted(extra)}")
    for key in ("scenarios", "seed", "output_path"):
        if key not in doc:
            raise DomainError(f"config missing required key {key!r}")
    if not isinstance(doc["scenarios"], list):
        raise DomainError("'scenarios' must be a list")
    return RunConfig(
        scenarios=tuple(_parse_scenario(s) for s in doc["scenarios"]),
        seed=doc["seed"],
        output_path=doc["output_path"],
        format=doc.get("format", "csv"),
        workers=doc.get("workers", 1),
        compliance_slack=float(doc.get("compliance_slack", 2.0)),
    )


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
