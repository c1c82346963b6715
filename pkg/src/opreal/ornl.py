"""Certifying operationally real (OR) nonlocality.

Covers the pure-state checker, preparation-aware probabilities for mixtures,
the fraction bound obtained from a steering violation, the Werner-family
classification, and the hidden-state model available for compatible settings.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ClassificationError,
    DomainError,
    IncompatibleError,
    NoCertificateError,
    PromiseRequiredError,
    UndefinedConditionalError,
)
from .measurement import (
    OUTCOMES,
    Observable,
    _require_pure,
    are_compatible,
    is_commensurate,
    remote_conditional_state,
)
from .protocols import REAL_DISTURBANCE_TOL, signal_a_to_ab, template_scenario
from .qstate import DensityOperator, from_matrix, make_werner, trace_distance
from .witnesses import WitnessReport, horodecki_m, steering_functional

DECOMPOSITION_TOL = 1e-10


class Basis(str, enum.Enum):
    THEOREM1_PURE = "theorem1-pure"
    THEOREM2_STEERING = "theorem2-steering"
    DEF4_PREPARATION = "def4-preparation"
    BELL_DI = "bell-DI"


@dataclass(frozen=True)
class ORCertificate:
    upsilon_star: float
    upsilon_max: float
    f_min: float
    basis: Basis = Basis.THEOREM2_STEERING


def check_or_nonlocal_pure(rho_ab: DensityOperator, x0: Observable) -> bool:
    """A pure state is OR nonlocal under x0 if measuring x0 detectably disturbs
    the joint state and the disturbances of A and B coincide."""
    _require_pure(rho_ab)
    disturbed = signal_a_to_ab(rho_ab, x0).trace_distance > REAL_DISTURBANCE_TOL
    return disturbed and is_commensurate(rho_ab, x0, x0)


@dataclass(frozen=True)
class Component:
    probability: float
    state: DensityOperator
    x0: Observable | None = None
    separable: bool = False


@dataclass(frozen=True)
class Preparation:
    components: tuple[Component, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        ps = np.array([c.probability for c in self.components])
        if len(ps) == 0 or np.any(ps < 0) or abs(ps.sum() - 1.0) > 1e-12:
            raise DomainError("preparation probabilities must be non-negative and sum to 1")

    def reconstruct(self) -> DensityOperator:
        return from_matrix(sum(c.probability * c.state.mat for c in self.components))


def or_probability_known_prep(prep: Preparation) -> float:
    """Total weight of components that pass the pure-state OR check."""
    total = 0.0
    for c in prep.components:
        if c.separable:
            continue
        if not c.state.is_pure():
            raise ClassificationError("component is mixed and not declared separable")
        if c.x0 is None:
            raise ClassificationError("pure component has no designated measurement")
        if check_or_nonlocal_pure(c.state, c.x0):
            total += c.probability
    return total


def validate_decomposition(target: DensityOperator, prep: Preparation) -> tuple[bool, float]:
    d = trace_distance(target, prep.reconstruct())
    return d < DECOMPOSITION_TOL, d


def certify_theorem2(
    report: WitnessReport, upsilon_max: float | None = None, commensurate_promise: bool = False
) -> ORCertificate:
    """Lower bound on the OR-nonlocal fraction from an observed steering value.

    Interpolates the observed value between the all-noise value (half the
    number of terms) and ``upsilon_max``, which defaults to the algebraic
    maximum.
    """
    if not commensurate_promise:
        raise PromiseRequiredError("the bound needs a promise of a commensurate noisy pure state")
    if not report.violated:
        raise NoCertificateError(f"no violation: {report.lhs:.12g} <= {report.classical_bound:.12g}")
    vmax = report.algebraic_max if upsilon_max is None else float(upsilon_max)
    if not (report.classical_bound < vmax <= report.algebraic_max):
        raise DomainError(f"upsilon_max={vmax} outside ({report.classical_bound}, {report.algebraic_max}]")
    floor = report.algebraic_max / 2
    f_min = (report.lhs - floor) / (vmax - floor)
    return ORCertificate(report.lhs, vmax, float(np.clip(f_min, 0.0, 1.0)))


class WernerClass(str, enum.Enum):
    UNSTEERABLE = "unsteerable-region"
    OR_NOT_BELL = "OR-nonlocal-not-Bell"
    BELL = "Bell-nonlocal"


def _root_in_unit(g) -> float:
    """Smallest f in [0, 1] where the increasing function g turns positive; 1.0 if never."""
    if g(1.0) <= 0:
        return 1.0
    if g(0.0) > 0:
        return 0.0
    return brentq(g, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def werner_steering_threshold(theta: float) -> float:
    """f at which the template steering value reaches the uncertainty bound."""

    def g(f):
        rep = steering_functional(template_scenario(make_werner(f, theta), theta))
        return rep.lhs - rep.classical_bound

    return _root_in_unit(g)


def werner_bell_threshold(theta: float) -> float:
    return _root_in_unit(lambda f: horodecki_m(make_werner(f, theta)) - 1.0)


@dataclass(frozen=True)
class WernerThresholds:
    steering: float
    bell: float


@functools.lru_cache(maxsize=256)
def werner_thresholds(theta: float) -> WernerThresholds:
    return WernerThresholds(werner_steering_threshold(theta), werner_bell_threshold(theta))


def classify_werner(f: float, theta: float = np.pi / 6) -> WernerClass:
    """Place W(f, theta) relative to the template steering threshold and the Horodecki root."""
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"f={f} outside [0, 1]")
    th = werner_thresholds(theta)
    if f > th.bell:
        return WernerClass.BELL
    if f > th.steering:
        return WernerClass.OR_NOT_BELL
    return WernerClass.UNSTEERABLE


@dataclass
class LHSModel:
    """Hidden B-states with response probabilities for Alice's two settings.

    ``responses[j][k, m]`` is the probability that setting j yields outcome
    OUTCOMES[k] given hidden state m.
    """

    weights: np.ndarray
    states: list[DensityOperator]
    responses: list[np.ndarray] = field(default_factory=list)

    def unnormalized_conditional(self, setting: int, outcome: int) -> np.ndarray:
        k = OUTCOMES.index(outcome)
        r = self.responses[setting][k]
        return sum(w * q * s.mat for w, q, s in zip(self.weights, r, self.states))

    def marginal(self) -> DensityOperator:
        return from_matrix(sum(w * s.mat for w, s in zip(self.weights, self.states)))


def lhs_model_from_compatible(rho_ab: DensityOperator, x0: Observable, x1: Observable) -> LHSModel:
    """Hidden-state ensemble for two jointly measurable Alice settings.

    For collinear sharp settings the joint ("master") measurement is x0
    itself; its conditional B-states serve as hidden states, and x1's
    outcome is x0's outcome times the sign of x0 . x1. Hidden states that
    coincide are merged with correspondingly averaged responses.
    """
    if not are_compatible(x0, x1):
        raise IncompatibleError("settings are not jointly measurable")
    sign = 1 if float(x0.vector @ x1.vector) > 0 else -1
    weights, states, resp0, resp1 = [], [], [], []
    for a in OUTCOMES:
        try:
            p, phi = remote_conditional_state(rho_ab, x0, a)
        except UndefinedConditionalError:
            continue
        r0 = np.array([1.0 if b == a else 0.0 for b in OUTCOMES])
        r1 = np.array([1.0 if b == sign * a else 0.0 for b in OUTCOMES])
        for m, s in enumerate(states):
            if trace_distance(s, phi) < DECOMPOSITION_TOL:
                w = weights[m] + p
                resp0[m] = (weights[m] * resp0[m] + p * r0) / w
                resp1[m] = (weights[m] * resp1[m] + p * r1) / w
                weights[m] = w
                break
        else:
            weights.append(p)
            states.append(phi)
            resp0.append(r0)
            resp1.append(r1)
    return LHSModel(
        np.array(weights),
        states,
        [np.array(resp0).T, np.array(resp1).T],
    )
