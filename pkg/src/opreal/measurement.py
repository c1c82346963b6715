"""Sharp qubit observables, Lueders updates and remote conditional states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, PurityError, UndefinedConditionalError
from .qstate import (
    I2,
    PAULIS,
    DensityOperator,
    from_matrix,
    partial_trace,
    trace_distance,
)

OUTCOMES = (1, -1)
ZERO_PROB = 1e-12
SAME_STATE_TOL = 1e-10


@dataclass(frozen=True)
class Observable:
    """Two-outcome projective qubit measurement n . sigma with outcomes +1 and -1."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        b = tuple(float(c) for c in self.bloch)
        if len(b) != 3 or not all(np.isfinite(b)):
            raise DomainError(f"bad Bloch vector {self.bloch!r}")
        if abs(np.linalg.norm(b) - 1.0) > 1e-12:
            raise DomainError(f"observable Bloch vector must be unit length, got norm {np.linalg.norm(b)!r}")
        object.__setattr__(self, "bloch", b)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.bloch)

    @property
    def matrix(self) -> np.ndarray:
        return sum(c * p for c, p in zip(self.bloch, PAULIS))

    def projector(self, outcome: int) -> np.ndarray:
        if outcome not in OUTCOMES:
            raise DomainError(f"outcome must be +1 or -1, got {outcome!r}")
        return 0.5 * (I2 + outcome * self.matrix)

    def __neg__(self) -> Observable:
        return Observable(tuple(-c for c in self.bloch))


@dataclass(frozen=True)
class LocalMeasurementOutcome:
    outcome: int
    probability: float
    post_state: DensityOperator


def observable_from_angles(polar: float, azimuth: float = 0.0) -> Observable:
    return Observable(
        (np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar))
    )


def observable_from_vector(v) -> Observable:
    v = np.asarray(v, dtype=float)
    return Observable(tuple(v / np.linalg.norm(v)))


def observable_z() -> Observable:
    return Observable((0.0, 0.0, 1.0))


def observable_x() -> Observable:
    return Observable((1.0, 0.0, 0.0))


def observable_y() -> Observable:
    return Observable((0.0, 1.0, 0.0))


def xz_observable(angle: float) -> Observable:
    """sin(angle) sigma_X + cos(angle) sigma_Z."""
    return Observable((np.sin(angle), 0.0, np.cos(angle)))


def _lift(op: np.ndarray, subsystem: str) -> np.ndarray:
    if subsystem == "A":
        return np.kron(op, I2)
    if subsystem == "B":
        return np.kron(I2, op)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def outcome_probability(rho: DensityOperator, obs: Observable, outcome: int, subsystem: str = "A") -> float:
    p = obs.projector(outcome)
    if rho.dim == 4:
        p = _lift(p, subsystem)
    return float(np.clip(rho.expect(p), 0.0, 1.0))


def measure(rho: DensityOperator, obs: Observable) -> list[LocalMeasurementOutcome]:
    """Outcome probabilities and Lueders post-measurement states on a qubit.

    For rank-one projectors the post-state is the projector itself, so it is
    reported even for outcomes of probability zero.
    """
    if rho.dim != 2:
        raise DimensionError("measure acts on single-qubit states")
    r = rho.bloch()
    n = obs.vector
    out = []
    for a in OUTCOMES:
        p = float(np.clip(0.5 * (1 + a * (n @ r)), 0.0, 1.0))
        out.append(LocalMeasurementOutcome(a, p, from_matrix(obs.projector(a))))
    return out


def nonselective(rho: DensityOperator, obs: Observable, subsystem: str = "A") -> DensityOperator:
    """sum_a P_a rho P_a, with P_a acting on ``subsystem`` of a two-qubit state."""
    projs = [obs.projector(a) for a in OUTCOMES]
    if rho.dim == 4:
        projs = [_lift(p, subsystem) for p in projs]
    elif rho.dim != 2:
        raise DimensionError(f"unsupported dimension {rho.dim}")
    return from_matrix(sum(p @ rho.mat @ p for p in projs))


def unnormalized_conditional(rho_ab: DensityOperator, x: Observable, outcome: int) -> np.ndarray:
    """Tr_A[(P_a x I) rho]: B's subnormalized state given Alice's outcome."""
    if rho_ab.dim != 4:
        raise DimensionError("remote conditioning needs a two-qubit state")
    p = _lift(x.projector(outcome), "A")
    t = (p @ rho_ab.mat @ p).reshape(2, 2, 2, 2)
    return np.einsum("jajb->ab", t)


def remote_conditional_state(
    rho_ab: DensityOperator, x: Observable, outcome: int
) -> tuple[float, DensityOperator]:
    """Probability of Alice's ``outcome`` for ``x`` and Bob's normalized conditional state."""
    m = unnormalized_conditional(rho_ab, x, outcome)
    p = float(np.trace(m).real)
    if p <= ZERO_PROB:
        raise UndefinedConditionalError(f"outcome {outcome} of Alice's measurement has probability {p:.3g}")
    return min(p, 1.0), from_matrix(m / p)


def are_compatible(o1: Observable, o2: Observable, tol: float = 1e-10) -> bool:
    """Sharp qubit observables are jointly measurable iff their Bloch vectors are collinear."""
    return abs(abs(float(o1.vector @ o2.vector)) - 1.0) <= tol


def _require_pure(rho: DensityOperator):
    if rho.dim != 4:
        raise DimensionError("expected a two-qubit state")
    if not rho.is_pure():
        raise PurityError(f"state has purity {rho.purity():.12f}; a pure state is required")


def is_commensurate(rho_ab: DensityOperator, x: Observable, y: Observable) -> bool:
    """Whether x on A and y on B disturb a pure state identically.

    Checks that the marginals agree, that for every outcome of nonzero
    probability Alice's post-measurement qubit equals Bob's remote conditional
    state, and that the two measurements never disagree.
    """
    _require_pure(rho_ab)
    if trace_distance(partial_trace(rho_ab, "B"), partial_trace(rho_ab, "A")) >= SAME_STATE_TOL:
        return False
    for a in OUTCOMES:
        try:
            _, phi_b = remote_conditional_state(rho_ab, x, a)
        except UndefinedConditionalError:
            continue
        if trace_distance(from_matrix(x.projector(a)), phi_b) >= SAME_STATE_TOL:
            return False
    return disagreement_probability(rho_ab, x, y) < SAME_STATE_TOL


def joint_probability(rho_ab: DensityOperator, x: Observable, a: int, y: Observable, b: int) -> float:
    op = np.kron(x.projector(a), y.projector(b))
    return float(np.clip(rho_ab.expect(op), 0.0, 1.0))


def disagreement_probability(rho_ab: DensityOperator, x: Observable, y: Observable) -> float:
    return sum(joint_probability(rho_ab, x, a, y, -a) for a in OUTCOMES)


def appendix_a_no_disturbance_check(rho_ab: DensityOperator, x: Observable) -> bool:
    """True when Alice's non-selective x leaves the joint state unchanged."""
    return trace_distance(nonselective(rho_ab, x, "A"), rho_ab) < SAME_STATE_TOL
