"""Uncertainty bounds, steering and Bell functionals, and the Horodecki criterion."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, TermCountError
from .measurement import OUTCOMES, Observable, joint_probability, observable_from_angles
from .protocols import (
    SteeringScenario,
    Term,
    conditional_certainties,
    template_scenario,
)
from .qstate import PAULIS, DensityOperator, make_werner

VIOLATION_TOL = 1e-9
BELL_CLASSICAL = 3.0
BELL_QUANTUM = 2.0 + np.sqrt(2.0)
BELL_ALGEBRAIC = 4.0


@dataclass(frozen=True)
class WitnessReport:
    lhs: float
    classical_bound: float
    algebraic_max: float
    violated: bool
    margin_ratio: float
    metadata: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, lhs: float, bound: float, algebraic_max: float, **metadata) -> WitnessReport:
        lhs = float(lhs)
        return cls(
            lhs=lhs,
            classical_bound=float(bound),
            algebraic_max=float(algebraic_max),
            violated=lhs > bound + VIOLATION_TOL,
            margin_ratio=lhs / bound,
            metadata=metadata,
        )


def uncertainty_bound(obs: Sequence[Observable]) -> float:
    """Maximum over qubit states of sum_j max_b p(b|y_j).

    Each summand is (1 + |n_j . r|)/2, so the maximum is
    k/2 + max_s |sum_j s_j n_j| / 2 over sign patterns s.
    """
    obs = list(obs)
    if not obs:
        raise DomainError("uncertainty bound of an empty set of observables")
    if len(obs) > 8:
        raise DomainError("at most 8 observables are supported")
    vecs = np.array([o.vector for o in obs])
    # the global sign does not change the norm, so fix s_0 = +1
    best = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=len(obs) - 1):
        s = np.array((1.0,) + signs)
        best = max(best, float(np.linalg.norm(s @ vecs)))
    return len(obs) / 2 + best / 2


def steering_functional(s: SteeringScenario) -> WitnessReport:
    terms = conditional_certainties(s)
    return WitnessReport.build(
        sum(terms),
        uncertainty_bound(s.bob_settings()),
        len(s.terms),
        terms=terms,
        lhs_bound_certified=s.non_adaptive,
    )


def two_term_steering(s: SteeringScenario) -> WitnessReport:
    if len(s.terms) != 2:
        raise TermCountError(f"two-term inequality needs exactly 2 terms, got {len(s.terms)}")
    return steering_functional(s)


def correlation_matrix(rho: DensityOperator) -> np.ndarray:
    """T_ij = Tr(rho sigma_i x sigma_j)."""
    return np.array([[rho.expect(np.kron(p, q)) for q in PAULIS] for p in PAULIS])


def bell_functional(
    rho: DensityOperator, alice: Sequence[Observable], bob: Sequence[Observable]
) -> WitnessReport:
    """P(a1=b1) + P(a1=b2) + P(a2=b1) + P(a2!=b2) from exact joint probabilities."""
    if len(alice) != 2 or len(bob) != 2:
        raise DomainError("the Bell functional uses two settings per party")
    if rho.dim != 4:
        raise DomainError("two-qubit state required")

    def p_equal(x, y):
        return sum(joint_probability(rho, x, a, y, a) for a in OUTCOMES)

    lhs = (
        p_equal(alice[0], bob[0])
        + p_equal(alice[0], bob[1])
        + p_equal(alice[1], bob[0])
        + (1.0 - p_equal(alice[1], bob[1]))
    )
    return WitnessReport.build(lhs, BELL_CLASSICAL, BELL_ALGEBRAIC, quantum_max=BELL_QUANTUM)


def chsh_value(rho: DensityOperator, alice: Sequence[Observable], bob: Sequence[Observable]) -> float:
    """E11 + E12 + E21 - E22 from the correlation matrix."""
    t = correlation_matrix(rho)
    e = [[a.vector @ t @ b.vector for b in bob] for a in alice]
    return float(e[0][0] + e[0][1] + e[1][0] - e[1][1])


def bloch_decomposition(rho: DensityOperator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local Bloch vectors r_A, r_B and correlation matrix T of a two-qubit state."""
    r_a = np.array([rho.expect(np.kron(p, np.eye(2))) for p in PAULIS])
    r_b = np.array([rho.expect(np.kron(np.eye(2), p)) for p in PAULIS])
    return r_a, r_b, correlation_matrix(rho)


def horodecki_m(rho: DensityOperator) -> float:
    """Sum of the two largest eigenvalues of T^T T; CHSH can be violated iff this exceeds 1."""
    t = correlation_matrix(rho)
    ev = np.linalg.eigvalsh(t.T @ t)
    return float(ev[-1] + ev[-2])


# deterministic multi-start search over measurement angles

GRID_POINTS = 24
GOLDEN_TOL = 1e-8
_INVPHI = (np.sqrt(5.0) - 1) / 2


def golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal function on [lo, hi]."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    x = (lo + hi) / 2
    return x, f(x)


def _line_search(f, lo, hi, periodic):
    n = GRID_POINTS
    if periodic:
        step = (hi - lo) / n
        grid = lo + step * np.arange(n)
    else:
        grid = np.linspace(lo, hi, n)
        step = grid[1] - grid[0]
    vals = [f(g) for g in grid]
    k = int(np.argmax(vals))
    a, b = grid[k] - step, grid[k] + step
    if not periodic:
        a, b = max(a, lo), min(b, hi)
    x, fx = golden_max(f, a, b)
    if vals[k] > fx:
        return grid[k], vals[k]
    return x, fx


def coordinate_ascent(
    objective: Callable[[np.ndarray], float],
    start: np.ndarray,
    bounds: Sequence[tuple[float, float]],
    periodic: Sequence[bool],
    max_sweeps: int = 60,
    tol: float = 1e-13,
) -> tuple[np.ndarray, float]:
    """Cycle through coordinates, each optimized by grid seeding plus golden-section refinement."""
    x = np.array(start, dtype=float)
    fx = objective(x)
    for _ in range(max_sweeps):
        before = fx
        for i, ((lo, hi), per) in enumerate(zip(bounds, periodic)):

            def along(v, i=i):
                y = x.copy()
                y[i] = v
                return objective(y)

            v, fv = _line_search(along, lo, hi, per)
            if fv > fx:
                x[i], fx = v, fv
        if fx - before < tol:
            break
    return x, fx


@dataclass(frozen=True)
class SearchResult:
    params: np.ndarray
    settings: dict
    report: WitnessReport
    restart: int


def _multistart(objective, n_params, bounds, periodic, restarts, seed):
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    best = None
    for r in range(restarts):
        start = np.array([rng.uniform(lo, hi) for lo, hi in bounds])
        x, fx = coordinate_ascent(objective, start, bounds, periodic)
        if best is None or fx > best[1]:
            best = (x, fx, r)
    return best


def _obs(params, i):
    return observable_from_angles(params[2 * i], params[2 * i + 1])


def _unit(params, i):
    p, a = params[2 * i], params[2 * i + 1]
    return np.array([np.sin(p) * np.cos(a), np.sin(p) * np.sin(a), np.cos(p)])


def _bell_fast(t, params):
    """2 + CHSH/2 straight from the correlation matrix."""
    a1, a2, b1, b2 = (_unit(params, i) for i in range(4))
    return 2 + (a1 @ t @ b1 + a1 @ t @ b2 + a2 @ t @ b1 - a2 @ t @ b2) / 2


def _steering_terms_fast(r_a, r_b, t, x, branches, outcome):
    """Certainty of one term; B's conditional Bloch vector is (r_B + a T^T x)/(1 + a x.r_A)."""
    vals = []
    for a, y in zip((1, -1), branches):
        p = 0.5 * (1 + a * (x @ r_a))
        vals.append((p, 0.5 * p + 0.25 * abs(y @ r_b + a * (x @ t @ y))))
    if outcome is None:
        return vals[0][1] + vals[1][1]
    p, w = vals[0] if outcome == 1 else vals[1]
    return w / p if p > 1e-12 else 0.5


def _free_steering_fast(r_a, r_b, t, params):
    x0, x1, y0, y1, y2 = (_unit(params, i) for i in range(5))
    return (
        _steering_terms_fast(r_a, r_b, t, x0, (y0, y0), None)
        + _steering_terms_fast(r_a, r_b, t, x1, (y1, y2), 1)
        + _steering_terms_fast(r_a, r_b, t, x1, (y1, y2), -1)
    )


def _bell_settings(params):
    return [_obs(params, 0), _obs(params, 1)], [_obs(params, 2), _obs(params, 3)]


def _free_steering_scenario(rho, params):
    x0, x1, y0, y1, y2 = (_obs(params, i) for i in range(5))
    return SteeringScenario(
        rho,
        (x0, x1),
        {(0, 1): y0, (0, -1): y0, (1, 1): y1, (1, -1): y2},
        (Term(0), Term(1, 1), Term(1, -1)),
    )


def optimize_settings(
    rho: DensityOperator,
    functional: str = "bell",
    restarts: int = 4,
    seed: int = 0,
    objective: str = "lhs",
    template: bool = False,
) -> SearchResult:
    """Search measurement angles maximizing a functional on ``rho``.

    ``functional`` is "bell" (8 angles) or "steering". Steering uses the
    adaptive three-term layout, either with all 10 angles free or, with
    ``template=True``, only the template angle of Bob's y1/y2.
    ``objective`` is "lhs" or "margin" (lhs over the classical bound).
    """
    if objective not in ("lhs", "margin"):
        raise DomainError(f"unknown objective {objective!r}")

    def score(rep: WitnessReport) -> float:
        return rep.lhs if objective == "lhs" else rep.margin_ratio

    r_a, r_b, t = bloch_decomposition(rho)
    fast = None
    if functional == "bell":
        n = 8
        fast = functools.partial(_bell_fast, t)

        def evaluate(p):
            a, b = _bell_settings(p)
            return bell_functional(rho, a, b)

        def settings(p):
            a, b = _bell_settings(p)
            return {"alice": a, "bob": b}

    elif functional == "steering" and template:
        n = 0

        def evaluate(p):
            return steering_functional(template_scenario(rho, p[0]))

        def settings(p):
            s = template_scenario(rho, p[0])
            return {"template_angle": float(p[0]), "alice": list(s.alice), "bob": s.bob_settings()}

    elif functional == "steering":
        n = 10
        if objective == "lhs":
            fast = functools.partial(_free_steering_fast, r_a, r_b, t)

        def evaluate(p):
            return steering_functional(_free_steering_scenario(rho, p))

        def settings(p):
            s = _free_steering_scenario(rho, p)
            return {"alice": list(s.alice), "bob": s.bob_settings()}

    else:
        raise DomainError(f"unknown functional {functional!r}")

    if n == 0:
        bounds, periodic = [(0.0, np.pi / 2)], [False]
    else:
        bounds, periodic = [(0.0, 2 * np.pi)] * n, [True] * n
    objective_fn = fast if fast is not None and objective == "lhs" else (lambda p: score(evaluate(p)))
    x, _, r = _multistart(objective_fn, len(bounds), bounds, periodic, restarts, seed)
    return SearchResult(x, settings(x), evaluate(x), r)


def optimize_template_theta(f: float = 1.0, objective: str = "margin") -> tuple[float, WitnessReport]:
    """Scan the state family W(f, theta) together with the template settings at the same theta.

    Swapping |0> and |1> on both qubits maps theta to pi/2 - theta and leaves
    every value unchanged, so only (0, pi/4] is searched; the mirror optimum
    is pi/2 minus the returned angle.
    """
    if objective not in ("lhs", "margin"):
        raise DomainError(f"unknown objective {objective!r}")

    def value(theta):
        rep = steering_functional(template_scenario(make_werner(f, theta), theta))
        return rep.lhs if objective == "lhs" else rep.margin_ratio

    hi = np.pi / 4
    theta, _ = _line_search(value, 1e-9, hi, periodic=False)
    step = hi / (GRID_POINTS - 1)
    theta, _ = golden_max(value, max(theta - step, 1e-9), min(theta + step, hi), tol=1e-11)
    return theta, steering_functional(template_scenario(make_werner(f, theta), theta))
