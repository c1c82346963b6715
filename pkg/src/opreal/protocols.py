"""Distinguishability signals and the conditional certainties of steering tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, UndefinedConditionalError
from .measurement import (
    OUTCOMES,
    Observable,
    nonselective,
    observable_x,
    observable_z,
    outcome_probability,
    remote_conditional_state,
    xz_observable,
)
from .qstate import DensityOperator, mixture, trace_distance, von_neumann_entropy

REAL_DISTURBANCE_TOL = 1e-10
RNG_ALGORITHM = "Philox-4x64-10 (numpy.random.Philox keyed by SeedSequence(seed))"


@dataclass(frozen=True)
class SignalReport:
    """How well Bob can tell the undisturbed state from the measured one."""

    trace_distance: float
    helstrom_success: float
    holevo_bits: float

    @property
    def operationally_real(self) -> bool:
        return self.trace_distance > REAL_DISTURBANCE_TOL


def signal_report(rho: DensityOperator, sigma: DensityOperator) -> SignalReport:
    """Trace distance, Helstrom success and Holevo quantity for {rho, sigma} sent with equal priors."""
    d = trace_distance(rho, sigma)
    if d < REAL_DISTURBANCE_TOL:
        return SignalReport(d, 0.5 + d / 2, 0.0)
    avg = mixture([(0.5, rho), (0.5, sigma)])
    chi = von_neumann_entropy(avg) - 0.5 * (von_neumann_entropy(rho) + von_neumann_entropy(sigma))
    return SignalReport(d, 0.5 + d / 2, max(chi, 0.0))


def signal_a_to_a(phi: DensityOperator, x: Observable) -> SignalReport:
    """Alice sends either phi or its non-selectively measured version."""
    return signal_report(phi, nonselective(phi, x))


def signal_a_to_ab(rho_ab: DensityOperator, x: Observable) -> SignalReport:
    """Entanglement-assisted version: Bob holds both halves and compares joint states."""
    return signal_report(rho_ab, nonselective(rho_ab, x, "A"))


@dataclass(frozen=True)
class Term:
    """One summand of a steering functional.

    ``outcome=None`` averages Bob's certainty over Alice's outcomes; otherwise
    only runs where Alice obtained ``outcome`` contribute.
    """

    setting: int
    outcome: int | None = None

    @property
    def rule(self) -> str:
        return "averaged" if self.outcome is None else "outcome-conditioned"


@dataclass(frozen=True)
class SteeringScenario:
    """Shared state, Alice's settings, Bob's outcome-adaptive choices, and the terms summed."""

    state: DensityOperator
    alice: tuple[Observable, ...]
    bob_branches: Mapping[tuple[int, int], Observable]
    terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "bob_branches", MappingProxyType(dict(self.bob_branches)))
        if self.state.dim != 4:
            raise DomainError("steering scenarios need a two-qubit state")
        if not self.terms:
            raise DomainError("scenario has no terms")
        for t in self.terms:
            if not 0 <= t.setting < len(self.alice):
                raise DomainError(f"term refers to missing Alice setting {t.setting}")
            if t.outcome is not None and t.outcome not in OUTCOMES:
                raise DomainError(f"bad designated outcome {t.outcome!r}")
            for a in OUTCOMES:
                if (t.setting, a) not in self.bob_branches:
                    raise DomainError(f"no Bob setting for branch ({t.setting}, {a})")
            if t.outcome is None and self.bob_branches[(t.setting, 1)] != self.bob_branches[(t.setting, -1)]:
                raise DomainError("an averaged term needs the same Bob setting on both branches")

    def bob_setting(self, term: Term) -> Observable:
        return self.bob_branches[(term.setting, 1 if term.outcome is None else term.outcome)]

    def bob_settings(self) -> list[Observable]:
        return [self.bob_setting(t) for t in self.terms]

    @property
    def non_adaptive(self) -> bool:
        """True if every term averages over Alice's outcomes.

        Only then is the single-system uncertainty bound a valid
        local-hidden-state bound.
        """
        return all(t.outcome is None for t in self.terms)

    def with_state(self, state: DensityOperator) -> SteeringScenario:
        return SteeringScenario(state, self.alice, self.bob_branches, self.terms)


def template_scenario(state: DensityOperator, theta: float) -> SteeringScenario:
    """Two Alice settings, three Bob settings, Bob's choice following Alice's sigma_X outcome.

    x0 = y0 = sigma_Z; x1 = sigma_X; Bob measures
    y1 = sin(2 theta) sigma_X + cos(2 theta) sigma_Z after outcome +1 and
    y2 = sin(2 theta) sigma_X - cos(2 theta) sigma_Z after outcome -1.
    """
    z = observable_z()
    y1 = xz_observable(2 * theta)
    y2 = Observable((np.sin(2 * theta), 0.0, -np.cos(2 * theta)))
    return SteeringScenario(
        state,
        (z, observable_x()),
        {(0, 1): z, (0, -1): z, (1, 1): y1, (1, -1): y2},
        (Term(0), Term(1, 1), Term(1, -1)),
    )


def nonadaptive_scenario(
    state: DensityOperator, alice: Sequence[Observable], bob: Sequence[Observable]
) -> SteeringScenario:
    """Term j pairs Alice's setting j with Bob's setting j, averaged over outcomes."""
    if len(alice) != len(bob):
        raise DomainError("need one Bob setting per Alice setting")
    branches = {(j, a): y for j, y in enumerate(bob) for a in OUTCOMES}
    return SteeringScenario(state, tuple(alice), branches, tuple(Term(j) for j in range(len(alice))))


def _certainty(phi: DensityOperator, y: Observable) -> tuple[float, int]:
    """max_b p(b|y, phi) and the maximizing outcome (ties go to +1)."""
    p_plus = 0.5 * (1 + float(y.vector @ phi.bloch()))
    p_plus = min(max(p_plus, 0.0), 1.0)
    return (p_plus, 1) if p_plus >= 0.5 else (1.0 - p_plus, -1)


def _branch(s: SteeringScenario, setting: int, a: int):
    """(p(a|x), phi_B^{a|x}) or (0, None) if the outcome never happens."""
    try:
        return remote_conditional_state(s.state, s.alice[setting], a)
    except UndefinedConditionalError:
        return 0.0, None


def conditional_certainties(s: SteeringScenario) -> list[float]:
    out = []
    for t in s.terms:
        if t.outcome is None:
            total = 0.0
            for a in OUTCOMES:
                p, phi = _branch(s, t.setting, a)
                if phi is not None:
                    total += p * _certainty(phi, s.bob_branches[(t.setting, a)])[0]
            out.append(total)
        else:
            _, phi = remote_conditional_state(s.state, s.alice[t.setting], t.outcome)
            out.append(_certainty(phi, s.bob_branches[(t.setting, t.outcome)])[0])
    return out


def joint_table(s: SteeringScenario, setting: int) -> dict[tuple[int, int], float]:
    """Exact p(a, b) when Alice measures ``setting`` and Bob follows the branch map."""
    table = {}
    for a in OUTCOMES:
        p, phi = _branch(s, setting, a)
        y = s.bob_branches[(setting, a)]
        for b in OUTCOMES:
            table[(a, b)] = 0.0 if phi is None else p * outcome_probability(phi, y, b)
    return table


@dataclass
class SampleResult:
    counts: dict[tuple[int, int, int], int]
    n: int
    seed: int
    estimate: float
    standard_error: float
    exact: float
    term_estimates: list[float] = field(default_factory=list)
    algorithm: str = RNG_ALGORITHM

    @property
    def z_score(self) -> float:
        diff = self.estimate - self.exact
        if self.standard_error == 0.0:
            return 0.0 if abs(diff) < 1e-12 else float("inf") * np.sign(diff)
        return diff / self.standard_error


def sample_experiment(s: SteeringScenario, n: int, seed: int) -> SampleResult:
    """Run ``n`` rounds per Alice setting and estimate the steering sum.

    Alice announces the outcome Bob should see, chosen as the more likely
    outcome under the exact conditional state; a term's estimate is the
    fraction of (relevant) rounds where Bob's result matches. Rounds for each
    setting are drawn as one multinomial over (a, b), settings taken in index
    order from a single Philox stream.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    keys = [(a, b) for a in OUTCOMES for b in OUTCOMES]
    counts: dict[tuple[int, int, int], int] = {}
    for i in sorted({t.setting for t in s.terms}):
        table = joint_table(s, i)
        pv = np.array([table[k] for k in keys])
        pv = pv / pv.sum()
        draws = rng.multinomial(n, pv)
        for (a, b), c in zip(keys, draws):
            counts[(i, a, b)] = int(c)

    exact_terms = conditional_certainties(s)
    estimates, variances = [], []
    for t, exact in zip(s.terms, exact_terms):
        guess = {}
        for a in OUTCOMES:
            _, phi = _branch(s, t.setting, a)
            guess[a] = 1 if phi is None else _certainty(phi, s.bob_branches[(t.setting, a)])[1]
        if t.outcome is None:
            hits = sum(counts[(t.setting, a, guess[a])] for a in OUTCOMES)
            m = n
        else:
            a = t.outcome
            hits = counts[(t.setting, a, guess[a])]
            m = counts[(t.setting, a, 1)] + counts[(t.setting, a, -1)]
            if m == 0:
                raise UndefinedConditionalError(f"no rounds with Alice outcome {a} for setting {t.setting}")
        estimates.append(hits / m)
        variances.append(max(exact * (1 - exact), 0.0) / m)
    return SampleResult(
        counts=counts,
        n=n,
        seed=int(seed),
        estimate=float(sum(estimates)),
        standard_error=float(np.sqrt(sum(variances))),
        exact=float(sum(exact_terms)),
        term_estimates=estimates,
    )
