import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opreal.errors import (
    ClassificationError,
    DomainError,
    IncompatibleError,
    NoCertificateError,
    PromiseRequiredError,
    PurityError,
)
from opreal.measurement import Observable, observable_x, observable_z, remote_conditional_state
from opreal.ornl import (
    Component,
    Preparation,
    WernerClass,
    certify_theorem2,
    check_or_nonlocal_pure,
    classify_werner,
    lhs_model_from_compatible,
    or_probability_known_prep,
    validate_decomposition,
    werner_thresholds,
)
from opreal.protocols import nonadaptive_scenario, template_scenario
from opreal.qstate import (
    basis_state,
    make_psi,
    make_werner,
    maximally_mixed,
    partial_trace,
    pure,
    psi_vector,
    random_state,
    tensor,
    trace_distance,
)
from opreal.witnesses import WitnessReport, steering_functional, two_term_steering

interior = st.floats(0.01, np.pi / 2 - 0.01)
Z = observable_z()


def bell_states():
    s = 1 / np.sqrt(2)
    return [pure([s, 0, 0, s]), pure([s, 0, 0, -s]), pure([0, s, s, 0]), pure([0, s, -s, 0])]


def werner_defining_prep(f, theta):
    products = [Component((1 - f) / 4, basis_state(i, j), Z, separable=True) for i in (0, 1) for j in (0, 1)]
    return Preparation([Component(f, make_psi(theta), Z)] + products)


def werner_second_prep(f, theta):
    return Preparation(
        [
            Component((1 + f) / 2, make_psi(theta), Z),
            Component((1 - f) / 2, pure(psi_vector(theta + np.pi / 2)), Z),
        ]
    )


@given(interior)
def test_pure_checker_psi_sigma_z(theta):
    assert check_or_nonlocal_pure(make_psi(theta), Z)


def test_pure_checker_product_fails_condition_a():
    assert not check_or_nonlocal_pure(basis_state(0, 0), Z)


@given(interior.filter(lambda t: abs(t - np.pi / 4) > 1e-3))
def test_pure_checker_sigma_x_fails_condition_b(theta):
    assert not check_or_nonlocal_pure(make_psi(theta), observable_x())
    # A's post-state |+> and B's remote state differ by a positive trace distance
    _, phi = remote_conditional_state(make_psi(theta), observable_x(), 1)
    assert trace_distance(pure([1, 1]), phi) > 1e-6


def test_pure_checker_requires_purity():
    with pytest.raises(PurityError):
        check_or_nonlocal_pure(make_werner(0.5, 0.3), Z)


@pytest.mark.parametrize("f", [0.0, 0.3, 0.8, 1.0])
def test_known_prep_werner(f):
    assert or_probability_known_prep(werner_defining_prep(f, 0.4)) == pytest.approx(f, abs=1e-15)


def test_known_prep_product_and_mirror_mixture():
    assert or_probability_known_prep(Preparation([Component(1.0, basis_state(0, 0), Z)])) == 0.0
    assert or_probability_known_prep(werner_second_prep(0.0, np.pi / 6)) == pytest.approx(1.0)


def test_known_prep_classification_errors():
    with pytest.raises(ClassificationError):
        or_probability_known_prep(Preparation([Component(1.0, make_werner(0.5, 0.3), Z)]))
    with pytest.raises(ClassificationError):
        or_probability_known_prep(Preparation([Component(1.0, make_psi(0.3))]))
    with pytest.raises(DomainError):
        Preparation([Component(0.7, make_psi(0.3), Z)])


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_known_prep_affine(w, f1, f2):
    p = w * f1 + (1 - w) * f2
    comps = [
        Component(w * f1, make_psi(0.5), Z),
        Component(w * (1 - f1), basis_state(0, 1), Z, separable=True),
        Component((1 - w) * f2, make_psi(1.0), Z),
        Component((1 - w) * (1 - f2), basis_state(1, 1), Z),
    ]
    assert or_probability_known_prep(Preparation(comps)) == pytest.approx(p, abs=1e-12)


def test_validate_defining_decomposition():
    ok, d = validate_decomposition(make_werner(0.6, 0.4), werner_defining_prep(0.6, 0.4))
    assert ok and d < 1e-14


@pytest.mark.parametrize("f", [0.0, 0.5, 0.9])
def test_validate_second_decomposition_rejected(f):
    ok, d = validate_decomposition(make_werner(f, np.pi / 6), werner_second_prep(f, np.pi / 6))
    assert not ok
    assert d >= (1 - f) / 4 - 1e-9


def test_validate_bell_state_mixture():
    prep = Preparation([Component(0.25, b, Z) for b in bell_states()])
    ok, d = validate_decomposition(maximally_mixed(4), prep)
    assert ok and d < 1e-14


def _report(lhs, bound=2.5, k=3):
    return WitnessReport.build(lhs, bound, k)


def test_certify_examples():
    assert certify_theorem2(_report(3.0), 3.0, True).f_min == pytest.approx(1.0)
    assert certify_theorem2(_report(2.5 + 1e-6, 2.0), 3.0, True).f_min == pytest.approx(2 / 3, abs=1e-5)
    assert certify_theorem2(_report(2.5, 2.0), 3.0, True).f_min == pytest.approx(2 / 3, abs=1e-15)


@pytest.mark.parametrize("f", [0.7, 0.8, 0.95, 1.0])
def test_certify_werner_tight(f):
    rep = steering_functional(template_scenario(make_werner(f, np.pi / 6), np.pi / 6))
    assert certify_theorem2(rep, commensurate_promise=True).f_min == pytest.approx(f, abs=1e-9)


def test_certify_errors():
    with pytest.raises(PromiseRequiredError):
        certify_theorem2(_report(3.0), 3.0, False)
    with pytest.raises(NoCertificateError):
        certify_theorem2(_report(2.4), 3.0, True)
    with pytest.raises(DomainError):
        certify_theorem2(_report(2.9), 2.4, True)


@given(st.floats(2.5001, 3.0), st.floats(2.5001, 3.0))
def test_certify_monotone(u, v):
    lo, hi = sorted((u, v))
    a = certify_theorem2(_report(lo), commensurate_promise=True).f_min
    b = certify_theorem2(_report(hi), commensurate_promise=True).f_min
    assert a <= b


def test_certify_clamps():
    cert = certify_theorem2(_report(3.0), 2.8, True)
    assert cert.f_min == 1.0


def test_werner_thresholds_pi_over_6():
    th = werner_thresholds(np.pi / 6)
    assert th.steering == pytest.approx(2 / 3, abs=1e-9)
    assert th.bell == pytest.approx(2 / np.sqrt(7), abs=1e-9)


@pytest.mark.parametrize(
    "f, expected",
    [
        (0.60, WernerClass.UNSTEERABLE),
        (0.70, WernerClass.OR_NOT_BELL),
        (0.75, WernerClass.OR_NOT_BELL),
        (0.80, WernerClass.BELL),
    ],
)
def test_classify_werner(f, expected):
    assert classify_werner(f, np.pi / 6) is expected


def test_werner_thresholds_general_theta():
    theta = 0.3
    s, c = np.sin(2 * theta), np.cos(2 * theta)
    bound = 1.5 + 0.5 * max(np.sqrt(1 + 4 * s * s), 1 + 2 * abs(c))
    th = werner_thresholds(theta)
    assert th.steering == pytest.approx((2 * bound - 3) / 3, abs=1e-9)
    assert th.bell == pytest.approx(1 / np.sqrt(1 + s * s), abs=1e-9)


def test_lhs_model_psi():
    t = 0.4
    for x1 in (Z, -Z):
        model = lhs_model_from_compatible(make_psi(t), Z, x1)
        assert model.weights == pytest.approx([np.cos(t) ** 2, np.sin(t) ** 2])
        assert trace_distance(model.states[0], basis_state(0)) < 1e-12
        assert trace_distance(model.states[1], basis_state(1)) < 1e-12
    # relabelled responses for -Z
    assert model.responses[1][:, 0] == pytest.approx([0, 1])


def test_lhs_model_product(rng):
    a, b = random_state(rng, 2), random_state(rng, 2)
    x = Observable((0.6, 0.0, 0.8))
    model = lhs_model_from_compatible(tensor(a, b), x, -x)
    assert len(model.states) == 1
    assert model.weights == pytest.approx([1.0])
    assert trace_distance(model.states[0], b) < 1e-12


def test_lhs_model_incompatible():
    with pytest.raises(IncompatibleError):
        lhs_model_from_compatible(make_psi(0.3), Z, observable_x())


def test_lhs_model_reproduces_conditionals(rng):
    for _ in range(200):
        rho = random_state(rng, 4, rank=int(rng.integers(1, 5)))
        v = rng.normal(size=3)
        x0 = Observable(tuple(v / np.linalg.norm(v)))
        x1 = x0 if rng.integers(2) else -x0
        model = lhs_model_from_compatible(rho, x0, x1)
        for j, x in enumerate((x0, x1)):
            for a in (1, -1):
                p, phi = remote_conditional_state(rho, x, a)
                assert np.abs(model.unnormalized_conditional(j, a) - p * phi.mat).max() < 1e-12
        assert trace_distance(model.marginal(), partial_trace(rho, "A")) < 1e-12


def test_incompatible_pair_violates_two_term_bound():
    zx = [Z, observable_x()]
    assert two_term_steering(nonadaptive_scenario(make_psi(np.pi / 4), zx, zx)).violated
