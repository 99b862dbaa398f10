import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import quadlab.services.stability as stability
from quadlab.services.error_handler import (
    BoundMismatch,
    ContractionError,
    HypothesisFailure,
    NonConvergence,
    ValidationFailure,
)
from quadlab.services.fixpoint import GenMetricValue, GridSpec
from quadlab.services.functions import QuadPlusNoise, QuadPlusPower, TableFunction, square
from quadlab.services.stability import (
    DEFAULT_GRID,
    Constant,
    ConstantWeight,
    PowerType,
    PowerWeight,
    StabilityConfig,
    StabilityReport,
    bound_closed_form,
    bound_from_theorem,
    empirical_control_fit,
    empirical_lipschitz,
    lipschitz_for,
    lipschitz_for_power,
    noise_delta_ceiling,
    printed_lipschitz,
    psi_from_phi,
    resolve_branch,
    run_experiment,
    sample_triples,
    theoretical_bound,
)

POWERS = [0.0, 0.5, 1.0, 1.5, 3.0, 4.0]


def quadpow(p, eps0=0.1):
    return QuadPlusPower(a=1.0, eps0=eps0, p=p)


def branch_for(p):
    return 1 if p < 2 else -1


class TestControls:
    def test_power_control_values(self):
        phi = PowerType(eps=0.5, p=1.0)
        assert phi(1.0, -2.0, 3.0) == pytest.approx(3.0)
        assert PowerType(eps=1.0, p=0.0)(0.0, 0.0, 5.0) == 3.0

    def test_p_two_is_rejected(self):
        with pytest.raises(ValueError, match="p ≠ 2"):
            PowerType(eps=1.0, p=2.0)

    def test_constant_as_power(self):
        control = Constant(delta=0.36)
        instance = control.as_power()
        assert instance.p == 0 and instance.eps == pytest.approx(0.12)
        assert control(1.0, 2.0, 3.0) == pytest.approx(instance(1.0, 2.0, 3.0))

    def test_psi_is_phi_on_the_axis(self):
        control = PowerType(eps=0.7, p=3.0)
        psi = psi_from_phi(control)
        assert isinstance(psi, PowerWeight)
        for x in (-4.0, 0.5, 2.0):
            assert psi(x) == pytest.approx(control(x / 2, 0.0, 0.0))

    def test_psi_for_constant(self):
        psi = psi_from_phi(Constant(delta=0.2))
        assert isinstance(psi, ConstantWeight)
        assert np.array_equal(psi(np.array([1.0, -3.0])), [0.2, 0.2])


class TestLipschitz:
    @pytest.mark.parametrize("p", POWERS)
    def test_scaling_relation_is_exact(self, p):
        j = branch_for(p)
        L = lipschitz_for_power(p, j)
        psi = PowerWeight(eps=1.0, p=p)
        xs = DEFAULT_GRID.array()
        scaled = np.ldexp(np.asarray(psi(np.ldexp(xs, j))), -2 * j)
        assert np.allclose(scaled, L * psi(xs), rtol=1e-15, atol=0)
        assert 0 < L < 1

    @pytest.mark.parametrize("p", POWERS)
    def test_printed_constant_fails_the_relation(self, p):
        j = branch_for(p)
        printed = printed_lipschitz(p, j)
        psi = PowerWeight(eps=1.0, p=p)
        xs = DEFAULT_GRID.array()
        scaled = np.ldexp(np.asarray(psi(np.ldexp(xs, j))), -2 * j)
        assert not np.allclose(scaled, printed * psi(xs))
        assert printed != lipschitz_for_power(p, j)

    def test_known_values(self):
        assert lipschitz_for_power(1.0, 1) == 0.5
        assert lipschitz_for_power(3.0, -1) == 0.5
        assert lipschitz_for_power(0.0, 1) == 0.25
        assert lipschitz_for(Constant(delta=1.0), 1) == 0.25

    @pytest.mark.parametrize("p, j", [(1.0, -1), (3.0, 1)])
    def test_wrong_branch(self, p, j):
        with pytest.raises(ContractionError):
            lipschitz_for_power(p, j)


class TestBranch:
    def test_auto(self):
        assert resolve_branch(PowerType(eps=1.0, p=0.5)) == 1
        assert resolve_branch(PowerType(eps=1.0, p=3.0)) == -1
        assert resolve_branch(Constant(delta=1.0)) == 1

    def test_explicit_branch_must_contract(self):
        with pytest.raises(ContractionError):
            resolve_branch(PowerType(eps=1.0, p=3.0), 1)
        assert resolve_branch(PowerType(eps=1.0, p=3.0), -1) == -1

    def test_constant_needs_doubling_branch(self):
        with pytest.raises(ContractionError):
            resolve_branch(Constant(delta=1.0), -1)


class TestBounds:
    def test_constant_control(self):
        assert theoretical_bound(Constant(delta=0.36), 2, 1, 5.0) == pytest.approx(0.01, rel=1e-12)

    def test_linear_power(self):
        assert theoretical_bound(PowerType(eps=1.0, p=1.0), 2, 1, 0.3) == pytest.approx(0.0375, rel=1e-12)

    @pytest.mark.parametrize("c", [2, -2, 3, 5])
    def test_cubic_power(self, c):
        eps = 0.7
        assert theoretical_bound(PowerType(eps=eps, p=3.0), c, -1, 1.0) == pytest.approx(eps / (4 * c * c), rel=1e-12)

    @given(
        st.sampled_from(POWERS),
        st.floats(0.01, 10),
        st.sampled_from([2, -2, 3, -3, 4, 7]),
        st.floats(1e-3, 100),
        st.sampled_from([1.0, -1.0]),
    )
    def test_two_formulas_agree(self, p, eps, c, magnitude, sign):
        x = sign * magnitude
        control = PowerType(eps=eps, p=p)
        j = branch_for(p)
        general = bound_from_theorem(psi_from_phi(control)(x), c, j, lipschitz_for_power(p, j))
        assert general == pytest.approx(bound_closed_form(control, c, j, x), rel=1e-12)

    @pytest.mark.parametrize("p", POWERS)
    @pytest.mark.parametrize("x", [0.3, 1.0, -5.0])
    def test_printed_constant_breaks_the_agreement(self, p, x):
        control = PowerType(eps=0.5, p=p)
        j = branch_for(p)
        general = bound_from_theorem(psi_from_phi(control)(x), 2, j, printed_lipschitz(p, j))
        closed = bound_closed_form(control, 2, j, x)
        if p == 3.0:
            assert printed_lipschitz(p, j) == 1.0
            assert math.isinf(general)
        else:
            assert general != pytest.approx(closed, rel=1e-6)
        assert bound_from_theorem(psi_from_phi(control)(x), 2, j, lipschitz_for_power(p, j)) == pytest.approx(
            closed, rel=1e-12
        )

    def test_array_arguments(self):
        xs = DEFAULT_GRID.array()
        bounds = theoretical_bound(PowerType(eps=0.8, p=1.0), 2, 1, xs)
        assert np.allclose(bounds, 0.1 * np.abs(xs))

    def test_no_bound_without_contraction(self):
        assert math.isinf(bound_from_theorem(1.0, 2, 1, 1.0))
        assert math.isinf(bound_from_theorem(1.0, 2, -1, 2.0))

    def test_disagreeing_formulas(self, monkeypatch):
        monkeypatch.setattr(stability, "bound_closed_form", lambda *args: 1.0)
        with pytest.raises(BoundMismatch):
            theoretical_bound(PowerType(eps=1.0, p=1.0), 2, 1, 3.0)

    def test_noise_ceiling(self):
        assert noise_delta_ceiling(0.01, 2) == pytest.approx(0.44)
        assert noise_delta_ceiling(1.0, 3) == 94


class TestFits:
    def test_linear_perturbation(self):
        fitted = empirical_control_fit(quadpow(1.0), 2, PowerType(eps=1.0, p=1.0), DEFAULT_GRID)
        assert fitted >= 0.8 - 1e-12

    def test_cubic_perturbation(self):
        fitted = empirical_control_fit(quadpow(3.0), 2, PowerType(eps=1.0, p=3.0), DEFAULT_GRID)
        assert fitted >= 1.6 - 1e-12

    def test_constant_perturbation_stays_below_the_needed_size(self):
        fitted = empirical_control_fit(quadpow(0.0), 2, PowerType(eps=1.0, p=0.0), DEFAULT_GRID)
        assert 0.4 - 1e-12 <= fitted <= 3.4 / 3 + 1e-12
        assert theoretical_bound(PowerType(eps=fitted, p=0.0), 2, 1, 1.0) < 0.1

    def test_exact_quadratic(self):
        assert empirical_control_fit(square(), 3, Constant(delta=1.0), DEFAULT_GRID) == 0.0

    def test_noise_stays_under_ceiling(self):
        f = QuadPlusNoise(a=1.0, eta=0.01, seed=3)
        assert empirical_control_fit(f, 2, Constant(delta=1.0), DEFAULT_GRID) <= noise_delta_ceiling(0.01, 2)

    def test_sample_triples_cover_the_axis(self):
        triples = sample_triples(DEFAULT_GRID, max_triples=50, seed=1)
        xs = DEFAULT_GRID.array()
        assert len(triples) == 50 + 2 * len(xs)
        assert np.array_equal(triples[: len(xs), 0], xs)
        assert not np.any(np.all(triples == 0.0, axis=1))

    def test_sampling_is_seeded(self):
        first = sample_triples(DEFAULT_GRID, max_triples=64, seed=9)
        assert np.array_equal(first, sample_triples(DEFAULT_GRID, max_triples=64, seed=9))


class TestEmpiricalLipschitz:
    def test_geometric_mean(self):
        distances = [GenMetricValue.finite(v) for v in (1.0, 0.5, 0.25, 0.125)]
        assert empirical_lipschitz(distances) == pytest.approx(0.5)

    def test_skips_infinite_and_zero(self):
        distances = [GenMetricValue.infinity(), GenMetricValue.finite(0.4), GenMetricValue.finite(0.1), GenMetricValue.finite(0.0)]
        assert empirical_lipschitz(distances) == pytest.approx(0.25)

    def test_too_short(self):
        assert empirical_lipschitz([GenMetricValue.finite(1.0)]) is None


def _config(**kwargs):
    defaults = {"c": 2, "tol": 1e-13, "max_iter": 60, "seed": 7}
    defaults.update(kwargs)
    return StabilityConfig(**defaults)


@pytest.fixture(scope="module")
def linear_report():
    return run_experiment(
        _config(name="power_p1", f=quadpow(1.0), control=PowerType(eps=1.0, p=1.0), control_source="fit")
    )


@pytest.fixture(scope="module")
def cubic_report():
    return run_experiment(
        _config(name="power_p3", f=quadpow(3.0), control=PowerType(eps=1.0, p=3.0), control_source="fit")
    )


@pytest.fixture(scope="module")
def constant_perturbation_report():
    return run_experiment(
        _config(name="power_p0", f=quadpow(0.0), control=PowerType(eps=1.0, p=0.0), control_source="fit")
    )


class TestRunExperiment:
    def test_linear_perturbation(self, linear_report):
        report = linear_report
        assert report.ok
        assert report.j == 1 and report.theoretical_L == 0.5 and report.printed_L == 0.25
        assert report.empirical_L == pytest.approx(0.5, rel=0.05)
        assert report.control_parameter >= 0.8 - 1e-12
        assert report.checkpoint == 0.125
        assert report.iterations is not None and report.iterations < 60
        assert report.decay_certified
        for point in report.points:
            assert point.err == pytest.approx(0.1 * abs(point.x), rel=1e-9)
            assert point.passed and point.a_priori_passed

    def test_cubic_perturbation(self, cubic_report):
        report = cubic_report
        assert report.ok
        assert report.j == -1 and report.theoretical_L == 0.5
        assert report.checkpoint == 0.25
        assert report.empirical_L == pytest.approx(report.theoretical_L, rel=0.05)
        assert report.control_parameter >= 1.6 - 1e-12
        assert report.max_delta_q <= 1e-7

    def test_constant_perturbation_misses_the_bound(self, constant_perturbation_report):
        report = constant_perturbation_report
        assert not report.ok
        assert report.verdict == "fail"
        assert report.checkpoint_verdict == "fail"
        assert report.theoretical_L == 0.25
        assert report.empirical_L == pytest.approx(report.theoretical_L, rel=0.05)
        assert report.a_priori_verdict == "pass"
        assert report.delta_q_verdict == "pass"
        for point in report.points:
            assert point.err == pytest.approx(0.1, rel=1e-9)
            assert point.bound < 0.1

    def test_exact_square(self):
        report = run_experiment(_config(f=square(), control=Constant(delta=0.36)))
        assert report.ok
        assert report.iterations == 0
        assert report.d_f_Tf == 0.0
        assert all(point.err == 0.0 for point in report.points)
        assert all(point.bound == pytest.approx(0.01, rel=1e-12) for point in report.points)

    def test_table_function_is_rejected(self):
        xs = DEFAULT_GRID.array()
        table = TableFunction(points={float(x): float(x * x) for x in xs})
        with pytest.raises(ValidationFailure, match="defined off the grid"):
            run_experiment(_config(f=table, control=Constant(delta=0.5)))

    def test_noise_with_ceiling(self):
        config = _config(
            f=QuadPlusNoise(a=1.0, eta=0.01, seed=42),
            control=Constant(delta=1.0),
            control_source="ceiling",
            j=1,
            tol=1e-12,
        )
        report = run_experiment(config)
        assert report.ok
        assert report.control_parameter == pytest.approx(0.44)
        assert report.theoretical_L == 0.25
        assert report.empirical_L == pytest.approx(report.theoretical_L, rel=0.05)
        assert all(point.err <= 0.01 + 1e-12 for point in report.points)

    def test_undersized_control(self):
        config = _config(f=quadpow(1.0), control=PowerType(eps=0.1, p=1.0))
        with pytest.raises(HypothesisFailure) as info:
            run_experiment(config)
        assert info.value.worst_ratio >= 8.0 - 1e-9

    def test_iteration_cap(self):
        config = _config(f=quadpow(1.0), control=PowerType(eps=1.0, p=1.0), control_source="fit", max_iter=2)
        with pytest.raises(NonConvergence) as info:
            run_experiment(config)
        assert len(info.value.diagnostics.distances) == 2

    def test_records_round_trip(self, linear_report):
        records = linear_report.to_records()
        assert records[0]["record"] == "summary"
        assert [r["record"] for r in records[1:]] == ["point"] * len(DEFAULT_GRID.points)
        assert StabilityReport.from_records(records) == linear_report

    def test_from_records_needs_one_summary(self, linear_report):
        points = linear_report.to_records()[1:]
        with pytest.raises(ValidationFailure):
            StabilityReport.from_records(points)


class TestConfigValidation:
    @pytest.mark.parametrize("c", [0, 1, -1])
    def test_bad_c(self, c):
        with pytest.raises(ValueError, match="c ≠ 0, ±1"):
            _config(c=c, f=quadpow(1.0), control=PowerType(eps=1.0, p=1.0))

    def test_ceiling_needs_noise(self):
        with pytest.raises(ValueError, match="ceiling"):
            _config(f=quadpow(1.0), control=Constant(delta=1.0), control_source="ceiling")

    def test_branch_choice(self):
        with pytest.raises(ValueError):
            _config(f=quadpow(1.0), control=PowerType(eps=1.0, p=1.0), j=2)

    def test_custom_grid(self):
        config = _config(f=quadpow(1.0), control=PowerType(eps=1.0, p=1.0), grid=GridSpec.dyadic(0.5, -2, 2))
        assert len(config.grid.points) == 10
