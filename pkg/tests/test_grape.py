import numpy as np
import pytest

from pwmctrl.grape import (
    GrapeOptions,
    GrapeProblem,
    GrapeResult,
    gradient,
    infidelity,
    objective,
    optimize,
    optimize_pwc,
    random_initial_widths,
    run_fig5_benchmark,
    ten_level_problem,
)
from pwmctrl.model import ControlSystem, basis_state
from pwmctrl.propagate import evolve
from pwmctrl.pwm import PWMSequence

from conftest import SIGMA_X, random_hermitian


def two_level_problem(total_time: float = 5.0, tau: float = 0.25) -> GrapeProblem:
    from conftest import SIGMA_Z

    system = ControlSystem(drift=SIGMA_Z, controls=(SIGMA_X,))
    return GrapeProblem(
        system=system,
        psi_initial=basis_state(2, 0),
        psi_target=basis_state(2, 1),
        total_time=total_time,
        tau=tau,
        amplitudes=np.array([1.0]),
    )


def finite_difference(problem: GrapeProblem, widths: np.ndarray, h: float = 2e-5):
    fd = np.zeros_like(widths)
    for k in range(widths.shape[0]):
        for m in range(widths.shape[1]):
            up, dn = widths.copy(), widths.copy()
            up[k, m] += h
            dn[k, m] -= h
            fd[k, m] = (objective(problem, up) - objective(problem, dn)) / (2 * h)
    return fd


class TestProblemValidation:
    def test_rejects_unnormalized_state(self, two_level):
        with pytest.raises(ValueError, match="normalized"):
            GrapeProblem(
                system=two_level,
                psi_initial=np.array([1.0, 1.0]),
                psi_target=basis_state(2, 1),
                total_time=1.0,
                tau=0.5,
                amplitudes=np.array([1.0]),
            )

    def test_rejects_wrong_state_dimension(self, two_level):
        with pytest.raises(ValueError, match="dimension"):
            GrapeProblem(
                system=two_level,
                psi_initial=basis_state(3, 0),
                psi_target=basis_state(3, 1),
                total_time=1.0,
                tau=0.5,
                amplitudes=np.array([1.0]),
            )

    def test_rejects_non_integer_step_count(self, two_level):
        with pytest.raises(ValueError, match="integer number"):
            GrapeProblem(
                system=two_level,
                psi_initial=basis_state(2, 0),
                psi_target=basis_state(2, 1),
                total_time=1.0,
                tau=0.3,
                amplitudes=np.array([1.0]),
            )

    def test_rejects_non_positive_tau(self, two_level):
        with pytest.raises(ValueError, match="tau"):
            GrapeProblem(
                system=two_level,
                psi_initial=basis_state(2, 0),
                psi_target=basis_state(2, 1),
                total_time=1.0,
                tau=0.0,
                amplitudes=np.array([1.0]),
            )

    def test_step_and_control_counts(self):
        problem = two_level_problem(total_time=5.0, tau=0.25)
        assert problem.n_steps == 20
        assert problem.n_controls == 1


class TestOptionsValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"initial_step": 0.0},
            {"tolerance": 0.0},
            {"tolerance": 1.0},
            {"width_bound": -0.1},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            GrapeOptions(**kwargs)


class TestObjective:
    def test_matches_pwm_propagator_infidelity(self, rng):
        problem = ten_level_problem(total_time=1.0)
        widths = random_initial_widths(problem, rng)
        seq = PWMSequence(
            tau=problem.tau, amplitudes=problem.amplitudes, widths=widths
        )
        u = evolve(problem.system, "pwm", seq)
        expected = infidelity(u, problem.psi_initial, problem.psi_target)
        assert objective(problem, widths) == pytest.approx(expected, abs=1e-14)

    def test_rejects_wrong_shape(self):
        problem = two_level_problem()
        with pytest.raises(ValueError, match="shape"):
            objective(problem, np.zeros((1, 3)))

    def test_rejects_non_finite_widths(self):
        problem = two_level_problem()
        bad = np.zeros((1, problem.n_steps))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            objective(problem, bad)


class TestGradient:
    def test_closed_form_single_rotation(self):
        """Zero drift, one sigma_x control: J = cos^2(sum w), so every entry of
        the gradient equals -sin(2 sum w)."""
        system = ControlSystem(drift=np.zeros((2, 2), dtype=complex), controls=(SIGMA_X,))
        problem = GrapeProblem(
            system=system,
            psi_initial=basis_state(2, 0),
            psi_target=basis_state(2, 1),
            total_time=3.0,
            tau=1.0,
            amplitudes=np.array([1.0]),
        )
        widths = np.array([[0.3, 0.55, -0.2]])
        total = widths.sum()
        assert objective(problem, widths) == pytest.approx(np.cos(total) ** 2, abs=1e-12)
        grad = gradient(problem, widths)
        assert np.allclose(grad, -np.sin(2 * total), atol=1e-12)

    def test_finite_difference_ten_level(self, rng):
        problem = ten_level_problem(total_time=1.0)
        widths = random_initial_widths(problem, rng)
        grad = gradient(problem, widths)
        fd = finite_difference(problem, widths)
        assert np.max(np.abs(grad - fd)) <= np.maximum(1e-6 * np.abs(fd), 1e-9).max()

    def test_finite_difference_two_controls(self, rng):
        system = ControlSystem(
            drift=random_hermitian(3, rng),
            controls=(random_hermitian(3, rng), random_hermitian(3, rng)),
        )
        psi = np.zeros(3, dtype=complex)
        psi[0] = 1.0
        target = np.zeros(3, dtype=complex)
        target[2] = 1.0
        problem = GrapeProblem(
            system=system,
            psi_initial=psi,
            psi_target=target,
            total_time=1.0,
            tau=0.2,
            amplitudes=np.array([1.0, 1.5]),
        )
        widths = random_initial_widths(problem, rng)
        grad = gradient(problem, widths)
        fd = finite_difference(problem, widths)
        assert np.max(np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-8)) <= 1e-5

    def test_warns_on_zero_width(self):
        problem = two_level_problem()
        widths = np.full((1, problem.n_steps), 0.1)
        widths[0, 4] = 0.0
        with pytest.warns(UserWarning, match="one-sided"):
            gradient(problem, widths)

    def test_warns_on_exact_sorting_tie(self, rng):
        system = ControlSystem(
            drift=random_hermitian(3, rng),
            controls=(random_hermitian(3, rng), random_hermitian(3, rng)),
        )
        problem = GrapeProblem(
            system=system,
            psi_initial=basis_state(3, 0),
            psi_target=basis_state(3, 2),
            total_time=1.0,
            tau=0.5,
            amplitudes=np.array([1.0, 1.0]),
        )
        widths = np.array([[0.2, 0.3], [-0.2, 0.1]])
        with pytest.warns(UserWarning, match="tie"):
            gradient(problem, widths)


class TestRandomInitialWidths:
    def test_widths_stay_in_half_cell(self, rng):
        problem = ten_level_problem(total_time=2.0)
        for _ in range(10):
            w = random_initial_widths(problem, rng)
            assert w.shape == (problem.n_controls, problem.n_steps)
            assert np.all(np.abs(w) <= 0.5 * problem.tau / problem.amplitudes[:, None])


class TestOptimize:
    def test_converges_on_two_level_transfer(self):
        problem = two_level_problem()
        result = optimize(problem, options=GrapeOptions(rng_seed=7))
        assert isinstance(result, GrapeResult)
        assert result.converged
        assert result.trace[-1] <= 1e-3
        assert np.all(np.diff(result.trace) < 0)
        assert np.all(np.abs(result.widths) <= problem.tau + 1e-15)
        assert result.iterations == result.trace.size - 1

    def test_same_seed_reproduces_result(self):
        problem = two_level_problem()
        a = optimize(problem, options=GrapeOptions(rng_seed=3))
        b = optimize(problem, options=GrapeOptions(rng_seed=3))
        assert np.array_equal(a.widths, b.widths)
        assert np.array_equal(a.trace, b.trace)

    def test_respects_tight_width_bound(self):
        problem = two_level_problem()
        options = GrapeOptions(rng_seed=7, width_bound=0.05, max_iterations=50)
        result = optimize(problem, options=options)
        assert np.all(np.abs(result.widths) <= 0.05 + 1e-15)

    def test_explicit_start_is_used(self):
        problem = two_level_problem()
        start = np.zeros((1, problem.n_steps))
        start[0, :] = 0.01
        result = optimize(problem, init_widths=start, options=GrapeOptions(max_iterations=1))
        assert result.trace[0] == pytest.approx(objective(problem, start), abs=1e-14)


class TestOptimizePwc:
    def test_converges_and_respects_amplitude_bound(self):
        problem = two_level_problem()
        result = optimize_pwc(problem, options=GrapeOptions(rng_seed=7))
        assert result.converged
        assert np.all(np.diff(result.trace) < 0)
        # default width bound tau maps to |eps| <= xi
        assert np.all(np.abs(result.widths) <= 1.0 + 1e-15)

    def test_same_seed_reproduces_result(self):
        problem = two_level_problem()
        a = optimize_pwc(problem, options=GrapeOptions(rng_seed=11))
        b = optimize_pwc(problem, options=GrapeOptions(rng_seed=11))
        assert np.array_equal(a.widths, b.widths)


class TestBenchmark:
    def test_smoke_run_on_two_level(self):
        problem = two_level_problem()
        report = run_fig5_benchmark(
            repeats=2, seed=5, problem=problem, peak_targets=(2.0,)
        )
        assert len(report.rows) == 4
        assert sorted({r.scheme for r in report.rows}) == ["pwc", "pwm"]
        pwm_converged = sum(r.converged for r in report.rows if r.scheme == "pwm")
        assert len(report.spectra) == pwm_converged
        assert 0 <= report.peak_hits <= pwm_converged
        for scheme in ("pwm", "pwc"):
            if any(r.converged for r in report.rows if r.scheme == scheme):
                assert np.isfinite(report.median_wall[scheme])
                assert np.isfinite(report.median_iterations[scheme])

    def test_same_seed_reproduces_trajectories(self):
        problem = two_level_problem()
        a = run_fig5_benchmark(repeats=2, seed=5, problem=problem)
        b = run_fig5_benchmark(repeats=2, seed=5, problem=problem)
        key = lambda rep: [(r.run, r.scheme, r.iterations, r.final_j, r.converged) for r in rep.rows]
        assert key(a) == key(b)

    def test_rejects_zero_repeats(self):
        with pytest.raises(ValueError):
            run_fig5_benchmark(repeats=0)
