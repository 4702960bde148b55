import json
import re

import numpy as np
import pytest

from pwmctrl.cli import main
from pwmctrl.io import (
    read_field_csv,
    read_gamma_grid_csv,
    read_propagator_csv,
    read_sequence_csv,
    read_spectrum_csv,
    read_system_json,
    read_trace_csv,
)
from pwmctrl.pwm import SampledField, inverse_pwm_pwc
from pwmctrl.io import write_field_csv


def write_sine_field(path, n_samples=200, duration=2.0):
    dt = duration / n_samples
    t = (np.arange(n_samples) + 0.5) * dt
    write_field_csv(path, SampledField(dt=dt, values=np.sin(2 * np.pi * t)[None, :]))
    return path


def write_zero_field(path, n_samples=50, duration=5.0):
    dt = duration / n_samples
    write_field_csv(path, SampledField(dt=dt, values=np.zeros((1, n_samples))))
    return path


class TestApproximateAndConfig:
    def test_flag_overrides_config(self, tmp_path, capsys):
        field = write_sine_field(tmp_path / "field.csv")
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"tau": 0.5, "xi": "1.2"}))
        out = tmp_path / "seq.csv"

        assert main([
            "approximate", "--config", str(config),
            "--field", str(field), "--out", str(out),
        ]) == 0
        assert read_sequence_csv(out).tau == 0.5

        assert main([
            "approximate", "--config", str(config), "--tau", "0.25",
            "--field", str(field), "--out", str(out),
        ]) == 0
        seq = read_sequence_csv(out)
        assert seq.tau == 0.25
        assert seq.amplitudes[0] == 1.2
        assert "subintervals" in capsys.readouterr().out

    def test_default_amplitude_exceeds_field_peak(self, tmp_path):
        field = write_sine_field(tmp_path / "field.csv")
        out = tmp_path / "seq.csv"
        assert main([
            "approximate", "--field", str(field), "--tau", "0.25", "--out", str(out),
        ]) == 0
        seq = read_sequence_csv(out)
        peak = np.max(np.abs(read_field_csv(field).values))
        assert seq.amplitudes[0] > peak


class TestErrorReporting:
    def test_unknown_flag_is_usage_error(self, tmp_path, capsys):
        assert main(["approximate", "--bogus", "1"]) == 1
        assert capsys.readouterr().err.startswith("error:usage:")

    def test_missing_required_option_is_validation_error(self, tmp_path, capsys):
        field = write_sine_field(tmp_path / "field.csv")
        assert main(["approximate", "--field", str(field)]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error:validation:")
        assert "--tau" in err

    def test_missing_input_file_is_io_error(self, tmp_path, capsys):
        assert main([
            "approximate", "--field", str(tmp_path / "nope.csv"),
            "--tau", "0.1", "--out", str(tmp_path / "o.csv"),
        ]) == 1
        assert capsys.readouterr().err.startswith("error:io:")

    def test_malformed_csv_is_io_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header\n1,2\n")
        assert main([
            "approximate", "--field", str(bad),
            "--tau", "0.1", "--out", str(tmp_path / "o.csv"),
        ]) == 1
        assert capsys.readouterr().err.startswith("error:io:")

    def test_out_of_range_control_is_validation_error(self, tmp_path, capsys):
        field = write_sine_field(tmp_path / "field.csv")
        assert main([
            "spectrum", "--field", str(field), "--control", "7",
            "--out", str(tmp_path / "s.csv"),
        ]) == 1
        assert capsys.readouterr().err.startswith("error:validation:")


class TestSignalAndReconstruct:
    @pytest.fixture()
    def sequence_path(self, tmp_path):
        field = write_sine_field(tmp_path / "field.csv")
        seq = tmp_path / "seq.csv"
        main(["approximate", "--field", str(field), "--tau", "0.25",
              "--xi", "1.2", "--out", str(seq)])
        return seq

    def test_gaussian_signal_is_readable_and_bounded(self, tmp_path, sequence_path):
        out = tmp_path / "signal.csv"
        assert main([
            "signal", "--sequence", str(sequence_path), "--kind", "gauss",
            "--rate", "200", "--out", str(out),
        ]) == 0
        signal = read_field_csv(out)
        assert np.max(np.abs(signal.values)) <= 1.2 + 1e-9

    def test_pwc_reconstruction_matches_library(self, tmp_path, sequence_path):
        out = tmp_path / "recon.csv"
        assert main([
            "reconstruct", "--sequence", str(sequence_path), "--mode", "pwc",
            "--out", str(out),
        ]) == 0
        recon = read_field_csv(out)
        expected = inverse_pwm_pwc(read_sequence_csv(sequence_path))
        assert np.array_equal(recon.values, expected.values)

    def test_lowpass_needs_cutoff(self, tmp_path, sequence_path, capsys):
        assert main([
            "reconstruct", "--sequence", str(sequence_path),
            "--out", str(tmp_path / "r.csv"),
        ]) == 1
        assert "cutoff" in capsys.readouterr().err

    def test_rejects_both_field_and_sequence(self, tmp_path, sequence_path, capsys):
        field = write_sine_field(tmp_path / "f2.csv")
        assert main([
            "reconstruct", "--sequence", str(sequence_path), "--field", str(field),
            "--cutoff", "10", "--out", str(tmp_path / "r.csv"),
        ]) == 1
        assert "exactly one" in capsys.readouterr().err


class TestPropagate:
    def test_pwm_equals_pwc_on_zero_field(self, tmp_path):
        field = write_zero_field(tmp_path / "zero.csv")
        u_paths = {}
        for scheme in ("pwm", "pwc"):
            u_paths[scheme] = tmp_path / f"u_{scheme}.csv"
            assert main([
                "propagate", "--builtin", "two-level", "--scheme", scheme,
                "--field", str(field), "--tau", "0.5", "--xi", "1.0",
                "--out", str(u_paths[scheme]),
            ]) == 0
        u_pwm = read_propagator_csv(u_paths["pwm"])
        u_pwc = read_propagator_csv(u_paths["pwc"])
        assert np.max(np.abs(u_pwm - u_pwc)) < 1e-12

    def test_system_round_trip_through_json(self, tmp_path):
        system_path = tmp_path / "system.json"
        assert main(["system", "--name", "ten-level", "--out", str(system_path)]) == 0
        system = read_system_json(system_path)
        assert system.dim == 10

        field = write_zero_field(tmp_path / "zero.csv", n_samples=10, duration=1.0)
        out = tmp_path / "u.csv"
        assert main([
            "propagate", "--system", str(system_path), "--scheme", "pwc",
            "--field", str(field), "--tau", "0.1", "--out", str(out),
        ]) == 0
        assert read_propagator_csv(out).shape == (10, 10)


class TestSpectrumCommand:
    def test_writes_readable_spectrum(self, tmp_path):
        field = write_sine_field(tmp_path / "field.csv")
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--field", str(field), "--out", str(out)]) == 0
        spec = read_spectrum_csv(out)
        # the input is a unit sinusoid at 2*pi rad per unit time
        peak = spec.omega[np.argmax(spec.magnitude)]
        assert peak == pytest.approx(2 * np.pi, abs=spec.omega[1])


class TestErrorOrderCommand:
    def test_reports_third_order_slope(self, tmp_path, capsys):
        out = tmp_path / "errors.csv"
        assert main([
            "error-order", "--scheme", "pwm", "--taus", "0.2,0.1,0.05",
            "--resolution", "4000", "--out", str(out),
        ]) == 0
        stdout = capsys.readouterr().out
        match = re.search(r"slope=([-0-9.]+)", stdout)
        assert match, stdout
        assert 2.7 < float(match.group(1)) < 3.3
        table = out.read_text().splitlines()
        assert table[0] == "tau,error"
        assert len(table) == 4


class TestOptimizeCommand:
    OPTIMIZE_ARGS = [
        "optimize", "--builtin", "two-level", "--initial", "0", "--target", "1",
        "--total-time", "5.0", "--tau", "0.25", "--seed", "7",
    ]

    def test_pwm_writes_sequence_field_and_trace(self, tmp_path, capsys):
        assert main(self.OPTIMIZE_ARGS + ["--out-dir", str(tmp_path)]) == 0
        seq = read_sequence_csv(tmp_path / "optimized_sequence.csv")
        field = read_field_csv(tmp_path / "optimized_field.csv")
        trace = read_trace_csv(tmp_path / "trace.csv")
        assert seq.n_pulses == 20 and field.n_samples == 20
        assert trace[-1] <= 1e-3
        assert "converged=True" in capsys.readouterr().out

    def test_same_seed_gives_identical_artifacts(self, tmp_path):
        dir_a, dir_b = tmp_path / "a", tmp_path / "b"
        assert main(self.OPTIMIZE_ARGS + ["--out-dir", str(dir_a)]) == 0
        assert main(self.OPTIMIZE_ARGS + ["--out-dir", str(dir_b)]) == 0
        for name in ("optimized_sequence.csv", "trace.csv"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()

    def test_pwc_branch_writes_field_only(self, tmp_path):
        assert main(
            self.OPTIMIZE_ARGS
            + ["--scheme", "pwc", "--out-dir", str(tmp_path)]
        ) == 0
        assert (tmp_path / "optimized_field.csv").exists()
        assert not (tmp_path / "optimized_sequence.csv").exists()
        assert np.all(np.abs(read_field_csv(tmp_path / "optimized_field.csv").values) <= 1.0)

    def test_bad_basis_index_is_validation_error(self, tmp_path, capsys):
        assert main([
            "optimize", "--builtin", "two-level", "--initial", "0", "--target", "5",
            "--total-time", "5.0", "--tau", "0.25", "--out-dir", str(tmp_path),
        ]) == 1
        assert capsys.readouterr().err.startswith("error:validation:")


class TestBenchmarkCommand:
    def test_tiny_run_writes_rows(self, tmp_path, capsys):
        assert main([
            "benchmark-fig5", "--repeats", "1", "--seed", "1",
            "--total-time", "1.0", "--tau", "0.1",
            "--max-iterations", "2", "--out-dir", str(tmp_path),
        ]) == 0
        lines = (tmp_path / "benchmark.csv").read_text().splitlines()
        assert lines[0] == "run,scheme,iterations,final_J,wall_seconds,converged"
        assert len(lines) == 3
        assert "converged pwm=" in capsys.readouterr().out


class TestComplexityCommand:
    def test_grid_contains_frozen_ratio(self, tmp_path):
        assert main([
            "complexity", "--K", "1", "--Nmin", "10", "--Nmax", "10",
            "--pmin", "2", "--pmax", "10", "--dims-count", "1",
            "--out-dir", str(tmp_path),
        ]) == 0
        dims, orders, values = read_gamma_grid_csv(tmp_path / "gamma_grid.csv")
        mask = (dims == 10) & (orders == 8)
        assert mask.sum() == 1
        assert values[mask][0] == pytest.approx(0.1648, abs=1e-4)
        contour = (tmp_path / "gamma_contour.csv").read_text().splitlines()
        assert contour[0] == "N,p_boundary"


class TestDemos:
    def test_fig1_emits_four_readable_artifacts(self, tmp_path):
        assert main(["demo-fig1", "--out-dir", str(tmp_path)]) == 0
        field = read_field_csv(tmp_path / "fig1_field.csv")
        seq = read_sequence_csv(tmp_path / "fig1_sequence.csv")
        signal = read_field_csv(tmp_path / "fig1_signal.csv")
        spec = read_spectrum_csv(tmp_path / "fig1_spectrum.csv")
        assert seq.n_pulses == 20
        assert np.max(np.abs(field.values)) <= 1.0
        assert set(np.round(np.unique(signal.values), 12)) <= {-1.0, 0.0, 1.0}
        assert spec.omega.size > 100

    def test_fig4_emits_two_readable_artifacts(self, tmp_path):
        assert main(["demo-fig4", "--out-dir", str(tmp_path)]) == 0
        train = read_field_csv(tmp_path / "fig4_train.csv")
        spec = read_spectrum_csv(tmp_path / "fig4_spectrum.csv")
        assert train.n_samples == spec.n_samples
