"""CSV/JSON readers and writers for every artifact the toolkit emits.

All floating-point fields are written with ``repr``, i.e. the shortest
decimal string that round-trips to the same double, so reading a file back
reproduces the numbers bit-exactly.  Complex matrices are stored as
``[re, im]`` pairs (JSON) or ``re``/``im`` columns (CSV).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .costmodel import GammaGrid
from .model import ControlSystem
from .pwm import PWMSequence, SampledField, Spectrum

__all__ = [
    "read_benchmark_csv",
    "read_contour_csv",
    "read_field_csv",
    "read_gamma_grid_csv",
    "read_propagator_csv",
    "read_sequence_csv",
    "read_spectrum_csv",
    "read_system_json",
    "read_trace_csv",
    "write_benchmark_csv",
    "write_contour_csv",
    "write_field_csv",
    "write_gamma_grid_csv",
    "write_propagator_csv",
    "write_sequence_csv",
    "write_spectrum_csv",
    "write_system_json",
    "write_trace_csv",
]


class FileFormatError(ValueError):
    """The file exists but does not match the expected layout."""


def _fmt(x: float) -> str:
    return repr(float(x))


def _open_rows(path) -> list[list[str]]:
    with open(path, newline="") as handle:
        return [row for row in csv.reader(handle) if row]


def _split_comments(rows: list[list[str]]) -> tuple[dict[str, str], list[list[str]]]:
    meta: dict[str, str] = {}
    body: list[list[str]] = []
    for row in rows:
        first = row[0].strip()
        if first.startswith("#"):
            for cell in ",".join(row).lstrip("#").split(","):
                if "=" in cell:
                    key, value = cell.split("=", 1)
                    meta[key.strip()] = value.strip()
        else:
            body.append(row)
    return meta, body


def _require_header(body: list[list[str]], expected: list[str], path) -> list[list[str]]:
    if not body or [c.strip() for c in body[0]] != expected:
        raise FileFormatError(
            f"{path}: expected header {','.join(expected)}"
        )
    return body[1:]


def _float_table(rows: list[list[str]], width: int, path) -> np.ndarray:
    if not rows or any(len(row) != width for row in rows):
        raise FileFormatError(f"{path}: ragged or empty table")
    try:
        return np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise FileFormatError(f"{path}: non-numeric cell ({exc})") from exc


# ---------------------------------------------------------------- fields

def write_field_csv(path, field: SampledField) -> None:
    """Midpoint-sampled field as ``t,u_1,...,u_K`` rows (dt in a comment)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        handle.write(f"# dt={_fmt(field.dt)}\n")
        writer.writerow(["t"] + [f"u_{k + 1}" for k in range(field.n_controls)])
        for i, t in enumerate(field.times):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in field.values[:, i]])


def read_field_csv(path) -> SampledField:
    """Rebuild a sampled field; the grid must be uniform midpoints.

    The ``# dt=`` comment, when present, pins the cell width exactly;
    otherwise it is inferred from the time column.
    """
    meta, body = _split_comments(_open_rows(path))
    n_controls = len(body[0]) - 1 if body else 0
    if n_controls < 1:
        raise FileFormatError(f"{path}: no control columns")
    rows = _require_header(body, ["t"] + [f"u_{k + 1}" for k in range(n_controls)], path)
    data = _float_table(rows, n_controls + 1, path)
    t = data[:, 0]
    if "dt" in meta:
        dt = float(meta["dt"])
    elif t.size == 1:
        dt = 2 * t[0]
    else:
        dt = t[1] - t[0]
    if dt <= 0:
        raise FileFormatError(f"{path}: non-positive time step")
    expected = (np.arange(t.size) + 0.5) * dt
    if np.any(np.abs(t - expected) > 1e-9 * max(dt, 1.0)):
        raise FileFormatError(f"{path}: time grid is not uniform midpoints")
    return SampledField(dt=float(dt), values=data[:, 1:].T.copy())


# --------------------------------------------------------------- sequences

def write_sequence_csv(path, seq: PWMSequence) -> None:
    """Pulse widths as ``m,t_center,w_1,...`` with tau and xi in comments."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        handle.write(f"# tau={_fmt(seq.tau)}\n")
        handle.write("# xi=" + ";".join(_fmt(x) for x in seq.amplitudes) + "\n")
        writer.writerow(["m", "t_center"] + [f"w_{k + 1}" for k in range(seq.n_controls)])
        for m in range(seq.n_pulses):
            writer.writerow(
                [str(m + 1), _fmt(seq.centers[m])] + [_fmt(w) for w in seq.widths[:, m]]
            )


def read_sequence_csv(path) -> PWMSequence:
    meta, body = _split_comments(_open_rows(path))
    if "tau" not in meta or "xi" not in meta:
        raise FileFormatError(f"{path}: missing '# tau=' or '# xi=' comment")
    tau = float(meta["tau"])
    xi = np.array([float(x) for x in meta["xi"].split(";")])
    if not body or len(body[0]) < 3 or body[0][0].strip() != "m":
        raise FileFormatError(f"{path}: expected header m,t_center,w_1,...")
    n_controls = len(body[0]) - 2
    if n_controls != xi.size:
        raise FileFormatError(f"{path}: xi lists {xi.size} controls, table has {n_controls}")
    data = _float_table(body[1:], n_controls + 2, path)
    return PWMSequence(tau=tau, amplitudes=xi, widths=data[:, 2:].T.copy())


# ---------------------------------------------------------------- spectra

def write_spectrum_csv(path, spec: Spectrum) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        handle.write(f"# duration={_fmt(spec.duration)}\n")
        handle.write(f"# n_samples={spec.n_samples}\n")
        writer.writerow(["omega", "magnitude", "phase"])
        for i in range(spec.omega.size):
            writer.writerow([_fmt(spec.omega[i]), _fmt(spec.magnitude[i]), _fmt(spec.phase[i])])


def read_spectrum_csv(path) -> Spectrum:
    meta, body = _split_comments(_open_rows(path))
    if "duration" not in meta:
        raise FileFormatError(f"{path}: missing '# duration=' comment")
    rows = _require_header(body, ["omega", "magnitude", "phase"], path)
    data = _float_table(rows, 3, path)
    n_samples = int(meta["n_samples"]) if "n_samples" in meta else None
    return Spectrum(
        omega=data[:, 0],
        magnitude=data[:, 1],
        phase=data[:, 2],
        duration=float(meta["duration"]),
        n_samples=n_samples,
    )


# ------------------------------------------------------------- propagators

def write_propagator_csv(path, u: np.ndarray) -> None:
    """Dense complex matrix as ``i,j,re,im`` rows (row-major)."""
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("propagator must be a square matrix")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["i", "j", "re", "im"])
        for i in range(u.shape[0]):
            for j in range(u.shape[1]):
                writer.writerow([str(i), str(j), _fmt(u[i, j].real), _fmt(u[i, j].imag)])


def read_propagator_csv(path) -> np.ndarray:
    rows = _require_header(_split_comments(_open_rows(path))[1], ["i", "j", "re", "im"], path)
    if not rows:
        raise FileFormatError(f"{path}: empty propagator table")
    n = int(round(len(rows) ** 0.5))
    if n * n != len(rows):
        raise FileFormatError(f"{path}: {len(rows)} entries do not form a square matrix")
    u = np.zeros((n, n), dtype=np.complex128)
    seen = np.zeros((n, n), dtype=bool)
    for row in rows:
        i, j = int(row[0]), int(row[1])
        if not (0 <= i < n and 0 <= j < n) or seen[i, j]:
            raise FileFormatError(f"{path}: bad or duplicate index ({i}, {j})")
        u[i, j] = float(row[2]) + 1j * float(row[3])
        seen[i, j] = True
    return u


# ---------------------------------------------------------------- systems

def _matrix_to_json(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _matrix_from_json(data, dim: int, what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.shape != (dim, dim, 2):
        raise FileFormatError(f"{what} must be a {dim}x{dim} matrix of [re, im] pairs")
    return arr[:, :, 0] + 1j * arr[:, :, 1]


def write_system_json(path, system: ControlSystem) -> None:
    payload = {
        "dim": system.dim,
        "drift": _matrix_to_json(system.drift),
        "controls": [_matrix_to_json(h) for h in system.controls],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_system_json(path) -> ControlSystem:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from exc
    try:
        dim = int(payload["dim"])
        drift = _matrix_from_json(payload["drift"], dim, "drift")
        controls = tuple(
            _matrix_from_json(c, dim, f"controls[{i}]")
            for i, c in enumerate(payload["controls"])
        )
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"{path}: missing or malformed field ({exc})") from exc
    if not controls:
        raise FileFormatError(f"{path}: at least one control matrix is required")
    return ControlSystem(drift=drift, controls=controls)


# --------------------------------------------------------------- benchmark

BENCHMARK_HEADER = ["run", "scheme", "iterations", "final_J", "wall_seconds", "converged"]


def write_benchmark_csv(path, rows) -> None:
    """Benchmark rows; accepts any iterable of BenchmarkRow-like objects."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(BENCHMARK_HEADER)
        for r in rows:
            writer.writerow(
                [str(r.run), r.scheme, str(r.iterations), _fmt(r.final_j),
                 _fmt(r.wall_seconds), str(int(r.converged))]
            )


def read_benchmark_csv(path):
    from .grape import BenchmarkRow

    rows = _require_header(_split_comments(_open_rows(path))[1], BENCHMARK_HEADER, path)
    out = []
    for row in rows:
        if len(row) != 6:
            raise FileFormatError(f"{path}: malformed benchmark row {row}")
        out.append(
            BenchmarkRow(
                run=int(row[0]), scheme=row[1], iterations=int(row[2]),
                final_j=float(row[3]), wall_seconds=float(row[4]),
                converged=bool(int(row[5])),
            )
        )
    return out


# ------------------------------------------------------------ optimization

def write_trace_csv(path, trace) -> None:
    """Objective trace as ``iteration,objective`` rows (iteration 0 = start)."""
    trace = np.asarray(trace, dtype=float)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "objective"])
        for i, value in enumerate(trace):
            writer.writerow([str(i), _fmt(value)])


def read_trace_csv(path) -> np.ndarray:
    rows = _require_header(
        _split_comments(_open_rows(path))[1], ["iteration", "objective"], path
    )
    if not rows:
        raise FileFormatError(f"{path}: empty trace")
    return np.array([float(r[1]) for r in rows])


# -------------------------------------------------------------- cost grids

def write_gamma_grid_csv(path, grid: GammaGrid) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["N", "p", "gamma"])
        for i, n in enumerate(grid.dims):
            for j, p in enumerate(grid.orders):
                writer.writerow([str(int(n)), str(int(p)), _fmt(grid.values[i, j])])


def read_gamma_grid_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (N, p, gamma) columns as flat arrays."""
    rows = _require_header(_split_comments(_open_rows(path))[1], ["N", "p", "gamma"], path)
    if not rows:
        raise FileFormatError(f"{path}: empty grid")
    data = [(int(r[0]), int(r[1]), float(r[2])) for r in rows]
    n, p, g = map(np.asarray, zip(*data))
    return n, p, g


def write_contour_csv(path, dims, boundary) -> None:
    """Equal-cost boundary ``N,p_boundary`` (blank cell where undefined)."""
    dims = np.asarray(dims)
    boundary = np.asarray(boundary, dtype=float)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["N", "p_boundary"])
        for n, b in zip(dims, boundary):
            writer.writerow([str(int(n)), "" if np.isnan(b) else _fmt(b)])


def read_contour_csv(path) -> tuple[np.ndarray, np.ndarray]:
    rows = _require_header(_split_comments(_open_rows(path))[1], ["N", "p_boundary"], path)
    if not rows:
        raise FileFormatError(f"{path}: empty contour")
    dims = np.array([int(r[0]) for r in rows])
    boundary = np.array([float(r[1]) if len(r) > 1 and r[1] != "" else np.nan for r in rows])
    return dims, boundary
