"""Pulse-width modulation of control fields.

A continuous control field ``u_k(t)`` on ``[0, M*tau]`` is replaced by a
train of rectangular pulses, one per subinterval of length ``tau``.  The
pulse in subinterval ``m`` (1-based) is centred at ``t_m = (m - 1/2)*tau``,
has fixed amplitude ``+xi_k`` or ``-xi_k``, and a signed width

    w_k(m) = (1/xi_k) * integral of u_k over subinterval m

chosen so the pulse area matches the field area on that subinterval.  The
mismatch between the pulse train and the field then lives entirely above the
cutoff frequency ``(M - 1) * omega_min`` where ``omega_min = 2*pi / (M*tau)``,
so a low-pass filter (or any system with bounded bandwidth) cannot tell the
two apart to leading order.

Sampled data uses a midpoint grid throughout: sample ``j`` holds the value
at ``(j + 1/2) * dt`` and represents the cell ``[j*dt, (j+1)*dt]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AmplitudeBoundError",
    "CutoffError",
    "GridError",
    "PWMSequence",
    "SampledField",
    "Spectrum",
    "default_amplitudes",
    "dominant_peaks",
    "gaussian_train",
    "inverse_pwm_pwc",
    "lowpass_reconstruct",
    "pulse_count_for_cutoff",
    "pwm_approximate",
    "pwm_signal",
    "spectrum",
]


class GridError(ValueError):
    """Sample grid and subinterval length are incommensurate."""


class AmplitudeBoundError(ValueError):
    """A pulse amplitude is too small to fit the field area into one subinterval."""


class CutoffError(ValueError):
    """Low-pass cutoff is outside the resolvable band of the sample grid."""


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampledField:
    """Real control fields sampled on a uniform midpoint grid.

    ``values[k, j]`` is ``u_k`` at time ``(j + 1/2) * dt``.  The field is
    treated as piecewise constant on the cells ``[j*dt, (j+1)*dt]`` and zero
    outside ``[0, duration]``.
    """

    dt: float
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.atleast_2d(np.array(self.values, dtype=np.float64, copy=True))
        if values.ndim != 2 or values.shape[1] < 1:
            raise ValueError(f"values must be a K x S array, got shape {values.shape}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", _lock(values))

    @property
    def n_controls(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    @property
    def duration(self) -> float:
        return self.n_samples * self.dt

    @property
    def times(self) -> np.ndarray:
        """Midpoint sample times ``(j + 1/2) * dt``."""
        return (np.arange(self.n_samples) + 0.5) * self.dt

    def value(self, t) -> np.ndarray:
        """Piecewise-constant interpolant at time(s) ``t``, zero outside the domain.

        Returns shape ``(K,)`` for scalar ``t`` and ``(K, len(t))`` otherwise.
        """
        t_arr = np.asarray(t, dtype=np.float64)
        cells = np.clip((t_arr / self.dt).astype(np.int64), 0, self.n_samples - 1)
        out = self.values[:, cells]
        inside = (t_arr >= 0.0) & (t_arr <= self.duration)
        return np.where(inside, out, 0.0) if out.ndim > 1 else (
            out if inside else np.zeros(self.n_controls)
        )

    def _antiderivative(self, t: float) -> np.ndarray:
        """Exact integral of the interpolant from 0 to ``t`` (clamped to the domain)."""
        t_c = min(max(t, 0.0), self.duration)
        cell = min(int(t_c / self.dt), self.n_samples - 1)
        cum = getattr(self, "_cum", None)
        if cum is None:
            cum = np.concatenate(
                [np.zeros((self.n_controls, 1)), np.cumsum(self.values, axis=1) * self.dt],
                axis=1,
            )
            object.__setattr__(self, "_cum", cum)
        return cum[:, cell] + self.values[:, cell] * (t_c - cell * self.dt)

    def integral(self, a: float, b: float) -> np.ndarray:
        """Signed exact integral of the interpolant over ``[a, b]``, per control."""
        return self._antiderivative(b) - self._antiderivative(a)


@dataclass(frozen=True, eq=False)
class PWMSequence:
    """Rectangular pulse train: one signed width per control per subinterval.

    ``widths[k, m-1]`` is the signed width of the pulse of control ``k`` in
    subinterval ``m``; the realized amplitude is ``xi_k * sign(width)`` and
    ``|width| <= tau`` always.
    """

    tau: float
    amplitudes: np.ndarray
    widths: np.ndarray

    def __post_init__(self) -> None:
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive and finite, got {self.tau}")
        xi = np.atleast_1d(np.array(self.amplitudes, dtype=np.float64, copy=True))
        widths = np.atleast_2d(np.array(self.widths, dtype=np.float64, copy=True))
        if xi.ndim != 1 or widths.shape[0] != xi.shape[0]:
            raise ValueError(
                f"amplitudes {xi.shape} and widths {widths.shape} disagree on K"
            )
        if not np.all(np.isfinite(xi)) or np.any(xi <= 0):
            raise ValueError("amplitudes must be positive and finite")
        if not np.all(np.isfinite(widths)):
            raise ValueError("widths must be finite")
        overflow = np.abs(widths) > self.tau * (1 + 1e-9)
        if np.any(overflow):
            k, m = np.argwhere(overflow)[0]
            raise ValueError(
                f"|width| = {abs(widths[k, m]):.6g} exceeds tau = {self.tau:.6g} "
                f"for control k={k}, subinterval m={m + 1}"
            )
        object.__setattr__(self, "amplitudes", _lock(xi))
        object.__setattr__(self, "widths", _lock(widths))

    @property
    def n_controls(self) -> int:
        return self.widths.shape[0]

    @property
    def n_pulses(self) -> int:
        """Number of subintervals M."""
        return self.widths.shape[1]

    @property
    def duration(self) -> float:
        return self.n_pulses * self.tau

    @property
    def centers(self) -> np.ndarray:
        """Pulse centre times ``(m - 1/2) * tau`` for m = 1..M."""
        return (np.arange(self.n_pulses) + 0.5) * self.tau


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided discrete spectrum of a real sampled signal.

    ``magnitude[i]`` is the amplitude at angular frequency ``omega[i]``,
    normalized so a unit sinusoid at an on-grid frequency has magnitude 1;
    ``phase`` follows the sine convention ``pi - arg(amp)``.  Magnitude and
    phase are the stored representation (so files holding them round-trip
    losslessly); the complex amplitude is a derived view.
    """

    omega: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray
    duration: float
    n_samples: int | None = None

    def __post_init__(self) -> None:
        omega = np.array(self.omega, dtype=np.float64, copy=True)
        mag = np.array(self.magnitude, dtype=np.float64, copy=True)
        phase = np.array(self.phase, dtype=np.float64, copy=True)
        if not (omega.shape == mag.shape == phase.shape) or omega.ndim != 1:
            raise ValueError(
                "omega, magnitude, and phase must be 1-D arrays of equal length"
            )
        if np.any(mag < 0):
            raise ValueError("magnitude must be non-negative")
        # an S-sample signal yields S//2 + 1 one-sided bins; S itself is not
        # recoverable from the bins (S and S+1 give the same count for even
        # S), so it is carried explicitly.  Default: even count.
        n_samples = self.n_samples
        if n_samples is None:
            n_samples = 2 * (omega.size - 1) if omega.size > 1 else 1
        n_samples = int(n_samples)
        if n_samples // 2 + 1 != omega.size:
            raise ValueError(
                f"{n_samples} samples produce {n_samples // 2 + 1} one-sided "
                f"bins, got {omega.size}"
            )
        object.__setattr__(self, "omega", _lock(omega))
        object.__setattr__(self, "magnitude", _lock(mag))
        object.__setattr__(self, "phase", _lock(phase))
        object.__setattr__(self, "n_samples", n_samples)

    @classmethod
    def from_complex(cls, omega, amp, duration: float, n_samples: int | None = None) -> "Spectrum":
        amp = np.asarray(amp, dtype=np.complex128)
        return cls(
            omega=omega,
            magnitude=np.abs(amp),
            phase=np.pi - np.angle(amp),
            duration=duration,
            n_samples=n_samples,
        )

    @property
    def amp(self) -> np.ndarray:
        """Complex amplitudes reconstructed from magnitude and phase."""
        return self.magnitude * np.exp(1j * (np.pi - self.phase))

    def energy(self) -> float:
        """Signal energy ``integral of u^2 dt`` implied by the normalization.

        Interior one-sided bins carry half their squared magnitude (the other
        half sits at the mirrored negative frequency); the DC bin and, for an
        even sample count, the Nyquist bin carry full weight.
        """
        mag2 = self.magnitude**2
        weights = np.full_like(mag2, 0.5)
        weights[0] = 1.0
        if self.omega.size > 1 and self.n_samples % 2 == 0:
            weights[-1] = 1.0  # even sample count: last bin is the Nyquist bin
        return float(self.duration * np.sum(weights * mag2))


def pulse_count_for_cutoff(cutoff: float, omega_min: float) -> int:
    """Smallest subinterval count M with error pushed above ``cutoff``.

    The pulse train differs from the field only at frequencies at and above
    ``(M - 1) * omega_min``, so ``M = ceil(cutoff / omega_min) + 1``.
    """
    if cutoff <= 0 or omega_min <= 0:
        raise ValueError("cutoff and omega_min must be positive")
    return math.ceil(cutoff / omega_min) + 1


def default_amplitudes(field: SampledField, headroom: float = 1.05) -> np.ndarray:
    """Per-control pulse amplitudes ``headroom * max_t |u_k(t)|``.

    A control that is identically zero gets amplitude 1.0 (any positive value
    works: its widths are all zero).
    """
    peak = np.max(np.abs(field.values), axis=1)
    xi = headroom * peak
    xi[xi == 0.0] = 1.0
    return xi


def pwm_approximate(field: SampledField, amplitudes, tau: float) -> PWMSequence:
    """Convert a sampled field to a PWM pulse sequence with subinterval ``tau``.

    Widths are the exact per-subinterval areas of the piecewise-constant
    field divided by ``xi_k``.  ``tau`` must be an integer multiple of the
    sample spacing and the field duration an integer multiple of ``tau``.

    Raises
    ------
    GridError
        If the grids are incommensurate.
    AmplitudeBoundError
        If some ``|width|`` would exceed ``tau`` (amplitude too small).
    """
    xi = np.atleast_1d(np.asarray(amplitudes, dtype=np.float64))
    if xi.size == 1:
        xi = np.full(field.n_controls, xi[0])
    if xi.shape != (field.n_controls,):
        raise ValueError(f"expected {field.n_controls} amplitudes, got {xi.shape}")
    if np.any(xi <= 0) or not np.all(np.isfinite(xi)):
        raise ValueError("amplitudes must be positive and finite")

    ratio = tau / field.dt
    n_per = round(ratio)
    if n_per < 1 or abs(ratio - n_per) > 1e-9 * max(1.0, ratio):
        raise GridError(
            f"tau = {tau!r} is not an integer multiple of the sample spacing {field.dt!r}"
        )
    if field.n_samples % n_per:
        raise GridError(
            f"field duration ({field.n_samples} samples) is not an integer "
            f"number of subintervals of {n_per} samples"
        )
    m_count = field.n_samples // n_per
    areas = field.values.reshape(field.n_controls, m_count, n_per).sum(axis=2) * field.dt
    widths = areas / xi[:, None]
    overflow = np.abs(widths) > tau * (1 + 1e-9)
    if np.any(overflow):
        k, m = np.argwhere(overflow)[0]
        raise AmplitudeBoundError(
            f"amplitude xi_{k} = {xi[k]:.6g} too small: subinterval m={m + 1} needs "
            f"|width| = {abs(widths[k, m]):.6g} > tau = {tau:.6g}"
        )
    return PWMSequence(tau=tau, amplitudes=xi, widths=widths)


def _signal_grid(seq: PWMSequence, sample_rate: float) -> tuple[float, np.ndarray]:
    if sample_rate * seq.tau < 10:
        raise ValueError(
            f"sample_rate * tau = {sample_rate * seq.tau:.3g} < 10; "
            "the grid cannot resolve individual pulses"
        )
    n_sub = round(sample_rate * seq.tau)
    dt = seq.tau / n_sub
    times = (np.arange(seq.n_pulses * n_sub) + 0.5) * dt
    return dt, times


def pwm_signal(seq: PWMSequence, control_index: int = 0, sample_rate: float = 1000.0) -> SampledField:
    """Sample the rectangular pulse train of one control.

    Within subinterval ``m`` the signal is ``xi * sign(w)`` for
    ``|t - t_m| <= |w|/2`` and zero elsewhere; a sample landing exactly on a
    pulse edge takes the pulse value.  The grid is chosen commensurate with
    the subintervals (``round(sample_rate * tau)`` samples per subinterval).
    """
    xi = seq.amplitudes[control_index]
    widths = seq.widths[control_index]
    dt, times = _signal_grid(seq, sample_rate)
    out = np.zeros_like(times)
    for m, (center, w) in enumerate(zip(seq.centers, widths)):
        if w == 0.0:
            continue
        mask = np.abs(times - center) <= abs(w) / 2
        out[mask] = xi * np.sign(w)
    return SampledField(dt=dt, values=out[None, :])


def gaussian_train(seq: PWMSequence, control_index: int = 0, sample_rate: float = 1000.0) -> SampledField:
    """Sample a Gaussian pulse train equivalent to the rectangular one.

    Each pulse is ``xi * sign(w) * exp(-pi (t - t_m)^2 / w^2)``: same peak
    amplitude and the same full-line area ``xi * |w|`` as the rectangular
    pulse.  Tails are truncated at ``|t - t_m| > 6 |w|`` where they are
    below ``exp(-36 pi)``.
    """
    xi = seq.amplitudes[control_index]
    widths = seq.widths[control_index]
    dt, times = _signal_grid(seq, sample_rate)
    out = np.zeros_like(times)
    for center, w in zip(seq.centers, widths):
        if w == 0.0:
            continue
        lo, hi = np.searchsorted(times, [center - 6 * abs(w), center + 6 * abs(w)])
        t_win = times[lo:hi]
        out[lo:hi] += xi * np.sign(w) * np.exp(-np.pi * (t_win - center) ** 2 / w**2)
    return SampledField(dt=dt, values=out[None, :])


def inverse_pwm_pwc(seq: PWMSequence) -> SampledField:
    """Piecewise-constant field with the same per-subinterval areas.

    Emits one sample per subinterval: ``u_k = xi_k * w_k / tau``.  Feeding
    the result back through :func:`pwm_approximate` with the same ``xi`` and
    ``tau`` reproduces the widths exactly.
    """
    values = seq.amplitudes[:, None] * seq.widths / seq.tau
    return SampledField(dt=seq.tau, values=values)


def lowpass_reconstruct(field: SampledField, cutoff: float) -> SampledField:
    """Zero every DFT bin with ``|omega| > cutoff`` and transform back.

    This is the sharp low-pass filter that recovers the original field from
    a PWM signal when ``cutoff`` lies below the first error band.
    """
    nyquist = np.pi / field.dt
    if not (0 < cutoff < nyquist):
        raise CutoffError(
            f"cutoff {cutoff:.6g} must lie in (0, {nyquist:.6g}) for this grid"
        )
    omega = 2 * np.pi * np.fft.rfftfreq(field.n_samples, field.dt)
    coeff = np.fft.rfft(field.values, axis=1)
    coeff[:, omega > cutoff] = 0.0
    values = np.fft.irfft(coeff, n=field.n_samples, axis=1)
    return SampledField(dt=field.dt, values=values)


def spectrum(field: SampledField, control_index: int = 0) -> Spectrum:
    """One-sided DFT spectrum of one control, on the midpoint time grid.

    Normalization: a unit-amplitude sinusoid at an on-grid frequency yields
    magnitude 1 at its bin.  Phases refer to the actual sample times, so the
    half-cell offset of the midpoint grid is compensated.
    """
    x = field.values[control_index]
    s = field.n_samples
    omega = 2 * np.pi * np.fft.rfftfreq(s, field.dt)
    coeff = np.fft.rfft(x) / s
    coeff = coeff * np.exp(-1j * omega * field.dt / 2)
    scale = np.full(omega.shape, 2.0)
    scale[0] = 1.0
    if s % 2 == 0:
        scale[-1] = 1.0
    return Spectrum.from_complex(
        omega=omega, amp=scale * coeff, duration=field.duration, n_samples=s
    )


def dominant_peaks(spec: Spectrum, count: int = 2) -> list[tuple[float, float]]:
    """Largest local maxima of the magnitude spectrum, strongest first.

    Returns ``count`` pairs ``(omega, magnitude)``; endpoints (DC, Nyquist)
    are not eligible.
    """
    mag = spec.magnitude
    interior = np.arange(1, mag.size - 1)
    is_peak = (mag[interior] > mag[interior - 1]) & (mag[interior] >= mag[interior + 1])
    peaks = interior[is_peak]
    ranked = peaks[np.argsort(mag[peaks])[::-1][:count]]
    return [(float(spec.omega[i]), float(mag[i])) for i in ranked]
