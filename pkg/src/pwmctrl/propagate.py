"""Time-dependent Schrodinger propagators for PWM pulse sequences.

The bang-bang Hamiltonian inside one subinterval only ever takes values from
the finite set ``{H0 + sum_k delta_k xi_k H_k : delta_k in {0, +1, -1}}``.
Overlapping the pulses symmetrically about the subinterval centre turns the
subinterval propagator into a palindromic product

    U = e^{-i tau_0 G_0} e^{-i tau_1 G_1} ... e^{-i tau_J G_J} ... e^{-i tau_1 G_1} e^{-i tau_0 G_0}

where ``G_0 = H0``, ``G_j = G_{j-1} + delta_j xi_j H_{k_j}`` adds the pulses
one by one in decreasing order of width, and the dwell times ``tau_j`` are
fixed linear functions of the sorted widths.  Every factor needs only the
eigendecomposition of one member of the finite set, so all matrix
diagonalizations can be cached and reused across subintervals -- that is the
speed advantage over piecewise-constant stepping, which diagonalizes a fresh
Hamiltonian every subinterval.

Fields are accepted either as :class:`~pwmctrl.pwm.SampledField` (integrated
exactly as piecewise-constant data) or as a smooth callable ``u(t)``
returning a scalar (one control) or a length-K sequence; callables are
integrated by Gauss-Legendre quadrature and are the right choice for
high-order stepping, whose sub-windows reach slightly outside the nominal
subinterval.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .model import ControlSystem
from .pwm import PWMSequence, SampledField, pwm_approximate

__all__ = [
    "ErrorOrderFit",
    "HamiltonianCache",
    "PulseFrame",
    "TermCache",
    "build_frame",
    "error_order",
    "evolve",
    "expm_hermitian",
    "frame_from_widths",
    "frobenius_distance",
    "pwm_step_factors",
    "reference_propagator",
    "step_pwc",
    "step_pwm",
    "step_pwm_higher",
    "step_spo",
    "suzuki_coefficient",
    "unitarity_defect",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def expm_hermitian(matrix: np.ndarray, theta: float) -> np.ndarray:
    """``exp(-i * theta * H)`` for Hermitian ``H`` via eigendecomposition."""
    h = np.asarray(matrix, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if float(np.max(np.abs(h - h.conj().T))) > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    lam, basis = np.linalg.eigh(h)
    return (basis * np.exp(-1j * theta * lam)) @ basis.conj().T


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of ``U^dag U - I``."""
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def _as_amplitudes(amplitudes, n_controls: int) -> np.ndarray:
    xi = np.atleast_1d(np.asarray(amplitudes, dtype=np.float64))
    if xi.size == 1:
        xi = np.full(n_controls, xi[0])
    if xi.shape != (n_controls,):
        raise ValueError(f"expected {n_controls} amplitudes, got shape {xi.shape}")
    if np.any(xi <= 0) or not np.all(np.isfinite(xi)):
        raise ValueError("amplitudes must be positive and finite")
    return xi


class HamiltonianCache:
    """Lazily filled eigendecompositions of the signed cumulative Hamiltonians.

    Entries are keyed by the *set* of signed active controls
    ``{(k, delta_k)}`` -- the cumulative sum does not depend on the order in
    which pulses were added -- so at most ``3^K`` entries ever exist.  Reads
    are lock-free; insertion happens under a lock, and because every entry is
    computed deterministically from the key, concurrent duplicate computation
    is harmless.
    """

    def __init__(self, system: ControlSystem, amplitudes) -> None:
        self.system = system
        self.amplitudes = _as_amplitudes(amplitudes, system.n_controls)
        self._entries: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def hamiltonian(self, prefix) -> np.ndarray:
        """The matrix ``H0 + sum_{(k, delta) in prefix} delta * xi_k * H_k``."""
        h = self.system.drift.copy()
        for k, delta in prefix:
            h = h + delta * self.amplitudes[k] * self.system.controls[k]
        return h

    def entry(self, prefix) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvector matrix for one cumulative Hamiltonian."""
        key = tuple(sorted(prefix))
        found = self._entries.get(key)
        if found is None:
            lam, basis = np.linalg.eigh(self.hamiltonian(key))
            with self._lock:
                found = self._entries.setdefault(key, (lam, basis))
        return found

    def factor(self, prefix, theta: float) -> np.ndarray:
        """``exp(-i * theta * G_prefix)`` assembled from the cached entry."""
        lam, basis = self.entry(prefix)
        return (basis * np.exp(-1j * theta * lam)) @ basis.conj().T

    def factors(self, prefix, thetas: np.ndarray) -> np.ndarray:
        """Stacked ``exp(-i * theta_m * G_prefix)`` for a batch of angles."""
        lam, basis = self.entry(prefix)
        phases = np.exp(-1j * np.outer(thetas, lam))
        return (basis[None, :, :] * phases[:, None, :]) @ basis.conj().T

    @property
    def size(self) -> int:
        return len(self._entries)


class TermCache:
    """Eigendecompositions of the drift and each control Hamiltonian alone.

    Used by the split-operator scheme, whose factors are single-term
    exponentials with a per-step scalar in the exponent.
    """

    def __init__(self, system: ControlSystem) -> None:
        self.system = system
        self._entries: dict[int | None, tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def entry(self, index: int | None) -> tuple[np.ndarray, np.ndarray]:
        """Eigendecomposition of the drift (``None``) or control ``index``."""
        found = self._entries.get(index)
        if found is None:
            h = self.system.drift if index is None else self.system.controls[index]
            lam, basis = np.linalg.eigh(h)
            with self._lock:
                found = self._entries.setdefault(index, (lam, basis))
        return found

    def factor(self, index: int | None, theta: float) -> np.ndarray:
        lam, basis = self.entry(index)
        return (basis * np.exp(-1j * theta * lam)) @ basis.conj().T


@dataclass(frozen=True, eq=False)
class PulseFrame:
    """Sorted layout of one subinterval's pulses and the resulting dwell times.

    ``order`` lists the active (nonzero-width) control indices sorted by
    decreasing ``|w|`` (ties broken by ascending index); ``signs[k]`` is
    ``sign(w_k)`` for every control, 0 if inactive.  ``dwell`` has
    ``len(order) + 1`` entries: every entry but the last is applied twice
    (symmetrically), the last entry once at the centre, so

        2 * (dwell[0] + ... + dwell[-2]) + dwell[-1] == tau.

    With no active pulses ``dwell`` is the single entry ``(tau,)``.
    """

    tau: float
    widths: np.ndarray
    order: tuple[int, ...]
    signs: tuple[int, ...]
    dwell: np.ndarray

    def active_durations(self) -> np.ndarray:
        """Total time each control in ``order`` is switched on; equals ``|w|``."""
        d = self.dwell
        out = np.empty(len(self.order))
        for pos in range(len(self.order)):
            out[pos] = 2 * float(np.sum(d[pos + 1 : -1])) + float(d[-1])
        return out

    def prefixes(self) -> list[tuple]:
        """Cache keys of the cumulative Hamiltonians, one per dwell entry."""
        keys: list[tuple] = []
        acc: list[tuple[int, int]] = []
        keys.append(())
        for k in self.order:
            acc.append((k, self.signs[k]))
            keys.append(tuple(sorted(acc)))
        return keys


def frame_from_widths(
    widths, tau: float, *, keep_zero_widths: bool = False
) -> PulseFrame:
    """Sort one subinterval's signed widths into a :class:`PulseFrame`.

    ``keep_zero_widths`` retains zero-width pulses in the order with sign
    ``+1`` (they contribute identity factors); gradient code uses this so
    every control has a definite position and a one-sided derivative at 0.
    """
    w = np.atleast_1d(np.asarray(widths, dtype=np.float64))
    if w.ndim != 1:
        raise ValueError("widths must be one-dimensional")
    if not np.all(np.isfinite(w)):
        raise ValueError("widths must be finite")
    if np.any(np.abs(w) > tau * (1 + 1e-9)):
        k = int(np.argmax(np.abs(w)))
        raise ValueError(
            f"|width| = {abs(w[k]):.6g} of control k={k} exceeds tau = {tau:.6g}"
        )
    signs = [0 if x == 0.0 else (1 if x > 0 else -1) for x in w]
    if keep_zero_widths:
        signs = [s if s else 1 for s in signs]
        active = list(range(w.size))
    else:
        active = [k for k in range(w.size) if w[k] != 0.0]
    # descending |w|; ties broken by ascending control index
    order = tuple(sorted(active, key=lambda k: (-abs(w[k]), k)))
    if not order:
        dwell = np.array([tau])
    else:
        sorted_abs = np.abs(w[list(order)])
        dwell = np.empty(len(order) + 1)
        dwell[0] = (tau - sorted_abs[0]) / 2
        dwell[1:-1] = (sorted_abs[:-1] - sorted_abs[1:]) / 2
        dwell[-1] = sorted_abs[-1]
    return PulseFrame(
        tau=tau, widths=_locked(w), order=order, signs=tuple(signs), dwell=_locked(dwell)
    )


def _locked(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_frame(seq: PWMSequence, m: int) -> PulseFrame:
    """Frame for subinterval ``m`` (1-based) of a pulse sequence."""
    if not 1 <= m <= seq.n_pulses:
        raise ValueError(f"subinterval index m={m} outside 1..{seq.n_pulses}")
    return frame_from_widths(seq.widths[:, m - 1], seq.tau)


def pwm_step_factors(
    system: ControlSystem,
    amplitudes,
    frame: PulseFrame,
    cache: HamiltonianCache | None = None,
) -> list[np.ndarray]:
    """The full palindromic factor list of one PWM step, left to right.

    ``step_pwm`` is the ordered product of this list; reversing the list
    leaves the product unchanged.
    """
    if cache is None:
        cache = HamiltonianCache(system, amplitudes)
    prefixes = frame.prefixes()
    inner = [cache.factor(p, th) for p, th in zip(prefixes, frame.dwell)]
    return inner[:-1] + [inner[-1]] + inner[-2::-1]


def step_pwm(
    system: ControlSystem,
    amplitudes,
    frame: PulseFrame,
    cache: HamiltonianCache | None = None,
) -> np.ndarray:
    """Second-order PWM propagator for one subinterval."""
    factors = pwm_step_factors(system, amplitudes, frame, cache)
    u = factors[0]
    for f in factors[1:]:
        u = u @ f
    return u


def step_pwc(system: ControlSystem, control_values, tau: float) -> np.ndarray:
    """Piecewise-constant propagator ``exp(-i tau H(t_mid))`` for one subinterval."""
    u_mid = np.atleast_1d(np.asarray(control_values, dtype=np.float64))
    if u_mid.shape != (system.n_controls,):
        raise ValueError(f"expected {system.n_controls} control values")
    h = system.drift.copy()
    for k in range(system.n_controls):
        h = h + u_mid[k] * system.controls[k]
    return expm_hermitian(h, tau)


def step_spo(
    system: ControlSystem,
    control_values,
    tau: float,
    cache: TermCache | None = None,
) -> np.ndarray:
    """Symmetric split-operator (Strang) propagator for one subinterval.

    Half-steps of each term are applied in ascending then descending order,
    with the control amplitudes frozen at their subinterval-midpoint values:

        U = prod_{k=0..K} e^{-i (tau/2) u_k H_k} * prod_{k=K..0} e^{-i (tau/2) u_k H_k}

    where ``u_0 = 1`` multiplies the drift.
    """
    u_mid = np.atleast_1d(np.asarray(control_values, dtype=np.float64))
    if u_mid.shape != (system.n_controls,):
        raise ValueError(f"expected {system.n_controls} control values")
    if cache is None:
        cache = TermCache(system)
    half = tau / 2
    ascending = [cache.factor(None, half)]
    ascending += [cache.factor(k, half * u_mid[k]) for k in range(system.n_controls)]
    u = ascending[0]
    for f in ascending[1:]:
        u = u @ f
    for f in reversed(ascending):
        u = u @ f
    return u


def suzuki_coefficient(n: int) -> float:
    """Composition coefficient ``s`` for raising order 2n-2 to 2n.

    The real odd root gives ``s = 1 / (2 - 2^(1/(2n-1)))``, the unique real
    solution of ``2 s^(2n-1) + (1 - 2s)^(2n-1) = 0`` with ``s > 1``.
    """
    if n < 2:
        raise ValueError(f"order index n must be >= 2, got {n}")
    return 1.0 / (2.0 - 2.0 ** (1.0 / (2 * n - 1)))


def _field_values(field, times, n_controls: int) -> np.ndarray:
    """Field samples as a (K, len(times)) array; accepts data or a callable."""
    times = np.asarray(times, dtype=np.float64)
    if isinstance(field, SampledField):
        if field.n_controls != n_controls:
            raise ValueError(
                f"field has {field.n_controls} controls, system has {n_controls}"
            )
        return np.atleast_2d(field.value(times))
    out = np.empty((n_controls, times.size))
    for j, t in enumerate(times.ravel()):
        v = np.atleast_1d(np.asarray(field(float(t)), dtype=np.float64))
        if v.shape != (n_controls,):
            raise ValueError(
                f"field callable returned shape {v.shape}, expected ({n_controls},)"
            )
        out[:, j] = v
    return out


def _field_integral(field, a: float, b: float, n_controls: int) -> np.ndarray:
    """Signed integral of each control over [a, b].

    Exact for :class:`SampledField` (piecewise-constant data, zero outside
    its domain); 64-node Gauss-Legendre for callables, which is effectively
    exact for smooth fields on subinterval-sized windows.
    """
    if isinstance(field, SampledField):
        if field.n_controls != n_controls:
            raise ValueError(
                f"field has {field.n_controls} controls, system has {n_controls}"
            )
        return field.integral(a, b)
    half = (b - a) / 2
    mid = (a + b) / 2
    values = _field_values(field, mid + half * _GL_NODES, n_controls)
    return (values @ _GL_WEIGHTS) * half


def step_pwm_higher(
    system: ControlSystem,
    amplitudes,
    source,
    m: int,
    n: int,
    tau: float | None = None,
    cache: HamiltonianCache | None = None,
) -> np.ndarray:
    """Order-2n PWM propagator for subinterval ``m`` by Suzuki composition.

    Each recursion level splits the window into three sub-windows of signed
    lengths ``s*tau``, ``(1-2s)*tau``, ``s*tau``; since ``s > 1`` the middle
    one runs backwards and the outer ones overshoot the nominal subinterval.
    With a field source (``SampledField`` or callable) the widths of every
    sub-window are re-integrated from the field, which preserves the full
    order; with only a :class:`PWMSequence` the stored widths are scaled
    proportionally to the sub-window length, a cruder variant that no longer
    sees intra-subinterval field variation.  Backward sub-windows are
    propagated by the exact inverse (conjugate transpose) of the forward
    step, i.e. all dwell phases change sign.
    """
    if n < 2:
        raise ValueError(f"order index n must be >= 2, got {n}")
    if isinstance(source, PWMSequence):
        if tau is None:
            tau = source.tau
        elif not math.isclose(tau, source.tau, rel_tol=1e-12):
            raise ValueError("tau disagrees with the sequence subinterval")
        if not 1 <= m <= source.n_pulses:
            raise ValueError(f"subinterval index m={m} outside 1..{source.n_pulses}")
        base_widths = source.widths[:, m - 1]
        field = None
    else:
        if tau is None:
            raise ValueError("tau is required with a field source")
        base_widths = None
        field = source
    if cache is None:
        cache = HamiltonianCache(system, amplitudes)
    return _compose_window(system, cache, field, base_widths, tau, (m - 1) * tau, tau, n)


def _compose_window(
    system: ControlSystem,
    cache: HamiltonianCache,
    field,
    base_widths,
    tau: float,
    a: float,
    sigma: float,
    level: int,
) -> np.ndarray:
    """Suzuki triple-jump recursion over the signed window ``[a, a + sigma]``."""
    if level == 1:
        length = abs(sigma)
        if length == 0.0:
            return np.eye(system.dim, dtype=np.complex128)
        xi = cache.amplitudes
        if field is None:
            w_forward = base_widths * (length / tau)
        else:
            lo, hi = (a, a + sigma) if sigma > 0 else (a + sigma, a)
            w_forward = _field_integral(field, lo, hi, system.n_controls) / xi
        u = step_pwm(system, xi, frame_from_widths(w_forward, length), cache)
        return u if sigma > 0 else u.conj().T
    s = suzuki_coefficient(level)
    args = (system, cache, field, base_widths, tau)
    first = _compose_window(*args, a, s * sigma, level - 1)
    middle = _compose_window(*args, a + s * sigma, (1 - 2 * s) * sigma, level - 1)
    last = _compose_window(*args, a + (1 - s) * sigma, s * sigma, level - 1)
    return last @ middle @ first


def reference_propagator(
    system: ControlSystem, field, t_start: float, t_end: float, resolution: int = 10_000
) -> np.ndarray:
    """Brute-force reference: ordered product of midpoint-rule exponentials.

    Splits ``[t_start, t_end]`` into ``resolution`` equal slices and applies
    ``exp(-i dt H(t_mid))`` chronologically.  Error falls off as
    ``resolution^-2``; when the field is a :class:`SampledField` whose cell
    boundaries align with the slices, the result is the exact propagator of
    the piecewise-constant field.
    """
    if resolution < 100:
        raise ValueError(f"resolution must be at least 100, got {resolution}")
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    dt = (t_end - t_start) / resolution
    mids = t_start + (np.arange(resolution) + 0.5) * dt
    u_vals = _field_values(field, mids, system.n_controls)
    h = np.broadcast_to(system.drift, (resolution, system.dim, system.dim)).copy()
    h += np.einsum("kr,kab->rab", u_vals, np.stack(system.controls))
    lam, basis = np.linalg.eigh(h)
    steps = (basis * np.exp(-1j * dt * lam)[:, None, :]) @ basis.conj().transpose(0, 2, 1)
    u = np.eye(system.dim, dtype=np.complex128)
    for r in range(resolution):
        u = steps[r] @ u
    return u


def _parse_scheme(scheme: str) -> tuple[str, int | None]:
    name = scheme.lower().strip()
    if name in ("pwc", "spo", "pwm"):
        return name, None
    if name.startswith("pwm"):
        try:
            order = int(name[3:])
        except ValueError:
            raise ValueError(f"unknown scheme {scheme!r}") from None
        if order < 4 or order % 2:
            raise ValueError(f"scheme {scheme!r}: order must be an even integer >= 4")
        return "pwm2n", order // 2
    raise ValueError(f"unknown scheme {scheme!r}")


def evolve(
    system: ControlSystem,
    scheme: str,
    source,
    tau: float | None = None,
    amplitudes=None,
    cache=None,
) -> np.ndarray:
    """Propagator over the full duration of ``source`` under one scheme.

    ``scheme`` is ``"pwc"``, ``"spo"``, ``"pwm"``, or ``"pwm4"``, ``"pwm6"``,
    ... for the Suzuki-composed higher orders.  PWM schemes take a
    :class:`PWMSequence`, or a :class:`SampledField` plus ``amplitudes`` and
    ``tau`` (converted internally).  PWC and split-operator take a
    :class:`SampledField` plus ``tau``; amplitudes are read at subinterval
    midpoints.
    """
    kind, half_order = _parse_scheme(scheme)
    if kind in ("pwc", "spo"):
        if not isinstance(source, SampledField):
            raise ValueError(f"scheme {scheme!r} requires a SampledField input")
        if tau is None:
            raise ValueError(f"scheme {scheme!r} requires tau")
        m_count = round(source.duration / tau)
        if not math.isclose(m_count * tau, source.duration, rel_tol=1e-9):
            raise ValueError("field duration is not an integer number of subintervals")
        mids = (np.arange(m_count) + 0.5) * tau
        u_vals = _field_values(source, mids, system.n_controls)
        term_cache = cache if isinstance(cache, TermCache) else TermCache(system)
        u = np.eye(system.dim, dtype=np.complex128)
        for m in range(m_count):
            if kind == "pwc":
                u = step_pwc(system, u_vals[:, m], tau) @ u
            else:
                u = step_spo(system, u_vals[:, m], tau, term_cache) @ u
        return u

    if isinstance(source, PWMSequence):
        seq = source
        field = None
    else:
        if amplitudes is None or tau is None:
            raise ValueError(f"scheme {scheme!r} with a field input requires amplitudes and tau")
        seq = pwm_approximate(source, amplitudes, tau)
        field = source if kind == "pwm2n" else None
    ham_cache = (
        cache
        if isinstance(cache, HamiltonianCache)
        else HamiltonianCache(system, seq.amplitudes)
    )
    u = np.eye(system.dim, dtype=np.complex128)
    for m in range(1, seq.n_pulses + 1):
        if kind == "pwm":
            step = step_pwm(system, ham_cache.amplitudes, build_frame(seq, m), ham_cache)
        else:
            step = step_pwm_higher(
                system,
                ham_cache.amplitudes,
                field if field is not None else seq,
                m,
                half_order,
                tau=seq.tau,
                cache=ham_cache,
            )
        u = step @ u
    return u


@dataclass(frozen=True)
class ErrorOrderFit:
    """Log-log least-squares fit of single-step error against ``tau``.

    ``saturated`` flags a degenerate fit where every error was at rounding
    level (below 1e-13), in which case ``slope`` is meaningless (NaN).
    """

    scheme: str
    taus: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float
    intercept: float
    saturated: bool


def error_order(
    scheme: str,
    system: ControlSystem,
    field,
    tau_list,
    amplitudes=None,
    resolution: int = 10_000,
    t_start: float = 0.0,
) -> ErrorOrderFit:
    """Measure the local (single-step) error order of a scheme.

    For each ``tau`` the scheme's one-subinterval propagator over
    ``[t_start, t_start + tau]`` is compared in Frobenius norm against
    :func:`reference_propagator`, and a line is fitted to the log-log points.
    PWM schemes require ``amplitudes``.  A smooth callable field is
    recommended: the higher-order scheme integrates sub-windows slightly
    outside the step and a zero-extended sampled field would degrade there.
    """
    kind, half_order = _parse_scheme(scheme)
    if kind in ("pwm", "pwm2n") and amplitudes is None:
        raise ValueError(f"scheme {scheme!r} requires amplitudes")
    xi = None if amplitudes is None else _as_amplitudes(amplitudes, system.n_controls)
    taus = [float(t) for t in tau_list]
    if len(taus) < 2:
        raise ValueError("need at least two tau values to fit a slope")
    errors = []
    for tau in taus:
        ref = reference_propagator(system, field, t_start, t_start + tau, resolution)
        if kind == "pwc":
            u_mid = _field_values(field, [t_start + tau / 2], system.n_controls)[:, 0]
            step = step_pwc(system, u_mid, tau)
        elif kind == "spo":
            u_mid = _field_values(field, [t_start + tau / 2], system.n_controls)[:, 0]
            step = step_spo(system, u_mid, tau)
        else:
            cache = HamiltonianCache(system, xi)
            if kind == "pwm":
                w = _field_integral(field, t_start, t_start + tau, system.n_controls) / xi
                step = step_pwm(system, xi, frame_from_widths(w, tau), cache)
            else:
                step = _compose_window(
                    system, cache, field, None, tau, t_start, tau, half_order
                )
        errors.append(frobenius_distance(step, ref))
    if max(errors) <= 1e-13:
        return ErrorOrderFit(
            scheme=scheme,
            taus=tuple(taus),
            errors=tuple(errors),
            slope=float("nan"),
            intercept=float("nan"),
            saturated=True,
        )
    slope, intercept = np.polyfit(np.log(taus), np.log(errors), 1)
    return ErrorOrderFit(
        scheme=scheme,
        taus=tuple(taus),
        errors=tuple(errors),
        slope=float(slope),
        intercept=float(intercept),
        saturated=False,
    )
