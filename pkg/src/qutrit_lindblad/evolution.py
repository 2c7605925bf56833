"""Time evolution of two-atom states: RK4 integration, exact system II
propagators and the maximal-interference asymptotic map."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lindblad import LindbladGenerator, SystemIIParams, apply, unvec, vec
from .states import (
    STATE_TOL,
    InvalidStateError,
    IsotropicParams,
    PureStateParams,
    check_density_matrix,
    negativity,
    validate_state,
)

__all__ = [
    "PhysicsError",
    "IntegratorSettings",
    "Trajectory",
    "rk4_step",
    "rk4_propagator",
    "evolve_rk4",
    "analytic_II_general",
    "analytic_II_isotropic",
    "negativity_psimax_closed_form",
    "asymptotic_state_max_interference",
    "asymptotic_negativity_pure",
    "asymptotic_isotropic",
    "detect_steady_state",
]


class PhysicsError(RuntimeError):
    """A sampled state left the set of density matrices."""

    def __init__(self, time: float, reasons: list[str]):
        self.time = time
        self.reasons = reasons
        super().__init__(f"invariant breach at t={time:.6g}: " + "; ".join(reasons))


@dataclass(frozen=True)
class IntegratorSettings:
    dt: float = 1e-3
    t_end: float = 10.0
    sample_every: int = 100
    adapt: bool = False
    adapt_tol: float = 1e-10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError(f"sample_every must be a positive integer, got {self.sample_every}")
        if not self.adapt_tol > 0:
            raise ValueError("adapt_tol must be positive")

    @property
    def n_steps(self) -> int:
        n = int(round(self.t_end / self.dt))
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError(f"t_end={self.t_end} is not an integer multiple of dt={self.dt}")
        return n


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    negativities: np.ndarray
    trace_defects: np.ndarray
    min_eigenvalues: np.ndarray
    hermiticity_defects: np.ndarray
    dt_used: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def element(self, i: int, j: int) -> np.ndarray:
        """Time series of the one-based matrix element ``(i, j)``."""
        return self.states[:, i - 1, j - 1]

    def state_at(self, t: float, atol: float = 1e-9) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > atol:
            raise KeyError(f"t={t} is not a sample time")
        return self.states[idx]


def rk4_step(gen: LindbladGenerator, rho, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ``d rho/dt = gen(rho)``."""
    k1 = apply(gen, rho)
    k2 = apply(gen, rho + 0.5 * dt * k1)
    k3 = apply(gen, rho + 0.5 * dt * k2)
    k4 = apply(gen, rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_propagator(gen: LindbladGenerator, dt: float) -> np.ndarray:
    """Matrix of one RK4 step acting on ``vec(rho)``.

    The generator is linear and time independent, so an RK4 step is exactly
    the degree-4 Taylor polynomial of ``exp(dt * S)``.
    """
    hS = dt * gen.superoperator
    eye = np.eye(hS.shape[0], dtype=complex)
    return eye + hS @ (eye + hS @ (eye / 2 + hS @ (eye / 6 + hS / 24)))


def evolve_rk4(
    gen: LindbladGenerator,
    rho0,
    settings: IntegratorSettings | None = None,
    tol: float = STATE_TOL,
    check: bool = True,
) -> Trajectory:
    """Integrate the master equation with fixed-step RK4, sampling every ``settings.sample_every`` steps.

    Each sample is re-symmetrized to ``(rho + rho^H)/2`` and checked against
    the density-matrix invariants; with ``check`` a breach raises
    :class:`PhysicsError` carrying the sample time. With ``settings.adapt``
    each sample interval is recomputed at half the step size until the two
    results agree to ``adapt_tol``.
    """
    settings = settings or IntegratorSettings()
    n = gen.dimension
    rho = check_density_matrix(rho0, tol, dims=(n,))
    n_steps = settings.n_steps
    stride = int(settings.sample_every)

    bounds = list(range(0, n_steps, stride)) + [n_steps]
    times = [0.0]
    states = [rho.copy()]
    cache: dict[tuple[int, int], np.ndarray] = {}

    def propagator(level: int, steps: int) -> np.ndarray:
        key = (level, steps)
        if key not in cache:
            T = rk4_propagator(gen, settings.dt / 2**level)
            cache[key] = np.linalg.matrix_power(T, steps * 2**level)
        return cache[key]

    level = 0
    dts = [settings.dt]
    herm_defects = [0.0]
    v = vec(rho)
    for k in range(1, len(bounds)):
        steps = bounds[k] - bounds[k - 1]
        nxt = propagator(level, steps) @ v
        if settings.adapt:
            while level < 20:
                fine = propagator(level + 1, steps) @ v
                if np.max(np.abs(fine - nxt)) <= settings.adapt_tol:
                    break
                level += 1
                nxt = fine
            dts.append(settings.dt / 2**level)
        out = unvec(nxt, n)
        herm_defects.append(float(np.max(np.abs(out - out.conj().T))))
        out = 0.5 * (out + out.conj().T)
        v = vec(out)
        times.append(bounds[k] * settings.dt)
        states.append(out)

    states_arr = np.array(states)
    negs, traces, mins = [], [], []
    for t, s, hd in zip(times, states_arr, herm_defects):
        diag = validate_state(s, tol)
        traces.append(diag.trace_defect)
        mins.append(diag.min_eigenvalue)
        if check and not (diag.ok and hd <= tol):
            reasons = diag.failures()
            if hd > tol:
                reasons.append(f"hermiticity drift {hd:.3e}")
            raise PhysicsError(t, reasons)
        negs.append(negativity(s, tol, check=False) if n == 9 else np.nan)
    return Trajectory(
        times=np.array(times),
        states=states_arr,
        negativities=np.array(negs),
        trace_defects=np.array(traces),
        min_eigenvalues=np.array(mins),
        hermiticity_defects=np.array(herm_defects),
        dt_used=dts,
    )


_SUPPORT = np.array([0, 4, 8])


def analytic_II_general(rho0, params: SystemIIParams, t: float) -> np.ndarray:
    """Exact two-atom system II state at time ``t`` for ``rho0`` supported on ``|ee>, |uu>, |gg>``."""
    rho0 = check_density_matrix(rho0, dims=(9,))
    mask = np.ones((9, 9), dtype=bool)
    mask[np.ix_(_SUPPORT, _SUPPORT)] = False
    if np.max(np.abs(rho0[mask]), initial=0.0) > 1e-12:
        raise InvalidStateError("initial state must be supported on span{|ee>, |uu>, |gg>}")
    if t < 0:
        raise ValueError("t must be non-negative")
    ge, gu = params.gammaE, params.gammaU
    Ee, Eu, Eeu = np.exp(-ge * t), np.exp(-gu * t), np.exp(-(ge + gu) * t)
    r11, r55, r99 = rho0[0, 0].real, rho0[4, 4].real, rho0[8, 8].real
    out = np.zeros((9, 9), dtype=complex)
    out[0, 0] = Ee**2 * r11
    out[0, 4] = Eeu * rho0[0, 4]
    out[0, 8] = Ee * rho0[0, 8]
    out[2, 2] = (Ee - Ee**2) * r11
    out[4, 4] = Eu**2 * r55
    out[4, 8] = Eu * rho0[4, 8]
    out[5, 5] = (Eu - Eu**2) * r55
    out[6, 6] = (Ee - Ee**2) * r11
    out[7, 7] = (Eu - Eu**2) * r55
    out[8, 8] = (1 + Ee**2 - 2 * Ee) * r11 + (1 + Eu**2 - 2 * Eu) * r55 + r99
    for i, j in ((0, 4), (0, 8), (4, 8)):
        out[j, i] = np.conj(out[i, j])
    return out


def analytic_II_isotropic(p: float, params: SystemIIParams, t: float) -> np.ndarray:
    """Exact two-atom system II evolution of the isotropic state with weight ``p``."""
    IsotropicParams(p)
    if t < 0:
        raise ValueError("t must be non-negative")
    ge, gu = params.gammaE, params.gammaU
    Ee, Eu, Eeu = np.exp(-ge * t), np.exp(-gu * t), np.exp(-(ge + gu) * t)
    a, b = (1 + 2 * p) / 9, (1 - p) / 9
    W = np.zeros((9, 9), dtype=complex)
    W[0, 0] = a * Ee**2
    W[0, 4] = p / 3 * Eeu
    W[0, 8] = p / 3 * Ee
    W[1, 1] = b * Eeu
    W[2, 2] = -b * Eeu - a * Ee**2 + Ee / 3
    W[3, 3] = b * Eeu
    W[4, 4] = a * Eu**2
    W[4, 8] = p / 3 * Eu
    W[5, 5] = -b * Eeu - a * Eu**2 + Eu / 3
    W[6, 6] = W[2, 2]
    W[7, 7] = W[5, 5]
    W[8, 8] = 1 + a * (Ee**2 + Eu**2) + 2 * b * Eeu - 2 / 3 * (Ee + Eu)
    for i, j in ((0, 4), (0, 8), (4, 8)):
        W[j, i] = np.conj(W[i, j])
    return W


def negativity_psimax_closed_form(params: SystemIIParams, t: float) -> float:
    ge, gu = params.gammaE, params.gammaU
    return float((np.exp(-2 * ge * t) + np.exp(-(ge + gu) * t) + np.exp(-2 * gu * t)) / 3)


# (target, sources) with one-based indices; Hermitian partners are filled after.
_ASYMPTOTIC_MAP = (
    ((5, 5), ((5, 5),)),
    ((5, 6), ((5, 6),)),
    ((5, 8), ((5, 8),)),
    ((5, 9), ((5, 9),)),
    ((6, 8), ((6, 8),)),
    ((6, 6), ((4, 4), (6, 6))),
    ((6, 9), ((4, 7), (6, 9))),
    ((8, 8), ((2, 2), (8, 8))),
    ((8, 9), ((2, 3), (8, 9))),
    ((9, 9), ((1, 1), (3, 3), (7, 7), (9, 9))),
)


def asymptotic_state_max_interference(rho0) -> np.ndarray:
    """Long-time limit of a two-atom system II state when ``|u>`` is metastable."""
    rho0 = check_density_matrix(rho0, dims=(9,))
    out = np.zeros((9, 9), dtype=complex)
    for (i, j), sources in _ASYMPTOTIC_MAP:
        out[i - 1, j - 1] = sum(rho0[k - 1, l - 1] for k, l in sources)
        if i != j:
            out[j - 1, i - 1] = np.conj(out[i - 1, j - 1])
        else:
            out[i - 1, i - 1] = out[i - 1, i - 1].real
    return out


def asymptotic_negativity_pure(params: PureStateParams) -> float:
    return float(np.sin(params.phi) * np.cos(params.phi) * np.sin(params.theta))


def asymptotic_isotropic(p: float) -> tuple[np.ndarray, float]:
    """Asymptotic isotropic state under maximal interference and its negativity."""
    IsotropicParams(p)
    W = np.zeros((9, 9), dtype=complex)
    W[4, 4] = (1 + 2 * p) / 9
    W[4, 8] = W[8, 4] = p / 3
    W[5, 5] = W[7, 7] = 2 * (1 - p) / 9
    W[8, 8] = 2 * (2 + p) / 9
    n_as = 0.0 if p <= 0.4 else (5 * p - 2) / 9
    return W, n_as


def detect_steady_state(traj: Trajectory, window: float, tol: float):
    """Earliest sample after which every later sample differs from it by at most ``tol`` elementwise.

    At least ``window`` time units must follow the returned sample. Returns
    ``(time, state)`` with the final sampled state as the plateau estimate,
    or ``None`` when no plateau is found.
    """
    times = traj.times
    if times[-1] - times[0] < window:
        raise ValueError(f"trajectory spans {times[-1] - times[0]:g}, shorter than window {window:g}")
    states = traj.states
    n = len(times)
    candidate = None
    for i in range(n - 1, -1, -1):
        if times[-1] - times[i] < window:
            continue
        dev = np.max(np.abs(states[i:] - states[i]))
        if dev <= tol:
            candidate = i
        elif candidate is not None:
            break
    if candidate is None:
        return None
    return float(times[candidate]), states[-1].copy()
