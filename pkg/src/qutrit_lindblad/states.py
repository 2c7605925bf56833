"""Two-qutrit state families, validation and negativity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    hermitian_eigenvalues,
    hermiticity_defect,
    partial_transpose_A,
)

STATE_TOL = 1e-9
NEGATIVITY_CLAMP = 1e-10
_HALF_PI = np.pi / 2

__all__ = [
    "InvalidStateError",
    "PureStateParams",
    "IsotropicParams",
    "StateDiagnostics",
    "basis_ket",
    "projector",
    "pure_state",
    "psi_max",
    "ground_state",
    "maximally_mixed",
    "isotropic_state",
    "validate_state",
    "check_density_matrix",
    "negativity",
    "negativity_pure_closed_form",
    "negativity_isotropic_closed_form",
]


class InvalidStateError(ValueError):
    """A matrix violates the density-matrix invariants."""


@dataclass(frozen=True)
class PureStateParams:
    theta: float
    phi: float

    def __post_init__(self):
        for name in ("theta", "phi"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < -1e-12 or v > _HALF_PI + 1e-12:
                raise ValueError(f"{name}={v} outside [0, pi/2]")


@dataclass(frozen=True)
class IsotropicParams:
    p: float

    def __post_init__(self):
        if not np.isfinite(self.p) or not 0.0 <= self.p <= 1.0:
            raise ValueError(f"isotropic weight p={self.p} outside [0, 1]")


def basis_ket(*levels: int) -> np.ndarray:
    """Product basis vector for one-based levels, e.g. ``basis_ket(3, 3)``."""
    ket = np.ones(1, dtype=complex)
    for level in levels:
        e = np.zeros(3, dtype=complex)
        e[level - 1] = 1.0
        ket = np.kron(ket, e)
    return ket


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def pure_state(params: PureStateParams) -> np.ndarray:
    """``cos t sin f |11> + sin t sin f |22> + cos f |33>``."""
    th, ph = params.theta, params.phi
    psi = np.zeros(9, dtype=complex)
    psi[0] = np.cos(th) * np.sin(ph)
    psi[4] = np.sin(th) * np.sin(ph)
    psi[8] = np.cos(ph)
    return psi


def psi_max() -> np.ndarray:
    psi = np.zeros(9, dtype=complex)
    psi[[0, 4, 8]] = 1 / np.sqrt(3)
    return psi


def ground_state() -> np.ndarray:
    return projector(basis_ket(3, 3))


def maximally_mixed(n: int = 9) -> np.ndarray:
    return np.eye(n, dtype=complex) / n


def isotropic_state(params: IsotropicParams) -> np.ndarray:
    p = params.p
    return (1 - p) * maximally_mixed(9) + p * projector(psi_max())


@dataclass(frozen=True)
class StateDiagnostics:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tol: float = STATE_TOL

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_defect <= self.tol

    @property
    def unit_trace(self) -> bool:
        return self.trace_defect <= self.tol

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    @property
    def ok(self) -> bool:
        return self.hermitian and self.unit_trace and self.positive

    def failures(self) -> list[str]:
        out = []
        if not self.hermitian:
            out.append(f"hermiticity defect {self.hermiticity_defect:.3e}")
        if not self.unit_trace:
            out.append(f"trace defect {self.trace_defect:.3e}")
        if not self.positive:
            out.append(f"min eigenvalue {self.min_eigenvalue:.3e}")
        return out


def validate_state(rho, tol: float = STATE_TOL) -> StateDiagnostics:
    """Measure how far ``rho`` is from a valid density matrix. Never raises on bad states."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    herm = hermiticity_defect(rho)
    tr = abs(np.trace(rho) - 1.0)
    sym = 0.5 * (rho + rho.conj().T)
    min_eig = float(hermitian_eigenvalues(sym, tol=np.inf)[0])
    return StateDiagnostics(herm, float(tr), min_eig, tol)


def check_density_matrix(rho, tol: float = STATE_TOL, dims=(3, 9)) -> np.ndarray:
    """Return ``rho`` as a complex array or raise :class:`InvalidStateError`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in dims:
        raise InvalidStateError(f"density matrix must be n x n with n in {dims}, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    diag = validate_state(rho, tol)
    if not diag.ok:
        raise InvalidStateError("invalid density matrix: " + ", ".join(diag.failures()))
    return rho


def negativity(rho, tol: float = STATE_TOL, check: bool = True) -> float:
    """Negativity of a two-qutrit state from the spectrum of its partial transpose.

    Both ``(||rho^T_A||_1 - 1) / 2`` and the summed magnitude of the negative
    eigenvalues are formed and cross-checked; the latter is returned. Eigenvalues
    in ``(-1e-10, 0)`` count as zero.
    """
    rho = check_density_matrix(rho, tol, dims=(9,)) if check else np.asarray(rho, dtype=complex)
    evals = hermitian_eigenvalues(partial_transpose_A(rho), tol=HERMITIAN_TOL)
    from_norm = (np.sum(np.abs(evals)) - 1.0) / 2.0
    from_sum = -np.sum(evals[evals < 0])
    trace_shift = abs(np.sum(evals) - 1.0) / 2.0
    if abs(from_norm - from_sum) > 1e-12 + trace_shift:
        raise ArithmeticError(f"negativity routes disagree: {from_norm!r} vs {from_sum!r}")
    n = 0.0 + float(-np.sum(evals[evals <= -NEGATIVITY_CLAMP]))
    # two qutrits cannot exceed 1; absorb last-ulp overshoot
    return 1.0 if 1.0 < n <= 1.0 + 1e-12 else n


def negativity_pure_closed_form(params: PureStateParams) -> float:
    th, ph = params.theta, params.phi
    return float(
        np.cos(th) * np.sin(ph) * np.cos(ph)
        + np.cos(th) * np.sin(th) * np.sin(ph) ** 2
        + np.sin(th) * np.cos(ph) * np.sin(ph)
    )


def negativity_isotropic_closed_form(params: IsotropicParams) -> float:
    p = params.p
    return 0.0 if p <= 0.25 else (4 * p - 1) / 3
