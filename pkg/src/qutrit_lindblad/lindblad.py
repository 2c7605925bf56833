"""Dissipative generators for a V-type atom and for two independent atoms.

System I has excited levels ``|1>, |2>`` decaying to ``|3>`` with a cross
damping rate ``g12 = beta * sqrt(g1 * g2)``. System II has independent decays
``|e> -> |g>`` and ``|u> -> |g>`` with ``e, u, g`` mapped to levels 1, 2, 3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "CompletePositivityError",
    "SystemIParams",
    "SystemIIParams",
    "LindbladGenerator",
    "transition",
    "lift",
    "generator_system_I",
    "generator_system_II",
    "apply",
    "superoperator_matrix",
    "vec",
    "unvec",
    "null_space_dimension",
]

_I3 = np.eye(3, dtype=complex)


class CompletePositivityError(ValueError):
    """Damping coefficients do not define a completely positive semigroup."""


def transition(j: int, k: int) -> np.ndarray:
    """``sigma_jk = |j><k|`` on one atom, one-based levels."""
    s = np.zeros((3, 3), dtype=complex)
    s[j - 1, k - 1] = 1.0
    return s


def lift(op, atom: str) -> np.ndarray:
    """Embed a single-atom operator on atom ``"A"`` or ``"B"`` of the pair."""
    if atom == "A":
        return np.kron(op, _I3)
    if atom == "B":
        return np.kron(_I3, op)
    raise ValueError(f"atom must be 'A' or 'B', got {atom!r}")


@dataclass(frozen=True)
class SystemIParams:
    gamma1: float
    gamma2: float
    betaI: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma1) and np.isfinite(self.gamma2)):
            raise ValueError("decay rates must be finite")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError(f"decay rates must be non-negative, got g1={self.gamma1}, g2={self.gamma2}")
        if not np.isfinite(self.betaI) or not 0 <= self.betaI <= 1:
            raise CompletePositivityError(
                f"beta={self.betaI} outside [0, 1]: the damping matrix "
                f"[[g1, g12], [g12, g2]] must stay positive semidefinite for a completely positive generator"
            )

    @property
    def gamma12(self) -> float:
        return self.betaI * np.sqrt(self.gamma1 * self.gamma2)

    @property
    def damping_matrix(self) -> np.ndarray:
        g12 = self.betaI * np.sqrt(self.gamma1 * self.gamma2)
        return np.array([[self.gamma1, g12], [g12, self.gamma2]])

    @property
    def max_rate(self) -> float:
        return max(self.gamma1, self.gamma2)


@dataclass(frozen=True)
class SystemIIParams:
    gammaE: float
    gammaU: float

    def __post_init__(self):
        if not (np.isfinite(self.gammaE) and np.isfinite(self.gammaU)):
            raise ValueError("decay rates must be finite")
        if self.gammaE < 0 or self.gammaU < 0:
            raise ValueError(f"decay rates must be non-negative, got ge={self.gammaE}, gu={self.gammaU}")
        if self.gammaE + self.gammaU <= 0:
            raise ValueError("at least one decay rate must be positive")

    @property
    def beta(self) -> float:
        """Interference measure ``(ge - gu) / (ge + gu)``."""
        return (self.gammaE - self.gammaU) / (self.gammaE + self.gammaU)

    @property
    def alpha(self) -> float:
        return self.gammaU / self.gammaE if self.gammaE else np.inf

    @property
    def max_rate(self) -> float:
        return max(self.gammaE, self.gammaU)


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """Generator ``rho -> -i[H, rho] + sum rate/2 (2 L rho M^H - M^H L rho - rho M^H L)``.

    ``terms`` holds ``(L, M, rate)`` triples; diagonal channels have ``L is M``,
    cross-damping channels pair two different jump operators.
    """

    dimension: int
    terms: tuple
    hamiltonian: np.ndarray | None = None
    system: str = ""
    atoms: int = 1
    params: object = None
    _products: tuple = field(init=False, repr=False)
    _paired: bool = field(init=False, repr=False)

    def __post_init__(self):
        n = self.dimension
        prods = []
        for L, M, rate in self.terms:
            if L.shape != (n, n) or M.shape != (n, n):
                raise ValueError(f"jump operators must be {n}x{n}")
            prods.append((L, M.conj().T, M.conj().T @ L, float(rate)))
        object.__setattr__(self, "_products", tuple(prods))
        object.__setattr__(self, "_paired", _closed_under_swap(self.terms))
        if self.hamiltonian is not None:
            H = np.asarray(self.hamiltonian, dtype=complex)
            if H.shape != (n, n) or np.max(np.abs(H - H.conj().T)) > 0:
                raise ValueError("hamiltonian must be a Hermitian matrix of matching size")
            object.__setattr__(self, "hamiltonian", H)

    def apply(self, rho) -> np.ndarray:
        return apply(self, rho)

    @cached_property
    def superoperator(self) -> np.ndarray:
        return superoperator_matrix(self)

    @property
    def max_rate(self) -> float:
        if self.params is not None and hasattr(self.params, "max_rate"):
            return self.params.max_rate
        return max((abs(r) for *_, r in self.terms), default=0.0)


def _atom_hamiltonian(omegas) -> np.ndarray | None:
    if omegas is None:
        return None
    w1, w2 = omegas
    return np.diag([w1, w2, 0.0]).astype(complex)


def _assemble(single_terms, atoms, h1, system, params) -> LindbladGenerator:
    if atoms == 1:
        return LindbladGenerator(3, tuple(single_terms), h1, system, 1, params)
    if atoms != 2:
        raise ValueError(f"atoms must be 1 or 2, got {atoms}")
    terms = []
    for atom in ("A", "B"):
        for L, M, rate in single_terms:
            terms.append((lift(L, atom), lift(M, atom), rate))
    H = None if h1 is None else lift(h1, "A") + lift(h1, "B")
    return LindbladGenerator(9, tuple(terms), H, system, 2, params)


def generator_system_I(params: SystemIParams, atoms: int = 1, omegas=None) -> LindbladGenerator:
    """Cross-damped V atom (or an independent pair of them).

    ``omegas=(w1, w2)`` adds the per-atom Hamiltonian ``diag(w1, w2, 0)``.
    """
    g12 = params.gamma12
    s31, s32 = transition(3, 1), transition(3, 2)
    single = [
        (s31, s31, params.gamma1),
        (s32, s32, params.gamma2),
        (s31, s32, g12),
        (s32, s31, g12),
    ]
    return _assemble(single, atoms, _atom_hamiltonian(omegas), "I", params)


def generator_system_II(params: SystemIIParams, atoms: int = 1, omegas=None) -> LindbladGenerator:
    s_ge, s_gu = transition(3, 1), transition(3, 2)
    single = [(s_ge, s_ge, params.gammaE), (s_gu, s_gu, params.gammaU)]
    return _assemble(single, atoms, _atom_hamiltonian(omegas), "II", params)


def _closed_under_swap(terms) -> bool:
    return all(
        any(np.array_equal(L2, M) and np.array_equal(M2, L) and r2 == rate for L2, M2, r2 in terms)
        for L, M, rate in terms
    )


def _half_apply(gen: LindbladGenerator, rho: np.ndarray) -> np.ndarray:
    # rate/2 L rho M^H - rate/2 M^H L rho - i H rho
    out = np.zeros_like(rho)
    if gen.hamiltonian is not None:
        out -= 1j * (gen.hamiltonian @ rho)
    for L, Mdag, MdL, rate in gen._products:
        if rate != 0.0:
            out += 0.5 * rate * (L @ rho @ Mdag - MdL @ rho)
    return out


def apply(gen: LindbladGenerator, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (gen.dimension, gen.dimension):
        raise ValueError(f"state shape {rho.shape} does not match generator dimension {gen.dimension}")
    if gen._paired:
        # G(rho) = A(rho) + A(rho^H)^H, so G(rho)^H == G(rho^H) holds bit for bit.
        return _half_apply(gen, rho) + _half_apply(gen, rho.conj().T).conj().T
    out = np.zeros_like(rho)
    if gen.hamiltonian is not None:
        H = gen.hamiltonian
        out += -1j * (H @ rho - rho @ H)
    for L, Mdag, MdL, rate in gen._products:
        if rate != 0.0:
            out += 0.5 * rate * (2.0 * L @ rho @ Mdag - MdL @ rho - rho @ MdL)
    return out


def vec(rho) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    n = n or int(round(np.sqrt(v.size)))
    return v.reshape(n, n, order="F")


def superoperator_matrix(gen: LindbladGenerator) -> np.ndarray:
    """Matrix ``S`` with ``S @ vec(rho) == vec(apply(gen, rho))`` (column stacking)."""
    n = gen.dimension
    eye = np.eye(n, dtype=complex)
    S = np.zeros((n * n, n * n), dtype=complex)
    if gen.hamiltonian is not None:
        H = gen.hamiltonian
        S += -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for L, Mdag, MdL, rate in gen._products:
        if rate == 0.0:
            continue
        # vec(A X B) = (B^T kron A) vec(X)
        S += 0.5 * rate * (2.0 * np.kron(Mdag.T, L) - np.kron(eye, MdL) - np.kron(MdL.T, eye))
    return S


def null_space_dimension(gen: LindbladGenerator, tol: float = 1e-8) -> int:
    """Number of singular values of the superoperator at or below ``tol`` (relative to the largest)."""
    sv = np.linalg.svd(gen.superoperator, compute_uv=False)
    scale = sv[0] if sv.size and sv[0] > 0 else 1.0
    return int(np.sum(sv <= tol * scale))
