"""Dense complex linear algebra on two-qutrit operators.

Operators are plain ``numpy`` arrays. The two-atom product basis is ordered
with atom A as the major index, ``flat = 3 * a + b`` for zero-based levels.
"""
from __future__ import annotations

import numpy as np

DIM = 3
HERMITIAN_TOL = 1e-9

__all__ = [
    "NotHermitianError",
    "basis_index",
    "flat_index",
    "kron",
    "partial_transpose_A",
    "partial_transpose_B",
    "hermiticity_defect",
    "hermitian_eigenvalues",
    "jacobi_eigh",
    "trace_norm_hermitian",
]


class NotHermitianError(ValueError):
    """Raised when an operator fails the Hermiticity gate."""

    def __init__(self, defect: float, tol: float):
        self.defect = defect
        self.tol = tol
        super().__init__(f"matrix is not Hermitian: max |M - M^H| = {defect:.3e} > tol {tol:.1e}")


def flat_index(a: int, b: int) -> int:
    """One-based flat index of ``e_a (x) e_b`` with one-based levels ``a, b``."""
    if not (1 <= a <= DIM and 1 <= b <= DIM):
        raise ValueError(f"levels must lie in 1..{DIM}, got ({a}, {b})")
    return DIM * (a - 1) + b


def basis_index(flat: int) -> tuple[int, int]:
    """Inverse of :func:`flat_index`."""
    if not 1 <= flat <= DIM * DIM:
        raise ValueError(f"flat index must lie in 1..{DIM * DIM}, got {flat}")
    a, b = divmod(flat - 1, DIM)
    return a + 1, b + 1


def kron(A, B) -> np.ndarray:
    """Kronecker product with A-index major block order."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or B.ndim != 2:
        raise ValueError("kron expects two matrices")
    if A.size * B.size > 1 << 24:
        raise ValueError(f"kron of {A.shape} and {B.shape} is too large")
    return np.kron(A, B)


def _check_bipartite(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM * DIM, DIM * DIM):
        raise ValueError(f"expected a {DIM * DIM}x{DIM * DIM} matrix, got shape {rho.shape}")
    return rho


def partial_transpose_A(rho) -> np.ndarray:
    """Transpose the first tensor factor: ``out[(a,b),(c,d)] = rho[(c,b),(a,d)]``."""
    rho = _check_bipartite(rho)
    return rho.reshape(DIM, DIM, DIM, DIM).transpose(2, 1, 0, 3).reshape(DIM * DIM, DIM * DIM)


def partial_transpose_B(rho) -> np.ndarray:
    """Transpose the second tensor factor."""
    rho = _check_bipartite(rho)
    return rho.reshape(DIM, DIM, DIM, DIM).transpose(0, 3, 2, 1).reshape(DIM * DIM, DIM * DIM)


def hermiticity_defect(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def jacobi_eigh(M, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``M[p, q]`` and then
    applies the real symmetric Jacobi rotation that annihilates it.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    V : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    scale = np.max(np.abs(A)) if A.size else 0.0
    if scale == 0.0:
        return np.zeros(n), V
    # work at unit scale so the off-diagonal norm cannot underflow
    A = A / scale
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(np.triu(A, 1)) ** 2))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = 0.5 * np.arctan2(2.0 * mag, (A[q, q] - A[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                # G acts on span(e_p, e_q); A <- G^H A G zeroes A[p, q].
                g_pp, g_pq = c, s * phase
                g_qp, g_qq = -s * np.conj(phase), c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = col_p * g_pp + col_q * g_qp
                A[:, q] = col_p * g_pq + col_q * g_qq
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                A[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = vp * g_pp + vq * g_qp
                V[:, q] = vp * g_pq + vq * g_qq
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(A).real * scale
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def hermitian_eigenvalues(M, tol: float = HERMITIAN_TOL, method: str = "lapack") -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix.

    The input must be Hermitian to within ``tol`` (max entrywise ``|M - M^H|``);
    it is then symmetrized before the eigensolve. ``method`` selects LAPACK
    (``numpy.linalg.eigvalsh``) or the in-house cyclic Jacobi solver.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    defect = hermiticity_defect(M)
    if defect > tol:
        raise NotHermitianError(defect, tol)
    M = 0.5 * (M + M.conj().T)
    if method == "lapack":
        return np.linalg.eigvalsh(M)
    if method == "jacobi":
        return jacobi_eigh(M)[0]
    raise ValueError(f"unknown eigensolver method {method!r}")


def trace_norm_hermitian(M, tol: float = HERMITIAN_TOL, method: str = "lapack") -> float:
    return float(np.sum(np.abs(hermitian_eigenvalues(M, tol=tol, method=method))))
