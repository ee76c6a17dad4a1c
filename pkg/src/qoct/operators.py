"""Dense complex operator algebra for density matrices and co-states.

All operators are plain ``numpy.ndarray`` with complex entries.  Hamiltonians
are understood in angular-frequency units (rad/s, hbar = 1); states are
dimensionless.  Validation happens at boundaries via :func:`check_density_matrix`
and :func:`check_hermitian`; the algebraic operations themselves are pure
functions and do not re-validate their inputs.
"""

from __future__ import annotations

import string

import numpy as np

from .errors import InvalidStateError, NumericalConsistencyError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_TOL = 1e-10


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def basis_projector(dim: int, k: int) -> np.ndarray:
    """|k><k| in the canonical basis."""
    p = np.zeros((dim, dim), dtype=complex)
    p[k, k] = 1.0
    return p


def dag(op: np.ndarray) -> np.ndarray:
    return op.conj().T


def check_hermitian(op: np.ndarray, tol: float = HERMITICITY_TOL, what: str = "operator"):
    defect = np.max(np.abs(op - op.conj().T))
    if defect > tol:
        raise InvalidStateError(
            f"{what} is not Hermitian: max deviation {defect:.3e} exceeds {tol:.1e}"
        )


def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    eig_tol: float = EIGENVALUE_TOL,
):
    """Raise InvalidStateError unless rho is Hermitian, unit trace, PSD to tolerance."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    check_hermitian(rho, herm_tol, "density matrix")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"density matrix trace {tr} deviates from 1 beyond {trace_tol:.1e}")
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < -eig_tol:
        raise InvalidStateError(
            f"density matrix has eigenvalue {lowest:.3e} below -{eig_tol:.1e}"
        )


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a`` as the slow index."""
    for name, op in (("a", a), ("b", b)):
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise ValueError(f"tensor factor {name} must be square, got shape {op.shape}")
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, dims, keep: int) -> np.ndarray:
    """Trace out all subsystems except ``dims[keep]``."""
    dims = list(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"state shape {rho.shape} does not match subsystem dims {dims}")
    if not 0 <= keep < len(dims):
        raise ValueError(f"keep index {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    letters = string.ascii_lowercase
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for m in range(n):
        if m != keep:
            col[m] = row[m]
    subscript = "".join(row) + "".join(col) + "->" + row[keep] + col[keep]
    return np.einsum(subscript, rho.reshape(dims + dims))


def annihilation(n_levels: int) -> np.ndarray:
    """Truncated bosonic lowering operator: (k, k+1) entry sqrt(k+1)."""
    if n_levels < 2:
        raise ValueError(f"annihilation needs at least 2 levels, got {n_levels}")
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), k=1).astype(complex)


def thermal_state(n_levels: int, n_th: float) -> np.ndarray:
    """Diagonal thermal state with occupancy n_th, renormalized on the kept levels."""
    if n_levels < 1:
        raise ValueError(f"thermal_state needs at least 1 level, got {n_levels}")
    if n_th < 0:
        raise ValueError(f"thermal occupancy must be nonnegative, got {n_th}")
    if n_th == 0:
        weights = np.zeros(n_levels)
        weights[0] = 1.0
    else:
        q = n_th / (n_th + 1.0)
        weights = q ** np.arange(n_levels)
        weights = weights / weights.sum()
    return np.diag(weights).astype(complex)


def hs_overlap(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt overlap Tr{a^dag b}; real for Hermitian inputs."""
    if a.shape != b.shape:
        raise ValueError(f"operator shapes differ: {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.sum(rho.conj() * rho)))


def bloch_dot(r1: np.ndarray, r2: np.ndarray) -> float:
    """Dot product of generalized Bloch vectors: Tr{r1 r2} - 1/N."""
    if r1.shape != r2.shape:
        raise ValueError(f"state shapes differ: {r1.shape} vs {r2.shape}")
    n = r1.shape[0]
    return float(np.real(hs_overlap(r1, r2))) - 1.0 / n


def bloch_length(rho: np.ndarray) -> float:
    """Length of the generalized Bloch vector, sqrt(Tr rho^2 - 1/N)."""
    radicand = bloch_dot(rho, rho)
    if radicand < -1e-12:
        raise NumericalConsistencyError(
            f"squared Bloch length {radicand:.3e} below -1e-12; state is inconsistent"
        )
    return float(np.sqrt(max(radicand, 0.0)))


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Tr{rho obs} for a Hermitian observable."""
    if rho.shape != obs.shape:
        raise ValueError(f"state shape {rho.shape} does not match observable {obs.shape}")
    val = complex(np.einsum("ij,ji->", rho, obs))
    if abs(val.imag) > 1e-10:
        raise NumericalConsistencyError(
            f"expectation value has imaginary part {val.imag:.3e} beyond 1e-10"
        )
    return float(val.real)


def _clamped_eigh(rho: np.ndarray, what: str):
    check_hermitian(rho, 1e-10, what)
    vals, vecs = np.linalg.eigh(rho)
    if vals[0] < -EIGENVALUE_TOL:
        raise InvalidStateError(
            f"{what} has eigenvalue {vals[0]:.3e} below -{EIGENVALUE_TOL:.1e}"
        )
    return np.clip(vals, 0.0, None), vecs


def hermitian_sqrt(rho: np.ndarray) -> np.ndarray:
    """PSD square root via eigendecomposition; tiny negative eigenvalues clamp to 0."""
    vals, vecs = _clamped_eigh(rho, "matrix for hermitian_sqrt")
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Tr{rho ln rho} with 0 ln 0 := 0.  Nonpositive for density matrices."""
    vals, _ = _clamped_eigh(rho, "matrix for von_neumann_entropy")
    positive = vals[vals > 0.0]
    return float(np.sum(positive * np.log(positive)))
