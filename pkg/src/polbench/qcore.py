"""Dense complex linear algebra for small tensor-product Hilbert spaces.

Conventions used throughout the package:

* a ket is a 1-D complex ndarray, an operator a square 2-D one;
* composite spaces are described by a tuple of subsystem dimensions,
  e.g. ``(2, 2)`` for a polarization pair, with the first factor slow
  in Kronecker ordering (``tensor(a, b)`` puts ``a`` on the slow axis);
* polarization qubits use index 0 for the component aligned with the
  device axis (written V) and index 1 for the orthogonal one (H);
* validity (normalization, density-matrix conditions) is checked by
  predicates, never enforced at construction, so deliberately
  unphysical objects can still be represented and audited.

Everything here is dense and tiny (dim <= ~64); no sparsity, no
performance tricks beyond vectorized numpy.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation

# Algebraic identities (hermiticity, trace, idempotence) are exact up to
# rounding; eigenvalue positivity gets a looser band because eigh noise
# on near-singular matrices exceeds rounding error.
ATOL_ALGEBRA = 1e-12
ATOL_POSITIVITY = 1e-10


def ket(values) -> np.ndarray:
    """Coerce a sequence of amplitudes to a 1-D complex vector."""
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ContractViolation("ket must be a non-empty 1-D amplitude vector")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ContractViolation("ket amplitudes must be finite")
    return v


def operator(values) -> np.ndarray:
    """Coerce a nested sequence to a square complex matrix."""
    m = np.asarray(values, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ContractViolation("operator must be a square matrix")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ContractViolation("operator entries must be finite")
    return m


def basis_ket(dim: int, index: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise ContractViolation(f"basis index {index} outside dimension {dim}")
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two kets or two operators (first factor slow)."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ContractViolation("tensor expects two kets or two operators, not a mix")
    return np.kron(a, b)


def projector(psi: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| of a normalized ket."""
    psi = ket(psi)
    if not is_normalized(psi):
        raise ContractViolation("projector requires a normalized ket")
    return np.outer(psi, psi.conj())


def embed(op: np.ndarray, dims: tuple[int, ...], target: int) -> np.ndarray:
    """Lift a single-subsystem operator to the joint space (identity elsewhere)."""
    _check_dims(dims)
    if not 0 <= target < len(dims):
        raise ContractViolation(f"target {target} outside subsystem range {dims}")
    op = operator(op)
    if op.shape[0] != dims[target]:
        raise ContractViolation(
            f"operator dimension {op.shape[0]} does not match subsystem {target} of {dims}"
        )
    out = np.eye(1, dtype=np.complex128)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == target else np.eye(d, dtype=np.complex128))
    return out


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], keep: int) -> np.ndarray:
    """Trace out one subsystem of a bipartite operator, keeping ``keep``.

    Only bipartite spaces are supported; reductions of larger products are
    obtained by regrouping dims before the call.
    """
    _check_dims(dims)
    if len(dims) != 2:
        raise ContractViolation("partial_trace supports exactly two subsystems")
    if keep not in (0, 1):
        raise ContractViolation("keep must be 0 or 1")
    rho = operator(rho)
    d0, d1 = dims
    if rho.shape[0] != d0 * d1:
        raise ContractViolation(f"operator dimension {rho.shape[0]} != {d0}*{d1}")
    r = rho.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


def polarizer_projector(theta: float) -> np.ndarray:
    """Projector onto linear polarization at angle theta from the device axis."""
    theta = float(theta)
    if not np.isfinite(theta):
        raise ContractViolation("polarizer angle must be finite")
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=np.complex128)


def detection_probability(rho: np.ndarray, proj: np.ndarray) -> float:
    """Born rule Tr(rho P), clamped to [0, 1] within ATOL_POSITIVITY.

    A value outside the clamping band means the inputs were not a valid
    state/projector pair and is reported as a contract violation rather
    than silently truncated.
    """
    rho = operator(rho)
    proj = operator(proj)
    if rho.shape != proj.shape:
        raise ContractViolation(
            f"state dimension {rho.shape[0]} != projector dimension {proj.shape[0]}"
        )
    p = float(np.trace(rho @ proj).real)
    if p < -ATOL_POSITIVITY or p > 1.0 + ATOL_POSITIVITY:
        raise ContractViolation(f"Born probability {p} outside [0, 1] beyond tolerance")
    return min(1.0, max(0.0, p))


def is_normalized(psi: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    psi = np.asarray(psi, dtype=np.complex128)
    return abs(float(np.vdot(psi, psi).real) - 1.0) <= atol


def is_hermitian(op: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    op = np.asarray(op, dtype=np.complex128)
    return bool(np.allclose(op, op.conj().T, atol=atol, rtol=0.0))


def is_density_matrix(op: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    """Hermitian, unit trace, eigenvalues >= -ATOL_POSITIVITY."""
    op = np.asarray(op, dtype=np.complex128)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    if not is_hermitian(op, atol):
        return False
    if abs(float(np.trace(op).real) - 1.0) > atol:
        return False
    return float(np.linalg.eigvalsh(op).min()) >= -ATOL_POSITIVITY


def is_projector(op: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    op = np.asarray(op, dtype=np.complex128)
    return is_hermitian(op, atol) and bool(
        np.allclose(op @ op, op, atol=atol, rtol=0.0)
    )


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Draw G G^dagger / Tr from the complex Ginibre ensemble."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _check_dims(dims) -> None:
    if not isinstance(dims, tuple) or not dims:
        raise ContractViolation("dims must be a non-empty tuple of subsystem dimensions")
    if any((not isinstance(d, int)) or d < 1 for d in dims):
        raise ContractViolation(f"subsystem dimensions must be positive integers, got {dims}")
