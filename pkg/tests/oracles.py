"""Independent reference implementations used to cross-check the package.

Everything here is written with explicit index loops and scalar math,
on purpose: these functions share no code path with the library, so a
bug in the library's einsum or kron conventions cannot hide in its own
mirror image.  Slow is fine; they only run in tests.
"""

from __future__ import annotations

import math

import numpy as np


def kron_loops(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two operators, first factor slow."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for m in range(cb):
                    out[i * rb + k, j * cb + m] = a[i, j] * b[k, m]
    return out


def kron_vec_loops(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two kets, first factor slow."""
    out = np.zeros(a.size * b.size, dtype=complex)
    for i in range(a.size):
        for k in range(b.size):
            out[i * b.size + k] = a[i] * b[k]
    return out


def partial_trace_loops(rho: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Reduced state of a bipartite density matrix, by explicit sums."""
    d0, d1 = dims
    if keep == 0:
        out = np.zeros((d0, d0), dtype=complex)
        for i in range(d0):
            for j in range(d0):
                acc = 0j
                for k in range(d1):
                    acc += rho[i * d1 + k, j * d1 + k]
                out[i, j] = acc
        return out
    out = np.zeros((d1, d1), dtype=complex)
    for i in range(d1):
        for j in range(d1):
            acc = 0j
            for k in range(d0):
                acc += rho[k * d1 + i, k * d1 + j]
            out[i, j] = acc
    return out


def born_loops(rho: np.ndarray, proj: np.ndarray) -> float:
    """Tr(rho P) as an explicit double sum, real part."""
    acc = 0j
    n = rho.shape[0]
    for i in range(n):
        for j in range(n):
            acc += rho[i, j] * proj[j, i]
    return acc.real


def polarizer_matrix(theta: float) -> np.ndarray:
    """Rank-one projector onto cos(theta)|V> + sin(theta)|H>."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)


def pair_ket(n) -> np.ndarray:
    """Amplified-pair amplitudes over |VV>,|VH>,|HV>,|HH>."""
    if math.isinf(n):
        return np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    norm = math.sqrt(n + 2.0)
    return np.array(
        [math.sqrt(n + 1.0) / norm, 0.0, 0.0, 1.0 / norm], dtype=complex
    )


def density_loops(psi: np.ndarray) -> np.ndarray:
    """Outer product |psi><psi| by loops."""
    d = psi.size
    out = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            out[i, j] = psi[i] * psi[j].conjugate()
    return out


def remote_rate_oracle(n, theta: float) -> float:
    """Singles rate at a remote polarizer, the long way around.

    Builds the pair state, traces out the device-side photon (the first
    tensor factor), and applies the Born rule against the polarizer
    projector.  No closed form involved.
    """
    rho = density_loops(pair_ket(n))
    reduced = partial_trace_loops(rho, (2, 2), keep=1)
    return born_loops(reduced, polarizer_matrix(theta))


def coincidence_oracle(theta1: float, theta2: float, n=0) -> float:
    """Joint rate through two polarizers, via the full 4x4 Born rule."""
    rho = density_loops(pair_ket(n))
    joint = kron_loops(polarizer_matrix(theta1), polarizer_matrix(theta2))
    return born_loops(rho, joint)


def apply_kraus_loops(rho: np.ndarray, ops) -> np.ndarray:
    """Sum_k K rho K^dagger with loop-built matrix products."""
    d = rho.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for op in ops:
        #  (K rho K^dagger)_{ij} = sum_{a,b} K_{ia} rho_{ab} conj(K_{jb})
        for i in range(d):
            for j in range(d):
                acc = 0j
                for a in range(d):
                    for b in range(d):
                        acc += op[i, a] * rho[a, b] * op[j, b].conjugate()
                out[i, j] += acc
    return out


def overlap_modulus(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>| by explicit sum."""
    acc = 0j
    for i in range(psi.size):
        acc += psi[i].conjugate() * phi[i]
    return abs(acc)


def normal_ci95(p_hat: float, trials: int) -> float:
    """Plain normal-approximation half-width used by the count records."""
    return 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / trials)
