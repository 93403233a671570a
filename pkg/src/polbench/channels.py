"""Trace-preserving (CPTP) device models and related feasibility checks.

Everything a physical amplifier can do to a polarization qubit is a
completely positive trace-preserving map, represented here as an
explicit Kraus set {K_i} with sum_i K_i^dagger K_i = I.  The module
also carries the distance-attenuation couplings used to scale an
amplifier's effective population, and the linearity check showing why
a device that would clone an unknown polarization cannot exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qcore
from .errors import ChannelError, ContractViolation

#: Maximum allowed max-norm of sum K^dagger K - I before a set is rejected.
COMPLETENESS_ATOL = 1e-10

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by its Kraus operators (all square, same dimension)."""

    kraus_ops: tuple[np.ndarray, ...]
    label: str = ""

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]


def completeness_defect(channel: KrausChannel) -> float:
    """Max-norm distance of sum K^dagger K from the identity."""
    ops = channel.kraus_ops
    if not ops:
        raise ContractViolation("channel has no Kraus operators")
    dim = ops[0].shape[0]
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for k in ops:
        k = qcore.operator(k)
        if k.shape[0] != dim:
            raise ContractViolation("Kraus operators must share one dimension")
        acc += k.conj().T @ k
    return float(np.abs(acc - np.eye(dim)).max())


def apply_channel(
    rho: np.ndarray,
    channel: KrausChannel,
    dims: tuple[int, ...],
    target: int,
) -> np.ndarray:
    """Apply a channel to one subsystem of a joint state: sum_i K_i rho K_i^dagger.

    The Kraus set is validated on every call; an incomplete set is a
    physics bug, not a recoverable condition.
    """
    defect = completeness_defect(channel)
    if defect > COMPLETENESS_ATOL:
        raise ChannelError(
            f"Kraus set '{channel.label}' is not trace preserving "
            f"(completeness defect {defect:.3e})"
        )
    rho = qcore.operator(rho)
    out = np.zeros_like(rho)
    for k in channel.kraus_ops:
        lifted = qcore.embed(k, dims, target)
        out += lifted @ rho @ lifted.conj().T
    return out


def dephasing_channel(p: float) -> KrausChannel:
    """Decohere in the device-axis basis with probability p.

    Kraus set: sqrt(1-p) I, sqrt(p) |V><V|, sqrt(p) |H><H|.  p = 0 is
    the identity; p = 1 kills all V/H coherence while leaving both
    populations untouched, which is how a fully 'which-polarization'
    sensitive but passive element looks.
    """
    p = _check_probability(p, "p")
    return KrausChannel(
        kraus_ops=(
            math.sqrt(1.0 - p) * _PAULI["I"],
            math.sqrt(p) * np.diag([1.0, 0.0]).astype(np.complex128),
            math.sqrt(p) * np.diag([0.0, 1.0]).astype(np.complex128),
        ),
        label=f"dephasing(p={p:g})",
    )


def noisy_amplifier_channel(p_align: float, p_noise: float) -> KrausChannel:
    """The best CPTP imitation of a polarization-selective amplifier.

    Acts as rho -> (1 - p_noise) * Dephase_{p_align}(rho) + p_noise * I/2:
    with probability p_align the device resolves the polarization (and
    therefore dephases it), and with probability p_noise it emits an
    unpolarized photon of its own.  The Kraus set is the dephasing set
    scaled by sqrt(1 - p_noise) together with the four Pauli operators
    scaled by sqrt(p_noise)/2.
    """
    p_align = _check_probability(p_align, "p_align")
    p_noise = _check_probability(p_noise, "p_noise")
    keep = math.sqrt(1.0 - p_noise)
    mix = math.sqrt(p_noise) / 2.0
    deph = dephasing_channel(p_align)
    ops = tuple(keep * k for k in deph.kraus_ops) + tuple(
        mix * _PAULI[s] for s in ("I", "X", "Y", "Z")
    )
    # Zero-weight operators are kept: the set is tiny and the algebra is
    # simpler to audit when its shape does not depend on the parameters.
    return KrausChannel(
        kraus_ops=ops,
        label=f"noisy_amplifier(p_align={p_align:g}, p_noise={p_noise:g})",
    )


def random_kraus_channel(
    rng: np.random.Generator, dim: int = 2, n_ops: int = 3
) -> KrausChannel:
    """Draw a Haar-flavored random CPTP channel with n_ops Kraus operators.

    Random complex Gaussian blocks G_i are normalized by the inverse
    square root of S = sum G_i^dagger G_i, which enforces completeness
    exactly up to rounding.
    """
    if dim < 1 or n_ops < 1:
        raise ContractViolation("dim and n_ops must be positive")
    blocks = [
        rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        for _ in range(n_ops)
    ]
    s = sum(b.conj().T @ b for b in blocks)
    w, u = np.linalg.eigh(s)
    s_inv_sqrt = u @ np.diag(1.0 / np.sqrt(w)) @ u.conj().T
    return KrausChannel(
        kraus_ops=tuple(b @ s_inv_sqrt for b in blocks),
        label=f"random(dim={dim}, n_ops={n_ops})",
    )


# ---------------------------------------------------------------------------
# Distance attenuation of the amplifier coupling
# ---------------------------------------------------------------------------

EXPONENTIAL = "exponential"
INVERSE_SQUARE = "inverse_square"
STEP = "step"

_ATTENUATION_KINDS = (EXPONENTIAL, INVERSE_SQUARE, STEP)


@dataclass(frozen=True)
class AttenuationModel:
    """How an amplifier's effective population falls off with distance.

    kind:
        "exponential"     g(d) = exp(-d / scale)
        "inverse_square"  g(d) = 1 / (1 + (d / scale)^2)
        "step"            g(d) = 1 if d < cutoff else 0

    The true falloff of such a coupling is not known; these three stand
    in for any monotone choice, and every no-signalling conclusion in
    the package is independent of which one is picked.
    """

    kind: str
    scale: float = 1.0
    cutoff: float = 1.0

    def __post_init__(self):
        if self.kind not in _ATTENUATION_KINDS:
            raise ContractViolation(
                f"unknown attenuation kind {self.kind!r}; expected one of {_ATTENUATION_KINDS}"
            )
        if self.kind in (EXPONENTIAL, INVERSE_SQUARE) and not self.scale > 0:
            raise ContractViolation("scale must be positive")
        if self.kind == STEP and not self.cutoff >= 0:
            raise ContractViolation("cutoff must be >= 0")

    def coupling(self, distance: float) -> float:
        """Dimensionless g(d) in [0, 1]."""
        d = float(distance)
        if not (math.isfinite(d) and d >= 0):
            raise ContractViolation(f"distance must be finite and >= 0, got {d}")
        if self.kind == EXPONENTIAL:
            return math.exp(-d / self.scale)
        if self.kind == INVERSE_SQUARE:
            return 1.0 / (1.0 + (d / self.scale) ** 2)
        return 1.0 if d < self.cutoff else 0.0


def attenuated_population(n, distance: float, model: AttenuationModel) -> float:
    """Effective population g(d) * n seen by a source at distance d.

    The result is generally not an integer; it is meant for the
    closed-form rate laws, not for the integer-n state constructor.
    """
    if isinstance(n, bool):
        raise ContractViolation("population must be a number, not a boolean")
    n = float(n)
    if math.isnan(n) or n < 0:
        raise ContractViolation(f"population must be >= 0, got {n}")
    g = model.coupling(distance)
    if math.isinf(n):
        return math.inf if g > 0 else 0.0
    return g * n


# ---------------------------------------------------------------------------
# No-cloning feasibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CloningReport:
    """Outcome of the linearity test for a would-be polarization cloner."""

    overlap_in: float
    overlap_out_required: float
    feasible: bool


#: Overlaps this close to 0 or 1 count as orthogonal/identical.
CLONING_ATOL = 1e-12


def cloning_feasibility_check(psi: np.ndarray, phi: np.ndarray) -> CloningReport:
    """Test whether any unitary could map |x>|blank> -> |x>|x> for both inputs.

    Unitarity preserves inner products, so the overlap s = |<psi|phi>|
    would have to equal s^2 after cloning.  That holds only for s = 0
    or s = 1: distinct non-orthogonal polarizations cannot be copied,
    which is the structural reason a noiseless stimulated-emission
    amplifier (a cloner in disguise) does not exist.
    """
    psi = qcore.ket(psi)
    phi = qcore.ket(phi)
    if psi.shape != phi.shape:
        raise ContractViolation("states must share one dimension")
    if not (qcore.is_normalized(psi) and qcore.is_normalized(phi)):
        raise ContractViolation("cloning check requires normalized states")
    s = float(abs(np.vdot(psi, phi)))
    feasible = s <= CLONING_ATOL or abs(s - 1.0) <= CLONING_ATOL
    return CloningReport(overlap_in=s, overlap_out_required=s * s, feasible=feasible)


def _check_probability(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ContractViolation(f"{name} must be numeric") from None
    if not (0.0 <= value <= 1.0):
        raise ContractViolation(f"{name} must be in [0, 1], got {value}")
    return value
