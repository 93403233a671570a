"""Two-photon polarization states for an amplified entangled-pair source.

The basis of the pair space is (|VV>, |VH>, |HV>, |HH>), where V is
the polarization aligned with the amplifier's axis and H the orthogonal
one.  The bosonic family interpolates between a maximally entangled
pair and a fully polarized product state:

    |pair, n> = [sqrt(n+1)|VV> + |HH>] / sqrt(n+2)

where n is the device's prior occupation of the matched mode and the
sqrt(n+1) factor is the stimulated-emission enhancement.  n = 0 gives
the familiar (|VV> + |HH>)/sqrt(2); n -> infinity gives |VV>.  The
fermionic variant carries sqrt(1-n) instead, so a singly occupied
device blocks the matched branch entirely (Pauli exclusion) and the
pair collapses to |HH>.

None of the n > 0 members arise from a trace-preserving map acting on
the n = 0 pair; they are the conjectured, non-physical family whose
operational consequences the rest of the package audits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .errors import ContractViolation

BOSON = "boson"
FERMION = "fermion"

#: Symbolic ideal-amplifier population (the n -> infinity limit).
INFINITY = math.inf

#: Subsystem dimensions of the pair space.
PAIR_DIMS = (2, 2)


@dataclass(frozen=True)
class PairState:
    """A pure two-photon polarization state tagged with its source parameters."""

    ket: np.ndarray = field(repr=False)
    population: float
    statistics: str

    def density(self) -> np.ndarray:
        return qcore.projector(self.ket)

    def reduced(self, keep: int) -> np.ndarray:
        """Single-photon marginal (keep = 0 for the device side, 1 for the remote one)."""
        return qcore.partial_trace(self.density(), PAIR_DIMS, keep)


def stimulated_amplitude(n) -> float:
    """Bosonic enhancement sqrt(n+1) for emission into a mode of occupation n."""
    n = _check_integer_population(n, allow_infinite=False)
    return math.sqrt(n + 1)


def epr_pair() -> PairState:
    """The n = 0 pair (|VV> + |HH>)/sqrt(2)."""
    return amplified_pair(0)


def amplified_pair(n) -> PairState:
    """Bosonic pair emitted next to a matched mode of occupation n.

    Accepts a nonnegative integer or INFINITY.  Amplitudes are
    (sqrt(n+1), 0, 0, 1)/sqrt(n+2); the infinite limit is |VV>.
    """
    n = _check_integer_population(n, allow_infinite=True)
    if math.isinf(n):
        k = qcore.ket([1.0, 0.0, 0.0, 0.0])
    else:
        k = qcore.ket([math.sqrt(n + 1), 0.0, 0.0, 1.0]) / math.sqrt(n + 2)
    return PairState(ket=k, population=n, statistics=BOSON)


def fermionic_pair(occupied: bool) -> PairState:
    """Fermionic variant: amplitude factor sqrt(1-n) with n in {0, 1}.

    Unoccupied reproduces the n = 0 pair; occupied Pauli-blocks the
    matched branch, leaving |HH> exactly.
    """
    if not isinstance(occupied, (bool, np.bool_)):
        raise ContractViolation("occupied must be a boolean")
    if occupied:
        return PairState(
            ket=qcore.ket([0.0, 0.0, 0.0, 1.0]), population=1, statistics=FERMION
        )
    return PairState(
        ket=qcore.ket([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0),
        population=0,
        statistics=FERMION,
    )


def coincidence_rate(theta1: float, theta2: float, state: PairState) -> float:
    """Joint pass probability behind polarizers at theta1 (device side) and theta2.

    For the n = 0 pair this is the maximal-correlation law
    cos^2(theta1 - theta2)/2, normalized to the pair emission rate.
    """
    p1 = qcore.polarizer_projector(theta1)
    p2 = qcore.polarizer_projector(theta2)
    return qcore.detection_probability(state.density(), qcore.tensor(p1, p2))


def remote_rate(n, theta: float) -> float:
    """Singles rate behind the remote polarizer at angle theta, closed form.

    remote_rate(n, theta) = (n cos^2(theta) + 1) / (n + 2), with the
    INFINITY limit cos^2(theta).  Unlike amplified_pair this accepts any
    real n >= 0, so attenuated effective populations can be fed in
    directly.
    """
    n = _check_real_population(n)
    theta = float(theta)
    if not math.isfinite(theta):
        raise ContractViolation("theta must be finite")
    c2 = math.cos(theta) ** 2
    if math.isinf(n):
        return c2
    return (n * c2 + 1.0) / (n + 2.0)


def _check_integer_population(n, allow_infinite: bool) -> float:
    if isinstance(n, bool):
        raise ContractViolation("population must be a number, not a boolean")
    try:
        n = float(n)
    except (TypeError, ValueError):
        raise ContractViolation(f"population must be numeric, got {n!r}") from None
    if math.isnan(n) or n < 0:
        raise ContractViolation(f"population must be >= 0, got {n}")
    if math.isinf(n):
        if not allow_infinite:
            raise ContractViolation("population must be finite here")
        return n
    if n != int(n):
        raise ContractViolation(f"population must be an integer or INFINITY, got {n}")
    return int(n)


def _check_real_population(n) -> float:
    if isinstance(n, bool):
        raise ContractViolation("population must be a number, not a boolean")
    try:
        n = float(n)
    except (TypeError, ValueError):
        raise ContractViolation(f"population must be numeric, got {n!r}") from None
    if math.isnan(n) or n < 0:
        raise ContractViolation(f"population must be >= 0, got {n}")
    return n
