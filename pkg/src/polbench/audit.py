"""No-signalling audits: channels versus the amplified-pair ansatz.

The structural point of this module: physical device models enter as
KrausChannel values and are checked against the remote-marginal
invariance that any CPTP map satisfies, while the amplified-pair
family has no Kraus representation at all and enters only through
state-family comparison (ansatz_signalling_delta).  A model that can
signal is exactly a model that cannot be written here as a channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qcore, states
from .channels import (
    KrausChannel,
    apply_channel,
    noisy_amplifier_channel,
    random_kraus_channel,
)
from .errors import ContractViolation

#: Marginal deviations above this are reported as SIGNALLING.  Far above
#: accumulated rounding (~1e-14), far below any physical effect size.
SIGNALLING_THRESHOLD = 1e-8

NO_SIGNALLING = "NO_SIGNALLING"
SIGNALLING = "SIGNALLING"

#: Fixed polarizer grid for rate tables: 13 points, 0 to pi inclusive.
THETA_GRID = tuple(float(t) for t in np.linspace(0.0, math.pi, 13))


@dataclass(frozen=True)
class SignallingReport:
    """Remote-side comparison of a state before/after a local operation."""

    max_marginal_deviation: float
    rate_delta_at_theta: tuple[tuple[float, float], ...]
    verdict: str


@dataclass(frozen=True)
class SnrReport:
    """Why a noisy amplifier cannot carry a message.

    signal is the largest remote-rate change the channel produces
    (provably ~0); noise_floor is the coincidence-visibility loss the
    same channel causes locally, i.e. the price paid for nothing.
    claimed_delta_at_zero is what the non-physical ansatz of population
    n_claimed would have delivered at theta = 0.
    """

    signal: float
    noise_floor: float
    distinguishable: bool
    n_claimed: float
    claimed_delta_at_zero: float


def channel_signalling_deviation(
    rho: np.ndarray,
    dims: tuple[int, ...],
    channel: KrausChannel,
    target: int,
    theta_grid: tuple[float, ...] = THETA_GRID,
) -> SignallingReport:
    """Compare the remote marginal of rho before and after a local channel.

    The channel acts on subsystem ``target``; the other subsystem is the
    remote one.  When the remote side is a polarization qubit the report
    also tabulates per-angle detection-rate deltas on ``theta_grid``.
    """
    if len(dims) != 2:
        raise ContractViolation("signalling audit expects a bipartite state")
    if target not in (0, 1):
        raise ContractViolation("target must be 0 or 1")
    remote = 1 - target
    rho_after = apply_channel(rho, channel, dims, target)
    marg_before = qcore.partial_trace(rho, dims, keep=remote)
    marg_after = qcore.partial_trace(rho_after, dims, keep=remote)
    deviation = float(np.abs(marg_after - marg_before).max())

    deltas = ()
    if dims[remote] == 2:
        deltas = tuple(
            (
                theta,
                qcore.detection_probability(marg_after, qcore.polarizer_projector(theta))
                - qcore.detection_probability(marg_before, qcore.polarizer_projector(theta)),
            )
            for theta in theta_grid
        )
    return SignallingReport(
        max_marginal_deviation=deviation,
        rate_delta_at_theta=deltas,
        verdict=_verdict(deviation),
    )


def ansatz_signalling_delta(n, theta: float) -> float:
    """Remote-rate change the amplified-pair family would produce.

    remote_rate(n, theta) - remote_rate(0, theta)
        = (n cos^2(theta) + 1)/(n + 2) - 1/2,

    which is n/(2(n+2)) at theta = 0 and exactly zero at theta = pi/4
    for every n.  Nonzero values here are the content of the signalling
    conjecture, not a property of any channel.
    """
    return states.remote_rate(n, theta) - states.remote_rate(0, theta)


@dataclass(frozen=True)
class FuzzReport:
    """Summary of a randomized no-signalling campaign."""

    channels_tested: int
    max_marginal_deviation: float
    signalling_count: int
    verdict: str
    worst_label: str


def fuzz_no_signalling(
    count: int,
    seed: int,
    dim_target: int = 2,
    dim_remote: int = 2,
    max_kraus: int = 4,
) -> tuple[FuzzReport, list[tuple[str, SignallingReport]]]:
    """Apply ``count`` random CPTP channels to random bipartite states.

    Every report must come back NO_SIGNALLING; anything else is a defect
    in the physics engine itself, not a discovery.  Returns the summary
    plus (label, report) pairs for tabulation.
    """
    if count < 1:
        raise ContractViolation("count must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    dims = (dim_target, dim_remote)
    rows: list[tuple[str, SignallingReport]] = []
    worst = -1.0
    worst_label = ""
    signalling = 0
    for i in range(count):
        n_ops = int(rng.integers(1, max_kraus + 1))
        channel = random_kraus_channel(rng, dim=dim_target, n_ops=n_ops)
        rho = qcore.random_density_matrix(rng, dim_target * dim_remote)
        report = channel_signalling_deviation(rho, dims, channel, target=0)
        label = f"{i}:{channel.label}"
        rows.append((label, report))
        if report.verdict == SIGNALLING:
            signalling += 1
        if report.max_marginal_deviation > worst:
            worst = report.max_marginal_deviation
            worst_label = label
    summary = FuzzReport(
        channels_tested=count,
        max_marginal_deviation=worst,
        signalling_count=signalling,
        verdict=NO_SIGNALLING if signalling == 0 else SIGNALLING,
        worst_label=worst_label,
    )
    return summary, rows


def snr_report(p_align: float, p_noise: float, n_claimed) -> SnrReport:
    """Quantify the channel's remote effect against its local noise cost.

    The noisy amplifier is applied to the device-side photon of the
    n = 0 pair.  signal: max remote singles-rate delta over the theta
    grid.  noise_floor: the drop in coincidence visibility at
    theta1 = theta2 = pi/4, where dephasing bites hardest.
    """
    channel = noisy_amplifier_channel(p_align, p_noise)
    pair = states.epr_pair()
    rho = pair.density()
    report = channel_signalling_deviation(rho, states.PAIR_DIMS, channel, target=0)
    signal = max((abs(d) for _, d in report.rate_delta_at_theta), default=0.0)

    quarter = math.pi / 4.0
    joint = qcore.tensor(
        qcore.polarizer_projector(quarter), qcore.polarizer_projector(quarter)
    )
    before = qcore.detection_probability(rho, joint)
    after = qcore.detection_probability(
        apply_channel(rho, channel, states.PAIR_DIMS, target=0), joint
    )
    noise_floor = abs(after - before)
    return SnrReport(
        signal=signal,
        noise_floor=noise_floor,
        distinguishable=signal > noise_floor,
        n_claimed=float(n_claimed),
        claimed_delta_at_zero=ansatz_signalling_delta(n_claimed, 0.0),
    )


def _verdict(deviation: float) -> str:
    return SIGNALLING if deviation > SIGNALLING_THRESHOLD else NO_SIGNALLING
