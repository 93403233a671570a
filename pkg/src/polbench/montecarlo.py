"""Trial-by-trial click sampling on top of the analytic scenario rates.

Randomness contract: all draws come from numpy's Philox generator, a
named counter-based algorithm with platform-independent output.  A run
is identified by a 64-bit seed; independent substreams for parallel or
paired work are derived as ``Philox(key=seed).jumped(index)``, so
partitioned runs merge into exactly the counts a serial run with the
same derivation would produce.  Sampled click counts are pinned in the
test suite to freeze this contract.

Coincidences are never sampled as independent singles: each trial
draws one joint arrival outcome for the whole bench, then thins every
detector independently by its efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scenarios
from .errors import ContractViolation
from .scenarios import NLModel, OutcomeModel, Scenario

_SEED_MAX = 2**64


@dataclass(frozen=True)
class CountRecord:
    """Click tally for one detector under one choice configuration."""

    detector: str
    clicks: int
    trials: int
    rate_estimate: float
    ci95_halfwidth: float


@dataclass(frozen=True)
class DistinguishabilityReport:
    """Can the receiver tell device-in from device-out at this sample size?"""

    detector: str
    rate_out: float
    rate_in: float
    p_value_proxy: float
    choices_distinguishable: bool
    trials_per_choice: int


def generator(seed: int) -> np.random.Generator:
    """Philox stream for a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=_check_seed(seed)))


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent stream index of a seed (jumped Philox counter)."""
    if index < 0:
        raise ContractViolation("substream index must be >= 0")
    return np.random.Generator(np.random.Philox(key=_check_seed(seed)).jumped(index))


def sample_counts(
    s: Scenario,
    choice: bool,
    trials: int,
    seed: int,
    detector_efficiency: float = 1.0,
    model_override: NLModel | None = None,
    stream_index: int = 0,
) -> list[CountRecord]:
    """Simulate ``trials`` emissions and tally clicks per detector.

    Draws come from ``substream(seed, stream_index)``; index 0 is the
    base stream.  Pair layouts with two detectors also report a derived
    ``coincidence`` record, counted per trial (both photons arrived and
    both detectors fired), matching how a real counter is gated.
    """
    _check_trials(trials)
    _check_efficiency(detector_efficiency)
    om = scenarios.outcome_distribution(s, choice, model_override)
    return _tally(om, trials, substream(seed, stream_index), detector_efficiency)


def distinguishability_trials(
    s: Scenario,
    model,
    n,
    trials_per_choice: int,
    seed: int,
    detector_efficiency: float = 1.0,
) -> DistinguishabilityReport:
    """Two-sample rate comparison at the detector away from the choice.

    Runs device-out on substream 0 and device-in on substream 1 of the
    seed, then flags the choices distinguishable iff the rate gap
    exceeds three combined standard errors.  p_value_proxy is the
    two-sided normal tail of the z statistic (a proxy: the counts are
    binomial, not normal).

    ``model`` is an NLModel, or the kind string "ansatz" or "cptp" to
    be combined with population ``n`` and default channel parameters.
    """
    _check_trials(trials_per_choice)
    _check_efficiency(detector_efficiency)
    override = _as_model(model, n)
    det = scenarios.remote_detector_id(s)

    tallies = {}
    for stream, choice in ((0, False), (1, True)):
        om = scenarios.outcome_distribution(s, choice, override)
        records = _tally(om, trials_per_choice, substream(seed, stream), detector_efficiency)
        tallies[choice] = {r.detector: r for r in records}[det]

    p_out = tallies[False].rate_estimate
    p_in = tallies[True].rate_estimate
    gap = abs(p_in - p_out)
    se = math.sqrt(
        _standard_error(p_out, trials_per_choice) ** 2
        + _standard_error(p_in, trials_per_choice) ** 2
    )
    if se == 0.0:
        distinguishable = gap > 0.0
        z = math.inf if gap > 0.0 else 0.0
    else:
        distinguishable = gap > 3.0 * se
        z = gap / se
    return DistinguishabilityReport(
        detector=det,
        rate_out=p_out,
        rate_in=p_in,
        p_value_proxy=math.erfc(z / math.sqrt(2.0)) if math.isfinite(z) else 0.0,
        choices_distinguishable=distinguishable,
        trials_per_choice=trials_per_choice,
    )


def _tally(
    om: OutcomeModel, trials: int, rng: np.random.Generator, efficiency: float
) -> list[CountRecord]:
    cats = rng.choice(len(om.labels), size=trials, p=om.probs)
    det_ids = list(om.arrivals)
    if efficiency >= 1.0:
        fires = np.ones((trials, len(det_ids)), dtype=bool)
    else:
        fires = rng.random((trials, len(det_ids))) < efficiency

    records = []
    arrived = {}
    for j, det in enumerate(det_ids):
        hit = np.isin(cats, om.arrivals[det])
        arrived[det] = hit
        records.append(_record(det, int(np.count_nonzero(hit & fires[:, j])), trials))
    if om.pair_detectors is not None:
        first, second = om.pair_detectors
        j1, j2 = det_ids.index(first), det_ids.index(second)
        both = (cats == 0) & fires[:, j1] & fires[:, j2]
        records.append(
            _record(scenarios.COINCIDENCE_ID, int(np.count_nonzero(both)), trials)
        )
    return records


def _record(detector: str, clicks: int, trials: int) -> CountRecord:
    p = clicks / trials
    return CountRecord(
        detector=detector,
        clicks=clicks,
        trials=trials,
        rate_estimate=p,
        ci95_halfwidth=1.96 * _standard_error(p, trials),
    )


def _standard_error(p: float, trials: int) -> float:
    return math.sqrt(p * (1.0 - p) / trials)


def _as_model(model, n) -> NLModel:
    if isinstance(model, NLModel):
        return model
    if model == scenarios.ANSATZ:
        return NLModel(scenarios.ANSATZ, population=float(n))
    if model == scenarios.CPTP:
        return NLModel(scenarios.CPTP, population=float(n))
    raise ContractViolation(
        f"model must be an NLModel, {scenarios.ANSATZ!r}, or {scenarios.CPTP!r}; got {model!r}"
    )


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ContractViolation("seed must be an integer")
    if not 0 <= int(seed) < _SEED_MAX:
        raise ContractViolation(f"seed must be in [0, 2^64), got {seed}")
    return int(seed)


def _check_trials(trials) -> None:
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ContractViolation(f"trials must be a positive integer, got {trials!r}")


def _check_efficiency(eff) -> None:
    if not (isinstance(eff, (int, float)) and 0.0 < float(eff) <= 1.0):
        raise ContractViolation(f"detector efficiency must be in (0, 1], got {eff!r}")
