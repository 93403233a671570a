"""Declarative optical-bench scenarios with a binary device-in/device-out choice.

A scenario is a set of beam paths fed by one source, with one path
whose tail swaps between two element sequences (the "choice"): either
ordinary passive optics, or an amplifying device.  Comparing detector
rates across the two choices is what the signalling question amounts
to operationally.

Supported layouts follow the definite-polarization-path regime: a
calcite element is a lossless polarizing beam splitter that correlates
the beam path with polarization (V continues into the first arm, H
into the second), so the path label never needs its own Hilbert-space
factor.  A second calcite undoes the correlation.  Phase-sensitive
interferometry is not modeled; mirrors are exact identities.

Sources:

* ``epr`` - a polarization pair (|VV> + |HH>)/sqrt(2); the two paths
  are the two photons.
* ``unpolarized`` - one photon in the maximally mixed polarization
  state, carried as a purification (|r0,V> + |r1,H>)/sqrt(2) with an
  internal reference qubit, so amplitude-level device models act on a
  pure state and the same pipeline handles every layout.

Device models on an amplifier element:

* ``ansatz`` - multiply the amplitude of the matched-polarization
  branch by sqrt(n+1), then renormalize globally.  The renormalization
  reaches every branch of the state, including ones that never met the
  device; that is the acausal step no quantum channel can perform, and
  it is applied here at the amplitude level on purpose.  A pass-through
  device (one the beam continues past) is treated identically to a
  terminal one; the model gives no other rule.
* ``cptp`` - the trace-preserving noisy-amplifier channel from
  :mod:`polbench.channels`, applied locally to the device's subsystem.
* ``attenuated`` - the ansatz with its population scaled by a
  distance-dependent coupling, n_eff = g(d) * n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import qcore, states
from .channels import (
    AttenuationModel,
    apply_channel,
    attenuated_population,
    noisy_amplifier_channel,
)
from .errors import ContractViolation, ScenarioError

SOURCE_EPR = "epr"
SOURCE_UNPOLARIZED = "unpolarized"

CALCITE = "calcite"
MIRROR = "mirror"
POLARIZER = "polarizer"
DETECTOR = "detector"
NL_DEVICE = "nl_device"
ONE_WAY_FILTER = "one_way_filter"

_ELEMENT_KINDS = (CALCITE, MIRROR, POLARIZER, DETECTOR, NL_DEVICE, ONE_WAY_FILTER)

ANSATZ = "ansatz"
CPTP = "cptp"
ATTENUATED = "attenuated"

_MODEL_KINDS = (ANSATZ, CPTP, ATTENUATED)

#: Reserved id for the derived joint-detection record of pair layouts.
COINCIDENCE_ID = "coincidence"


@dataclass(frozen=True)
class NLModel:
    """Parameters of the amplifying device placed by the choice."""

    kind: str = ANSATZ
    population: float = 0.0
    p_align: float = 1.0
    p_noise: float = 0.0
    attenuation: AttenuationModel | None = None
    distance: float = 0.0

    def __post_init__(self):
        if self.kind not in _MODEL_KINDS:
            raise ContractViolation(
                f"unknown device model {self.kind!r}; expected one of {_MODEL_KINDS}"
            )
        n = self.population
        if isinstance(n, bool) or not isinstance(n, (int, float)):
            raise ContractViolation("population must be a number")
        if math.isnan(n) or n < 0:
            raise ContractViolation(f"population must be >= 0, got {n}")
        for name, p in (("p_align", self.p_align), ("p_noise", self.p_noise)):
            if not (isinstance(p, (int, float)) and 0.0 <= float(p) <= 1.0):
                raise ContractViolation(f"{name} must be in [0, 1], got {p}")
        if self.kind == ATTENUATED:
            if self.attenuation is None:
                raise ContractViolation("attenuated model requires an attenuation law")
            if not (math.isfinite(self.distance) and self.distance >= 0):
                raise ContractViolation("distance must be finite and >= 0")

    def effective_population(self) -> float:
        """Population after any distance attenuation (None-safe for cptp)."""
        if self.kind == ATTENUATED:
            return attenuated_population(self.population, self.distance, self.attenuation)
        return float(self.population)


@dataclass(frozen=True)
class Element:
    """One bench element; the meaning of the optional fields depends on kind."""

    kind: str
    theta: float = 0.0
    detector_id: str = ""
    model: NLModel | None = None

    def __post_init__(self):
        if self.kind not in _ELEMENT_KINDS:
            raise ScenarioError(f"unknown element kind {self.kind!r}")


def polarizer(theta: float) -> Element:
    theta = float(theta)
    if not math.isfinite(theta):
        raise ContractViolation("polarizer angle must be finite")
    return Element(POLARIZER, theta=theta)


def detector(detector_id: str) -> Element:
    if not isinstance(detector_id, str) or not detector_id:
        raise ContractViolation("detector id must be a non-empty string")
    if detector_id == COINCIDENCE_ID:
        raise ContractViolation(f"detector id {COINCIDENCE_ID!r} is reserved")
    return Element(DETECTOR, detector_id=detector_id)


def nl_device(model: NLModel) -> Element:
    if not isinstance(model, NLModel):
        raise ContractViolation("nl_device requires an NLModel")
    return Element(NL_DEVICE, model=model)


def mirror() -> Element:
    return Element(MIRROR)


def calcite() -> Element:
    return Element(CALCITE)


def one_way_filter() -> Element:
    """Hypothetical direction-selective element: recorded, never acted on.

    No linear-optics realization is known; until one is specified there
    is nothing for the engine to do with it, so it is a structural no-op
    whose presence is merely flagged on the result.
    """
    return Element(ONE_WAY_FILTER)


@dataclass(frozen=True)
class Scenario:
    name: str
    source: str
    paths: tuple[tuple[Element, ...], ...]
    choice_path: int
    choice_tails: tuple[tuple[Element, ...], tuple[Element, ...]]
    description: str = ""


@dataclass(frozen=True)
class DetectorStats:
    """Normalized per-detector rates (clicks per emitted photon/pair)."""

    rates: dict[str, float]
    filter_present: bool = False


@dataclass(frozen=True)
class OutcomeModel:
    """Joint click distribution for one run configuration.

    labels name mutually exclusive photon-arrival outcomes, probs is
    the distribution over them, and arrivals maps each detector id to
    the outcome indices that deliver it a photon.  pair_detectors is
    set for two-detector pair layouts, where the first outcome is the
    joint arrival used for coincidence counting.
    """

    labels: tuple[str, ...]
    probs: np.ndarray = field(repr=False)
    arrivals: dict[str, tuple[int, ...]]
    pair_detectors: tuple[str, str] | None = None


# ---------------------------------------------------------------------------
# Built-in layouts
# ---------------------------------------------------------------------------


def build_fig1(theta=0.0, theta_right=None, model: NLModel | None = None) -> Scenario:
    """Entangled pair; polarizer+detector on the left (remote) beam.

    The right beam's tail is the choice: polarizer+detector, or the
    amplifying device.  theta is the remote polarizer angle from the
    device axis; theta_right (default: equal) only matters with the
    device out, where the coincidence rate follows cos^2(t1 - t2)/2.
    """
    model = model if model is not None else NLModel(ANSATZ, population=0)
    t_right = theta if theta_right is None else theta_right
    return Scenario(
        name="fig1",
        source=SOURCE_EPR,
        paths=((polarizer(theta), detector("left")), ()),
        choice_path=1,
        choice_tails=(
            (polarizer(t_right), detector("right")),
            (nl_device(model),),
        ),
        description="pair source; left beam measured, right beam ends in a "
        "polarizer+detector or in the amplifier",
    )


def build_fig2(model: NLModel | None = None) -> Scenario:
    """Unpolarized photon split by calcite; detector A watches the V arm.

    The H arm ends in detector B or in the amplifier (axis parallel to
    that arm's polarization).  Detector A's rate is the arm population
    fixed at the splitter, so only the global ansatz renormalization
    can move it.
    """
    model = model if model is not None else NLModel(ANSATZ, population=0)
    return Scenario(
        name="fig2",
        source=SOURCE_UNPOLARIZED,
        paths=((calcite(),), (detector("A"),), ()),
        choice_path=2,
        choice_tails=((detector("B"),), (nl_device(model),)),
        description="unpolarized photon split by calcite; V arm watched by "
        "detector A, H arm ends in detector B or in the amplifier",
    )


def build_fig3(theta=0.0, model: NLModel | None = None) -> Scenario:
    """Split, guide, recombine; one polarizer+detector behind the merge.

    The device optionally sits in the V arm as a pass-through.  With it
    out (or with any channel model in) the recombined beam stays
    unpolarized and the rate is 1/2 at every theta; the ansatz instead
    biases the V/H populations globally.
    """
    model = model if model is not None else NLModel(ANSATZ, population=0)
    return Scenario(
        name="fig3",
        source=SOURCE_UNPOLARIZED,
        paths=(
            (calcite(),),
            (),
            (mirror(),),
            (calcite(), polarizer(theta), detector("out")),
        ),
        choice_path=1,
        choice_tails=((mirror(),), (nl_device(model), mirror())),
        description="unpolarized photon split and recombined; the amplifier "
        "optionally intersects the V arm, detector behind a polarizer on the "
        "merged beam",
    )


BUILTINS = {"fig1": build_fig1, "fig2": build_fig2, "fig3": build_fig3}

#: Builders that take a polarizer angle argument.
THETA_BUILDERS = ("fig1", "fig3")


def list_builtins() -> dict[str, str]:
    return {name: builder().description for name, builder in BUILTINS.items()}


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_scenario(s: Scenario) -> None:
    """Raise ScenarioError (naming the offending path) on malformed layouts."""
    if s.source not in (SOURCE_EPR, SOURCE_UNPOLARIZED):
        raise ScenarioError(f"unknown source {s.source!r}")
    if not s.paths:
        raise ScenarioError("scenario has no paths")
    if not 0 <= s.choice_path < len(s.paths):
        raise ScenarioError(
            f"choice_path {s.choice_path} outside path range 0..{len(s.paths) - 1}"
        )
    if len(s.choice_tails) != 2:
        raise ScenarioError("choice_tails must hold exactly two alternatives")
    for choice in (False, True):
        _validate_effective(s, _effective_paths(s, choice), choice)


def _validate_effective(s, paths, choice) -> None:
    tag = "device in" if choice else "device out"
    seen_ids: set[str] = set()
    nl_count = 0
    for i, path in enumerate(paths):
        for pos, el in enumerate(path):
            if el.kind == DETECTOR:
                if el.detector_id in seen_ids:
                    raise ScenarioError(
                        f"duplicate detector id {el.detector_id!r} (path {i}, {tag})"
                    )
                seen_ids.add(el.detector_id)
                if pos != len(path) - 1:
                    raise ScenarioError(
                        f"detector {el.detector_id!r} is not terminal on path {i} ({tag})"
                    )
            elif el.kind == NL_DEVICE:
                nl_count += 1
                if el.model.kind == ATTENUATED and el.model.attenuation is None:
                    raise ScenarioError(f"attenuated device on path {i} lacks a law")
    if nl_count > 1:
        raise ScenarioError(f"more than one amplifier element present ({tag}); unsupported")

    if s.source == SOURCE_EPR:
        if len(paths) != 2:
            raise ScenarioError("epr source requires exactly two paths")
        for i, path in enumerate(paths):
            if not path:
                raise ScenarioError(f"path {i} is empty ({tag})")
            if any(el.kind == CALCITE for el in path):
                raise ScenarioError(f"calcite on pair path {i} is unsupported")
            if path[-1].kind not in (DETECTOR, NL_DEVICE):
                raise ScenarioError(
                    f"path {i} must terminate in a detector or device ({tag})"
                )
        return

    # Unpolarized source: trunk, two arms, optional merge path.
    if len(paths) not in (3, 4):
        raise ScenarioError(
            "unpolarized source requires a trunk, two arms, and optionally a merge path"
        )
    trunk = paths[0]
    if not trunk or trunk[-1].kind != CALCITE:
        raise ScenarioError("path 0 (trunk) must end with a calcite splitter")
    if any(el.kind not in (MIRROR, ONE_WAY_FILTER, CALCITE) for el in trunk):
        raise ScenarioError("path 0 (trunk) admits only mirrors and filters before the calcite")
    if sum(el.kind == CALCITE for el in trunk) != 1:
        raise ScenarioError("path 0 (trunk) must contain exactly one calcite")
    merge = len(paths) == 4
    for i in (1, 2):
        arm = paths[i]
        if not arm:
            raise ScenarioError(f"path {i} (arm) is empty ({tag})")
        if any(el.kind == CALCITE for el in arm):
            raise ScenarioError(f"calcite inside arm path {i} is unsupported")
        if merge:
            if any(el.kind in (POLARIZER, DETECTOR) for el in arm):
                raise ScenarioError(
                    f"path {i} feeds the merge and admits no polarizer or detector ({tag})"
                )
            if arm[-1].kind != MIRROR:
                raise ScenarioError(f"path {i} must end with a mirror into the merge ({tag})")
        elif arm[-1].kind not in (DETECTOR, NL_DEVICE):
            raise ScenarioError(
                f"path {i} must terminate in a detector or device ({tag})"
            )
    if merge:
        out = paths[3]
        if not out or out[0].kind != CALCITE:
            raise ScenarioError("path 3 (merge) must start with the recombining calcite")
        if out[-1].kind != DETECTOR:
            raise ScenarioError(f"path 3 (merge) must terminate in a detector ({tag})")
        if any(el.kind == NL_DEVICE for el in out):
            raise ScenarioError("amplifier on the merged beam is unsupported")
        if sum(el.kind == CALCITE for el in out) != 1:
            raise ScenarioError("path 3 (merge) must contain exactly one calcite")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def run_scenario(s: Scenario, choice: bool, model_override: NLModel | None = None) -> DetectorStats:
    """Evaluate one configuration; choice False = device out, True = in.

    Amplitude-level device models are applied to the emitted state
    before anything else (the source-level reading of the ansatz);
    channel models are applied locally at the device's position.
    Returns normalized per-detector rates, plus a derived
    ``coincidence`` entry when both pair beams end in detectors.
    """
    validate_scenario(s)
    if not isinstance(choice, (bool, np.bool_)):
        raise ContractViolation("choice must be a boolean (False = out, True = in)")
    paths = _effective_paths(s, bool(choice))
    if model_override is not None:
        if not isinstance(model_override, NLModel):
            raise ContractViolation("model_override must be an NLModel")
        paths = tuple(_with_model(p, model_override) for p in paths)
    if s.source == SOURCE_EPR:
        return _run_pair(paths)
    return _run_single_photon(paths)


def signalling_delta(s: Scenario, model_override: NLModel | None = None) -> float:
    """Largest |rate(in) - rate(out)| over detectors away from the choice path.

    Detectors on the choice path (and the derived coincidence record,
    which needs both sides) are excluded: only a rate change somewhere
    the device is not would carry a message.
    """
    stats_out = run_scenario(s, False, model_override)
    stats_in = run_scenario(s, True, model_override)
    excluded = _choice_detector_ids(s) | {COINCIDENCE_ID}
    common = (set(stats_out.rates) & set(stats_in.rates)) - excluded
    if not common:
        raise ScenarioError(
            f"scenario {s.name!r} has no detector away from the choice path to compare"
        )
    return max(abs(stats_in.rates[d] - stats_out.rates[d]) for d in sorted(common))


def remote_detector_id(s: Scenario) -> str:
    """The detector signalling_delta compares (first in sorted order)."""
    stats_out = run_scenario(s, False)
    stats_in = run_scenario(s, True)
    excluded = _choice_detector_ids(s) | {COINCIDENCE_ID}
    common = (set(stats_out.rates) & set(stats_in.rates)) - excluded
    if not common:
        raise ScenarioError(f"scenario {s.name!r} has no remote detector")
    return sorted(common)[0]


def outcome_distribution(
    s: Scenario, choice: bool, model_override: NLModel | None = None
) -> OutcomeModel:
    """Joint arrival distribution used for trial-by-trial sampling."""
    stats = run_scenario(s, choice, model_override)
    paths = _effective_paths(s, bool(choice))
    ids_by_path = [
        [el.detector_id for el in path if el.kind == DETECTOR] for path in paths
    ]

    if s.source == SOURCE_EPR and all(ids_by_path[i] for i in (0, 1)):
        first, second = ids_by_path[0][0], ids_by_path[1][0]
        p1 = stats.rates[first]
        p2 = stats.rates[second]
        pboth = stats.rates[COINCIDENCE_ID]
        probs = _clean_distribution(
            [pboth, p1 - pboth, p2 - pboth, 1.0 - p1 - p2 + pboth]
        )
        return OutcomeModel(
            labels=("both", "first_only", "second_only", "neither"),
            probs=probs,
            arrivals={first: (0, 1), second: (0, 2)},
            pair_detectors=(first, second),
        )

    ids = [d for ids in ids_by_path for d in ids]
    if len(ids) == 1:
        p = stats.rates[ids[0]]
        return OutcomeModel(
            labels=("hit", "miss"),
            probs=_clean_distribution([p, 1.0 - p]),
            arrivals={ids[0]: (0,)},
        )
    # Mutually exclusive single-photon detectors (one per arm).
    raw = [stats.rates[d] for d in ids]
    probs = _clean_distribution(raw + [1.0 - sum(raw)])
    return OutcomeModel(
        labels=tuple(ids) + ("absorbed",),
        probs=probs,
        arrivals={d: (i,) for i, d in enumerate(ids)},
    )


def _effective_paths(s: Scenario, choice: bool):
    tail = s.choice_tails[1 if choice else 0]
    return tuple(
        tuple(p) + (tuple(tail) if i == s.choice_path else ())
        for i, p in enumerate(s.paths)
    )


def _with_model(path, model: NLModel):
    return tuple(
        replace(el, model=model) if el.kind == NL_DEVICE else el for el in path
    )


def _choice_detector_ids(s: Scenario) -> set[str]:
    ids = {
        el.detector_id
        for el in s.paths[s.choice_path]
        if el.kind == DETECTOR
    }
    for tail in s.choice_tails:
        ids |= {el.detector_id for el in tail if el.kind == DETECTOR}
    return ids


def _nl_devices(paths):
    return [
        (i, el.model)
        for i, path in enumerate(paths)
        for el in path
        if el.kind == NL_DEVICE
    ]


def _has_filter(paths) -> bool:
    return any(el.kind == ONE_WAY_FILTER for path in paths for el in path)


def _axis_matrix(n_eff: float, axis: int) -> np.ndarray:
    """Amplitude reweight diag with sqrt(n_eff + 1) on the matched axis."""
    if math.isinf(n_eff):
        m = np.zeros((2, 2), dtype=np.complex128)
        m[axis, axis] = 1.0
        return m
    m = np.eye(2, dtype=np.complex128)
    m[axis, axis] = math.sqrt(n_eff + 1.0)
    return m


def _apply_ansatz(rho, dims, target, axis, n_eff):
    e = qcore.embed(_axis_matrix(n_eff, axis), dims, target)
    out = e @ rho @ e.conj().T
    tr = float(np.trace(out).real)
    if tr <= 0.0:
        raise ScenarioError(
            "amplifier matched branch has zero weight; the reweighting is undefined"
        )
    return out / tr


def _apply_cptp(rho, dims, target, model: NLModel):
    channel = noisy_amplifier_channel(model.p_align, model.p_noise)
    return apply_channel(rho, channel, dims, target)


def _run_pair(paths) -> DetectorStats:
    dims = states.PAIR_DIMS
    rho = states.epr_pair().density()
    for path_idx, model in _nl_devices(paths):
        if model.kind == CPTP:
            rho = _apply_cptp(rho, dims, path_idx, model)
        else:
            rho = _apply_ansatz(rho, dims, path_idx, axis=0, n_eff=model.effective_population())

    chains = [np.eye(2, dtype=np.complex128) for _ in paths]
    det_ids: list[str | None] = [None, None]
    for i, path in enumerate(paths):
        for el in path:
            if el.kind == POLARIZER:
                chains[i] = qcore.polarizer_projector(el.theta) @ chains[i]
            elif el.kind == DETECTOR:
                det_ids[i] = el.detector_id
    rates: dict[str, float] = {}
    for i in (0, 1):
        if det_ids[i] is not None:
            e = qcore.embed(chains[i], dims, i)
            rates[det_ids[i]] = _rate(np.trace(e @ rho @ e.conj().T).real)
    if det_ids[0] is not None and det_ids[1] is not None:
        e = qcore.tensor(chains[0], chains[1])
        rates[COINCIDENCE_ID] = _rate(np.trace(e @ rho @ e.conj().T).real)
    return DetectorStats(rates=rates, filter_present=_has_filter(paths))


def _run_single_photon(paths) -> DetectorStats:
    dims = (2, 2)  # (reference, polarization)
    rho = states.epr_pair().density()  # purified maximally mixed photon
    merge = len(paths) == 4
    arm_axis = {1: 0, 2: 1}

    devices = _nl_devices(paths)
    for path_idx, model in devices:
        if model.kind != CPTP:
            rho = _apply_ansatz(
                rho, dims, target=1, axis=arm_axis[path_idx], n_eff=model.effective_population()
            )

    rates: dict[str, float] = {}
    if merge:
        # Coherent regime: the arms recombine, so a channel on the device's
        # arm acts on the (path ==) polarization qubit of the whole state.
        for _, model in devices:
            if model.kind == CPTP:
                rho = _apply_cptp(rho, dims, target=1, model=model)
        chain = np.eye(2, dtype=np.complex128)
        det_id = None
        for el in paths[3]:
            if el.kind == POLARIZER:
                chain = qcore.polarizer_projector(el.theta) @ chain
            elif el.kind == DETECTOR:
                det_id = el.detector_id
        e = qcore.embed(chain, dims, 1)
        rates[det_id] = _rate(np.trace(e @ rho @ e.conj().T).real)
        return DetectorStats(rates=rates, filter_present=_has_filter(paths))

    # Branch regime: arm populations are fixed at the splitter; everything
    # after it acts on that arm's conditional state only.
    for arm_idx in (1, 2):
        axis = arm_axis[arm_idx]
        proj = qcore.embed(np.diag([1.0 - axis, float(axis)]).astype(np.complex128), dims, 1)
        weight = _rate(np.trace(rho @ proj).real)
        cond = (proj @ rho @ proj) / weight if weight > 0.0 else None
        for el in paths[arm_idx]:
            if el.kind == NL_DEVICE and el.model.kind == CPTP and cond is not None:
                cond = _apply_cptp(cond, dims, target=1, model=el.model)
            elif el.kind == POLARIZER:
                if cond is None:
                    continue
                p = qcore.embed(qcore.polarizer_projector(el.theta), dims, 1)
                sub = _rate(np.trace(cond @ p).real)
                weight *= sub
                cond = (p @ cond @ p) / sub if sub > 0.0 else None
            elif el.kind == DETECTOR:
                rates[el.detector_id] = weight
    return DetectorStats(rates=rates, filter_present=_has_filter(paths))


def _rate(value: float) -> float:
    value = float(value)
    if value < -qcore.ATOL_POSITIVITY or value > 1.0 + qcore.ATOL_POSITIVITY:
        raise ContractViolation(f"rate {value} outside [0, 1] beyond tolerance")
    return min(1.0, max(0.0, value))


def _clean_distribution(raw) -> np.ndarray:
    probs = np.clip(np.asarray(raw, dtype=np.float64), 0.0, 1.0)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        raise ContractViolation(f"outcome probabilities sum to {total}, not 1")
    return probs / total


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

_MODEL_DOC_KEYS = {
    "kind", "population", "p_align", "p_noise", "attenuation", "distance",
}


def load_scenario_file(path) -> Scenario:
    """Read a scenario from a JSON description (schema in the README).

    Top level: name, source, paths (list of element lists), choice_path,
    choice_tails {"out": [...], "in": [...]}, optional description.
    Angles are radians.  Populations accept the string "inf".
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from None
    try:
        s = scenario_from_dict(raw)
        validate_scenario(s)
    except (ScenarioError, ContractViolation) as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    return s


def scenario_from_dict(raw) -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario description must be a JSON object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError("'name' must be a non-empty string")
    source = raw.get("source")
    if source not in (SOURCE_EPR, SOURCE_UNPOLARIZED):
        raise ScenarioError(f"'source' must be 'epr' or 'unpolarized', got {source!r}")
    paths_raw = raw.get("paths")
    if not isinstance(paths_raw, list) or not paths_raw:
        raise ScenarioError("'paths' must be a non-empty list of element lists")
    paths = []
    for i, path in enumerate(paths_raw):
        if not isinstance(path, list):
            raise ScenarioError(f"path {i} must be a list of elements")
        paths.append(tuple(_element_from_dict(el, where=f"path {i}") for el in path))
    choice_path = raw.get("choice_path")
    if not isinstance(choice_path, int) or isinstance(choice_path, bool):
        raise ScenarioError("'choice_path' must be an integer path index")
    tails_raw = raw.get("choice_tails")
    if not isinstance(tails_raw, dict) or set(tails_raw) != {"out", "in"}:
        raise ScenarioError("'choice_tails' must be an object with 'out' and 'in' lists")
    tails = []
    for key in ("out", "in"):
        tail = tails_raw[key]
        if not isinstance(tail, list):
            raise ScenarioError(f"choice tail {key!r} must be a list of elements")
        tails.append(tuple(_element_from_dict(el, where=f"tail {key!r}") for el in tail))
    description = raw.get("description", "")
    if not isinstance(description, str):
        raise ScenarioError("'description' must be a string")
    return Scenario(
        name=name,
        source=source,
        paths=tuple(paths),
        choice_path=choice_path,
        choice_tails=(tails[0], tails[1]),
        description=description,
    )


def _element_from_dict(raw, where: str) -> Element:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ScenarioError(f"{where}: each element must be an object with a 'kind'")
    kind = raw["kind"]
    try:
        if kind == POLARIZER:
            return polarizer(_number(raw, "theta", where))
        if kind == DETECTOR:
            det_id = raw.get("id")
            if not isinstance(det_id, str):
                raise ScenarioError(f"{where}: detector element needs a string 'id'")
            return detector(det_id)
        if kind == NL_DEVICE:
            return nl_device(_model_from_dict(raw.get("model"), where))
        if kind == MIRROR:
            return mirror()
        if kind == CALCITE:
            return calcite()
        if kind == ONE_WAY_FILTER:
            return one_way_filter()
    except ContractViolation as exc:
        raise ScenarioError(f"{where}: {exc}") from None
    raise ScenarioError(f"{where}: unknown element kind {kind!r}")


def _model_from_dict(raw, where: str) -> NLModel:
    if not isinstance(raw, dict):
        raise ScenarioError(f"{where}: nl_device needs a 'model' object")
    unknown = set(raw) - _MODEL_DOC_KEYS
    if unknown:
        raise ScenarioError(f"{where}: unknown model fields {sorted(unknown)}")
    kind = raw.get("kind")
    if kind not in _MODEL_KINDS:
        raise ScenarioError(f"{where}: model kind must be one of {_MODEL_KINDS}, got {kind!r}")
    population = raw.get("population", 0)
    if population == "inf":
        population = math.inf
    attenuation = None
    if raw.get("attenuation") is not None:
        att = raw["attenuation"]
        if not isinstance(att, dict) or "kind" not in att:
            raise ScenarioError(f"{where}: 'attenuation' must be an object with a 'kind'")
        try:
            attenuation = AttenuationModel(
                kind=att["kind"],
                scale=float(att.get("scale", 1.0)),
                cutoff=float(att.get("cutoff", 1.0)),
            )
        except ContractViolation as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    try:
        return NLModel(
            kind=kind,
            population=float(population),
            p_align=float(raw.get("p_align", 1.0)),
            p_noise=float(raw.get("p_noise", 0.0)),
            attenuation=attenuation,
            distance=float(raw.get("distance", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _number(raw: dict, key: str, where: str) -> float:
    value = raw.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: {key!r} must be a number")
    return float(value)


def model_summary(model: NLModel) -> dict:
    """JSON-friendly view of a device model for report metadata."""
    out = {"kind": model.kind}
    if model.kind in (ANSATZ, ATTENUATED):
        out["population"] = "inf" if math.isinf(model.population) else model.population
    if model.kind == CPTP:
        out["p_align"] = model.p_align
        out["p_noise"] = model.p_noise
    if model.kind == ATTENUATED:
        out["attenuation"] = {
            "kind": model.attenuation.kind,
            "scale": model.attenuation.scale,
            "cutoff": model.attenuation.cutoff,
        }
        out["distance"] = model.distance
        out["effective_population"] = model.effective_population()
    return out
