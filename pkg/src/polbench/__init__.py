"""Polarization-correlation bench: states, channels, scenarios, audits.

The package models entangled photon pairs measured by polarizers and
detectors, together with a conjectured remotely triggered amplifier.
It evaluates the amplifier both as the non-physical global-reweight
ansatz and as honest trace-preserving channel families, and audits the
difference: the ansatz moves remote detector rates, every channel does
not.
"""

from .audit import (
    FuzzReport,
    NO_SIGNALLING,
    SIGNALLING,
    SIGNALLING_THRESHOLD,
    SignallingReport,
    SnrReport,
    ansatz_signalling_delta,
    channel_signalling_deviation,
    fuzz_no_signalling,
    snr_report,
)
from .channels import (
    AttenuationModel,
    CloningReport,
    EXPONENTIAL,
    INVERSE_SQUARE,
    KrausChannel,
    STEP,
    apply_channel,
    attenuated_population,
    cloning_feasibility_check,
    completeness_defect,
    dephasing_channel,
    noisy_amplifier_channel,
    random_kraus_channel,
)
from .errors import ChannelError, ContractViolation, ScenarioError
from .montecarlo import (
    CountRecord,
    DistinguishabilityReport,
    distinguishability_trials,
    generator,
    sample_counts,
    substream,
)
from .report import Report, render_figure, to_csv, to_json, write_report
from .scenarios import (
    ANSATZ,
    ATTENUATED,
    COINCIDENCE_ID,
    CPTP,
    DetectorStats,
    Element,
    NLModel,
    OutcomeModel,
    Scenario,
    build_fig1,
    build_fig2,
    build_fig3,
    list_builtins,
    load_scenario_file,
    outcome_distribution,
    remote_detector_id,
    run_scenario,
    signalling_delta,
    validate_scenario,
)
from .states import (
    BOSON,
    FERMION,
    INFINITY,
    PairState,
    amplified_pair,
    coincidence_rate,
    epr_pair,
    fermionic_pair,
    remote_rate,
    stimulated_amplitude,
)

__version__ = "0.1.0"

__all__ = [
    "ANSATZ",
    "ATTENUATED",
    "AttenuationModel",
    "BOSON",
    "COINCIDENCE_ID",
    "CPTP",
    "ChannelError",
    "CloningReport",
    "ContractViolation",
    "CountRecord",
    "DetectorStats",
    "DistinguishabilityReport",
    "EXPONENTIAL",
    "Element",
    "FERMION",
    "FuzzReport",
    "INFINITY",
    "INVERSE_SQUARE",
    "KrausChannel",
    "NLModel",
    "NO_SIGNALLING",
    "OutcomeModel",
    "PairState",
    "Report",
    "SIGNALLING",
    "SIGNALLING_THRESHOLD",
    "STEP",
    "Scenario",
    "ScenarioError",
    "SignallingReport",
    "SnrReport",
    "amplified_pair",
    "ansatz_signalling_delta",
    "apply_channel",
    "attenuated_population",
    "build_fig1",
    "build_fig2",
    "build_fig3",
    "channel_signalling_deviation",
    "cloning_feasibility_check",
    "coincidence_rate",
    "completeness_defect",
    "dephasing_channel",
    "distinguishability_trials",
    "epr_pair",
    "fermionic_pair",
    "fuzz_no_signalling",
    "generator",
    "list_builtins",
    "load_scenario_file",
    "noisy_amplifier_channel",
    "outcome_distribution",
    "random_kraus_channel",
    "remote_detector_id",
    "remote_rate",
    "render_figure",
    "run_scenario",
    "sample_counts",
    "signalling_delta",
    "snr_report",
    "stimulated_amplitude",
    "substream",
    "to_csv",
    "to_json",
    "validate_scenario",
    "write_report",
    "__version__",
]
