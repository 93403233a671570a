"""Kraus channels, attenuation laws, and the cloning feasibility gate."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polbench import channels, qcore, states
from polbench.errors import ChannelError, ContractViolation

import oracles

SEEDS = st.integers(min_value=0, max_value=2**32 - 1)


def test_kraus_validation_happens_at_use_not_construction():
    good = channels.KrausChannel((np.eye(2, dtype=complex),))
    assert good.dim == 2
    assert channels.completeness_defect(good) < 1e-15
    #  Malformed sets construct fine (validity is checked, not enforced)
    #  but are rejected the moment they are inspected or applied.
    with pytest.raises(ContractViolation):
        channels.completeness_defect(channels.KrausChannel(()))
    with pytest.raises(ContractViolation):
        channels.completeness_defect(
            channels.KrausChannel((np.eye(2, dtype=complex), np.eye(3, dtype=complex)))
        )


def test_completeness_defect_flags_nonphysical_sets():
    half = channels.KrausChannel((np.eye(2, dtype=complex) / 2.0,))
    assert channels.completeness_defect(half) > 0.1
    rho = np.eye(2, dtype=complex) / 2.0
    with pytest.raises(ChannelError):
        channels.apply_channel(rho, half, (2,), target=0)


def test_dephasing_frozen_values():
    plus = qcore.ket([1.0, 1.0]) / math.sqrt(2.0)
    rho = qcore.projector(plus)
    out = channels.apply_channel(rho, channels.dephasing_channel(1.0), (2,), target=0)
    assert np.allclose(out, np.diag([0.5, 0.5]), atol=1e-12)
    untouched = channels.apply_channel(rho, channels.dephasing_channel(0.0), (2,), target=0)
    assert np.allclose(untouched, rho, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(p=st.floats(min_value=0.0, max_value=1.0), seed=SEEDS)
def test_dephasing_is_trace_preserving_and_kills_coherence(p, seed):
    rng = np.random.default_rng(seed)
    rho = qcore.random_density_matrix(rng, 2)
    ch = channels.dephasing_channel(p)
    assert channels.completeness_defect(ch) < 1e-12
    out = channels.apply_channel(rho, ch, (2,), target=0)
    assert abs(np.trace(out).real - 1.0) < 1e-10
    assert np.allclose(np.diag(out), np.diag(rho), atol=1e-12)
    assert abs(out[0, 1]) <= abs(rho[0, 1]) + 1e-12


def test_dephasing_on_pair_frozen_values():
    #  Full dephasing of the device-side photon: coincidence at the
    #  diagonal basis halves, the remote marginal does not move.
    rho = states.epr_pair().density()
    ch = channels.dephasing_channel(1.0)
    out = channels.apply_channel(rho, ch, states.PAIR_DIMS, target=0)
    quarter = math.pi / 4.0
    joint = qcore.tensor(
        qcore.polarizer_projector(quarter), qcore.polarizer_projector(quarter)
    )
    assert qcore.detection_probability(rho, joint) == pytest.approx(0.5, abs=1e-12)
    assert qcore.detection_probability(out, joint) == pytest.approx(0.25, abs=1e-12)
    marg = qcore.partial_trace(out, states.PAIR_DIMS, keep=1)
    assert np.allclose(marg, np.eye(2) / 2.0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    p_align=st.floats(min_value=0.0, max_value=1.0),
    p_noise=st.floats(min_value=0.0, max_value=1.0),
)
def test_noisy_amplifier_is_complete_for_all_parameters(p_align, p_noise):
    ch = channels.noisy_amplifier_channel(p_align, p_noise)
    assert channels.completeness_defect(ch) < channels.COMPLETENESS_ATOL


def test_noisy_amplifier_limits():
    rng = np.random.default_rng(0)
    rho = qcore.random_density_matrix(rng, 2)
    #  p_noise = 1: everything is replaced by the unpolarized state.
    depol = channels.noisy_amplifier_channel(0.3, 1.0)
    out = channels.apply_channel(rho, depol, (2,), target=0)
    assert np.allclose(out, np.eye(2) / 2.0, atol=1e-12)
    #  p_noise = 0: reduces to dephasing at p_align.
    deph = channels.noisy_amplifier_channel(0.7, 0.0)
    want = channels.apply_channel(rho, channels.dephasing_channel(0.7), (2,), target=0)
    got = channels.apply_channel(rho, deph, (2,), target=0)
    assert np.allclose(got, want, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS, n_ops=st.integers(min_value=1, max_value=4))
def test_random_kraus_channel_is_cptp_and_matches_loop_application(seed, n_ops):
    rng = np.random.default_rng(seed)
    ch = channels.random_kraus_channel(rng, dim=2, n_ops=n_ops)
    assert channels.completeness_defect(ch) < 1e-10
    rho = qcore.random_density_matrix(rng, 2)
    got = channels.apply_channel(rho, ch, (2,), target=0)
    want = oracles.apply_kraus_loops(rho, ch.kraus_ops)
    assert np.allclose(got, want, atol=1e-12)
    assert qcore.is_density_matrix(got)


def test_apply_channel_lifts_to_target_subsystem():
    rho = states.epr_pair().density()
    flip = channels.KrausChannel((np.array([[0, 1], [1, 0]], dtype=complex),))
    left = channels.apply_channel(rho, flip, states.PAIR_DIMS, target=0)
    right = channels.apply_channel(rho, flip, states.PAIR_DIMS, target=1)
    #  Flipping either photon of (|VV>+|HH>)/sqrt2 gives (|HV>+|VH>)/sqrt2.
    swapped = qcore.projector(qcore.ket([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0))
    assert np.allclose(left, swapped, atol=1e-12)
    assert np.allclose(right, swapped, atol=1e-12)


def test_attenuation_frozen_values():
    exp_model = channels.AttenuationModel(channels.EXPONENTIAL, scale=2.0)
    assert exp_model.coupling(0.0) == pytest.approx(1.0, abs=1e-15)
    assert exp_model.coupling(2.0) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert channels.attenuated_population(
        10, 2.0, channels.AttenuationModel(channels.EXPONENTIAL, scale=2.0)
    ) == pytest.approx(10 * math.exp(-1.0), abs=1e-12)
    assert channels.attenuated_population(
        10, 1.0, channels.AttenuationModel(channels.EXPONENTIAL, scale=1.0)
    ) == pytest.approx(3.6787944117144233, abs=1e-12)

    inv = channels.AttenuationModel(channels.INVERSE_SQUARE, scale=1.0)
    assert inv.coupling(0.0) == pytest.approx(1.0, abs=1e-15)
    assert inv.coupling(1.0) == pytest.approx(0.5, abs=1e-15)
    assert inv.coupling(3.0) == pytest.approx(0.1, abs=1e-15)

    step = channels.AttenuationModel(channels.STEP, cutoff=2.0)
    assert step.coupling(1.9) == 1.0
    assert step.coupling(2.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    d=st.floats(min_value=0.0, max_value=100.0),
    scale=st.floats(min_value=0.01, max_value=10.0),
)
def test_attenuation_couplings_stay_in_unit_interval_and_decay(d, scale):
    for kind in (channels.EXPONENTIAL, channels.INVERSE_SQUARE):
        model = channels.AttenuationModel(kind, scale=scale)
        g = model.coupling(d)
        assert 0.0 <= g <= 1.0
        assert model.coupling(d + scale) <= g + 1e-15


def test_attenuated_population_infinite_source():
    model = channels.AttenuationModel(channels.EXPONENTIAL, scale=1.0)
    assert math.isinf(channels.attenuated_population(states.INFINITY, 0.5, model))
    step = channels.AttenuationModel(channels.STEP, cutoff=1.0)
    assert channels.attenuated_population(states.INFINITY, 2.0, step) == 0.0


def test_attenuation_model_validation():
    with pytest.raises(ContractViolation):
        channels.AttenuationModel("linear")
    with pytest.raises(ContractViolation):
        channels.AttenuationModel(channels.EXPONENTIAL, scale=0.0)
    with pytest.raises(ContractViolation):
        channels.AttenuationModel(channels.STEP, cutoff=-1.0)
    with pytest.raises(ContractViolation):
        channels.attenuated_population(1, -0.5, channels.AttenuationModel(channels.STEP))


def test_cloning_feasibility_frozen_cases():
    v = qcore.ket([1.0, 0.0])
    h = qcore.ket([0.0, 1.0])
    diag = qcore.ket([1.0, 1.0]) / math.sqrt(2.0)
    same = channels.cloning_feasibility_check(v, v)
    assert same.feasible and same.overlap_in == pytest.approx(1.0, abs=1e-12)
    orth = channels.cloning_feasibility_check(v, h)
    assert orth.feasible and orth.overlap_in == pytest.approx(0.0, abs=1e-12)
    tilted = channels.cloning_feasibility_check(v, diag)
    assert not tilted.feasible
    assert tilted.overlap_in == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
    assert tilted.overlap_out_required == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=SEEDS)
def test_cloning_feasibility_random_nonorthogonal_is_infeasible(seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    phi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi = psi / np.linalg.norm(psi)
    phi = phi / np.linalg.norm(phi)
    report = channels.cloning_feasibility_check(psi, phi)
    s = oracles.overlap_modulus(psi, phi)
    assert report.overlap_in == pytest.approx(s, abs=1e-12)
    assert report.overlap_out_required == pytest.approx(s * s, abs=1e-12)
    if 1e-6 < s < 1.0 - 1e-6:
        assert not report.feasible


def test_cloning_requires_normalized_inputs():
    with pytest.raises(ContractViolation):
        channels.cloning_feasibility_check(
            qcore.ket([1.0, 1.0]), qcore.ket([1.0, 0.0])
        )
