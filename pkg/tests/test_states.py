"""Pair-state family: amplitudes, closed-form rates, population rules."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polbench import qcore, states
from polbench.errors import ContractViolation

import oracles

SQRT2 = math.sqrt(2.0)


def test_epr_pair_amplitudes():
    pair = states.epr_pair()
    assert np.allclose(pair.ket, [1 / SQRT2, 0, 0, 1 / SQRT2], atol=1e-12)
    assert pair.population == 0
    assert pair.statistics == states.BOSON
    assert qcore.is_normalized(pair.ket)


def test_amplified_pair_frozen_amplitudes():
    pair = states.amplified_pair(2)
    #  (sqrt3, 0, 0, 1)/2
    assert np.allclose(pair.ket, [math.sqrt(3) / 2, 0, 0, 0.5], atol=1e-12)
    assert states.amplified_pair(0).ket == pytest.approx(states.epr_pair().ket)


def test_amplified_pair_infinite_population():
    pair = states.amplified_pair(states.INFINITY)
    assert np.allclose(pair.ket, [1, 0, 0, 0], atol=1e-12)
    assert math.isinf(pair.population)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(min_value=0, max_value=10**6))
def test_amplified_pair_matches_oracle_and_normalizes(n):
    pair = states.amplified_pair(n)
    assert np.allclose(pair.ket, oracles.pair_ket(n), atol=1e-12)
    assert qcore.is_normalized(pair.ket)


def test_stimulated_amplitude_frozen_values():
    assert states.stimulated_amplitude(0) == 1.0
    assert states.stimulated_amplitude(3) == pytest.approx(2.0, abs=1e-15)
    assert states.stimulated_amplitude(99) == pytest.approx(10.0, abs=1e-13)
    with pytest.raises(ContractViolation):
        states.stimulated_amplitude(states.INFINITY)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(min_value=0, max_value=10**9))
def test_stimulated_amplitude_is_sqrt_enhancement(n):
    assert states.stimulated_amplitude(n) == pytest.approx(math.sqrt(n + 1.0), rel=1e-15)


def test_population_validation():
    for bad in (-1, 2.5, float("nan"), True):
        with pytest.raises(ContractViolation):
            states.amplified_pair(bad)
    with pytest.raises(ContractViolation):
        states.remote_rate(-0.5, 0.0)
    with pytest.raises(ContractViolation):
        states.remote_rate(float("nan"), 0.0)


def test_fermionic_pair_two_level_blocking():
    empty = states.fermionic_pair(False)
    assert np.allclose(empty.ket, states.epr_pair().ket, atol=1e-12)
    assert empty.statistics == states.FERMION
    occupied = states.fermionic_pair(True)
    #  sqrt(1 - n) kills the stimulated branch outright.
    assert np.allclose(occupied.ket, [0, 0, 0, 1], atol=1e-12)
    assert occupied.population == 1


def test_fermionic_occupied_remote_rate_at_zero_is_exactly_zero():
    occupied = states.fermionic_pair(True)
    reduced = occupied.reduced(keep=1)
    rate = qcore.detection_probability(reduced, qcore.polarizer_projector(0.0))
    assert rate == 0.0


def test_coincidence_rate_epr_frozen_values():
    pair = states.epr_pair()
    assert states.coincidence_rate(0.0, 0.0, pair) == pytest.approx(0.5, abs=1e-12)
    assert states.coincidence_rate(0.0, math.pi / 2, pair) == pytest.approx(0.0, abs=1e-12)
    assert states.coincidence_rate(0.0, math.pi / 4, pair) == pytest.approx(0.25, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    t1=st.floats(min_value=0.0, max_value=math.pi),
    t2=st.floats(min_value=0.0, max_value=math.pi),
)
def test_coincidence_rate_epr_law(t1, t2):
    got = states.coincidence_rate(t1, t2, states.epr_pair())
    assert abs(got - math.cos(t1 - t2) ** 2 / 2.0) < 1e-12
    assert abs(got - oracles.coincidence_oracle(t1, t2)) < 1e-12


def test_remote_rate_frozen_values():
    assert states.remote_rate(5, 0.0) == pytest.approx(6.0 / 7.0, abs=1e-15)
    assert states.remote_rate(0, 0.7) == pytest.approx(0.5, abs=1e-15)
    assert states.remote_rate(states.INFINITY, 0.3) == pytest.approx(
        math.cos(0.3) ** 2, abs=1e-15
    )


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(min_value=0, max_value=10**6),
    theta=st.floats(min_value=0.0, max_value=math.pi),
)
def test_remote_rate_matches_trace_oracle(n, theta):
    assert abs(states.remote_rate(n, theta) - oracles.remote_rate_oracle(n, theta)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(min_value=0, max_value=10**6),
    theta=st.floats(min_value=0.0, max_value=math.pi),
)
def test_remote_rate_approaches_cos_squared(n, theta):
    #  |rate - cos^2| <= 2/(n+2): the deviation from the saturated device.
    gap = abs(states.remote_rate(n, theta) - math.cos(theta) ** 2)
    assert gap <= 2.0 / (n + 2.0) + 1e-15


def test_remote_rate_accepts_real_effective_population():
    #  Attenuation hands back non-integer populations; the closed form
    #  extends smoothly.
    assert states.remote_rate(2.5, 0.0) == pytest.approx(3.5 / 4.5, abs=1e-15)


def test_pair_state_density_and_reduced():
    pair = states.amplified_pair(4)
    rho = pair.density()
    assert qcore.is_density_matrix(rho)
    reduced = pair.reduced(keep=1)
    want = oracles.partial_trace_loops(oracles.density_loops(pair.ket), (2, 2), keep=1)
    assert np.allclose(reduced, want, atol=1e-12)
    #  Remote marginal is diagonal: (n+1)/(n+2), 1/(n+2).
    assert np.allclose(reduced, np.diag([5.0 / 6.0, 1.0 / 6.0]), atol=1e-12)
