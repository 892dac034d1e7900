import math

import numpy as np
import pytest

from cqcode import operators as ops
from cqcode.channel import (
    Channel,
    average_state,
    channel_from_dict,
    channel_output,
    channel_to_dict,
    exponent_chain_check,
    hayashi_exponent,
    load_channel,
    mutual_information,
    phi,
    save_channel,
    trace_power_bound,
    trace_power_maximizer,
    universal_exponent,
)
from cqcode.errors import ValidationError

from conftest import classical_channel, identical_channel, random_channel, random_density, random_psd

LOG2 = math.log(2.0)


def plus_channel():
    zero = np.diag([1.0, 0.0]).astype(complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    return Channel(states=(zero, plus))


def test_channel_validation():
    with pytest.raises(ValidationError):
        Channel(states=(np.diag([1.0, 0.5]).astype(complex),))  # trace != 1
    with pytest.raises(ValidationError):
        Channel(states=(np.diag([1.5, -0.5]).astype(complex),))  # negative eigenvalue


def test_channel_output_basics(rng):
    w = random_channel(rng, 2, 2)
    assert np.allclose(channel_output(w, (1,)), w.states[0])
    out = channel_output(w, (1, 2))
    assert abs(np.trace(out).real - 1.0) < 1e-10
    ea = np.linalg.eigvalsh(w.states[0])
    eb = np.linalg.eigvalsh(w.states[1])
    assert np.abs(np.sort(np.outer(ea, eb).ravel()) - np.sort(np.linalg.eigvalsh(out))).max() < 1e-10


def test_channel_output_classical_diagonal():
    w = classical_channel(2)
    out = channel_output(w, (1, 2, 1))
    expect = np.zeros(8)
    expect[0b010] = 1.0
    assert np.allclose(out, np.diag(expect))


def test_average_state(rng):
    w = random_channel(rng, 2, 3)
    assert np.allclose(average_state(w, (1.0, 0.0, 0.0)), w.states[0])
    mixed = average_state(w, (0.3, 0.3, 0.4))
    assert abs(np.trace(mixed).real - 1.0) < 1e-10
    assert ops.min_eigenvalue(mixed) > -1e-12
    wo = classical_channel(2)
    assert np.allclose(average_state(wo, (0.5, 0.5)), np.eye(2) / 2)


def test_mutual_information_identical_states():
    assert abs(mutual_information(identical_channel(), (0.5, 0.5))) < 1e-12


def test_mutual_information_classical_bit():
    assert abs(mutual_information(classical_channel(2), (0.5, 0.5)) - LOG2) < 1e-12


def test_mutual_information_zero_plus():
    # oracle: binary entropy of the mixture eigenvalues (1 +- 2^-1/2)/2
    lam = (1 + 2 ** -0.5) / 2
    expect = -(lam * math.log(lam) + (1 - lam) * math.log(1 - lam))
    got = mutual_information(plus_channel(), (0.5, 0.5))
    assert abs(got - expect) < 1e-10
    assert abs(got - 0.41649553069968784) < 1e-9


def test_phi_zero_is_zero(rng):
    for _ in range(5):
        w = random_channel(rng, 2, 3)
        assert abs(phi(w, (0.2, 0.5, 0.3), 0.0)) < 1e-10


def test_phi_orthogonal_closed_form():
    w = classical_channel(2)
    for t in np.linspace(0.0, 1.0 - 1e-6, 101):
        assert abs(phi(w, (0.5, 0.5), float(t)) - t * LOG2) < 1e-9


def test_phi_identical_states_slope_zero(rng):
    rho = random_density(rng, 2)
    w = Channel(states=(rho, rho))
    p = (0.5, 0.5)
    slope = (phi(w, p, 1e-4) - phi(w, p, 0.0)) / 1e-4
    assert abs(slope - mutual_information(w, p)) < 1e-3
    assert phi(w, p, 0.5) >= -1e-12


def test_phi_domain():
    w = classical_channel(2)
    with pytest.raises(ValueError):
        phi(w, (0.5, 0.5), 1.0)
    with pytest.raises(ValueError):
        phi(w, (0.5, 0.5), -0.1)


def test_phi_slope_matches_mutual_information(rng):
    for _ in range(20):
        k = int(rng.integers(2, 4))
        w = random_channel(rng, 2, k)
        p = rng.dirichlet(np.ones(k))
        p = tuple(float(v) for v in p / p.sum())
        info = mutual_information(w, p)
        slope = (phi(w, p, 1e-4) - phi(w, p, 0.0)) / 1e-4
        assert abs(slope - info) <= 1e-3 * max(info, 1e-3)


def test_universal_exponent_orthogonal_edge():
    rep = universal_exponent(classical_channel(2), (0.5, 0.5), 0.0)
    assert abs(rep.value - LOG2 / 2) < 1e-4
    assert rep.t_star > 0.99


def test_universal_exponent_no_positive_region():
    w = classical_channel(2)
    rep = universal_exponent(w, (0.5, 0.5), 2.0)  # far above capacity log 2
    assert rep.value <= 1e-12
    assert not rep.has_positive_exponent or rep.value < 1e-9
    same = universal_exponent(identical_channel(), (0.5, 0.5), 0.1)
    assert same.value <= 1e-9


def test_universal_exponent_positive_below_capacity(rng):
    for _ in range(8):
        w = random_channel(rng, 2, 2)
        p = (0.5, 0.5)
        info = mutual_information(w, p)
        if info < 0.02:
            continue
        rep = universal_exponent(w, p, max(info - 0.01, 0.0))
        assert rep.value > 0.0


def test_hayashi_exponent_closed_forms():
    assert abs(hayashi_exponent(identical_channel(), (0.5, 0.5), 0.0).value) < 1e-9
    w = classical_channel(2)
    assert abs(hayashi_exponent(w, (0.5, 0.5), 0.0).value - LOG2) < 1e-6
    rep = hayashi_exponent(w, (0.5, 0.5), 0.3)
    assert abs(rep.value - (LOG2 - 0.3)) < 1e-6
    assert abs(rep.t_star - 1.0) < 1e-6


def test_exponent_ordering_sweep(rng):
    for _ in range(15):
        w = random_channel(rng, 2, 2)
        for R in (0.0, 0.1, 0.3, 0.6):
            h = hayashi_exponent(w, (0.5, 0.5), R).value
            u = universal_exponent(w, (0.5, 0.5), R).value
            assert h >= u - 1e-9


def test_trace_power_bound_values():
    assert abs(trace_power_bound(np.eye(2, dtype=complex), 0.5) - math.sqrt(2)) < 1e-12
    x = np.diag([4.0, 1.0]).astype(complex)
    assert abs(trace_power_bound(x, 0.5) - math.sqrt(17)) < 1e-12
    assert abs(trace_power_bound(x, 0.0) - 5.0) < 1e-12


def test_trace_power_bound_dominates_and_attained(rng):
    x = np.diag([4.0, 1.0]).astype(complex)
    bound = trace_power_bound(x, 0.5)
    worst = -np.inf
    for _ in range(10_000):
        sigma = random_psd(rng, 2)
        sigma /= np.trace(sigma).real
        worst = max(worst, ops.real_trace(x @ ops.fractional_power_psd(sigma, 0.5)))
    assert worst <= bound + 1e-9
    best = trace_power_maximizer(x, 0.5)
    assert abs(ops.real_trace(x @ ops.fractional_power_psd(best, 0.5)) - bound) < 1e-8


def test_trace_power_bound_monte_carlo_random_x(rng):
    for dim in (3, 8):
        x = random_psd(rng, dim)
        for t in (0.1, 0.5, 0.9):
            bound = trace_power_bound(x, t)
            for _ in range(300):
                sigma = random_psd(rng, dim)
                sigma /= np.trace(sigma).real
                assert ops.real_trace(x @ ops.fractional_power_psd(sigma, t)) <= bound + 1e-9
            best = trace_power_maximizer(x, t)
            assert abs(ops.real_trace(x @ ops.fractional_power_psd(best, t)) - bound) < 1e-8


def test_exponent_chain_identical_states():
    w = identical_channel()
    for t in (0.1, 0.5, 0.9):
        rep = exponent_chain_check(w, (0.5, 0.5), 0.0, t)
        assert rep.holds


def test_exponent_chain_orthogonal_closed_form():
    rep = exponent_chain_check(classical_channel(2), (0.5, 0.5), 0.1, 0.5)
    # A = I/2: max_sigma Tr A sigma^t = e^(-phi) = 2^(-t); Tr A W_p^t = 2^(-t)
    r = (0.5 * LOG2 - 0.05) / 1.5
    assert abs(rep.lhs - math.exp(0.5 * (0.1 + r)) * 2 ** -0.5) < 1e-9
    assert abs(rep.rhs - math.exp(0.05) * 2 ** -0.5) < 1e-9
    assert rep.holds


def test_exponent_chain_sweep_at_valid_points(rng):
    for _ in range(25):
        w = random_channel(rng, 2, 2)
        p = (0.5, 0.5)
        for t in (0.25, 0.5, 0.75):
            rep = exponent_chain_check(w, p, 0.0, t)
            assert rep.holds
        best_t = universal_exponent(w, p, 0.05).t_star
        rep = exponent_chain_check(w, p, 0.05, best_t)
        if rep.r_t >= 0:
            assert rep.holds


def test_channel_file_roundtrip(tmp_path, rng):
    w = random_channel(rng, 2, 3)
    path = tmp_path / "w.json"
    save_channel(w, path)
    back = load_channel(path)
    for a, b in zip(w.states, back.states):
        assert ops.max_abs(a - b) < 1e-12


def test_channel_file_validation(tmp_path):
    data = channel_to_dict(classical_channel(2))
    data["matrices"][1][0][0] = [5.0, 0.0]  # breaks the trace
    with pytest.raises(ValidationError, match=r"W\(2\)"):
        channel_from_dict(data)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValidationError):
        load_channel(bad)
