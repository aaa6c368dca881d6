import math

import numpy as np
import pytest

from ifp import (
    AbsorberModel,
    DomainError,
    PathState,
    RunOutcome,
    ZenoParams,
    beamsplitter_rotation,
    cycle_block_probability,
    discrimination_signal,
    initial_state,
    object_channel,
    run_protocol,
    run_protocol_mc,
)

VARIANTS = (AbsorberModel.MIXTURE, AbsorberModel.DAMPING, AbsorberModel.RUNWISE)


def _blocked_closed_form(n):
    """Hand-derived outcome for a permanently blocked object.

    The first projective measurement survives with cos^2(theta), each of the
    remaining n-1 with cos^2(2*theta), and the final half-rotation splits the
    survivor S across the ports as (S*sin^2, S*cos^2).
    """
    theta = math.pi / (4 * n)
    survive = math.cos(theta) ** 2 * math.cos(2 * theta) ** (2 * (n - 1))
    return (
        survive * math.sin(theta) ** 2,
        survive * math.cos(theta) ** 2,
        1.0 - survive,
    )


def test_beamsplitter_rotation_matrices():
    assert np.allclose(beamsplitter_rotation(0.0), np.eye(2), atol=1e-15)
    assert np.allclose(
        beamsplitter_rotation(math.pi / 2), [[0, -1], [1, 0]], atol=1e-15
    )
    r = 1 / math.sqrt(2)
    assert np.allclose(
        beamsplitter_rotation(math.pi / 4), [[r, -r], [r, r]], atol=1e-15
    )


def test_cycle_block_probability():
    assert cycle_block_probability(0.0) == 0.0
    assert cycle_block_probability(1.0) == 1.0
    assert cycle_block_probability(0.5) == pytest.approx(0.75)
    assert cycle_block_probability(0.1) == pytest.approx(0.19)
    with pytest.raises(DomainError):
        cycle_block_probability(1.2)


def test_initial_state():
    state = initial_state()
    assert state.rho[0, 0] == 1.0
    assert state.absorbed == 0.0


def test_object_channel_identity_at_p0():
    state = PathState(np.array([[0.5, 0.25], [0.25, 0.5]], dtype=complex))
    for variant in VARIANTS:
        out = object_channel(state, 0.0, variant)
        assert np.array_equal(out.rho, state.rho)
        assert out.absorbed == 0.0


def test_object_channel_full_block():
    state = PathState(np.diag([0.5, 0.5]).astype(complex))
    for variant in (AbsorberModel.MIXTURE, AbsorberModel.DAMPING):
        out = object_channel(state, 1.0, variant)
        assert np.allclose(out.rho, np.diag([0.5, 0.0]), atol=1e-15)
        assert out.absorbed == pytest.approx(0.5, abs=1e-15)
    # run-level model: the per-cycle channel is a no-op by construction
    out = object_channel(state, 1.0, AbsorberModel.RUNWISE)
    assert np.array_equal(out.rho, state.rho)
    assert out.absorbed == 0.0


def test_object_channel_half_block_on_superposition():
    half = np.full((2, 2), 0.5, dtype=complex)
    state = PathState(half)

    out = object_channel(state, 0.5, AbsorberModel.MIXTURE)
    assert np.allclose(out.rho, [[0.5, 0.25], [0.25, 0.25]], atol=1e-15)
    assert out.absorbed == pytest.approx(0.25, abs=1e-15)

    out = object_channel(state, 0.5, AbsorberModel.DAMPING)
    coher = 0.5 * math.sqrt(0.5)
    assert np.allclose(out.rho, [[0.5, coher], [coher, 0.25]], atol=1e-15)
    assert out.absorbed == pytest.approx(0.25, abs=1e-15)


def test_object_channel_accepts_string_variant():
    state = initial_state()
    out = object_channel(state, 0.3, "damping")
    assert np.array_equal(out.rho, state.rho)  # no mode-2 population to touch
    with pytest.raises(DomainError):
        object_channel(state, 0.3, "bogus")
    with pytest.raises(DomainError):
        object_channel(state, 1.5)


def test_unblocked_run_is_certain_transfer():
    for n in range(1, 129):
        for variant in VARIANTS:
            out = run_protocol(ZenoParams(n, 0.0, variant))
            assert abs(out.p_d0 - 1.0) <= 1e-9, (n, variant)
            assert out.p_d1 <= 1e-9
            assert out.p_abs <= 1e-9


def test_single_cycle_blocked_splits_quarter_quarter_half():
    for variant in VARIANTS:
        out = run_protocol(ZenoParams(1, 1.0, variant))
        assert out.p_d0 == pytest.approx(0.25, abs=1e-12)
        assert out.p_d1 == pytest.approx(0.25, abs=1e-12)
        assert out.p_abs == pytest.approx(0.5, abs=1e-12)


def test_blocked_run_matches_closed_form():
    for n in range(1, 65):
        expect = _blocked_closed_form(n)
        out = run_protocol(ZenoParams(n, 1.0))
        assert out.p_d0 == pytest.approx(expect[0], abs=1e-12)
        assert out.p_d1 == pytest.approx(expect[1], abs=1e-12)
        assert out.p_abs == pytest.approx(expect[2], abs=1e-12)


def test_interaction_free_regime_at_large_n():
    out = run_protocol(ZenoParams(100, 1.0))
    assert out.p_abs < 0.03
    assert out.p_d1 > 0.95
    # pinned value, 12 significant digits
    assert format(out.p_abs, ".12g") == "0.0241925151475"


def test_blocked_absorption_decreases_with_n():
    prev = run_protocol(ZenoParams(2, 1.0)).p_abs
    for n in range(3, 129):
        cur = run_protocol(ZenoParams(n, 1.0)).p_abs
        assert cur < prev, n
        prev = cur


def test_probability_conservation_grid():
    for variant in VARIANTS:
        for n in range(1, 33):
            for p in np.linspace(0.0, 1.0, 11):
                out = run_protocol(ZenoParams(n, float(p), variant))
                total = out.p_d0 + out.p_d1 + out.p_abs
                assert abs(total - 1.0) <= 1e-9
                for v in (out.p_d0, out.p_d1, out.p_abs):
                    assert 0.0 <= v <= 1.0


def test_variants_coincide_exactly_at_endpoints():
    for n in (1, 2, 5, 17, 64):
        for p in (0.0, 1.0):
            outs = [run_protocol(ZenoParams(n, p, v)) for v in VARIANTS]
            assert outs[0] == outs[1] == outs[2]


def test_variants_differ_in_between():
    outs = [run_protocol(ZenoParams(10, 0.5, v)).p_d0 for v in VARIANTS]
    assert len({round(x, 6) for x in outs}) == 3


def test_discrimination_signal_examples():
    assert discrimination_signal(ZenoParams(7, 0.0)) == pytest.approx(1.0, abs=1e-9)
    assert discrimination_signal(ZenoParams(1, 1.0)) == pytest.approx(0.0, abs=1e-12)
    d = discrimination_signal(ZenoParams(100, 1.0))
    assert d < -0.9
    theta = math.pi / 400
    survive = math.cos(theta) ** 2 * math.cos(2 * theta) ** 198
    assert d == pytest.approx(-survive * math.cos(2 * theta), abs=1e-12)


def test_discrimination_monotone_in_block_probability():
    grid = np.linspace(0.0, 1.0, 21)
    for variant in VARIANTS:
        for n in (1, 3, 10, 50):
            vals = [discrimination_signal(ZenoParams(n, float(p), variant)) for p in grid]
            for lo, hi in zip(vals[1:], vals[:-1]):
                assert lo <= hi + 1e-12, (variant, n)


def test_runwise_outcome_is_affine_in_p():
    clear = run_protocol(ZenoParams(8, 0.0, AbsorberModel.RUNWISE))
    blocked = run_protocol(ZenoParams(8, 1.0, AbsorberModel.RUNWISE))
    for p in (0.25, 0.5, 0.9):
        out = run_protocol(ZenoParams(8, p, AbsorberModel.RUNWISE))
        assert out.p_abs == pytest.approx(
            p * blocked.p_abs + (1 - p) * clear.p_abs, abs=1e-15
        )
        assert out.p_d0 == pytest.approx(
            p * blocked.p_d0 + (1 - p) * clear.p_d0, abs=1e-15
        )


def test_mc_unblocked_is_exact():
    for variant in VARIANTS:
        counts = run_protocol_mc(ZenoParams(3, 0.0, variant), 1000, seed=42)
        assert counts == (1000, 0, 0)


def test_mc_single_cycle_blocked_within_4_sigma():
    trials = 100_000
    counts = run_protocol_mc(ZenoParams(1, 1.0), trials, seed=1)
    assert sum(counts) == trials
    for got, q in zip(counts, (0.25, 0.25, 0.5)):
        sigma = math.sqrt(trials * q * (1 - q))
        assert abs(got - trials * q) <= 4 * sigma


def test_mc_matches_analytic_route_per_variant():
    trials = 50_000
    for variant in VARIANTS:
        params = ZenoParams(20, 0.5, variant)
        expect = run_protocol(params)
        counts = run_protocol_mc(params, trials, seed=7)
        assert sum(counts) == trials
        for got, q in zip(counts, (expect.p_d0, expect.p_d1, expect.p_abs)):
            sigma = math.sqrt(trials * q * (1 - q))
            assert abs(got - trials * q) <= 4 * sigma, (variant, got, q)


def test_mc_deterministic_for_fixed_seed():
    params = ZenoParams(5, 0.3)
    a = run_protocol_mc(params, 10_000, seed=11)
    b = run_protocol_mc(params, 10_000, seed=11)
    assert a == b
    c = run_protocol_mc(params, 10_000, seed=12)
    assert a != c


def test_mc_rejects_bad_trials():
    with pytest.raises(DomainError):
        run_protocol_mc(ZenoParams(1, 0.0), 0, seed=0)


def test_params_validation():
    with pytest.raises(DomainError):
        ZenoParams(0, 0.5)
    with pytest.raises(DomainError):
        ZenoParams(2, -0.1)
    with pytest.raises(DomainError):
        ZenoParams(2, 1.1)
    with pytest.raises(DomainError):
        ZenoParams(2, 0.5, "bogus")
    assert ZenoParams(2, 0.5, "damping").variant is AbsorberModel.DAMPING
    assert ZenoParams(2, 0.5, "Mixture").variant is AbsorberModel.MIXTURE


def test_path_state_validation():
    with pytest.raises(DomainError):
        PathState(np.diag([0.6, 0.6]))  # trace + absorbed != 1
    with pytest.raises(DomainError):
        PathState(np.array([[0.5, 0.1], [0.0, 0.5]]))  # not Hermitian
    with pytest.raises(DomainError):
        PathState(np.array([[0.6, 0.55], [0.55, 0.4]]))  # negative eigenvalue
    with pytest.raises(DomainError):
        PathState(np.eye(3) / 3)


def test_run_outcome_validation():
    with pytest.raises(DomainError):
        RunOutcome(0.5, 0.5, 0.5)
    with pytest.raises(DomainError):
        RunOutcome(-0.1, 0.6, 0.5)
    out = RunOutcome(1.0 + 5e-13, -5e-13, 0.0)  # float dust snaps to the bounds
    assert out.p_d0 == 1.0
    assert out.p_d1 == 0.0
