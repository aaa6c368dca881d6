import math

import numpy as np
import pytest

from ifp import (
    AbsorberModel,
    DomainError,
    SourceKind,
    SourceModel,
    ZenoParams,
    f_factor,
    g_factor,
    mean_absorption,
    run_protocol,
    sample_photon_number,
    sample_photon_numbers,
    snr_classical,
    snr_report,
)
from ifp.rng import substream

VARIANTS = (AbsorberModel.MIXTURE, AbsorberModel.DAMPING, AbsorberModel.RUNWISE)


def _f_closed_form(n):
    # from the hand-derived blocked-run survivor S: f = (1 + S cos 2t)/sqrt(1 + S)
    theta = math.pi / (4 * n)
    survive = math.cos(theta) ** 2 * math.cos(2 * theta) ** (2 * (n - 1))
    return (1.0 + survive * math.cos(2 * theta)) / math.sqrt(1.0 + survive)


def test_snr_classical():
    assert snr_classical(100.0) == 10.0
    assert snr_classical(1.0) == 1.0
    assert snr_classical(1e4) == 100.0
    with pytest.raises(DomainError):
        snr_classical(0.0)
    with pytest.raises(DomainError):
        snr_classical(-3.0)


def test_f_factor_single_cycle():
    assert abs(f_factor(1) - 1.0 / math.sqrt(1.5)) <= 1e-9


def test_f_factor_matches_closed_form():
    for n in (1, 2, 3, 5, 8, 13, 21, 34, 55, 64):
        assert f_factor(n) == pytest.approx(_f_closed_form(n), abs=1e-12)


def test_f_factor_variant_independent():
    for n in (1, 5, 30):
        vals = {f_factor(n, v) for v in VARIANTS}
        assert len(vals) == 1


def test_f_factor_saturates_at_sqrt2():
    assert abs(f_factor(1000) - math.sqrt(2)) <= 0.05


def test_f_factor_bounded_and_crosses_unity_at_two_cycles():
    values = {n: f_factor(n) for n in range(1, 257)}
    for n, f in values.items():
        assert 0.0 < f <= math.sqrt(2) + 1e-9, n
    assert values[1] < 1.0
    for n in range(2, 257):
        assert values[n] > 1.0, n


def test_mean_absorption_single_cycle():
    # p_abs(1, p) = p/2, so the grid average is exactly 1/4
    assert mean_absorption(1) == pytest.approx(0.25, abs=1e-12)


def test_mean_absorption_degenerate_grid():
    assert mean_absorption(5, grid=1) == 0.0
    with pytest.raises(DomainError):
        mean_absorption(5, grid=0)


def test_mean_absorption_bounds():
    for variant in VARIANTS:
        for n in (1, 2, 3, 8, 32):
            ma = mean_absorption(n, variant)
            assert 0.0 < ma < 0.5, (variant, n)


def test_mean_absorption_runwise_proportional_to_blocked_run():
    # run-level mixing makes p_abs affine in p, so the grid mean is half
    # the fully blocked absorption
    for n in (2, 7, 20):
        blocked = run_protocol(ZenoParams(n, 1.0)).p_abs
        got = mean_absorption(n, AbsorberModel.RUNWISE)
        assert got == pytest.approx(0.5 * blocked, abs=1e-12)


def test_mean_absorption_runwise_halves_when_n_doubles():
    cache = {}

    def ma(n):
        if n not in cache:
            cache[n] = mean_absorption(n, AbsorberModel.RUNWISE)
        return cache[n]

    for n in (2, 3, 4, 5, 6, 8, 12, 16, 24, 32, 48, 64):
        assert ma(2 * n) < ma(n), n


def test_g_factor_single_cycle():
    assert g_factor(1) == pytest.approx(math.sqrt(8.0 / 3.0), abs=1e-12)
    composed = f_factor(1) / math.sqrt(mean_absorption(1))
    assert g_factor(1) == pytest.approx(composed, abs=1e-12)


def test_g_factor_infinite_flag_on_zero_absorption():
    assert g_factor(5, grid=1) == math.inf


def test_g_factor_exceeds_unity():
    for n in list(range(1, 17)) + [32, 64]:
        assert g_factor(n) > 1.0, n


def test_g_factor_grows_when_n_doubles():
    values = {n: g_factor(n) for n in (1, 2, 4, 8, 16, 32, 64)}
    for n in (1, 2, 4, 8, 16, 32):
        assert values[2 * n] > values[n], n


def test_snr_report_fields():
    report = snr_report(10, 1e4)
    assert report.n == 10
    assert report.snr_pol == 100.0
    assert report.f == f_factor(10)
    assert report.g == g_factor(10)
    assert report.snr_ifp == report.f * 100.0
    assert report.snr_absd == report.g * 100.0


def test_snr_report_matches_direct_count_computation():
    # same quantity assembled from expected photon counts instead of
    # probabilities; must agree to rounding for any Nbar
    for nbar in (1e2, 1e4):
        for n in (1, 4, 10):
            clear = run_protocol(ZenoParams(n, 0.0))
            blocked = run_protocol(ZenoParams(n, 1.0))
            signal = abs(
                (nbar * clear.p_d0 - nbar * blocked.p_d0)
                - (nbar * clear.p_d1 - nbar * blocked.p_d1)
            )
            noise = math.sqrt(
                nbar * (clear.p_d0 + blocked.p_d0 + clear.p_d1 + blocked.p_d1)
            )
            direct = signal / noise
            assert direct == pytest.approx(
                f_factor(n) * snr_classical(nbar), abs=1e-9
            )


def test_f_factor_predicts_simulated_count_snr():
    # 200 simulated difference experiments at n=10, Nbar=1e4: the empirical
    # mean/std ratio of the count statistic should land near f*sqrt(Nbar)
    n, nbar, reps = 10, 1e4, 200
    clear = run_protocol(ZenoParams(n, 0.0))
    blocked = run_protocol(ZenoParams(n, 1.0))
    mus = nbar * np.array([clear.p_d0, blocked.p_d0, clear.p_d1, blocked.p_d1])
    rng = substream(786)
    counts = rng.poisson(mus, size=(reps, 4))
    stat = (counts[:, 0] - counts[:, 1]) - (counts[:, 2] - counts[:, 3])
    empirical = abs(stat.mean()) / stat.std(ddof=1)
    predicted = f_factor(n) * snr_classical(nbar)
    assert abs(empirical - predicted) <= 0.15 * predicted


def test_source_model_validation():
    assert SourceModel("thermal", 2.0).kind is SourceKind.THERMAL
    with pytest.raises(DomainError):
        SourceModel("laser", 2.0)
    with pytest.raises(DomainError):
        SourceModel(SourceKind.POISSON, 0.0)


def test_poisson_sampler_moments():
    src = SourceModel(SourceKind.POISSON, 10.0)
    draws = sample_photon_numbers(src, seed=3, count=1_000_000)
    assert abs(draws.mean() - 10.0) <= 4 * math.sqrt(10.0 / 1e6)
    assert abs(draws.var() - 10.0) <= 0.05 * 10.0


def test_thermal_sampler_moments():
    src = SourceModel(SourceKind.THERMAL, 10.0)
    draws = sample_photon_numbers(src, seed=4, count=1_000_000)
    variance = 10.0 * 11.0
    assert abs(draws.mean() - 10.0) <= 4 * math.sqrt(variance / 1e6)
    assert abs(draws.var() - variance) <= 0.05 * variance
    assert draws.min() >= 0


def test_vanishing_mean_yields_zero_photons():
    for kind in (SourceKind.POISSON, SourceKind.THERMAL):
        src = SourceModel(kind, 1e-9)
        assert sample_photon_number(src, seed=1) == 0
        assert sample_photon_numbers(src, seed=2, count=1000).max() == 0


def test_sampler_determinism():
    src = SourceModel(SourceKind.POISSON, 7.0)
    assert sample_photon_number(src, seed=5) == sample_photon_number(src, seed=5)
    a = sample_photon_numbers(src, seed=6, count=1000)
    b = sample_photon_numbers(src, seed=6, count=1000)
    assert np.array_equal(a, b)
    c = sample_photon_numbers(src, seed=7, count=1000)
    assert not np.array_equal(a, c)


def test_sampler_count_validation():
    src = SourceModel(SourceKind.POISSON, 7.0)
    with pytest.raises(DomainError):
        sample_photon_numbers(src, seed=1, count=0)
