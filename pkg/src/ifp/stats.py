"""Source statistics and the protocol's signal-to-noise figures of merit.

``f_factor`` is the run's SNR for discriminating fully blocked from
unblocked, normalized by the classical polarimetry SNR sqrt(Nbar):
signal |dP_D0 - dP_D1| over the shot noise of the four independent count
contributions. ``g_factor`` divides by the square root of the mean
absorption over a uniform grid of block probabilities, giving the SNR per
photon absorbed by the sample. Both are deterministic curves in n; Monte
Carlo enters only as validation.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rng import substream
from .zeno import AbsorberModel, ZenoParams, run_protocol

__all__ = [
    "SourceKind",
    "SourceModel",
    "SnrReport",
    "snr_classical",
    "f_factor",
    "mean_absorption",
    "g_factor",
    "snr_report",
    "sample_photon_number",
    "sample_photon_numbers",
]


class SourceKind(enum.Enum):
    POISSON = "poisson"
    THERMAL = "thermal"


def _coerce_kind(kind):
    if isinstance(kind, SourceKind):
        return kind
    try:
        return SourceKind(str(kind).lower())
    except ValueError:
        names = [k.value for k in SourceKind]
        raise DomainError(f"unknown source kind {kind!r}, expected one of {names}") from None


@dataclass(frozen=True)
class SourceModel:
    """Photon-number statistics of the pair source: kind and mean per mode."""

    kind: SourceKind
    mean: float

    def __post_init__(self):
        object.__setattr__(self, "kind", _coerce_kind(self.kind))
        if not self.mean > 0.0:
            raise DomainError(f"source mean must be positive, got {self.mean}")


@dataclass(frozen=True)
class SnrReport:
    """SNR summary at one cycle count: factors and absolute SNRs at Nbar."""

    n: int
    f: float
    g: float
    snr_pol: float
    snr_ifp: float
    snr_absd: float


def snr_classical(nbar):
    """Classical polarimetry SNR: sqrt(Nbar)."""
    if nbar <= 0.0:
        raise DomainError(f"nbar must be positive, got {nbar}")
    return math.sqrt(nbar)


def f_factor(n, variant=AbsorberModel.MIXTURE):
    """Blocked-vs-unblocked discrimination SNR per sqrt(Nbar).

    Parameters
    ----------
    n : int
        Cycle count, >= 1.
    variant : AbsorberModel or str
        Kept for signature symmetry; the value is irrelevant because only
        the p = 0 and p = 1 endpoints enter and all variants coincide there.

    Returns
    -------
    float
        |dP_D0 - dP_D1| / sqrt(P_D0(0) + P_D0(1) + P_D1(0) + P_D1(1)),
        where dP_X = P_X(p=0) - P_X(p=1). The four counts are treated as
        independent Poisson variables, so the noise variance is the sum of
        the four mean detection probabilities; this normalization makes
        f(1) = 1/sqrt(1.5) and caps f at sqrt(2) as n grows.
    """
    clear = run_protocol(ZenoParams(n, 0.0, variant))
    blocked = run_protocol(ZenoParams(n, 1.0, variant))
    signal = abs((clear.p_d0 - blocked.p_d0) - (clear.p_d1 - blocked.p_d1))
    noise = math.sqrt(clear.p_d0 + blocked.p_d0 + clear.p_d1 + blocked.p_d1)
    return signal / noise


def mean_absorption(n, variant=AbsorberModel.MIXTURE, grid=100):
    """Average absorbed-photon probability over a uniform p grid.

    The grid is inclusive of both endpoints: p_i = i/(grid-1) for
    i = 0..grid-1 (so the default 100-point grid is i/99). ``grid=1``
    degenerates to the single point p = 0, which returns exactly 0 for any
    n and is useful as a transparent-sample sanity mode.
    """
    if grid < 1:
        raise DomainError(f"grid must be >= 1, got {grid}")
    ps = np.linspace(0.0, 1.0, grid)
    total = 0.0
    for p in ps:
        total += run_protocol(ZenoParams(n, float(p), variant)).p_abs
    return total / len(ps)


def g_factor(n, variant=AbsorberModel.MIXTURE, grid=100):
    """SNR per absorbed photon, per sqrt(Nbar): f(n)/sqrt(mean_absorption).

    Returns ``inf`` when the mean absorption is zero (the infinite-advantage
    flag; cannot occur for finite n with the standard grid).
    """
    mean_abs = mean_absorption(n, variant, grid)
    f = f_factor(n, variant)
    if mean_abs == 0.0:
        return math.inf
    return f / math.sqrt(mean_abs)


def snr_report(n, nbar, variant=AbsorberModel.MIXTURE):
    """Bundle the SNR quantities at one (n, Nbar) point.

    snr_pol = sqrt(Nbar), snr_ifp = f(n)*snr_pol, snr_absd = g(n)*snr_pol.
    """
    pol = snr_classical(nbar)
    f = f_factor(n, variant)
    g = g_factor(n, variant)
    return SnrReport(n=int(n), f=f, g=g, snr_pol=pol, snr_ifp=f * pol, snr_absd=g * pol)


def _draw(src, rng, size=None):
    if src.kind is SourceKind.POISSON:
        return rng.poisson(src.mean, size)
    # single-mode Bose-Einstein: geometric on {1,2,...} shifted to {0,1,...}
    return rng.geometric(1.0 / (1.0 + src.mean), size) - 1


def sample_photon_number(src, seed):
    """One photon-number draw from the source; deterministic per seed."""
    return int(_draw(src, substream(seed)))


def sample_photon_numbers(src, seed, count):
    """Vectorized photon-number draws; equals count repeated single draws
    in distribution, not value (one stream, ``count`` variates)."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return np.asarray(_draw(src, substream(seed), int(count)))
