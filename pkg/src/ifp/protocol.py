"""End-to-end polarimetry over a pixelated diattenuating sample.

Forward direction: each pixel and probe state defines an effective block
probability p = 1 - tau (1 + d . shat) for the imaging photon's run through
the interferometer. A heralded pair source tags the probe state: the herald
photon is rotated from the imaging basis to H/V and split on a PBS, and
ideal anti-correlation (the pair is anti-correlated in every basis) means a
click at the port receiving the basis's first state tags the imaging photon
with the second state, and vice versa.

Inverse direction: detected counts per (pixel, probe) invert to a block
probability through the monotone response of the run, transmissions
T = 1 - p pair up per basis into tau_k = (T1+T2)/2 and the signed contrast
d_k = (T1-T2)/(T1+T2), and the three per-basis tau estimates must agree,
which makes their spread a useful consistency diagnostic.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, IncompleteDataError, PassivityError
from .polarization import BASES, BASIS_STATES, PROBE_ORDER, Diattenuator, ProbeState, probe_stokes
from .rng import substream
from .stats import SourceKind, SourceModel, _draw
from .zeno import AbsorberModel, ZenoParams, run_protocol, run_protocol_mc, _coerce_variant

__all__ = [
    "HERALD_DETECTORS",
    "SampleModel",
    "ScenarioConfig",
    "CoincidenceTable",
    "BlockEstimate",
    "DiattenuatorEstimate",
    "ReconstructionResult",
    "probe_for_detector",
    "effective_block_probability",
    "simulate_heralded_run",
    "estimate_block_probability",
    "reconstruct_diattenuator",
    "reconstruct_image",
]

HERALD_DETECTORS = ("DX", "DY")

# confidence multiplier for estimator half-widths (three-sigma)
_CONFIDENCE_Z = 3.0


@dataclass(frozen=True)
class SampleModel:
    """Pixel grid of diattenuators, row-major with x across the width."""

    width: int
    height: int
    pixels: tuple

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if len(self.pixels) != self.width * self.height:
            raise DomainError(
                f"expected {self.width * self.height} pixels, got {len(self.pixels)}"
            )
        for pix in self.pixels:
            if not isinstance(pix, Diattenuator):
                raise DomainError(f"pixels must be Diattenuator values, got {type(pix)!r}")
        object.__setattr__(self, "pixels", tuple(self.pixels))

    def pixel(self, x, y):
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise DomainError(f"pixel ({x}, {y}) outside {self.width}x{self.height} grid")
        return self.pixels[y * self.width + x]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to simulate one imaging run."""

    sample: SampleModel
    n: int
    pairs_per_mode: float
    variant: AbsorberModel = AbsorberModel.MIXTURE
    source: SourceKind = SourceKind.POISSON
    seed: int = 0
    bases: tuple = BASES

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not self.pairs_per_mode > 0.0:
            raise DomainError(f"pairs_per_mode must be positive, got {self.pairs_per_mode}")
        object.__setattr__(self, "variant", _coerce_variant(self.variant))
        kind = self.source if isinstance(self.source, SourceKind) else SourceKind(str(self.source).lower())
        object.__setattr__(self, "source", kind)
        bases = tuple(self.bases)
        if not bases:
            raise DomainError("bases must be non-empty")
        for b in bases:
            if b not in BASES:
                raise DomainError(f"unknown basis {b!r}, expected subset of {BASES}")
        if len(set(bases)) != len(bases):
            raise DomainError(f"duplicate basis in {bases}")
        object.__setattr__(self, "bases", bases)
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")


@dataclass(frozen=True)
class CoincidenceTable:
    """Counts per (pixel, basis, heralding detector) cell.

    ``pairs[y, x, b, det]`` is the sampled pair number for the cell and
    ``counts[y, x, b, det]`` its (ICCD0, ICCD1, absorbed) split; the split
    always sums to the pair number.
    """

    bases: tuple
    pairs: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != pairs.shape + (3,):
            raise DomainError(
                f"counts shape {counts.shape} does not extend pairs shape {pairs.shape}"
            )
        if (counts < 0).any():
            raise DomainError("counts must be non-negative")
        if not (counts.sum(axis=-1) == pairs).all():
            raise DomainError("per-cell counts must sum to the sampled pair number")
        object.__setattr__(self, "bases", tuple(self.bases))
        for arr in (pairs, counts):
            arr.flags.writeable = False
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "counts", counts)

    def cell(self, x, y, basis, detector):
        """(c_d0, c_d1, c_abs) for one pixel, basis, and heralding detector."""
        bi = self.bases.index(basis)
        det = HERALD_DETECTORS.index(detector)
        return tuple(int(c) for c in self.counts[y, x, bi, det])


class BlockEstimate(NamedTuple):
    """Inverted block probability with a confidence half-width."""

    p_hat: float
    half_width: float
    clipped: bool


class DiattenuatorEstimate(NamedTuple):
    """Per-pixel reconstruction: tau, signed d vector, tau spread."""

    tau_hat: float
    d_hat: tuple
    tau_consistency: float


@dataclass(frozen=True)
class ReconstructionResult:
    """Per-pixel diattenuator estimates plus inversion diagnostics.

    ``half_width`` and ``clipped`` are per (pixel, probe) in the canonical
    probe order H, V, D, A, R, L.
    """

    width: int
    height: int
    tau_hat: np.ndarray
    d_hat: np.ndarray
    tau_consistency: np.ndarray
    half_width: np.ndarray
    clipped: np.ndarray

    def estimate(self, x, y):
        return DiattenuatorEstimate(
            float(self.tau_hat[y, x]),
            tuple(float(c) for c in self.d_hat[y, x]),
            float(self.tau_consistency[y, x]),
        )


def probe_for_detector(basis, detector):
    """Probe state tagged by a heralding click.

    The herald is rotated so the basis's first state exits at DX; perfect
    anti-correlation then means DX tags the imaging photon with the second
    state and DY with the first.
    """
    first, second = BASIS_STATES[basis]
    if detector in (0, "DX"):
        return ProbeState(second, basis)
    if detector in (1, "DY"):
        return ProbeState(first, basis)
    raise DomainError(f"unknown heralding detector {detector!r}")


def effective_block_probability(pix, probe):
    """Block probability of one pixel for one probe state.

    p = 1 - tau (1 + d . shat) with shat the probe's unit Stokes 3-vector.
    Transmissions beyond unity by more than 1e-12 violate passivity; values
    within 1e-12 of the [0, 1] boundary are clamped onto it.
    """
    s = probe_stokes(probe.label)
    t = pix.tau * (1.0 + pix.d[0] * s.s1 + pix.d[1] * s.s2 + pix.d[2] * s.s3)
    if t > 1.0 + 1e-12:
        raise PassivityError(
            f"probe {probe.label}: transmission {t} exceeds unity"
        )
    if t < -1e-12:
        raise DomainError(f"probe {probe.label}: negative transmission {t}")
    return min(1.0, max(0.0, 1.0 - t))


def simulate_heralded_run(cfg):
    """Monte Carlo coincidence counts for a full imaging run.

    For every pixel, basis, and probe state the pair count is drawn from
    the source model with mean ``pairs_per_mode``, and each imaging photon
    runs the interferometer at that mode's block probability. Every cell
    uses its own counter-derived substream, so the table is deterministic
    for a given config and independent of evaluation order.

    Returns
    -------
    CoincidenceTable
    """
    sample = cfg.sample
    src = SourceModel(cfg.source, cfg.pairs_per_mode)
    nb = len(cfg.bases)
    pairs = np.zeros((sample.height, sample.width, nb, 2), dtype=np.int64)
    counts = np.zeros((sample.height, sample.width, nb, 2, 3), dtype=np.int64)
    for iy in range(sample.height):
        for ix in range(sample.width):
            pix = sample.pixel(ix, iy)
            for bi, basis in enumerate(cfg.bases):
                for det in range(2):
                    cell = ((iy * sample.width + ix) * nb + bi) * 2 + det
                    probe = probe_for_detector(basis, det)
                    p = effective_block_probability(pix, probe)
                    n_pairs = int(_draw(src, substream(cfg.seed, 1, cell)))
                    pairs[iy, ix, bi, det] = n_pairs
                    if n_pairs == 0:
                        continue
                    params = ZenoParams(cfg.n, p, cfg.variant)
                    counts[iy, ix, bi, det] = run_protocol_mc(
                        params, n_pairs, cfg.seed, _key=(2, cell)
                    )
    return CoincidenceTable(cfg.bases, pairs, counts)


def _detected_ratio(n, p, variant):
    out = run_protocol(ZenoParams(n, p, variant))
    return out.p_d1 / (out.p_d0 + out.p_d1)


def estimate_block_probability(c_d0, c_d1, n, variant=AbsorberModel.MIXTURE):
    """Invert detected counts to a block probability.

    Absorbed photons never reach a detector, so the inversion matches the
    observable ratio c_d1/(c_d0+c_d1) against its analytic counterpart
    P_D1/(P_D0+P_D1), which increases monotonically with p at fixed n.
    Bisection runs to 1e-10 in p.

    Parameters
    ----------
    c_d0, c_d1 : int
        Detected counts at the two ports; their sum must be >= 1.
    n : int
        Cycle count of the runs that produced the counts.
    variant : AbsorberModel or str

    Returns
    -------
    BlockEstimate
        p_hat, a binomial-propagated confidence half-width (three-sigma SE
        of the ratio divided by the local response slope), and a clipped
        flag set when the empirical ratio exceeds the achievable range and
        the estimate was pinned to the boundary.
    """
    variant = _coerce_variant(variant)
    if c_d0 < 0 or c_d1 < 0:
        raise DomainError(f"counts must be non-negative, got ({c_d0}, {c_d1})")
    total = c_d0 + c_d1
    if total < 1:
        raise DomainError("at least one detected count is required")
    r_hat = c_d1 / total
    r_top = _detected_ratio(n, 1.0, variant)
    clipped = False
    if r_hat <= 0.0:
        p_hat = 0.0
    elif r_hat >= r_top:
        p_hat = 1.0
        clipped = r_hat > r_top
    else:
        lo, hi = 0.0, 1.0
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            if _detected_ratio(n, mid, variant) < r_hat:
                lo = mid
            else:
                hi = mid
        p_hat = 0.5 * (lo + hi)
    # propagate the binomial SE of r through the inverse response
    h = 1e-6
    lo_p, hi_p = max(0.0, p_hat - h), min(1.0, p_hat + h)
    slope = (_detected_ratio(n, hi_p, variant) - _detected_ratio(n, lo_p, variant)) / (hi_p - lo_p)
    se = math.sqrt(max(r_hat * (1.0 - r_hat), 0.0) / total)
    half = _CONFIDENCE_Z * se / slope if slope > 0.0 else math.inf
    return BlockEstimate(p_hat, half, clipped)


def reconstruct_diattenuator(t_hat):
    """Recover (tau, d, consistency) from six transmission estimates.

    Parameters
    ----------
    t_hat : mapping or sequence
        Transmissions T_X = 1 - p_X for X in H, V, D, A, R, L, either as a
        mapping keyed by probe label or a sequence in that order.

    Returns
    -------
    DiattenuatorEstimate
        Per basis k: tau_k = (T1+T2)/2 and d_k = (T1-T2)/(T1+T2), signed
        positive toward the first-listed state (H, D, R). tau_hat averages
        the three per-basis values and tau_consistency is their max-min
        spread (zero for any noiseless single-diattenuator input).
    """
    if hasattr(t_hat, "keys"):
        missing = [k for k in PROBE_ORDER if k not in t_hat]
        if missing:
            raise IncompleteDataError(f"missing transmissions for probes {missing}")
        t = {k: float(t_hat[k]) for k in PROBE_ORDER}
    else:
        vals = list(t_hat)
        if len(vals) != 6:
            raise DomainError(f"expected 6 transmissions, got {len(vals)}")
        t = dict(zip(PROBE_ORDER, (float(v) for v in vals)))
    for label, v in t.items():
        if not -1e-12 <= v <= 1.0 + 1e-12:
            raise DomainError(f"transmission for {label} must be in [0, 1], got {v}")
    taus = []
    ds = []
    for basis in BASES:
        first, second = BASIS_STATES[basis]
        t1, t2 = t[first], t[second]
        if t1 + t2 == 0.0:
            raise DomainError(f"basis {basis}: both transmissions are zero, d undefined")
        taus.append(0.5 * (t1 + t2))
        ds.append((t1 - t2) / (t1 + t2))
    return DiattenuatorEstimate(
        sum(taus) / 3.0, tuple(ds), max(taus) - min(taus)
    )


def reconstruct_image(table, cfg):
    """Per-pixel diattenuator reconstruction from a coincidence table.

    Requires all three bases in the table; estimates each probe's block
    probability from its heralded cell, converts to transmissions, and
    reduces per pixel. Cells with no detected counts make the pixel
    unreconstructable and raise IncompleteDataError naming it.

    Returns
    -------
    ReconstructionResult
    """
    missing = [b for b in BASES if b not in table.bases]
    if missing:
        raise IncompleteDataError(
            f"reconstruction needs bases {list(BASES)}, table lacks {missing}"
        )
    h, w = table.pairs.shape[:2]
    if (w, h) != (cfg.sample.width, cfg.sample.height):
        raise DomainError(
            f"table grid {w}x{h} does not match sample {cfg.sample.width}x{cfg.sample.height}"
        )
    tau_hat = np.zeros((h, w))
    d_hat = np.zeros((h, w, 3))
    consistency = np.zeros((h, w))
    half_width = np.zeros((h, w, 6))
    clipped = np.zeros((h, w, 6), dtype=bool)
    probe_index = {label: i for i, label in enumerate(PROBE_ORDER)}
    for iy in range(h):
        for ix in range(w):
            t = {}
            for basis in BASES:
                bi = table.bases.index(basis)
                for det in range(2):
                    probe = probe_for_detector(basis, det)
                    c0, c1, _ = (int(v) for v in table.counts[iy, ix, bi, det])
                    if c0 + c1 == 0:
                        raise IncompleteDataError(
                            f"pixel ({ix}, {iy}) probe {probe.label}: no detected counts"
                        )
                    est = estimate_block_probability(c0, c1, cfg.n, cfg.variant)
                    pi = probe_index[probe.label]
                    half_width[iy, ix, pi] = est.half_width
                    clipped[iy, ix, pi] = est.clipped
                    t[probe.label] = 1.0 - est.p_hat
            rec = reconstruct_diattenuator(t)
            tau_hat[iy, ix] = rec.tau_hat
            d_hat[iy, ix] = rec.d_hat
            consistency[iy, ix] = rec.tau_consistency
    return ReconstructionResult(
        width=w,
        height=h,
        tau_hat=tau_hat,
        d_hat=d_hat,
        tau_consistency=consistency,
        half_width=half_width,
        clipped=clipped,
    )
