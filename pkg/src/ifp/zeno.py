"""Chained quantum-Zeno interferometer for one polarization-pixel mode.

The photon lives in two path modes. Mode 1 is the port it starts in and is
thrown back to whenever the object blocks the other arm (detector D1, the
"blocked" indicator); mode 2 is the port it fully transfers to when nothing
blocks (detector D0). One cycle is a pass through the pi/4n beamsplitter,
a traversal of the object arm, and a second pass through the beamsplitter,
so after n unblocked cycles the total amplitude rotation is exactly pi/2
and the photon exits at D0 with certainty.

Blocking with per-cycle probability p is modeled three ways, selected by
``AbsorberModel``:

* MIXTURE: the channel mixes "blocked" and "free" each cycle,
  rho -> p B(rho) + (1-p) rho. Blocked means the mode-2 population moves to
  the absorbed sink and mode-1/mode-2 coherences die.
* DAMPING: coherent amplitude attenuation sqrt(1-p) on mode 2, population
  deficit into the sink; coherences scale by sqrt(1-p) instead of (1-p).
* RUNWISE: the object either blocks for a whole run (probability p) or is
  absent; the per-cycle channel is the identity and the mixing happens at
  the run level.

All three coincide exactly at p = 0 and p = 1.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .rng import substream

__all__ = [
    "AbsorberModel",
    "PathState",
    "ZenoParams",
    "RunOutcome",
    "beamsplitter_rotation",
    "cycle_block_probability",
    "object_channel",
    "initial_state",
    "run_protocol",
    "run_protocol_mc",
    "discrimination_signal",
]

# trials per Monte Carlo block; each block gets its own counter-based
# substream so totals are independent of scheduling
_MC_BATCH = 1 << 14


class AbsorberModel(enum.Enum):
    """Where the classical blocking mixture is applied."""

    MIXTURE = "mixture"
    DAMPING = "damping"
    RUNWISE = "runwise"


def _coerce_variant(variant):
    if isinstance(variant, AbsorberModel):
        return variant
    try:
        return AbsorberModel(str(variant).lower())
    except ValueError:
        names = [v.value for v in AbsorberModel]
        raise DomainError(f"unknown absorber model {variant!r}, expected one of {names}") from None


@dataclass(frozen=True)
class PathState:
    """Two-mode density matrix plus the accumulated absorption probability.

    Invariants checked on construction: rho Hermitian and positive
    semidefinite (1e-12 eigenvalue tolerance), trace(rho) + absorbed = 1
    within 1e-12.
    """

    rho: np.ndarray
    absorbed: float = 0.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise DomainError(f"path state must be 2x2, got {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise DomainError("path state must be Hermitian")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise DomainError("path state must be positive semidefinite")
        total = float(rho[0, 0].real + rho[1, 1].real) + self.absorbed
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"trace + absorbed must be 1, got {total}")
        rho = rho.copy()
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class ZenoParams:
    """Cycle count n, per-cycle block probability p, absorber model."""

    n: int
    p: float
    variant: AbsorberModel = AbsorberModel.MIXTURE

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must be in [0, 1], got {self.p}")
        object.__setattr__(self, "variant", _coerce_variant(self.variant))


@dataclass(frozen=True)
class RunOutcome:
    """Probability triple for one run: detector D0, detector D1, absorbed."""

    p_d0: float
    p_d1: float
    p_abs: float

    def __post_init__(self):
        total = 0.0
        for name in ("p_d0", "p_d1", "p_abs"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise DomainError(f"{name} must be a probability, got {v}")
            total += v
            # snap float dust onto the exact bounds
            object.__setattr__(self, name, min(1.0, max(0.0, v)))
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"outcome probabilities must sum to 1, got {total}")


def beamsplitter_rotation(theta):
    """Real rotation [[cos t, -sin t], [sin t, cos t]] between the path modes.

    A "theta beamsplitter": the amplitude rotation angle is theta, i.e. a
    Bloch-sphere rotation by 2*theta about Y.
    """
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def cycle_block_probability(p_pass):
    """Effective per-cycle block probability for a single-pass probability.

    The arm is traversed twice per cycle (out and back), so
    p_cycle = 1 - (1 - p_pass)^2.
    """
    if not 0.0 <= p_pass <= 1.0:
        raise DomainError(f"p_pass must be in [0, 1], got {p_pass}")
    return 1.0 - (1.0 - p_pass) ** 2


def initial_state():
    """Photon in mode 1, nothing absorbed."""
    return PathState(np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex), 0.0)


def _channel_arrays(rho, absorbed, p, variant):
    """Apply one object-arm traversal to raw (rho, absorbed)."""
    if variant is AbsorberModel.RUNWISE:
        return rho, absorbed
    if variant is AbsorberModel.MIXTURE:
        coher = 1.0 - p
    else:
        coher = math.sqrt(1.0 - p)
    out = np.array(
        [
            [rho[0, 0], coher * rho[0, 1]],
            [coher * rho[1, 0], (1.0 - p) * rho[1, 1]],
        ]
    )
    return out, absorbed + p * float(rho[1, 1].real)


def object_channel(state, p, variant=AbsorberModel.MIXTURE):
    """One traversal of the object arm.

    Parameters
    ----------
    state : PathState
    p : float
        Effective block probability for this traversal, in [0, 1].
    variant : AbsorberModel or str

    Returns
    -------
    PathState
        MIXTURE moves p times the mode-2 population into the absorbed sink
        and scales coherences by (1-p); DAMPING scales the mode-2 amplitude
        by sqrt(1-p) instead; RUNWISE returns the state unchanged (its
        mixing happens at the run level).
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must be in [0, 1], got {p}")
    variant = _coerce_variant(variant)
    rho, absorbed = _channel_arrays(np.asarray(state.rho, dtype=complex), state.absorbed, p, variant)
    return PathState(rho, absorbed)


def _evolve(n, p, variant):
    """Density-matrix evolution over n cycles; returns a RunOutcome."""
    bs = beamsplitter_rotation(math.pi / (4 * n))
    bs_t = bs.T
    rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    absorbed = 0.0
    for _ in range(n):
        rho = bs @ rho @ bs_t
        rho, absorbed = _channel_arrays(rho, absorbed, p, variant)
        rho = bs @ rho @ bs_t
    return RunOutcome(float(rho[1, 1].real), float(rho[0, 0].real), absorbed)


def run_protocol(params):
    """Analytic detection and absorption probabilities for one run.

    Parameters
    ----------
    params : ZenoParams

    Returns
    -------
    RunOutcome
        p_d0 (mode-2 population after extraction), p_d1 (mode-1), p_abs.
        At p = 0 the run is lossless interference and p_d0 = 1 up to
        floating-point rounding.
    """
    if params.variant is AbsorberModel.RUNWISE:
        blocked = _evolve(params.n, 1.0, AbsorberModel.MIXTURE)
        clear = _evolve(params.n, 0.0, AbsorberModel.MIXTURE)
        w = params.p
        return RunOutcome(
            w * blocked.p_d0 + (1.0 - w) * clear.p_d0,
            w * blocked.p_d1 + (1.0 - w) * clear.p_d1,
            w * blocked.p_abs + (1.0 - w) * clear.p_abs,
        )
    return _evolve(params.n, params.p, params.variant)


def discrimination_signal(params):
    """P(D0) - P(D1) for one run; +1 means certainly unblocked."""
    out = run_protocol(params)
    return out.p_d0 - out.p_d1


def _mc_batch(n, p, variant, m, rng):
    """One vectorized block of m trials; returns (c_d0, c_d1, c_abs).

    Every lane draws the same number of randoms each cycle regardless of its
    fate, so the stream layout is fixed and results do not depend on which
    photons were absorbed.
    """
    theta = math.pi / (4 * n)
    c, s = math.cos(theta), math.sin(theta)
    a1 = np.ones(m)
    a2 = np.zeros(m)
    alive = np.ones(m, dtype=bool)
    if variant is AbsorberModel.RUNWISE:
        blocked = rng.random(m) < p
    for _ in range(n):
        a1, a2 = c * a1 - s * a2, s * a1 + c * a2
        if variant is AbsorberModel.MIXTURE or variant is AbsorberModel.RUNWISE:
            if variant is AbsorberModel.MIXTURE:
                hit = alive & (rng.random(m) < p)
            else:
                hit = alive & blocked
            u_meas = rng.random(m)
            norm2 = a1 * a1 + a2 * a2
            p_arm2 = a2 * a2 / np.where(norm2 > 0.0, norm2, 1.0)
            absorbed_now = hit & (u_meas < p_arm2)
            collapsed = hit & ~absorbed_now
            alive &= ~absorbed_now
            # projective collapse back onto mode 1
            a1 = np.where(collapsed, np.where(a1 >= 0.0, 1.0, -1.0), a1)
            a2 = np.where(collapsed, 0.0, a2)
        else:  # DAMPING: jump/no-jump unraveling of the amplitude channel
            u_jump = rng.random(m)
            norm2 = a1 * a1 + a2 * a2
            jump_p = p * a2 * a2 / np.where(norm2 > 0.0, norm2, 1.0)
            jumped = alive & (u_jump < jump_p)
            alive &= ~jumped
            a2 = np.where(alive, a2 * math.sqrt(1.0 - p), a2)
            norm = np.sqrt(a1 * a1 + a2 * a2)
            norm = np.where((norm > 0.0) & alive, norm, 1.0)
            a1 = a1 / norm
            a2 = a2 / norm
        a1, a2 = c * a1 - s * a2, s * a1 + c * a2
    u_det = rng.random(m)
    norm2 = a1 * a1 + a2 * a2
    p_d0 = a2 * a2 / np.where(norm2 > 0.0, norm2, 1.0)
    d0 = alive & (u_det < p_d0)
    d1 = alive & ~d0
    return int(d0.sum()), int(d1.sum()), int((~alive).sum())


def run_protocol_mc(params, trials, seed, _key=()):
    """Stochastic unraveling of the run, counted over independent trials.

    Parameters
    ----------
    params : ZenoParams
    trials : int
        Number of photons to simulate, >= 1.
    seed : int
        Master seed. Trials are processed in fixed-size blocks, each on its
        own counter-derived substream, so the counts are bit-identical for
        a given (params, trials, seed) regardless of execution order and
        may be merged across parallel workers by summation.

    Returns
    -------
    tuple of int
        (c_d0, c_d1, c_abs); sums to trials.

    Notes
    -----
    This is an independent route to the same physics as run_protocol: it
    never evaluates the density-matrix channel, only per-photon amplitude
    dynamics with projective measurements, so agreement between the two is
    a genuine cross-check.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    c_d0 = c_d1 = c_abs = 0
    done = 0
    batch_index = 0
    while done < trials:
        m = min(_MC_BATCH, trials - done)
        rng = substream(seed, *_key, batch_index)
        b0, b1, ba = _mc_batch(params.n, params.p, params.variant, m, rng)
        c_d0 += b0
        c_d1 += b1
        c_abs += ba
        done += m
        batch_index += 1
    return c_d0, c_d1, c_abs
