"""Stokes/Mueller calculus for diattenuating samples.

Conventions
-----------
Stokes components are ordered (S0, S1, S2, S3) with

    S0 = |h|^2 + |v|^2,  S1 = |h|^2 - |v|^2,
    S2 = h* v + h v*,    S3 = -i (h* v - h v*),

so right-circular light R = (1, i)/sqrt(2) has S3 = +1. Swapping the R/L
labels flips the sign of the third diattenuation component everywhere
consistently; no other quantity changes.

A pure diattenuator is parameterized by an intensity transmittance ``tau``
and a diattenuation vector ``d`` with |d| <= 1. Its Mueller matrix is

    M = tau * [[1, d^T], [d, m_D]],
    m_D = sqrt(1-|d|^2) I + (1 - sqrt(1-|d|^2)) dhat dhat^T,

the unit-vector (Lu-Chipman) form; the two readings d d^T and dhat dhat^T
agree only at |d| = 1, and only the unit-vector form keeps the per-basis
transmission contrast |I1-I2|/(I1+I2) equal to |d_k|.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    IncompleteDataError,
    PassivityError,
    StokesConsistencyError,
)

__all__ = [
    "JonesVector",
    "StokesVector",
    "MuellerMatrix",
    "Diattenuator",
    "ProbeState",
    "PROBES",
    "PROBE_ORDER",
    "BASES",
    "BASIS_STATES",
    "probe_stokes",
    "probe_jones",
    "stokes_from_jones",
    "degree_of_polarization",
    "apply_mueller",
    "stokes_from_intensities",
    "diattenuator_mueller",
    "mueller_from_36_intensities",
    "basis_rotation_jones",
    "analyzer_intensity",
]

PROBE_ORDER = ("H", "V", "D", "A", "R", "L")
BASES = ("HV", "DA", "RL")
BASIS_STATES = {"HV": ("H", "V"), "DA": ("D", "A"), "RL": ("R", "L")}

# Unit-s0 Stokes image of each canonical probe state.
_PROBE_STOKES = {
    "H": (1.0, 1.0, 0.0, 0.0),
    "V": (1.0, -1.0, 0.0, 0.0),
    "D": (1.0, 0.0, 1.0, 0.0),
    "A": (1.0, 0.0, -1.0, 0.0),
    "R": (1.0, 0.0, 0.0, 1.0),
    "L": (1.0, 0.0, 0.0, -1.0),
}

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_PROBE_JONES = {
    "H": (1.0 + 0.0j, 0.0 + 0.0j),
    "V": (0.0 + 0.0j, 1.0 + 0.0j),
    "D": (_SQRT_HALF + 0.0j, _SQRT_HALF + 0.0j),
    "A": (_SQRT_HALF + 0.0j, -_SQRT_HALF + 0.0j),
    "R": (_SQRT_HALF + 0.0j, 1j * _SQRT_HALF),
    "L": (_SQRT_HALF + 0.0j, -1j * _SQRT_HALF),
}


@dataclass(frozen=True)
class JonesVector:
    """Complex field amplitudes (h, v) of a fully polarized state."""

    h: complex
    v: complex

    def intensity(self):
        return abs(self.h) ** 2 + abs(self.v) ** 2

    def normalized(self):
        """Unit-intensity copy; raises DomainError on the zero vector."""
        norm = math.sqrt(self.intensity())
        if norm == 0.0:
            raise DomainError("cannot normalize the zero Jones vector")
        return JonesVector(self.h / norm, self.v / norm)


@dataclass(frozen=True)
class StokesVector:
    """Stokes parameters (s0, s1, s2, s3) in intensity units.

    Construction enforces physicality: s0 >= 0 and
    s1^2 + s2^2 + s3^2 <= s0^2 within 1e-9 relative tolerance.
    """

    s0: float
    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        if self.s0 < 0.0:
            raise DomainError(f"s0 must be non-negative, got {self.s0}")
        sq = self.s1 ** 2 + self.s2 ** 2 + self.s3 ** 2
        # relative tolerance, with an absolute floor for exact-zero states
        if sq > self.s0 ** 2 * (1.0 + 1e-9) + 1e-24:
            raise DomainError(
                "unphysical Stokes vector: |S|^2 = %.12g exceeds s0^2 = %.12g"
                % (sq, self.s0 ** 2)
            )

    def as_array(self):
        return np.array([self.s0, self.s1, self.s2, self.s3])


@dataclass(frozen=True, eq=False)
class MuellerMatrix:
    """A 4x4 real map on Stokes vectors, row/column order (S0, S1, S2, S3).

    ``fit_residual`` is populated by mueller_from_36_intensities with the
    least-squares residual (Frobenius norm); it doubles as a noise diagnostic
    and is None for directly constructed matrices.
    """

    m: np.ndarray
    fit_residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.m, dtype=float)
        if arr.shape != (4, 4):
            raise DomainError(f"Mueller matrix must be 4x4, got {arr.shape}")
        if arr[0, 0] < 0.0:
            raise DomainError("Mueller matrix must have m[0][0] >= 0")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "m", arr)


@dataclass(frozen=True)
class Diattenuator:
    """Transmittance tau in (0, 1] and diattenuation vector d, |d| <= 1.

    Passivity requires tau * (1 + |d|) <= 1: the best-transmitted probe
    cannot gain intensity. An ideal polarizer (tau = 0.5, |d| = 1) sits
    exactly on the boundary.
    """

    tau: float
    d: tuple

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(float(x) for x in self.d))
        if len(self.d) != 3:
            raise DomainError("diattenuation vector must have 3 components")
        if not 0.0 < self.tau <= 1.0:
            raise DomainError(f"tau must be in (0, 1], got {self.tau}")
        mag = math.sqrt(sum(x * x for x in self.d))
        if mag > 1.0 + 1e-12:
            raise DomainError(f"|d| must be <= 1, got {mag}")
        if self.tau * (1.0 + mag) > 1.0 + 1e-9:
            raise PassivityError(
                "passivity violated: tau*(1+|d|) = %.12g > 1" % (self.tau * (1.0 + mag))
            )

    @property
    def d_magnitude(self):
        return math.sqrt(sum(x * x for x in self.d))


@dataclass(frozen=True)
class ProbeState:
    """One of the six canonical probe states, tagged with its basis."""

    label: str
    basis: str

    def __post_init__(self):
        if self.label not in _PROBE_STOKES:
            raise DomainError(f"unknown probe label {self.label!r}")
        if self.basis not in BASIS_STATES or self.label not in BASIS_STATES[self.basis]:
            raise DomainError(f"probe {self.label!r} does not belong to basis {self.basis!r}")


PROBES = {
    label: ProbeState(label, basis)
    for basis, pair in BASIS_STATES.items()
    for label in pair
}


def probe_stokes(label):
    """Unit-s0 StokesVector of a canonical probe state."""
    try:
        return StokesVector(*_PROBE_STOKES[label])
    except KeyError:
        raise DomainError(f"unknown probe label {label!r}") from None


def probe_jones(label):
    """Unit-intensity JonesVector of a canonical probe state."""
    try:
        return JonesVector(*_PROBE_JONES[label])
    except KeyError:
        raise DomainError(f"unknown probe label {label!r}") from None


def stokes_from_jones(j):
    """Stokes parameters of a pure state.

    Parameters
    ----------
    j : JonesVector

    Returns
    -------
    StokesVector
        Satisfies s1^2 + s2^2 + s3^2 = s0^2 exactly (fully polarized).
    """
    h, v = complex(j.h), complex(j.v)
    s0 = abs(h) ** 2 + abs(v) ** 2
    if s0 == 0.0:
        raise DomainError("zero Jones vector has no polarization state")
    cross = h.conjugate() * v
    return StokesVector(s0, abs(h) ** 2 - abs(v) ** 2, 2.0 * cross.real, 2.0 * cross.imag)


def degree_of_polarization(s):
    """|S|/S0, in [0, 1]; raises DomainError when s0 is zero."""
    if s.s0 <= 0.0:
        raise DomainError("degree of polarization undefined for s0 = 0")
    return math.sqrt(s.s1 ** 2 + s.s2 ** 2 + s.s3 ** 2) / s.s0


def apply_mueller(m, s):
    """Apply a Mueller matrix to a Stokes vector (matrix-vector product)."""
    out = m.m @ s.as_array()
    return StokesVector(*out)


def stokes_from_intensities(i_h, i_v, i_d, i_a, i_r, i_l):
    """Assemble a Stokes vector from the six analyzer intensities.

    The pairs (iH+iV), (iD+iA), (iR+iL) all estimate S0 and must agree within
    1e-6 relative; a larger spread raises StokesConsistencyError carrying the
    three sums.
    """
    vals = (i_h, i_v, i_d, i_a, i_r, i_l)
    if any(x < 0.0 for x in vals):
        raise DomainError(f"intensities must be non-negative, got {vals}")
    sums = (i_h + i_v, i_d + i_a, i_r + i_l)
    top = max(sums)
    if top > 0.0 and (top - min(sums)) > 1e-6 * top:
        raise StokesConsistencyError(sums)
    return StokesVector(sums[0], i_h - i_v, i_d - i_a, i_r - i_l)


def diattenuator_mueller(dia):
    """Mueller matrix of a pure diattenuator.

    Parameters
    ----------
    dia : Diattenuator

    Returns
    -------
    MuellerMatrix
        tau * [[1, d^T], [d, m_D]] with the unit-vector Lu-Chipman block
        m_D = sqrt(1-|d|^2) I + (1 - sqrt(1-|d|^2)) dhat dhat^T. For d = 0,
        m_D reduces to the identity.
    """
    d = np.array(dia.d, dtype=float)
    mag = float(np.linalg.norm(d))
    if mag > 1.0 + 1e-12:
        raise DomainError(f"|d| must be <= 1, got {mag}")
    if mag == 0.0:
        m_d = np.eye(3)
    else:
        dhat = d / mag
        root = math.sqrt(max(0.0, 1.0 - mag * mag))
        m_d = root * np.eye(3) + (1.0 - root) * np.outer(dhat, dhat)
    m = np.empty((4, 4))
    m[0, 0] = 1.0
    m[0, 1:] = d
    m[1:, 0] = d
    m[1:, 1:] = m_d
    return MuellerMatrix(dia.tau * m)


def analyzer_intensity(s, label):
    """Intensity behind an ideal analyzer for the given probe state.

    The ideal analyzer transmits i = (s0 + shat . (s1, s2, s3)) / 2 where
    shat is the analyzer's unit Stokes 3-vector. This is the forward model
    used to generate the 36-intensity tables.
    """
    shat = _PROBE_STOKES[label] if label in _PROBE_STOKES else None
    if shat is None:
        raise DomainError(f"unknown analyzer label {label!r}")
    return 0.5 * (s.s0 + shat[1] * s.s1 + shat[2] * s.s2 + shat[3] * s.s3)


def mueller_from_36_intensities(table):
    """Least-squares Mueller estimate from the classical 36-intensity set.

    Parameters
    ----------
    table : mapping
        Probe label -> sequence of six analyzer intensities in the order
        (iH, iV, iD, iA, iR, iL), one entry per canonical probe
        H, V, D, A, R, L.

    Returns
    -------
    MuellerMatrix
        The matrix minimizing || M S_in - S_out ||_F. The six probe inputs
        only span a rank-4 set, so the system is overdetermined and solved
        by least squares; the residual is stored on ``fit_residual``.

    Notes
    -----
    Each probe's six analyzer intensities are first reduced to an output
    Stokes vector, which enforces the S0-consistency check per probe.
    """
    missing = [label for label in PROBE_ORDER if label not in table]
    if missing:
        raise IncompleteDataError(f"36-intensity table missing probes {missing}")
    s_in = np.column_stack([probe_stokes(label).as_array() for label in PROBE_ORDER])
    outs = []
    for label in PROBE_ORDER:
        row = table[label]
        if len(row) != 6:
            raise DomainError(f"probe {label!r} must have 6 analyzer intensities")
        outs.append(stokes_from_intensities(*row).as_array())
    s_out = np.column_stack(outs)
    # solve S_in^T M^T = S_out^T; the design has A A^T = diag(6, 2, 2, 2)
    mt, res, _, _ = np.linalg.lstsq(s_in.T, s_out.T, rcond=None)
    residual = float(math.sqrt(res.sum())) if res.size else float(
        np.linalg.norm(s_in.T @ mt - s_out.T)
    )
    return MuellerMatrix(mt.T, fit_residual=residual)


def basis_rotation_jones(basis):
    """Jones unitary mapping a basis's two states onto (1,0) and (0,1).

    HV is the identity, DA the Hadamard-like rotation, RL the
    circular-to-linear converter. Only the net unitary matters here; the
    physical waveplate decomposition is not materialized.
    """
    if basis == "HV":
        return np.eye(2, dtype=complex)
    if basis == "DA":
        return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _SQRT_HALF
    if basis == "RL":
        return np.array([[1.0, -1.0j], [1.0, 1.0j]], dtype=complex) * _SQRT_HALF
    raise DomainError(f"unknown basis {basis!r}")
