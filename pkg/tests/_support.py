"""Shared helpers for the test suite."""

import numpy as np

# filled by the acceptance tests, echoed by conftest at the end of the run
ACCEPTANCE_RESULTS = []


def record_criterion(num, description, ok, detail=""):
    """Print one PASS/FAIL verdict line and enforce it."""
    line = "[%s] criterion %2d: %s" % ("PASS" if ok else "FAIL", num, description)
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_RESULTS.append(line)
    print(line, flush=True)
    assert ok, line

from ifp import (
    PROBE_ORDER,
    Diattenuator,
    analyzer_intensity,
    apply_mueller,
    probe_stokes,
)


def random_diattenuator(rng):
    """Uniform-ish draw over the valid (tau, d) family, passivity included."""
    direction = rng.normal(size=3)
    direction = direction / np.linalg.norm(direction)
    mag = rng.uniform(0.0, 1.0)
    tau = rng.uniform(0.05, 1.0 / (1.0 + mag))
    return Diattenuator(tau, tuple(mag * direction))


def forward_table(m):
    """Noiseless 36-intensity table for a Mueller matrix: 6 probes x 6 analyzers."""
    table = {}
    for probe in PROBE_ORDER:
        out = apply_mueller(m, probe_stokes(probe))
        table[probe] = [analyzer_intensity(out, a) for a in PROBE_ORDER]
    return table
