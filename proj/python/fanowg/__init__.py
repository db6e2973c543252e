# SPDX-License-Identifier: Apache-2.0
"""Waveguide scattering, trapped modes and Fano resonances.

Frequencies named ``sqrt_*`` are sqrt(lambda); ``lam`` is lambda itself.
"""

from ._fanowg import (
    FanoError,
    Geometry,
    ScatteringMatrix,
    ScatteringProblem,
    SolverSettings,
    asy_smatrix,
    fano_width,
    fit_circle,
    load_config,
    mm_smatrix,
    resonance,
    strip,
    sweep,
    sweep_mm,
    trapped_mode,
    zero_transmission,
)

__all__ = [
    "FanoError",
    "Geometry",
    "ScatteringMatrix",
    "ScatteringProblem",
    "SolverSettings",
    "asy_smatrix",
    "fano_width",
    "fit_circle",
    "load_config",
    "mm_smatrix",
    "resonance",
    "strip",
    "sweep",
    "sweep_mm",
    "trapped_mode",
    "zero_transmission",
]
