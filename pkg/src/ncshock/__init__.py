"""Finite volume approximation of nonclassical shocks in cubic elastodynamics.

Modules:

* :mod:`ncshock.model` - stress law, kinetic relation, shock classification
* :mod:`ncshock.riemann` - exact nonclassical Riemann solver
* :mod:`ncshock.scheme` - moving-mesh discontinuous reconstruction scheme
* :mod:`ncshock.reference` - Glimm and Godunov reference schemes
* :mod:`ncshock.harness` - built-in tests, runs, diagnostics and the CLI
"""

from .model import ModelParams, ShockClass, State
from .riemann import ElementaryWave, RiemannError, WaveFan, WaveKind, sample_fan, solve_riemann
from .scheme import (Boundary, MeshSignPolicy, MovingGrid, PiecewiseConstant, SchemeConfig, SchemeError,
                     advance, initialize, riemann_data, step)

__version__ = "0.1.0"

__all__ = [
    "Boundary", "ElementaryWave", "MeshSignPolicy", "ModelParams", "MovingGrid", "PiecewiseConstant",
    "RiemannError", "SchemeConfig", "SchemeError", "ShockClass", "State", "WaveFan", "WaveKind",
    "advance", "initialize", "riemann_data", "sample_fan", "solve_riemann", "step",
]
