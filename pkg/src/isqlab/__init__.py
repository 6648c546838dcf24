"""Numerical laboratory for Schrodinger and wave scattering with inverse-square potentials.

Modules:
    bessel        Bessel functions and zeros of real order
    hankel        discrete Hankel transform on Bessel-zero grids
    sector        per-sector functional calculus of H_a
    families      reproducible test profiles
    scattering    wave operators, wave scattering data, critical decomposition
    inequalities  Hardy, Sobolev, norm-equivalence and Kato smoothing checks
    lattice       finite-difference models and the abstract wave-operator criterion
    io, cli       configs, manifests, result files and the command-line runner
"""

from .errors import (
    AccuracyError,
    ConfigError,
    ContractError,
    DomainError,
    HorizonError,
    IsqlabError,
    NumericalError,
    RangeError,
    ResolutionError,
    TruncationError,
)
from .hankel import RadialGrid, dht_forward, dht_inverse, radial_grid
from .sector import Multiplier, RadialProfile, SectorSpec, apply_multiplier, make_sector, sobolev_norm

__version__ = "0.1.0"
