"""cdwlab - false-vacuum tunneling model of charge-density-wave transport.

Vacua of the extended sine-Gordon potential, soliton-pair spectra, the
tunneling matrix element, S-S' current curves, Zener fits and the
D + 1 dimensional pair-creation rates, with a CSV-emitting CLI.
"""

__version__ = "0.1.0"
__author__ = "cdwlab contributors"

from .errors import CdwlabError
from .series import CurveSeries, read_series, write_series
from .physics.vacuum_landscape import PotentialParams, VacuumSolution, solve_vacua

__all__ = [
    "CdwlabError",
    "CurveSeries",
    "read_series",
    "write_series",
    "PotentialParams",
    "VacuumSolution",
    "solve_vacua",
]
