"""Structure-preserving pseudo-spectral solver for non-isothermal
Cahn-Hilliard / Navier-Stokes flow with an internal-energy equation, plus
a thermodynamic audit of the resulting trajectories."""
from .audit import (
    BoundReport,
    DiagRecord,
    TestFunction,
    apriori_monitor,
    diagnostics,
    entropy_tolerance,
    weak_energy_residual,
    weak_entropy_check,
)
from .cahn_hilliard import ch_step, chemical_potential
from .constitutive import Params
from .errors import (
    CFLError,
    ConfigError,
    ConvergenceError,
    DomainError,
    GridMismatchError,
    PositivityError,
    SnapshotError,
    SolverError,
    ThermophaseError,
)
from .grid import Grid
from .heat import heat_step
from .io import Config, load_config, parse_config, read_diagnostics, read_snapshot, write_diagnostics, write_snapshot
from .mms import mms_error
from .navier_stokes import ns_step
from .sim import init_state, run, step
from .state import State, Trajectory

__version__ = "0.1.0"
