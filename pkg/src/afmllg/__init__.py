"""Gauss-Seidel projection solvers for two-sublattice (antiferro/ferrimagnetic) LLG dynamics."""

from afmllg.core import (
    DimensionlessParams,
    InvalidParameterError,
    MaterialParams,
    Mesh,
    SublatticeField,
    TABLE6,
    nondimensionalize,
    to_dimensionless_time,
    to_physical_time,
    uniform_field,
)
from afmllg.dynamics import EnergyBreakdown, effective_field, energy, local_coupling_f, project
from afmllg.gridops import HelmholtzSolver, laplacian, prepare_helmholtz
from afmllg.schemes import SCHEMES, SchemeState, advance, make_state, step
from afmllg.config import ConfigError, RunConfig, parse_config
from afmllg.experiments import (
    BlowUpError,
    PhaseDiagramSpec,
    RelaxationRun,
    neel_wall,
    phase_diagram,
    relax,
)
from afmllg.output import read_snapshot, read_trace, write_snapshot, write_trace

__all__ = [
    "BlowUpError",
    "ConfigError",
    "DimensionlessParams",
    "EnergyBreakdown",
    "HelmholtzSolver",
    "InvalidParameterError",
    "MaterialParams",
    "Mesh",
    "PhaseDiagramSpec",
    "RelaxationRun",
    "RunConfig",
    "SCHEMES",
    "SchemeState",
    "SublatticeField",
    "TABLE6",
    "advance",
    "effective_field",
    "energy",
    "laplacian",
    "local_coupling_f",
    "make_state",
    "neel_wall",
    "nondimensionalize",
    "parse_config",
    "phase_diagram",
    "prepare_helmholtz",
    "project",
    "read_snapshot",
    "read_trace",
    "relax",
    "step",
    "to_dimensionless_time",
    "to_physical_time",
    "uniform_field",
    "write_snapshot",
    "write_trace",
]
