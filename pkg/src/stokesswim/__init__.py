"""Two-dimensional Stokes flow around a deforming swimmer.

P2/P1 Taylor-Hood finite elements on Triangle meshes, fluid wrenches by
boundary or volume integration, and quaternion RK4 kinematics for the
swimmer's rigid motion.
"""
from .errors import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    GeometryError,
    MeshResourceError,
    SimulationError,
    SingularMatrixError,
    StokesSwimError,
    UnsupportedOrderError,
)
from .mesh import Marker, Mesh, generate_pierced_mesh, rectangle_mesh
from .stokes import StokesDiscretization, StokesProblem, convergence_study, solve, solve_fundamental_problems
from .forces import assemble_resistance, solve_rigid_velocity, surface_wrench, volume_wrench
from .swimmer import ScallopParams, SimulationConfig, run

__version__ = "0.1.0"
