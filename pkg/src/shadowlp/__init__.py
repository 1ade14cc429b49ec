"""Exact shadow simplex method over polyhedra with wide normal fans."""
from .exceptions import *  # noqa: F401,F403
from .geometry import (  # noqa: F401
    Polyhedron,
    basis_point,
    delta_from_subdeterminants,
    global_delta,
    is_bounded,
    is_feasible_basis,
    local_delta,
    normal_cone_membership,
    width_certificate_of_cone,
)
from .perturbation import EpsPoly  # noqa: F401
from .pivot import PivotTrace, follow_segment_chain, shadow_simplex  # noqa: F401
from .sampler import sample_conditioned, sample_exponential  # noqa: F401
from .optimize import optimize_with_delta_search, phase2_optimize  # noqa: F401
from .bounding import bound_global, bound_local  # noqa: F401
from .feasibility import phase1_global_delta, phase1_subdeterminant, ray_cast_to_basis  # noqa: F401
from .harness import brute_force_optimize, enumerate_vertices, generate_instance  # noqa: F401

__version__ = "0.1.0"
