"""rotakit: implementation via rights structures on finite social environments.

Solution concepts (core, myopic stable set, absorbing sets, generalized
stable sets, rotation programs), monotonicity-style condition checkers,
canonical implementing constructions, and the job-rotation, marriage,
and housing-exchange application domains.
"""

from .model import (
    CapExceeded,
    InputError,
    Preference,
    Profile,
    SocialChoiceRule,
    check_efficiency,
    dominates,
    is_monotonic_transformation,
    lower_contour_set,
    pareto_frontier,
    validate_domain_restriction,
)
from .rights import (
    Coalition,
    ImprovementDigraph,
    ImprovementPath,
    RightsStructure,
    SocialEnvironment,
    State,
    build_improvement_digraph,
    find_myopic_improvement_path,
)
from .solvers import (
    PartitionResult,
    RotationProgramVerdict,
    SolutionReport,
    compute_absorbing_sets,
    compute_core,
    compute_generalized_stable_sets,
    compute_mss,
    is_rotation_program,
    partition_into_rotation_programs,
)
from .conditions import (
    OrderingWitness,
    check_indirect_monotonicity,
    check_maskin_monotonicity,
    check_property_m,
    check_rotation_monotonicity,
    find_shared_ordering,
    verify_rotation_monotonicity_with,
)
from .constructors import (
    DiagnosticSets,
    build_thm1_structure,
    build_thm4_structure,
    compute_diagnostic_sets,
    verify_implementation_in_mss,
    verify_implementation_in_rotation_programs,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
