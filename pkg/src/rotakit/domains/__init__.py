"""Application domains: job rotation, marriage markets, housing exchange."""

from .jobs import (
    JobRotationProblem,
    alloc_id,
    all_allocations,
    arrangement_orderings,
    build_phi,
    circular_arrangement,
    common_best_job,
    efficient_scr,
    extend_job_preferences,
    parse_alloc,
    pareto_efficient_allocations,
    phi_orderings,
    phi_scr,
    reverse_preferences,
    second_best_swap,
    top_job_groups,
)
from .marriage import (
    MarriageProblem,
    Matching,
    StabilityVerdict,
    all_matchings,
    deferred_acceptance,
    enumerate_stable_matchings,
    is_stable,
    marriage_optimal_scr,
    matching_id,
    matching_profile,
    optimal_orderings,
    stable_set_scr,
)
from .housing import (
    Economy,
    allocation_profile,
    can_exclusion_block,
    direct_exclusion_core,
    endowment,
    exclusion_core_scr,
    exclusion_environment,
    exclusion_rights_structure,
    house_allocations,
)

__all__ = [name for name in dir() if not name.startswith("_")]
