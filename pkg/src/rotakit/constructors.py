"""Canonical implementing rights structures and end-to-end verifiers.

`build_thm1_structure` realises the five-rule code of rights on the
state space Gr(F) together with the bare alternatives: every agent may
move between same-profile chosen states (Rule 1), exit a chosen state
to any alternative in their lower contour at that state's profile
(Rule 2), enter any chosen state from an alternative (Rule 3), and move
freely between alternatives (Rule 4); everything else is empty (Rule 5).
`build_thm4_structure` differs only in Rule 1, which follows a supplied
circular ordering of each chosen set and grants moves between
consecutive states only, wrapping around.

The diagnostic sets M, U, Q decompose the MSS of these structures; the
verifiers recompute solution sets from scratch and compare against the
rule, reporting failures instead of assuming theorem preconditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import Profile, SocialChoiceRule, lower_contour_set
from .conditions import OrderingWitness, coerce_orderings
from .rights import (
    GRAPH,
    BASE,
    Coalition,
    RightsStructure,
    SocialEnvironment,
    State,
    build_improvement_digraph,
    can_reach,
)
from .solvers import (
    PartitionResult,
    compute_mss,
    partition_into_rotation_programs,
)

RULE1 = "rule1"
RULE2 = "rule2"
RULE3 = "rule3"
RULE4 = "rule4"


def graph_state_key(alt: str, profile_id: str) -> str:
    return f"{alt}@{profile_id}"


def _states_for(scr: SocialChoiceRule) -> tuple[State, ...]:
    states = []
    for p in scr.profiles:
        chosen = scr.choice(p.id)
        for a in scr.alternatives:
            if a in chosen:
                states.append(State(graph_state_key(a, p.id), a, GRAPH, p.id))
    states.extend(State(a, a, BASE) for a in scr.alternatives)
    return tuple(states)


def _rules_2_to_4(
    scr: SocialChoiceRule,
    gamma: dict[tuple[str, str], set[Coalition]],
    provenance: dict[tuple[str, str], str],
) -> None:
    agents = range(scr.n_agents)
    singletons = {i: frozenset([i]) for i in agents}
    everyone = frozenset(singletons.values())
    graph_keys = [
        (graph_state_key(a, p.id), a, p)
        for p in scr.profiles
        for a in scr.alternatives
        if a in scr.choice(p.id)
    ]
    for key, z, p in graph_keys:
        contours = [lower_contour_set(p, i, z) for i in agents]
        for x in scr.alternatives:
            fam = frozenset(singletons[i] for i in agents if x in contours[i])
            if fam:
                gamma[(key, x)] = set(fam)
                provenance[(key, x)] = RULE2
    for x in scr.alternatives:
        for key, _, _ in graph_keys:
            gamma[(x, key)] = set(everyone)
            provenance[(x, key)] = RULE3
        for y in scr.alternatives:
            if x != y:
                gamma[(x, y)] = set(everyone)
                provenance[(x, y)] = RULE4


def build_thm1_structure(scr: SocialChoiceRule) -> RightsStructure:
    """Five-rule structure with Rule 1 joining every same-profile chosen pair."""
    gamma: dict[tuple[str, str], set[Coalition]] = {}
    provenance: dict[tuple[str, str], str] = {}
    everyone = frozenset(frozenset([i]) for i in range(scr.n_agents))
    for p in scr.profiles:
        chosen = sorted(scr.choice(p.id))
        for z in chosen:
            for x in chosen:
                if z != x:
                    pair = (graph_state_key(z, p.id), graph_state_key(x, p.id))
                    gamma[pair] = set(everyone)
                    provenance[pair] = RULE1
    _rules_2_to_4(scr, gamma, provenance)
    return RightsStructure(
        _states_for(scr),
        {pair: frozenset(fam) for pair, fam in gamma.items()},
        provenance,
    )


def build_thm4_structure(
    scr: SocialChoiceRule, orderings: OrderingWitness | Mapping[str, Sequence[str]]
) -> RightsStructure:
    """Like the five-rule structure, but Rule 1 follows the circular orderings.

    Unit coalitions are granted only between consecutive ordered states
    (x(k,R),R) -> (x(k+1,R),R), indices wrapping; a singleton chosen set
    contributes no Rule 1 entries.
    """
    table = coerce_orderings(scr, orderings)
    gamma: dict[tuple[str, str], set[Coalition]] = {}
    provenance: dict[tuple[str, str], str] = {}
    everyone = frozenset(frozenset([i]) for i in range(scr.n_agents))
    for p in scr.profiles:
        ordering = table[p.id]
        m = len(ordering)
        if m == 1:
            continue
        for k in range(m):
            pair = (
                graph_state_key(ordering[k], p.id),
                graph_state_key(ordering[(k + 1) % m], p.id),
            )
            gamma[pair] = set(everyone)
            provenance[pair] = RULE1
    _rules_2_to_4(scr, gamma, provenance)
    return RightsStructure(
        _states_for(scr),
        {pair: frozenset(fam) for pair, fam in gamma.items()},
        provenance,
    )


@dataclass(frozen=True)
class DiagnosticSets:
    """The M / U / Q decomposition of the MSS at one profile."""

    profile_id: str
    m_states: tuple[str, ...]
    u_states: tuple[str, ...]
    q_by_profile: Mapping[str, tuple[str, ...]]
    q_states: tuple[str, ...]

    @property
    def union(self) -> frozenset[str]:
        return frozenset(self.m_states) | frozenset(self.u_states) | frozenset(self.q_states)


def compute_diagnostic_sets(
    structure: RightsStructure, scr: SocialChoiceRule, profile: Profile
) -> DiagnosticSets:
    """M(R): chosen graph states of R; U(R): unanimously-top alternatives;
    Q(R,R'): chosen graph states of R' with no improvement path into
    M(R) or U(R) at R; Q(R) their union over the domain."""
    env = SocialEnvironment(structure, profile)
    dg = build_improvement_digraph(env)
    m_states = tuple(
        s.key for s in structure.states if s.kind == GRAPH and s.profile_id == profile.id
    )
    u_states = tuple(
        s.key
        for s in structure.states
        if s.kind == BASE
        and all(profile.rank(i, s.outcome) == 0 for i in range(profile.n_agents))
    )
    escapers = can_reach(dg, m_states + u_states)
    q_by_profile = {}
    q_states = []
    for rp in scr.profiles:
        stuck = tuple(
            s.key
            for s in structure.states
            if s.kind == GRAPH and s.profile_id == rp.id and s.key not in escapers
        )
        q_by_profile[rp.id] = stuck
        q_states.extend(k for k in stuck if k not in q_states)
    return DiagnosticSets(profile.id, m_states, u_states, q_by_profile, tuple(q_states))


@dataclass(frozen=True)
class ProfileVerdict:
    profile_id: str
    ok: bool
    expected: frozenset[str]
    actual: frozenset[str]

    @property
    def missing(self) -> frozenset[str]:
        return self.expected - self.actual

    @property
    def extra(self) -> frozenset[str]:
        return self.actual - self.expected

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ImplementationReport:
    kind: str  # "mss" | "rotation-programs"
    ok: bool
    per_profile: tuple[ProfileVerdict, ...]
    partitions: Mapping[str, PartitionResult] | None = None

    def __bool__(self) -> bool:
        return self.ok


def _map_profiles(scr: SocialChoiceRule, fn, jobs: int) -> list:
    if jobs <= 1:
        return [fn(p) for p in scr.profiles]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, scr.profiles))


def verify_implementation_in_mss(
    structure: RightsStructure, scr: SocialChoiceRule, jobs: int = 1
) -> ImplementationReport:
    """Per profile, does h(MSS) equal the chosen set exactly?"""

    def check(p: Profile) -> ProfileVerdict:
        env = SocialEnvironment(structure, p)
        actual = compute_mss(env).outcome_set
        expected = scr.choice(p.id)
        return ProfileVerdict(p.id, actual == expected, expected, actual)

    verdicts = _map_profiles(scr, check, jobs)
    return ImplementationReport("mss", all(v.ok for v in verdicts), tuple(verdicts))


def verify_implementation_in_rotation_programs(
    structure: RightsStructure, scr: SocialChoiceRule, jobs: int = 1
) -> ImplementationReport:
    """MSS equality plus a rotation-program partition with blocks onto F(R)."""

    def check(p: Profile) -> tuple[ProfileVerdict, PartitionResult]:
        env = SocialEnvironment(structure, p)
        dg = build_improvement_digraph(env)
        mss = compute_mss(env, dg)
        actual = mss.outcome_set
        expected = scr.choice(p.id)
        ok = actual == expected
        partition = partition_into_rotation_programs(env, mss.states, dg)
        if partition.ok:
            ok = ok and all(
                frozenset(env.outcome(s) for s in block) == expected
                for block in partition.blocks
            )
        else:
            ok = False
        return ProfileVerdict(p.id, ok, expected, actual), partition

    results = _map_profiles(scr, check, jobs)
    verdicts = tuple(v for v, _ in results)
    partitions = {v.profile_id: part for v, part in results}
    return ImplementationReport(
        "rotation-programs", all(v.ok for v in verdicts), tuple(verdicts), partitions
    )
