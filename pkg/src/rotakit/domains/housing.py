"""Housing exchange economies with coalitional endowment systems.

Each house carries a minimal controlling coalition; a coalition's
endowment is every house whose controllers it contains.  That
representation makes agency, monotonicity, and non-contestability hold
by construction, leaving only exhaustivity to validate.  A coalition
may move the economy between two allocations whenever every outsider
strictly harmed by the move currently occupies a house the coalition
owns; adding the requirement that every member strictly gains yields
direct exclusion blocking, whose unblocked allocations form the direct
exclusion core.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ..model import CapExceeded, InputError, Profile, SocialChoiceRule
from ..rights import BASE, Coalition, RightsStructure, SocialEnvironment, State, coalition

ECONOMY_CAP = 4  # agents and houses; the allocation space is enumerated

Assignment = tuple[str, ...]  # per agent: a house or the outside option


@dataclass(frozen=True)
class Economy:
    id: str
    n_agents: int
    houses: tuple[str, ...]
    outside: str
    owners: Mapping[str, Coalition]
    orders: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        houses = tuple(self.houses)
        orders = tuple(tuple(o) for o in self.orders)
        object.__setattr__(self, "houses", houses)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(
            self, "owners", {h: coalition(k) for h, k in dict(self.owners).items()}
        )
        if len(set(houses)) != len(houses):
            raise InputError("duplicate house ids")
        if self.outside in houses:
            raise InputError("the outside option must not be a house")
        if any("," in h for h in houses + (self.outside,)):
            raise InputError("house ids may not contain commas")
        if set(self.owners) != set(houses):
            raise InputError("every house needs a minimal controlling coalition")
        for h, k in self.owners.items():
            if max(k) >= self.n_agents:
                raise InputError(f"owner coalition of {h!r} mentions an unknown agent")
        if len(orders) != self.n_agents:
            raise InputError("need one preference order per agent")
        menu = sorted(houses + (self.outside,))
        for i, order in enumerate(orders):
            if sorted(order) != menu:
                raise InputError(f"agent {i} order is not a permutation of houses+outside")

    def house_rank(self, agent: int, h: str) -> int:
        try:
            return self.orders[agent].index(h)
        except ValueError:
            raise InputError(f"unknown house {h!r}") from None

    def prefers(self, agent: int, a: str, b: str) -> bool:
        return self.house_rank(agent, a) < self.house_rank(agent, b)


def endowment(economy: Economy, members: Iterable[int]) -> frozenset[str]:
    """Houses whose minimal controlling coalition lies inside `members`."""
    ms = frozenset(members)
    return frozenset(h for h, k in economy.owners.items() if k <= ms)


def alloc_id(assignment: Assignment) -> str:
    return ",".join(assignment)


def parse_alloc(aid: str) -> Assignment:
    return tuple(aid.split(","))


def house_allocations(economy: Economy) -> tuple[Assignment, ...]:
    """All assignments of agents to houses or the outside option, houses unique."""
    if economy.n_agents > ECONOMY_CAP or len(economy.houses) > ECONOMY_CAP:
        raise CapExceeded(
            f"economies beyond {ECONOMY_CAP} agents/houses are refused",
            cap=ECONOMY_CAP,
            needed=max(economy.n_agents, len(economy.houses)),
        )
    out: list[Assignment] = []

    def place(agent: int, used: set[str], acc: list[str]) -> None:
        if agent == economy.n_agents:
            out.append(tuple(acc))
            return
        for h in economy.houses:
            if h not in used:
                used.add(h)
                acc.append(h)
                place(agent + 1, used, acc)
                acc.pop()
                used.discard(h)
        acc.append(economy.outside)
        place(agent + 1, used, acc)
        acc.pop()

    place(0, set(), [])
    return tuple(out)


def allocation_profile(economy: Economy) -> Profile:
    """Extended weak order over allocations, determined by the own assignment."""
    allocations = house_allocations(economy)
    alts = tuple(alloc_id(a) for a in allocations)
    rows = []
    for agent in range(economy.n_agents):
        rows.append(tuple(economy.house_rank(agent, a[agent]) for a in allocations))
    return Profile.from_ranks(economy.id, alts, rows)


def _entitled(economy: Economy, mu: Assignment, sigma: Assignment, members: Coalition) -> bool:
    """Clause (b): every outsider strictly harmed by mu -> sigma loses a house
    the coalition owns."""
    owned = endowment(economy, members)
    for j in range(economy.n_agents):
        if j in members:
            continue
        if economy.prefers(j, mu[j], sigma[j]) and mu[j] not in owned:
            return False
    return True


def can_exclusion_block(
    economy: Economy, mu: Assignment, members: Iterable[int], sigma: Assignment
) -> bool:
    """Direct exclusion blocking of mu with sigma: every member strictly gains
    and every harmed outsider can be excluded."""
    k = coalition(members)
    if not all(economy.prefers(i, sigma[i], mu[i]) for i in k):
        return False
    return _entitled(economy, mu, sigma, k)


def direct_exclusion_core(economy: Economy) -> tuple[str, ...]:
    """Allocations no coalition can directly exclusion block, by definition scan."""
    allocations = house_allocations(economy)
    coalitions = [
        frozenset(c)
        for size in range(1, economy.n_agents + 1)
        for c in itertools.combinations(range(economy.n_agents), size)
    ]
    core = []
    for mu in allocations:
        blocked = any(
            can_exclusion_block(economy, mu, k, sigma)
            for sigma in allocations
            if sigma != mu
            for k in coalitions
        )
        if not blocked:
            core.append(alloc_id(mu))
    return tuple(core)


def exclusion_rights_structure(economy: Economy) -> RightsStructure:
    """States are all allocations; gamma grants a coalition a move exactly
    when clause (b) holds, so the improvement digraph's strict-gain
    requirement completes direct exclusion blocking."""
    allocations = house_allocations(economy)
    states = tuple(State(alloc_id(a), alloc_id(a), BASE) for a in allocations)
    coalitions = [
        frozenset(c)
        for size in range(1, economy.n_agents + 1)
        for c in itertools.combinations(range(economy.n_agents), size)
    ]
    gamma: dict[tuple[str, str], frozenset[Coalition]] = {}
    for mu in allocations:
        for sigma in allocations:
            if mu == sigma:
                continue
            fam = frozenset(
                k for k in coalitions if _entitled(economy, mu, sigma, k)
            )
            if fam:
                gamma[(alloc_id(mu), alloc_id(sigma))] = fam
    return RightsStructure(states, gamma)


def exclusion_environment(economy: Economy) -> SocialEnvironment:
    return SocialEnvironment(exclusion_rights_structure(economy), allocation_profile(economy))


def _check_same_market(economies: Sequence[Economy]) -> None:
    if not economies:
        raise InputError("need at least one economy")
    first = economies[0]
    for e in economies[1:]:
        same = (
            e.n_agents == first.n_agents
            and e.houses == first.houses
            and e.outside == first.outside
            and e.owners == first.owners
        )
        if not same:
            raise InputError("domain economies disagree on agents/houses/ownership")
    ids = [e.id for e in economies]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate economy ids")


def exclusion_core_scr(economies: Sequence[Economy]) -> SocialChoiceRule:
    """The direct-exclusion-core rule over a finite domain of economies."""
    _check_same_market(economies)
    profiles = tuple(allocation_profile(e) for e in economies)
    choices = {e.id: frozenset(direct_exclusion_core(e)) for e in economies}
    return SocialChoiceRule(profiles, choices)
