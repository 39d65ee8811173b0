"""Seeded random instance generators for property suites.

All functions take an explicit random.Random so that test runs are
reproducible from a single seed.  Generated SCRs always choose inside
the Pareto frontier of linear profiles, so efficiency holds by
construction; stronger conditions are obtained by rejection against the
checkers at the call site.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .domains.housing import Economy
from .domains.jobs import JobRotationProblem
from .domains.marriage import MarriageProblem
from .model import Profile, SocialChoiceRule, pareto_frontier
from .rights import BASE, Coalition, RightsStructure, SocialEnvironment, State


def random_linear_profile(
    rng: random.Random, pid: str, alternatives: Sequence[str], n_agents: int
) -> Profile:
    orders = []
    for _ in range(n_agents):
        order = list(alternatives)
        rng.shuffle(order)
        orders.append(order)
    return Profile.from_orders(pid, tuple(alternatives), orders)


def random_weak_profile(
    rng: random.Random, pid: str, alternatives: Sequence[str], n_agents: int
) -> Profile:
    """Random weak orders; ties allowed, no domain restriction enforced."""
    rows = []
    for _ in range(n_agents):
        rows.append(tuple(rng.randrange(len(alternatives)) for _ in alternatives))
    return Profile.from_ranks(pid, tuple(alternatives), rows)


def random_scr(
    rng: random.Random,
    n_alternatives: int = 3,
    n_agents: int = 3,
    n_profiles: int = 2,
    multi_valued: bool = False,
) -> SocialChoiceRule:
    """Random efficient SCR: nonempty subsets of each profile's Pareto frontier.

    With `multi_valued`, every chosen set has at least two outcomes
    (profiles whose frontier is a singleton are redrawn).
    """
    alternatives = tuple(f"a{i}" for i in range(n_alternatives))
    profiles = []
    choices = {}
    for k in range(n_profiles):
        while True:
            prof = random_linear_profile(rng, f"R{k}", alternatives, n_agents)
            frontier = sorted(pareto_frontier(prof))
            low = 2 if multi_valued else 1
            if len(frontier) < low:
                continue
            size = rng.randint(low, len(frontier))
            chosen = frozenset(rng.sample(frontier, size))
            profiles.append(prof)
            choices[prof.id] = chosen
            break
    return SocialChoiceRule(tuple(profiles), choices)


def random_environment(
    rng: random.Random,
    n_states: int = 6,
    n_agents: int = 3,
    n_alternatives: int | None = None,
    density: float = 0.35,
    weak: bool = False,
) -> SocialEnvironment:
    """Random finite environment: arbitrary outcome labels, sparse gamma."""
    n_alts = n_alternatives if n_alternatives is not None else max(2, n_states - 1)
    alternatives = tuple(f"z{i}" for i in range(n_alts))
    states = tuple(
        State(f"s{i}", rng.choice(alternatives), BASE) for i in range(n_states)
    )
    coalitions = [
        frozenset(c)
        for size in range(1, n_agents + 1)
        for c in itertools.combinations(range(n_agents), size)
    ]
    gamma: dict[tuple[str, str], frozenset[Coalition]] = {}
    for a in states:
        for b in states:
            if a.key == b.key or rng.random() > density:
                continue
            fam = frozenset(rng.sample(coalitions, rng.randint(1, min(2, len(coalitions)))))
            gamma[(a.key, b.key)] = fam
    rights = RightsStructure(states, gamma)
    maker = random_weak_profile if weak else random_linear_profile
    profile = maker(rng, "R", alternatives, n_agents)
    return SocialEnvironment(rights, profile)


def random_job_problem(
    rng: random.Random, pid: str, n: int, common_best: str | None = None
) -> JobRotationProblem:
    jobs = tuple(f"j{i + 1}" for i in range(n))
    orders = []
    for _ in range(n):
        rest = [j for j in jobs if j != common_best]
        rng.shuffle(rest)
        order = ([common_best] if common_best else []) + rest
        orders.append(tuple(order))
    return JobRotationProblem(pid, jobs, tuple(orders))


def random_common_best_domain(
    rng: random.Random, n: int, n_profiles: int = 2
) -> list[JobRotationProblem]:
    """Distinct job profiles all top-ranking j1.

    Only ((n-1)!)^n distinct profiles exist on this domain (one for n=2);
    the request is clamped to that.
    """
    import math

    available = math.factorial(n - 1) ** n
    n_profiles = min(n_profiles, available)
    problems: list[JobRotationProblem] = []
    while len(problems) < n_profiles:
        p = random_job_problem(rng, f"P{len(problems)}", n, common_best="j1")
        if all(p.orders != q.orders for q in problems):
            problems.append(p)
    return problems


def random_hat_domain(
    rng: random.Random, n: int, n_profiles: int = 2
) -> list[JobRotationProblem]:
    """Distinct job profiles where agents 1 and 2 share a (varying) top job."""
    jobs = tuple(f"j{i + 1}" for i in range(n))
    problems: list[JobRotationProblem] = []
    while len(problems) < n_profiles:
        tau = rng.choice(jobs)
        orders = []
        for agent in range(n):
            if agent < 2:
                rest = [j for j in jobs if j != tau]
                rng.shuffle(rest)
                orders.append(tuple([tau] + rest))
            else:
                order = list(jobs)
                rng.shuffle(order)
                orders.append(tuple(order))
        p = JobRotationProblem(f"P{len(problems)}", jobs, tuple(orders))
        if all(p.orders != q.orders for q in problems):
            problems.append(p)
    return problems


def random_marriage_problem(
    rng: random.Random, pid: str, n_men: int, n_women: int, pure: bool = False
) -> MarriageProblem:
    men = tuple(f"m{i + 1}" for i in range(n_men))
    women = tuple(f"w{i + 1}" for i in range(n_women))
    men_prefs = {}
    for m in men:
        lst = list(women) if pure else list(women) + [m]
        rng.shuffle(lst)
        men_prefs[m] = tuple(lst)
    women_prefs = {}
    for w in women:
        lst = list(men) if pure else list(men) + [w]
        rng.shuffle(lst)
        women_prefs[w] = tuple(lst)
    return MarriageProblem(pid, men, women, men_prefs, women_prefs, pure)


def random_economy(rng: random.Random, eid: str, n: int = 3) -> Economy:
    """Random endowment economy; the outside option is everyone's last choice."""
    houses = tuple(f"h{i + 1}" for i in range(n))
    owners = {}
    for h in houses:
        size = rng.randint(1, min(2, n))
        owners[h] = frozenset(rng.sample(range(n), size))
    orders = []
    for _ in range(n):
        order = list(houses)
        rng.shuffle(order)
        orders.append(tuple(order + ["h0"]))
    return Economy(eid, n, houses, "h0", owners, tuple(orders))
