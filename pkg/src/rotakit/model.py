"""Preferences, profiles, and social choice rules on finite alternative sets.

Alternatives are opaque string identifiers.  A preference is a weak order
stored as a rank vector (rank 0 = best, equal rank = indifference),
normalised so the ranks an agent uses form a contiguous block 0..k.
A profile bundles one preference per agent under a stable string id.
A social choice rule is an explicit finite table: profile id -> nonempty
set of chosen alternatives.

Everything in this module is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence


class InputError(ValueError):
    """Malformed input: unknown ids, bad shapes, violated preconditions."""


class CapExceeded(RuntimeError):
    """A brute-force cap was hit.  Searches refuse loudly, never truncate silently."""

    def __init__(self, message: str, cap: int | None = None, needed: int | None = None):
        super().__init__(message)
        self.cap = cap
        self.needed = needed


def _normalise_ranks(ranks: Sequence[int]) -> tuple[int, ...]:
    """Map arbitrary integer ranks onto the contiguous block 0..k, order-preserving."""
    order = {r: i for i, r in enumerate(sorted(set(ranks)))}
    return tuple(order[r] for r in ranks)


@dataclass(frozen=True)
class Preference:
    """A weak order over a fixed tuple of alternatives, as a rank vector."""

    alternatives: tuple[str, ...]
    ranks: tuple[int, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alts = tuple(self.alternatives)
        if len(set(alts)) != len(alts):
            raise InputError("duplicate alternative ids")
        if len(self.ranks) != len(alts):
            raise InputError(
                f"rank vector has {len(self.ranks)} entries for {len(alts)} alternatives"
            )
        object.__setattr__(self, "alternatives", alts)
        object.__setattr__(self, "ranks", _normalise_ranks(self.ranks))
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(alts)})

    @classmethod
    def from_order(cls, alternatives: Sequence[str], order: Sequence[str]) -> "Preference":
        """Linear order given best-to-worst; `order` must enumerate every alternative."""
        if sorted(order) != sorted(alternatives):
            raise InputError(f"order {order!r} is not a permutation of the alternatives")
        pos = {a: i for i, a in enumerate(order)}
        return cls(tuple(alternatives), tuple(pos[a] for a in alternatives))

    def rank(self, x: str) -> int:
        try:
            return self.ranks[self._index[x]]
        except KeyError:
            raise InputError(f"unknown alternative {x!r}") from None

    def strictly_prefers(self, x: str, y: str) -> bool:
        return self.rank(x) < self.rank(y)

    def weakly_prefers(self, x: str, y: str) -> bool:
        return self.rank(x) <= self.rank(y)

    def indifferent(self, x: str, y: str) -> bool:
        return self.rank(x) == self.rank(y)

    def lower_contour(self, x: str) -> frozenset[str]:
        """All alternatives weakly below x (always contains x)."""
        rx = self.rank(x)
        return frozenset(a for a, r in zip(self.alternatives, self.ranks) if r >= rx)

    def is_linear(self) -> bool:
        return len(set(self.ranks)) == len(self.ranks)

    def tops(self) -> frozenset[str]:
        return frozenset(a for a, r in zip(self.alternatives, self.ranks) if r == 0)


@dataclass(frozen=True)
class Profile:
    """One preference per agent over a shared alternative set, under a stable id."""

    id: str
    prefs: tuple[Preference, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefs", tuple(self.prefs))
        if not self.prefs:
            raise InputError("profile needs at least one agent")
        alts = self.prefs[0].alternatives
        for p in self.prefs[1:]:
            if p.alternatives != alts:
                raise InputError(f"profile {self.id!r}: agents rank different alternative sets")

    @classmethod
    def from_ranks(
        cls, pid: str, alternatives: Sequence[str], rank_rows: Sequence[Sequence[int]]
    ) -> "Profile":
        alts = tuple(alternatives)
        return cls(pid, tuple(Preference(alts, tuple(row)) for row in rank_rows))

    @classmethod
    def from_orders(
        cls, pid: str, alternatives: Sequence[str], orders: Sequence[Sequence[str]]
    ) -> "Profile":
        """Linear profile; each agent's order lists every alternative best-to-worst."""
        alts = tuple(alternatives)
        return cls(pid, tuple(Preference.from_order(alts, o) for o in orders))

    @property
    def alternatives(self) -> tuple[str, ...]:
        return self.prefs[0].alternatives

    @property
    def n_agents(self) -> int:
        return len(self.prefs)

    def pref(self, agent: int) -> Preference:
        if not 0 <= agent < len(self.prefs):
            raise InputError(f"unknown agent index {agent}")
        return self.prefs[agent]

    def rank(self, agent: int, x: str) -> int:
        return self.pref(agent).rank(x)

    def strictly_prefers(self, agent: int, x: str, y: str) -> bool:
        return self.pref(agent).strictly_prefers(x, y)

    def weakly_prefers(self, agent: int, x: str, y: str) -> bool:
        return self.pref(agent).weakly_prefers(x, y)

    def is_linear(self) -> bool:
        return all(p.is_linear() for p in self.prefs)


def lower_contour_set(profile: Profile, agent: int, x: str) -> frozenset[str]:
    """L_i(x, R): alternatives agent i weakly disprefers to x at this profile."""
    return profile.pref(agent).lower_contour(x)


@dataclass(frozen=True)
class DomainRestrictionVerdict:
    ok: bool
    pair: tuple[str, str] | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_domain_restriction(profile: Profile) -> DomainRestrictionVerdict:
    """Check that no two distinct alternatives are unanimously indifferent."""
    alts = profile.alternatives
    for i, x in enumerate(alts):
        for y in alts[i + 1 :]:
            if all(p.indifferent(x, y) for p in profile.prefs):
                return DomainRestrictionVerdict(False, (x, y))
    return DomainRestrictionVerdict(True)


def dominates(profile: Profile, x: str, z: str) -> bool:
    """Weak Pareto dominance with at least one strict preference."""
    strict = False
    for p in profile.prefs:
        rx, rz = p.rank(x), p.rank(z)
        if rx > rz:
            return False
        if rx < rz:
            strict = True
    return strict


def pareto_frontier(profile: Profile) -> frozenset[str]:
    """Alternatives not weakly dominated (with one strict) by any other."""
    alts = profile.alternatives
    return frozenset(z for z in alts if not any(dominates(profile, x, z) for x in alts))


@dataclass(frozen=True)
class SocialChoiceRule:
    """Explicit finite SCR: a profile domain plus a choice table over it."""

    profiles: tuple[Profile, ...]
    choices: Mapping[str, frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        object.__setattr__(
            self, "choices", {pid: frozenset(ch) for pid, ch in dict(self.choices).items()}
        )
        if not self.profiles:
            raise InputError("SCR needs a nonempty profile domain")
        ids = [p.id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate profile ids in SCR domain")
        alts = self.profiles[0].alternatives
        n = self.profiles[0].n_agents
        for p in self.profiles:
            if p.alternatives != alts:
                raise InputError("SCR domain profiles disagree on the alternative set")
            if p.n_agents != n:
                raise InputError("SCR domain profiles disagree on the number of agents")
        if set(self.choices) != set(ids):
            raise InputError("choice table must cover exactly the domain profiles")
        for pid, chosen in self.choices.items():
            if not chosen:
                raise InputError(f"empty choice set at profile {pid!r}")
            unknown = chosen - set(alts)
            if unknown:
                raise InputError(f"choice at {pid!r} outside Z: {sorted(unknown)}")

    @property
    def alternatives(self) -> tuple[str, ...]:
        return self.profiles[0].alternatives

    @property
    def n_agents(self) -> int:
        return self.profiles[0].n_agents

    def profile(self, pid: str) -> Profile:
        for p in self.profiles:
            if p.id == pid:
                return p
        raise InputError(f"unknown profile id {pid!r}")

    def choice(self, pid: str) -> frozenset[str]:
        try:
            return self.choices[pid]
        except KeyError:
            raise InputError(f"unknown profile id {pid!r}") from None

    def graph(self) -> Iterator[tuple[str, Profile]]:
        """Pairs (x, R) with x chosen at R, in domain/alternative order."""
        for p in self.profiles:
            chosen = self.choices[p.id]
            for a in self.alternatives:
                if a in chosen:
                    yield a, p

    def range_set(self) -> frozenset[str]:
        out: set[str] = set()
        for ch in self.choices.values():
            out |= ch
        return frozenset(out)


@dataclass(frozen=True)
class EfficiencyVerdict:
    ok: bool
    profile_id: str | None = None
    outcome: str | None = None
    dominator: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_efficiency(scr: SocialChoiceRule) -> EfficiencyVerdict:
    """Every chosen outcome must be Pareto-undominated at its profile."""
    for p in scr.profiles:
        for z in sorted(scr.choices[p.id]):
            for x in p.alternatives:
                if x != z and dominates(p, x, z):
                    return EfficiencyVerdict(False, p.id, z, x)
    return EfficiencyVerdict(True)


def is_monotonic_transformation(r: Profile, rp: Profile, z: str) -> bool:
    """True iff z falls for nobody from r to rp: L_i(z,r) subset of L_i(z,rp) for all i."""
    if r.alternatives != rp.alternatives:
        raise InputError("profiles range over different alternative sets")
    if r.n_agents != rp.n_agents:
        raise InputError("profiles have different agent counts")
    for i in range(r.n_agents):
        if not r.pref(i).lower_contour(z) <= rp.pref(i).lower_contour(z):
            return False
    return True
