"""Shared fixtures used throughout the suite."""

from __future__ import annotations

import pytest

from rotakit.domains import Economy, JobRotationProblem, MarriageProblem
from rotakit.model import Profile, SocialChoiceRule
from rotakit.rights import RightsStructure, State

ALTS = ("x", "y", "z")


@pytest.fixture
def xyz_profiles() -> tuple[Profile, Profile]:
    r = Profile.from_orders("R", ALTS, [["x", "y", "z"], ["z", "x", "y"], ["y", "z", "x"]])
    rp = Profile.from_orders("Rp", ALTS, [["x", "y", "z"], ["x", "y", "z"], ["y", "x", "z"]])
    return r, rp


@pytest.fixture
def xyz_scr(xyz_profiles) -> SocialChoiceRule:
    r, rp = xyz_profiles
    return SocialChoiceRule((r, rp), {"R": {"x", "y", "z"}, "Rp": {"x", "y"}})


@pytest.fixture
def xyz_structure() -> RightsStructure:
    """The hand-built implementing structure: agent 3 moves x->y, agents 1 and 2
    move y->x, coalitions of two or more move z->y and x->z."""
    pairs = [frozenset(k) for k in ({0, 1}, {0, 2}, {1, 2}, {0, 1, 2})]
    return RightsStructure(
        tuple(State(a, a) for a in ALTS),
        {
            ("x", "y"): frozenset([frozenset([2])]),
            ("y", "x"): frozenset([frozenset([0]), frozenset([1])]),
            ("z", "y"): frozenset(pairs),
            ("x", "z"): frozenset(pairs),
        },
    )


@pytest.fixture
def job_table_problems() -> tuple[JobRotationProblem, ...]:
    jobs = ("j1", "j2", "j3")
    return (
        JobRotationProblem("P", jobs, (("j1", "j3", "j2"), ("j1", "j2", "j3"), ("j2", "j3", "j1"))),
        JobRotationProblem("Pp", jobs, (("j1", "j3", "j2"), ("j1", "j2", "j3"), ("j3", "j2", "j1"))),
        JobRotationProblem("Ppp", jobs, (("j1", "j3", "j2"), ("j1", "j3", "j2"), ("j2", "j3", "j1"))),
    )


@pytest.fixture
def marriage_market_problems() -> tuple[MarriageProblem, MarriageProblem]:
    men, women = ("m1", "m2", "m3"), ("w1", "w2", "w3")
    men_prefs = {
        "m1": ("w2", "w3", "w1", "m1"),
        "m2": ("w3", "w1", "w2", "m2"),
        "m3": ("w1", "w2", "w3", "m3"),
    }
    women_r = {
        "w1": ("m1", "m3", "m2", "w1"),
        "w2": ("m2", "m1", "m3", "w2"),
        "w3": ("m3", "m2", "m1", "w3"),
    }
    women_rp = {
        "w1": ("m2", "m3", "m1", "w1"),
        "w2": ("m3", "m1", "m2", "w2"),
        "w3": ("m1", "m2", "m3", "w3"),
    }
    return (
        MarriageProblem("R", men, women, men_prefs, women_r),
        MarriageProblem("Rp", men, women, men_prefs, women_rp),
    )


@pytest.fixture
def housing_economy() -> Economy:
    """Three agents, each owning the house with their own index; everyone ranks
    the next agent's house first and homelessness last."""
    return Economy(
        "R",
        3,
        ("h1", "h2", "h3"),
        "h0",
        {"h1": frozenset([0]), "h2": frozenset([1]), "h3": frozenset([2])},
        (
            ("h2", "h3", "h1", "h0"),
            ("h3", "h1", "h2", "h0"),
            ("h1", "h2", "h3", "h0"),
        ),
    )
