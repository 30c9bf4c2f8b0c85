"""
Shared fixtures: the sample programs and proofs shipped with the repository.
"""

import pytest
from hypothesis import HealthCheck, settings

from plstar.parser import load_program

from .common import PROGRAMS, scalar_signatures

settings.register_profile("plstar", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("plstar")


@pytest.fixture(scope="session")
def factorial():
    term, _ = load_program(PROGRAMS / "factorial.pl")
    return term


@pytest.fixture(scope="session")
def quicksort():
    term, _ = load_program(PROGRAMS / "quicksort.pl")
    return term


@pytest.fixture(scope="session")
def update():
    term, _ = load_program(PROGRAMS / "update.pl")
    return term


@pytest.fixture
def scalars():
    """Integer and boolean variables, a few builtins, a ticking primitive and two fragments."""
    return scalar_signatures()
