"""
Shared pytest fixtures: the bundled protocol files, parsed, with their
contexts, generalized roles and generalized message sets.
"""

import sys
from pathlib import Path

import pytest

# Add project root to Python path
ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from witness.protocol.parser import parse_file  # noqa: E402
from witness.protocol.roles import collect_generalized_messages, extract_roles  # noqa: E402

FIXTURES = ROOT / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def woolam():
    return parse_file(FIXTURES / "woolam.wl")


@pytest.fixture
def woolam_ctx(woolam):
    return woolam.context()


@pytest.fixture
def woolam_roles(woolam):
    return extract_roles(woolam)


@pytest.fixture
def woolam_messages(woolam_roles):
    return collect_generalized_messages(woolam_roles)


@pytest.fixture
def cleartext():
    return parse_file(FIXTURES / "woolam_cleartext.wl")


@pytest.fixture
def nested():
    return parse_file(FIXTURES / "example1.wl")


@pytest.fixture
def idle():
    return parse_file(FIXTURES / "no_sends.wl")


@pytest.fixture
def relayed():
    return parse_file(FIXTURES / "relayed_ticket.wl")
