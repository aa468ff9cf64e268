from __future__ import annotations

from fractions import Fraction

import pytest

from univoque.expand import ExpansionDomain
from univoque.numerics import RefinableReal

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running test")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture(scope="session")
def phi():
    return RefinableReal.poly_root([1, -1, -1], Fraction(3, 2), 2, label="phi")


@pytest.fixture(scope="session")
def tribonacci():
    return RefinableReal.poly_root([1, -1, -1, -1], Fraction(3, 2), 2, label="tribonacci")


@pytest.fixture(scope="session")
def phi_domain(phi):
    return ExpansionDomain(1, phi)


@pytest.fixture(scope="session")
def trib_domain(tribonacci):
    return ExpansionDomain(1, tribonacci)


@pytest.fixture(scope="session")
def kl_domain():
    from univoque.mirror import komornik_loreti_domain

    return komornik_loreti_domain(1)
