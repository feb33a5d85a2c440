import random

import pytest

from f2merit.generators import MEMT19937II, MT19937
from f2merit.lattice import defect_profile
from f2merit.oracle import random_maximal_spec


@pytest.fixture(scope="session")
def mt_profile():
    """(DefectProfile, {v: ReducedBasis}) for MT19937, v = 1..32; shared because it takes ~45 s."""
    bases = {}
    prof = defect_profile(MT19937, 32, keep_bases=bases)
    return prof, bases


@pytest.fixture(scope="session")
def memt_profile():
    bases = {}
    prof = defect_profile(MEMT19937II, 32, keep_bases=bases)
    return prof, bases


@pytest.fixture(scope="session")
def small_specs():
    rng = random.Random(7)
    return [random_maximal_spec(rng, rng.randint(3, 12), rng.randint(1, 6)) for _ in range(12)]


# acceptance lines are collected here and printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
