import itertools

import pytest

from plectic_cm.cm import cm_context
from plectic_cm.config import load_model
from plectic_cm.groups import subgroup, table_group, units_group
from plectic_cm.plectic import GaloisContext


@pytest.fixture(scope="session")
def g15():
    return units_group(15)


@pytest.fixture(scope="session")
def zeta15_context(g15):
    return GaloisContext(g15, subgroup(g15, [1, 4, 11, 14]))


@pytest.fixture(scope="session")
def zeta15_cm(zeta15_context):
    return cm_context(zeta15_context, [1, 11], 14)


@pytest.fixture(scope="session")
def c6():
    names = ["e", "g", "g2", "g3", "g4", "g5"]
    rows = [[names[(i + j) % 6] for j in range(6)] for i in range(6)]
    return table_group(rows)


@pytest.fixture(scope="session")
def sextic_cm(c6):
    base = GaloisContext(c6, subgroup(c6, ["e", "g3"]))
    return cm_context(base, ["e"], "g3")


@pytest.fixture(scope="session")
def s3():
    perms = list(itertools.permutations(range(3)))
    names = {p: "".join(map(str, p)) for p in perms}
    rows = [[names[tuple(a[b[i]] for i in range(3))] for b in perms] for a in perms]
    return table_group(rows)


@pytest.fixture(scope="session")
def bundles():
    names = ["zeta15", "sextic", "zeta15-synthetic", "zeta15-synthetic-kernel",
             "sextic-synthetic"]
    return {name: load_model(name) for name in names}
