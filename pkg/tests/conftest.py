import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kappamu.frame_model import ContactStructure, FrameModel, catalog, milnor_model  # noqa: E402
from kappamu.linalg import Matrix  # noqa: E402


def non_unimodular_model():
    """A valid contact metric Lie algebra that is not a (kappa, mu)-space.

    [e1,e2] = e2 + e3, [e1,e3] = -e2 - e3, [e2,e3] = 2e1 + e2 + e3.
    """
    C = [[[0] * 3 for _ in range(3)] for _ in range(3)]

    def put(i, j, v):
        C[i][j] = list(v)
        C[j][i] = [-x for x in v]

    put(0, 1, (0, 1, 1))
    put(0, 2, (0, -1, -1))
    put(1, 2, (2, 1, 1))
    return FrameModel(C, milnor_model(0, 0).structure, name="non-nullity")


def heisenberg5():
    N = 5
    C = [[[0] * N for _ in range(N)] for _ in range(N)]
    for i, j in ((1, 2), (3, 4)):
        C[i][j] = [2, 0, 0, 0, 0]
        C[j][i] = [-2, 0, 0, 0, 0]
    phi = Matrix([[0] * 5, [0, 0, -1, 0, 0], [0, 1, 0, 0, 0], [0, 0, 0, 0, -1], [0, 0, 0, 1, 0]])
    e1 = (1, 0, 0, 0, 0)
    return FrameModel(C, ContactStructure(phi, e1, e1, Matrix.identity(5)), name="heisenberg5")


@pytest.fixture(scope="session")
def catalog_entries():
    return catalog()


@pytest.fixture(scope="session")
def models(catalog_entries):
    return {e.name: e.model for e in catalog_entries}


@pytest.fixture
def non_nullity():
    return non_unimodular_model()


@pytest.fixture
def heis5():
    return heisenberg5()


# -- acceptance reporting ---------------------------------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
