import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def aes_field():
    from dynmds.gfield import DEFAULT_FIELD

    return DEFAULT_FIELD


@pytest.fixture(scope="session")
def aes_mat(tmp_path_factory):
    from dynmds.fixtures import AES_CIRCULANT
    from dynmds.matrix import save_matrix

    path = tmp_path_factory.mktemp("mats") / "aes.mat"
    save_matrix(AES_CIRCULANT, path)
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
