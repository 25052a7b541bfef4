import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lspie import fit_ica, fit_pca, generate_signal, hankelise, standardise  # noqa: E402


@pytest.fixture(scope="session")
def sine_X():
    return standardise(hankelise(generate_signal("pure_sine"), 300))


@pytest.fixture(scope="session")
def chirp_X():
    return standardise(hankelise(generate_signal("decreasing_freq"), 300))


@pytest.fixture(scope="session")
def sine_pca(sine_X):
    return fit_pca(sine_X, 8)


@pytest.fixture(scope="session")
def sine_ica(sine_X):
    return fit_ica(sine_X, 8, seed=0)
