import numpy as np
import pytest

from teleskill.insertion_sim import SceneConfig, scripted_demonstrate
from teleskill.pipeline import fit_skill


@pytest.fixture(scope="session")
def scene():
    return SceneConfig()


@pytest.fixture(scope="session")
def demo_recording(scene):
    return scripted_demonstrate(scene)


@pytest.fixture(scope="session")
def skill(demo_recording):
    return fit_skill(demo_recording)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
