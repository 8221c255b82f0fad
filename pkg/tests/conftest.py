import numpy as np
import pytest

from qgame.core import PureState, Register
from qgame.haar import sample_haar_unitary, subseed_rng


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_pure_state(register: Register, rng) -> PureState:
    v = rng.standard_normal(register.total_dim) + 1j * rng.standard_normal(
        register.total_dim
    )
    return PureState(register, v / np.linalg.norm(v))


def haar_block(dim: int, seed: int, index: int = 0) -> np.ndarray:
    return sample_haar_unitary(dim, subseed_rng(seed, index))
