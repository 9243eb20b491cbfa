import numpy as np
import pytest

from qpq.core import DensityOperator, ModeRegister, PureState, alice_mode, bob_mode


class FixedRandom:
    """Random-source stub replaying a fixed sequence of uniforms."""

    def __init__(self, values):
        self._values = iter(values)

    def random(self) -> float:
        return next(self._values)


def random_pure(register: ModeRegister, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=register.dim) + 1j * rng.normal(size=register.dim)
    return PureState(register, v / np.linalg.norm(v))


def random_density(register: ModeRegister, rng: np.random.Generator) -> DensityOperator:
    """Ginibre-style random mixed state (full rank, strictly positive)."""
    d = register.dim
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return DensityOperator(register, m / m.trace())


@pytest.fixture
def three_bob_register() -> ModeRegister:
    return ModeRegister(tuple(bob_mode(j) for j in (1, 2, 3)))


@pytest.fixture
def paired_register() -> ModeRegister:
    """Bob modes 1..3 plus the matching Alice ancillas."""
    return ModeRegister(
        tuple(bob_mode(j) for j in (1, 2, 3)) + tuple(alice_mode(j) for j in (1, 2, 3))
    )
