import numpy as np
import pytest

from vfp_hermite import (
    PotentialSpec,
    build_perturbed_mesh,
    build_uniform_mesh,
    discretize_equilibrium,
    sample_potential,
)

REFERENCE_POTENTIAL = PotentialSpec(kind="two_cosine", amp1=0.1, amp2=0.9, mode1=1, mode2=2)


def make_field(mesh, spec=REFERENCE_POTENTIAL, T0=1.0, mass=10.0, e_form="sqrt_rho"):
    return discretize_equilibrium(sample_potential(spec, mesh), mesh, T0, mass, e_form=e_form)


@pytest.fixture(scope="session")
def mesh64():
    return build_uniform_mesh(0.0, 10.0, 64)


@pytest.fixture(scope="session")
def field64(mesh64):
    return make_field(mesh64)


@pytest.fixture(scope="session")
def mesh64_perturbed():
    return build_perturbed_mesh(0.0, 10.0, 64, 0.4, seed=11)


@pytest.fixture(scope="session")
def field64_perturbed(mesh64_perturbed):
    return make_field(mesh64_perturbed)


@pytest.fixture(scope="session")
def flat4():
    mesh = build_uniform_mesh(0.0, 1.0, 4)
    field = discretize_equilibrium(np.zeros(4), mesh, 1.0, 1.0)
    return mesh, field
