import numpy as np
import pytest

from weakppc import PointSet, gen_kronecker, gen_multiset, gen_uniform, gen_vdc


@pytest.fixture
def grid4():
    return PointSet([0.0, 0.25, 0.5, 0.75])


@pytest.fixture
def single():
    return PointSet([0.5])


def random_pointset(rng, n_min=1, n_max=300):
    """A mixed bag of inputs: random, lattice (exact ties), clustered, multisets."""
    n = int(rng.integers(n_min, n_max + 1))
    kind = int(rng.integers(0, 6))
    if kind == 0:
        return gen_uniform(n, int(rng.integers(0, 2**63)))
    if kind == 1:
        return PointSet((rng.integers(0, 64, size=n) / 64.0) % 1.0)
    if kind == 2:
        return gen_kronecker(float(rng.random() * 3 - 1), n)
    if kind == 3:
        return gen_vdc(int(rng.integers(2, 6)), n)
    if kind == 4:
        return gen_multiset(int(rng.integers(1, n + 1)), n, int(rng.integers(0, 1000)))
    centre = rng.random()
    xs = (centre + rng.normal(0, 1e-3, size=n)) % 1.0
    return PointSet(np.where(xs >= 1.0, 0.0, xs))


def random_s(rng, n, beta, limit=0.5):
    """An s > 0 with s / n**beta <= limit, log-spread over many scales."""
    s_max = limit * float(n) ** beta
    return float(s_max * 10 ** (-4 * rng.random()))
