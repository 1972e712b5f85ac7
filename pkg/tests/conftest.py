import pytest

from primedir import arith, directions


@pytest.fixture(scope="session")
def table13():
    return arith.sieve_primes(2**13)


@pytest.fixture(scope="session")
def table17():
    return arith.sieve_primes(2**17)


@pytest.fixture(scope="session")
def table21():
    return arith.sieve_primes(2**21)


@pytest.fixture(scope="session")
def toy_ds():
    """The desk-small constructed family: N=4, eps=1.0, seed 7, rescaled."""
    spec = directions.DirectionSpec(N=4, eps=1.0, seed=7)
    return directions.rescale_to_integers(directions.construct_directions(spec))


@pytest.fixture(scope="session")
def toy_matrix():
    """The acceptance matrix of toy families, rescaled."""
    out = {}
    for n in (4, 8, 16):
        for eps in (0.5, 1.0):
            spec = directions.DirectionSpec(N=n, eps=eps, seed=7)
            out[(n, eps)] = directions.rescale_to_integers(directions.construct_directions(spec))
    return out
