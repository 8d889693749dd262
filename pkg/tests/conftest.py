import numpy as np
import pytest

from isothermic import catalog
from isothermic.minkowski import euclidean_lift
from isothermic.nets import face_regularity
from isothermic.transforms import darboux_propagate


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_lightlike(rng, box=1.0):
    return rng.uniform(0.5, 2.0) * euclidean_lift(rng.uniform(-box, box, 3))


def darboux_stacked_net(rng, rows=4, cols=4, layers=1, min_regularity=5e-3):
    """Random isothermic net: a random cylinder patch pushed through random
    Darboux transforms (each layer is isothermic with the same weights).

    Draws are rejected until every face keeps three-point general position
    with margin ``min_regularity`` (nearly touching transforms produce the
    degenerate nets the library does not support).
    """
    eta = rng.uniform(0.2, 0.8)
    phi = rng.uniform(0.4, 1.2)
    net = catalog.cylinder_net(rows, cols, eta, phi)
    for _ in range(layers):
        for _ in range(100):
            mu = rng.uniform(-2.0, 2.0)
            du = np.abs(1.0 - mu * net.weights.u)
            dv = np.abs(1.0 - mu * net.weights.v)
            if min(du.min(), dv.min()) < 0.05 or abs(mu) < 0.1:
                continue
            start = random_lightlike(rng, 2.0)
            candidate = darboux_propagate(net, mu, start).net()
            if face_regularity(candidate.lifts) >= min_regularity:
                net = candidate
                break
        else:
            raise AssertionError("could not draw a regular stacked net")
    return net
