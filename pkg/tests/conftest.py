from functools import lru_cache

import pytest

from nsbasis.nslattice import build_instance, certificate_from_instance


@lru_cache(maxsize=None)
def instance(family, n):
    return build_instance(family, n)


@lru_cache(maxsize=None)
def certificate(family, n):
    return certificate_from_instance(instance(family, n))


@pytest.fixture(scope="session")
def e60():
    return instance(4, 60)


@pytest.fixture(scope="session")
def cert60():
    return certificate(4, 60)


def point(inst, label):
    for i, p in enumerate(inst.points):
        if p.label == label:
            return i, p
    raise KeyError(label)
