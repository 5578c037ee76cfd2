import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sensorcover.geometry import IncidenceStructure, InstanceParams, build_incidence, sample_instance


def small_instance(seed, max_points=12, max_sets=10):
    """Geometric instance with M <= max_points, N <= max_sets and moderate density."""
    rng = np.random.default_rng(seed)
    M = int(rng.integers(0, max_points + 1))
    N = int(rng.integers(1, max_sets + 1))
    phi = rng.uniform(0.5, 4.0)
    a = min(phi / N, 1.0)
    return sample_instance(InstanceParams(M=M, N=N, A=1.0, a=a, seed=seed))


def random_bipartite(seed, max_points=12, max_sets=10, p_edge=None):
    """Non-geometric incidence with independent memberships."""
    rng = np.random.default_rng(seed)
    M = int(rng.integers(0, max_points + 1))
    N = int(rng.integers(1, max_sets + 1))
    p = rng.uniform(0.05, 0.5) if p_edge is None else p_edge
    hit = rng.random((M, N)) < p
    pi, si = np.nonzero(hit)
    return IncidenceStructure.from_pairs(pi, si, M, N)


def small_incidences(count, start=0):
    """Alternate geometric and abstract small incidences."""
    for k in range(start, start + count):
        if k % 2 == 0:
            yield k, build_incidence(small_instance(k))
        else:
            yield k, random_bipartite(k)


@pytest.fixture
def traced_incidence():
    # p1 in {S1}; p2 in {S1, S2}; p3 in {S2, S3}  (zero-based below)
    return IncidenceStructure.from_points_of_set([[0, 1], [1, 2], [2]], n_points=3)
