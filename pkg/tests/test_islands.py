import json
import math

import numpy as np
import pytest

from conftest import small_incidences
from oracles import bfs_components, min_cover_size
from sensorcover.geometry import IncidenceStructure, InstanceParams, build_incidence, sample_instance
from sensorcover.islands import Island, UnionFind, decompose, island_stats, islands_to_json, largest_island
from sensorcover.reduction import ResidualProblem, classify, residual_problem


def islands_of(inc):
    return decompose(residual_problem(classify(inc), inc))


def test_union_find_basics():
    uf = UnionFind(6)
    uf.union(0, 1)
    uf.union(2, 3)
    uf.union(1, 3)
    assert len({uf.find(i) for i in range(4)}) == 1
    assert uf.find(4) != uf.find(5)
    assert uf.size[uf.find(0)] == 4


def test_empty_residual():
    empty = ResidualProblem(np.empty(0, int), np.empty(0, int), IncidenceStructure.from_pairs([], [], 0, 0))
    assert decompose(empty) == []
    assert island_stats([]).to_dict() == {
        "n_islands": 0, "largest_points": 0, "largest_sets": 0, "std_points": 0.0, "std_sets": 0.0
    }


def test_traced_island(traced_incidence):
    assert islands_of(traced_incidence) == [Island((1, 2), (2,))]


def test_two_disjoint_pairs():
    inc = IncidenceStructure.from_points_of_set([[0], [0], [1], [1]], n_points=2)
    assert islands_of(inc) == [Island((0, 1), (0,)), Island((2, 3), (1,))]


def test_stats_single_island():
    st = island_stats([Island((0, 1, 2), (0, 1, 2, 3, 4))])
    assert (st.largest_points, st.largest_sets, st.std_points) == (5, 3, 0.0)


def test_stats_population_sigma():
    st = island_stats([Island((0,), (0, 1)), Island((1,), (2, 3, 4, 5))])
    assert st.largest_points == 4 and st.std_points == pytest.approx(1.0)
    st = island_stats([Island((0,), (0,)), Island((1,), (1,)), Island((2, 3, 4, 5), (2,))])
    expected = math.sqrt(((1 - 2) ** 2 * 2 + (4 - 2) ** 2) / 3)
    assert st.std_sets == pytest.approx(expected) == pytest.approx(math.sqrt(2))


def test_largest_tie_breaks():
    a = Island((5, 6), (1, 2))
    b = Island((0, 1, 2), (3, 4))
    c = Island((3, 4, 7), (5, 6))
    assert largest_island([a, b, c]) is b
    assert largest_island([a]) is a


def test_json_shape(traced_incidence):
    doc = json.loads(islands_to_json(islands_of(traced_incidence)))
    assert doc == [{"sets": [1, 2], "points": [2]}]


def test_matches_bfs_and_partitions():
    for k, inc in small_incidences(500):
        cls = classify(inc)
        res = residual_problem(cls, inc)
        isl = decompose(res)
        got = [(i.set_indices, i.point_indices) for i in isl]
        assert got == bfs_components(inc.points_of_set, res.sets.tolist(), res.points.tolist()), k
        assert sum(i.n_points for i in isl) == len(res.points)
        assert sum(i.n_sets for i in isl) == len(res.sets)
        firsts = [i.set_indices[0] for i in isl]
        assert firsts == sorted(firsts)


def test_islands_are_closed_and_connected_on_larger_instance():
    inst = sample_instance(InstanceParams(M=800, N=500, A=1.0, a=0.006, seed=31))
    inc = build_incidence(inst)
    res = residual_problem(classify(inc), inc)
    isl = decompose(res)
    owner = {s: k for k, i in enumerate(isl) for s in i.set_indices}
    indet_sets = set(res.sets.tolist())
    for k, i in enumerate(isl):
        for p in i.point_indices:
            assert all(owner[s] == k for s in inc.sets_of(p).tolist() if s in indet_sets)
    assert [(i.set_indices, i.point_indices) for i in isl] == bfs_components(
        inc.points_of_set, res.sets.tolist(), res.points.tolist()
    )


def test_independence_of_islands():
    for k, inc in small_incidences(500, start=5000):
        cls = classify(inc)
        res = residual_problem(cls, inc)
        pos = inc.points_of_set
        indet = set(res.sets.tolist())
        whole = min_cover_size([pos[s] if s in indet else [] for s in range(inc.n_sets)], res.points.tolist())
        parts = 0
        for i in decompose(res):
            own = set(i.set_indices)
            parts += min_cover_size([pos[s] if s in own else [] for s in range(inc.n_sets)], i.point_indices)
        assert parts == whole, k
