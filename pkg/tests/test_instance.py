import numpy as np
import pytest

from fleetconv.instance import (
    FleetInstance,
    InstanceError,
    ParseError,
    Tour,
    VehicleModel,
    build_incompatibility_graph,
    generate_instance,
    read_instance,
    write_instance,
)


def _plain_instance(windows, n_models=1, travel_time=None, locations=None):
    tours = []
    for k, (t_d, t_a) in enumerate(windows):
        l_d, l_a = (locations[k] if locations else (None, None))
        tours.append(Tour(k, t_d, t_a, frozenset(range(n_models)), l_d=l_d, l_a=l_a))
    models = [
        VehicleModel(v, 10.0, {k: 1.0 for k in range(len(windows))})
        for v in range(n_models)
    ]
    return FleetInstance(tours=tours, models=models, travel_time=travel_time)


class TestTourInvariants:
    def test_arrival_after_departure(self):
        with pytest.raises(InstanceError):
            Tour(0, 5.0, 5.0, frozenset({0}))

    def test_allowed_models_nonempty(self):
        with pytest.raises(InstanceError):
            Tour(0, 0.0, 1.0, frozenset())

    def test_negative_departure(self):
        with pytest.raises(InstanceError):
            Tour(0, -1.0, 1.0, frozenset({0}))


class TestInstanceInvariants:
    def test_gapped_tour_ids(self):
        tours = [Tour(0, 0.0, 1.0, frozenset({0})), Tour(2, 0.0, 1.0, frozenset({0}))]
        models = [VehicleModel(0, 1.0, {0: 0.0, 2: 0.0})]
        with pytest.raises(InstanceError):
            FleetInstance(tours=tours, models=models)

    def test_unknown_model_reference(self):
        tours = [Tour(0, 0.0, 1.0, frozenset({5}))]
        models = [VehicleModel(0, 1.0, {0: 0.0})]
        with pytest.raises(InstanceError):
            FleetInstance(tours=tours, models=models)

    def test_op_cost_must_cover_all_tours(self):
        tours = [Tour(0, 0.0, 1.0, frozenset({0})), Tour(1, 2.0, 3.0, frozenset({0}))]
        models = [VehicleModel(0, 1.0, {0: 0.0})]
        with pytest.raises(InstanceError):
            FleetInstance(tours=tours, models=models)

    def test_travel_time_diagonal(self):
        with pytest.raises(InstanceError):
            _plain_instance([(0.0, 1.0)], travel_time=[[1.0]], locations=[(0, 0)])

    def test_travel_time_negative(self):
        with pytest.raises(InstanceError):
            _plain_instance(
                [(0.0, 1.0)],
                travel_time=[[0.0, -1.0], [1.0, 0.0]],
                locations=[(0, 1)],
            )


class TestIncompatibilityGraph:
    def test_three_tour_example(self):
        # windows [0,10], [5,15], [20,30]: only the first pair overlaps
        inst = _plain_instance([(0.0, 10.0), (5.0, 15.0), (20.0, 30.0)])
        graph = build_incompatibility_graph(inst)
        assert graph.edges == frozenset({(0, 1)})

    def test_single_tour(self):
        inst = _plain_instance([(0.0, 10.0)])
        graph = build_incompatibility_graph(inst)
        assert graph.edges == frozenset()

    def test_identical_windows_conflict(self):
        inst = _plain_instance([(0.0, 10.0), (0.0, 10.0)])
        graph = build_incompatibility_graph(inst)
        assert graph.edges == frozenset({(0, 1)})

    def test_travel_time_creates_edge(self):
        # back-to-back windows are fine with short travel, conflict with travel 5
        windows = [(0.0, 10.0), (12.0, 20.0)]
        locations = [(0, 0), (1, 1)]
        ok = _plain_instance(windows, locations=locations,
                             travel_time=[[0.0, 1.0], [1.0, 0.0]])
        assert build_incompatibility_graph(ok).edges == frozenset()
        slow = _plain_instance(windows, locations=locations,
                               travel_time=[[0.0, 5.0], [5.0, 0.0]])
        assert build_incompatibility_graph(slow).edges == frozenset({(0, 1)})

    def test_location_out_of_range(self):
        inst = _plain_instance(
            [(0.0, 10.0), (20.0, 30.0)],
            locations=[(0, 3), (0, 0)],
            travel_time=[[0.0, 1.0], [1.0, 0.0]],
        )
        with pytest.raises(InstanceError):
            build_incompatibility_graph(inst)

    def test_symmetry_property(self, rng):
        for _ in range(30):
            inst = generate_instance(
                int(rng.integers(2, 17)), int(rng.integers(1, 4)), 1,
                int(rng.integers(0, 2**31)),
            )
            graph = build_incompatibility_graph(inst)
            for i in range(graph.n):
                for j in graph.adjacency[i]:
                    assert i in graph.adjacency[j]

    def test_edges_match_double_loop_oracle(self, rng):
        for _ in range(100):
            inst = generate_instance(
                int(rng.integers(1, 17)), 2, 1, int(rng.integers(0, 2**31))
            )
            graph = build_incompatibility_graph(inst)
            expected = set()
            for i, a in enumerate(inst.tours):
                for j, b in enumerate(inst.tours):
                    if i < j:
                        overlap = not (a.t_a <= b.t_d or b.t_a <= a.t_d)
                        if overlap:
                            expected.add((i, j))
            assert set(graph.edges) == expected

    def test_travel_time_monotonicity(self, rng):
        # growing off-diagonal travel times never removes an edge
        for _ in range(20):
            n = int(rng.integers(2, 9))
            n_loc = 3
            windows = []
            t = 0.0
            for _ in range(n):
                start = float(rng.uniform(0, 200))
                windows.append((start, start + float(rng.uniform(5, 50))))
            locations = [
                (int(rng.integers(0, n_loc)), int(rng.integers(0, n_loc)))
                for _ in range(n)
            ]
            base = rng.uniform(0.0, 10.0, (n_loc, n_loc))
            np.fill_diagonal(base, 0.0)
            bumped = base + 7.5
            np.fill_diagonal(bumped, 0.0)
            small = _plain_instance(windows, travel_time=base.tolist(), locations=locations)
            large = _plain_instance(windows, travel_time=bumped.tolist(), locations=locations)
            before = build_incompatibility_graph(small).edges
            after = build_incompatibility_graph(large).edges
            assert before <= after


class TestGenerator:
    def test_shape_32_5_3(self):
        inst = generate_instance(32, 5, 3, seed=1)
        assert inst.n_tours == 32
        assert inst.n_models == 5
        assert all(len(t.allowed_models) == 3 for t in inst.tours)

    def test_deterministic(self):
        assert generate_instance(12, 3, 2, seed=9) == generate_instance(12, 3, 2, seed=9)

    def test_allowed_exceeds_models(self):
        with pytest.raises(ValueError):
            generate_instance(4, 5, 6, seed=0)

    def test_64_tour_qubit_requirement(self):
        from fleetconv.qubo import qubit_count

        inst = generate_instance(64, 5, 3, seed=2)
        assert qubit_count(inst.n_tours) == 7


class TestInstanceIO:
    def test_round_trip(self, tmp_path, rng):
        for seed in range(5):
            inst = generate_instance(int(rng.integers(1, 20)), 3, 2, seed)
            path = tmp_path / f"inst_{seed}.json"
            write_instance(inst, path)
            assert read_instance(path) == inst

    def test_round_trip_with_locations(self, tmp_path):
        inst = _plain_instance(
            [(0.0, 10.0), (20.0, 30.0)],
            locations=[(0, 1), (1, 0)],
            travel_time=[[0.0, 2.5], [2.5, 0.0]],
        )
        path = tmp_path / "inst.json"
        write_instance(inst, path)
        assert read_instance(path) == inst

    def test_missing_tours_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"models": []}')
        with pytest.raises(ParseError, match="tours"):
            read_instance(path)

    def test_arrival_before_departure_in_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            '{"tours": [{"id": 0, "t_d": 5.0, "t_a": 4.0, "allowed_models": [0]}],'
            ' "models": [{"id": 0, "purchase_cost": 1.0, "op_cost": {"0": 0.5}}]}'
        )
        with pytest.raises(InstanceError):
            read_instance(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            read_instance(path)
