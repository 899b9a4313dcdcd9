import numpy as np
import pytest

import trajclust as tc

MOVEMENTS = [(0, 2), (0, 3), (1, 2), (1, 3)]


@pytest.fixture(scope="module")
def site():
    dataset, movement = tc.make_intersection(MOVEMENTS, per_movement=10, lateral_noise=0.5, seed=3)
    return dataset, np.asarray(movement)


def test_distances_on_arrays():
    a = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    b = a + [0.0, 1.0]
    assert tc.dtw(a, a) == 0.0
    assert tc.dtw(a, b) == pytest.approx(3.0)
    assert tc.hausdorff(a, b) == pytest.approx(1.0)
    assert tc.sspd(a, a) == 0.0
    assert tc.lcss_distance(a, b, r_b=1.5) == 0.0
    assert tc.edr(a, b, r_b=0.5) == 3
    with pytest.raises(ValueError):
        tc.dtw(np.zeros((3, 4)), a)


def test_matrix_and_clustering(site):
    dataset, movement = site
    matrix = tc.build_matrix(dataset, tc.DistanceSpec.sspd(), workers=2)
    values = matrix.to_numpy()
    assert values.shape == (len(dataset), len(dataset))
    np.testing.assert_allclose(values, values.T)
    assert np.all(np.diag(values) == 0.0)

    labels = tc.agglomerative(matrix, 4, tc.Linkage.average)
    assert tc.ari(movement, labels) == pytest.approx(1.0)
    assert tc.ari(movement, tc.kmedoids(values, 4, seed=1)) == pytest.approx(1.0)
    assert tc.silhouette(matrix, labels) > 0.5
    h, c, v = tc.homogeneity_completeness_v(movement, labels)
    assert h == pytest.approx(1.0) and c == pytest.approx(1.0) and v == pytest.approx(1.0)
    assert tc.ami(movement, labels) == pytest.approx(1.0)
    assert tc.fmi(movement, labels) == pytest.approx(1.0)
    assert len(tc.run_algorithm(matrix, tc.AlgorithmSpec.optics(4))) == len(dataset)


def test_reference_and_benchmark(site):
    dataset, movement = site
    elbow = tc.build_reference(dataset)
    assert elbow.k_origin >= 2 and elbow.k_destination >= 2
    ref = tc.build_reference(dataset, k_origin=2, k_destination=2)
    assert ref.cluster_count == 4
    assert tc.ari(movement[ref.retained_indices], np.asarray(ref.retained_labels)) == pytest.approx(1.0)

    report = tc.benchmark(
        dataset,
        ref,
        distances=[tc.DistanceSpec.sspd(), tc.DistanceSpec.lcss(2.0)],
        algorithms=[tc.AlgorithmSpec.agglomerative(tc.Linkage.average)],
        k_min=2,
        k_max=6,
        permutations=3,
        seed=7,
    )
    assert report["permutations"] == 3
    assert "S" in report["retained"]
    assert len(report["ranking"]) == 10
    assert report["ranking"][0]["setup_id"].endswith("k=4")
    assert all(len(r["values"]) == 3 for r in report["records"])
    assert not report["failures"]


def test_errors(tmp_path):
    with pytest.raises(tc.DataError):
        tc.load_csv(tmp_path / "missing.csv")
    with pytest.raises(tc.ConfigError):
        tc.Setup(tc.DistanceSpec.lcss(-1.0), tc.AlgorithmSpec.kmedoids())
    with pytest.raises(ValueError):
        tc.Setup(tc.DistanceSpec.sspd(), tc.AlgorithmSpec.kmedoids())


def test_dataset_round_trip(tmp_path, site):
    dataset, _ = site
    path = tmp_path / "tracks.csv"
    dataset.save_csv(path)
    loaded = tc.load_csv(path)
    assert len(loaded) == len(dataset)
    np.testing.assert_allclose(loaded[0].points, dataset[0].points)
    t = tc.Trajectory("a", np.array([[0.0, 0.0], [1.0, 1.0]]))
    assert len(t) == 2 and t.points[1, 2] == 1.0
