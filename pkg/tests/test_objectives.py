import numpy as np
import pytest

from gossipsim.objectives import (
    ObjectiveError,
    PartitionSpec,
    load_csv,
    make_logistic,
    make_quadratics,
    make_two_class_gaussian,
    measure_heterogeneity,
    oracle_stream,
    partition,
)


def finite_diff_grad(fn, x, h=1e-6):
    g = np.zeros_like(x)
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        g[j] = (fn(x + e) - fn(x - e)) / (2 * h)
    return g


class TestPartition:
    def test_sorted_unshuffled(self):
        labels = np.array([1, 0, 1, 0, 1, 0])
        shards = partition(labels, PartitionSpec(0.0, seed=0, n=2))
        assert all(labels[i] == 0 for i in shards[0])
        assert all(labels[i] == 1 for i in shards[1])

    def test_fully_shuffled_mixes_classes(self):
        labels = np.array([0] * 50 + [1] * 50)
        shards = partition(labels, PartitionSpec(100.0, seed=3, n=2))
        for shard in shards:
            classes = set(labels[shard].tolist())
            assert classes == {0, 1}

    def test_half_shuffle_matches_documented_rng(self):
        labels = np.array([0, 0, 0, 0, 1, 1, 1, 1])
        spec = PartitionSpec(50.0, seed=11, n=2)
        shards = partition(labels, spec)
        # oracle: replay the documented procedure by hand
        order = np.argsort(labels, kind="stable")
        head = order[:4].copy()
        np.random.default_rng(11).shuffle(head)
        expect = np.concatenate([head, order[4:]])
        got = np.concatenate(shards)
        assert np.array_equal(got, expect)
        assert np.array_equal(np.sort(got[4:]), np.arange(4, 8))  # tail untouched

    def test_every_point_once_and_balanced(self):
        rng = np.random.default_rng(0)
        labels = rng.integers(0, 3, size=29)
        for frac in (0.0, 25.0, 100.0):
            shards = partition(labels, PartitionSpec(frac, seed=1, n=4))
            allidx = np.sort(np.concatenate(shards))
            assert np.array_equal(allidx, np.arange(29))
            sizes = [len(s) for s in shards]
            assert max(sizes) - min(sizes) <= 1

    def test_errors(self):
        labels = np.zeros(4)
        with pytest.raises(ObjectiveError):
            partition(labels, PartitionSpec(110.0, 0, 2))
        with pytest.raises(ObjectiveError):
            partition(labels, PartitionSpec(50.0, 0, 9))


class TestQuadratics:
    def test_zero_heterogeneity(self):
        obj = make_quadratics(n=4, d=6, vs0_sq=0.0, sigma=0.0, seed=1)
        zero = np.zeros(6)
        grads = [obj.worker_grad(i, zero) for i in range(4)]
        for g in grads[1:]:
            assert np.allclose(g, grads[0], atol=1e-12)
        for b in obj.offsets[1:]:
            assert np.array_equal(b, obj.offsets[0])

    def test_heterogeneity_target(self):
        obj = make_quadratics(n=8, d=20, vs0_sq=10.0, sigma=0.0, seed=0)
        stats = measure_heterogeneity(obj)
        assert stats.varsigma0_sq == pytest.approx(10.0, rel=0.05)

    def test_exact_oracle_when_noiseless(self):
        obj = make_quadratics(n=3, d=5, vs0_sq=1.0, sigma=0.0, seed=2)
        x = np.ones(5)
        rng = oracle_stream(0, 0, 0)
        assert np.array_equal(obj.oracle(0, x, rng), obj.worker_grad(0, x))

    def test_gradient_vs_finite_differences(self):
        obj = make_quadratics(n=3, d=7, vs0_sq=2.0, sigma=0.0, seed=3)
        rng = np.random.default_rng(0)
        for _ in range(5):
            x = rng.normal(size=7)
            for i in range(3):
                fd = finite_diff_grad(lambda z: obj.worker_loss(i, z), x)
                assert np.abs(obj.worker_grad(i, x) - fd).max() < 1e-5

    def test_oracle_unbiased_and_variance_capped(self):
        sigma = 0.7
        obj = make_quadratics(n=2, d=6, vs0_sq=1.0, sigma=sigma, seed=4)
        x = np.full(6, 0.3)
        exact = obj.worker_grad(0, x)
        draws = 20000
        rng = oracle_stream(5, 0, 0)
        samples = np.stack([obj.oracle(0, x, rng) for _ in range(draws)])
        err = np.linalg.norm(samples.mean(axis=0) - exact)
        assert err <= 3 * sigma / np.sqrt(draws)  # O(sigma/sqrt(K))
        per_query_var = ((samples - exact) ** 2).sum(axis=1).mean()
        assert per_query_var <= sigma**2 * 1.1

    def test_metadata(self):
        obj = make_quadratics(n=3, d=4, vs0_sq=0.5, sigma=0.0, seed=5)
        assert obj.smoothness > 0 and obj.delta > 0


class TestLogistic:
    def _small(self, batch=None, reg=1e-3, shuffle=100.0):
        feats, labels = make_two_class_gaussian(60, 4, separation=2.5, seed=0)
        shards = partition(labels, PartitionSpec(shuffle, seed=0, n=3))
        return make_logistic(feats, labels, shards, reg=reg, batch=batch)

    def test_full_batch_matches_exact_gradient(self):
        obj = self._small(batch=None)
        x = np.linspace(-1, 1, 4)
        rng = oracle_stream(0, 1, 0)
        assert np.array_equal(obj.oracle(1, x, rng), obj.worker_grad(1, x))

    def test_gradient_vs_finite_differences(self):
        obj = self._small()
        rng = np.random.default_rng(1)
        for _ in range(3):
            x = rng.normal(size=4)
            for i in range(obj.n):
                fd = finite_diff_grad(lambda z: obj.worker_loss(i, z), x)
                assert np.abs(obj.worker_grad(i, x) - fd).max() < 1e-5

    def test_strongly_convex_optimum(self):
        # two separable points, positive reg: long GD run reaches the optimum
        feats = np.array([[1.0, 0.5], [-1.0, -0.5]])
        labels = np.array([1, 0])
        obj = make_logistic(feats, labels, [np.array([0]), np.array([1])], reg=0.5, batch=None)
        x = np.zeros(2)
        for _ in range(2000):
            x -= 0.5 * obj.grad(x)
        assert np.linalg.norm(obj.grad(x)) <= 1e-6

    def test_minibatch_unbiased(self):
        obj = self._small(batch=2)
        x = np.array([0.2, -0.4, 0.1, 0.3])
        exact = obj.worker_grad(0, x)
        draws = 100_000
        rng = oracle_stream(9, 0, 0)
        total = np.zeros(4)
        sq = 0.0
        for _ in range(draws):
            s = obj.oracle(0, x, rng)
            total += s
            sq += float(((s - exact) ** 2).sum())
        err = np.linalg.norm(total / draws - exact)
        se = np.sqrt(sq / draws / draws)  # ~ sd of the mean estimate
        assert err <= 3 * se

    def test_empty_shard_rejected(self):
        feats, labels = make_two_class_gaussian(10, 2, seed=0)
        with pytest.raises(ObjectiveError):
            make_logistic(feats, labels, [np.arange(10), np.array([], dtype=int)])

    def test_label_validation(self):
        with pytest.raises(ObjectiveError):
            make_logistic(np.ones((4, 2)), np.array([0, 1, 2, 1]), [np.arange(4)])

    def test_two_class_generator(self):
        feats, labels = make_two_class_gaussian(101, 3, separation=4.0, seed=7)
        assert feats.shape == (101, 3)
        assert set(labels.tolist()) == {0, 1}
        gap = feats[labels == 1].mean(axis=0) - feats[labels == 0].mean(axis=0)
        assert np.linalg.norm(gap) == pytest.approx(4.0, rel=0.3)

    def test_csv_round_trip(self, tmp_path):
        feats, labels = make_two_class_gaussian(20, 3, seed=1)
        path = tmp_path / "data.csv"
        header = "f0,f1,f2,label"
        rows = [",".join([repr(float(v)) for v in f] + [str(l)]) for f, l in zip(feats, labels)]
        path.write_text(header + "\n" + "\n".join(rows) + "\n")
        feats2, labels2 = load_csv(path)
        assert np.allclose(feats2, feats)
        assert np.array_equal(labels2, labels)
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(ObjectiveError):
            load_csv(bad)


class TestHeterogeneity:
    def test_homogeneous_is_zero(self):
        obj = make_quadratics(n=5, d=4, vs0_sq=0.0, sigma=0.0, seed=0)
        stats = measure_heterogeneity(obj)
        assert stats.varsigma0_sq <= 1e-20

    def test_probe_max_dominates_zero(self):
        obj = make_quadratics(n=5, d=4, vs0_sq=3.0, sigma=0.0, seed=0)
        rng = np.random.default_rng(2)
        probes = [rng.normal(size=4) for _ in range(10)]
        stats = measure_heterogeneity(obj, probes)
        assert stats.varsigma_sq_estimate >= stats.varsigma0_sq - 1e-9


def test_oracle_stream_is_order_independent():
    a = oracle_stream(7, 3, 100).normal(size=4)
    _ = oracle_stream(7, 0, 0).normal(size=10)
    b = oracle_stream(7, 3, 100).normal(size=4)
    assert np.array_equal(a, b)
    c = oracle_stream(7, 3, 101).normal(size=4)
    assert not np.array_equal(a, c)
