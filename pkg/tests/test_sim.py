import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradecode import decoders
from gradecode.coding import build_complex_scheme, build_real_bch_scheme
from gradecode.errors import (DimensionMismatch, InvalidParams, MissingPart, TooFewExamples,
                              WrongSetSize)
from gradecode.expander import build_expander_scheme, identity_scheme, random_regular_graph
from gradecode.sim import (Dataset, LearningRate, StragglerModel, gradient_matrix, l2_sweep,
                           logistic_gradient, logistic_loss, master_aggregate, pack_complex,
                           part_gradients, partition, run_full_gd, run_gd, synthetic_dataset,
                           unpack_complex, worker_message)


class Matrix:
    def __init__(self, B):
        self.B = np.asarray(B, dtype=float)


THREE_WORKER = Matrix([[0.5, 1.0, 0.0], [0.0, 1.0, -1.0], [0.5, 0.0, 1.0]])


def fd_gradient(w, X, y, h=1e-6):
    g = np.zeros_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        g[j] = (logistic_loss(w + e, X, y) - logistic_loss(w - e, X, y)) / (2 * h)
    return g


def test_dataset_validation():
    with pytest.raises(InvalidParams):
        Dataset(np.zeros((2, 2)), np.array([1.0, 0.0]))
    with pytest.raises(InvalidParams):
        Dataset(np.array([[np.nan, 0.0]]), np.array([1.0]))
    with pytest.raises(DimensionMismatch):
        Dataset(np.zeros((2, 2)), np.ones(3))


def test_synthetic_dataset_is_seeded():
    a, b = synthetic_dataset(50, 4, seed=9), synthetic_dataset(50, 4, seed=9)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
    assert set(np.unique(a.y)) <= {-1.0, 1.0}


def test_partition_sizes_and_padding():
    data = synthetic_dataset(11, 3, seed=0)
    pd = partition(data, THREE_WORKER)
    assert pd.k == 3 and pd.n == 3
    assert all(q.m == 4 for q in pd.parts)
    # padding repeats the last example
    assert np.array_equal(pd.parts[2].X[-1], data.X[-1])
    assert [a.tolist() for a in pd.assignment] == [[0, 1], [1, 2], [0, 2]]


def test_partition_expander_assignment():
    sc = build_expander_scheme(random_regular_graph(12, 3, seed=4))
    pd = partition(synthetic_dataset(120, 2, seed=1), sc, seed=3)
    assert all(len(a) == 3 for a in pd.assignment)
    assert pd.union().m == 120


def test_partition_too_few():
    with pytest.raises(TooFewExamples):
        partition(synthetic_dataset(2, 2), THREE_WORKER)


def test_gradient_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m, p = rng.integers(1, 30), rng.integers(1, 8)
        X = rng.standard_normal((m, p))
        y = rng.choice([-1.0, 1.0], size=m)
        w = rng.standard_normal(p)
        g, ref = logistic_gradient(w, X, y), fd_gradient(w, X, y)
        assert np.linalg.norm(g - ref) <= 1e-6 * max(np.linalg.norm(ref), 1e-3)


def test_gradient_at_zero():
    X = np.array([[1.0, 2.0], [3.0, -1.0]])
    y = np.array([1.0, -1.0])
    # sigmoid(0) = 1/2
    assert np.allclose(logistic_gradient(np.zeros(2), X, y), -(y @ X) / 4)


def test_gradient_dimension_check():
    with pytest.raises(DimensionMismatch):
        logistic_gradient(np.zeros(3), np.zeros((4, 2)), np.ones(4))


def test_duplicated_part_invariance():
    d = synthetic_dataset(10, 3, seed=2)
    X2, y2 = np.vstack([d.X, d.X]), np.concatenate([d.y, d.y])
    w = np.array([0.3, -0.2, 1.0])
    assert np.allclose(logistic_gradient(w, d.X, d.y), logistic_gradient(w, X2, y2))


def test_worker_message_identity_and_three_worker(rng):
    g = rng.standard_normal((3, 4))
    for i in range(3):
        assert np.allclose(worker_message(np.eye(3), i, g), g[i] / 3)
    msg = worker_message(THREE_WORKER.B, 0, {0: g[0], 1: g[1]})
    assert np.allclose(msg, (g[0] / 2 + g[1]) / 3)
    with pytest.raises(MissingPart):
        worker_message(THREE_WORKER.B, 1, {0: g[0], 1: g[1]})


def test_master_aggregate_exact(rng):
    sc = build_real_bch_scheme(9, 2)
    g = rng.standard_normal((9, 3))
    K = [0, 2, 3, 4, 5, 7, 8]
    msgs = {i: worker_message(sc.B, i, g) for i in K}
    v = master_aggregate(sc, "exact", K, msgs)
    assert np.allclose(v, g.sum(axis=0) / 9, atol=1e-10)
    with pytest.raises(WrongSetSize):
        master_aggregate(sc, "exact", K, {i: msgs[i] for i in K[:-1]})


def test_pack_example():
    v = np.array([1.0 + 2.0j, 3.0])
    assert np.array_equal(unpack_complex(v, 3), [1.0, 2.0, 3.0])
    assert np.array_equal(pack_complex(np.array([1.0, 2.0, 3.0])), [1 + 2j, 3 + 0j])


@settings(max_examples=50, deadline=None)
@given(p=st.integers(1, 9), rows=st.integers(1, 5), seed=st.integers(0, 1000))
def test_pack_roundtrip(p, rows, seed):
    N = np.random.default_rng(seed).standard_normal((rows, p))
    assert np.array_equal(unpack_complex(pack_complex(N), p), N)


@pytest.mark.parametrize("p", [4, 5])
def test_packed_equals_unpacked(p, rng):
    sc = build_complex_scheme(6, 2)
    N = rng.standard_normal((6, p))
    K = np.array([0, 1, 3, 5])
    a = decoders.exact(sc, K)
    plain = sum(a[i] * (sc.B[i] @ N) for i in K)
    packed = unpack_complex(sum(a[i] * (sc.B[i] @ pack_complex(N)) for i in K), p)
    assert np.allclose(packed, plain, atol=1e-10)
    assert np.allclose(packed, N.sum(axis=0), atol=1e-10)


def test_real_linearity_of_packing(rng):
    # for a real combination e(sum c_i z_i) = sum c_i e(z_i)
    Z = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    c = rng.standard_normal(4)
    assert np.allclose(unpack_complex(c @ Z, 6), c @ unpack_complex(Z, 6))


def test_learning_rate():
    assert LearningRate(c1=2.0, c2=3.0)(1) == 0.5
    assert LearningRate(constant=0.1)(50) == 0.1


def test_straggler_models():
    fixed = list(StragglerModel(s=2, seed=1).sets(8, 5))
    assert all(st == 2 and len(K) == 6 and np.all(np.diff(K) > 0) for st, K in fixed)
    assert [K.tolist() for _, K in fixed] == [K.tolist() for _, K in
                                             StragglerModel(s=2, seed=1).sets(8, 5)]
    tail = list(StragglerModel(kind="delay-tail", s=[0, 1, 3], seed=2).sets(8, 3))
    assert [len(K) for _, K in tail] == [8, 7, 5]
    with pytest.raises(InvalidParams):
        list(StragglerModel(s=8).sets(8, 1))
    with pytest.raises(InvalidParams):
        list(StragglerModel(kind="nope").sets(8, 1))


def test_run_gd_exact_matches_full():
    sc = build_complex_scheme(8, 2)
    pd = partition(synthetic_dataset(200, 5, seed=3), sc, seed=3)
    lr = LearningRate(c1=5.0, c2=5.0)
    run = run_gd(sc, pd, 30, lr, stragglers=StragglerModel(s=2, seed=1))
    ref = run_full_gd(pd, 30, lr)
    assert np.allclose(run.trajectory, ref.trajectory, rtol=1e-6, atol=1e-10)
    assert max(r.l2_dev for r in run.records) <= 1e-8


def test_run_gd_bound_holds_each_iteration():
    sc = build_expander_scheme(random_regular_graph(16, 4, seed=2))
    pd = partition(synthetic_dataset(160, 4, seed=5), sc, seed=5)
    run = run_gd(sc, pd, 25, 0.5, stragglers=StragglerModel(kind="delay-tail", s=4, seed=7))
    for r in run.records:
        assert r.l2_dev <= r.bound + 1e-12
    assert len(run.metrics_rows()) == 25


def test_run_gd_identity_matches_sqrt_s_bound():
    sc = identity_scheme(6)
    pd = partition(synthetic_dataset(60, 3, seed=5), sc)
    run = run_gd(sc, pd, 5, 0.5, stragglers=StragglerModel(s=2, seed=0))
    assert all(r.l2_dev <= r.bound + 1e-12 for r in run.records)


def test_run_gd_dimension_mismatch():
    pd = partition(synthetic_dataset(30, 2), identity_scheme(5))
    with pytest.raises(DimensionMismatch):
        run_gd(identity_scheme(6), pd, 2, 0.1)


def test_gradient_matrix_sums_to_full_gradient():
    sc = identity_scheme(5)
    data = synthetic_dataset(50, 3, seed=1)
    pd = partition(data, sc)
    w = np.array([0.1, 0.2, -0.3])
    N = gradient_matrix(part_gradients(w, pd))
    assert np.allclose(N.sum(axis=0), logistic_gradient(w, data.X, data.y))


def test_l2_sweep_shape_and_properties():
    rows = l2_sweep(20, [3, 4], [0, 2, 4, 6], trials=20, draws=2, seed=1)
    assert len(rows) == 2 * 4 * 2
    by = {(r["d"], r["s"], r["decoder"]): r for r in rows}
    for d in (3, 4):
        assert by[(d, 0, "linear")]["mean_residual"] < 1e-12
        lin = [by[(d, s, "linear")]["mean_residual"] for s in (0, 2, 4, 6)]
        assert all(b >= a for a, b in zip(lin, lin[1:]))
        for s in (2, 4, 6):
            assert by[(d, s, "optimal")]["mean_residual"] <= by[(d, s, "linear")]["mean_residual"] + 1e-12
            assert by[(d, s, "linear")]["mean_residual"] <= by[(d, s, "linear")]["bound"]
    assert rows == l2_sweep(20, [3, 4], [0, 2, 4, 6], trials=20, draws=2, seed=1)


def test_l2_sweep_invalid():
    with pytest.raises(InvalidParams):
        l2_sweep(9, [3], [1])
