import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradecode.coding import (_complement, _decode_real_raw, bch_roots, build_complex_scheme,
                              build_real_bch_scheme, decode, decode_complex, decode_real,
                              precompute_x_prime, restrict_to_k_partitions)
from gradecode.errors import InvalidParams, ParityMismatch, WrongSetSize


def constrained_solve(B, K):
    """Independent oracle: least squares for a B = 1 with a supported on K."""
    sol, *_ = np.linalg.lstsq(B[K].T, np.ones(B.shape[1], dtype=B.dtype), rcond=None)
    a = np.zeros(B.shape[0], dtype=sol.dtype)
    a[K] = sol
    return a


def valid_pairs(real):
    for n in range(2, 12):
        for s in range(1, n):
            if not real or (n - s) % 2:
                yield n, s


def test_complex_scheme_n4_s1():
    sc = build_complex_scheme(4, 1)
    # m(x) = (x - alpha_2)(x - alpha_3) = (x + 1)(x + i), evaluated at 1 and i
    m = lambda x: (x + 1) * (x + 1j)  # noqa: E731
    assert np.allclose(sc.c1, [m(1), m(1j), 0, 0])
    assert np.allclose(sc.c1[:2], [2 + 2j, -2 + 2j])
    for j in range(4):
        assert np.allclose(sc.B[:, j], np.roll(sc.c1, j))


@pytest.mark.parametrize("n, s", list(valid_pairs(False)))
def test_complex_structure(n, s):
    sc = build_complex_scheme(n, s)
    assert np.all(sc.c1[s + 1:] == 0)
    assert np.all(np.count_nonzero(sc.B, axis=1) == s + 1)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    assert np.array_equal(sc.B, sc.B[(i + 1) % n, (j + 1) % n])
    assert np.abs(sc.x_prime @ sc.B - 1).max() < 1e-9
    assert np.all(sc.x_prime[n - s:] == 0)


def test_real_bch_examples():
    sc = build_real_bch_scheme(4, 1)
    assert np.array_equal(sc.c1, [1.0, 1.0, 0.0, 0.0])
    assert np.allclose(bch_roots(4, 1), [-1])

    sc = build_real_bch_scheme(5, 2)
    w = np.exp(2j * np.pi / 5)
    ref = [w ** 5, -(w ** 2 + w ** 3), 1]
    assert np.allclose(np.imag(ref), 0, atol=1e-15)
    assert np.allclose(sc.c1[:3], np.real(ref))
    assert np.all(sc.c1[3:] == 0)

    with pytest.raises(ParityMismatch):
        build_real_bch_scheme(4, 2)


@pytest.mark.parametrize("n, s", list(valid_pairs(True)))
def test_real_structure(n, s):
    sc = build_real_bch_scheme(n, s)
    assert sc.B.dtype == float
    assert np.all(np.count_nonzero(sc.B, axis=1) == s + 1)
    # the all-ones vector lies in the code: 1(r) = sum r^j = 0 for each root
    V = sc.roots[:, None] ** np.arange(n)[None, :]
    assert np.abs(V.sum(axis=1)).max() < 1e-9
    assert np.abs(V @ sc.c1).max() < 1e-9
    assert np.abs(sc.x_prime @ sc.B - 1).max() < 1e-9


@pytest.mark.parametrize("n, s", [(0, 1), (4, 0), (4, 4), (3, 5)])
def test_invalid_params(n, s):
    with pytest.raises(InvalidParams):
        build_complex_scheme(n, s)


def test_x_prime_real_n4_hand_back_substitution():
    sc = build_real_bch_scheme(4, 1)
    # B' = [[1,0,0],[1,1,0],[0,1,1]]; x''B' = 1 gives x2 = 1, x1 = 0, x0 = 1
    assert np.allclose(sc.x_prime, [1, 0, 1, 0])


def test_x_prime_single_unknown():
    for n in (2, 5, 7):
        sc = build_complex_scheme(n, n - 1)
        expected = np.zeros(n, dtype=complex)
        expected[0] = 1 / sc.B[0, 0]
        assert np.allclose(sc.x_prime, expected)


def test_x_prime_complex_n4():
    sc = build_complex_scheme(4, 1)
    assert sc.x_prime[3] == 0
    assert np.abs(sc.x_prime @ sc.B - 1).max() < 1e-12
    assert np.allclose(precompute_x_prime(sc.B, 1), sc.x_prime)


def test_dual_multipliers_annihilate_codewords():
    for n, s in [(4, 1), (7, 3), (10, 3), (11, 4)]:
        sc = build_complex_scheme(n, s)
        VD = sc.roots[None, :] ** np.arange(s)[:, None] * sc.dual_multipliers[None, :]
        assert np.abs(VD @ sc.B).max() < 1e-9


def test_decode_identity_set_gives_x_prime():
    for build in (build_complex_scheme, build_real_bch_scheme):
        sc = build(7, 2) if build is build_complex_scheme else build(7, 2)
        a = decode(sc, range(5))
        assert np.allclose(a, sc.x_prime, atol=1e-12)


def test_decode_complex_n4_against_linear_solve():
    sc = build_complex_scheme(4, 1)
    K = [1, 2, 3]
    a = decode_complex(sc, K)
    assert a[0] == 0
    assert np.allclose(a, constrained_solve(sc.B, K), atol=1e-10)
    assert np.abs(a @ sc.B - 1).max() < 1e-12


def test_decode_real_n4_against_linear_solve():
    sc = build_real_bch_scheme(4, 1)
    K = [0, 1, 3]
    a = decode_real(sc, K)
    assert a.dtype == float and a[2] == 0
    assert np.allclose(a, constrained_solve(sc.B, K), atol=1e-10)


def test_complex_exhaustive_n10_s3():
    sc = build_complex_scheme(10, 3)
    count = 0
    for K in itertools.combinations(range(10), 7):
        a = decode_complex(sc, K)
        assert np.abs(a @ sc.B - 1).max() <= 1e-8
        Kc = sorted(set(range(10)) - set(K))
        assert np.all(a[Kc] == 0)
        count += 1
    assert count == 120


def test_real_random_n11_s4(rng):
    sc = build_real_bch_scheme(11, 4)
    worst = 0.0
    for _ in range(50):
        K = np.sort(rng.permutation(11)[:7])
        worst = max(worst, np.abs(decode_real(sc, K) @ sc.B - 1).max())
    assert worst <= 1e-8


@pytest.mark.parametrize("n, s", list(valid_pairs(True)))
def test_real_decoder_imaginary_residue(n, s):
    sc = build_real_bch_scheme(n, s)
    for K in itertools.islice(itertools.combinations(range(n), n - s), 60):
        Kn, Kc = _complement(n, K)
        raw = _decode_real_raw(sc, Kn, Kc)
        assert np.abs(raw.imag).max() <= 1e-9


def test_wrong_set_size():
    sc = build_complex_scheme(6, 2)
    with pytest.raises(WrongSetSize):
        decode_complex(sc, [0, 1, 2])
    with pytest.raises(WrongSetSize):
        decode_real(build_real_bch_scheme(5, 2), [0, 1])
    with pytest.raises(WrongSetSize):
        decode(sc, [0, 1])


def test_decode_superset_uses_first_sets():
    sc = build_real_bch_scheme(9, 2)
    K = [0, 2, 3, 4, 5, 6, 7, 8]
    a = decode(sc, K)
    assert a[1] == 0 and a[8] == 0
    assert np.abs(a @ sc.B - 1).max() < 1e-9


@pytest.mark.parametrize("build", [build_complex_scheme, build_real_bch_scheme])
def test_rank_of_every_row_subset(build):
    n, s = (8, 3) if build is build_real_bch_scheme else (8, 2)
    sc = build(n, s)
    for rows in itertools.combinations(range(n), n - s):
        sv = np.linalg.svd(sc.B[list(rows)], compute_uv=False)
        assert sv[n - s - 1] > 1e-6


def test_restrict_to_k_partitions():
    sc = build_complex_scheme(4, 1)
    assert restrict_to_k_partitions(sc, 4) is sc
    r = restrict_to_k_partitions(sc, 3)
    assert r.B.shape == (4, 3)
    assert np.all(np.count_nonzero(r.B, axis=1) <= np.count_nonzero(sc.B, axis=1))
    for K in itertools.combinations(range(4), 3):
        assert np.abs(decode(r, K) @ r.B - 1).max() < 1e-10
    with pytest.raises(InvalidParams):
        restrict_to_k_partitions(sc, 0)
    with pytest.raises(InvalidParams):
        restrict_to_k_partitions(sc, 5)


def test_schemes_are_immutable():
    sc = build_complex_scheme(5, 2)
    with pytest.raises(ValueError):
        sc.B[0, 0] = 1


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 14), data=st.data())
def test_ec_holds_on_random_sets(n, data):
    s = data.draw(st.integers(1, min(n - 1, 4)))
    seed = data.draw(st.integers(0, 2**31))
    K = np.sort(np.random.default_rng(seed).permutation(n)[: n - s])
    sc = build_complex_scheme(n, s)
    assert np.abs(decode(sc, K) @ sc.B - 1).max() <= 1e-8
    if (n - s) % 2:
        sr = build_real_bch_scheme(n, s)
        assert np.abs(decode(sr, K) @ sr.B - 1).max() <= 1e-8
