import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from rcmlab.model import (
    ModelParams,
    RowSupportMatrix,
    complement,
    expectation_matrix,
    export_dense_csv,
    import_dense_csv,
    normalization_scale,
    normalize,
    read_rcm,
    sample_bernoulli,
    sample_combinatorial,
    sample_rows,
    shift,
    transpose,
    write_rcm,
)
from rcmlab.oracle import enumerate_matrices
from rcmlab.rng import derive_seed, make_rng


def test_unique_member_of_full_model():
    M = sample_combinatorial(ModelParams(n=3, d=3, m=3), make_rng(1))
    assert np.array_equal(M.to_dense(), np.ones((3, 3)))


def test_uniform_over_m31():
    rng = make_rng(7)
    cells = {tuple(s): i for i, s in enumerate(enumerate_matrices(3, 1))}
    assert len(cells) == 27
    counts = np.zeros(27, dtype=int)
    sup = sample_rows(3, 1, 3 * 27_000, rng).reshape(27_000, 3)
    for row in map(tuple, sup):
        counts[cells[tuple((int(j),) for j in row)]] += 1
    assert stats.chisquare(counts).pvalue > 1e-3


def test_single_row_support_frequencies():
    sup = sample_rows(4, 2, 60_000, make_rng(3))
    freq = {c: 0 for c in itertools.combinations(range(4), 2)}
    for row in map(tuple, sup.tolist()):
        freq[row] += 1
    dev = max(abs(v / 60_000 - 1 / 6) for v in freq.values())
    assert dev < 0.01


def test_rows_are_sorted_distinct_subsets():
    sup = sample_rows(50, 7, 500, make_rng(0))
    assert sup.shape == (500, 7)
    assert np.all(np.diff(sup, axis=1) > 0)
    assert sup.min() >= 0 and sup.max() < 50


def test_sampler_deterministic_under_seed():
    p = ModelParams(n=20, d=4, seed=derive_seed(5, 4, 0))
    assert sample_combinatorial(p) == sample_combinatorial(p)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(n=3, d=0)
    with pytest.raises(ValueError):
        ModelParams(n=3, d=4)
    assert ModelParams(n=5, d=2).m == 5


def test_bernoulli_edges_and_mean():
    rng = make_rng(2)
    assert not sample_bernoulli(5, 0.0, rng).any()
    assert sample_bernoulli(5, 1.0, rng).all()
    mean = np.mean([sample_bernoulli(100, 0.3, rng).mean() for _ in range(100)])
    assert abs(mean - 0.3) < 0.01
    with pytest.raises(ValueError):
        sample_bernoulli(3, 1.5, rng)


def test_normalization():
    M = sample_combinatorial(ModelParams(n=4, d=2), make_rng(0))
    assert np.allclose(normalize(M), M.to_dense())
    assert normalization_scale(10, 1) == pytest.approx(1.05409, abs=1e-5)
    M = sample_combinatorial(ModelParams(n=30, d=5), make_rng(1))
    rs = normalize(M).sum(axis=1)
    assert np.allclose(rs, 5 / math.sqrt(5 * (1 - 5 / 30)))
    with pytest.raises(ValueError):
        normalization_scale(3, 3)


def test_shift():
    I = np.eye(4)
    assert np.allclose(shift(I, 1), 0)
    M = sample_combinatorial(ModelParams(n=6, d=2), make_rng(0))
    assert np.array_equal(shift(M, 0), M.to_dense())
    z = 0.3 - 0.7j
    assert np.allclose(np.diag(shift(M, z)), np.diag(M.to_dense()) - z)
    with pytest.raises(ValueError):
        shift(np.ones((2, 3)), 1)


def test_expectation_matrix():
    assert np.allclose(expectation_matrix(2, 2, 1), [[0.5, 0.5], [0.5, 0.5]])
    assert np.allclose(expectation_matrix(7, 3, 3).sum(axis=1), 3)
    assert np.allclose(expectation_matrix(4, 4, 4), 1)


def test_complement():
    I2 = RowSupportMatrix(n=2, d=1, supports=[[0], [1]])
    assert np.array_equal(complement(I2).to_dense(), [[0, 1], [1, 0]])
    M = sample_combinatorial(ModelParams(n=9, d=3), make_rng(4))
    assert complement(complement(M)) == M
    full = RowSupportMatrix(n=3, d=3, supports=[[0, 1, 2]] * 3)
    c = complement(full)
    assert c.d == 0 and not c.to_dense().any()


def test_transpose_column_sums():
    M = sample_combinatorial(ModelParams(n=8, d=3, m=5), make_rng(0))
    assert np.array_equal(transpose(M).sum(axis=1), M.column_sums())


def test_support_validation():
    with pytest.raises(ValueError):
        RowSupportMatrix(n=3, d=2, supports=[[1, 1]])
    with pytest.raises(ValueError):
        RowSupportMatrix(n=3, d=1, supports=[[3]])
    with pytest.raises(ValueError):
        RowSupportMatrix.from_dense([[1, 0], [1, 1]])


def test_rcm_round_trip(tmp_path):
    M = sample_combinatorial(ModelParams(n=12, d=4, m=7), make_rng(9))
    write_rcm(M, tmp_path / "m.rcm")
    text = (tmp_path / "m.rcm").read_text().splitlines()
    assert text[0] == "rcm 12 7 4"
    assert min(int(t) for line in text[1:] for t in line.split()) >= 1
    assert read_rcm(tmp_path / "m.rcm") == M


def test_rcm_bad_header(tmp_path):
    (tmp_path / "x.rcm").write_text("mat 2 2 1\n1\n2\n")
    with pytest.raises(ValueError):
        read_rcm(tmp_path / "x.rcm")


def test_dense_csv_round_trip(tmp_path):
    rng = make_rng(0)
    a = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    export_dense_csv(a, tmp_path / "a.csv")
    assert np.array_equal(import_dense_csv(tmp_path / "a.csv"), a)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 30), data=st.data(), seed=st.integers(0, 2 ** 32))
def test_row_sums_property(n, data, seed):
    d = data.draw(st.integers(1, n))
    m = data.draw(st.integers(1, 20))
    M = sample_combinatorial(ModelParams(n=n, d=d, m=m), make_rng(seed))
    a = M.to_dense()
    assert a.shape == (m, n)
    assert np.all(a.sum(axis=1) == d)
    assert RowSupportMatrix.from_dense(a) == M
