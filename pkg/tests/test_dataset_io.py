import numpy as np
import pytest

from conftest import OBSERVED_NAMES, data_file, random_correlation
from pathanalysis.dataset_io import (CorrelationMatrix, Dataset, Strength, correlation_pvalue, correlation_table,
                                     dataset_to_csv, generate_synthetic, load_correlation, load_dataset,
                                     pearson_matrix, standardize, strength_label, summary_stats, write_correlation,
                                     write_dataset)
from pathanalysis.errors import DataError


def _write(tmp_path, name, content):
    path = tmp_path / name
    path.write_text(content)
    return str(path)


def test_load_correlation_published():
    c = load_correlation(data_file("weather_cases.corr"))
    assert c.names == OBSERVED_NAMES
    assert c.n == 44
    assert c.get("X1", "X2") == pytest.approx(0.804)
    assert c.get("X3", "Y") == pytest.approx(-0.493)
    assert c.get("Y", "X3") == c.get("X3", "Y")


@pytest.mark.parametrize("content, code", [
    ("n 10\nvars A B\nmatrix\n1 .5\n.4 1\n", "Asymmetric"),
    ("n 10\nvars A B\nmatrix\n0.9 .5\n.5 1\n", "BadDiagonal"),
    ("n 10\nvars A B\nmatrix\n1 1.2\n1.2 1\n", "EntryOutOfRange"),
    ("vars A B\nmatrix\n1 .5\n.5 1\n", "MissingSampleSize"),
    ("n 10\nvars A B\nmatrix\n1 .5\n", "NonRectangular"),
])
def test_load_correlation_errors(tmp_path, content, code):
    with pytest.raises(DataError) as e:
        load_correlation(_write(tmp_path, "bad.corr", content))
    assert e.value.code == code


def test_load_correlation_tolerates_small_asymmetry(tmp_path):
    c = load_correlation(_write(tmp_path, "ok.corr", "n 10\nvars A B\nmatrix\n1 .5000001\n.5 1\n"))
    assert c.get("A", "B") == c.get("B", "A")


def test_write_correlation_can_be_loaded(tmp_path, observed):
    c = load_correlation(_write(tmp_path, "out.corr", write_correlation(observed)))
    assert c.names == observed.names
    assert c.n == 44
    assert np.array_equal(c.r, observed.r)


def test_not_positive_semidefinite():
    r = [[1, 0.9, -0.9], [0.9, 1, 0.9], [-0.9, 0.9, 1]]
    with pytest.raises(DataError) as e:
        CorrelationMatrix(names=("A", "B", "C"), r=r, n=10)
    assert e.value.code == "NotPositiveSemiDefinite"


def test_implied_matrix_skips_range_checks():
    c = CorrelationMatrix(names=("A", "B"), r=[[1, 1.3], [1.3, 1]], n=0, implied=True)
    assert c.get("A", "B") == 1.3


def test_load_dataset_listwise_deletion(tmp_path):
    path = _write(tmp_path, "d.csv", "A,B\n1,2\n2,NA\n3,5\n4,\n5,x\n6,1\n")
    d = load_dataset(path)
    assert d.n == 3
    assert d.p == 2
    assert d.dropped_rows == 3
    assert list(d.column("A")) == [1.0, 3.0, 6.0]


def test_load_dataset_custom_missing(tmp_path):
    path = _write(tmp_path, "d.csv", "A,B\n1,2\n2,-999\n3,5\n4,4\n")
    d = load_dataset(path, missing_tokens=("-999",))
    assert d.n == 3
    assert d.dropped_rows == 1


@pytest.mark.parametrize("content, code", [
    ("A,A\n1,2\n2,3\n3,4\n", "DuplicateName"),
    ("A,B\n1,2\n2,3\n", "TooFewRows"),
    ("A,B\n1,2\n2,3,4\n3,4\n4,5\n", "NonRectangular"),
])
def test_load_dataset_errors(tmp_path, content, code):
    with pytest.raises(DataError) as e:
        load_dataset(_write(tmp_path, "bad.csv", content))
    assert e.value.code == code


def test_load_dataset_missing_file(tmp_path):
    with pytest.raises(DataError) as e:
        load_dataset(str(tmp_path / "missing.csv"))
    assert e.value.code == "UnreadableFile"


def test_write_dataset(tmp_path):
    d = Dataset(names=("A", "B"), values=[[1.5, 2.0], [0.1, 3.0], [2.0, -1.0]])
    path = str(tmp_path / "d.csv")
    write_dataset(d, path)
    loaded = load_dataset(path)
    assert loaded.names == d.names
    assert np.array_equal(loaded.values, d.values)
    assert dataset_to_csv(d).splitlines()[0] == "A,B"


def test_pearson_matrix_constant_variable():
    d = Dataset(names=("A", "B"), values=[[1, 2], [1, 3], [1, 5]])
    with pytest.raises(DataError) as e:
        pearson_matrix(d)
    assert e.value.code == "ConstantVariable"


def test_pearson_matrix_perfect_correlation():
    d = Dataset(names=("A", "B"), values=[[1, 2], [2, 4], [3, 6], [4, 8]])
    c = pearson_matrix(d)
    assert c.get("A", "B") == pytest.approx(1.0)
    assert c.n == 4


def test_correlation_pvalues_published():
    assert correlation_pvalue(0.225, 44) == pytest.approx(0.143, abs=0.002)
    assert correlation_pvalue(0.276, 44) == pytest.approx(0.070, abs=0.002)
    assert correlation_pvalue(-0.469, 44) <= 0.002
    assert correlation_pvalue(0.804, 44) < 0.0005


def test_correlation_pvalue_edges():
    assert correlation_pvalue(0.0, 44) == pytest.approx(1.0)
    assert correlation_pvalue(1.0, 44) == 0.0
    with pytest.raises(DataError):
        correlation_pvalue(0.5, 2)


@pytest.mark.parametrize("r, strength", [
    (0.0999, Strength.NEGLIGIBLE),
    (0.1, Strength.SMALL),
    (-0.225, Strength.SMALL),
    (0.3, Strength.MEDIUM),
    (-0.469, Strength.MEDIUM),
    (0.5, Strength.LARGE),
    (0.804, Strength.LARGE),
])
def test_strength_label(r, strength):
    assert strength_label(r) == strength


def test_correlation_table(observed):
    rows = correlation_table(observed)
    assert len(rows) == 6
    first = rows[0]
    assert (first["row"], first["col"]) == ("X2", "X1")
    assert first["marker"] == "**"
    assert first["strength"] == "large"
    y_x1 = [x for x in rows if (x["row"], x["col"]) == ("Y", "X1")][0]
    assert y_x1["marker"] == ""
    assert y_x1["p"] == pytest.approx(0.143, abs=0.002)


def test_standardize_and_summary():
    d = Dataset(names=("A", "B"), values=[[1, 10], [2, 30], [3, 20], [6, 40]])
    z = standardize(d)
    assert np.allclose(np.mean(z.values, axis=0), 0.0)
    assert np.allclose(np.std(z.values, axis=0, ddof=1), 1.0)
    stats = summary_stats(d)
    assert stats[0].name == "A"
    assert stats[0].mean == pytest.approx(3.0)
    assert stats[0].min == 1.0
    assert stats[0].max == 6.0
    assert stats[0].range == 5.0
    assert stats[1].sd == pytest.approx(np.std([10, 30, 20, 40], ddof=1))


def test_generate_synthetic_exact(observed):
    d = generate_synthetic(observed, 44, seed=42)
    assert d.n == 44
    assert d.names == observed.names
    assert np.max(np.abs(pearson_matrix(d).r - observed.r)) < 1e-9


def test_generate_synthetic_deterministic(observed):
    a = generate_synthetic(observed, 50, seed=7)
    b = generate_synthetic(observed, 50, seed=7)
    c = generate_synthetic(observed, 50, seed=8)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_generate_synthetic_random_targets():
    rng = np.random.default_rng(3)
    for _ in range(10):
        target = random_correlation(rng, int(rng.integers(2, 6)))
        d = generate_synthetic(target, 30, seed=int(rng.integers(0, 1000)))
        assert np.max(np.abs(pearson_matrix(d).r - target.r)) < 1e-9


def test_generate_synthetic_sampling(observed):
    d = generate_synthetic(observed, 5000, seed=1, exact=False)
    assert np.max(np.abs(pearson_matrix(d).r - observed.r)) < 0.05


def test_generate_synthetic_too_few_rows(observed):
    with pytest.raises(DataError) as e:
        generate_synthetic(observed, 4, seed=1)
    assert e.value.code == "TooFewObservations"


def test_pearson_worked_example():
    d = Dataset(names=("x", "y"), values=[[1, 2], [2, 1], [3, 4], [4, 3]])
    assert pearson_matrix(d).get("x", "y") == pytest.approx(0.6, abs=1e-12)


def test_pearson_affine_invariance_and_negation():
    rng = np.random.default_rng(21)
    values = rng.standard_normal((30, 3))
    c = pearson_matrix(Dataset(names=("A", "B", "C"), values=values))
    shifted = values * np.array([2.5, 0.01, 7.0]) + np.array([-3.0, 100.0, 0.5])
    assert np.max(np.abs(pearson_matrix(Dataset(names=("A", "B", "C"), values=shifted)).r - c.r)) < 1e-12
    negated = values.copy()
    negated[:, 0] = -negated[:, 0]
    n = pearson_matrix(Dataset(names=("A", "B", "C"), values=negated))
    assert n.get("A", "B") == pytest.approx(-c.get("A", "B"), abs=1e-14)
    assert n.get("A", "C") == pytest.approx(-c.get("A", "C"), abs=1e-14)
    assert n.get("B", "C") == pytest.approx(c.get("B", "C"), abs=1e-14)


def test_correlation_pvalue_monotone():
    for r in [0.05, 0.2, 0.5, 0.9]:
        assert correlation_pvalue(-r, 44) == pytest.approx(correlation_pvalue(r, 44))
    values = [correlation_pvalue(r, 44) for r in [0.0, 0.1, 0.3, 0.5, 0.8]]
    assert all(a > b for a, b in zip(values, values[1:]))
    values = [correlation_pvalue(0.3, n) for n in [10, 20, 44, 100]]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_standardize_idempotent_and_scale_invariant():
    rng = np.random.default_rng(22)
    d = Dataset(names=("A", "B", "C"), values=rng.uniform(0, 50, (25, 3)))
    z = standardize(d)
    assert np.max(np.abs(standardize(z).values - z.values)) < 1e-12
    assert np.max(np.abs(pearson_matrix(z).r - pearson_matrix(d).r)) < 1e-12


def test_names_with_hyphens_are_valid():
    d = Dataset(names=("Air-Pressure", "Cases"), values=[[1, 2], [2, 1], [3, 4]])
    assert d.names == ("Air-Pressure", "Cases")


@pytest.mark.parametrize("name", ["", "A B", "A<B", "A>"])
def test_invalid_names(name):
    with pytest.raises(DataError) as e:
        Dataset(names=(name, "C"), values=[[1, 2], [2, 1], [3, 4]])
    assert e.value.code == "InvalidName"
