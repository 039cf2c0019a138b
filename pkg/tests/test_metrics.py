import math

import numpy as np
import pytest
from scipy.stats import pearsonr

from gstatinv.metrics import DegenerateInputError, mae, pearson_r, snr_db


def test_mae_examples():
    assert mae([1, 2, 3], [1, 2, 3]) == 0.0
    assert mae([0, 0], [1, -3]) == 2.0
    with pytest.raises(ValueError):
        mae([1, 2], [1])
    with pytest.raises(ValueError):
        mae([], [])


def test_pearson_examples():
    assert pearson_r([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-15)
    assert pearson_r([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)
    with pytest.raises(DegenerateInputError):
        pearson_r([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson_r([1.0], [2.0])


def test_pearson_matches_scipy(rng):
    for _ in range(20):
        a = rng.normal(size=50)
        b = a + rng.normal(size=50)
        assert pearson_r(a, b) == pytest.approx(pearsonr(a, b)[0], abs=1e-12)


def test_pearson_shift_and_scale_invariant(rng):
    a, b = rng.normal(size=30), rng.normal(size=30)
    assert pearson_r(3 * a + 7, b) == pytest.approx(pearson_r(a, b), abs=1e-12)


def test_snr():
    c = np.array([1.0, -1.0, 1.0, -1.0])
    assert snr_db(c, c) == math.inf
    assert snr_db(c, c + 0.1) == pytest.approx(20.0)
