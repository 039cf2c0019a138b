import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from gstatinv.metrics import snr_db
from gstatinv.synthdata import (
    DEFAULT_LAYERS,
    ImpedanceModel,
    LineDatasetSpec,
    SeismicNoiseSpec,
    contaminate_seismic,
    default_layered_model,
    derive_seed,
    generate_line_dataset,
    layered_impedance_model,
    load_impedance_model,
    save_impedance_model,
)


def outlier_count_oracle(n, lo, hi, a=-1, b=1):
    # exact rational grid so boundary points are classified without rounding
    lo, hi = Fraction(lo).limit_denominator(1000), Fraction(hi).limit_denominator(1000)
    xs = [Fraction(a) + Fraction(b - a) * i / (n - 1) for i in range(n)]
    return sum(lo <= x < hi for x in xs)


def test_line_dataset_deterministic():
    spec = LineDatasetSpec()
    a, b = generate_line_dataset(spec, 7), generate_line_dataset(spec, 7)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)
    c = generate_line_dataset(spec, 8)
    assert not np.array_equal(a.d_obs, c.d_obs)


def test_line_outlier_mask():
    data = generate_line_dataset(LineDatasetSpec(), 0)
    assert outlier_count_oracle(50, 0.4, 0.9) == 12
    assert int(data.outliers.sum()) == 12
    np.testing.assert_array_equal(data.d_true, data.x + 2.0)
    resid = data.d_obs[~data.outliers] - data.d_true[~data.outliers]
    assert np.max(np.abs(resid)) < 5 * 0.2


def test_line_noise_free_matches_truth():
    data = generate_line_dataset(LineDatasetSpec(sigma=0.0, outlier_region=(2.0, 3.0)), 1)
    np.testing.assert_array_equal(data.d_obs, data.d_true)
    assert LineDatasetSpec(sigma=0.04, sigma_is_variance=True).noise_sd == pytest.approx(0.2)


def test_derive_seed():
    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
    assert len({derive_seed(5, k) for k in range(100)}) == 100
    assert derive_seed(5, 1) != derive_seed(6, 1)
    assert 0 <= derive_seed(2**64 - 1, 3) < 2**64


@pytest.mark.parametrize("target", [10.0, 30.0, 80.0])
def test_white_noise_snr(target, rng):
    d = rng.normal(size=10_000)
    noisy = contaminate_seismic(d, SeismicNoiseSpec(snr_db=target), 3)
    assert abs(snr_db(d, noisy) - target) < 0.5


def test_spike_count_and_positions(rng):
    d = np.sin(np.linspace(0, 20, 1000))
    spec = SeismicNoiseSpec(snr_db=math.inf, spike_fraction=0.25)
    out, pos = contaminate_seismic(d, spec, 11, return_positions=True)
    assert pos.size == 250 == len(set(pos.tolist()))
    assert np.all(np.diff(pos) > 0)
    changed = np.flatnonzero(out != d)
    assert set(changed.tolist()) <= set(pos.tolist())
    # spike magnitude: |s f| a_ref with s in [5, 15]
    peak = np.max(np.abs(d))
    a_ref = np.where(np.abs(d[pos]) > 0.01 * peak, np.abs(d[pos]), peak)
    sf = np.abs(out[pos] - d[pos]) / a_ref
    assert np.all(sf <= 15 * 6)


def test_spike_positions_uniform():
    d = np.ones(200)
    counts = np.zeros(200)
    for s in range(400):
        _, pos = contaminate_seismic(d, SeismicNoiseSpec(snr_db=math.inf, spike_fraction=0.1), s,
                                     return_positions=True)
        counts[pos] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_contamination_deterministic_and_zero_fraction():
    d = np.linspace(-1, 1, 64)
    spec = SeismicNoiseSpec(spike_fraction=0.3)
    np.testing.assert_array_equal(contaminate_seismic(d, spec, 4), contaminate_seismic(d, spec, 4))
    out, pos = contaminate_seismic(d, SeismicNoiseSpec(snr_db=math.inf), 4, return_positions=True)
    assert pos.size == 0
    np.testing.assert_array_equal(out, d)
    with pytest.raises(ValueError):
        SeismicNoiseSpec(spike_fraction=1.5)


def test_layered_model_examples():
    m = layered_impedance_model(12, [(5, 5.0), (7, 7.0)])
    assert m.z.tolist() == [5.0] * 5 + [7.0] * 7
    reflectivity = 0.5 * np.diff(m.log_z)
    assert np.count_nonzero(reflectivity) == 1
    assert reflectivity[4] == pytest.approx(0.168236, abs=1e-6)
    with pytest.raises(ValueError):
        layered_impedance_model(10, [(5, 5.0), (7, 7.0)])
    with pytest.raises(ValueError):
        layered_impedance_model(2, [(2, -1.0)])


@pytest.mark.parametrize("n", [512, 300, 1000])
def test_default_model(n):
    m = default_layered_model(n)
    assert len(m) == n
    assert np.count_nonzero(np.diff(m.z)) == len(DEFAULT_LAYERS) - 1
    assert np.all(m.z > 0)


def test_model_file_round_trip(tmp_path):
    m = default_layered_model(64, dt=2e-3)
    p = tmp_path / "model.txt"
    save_impedance_model(m, p)
    back = load_impedance_model(p)
    np.testing.assert_array_equal(back.z, m.z)
    assert back.dt == 2e-3


def test_model_csv(tmp_path):
    p = tmp_path / "z.csv"
    p.write_text("index,z\n1,6.0\n0,5.0\n2,7.5\n")
    m = load_impedance_model(p, dt=4e-3)
    assert m.z.tolist() == [5.0, 6.0, 7.5]
    assert m.dt == 4e-3


@pytest.mark.parametrize("text", ["", "3 0.001\n1\n2\n", "x y\n1\n", "0,5\n2,6\n", "2 0.001\n1\n-3\n"])
def test_model_file_errors(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(ValueError):
        load_impedance_model(p)


def test_impedance_model_validation():
    with pytest.raises(ValueError):
        ImpedanceModel(np.array([1.0, 0.0]), 1e-3)
