import math
import pathlib

import numpy as np
import pytest

import leafscope as ls

SCENES = pathlib.Path(__file__).resolve().parents[2] / "scenes"


def scene(name):
    return ls.load_scene(str(SCENES / f"{name}.json"))


def test_disk_geodesic_is_a_chord():
    report, samples = ls.geodesic(scene("unit_disk"), [0.5, 0.0], [1.0, 0.0])
    assert report["class"] == "G"
    assert report["l_plus"] == pytest.approx(0.5, abs=1e-10)
    assert report["l_minus"] == pytest.approx(-1.5, abs=1e-10)
    assert samples.shape[1] == 3
    assert np.all(np.abs(samples[:, 2]) < 1e-12)


def test_coverage_on_the_disk():
    rep = ls.coverage(scene("unit_disk"), points=50, dirs=8, seed=1)
    assert rep["fraction"] == 1.0


def test_trapped_example_summary():
    rep = ls.detect_trapped(ls.trapped_example(3, 0.05), grid=4)
    assert rep["summary"] == "100% Trapped"


def test_xray_chord_length():
    s = scene("unit_disk")
    value, raw = ls.xray(s, "1", [0.0, 0.0], [0.0, 1.0])
    assert raw == pytest.approx(2.0, abs=1e-6)
    assert value == pytest.approx(2.0, abs=2e-2)


def test_leaf_and_attenuated_agree():
    s = scene("product_interval_plane")
    f = "exp(-(x1^2 + x2^2 + x3^2))"
    y, eta = [0.2, -0.2, -0.5], [0.0, 0.6, 0.8]
    a = ls.attenuated(s, f, y, eta, 0.5)
    b = ls.leaf_transform(s, f, y, eta, 1.0)
    assert abs(b - complex(math.cos(0.2), math.sin(0.2)) * a) < 1e-6


def test_fbp_reconstructs_a_gaussian():
    n_theta, n_p, p_max = 90, 128, 1.5 * math.sqrt(2.0)
    p = np.linspace(-p_max, p_max, n_p)
    sino = np.tile(math.sqrt(math.pi / 4.0) * np.exp(-4.0 * p**2), (n_theta, 1))
    rec = ls.fbp(sino, p_max, 1.5, 65)
    x = np.linspace(-1.5, 1.5, 65)
    truth = np.exp(-4.0 * (x[:, None] ** 2 + x[None, :] ** 2))
    assert np.linalg.norm(rec - truth) / np.linalg.norm(truth) < 0.05


def test_fourier_slice_at_zero_frequency():
    v = ls.fourier_slice(scene("ball3_large"), "exp(-(x1^2 + x2^2 + x3^2))", [0.0, 0.0, 0.0])
    assert abs(v - math.pi**1.5) < 1e-3 * math.pi**1.5


def test_density_constant():
    assert ls.density_check("1", np.linspace(-2, 2, 21))["sup_error"] < 1e-10


def test_config_errors_raise():
    with pytest.raises(ls.ConfigError):
        ls.scene_from_dict({"type": "nope"})
    with pytest.raises(ValueError):
        ls.load_scene("/nonexistent.json")
