import json
import math
import pathlib

import numpy as np
import pytest

import raddiff

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def small_config(**extra):
    c = {
        "domain": {"shape": "ball", "radius": 1.0},
        "alpha": {"kind": "constant", "value": 1.0},
        "source": {"kind": "isotropic", "level": 1.0},
        "eps": [0.2, 0.1],
        "study": {"margin": 0.3, "layer_samples": 4, "boundary_samples": 16},
        "seed": 2,
    }
    c.update(extra)
    return c


def test_kernel_functions():
    x = np.array([0.1, 1.0, 3.0])
    assert np.allclose(raddiff.kernel_K(x), 0.5 * raddiff.e1(x), rtol=0, atol=1e-16)
    assert np.all(raddiff.head_from(x) + raddiff.tail_from(x) == 1.0)
    xi = np.array([0.5, 2.0])
    assert np.allclose(raddiff.kernel_fourier(xi), np.arctan(xi) / (xi * math.sqrt(2 * math.pi)), rtol=1e-14)
    # E1(1) to 16 digits
    assert raddiff.e1(1.0) == pytest.approx(0.2193839343955203, rel=1e-15)


def test_kernel_table():
    t = raddiff.kernel_table(0.5, 2.0, 0.5)
    assert list(t) == ["x", "K", "E1", "head", "tail", "first_moment_tail", "fourier"]
    assert np.allclose(t["x"], [0.5, 1.0, 1.5, 2.0])
    assert np.all(t["head"] + t["tail"] == 1.0)


def test_config_round_trip_and_errors():
    c = small_config()
    n = raddiff.normalize_config(c)
    assert n["eps"] == [0.2, 0.1]
    assert raddiff.config_hash(n) == raddiff.config_hash(c)
    assert raddiff.config_hash(dict(c, output="elsewhere")) == raddiff.config_hash(c)
    with pytest.raises(raddiff.ConfigError, match="strictly decreasing"):
        raddiff.normalize_config(small_config(eps=[0.1, 0.2]))
    with pytest.raises(ValueError, match="domain.radus"):
        raddiff.normalize_config(small_config(domain={"shape": "ball", "radus": 1.0}))


def test_milne_equilibrium():
    r = raddiff.milne_solve(small_config())
    assert r["u"].shape == r["y"].shape
    assert np.max(np.abs(r["u"] - 4 * math.pi)) < 1e-7
    assert r["u_inf"] == pytest.approx(4 * math.pi, rel=1e-4)
    assert not r["flagged"]


def test_transport_and_elliptic():
    c = small_config()
    t = raddiff.transport_solve(c, eps=0.1)
    assert t["converged"]
    assert t["layout"] == "radial"
    assert t["points"].shape == (t["u"].size, 3)
    assert np.max(np.abs(t["u"] - 4 * math.pi)) < 1e-8

    b = raddiff.boundary_map(c)
    assert b["points"].shape == (16, 3)
    assert np.allclose(b["u_inf"], 4 * math.pi, rtol=1e-6)

    e = raddiff.elliptic_solve(c)
    assert np.allclose(e["v"], 4 * math.pi, rtol=1e-8)


def test_convergence_study_from_file():
    rep = raddiff.convergence_study(CONFIGS / "ball_constant.json")
    assert rep["pass"]
    assert [r["eps"] for r in rep["records"]] == [0.2, 0.1, 0.05, 0.025]
    assert rep["csv"].startswith("eps [length]")
    again = raddiff.convergence_study(str(CONFIGS / "ball_constant.json"))
    assert json.dumps(again, sort_keys=True) == json.dumps(rep, sort_keys=True)
