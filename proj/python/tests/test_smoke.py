import math
import os
import subprocess

import pytest

import rgl_py


def test_doubling_exponent_is_log2():
    f = rgl_py.MapFamily.doubling()
    k = rgl_py.NoiseKernel.uniform(0.0, 0.1)
    assert rgl_py.exponent(f, k, 3, 0.2, 1, 5000) == pytest.approx(math.log(2), abs=1e-12)


def test_orbit_stays_on_circle():
    f = rgl_py.MapFamily.nonlinear(2, 0.1)
    o = rgl_py.random_orbit(f, rgl_py.NoiseKernel.uniform(0.0, 0.05), 7, 0.3, 200)
    assert len(o.points) == 201
    assert all(0.0 <= x < 1.0 for x in o.points)


def test_scan_matches_bruteforce():
    ld = [math.log(2.0) if i % 3 else -0.2 for i in range(300)]
    assert rgl_py.hyperbolic_times(ld, 0.75) == rgl_py.hyperbolic_times_bruteforce(ld, 0.75)


def test_ulam_uniform_for_doubling():
    w = rgl_py.ulam_density(rgl_py.MapFamily.doubling(), rgl_py.NoiseKernel.uniform(0.0, 0.1), 64, 8)
    assert max(abs(x - 1.0) for x in w) < 1e-9


def test_quadratic_rows():
    rows = rgl_py.quadratic_table([0.5, 2.0], 20000, 1, 1)
    assert rows[0].period == 1 and rows[0].exponent < 0
    assert rows[1].exponent > 0.6
    with pytest.raises(ValueError):
        rgl_py.quadratic_table([2.5])


def test_run_and_unknown_key(tmp_path):
    code, _ = rgl_py.run("quadratic", "", ["quad.n_steps=5000"], str(tmp_path))
    assert code == 0
    assert (tmp_path / "quadratic" / "quadratic.csv").read_text().startswith("a,exponent,period")
    with pytest.raises(ValueError):
        rgl_py.run("quadratic", "", ["quad.nope=1"], str(tmp_path))


@pytest.mark.skipif("RGL_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_lyapunov(tmp_path):
    cfg = os.path.join(os.environ["RGL_CONFIGS"], "doubling.ini")
    r = subprocess.run([os.environ["RGL_CLI"], "lyapunov", "--config", cfg, "--out", str(tmp_path),
                        "--set", "lyap.n_steps=2000", "--set", "lyap.n_orbits=4"], capture_output=True)
    assert r.returncode == 0, r.stderr
    assert "0.693147" in (tmp_path / "lyapunov" / "lyapunov.csv").read_text()
