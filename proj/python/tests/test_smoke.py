import json
import math

import numpy as np
import pytest

import musurf


def test_density_values():
    d = musurf.make_builtin("minimal")
    assert d.g(0.0) == pytest.approx(1.0)
    assert d.g(1.0) == pytest.approx(math.sqrt(2.0))
    assert d.xi(2.0) == pytest.approx(1.0 / math.sqrt(5.0))
    mu3 = musurf.make_builtin("mu", 3.0)
    assert mu3.xi(2.0) == pytest.approx(4.0 / 9.0)
    assert mu3.theta(2.0) == pytest.approx(20.0 / 81.0)
    ok, checks = musurf.validate(d)
    assert ok, checks


def test_solve_and_forms():
    d = musurf.make_builtin("minimal")
    grid = musurf.GridSpec.square(-1.2, 1.2, 25)
    sol = musurf.solve_dirichlet(d, grid, "scherk")
    assert sol.converged
    assert sol.u.shape == (25, 25)
    x = np.linspace(-1.2, 1.2, 25)
    exact = np.log(np.cos(x)[:, None] / np.cos(x)[None, :])  # rows are y, columns x
    assert np.max(np.abs(sol.u - exact)) < 5e-3
    cr = musurf.closedness(sol)
    assert cr["max_d_alpha"] < 5e-2
    assert cr["max_d_gamma"] < 1e-2


def test_potential_and_reparam():
    d = musurf.make_builtin("mu", 3.0)
    grid = musurf.GridSpec.square(-1.0, 1.0, 21)
    sol = musurf.oracle_solution(d, grid, "affine", 0.0, 0.0, 0.0)
    pot = musurf.recover_potentials(sol)
    # flat oracle: E = (x^2 + y^2) / 2 up to the anchor gauge
    assert pot["bound_violations"] == 0
    assert pot["path_discrepancy"] < 1e-12
    rep = musurf.reparam_summary(sol)
    assert np.allclose(rep["det_dl"], rep["det_dl"][0, 0])
    assert rep["max_defect_dot"] < 1e-12


def test_decay_and_pipeline(tmp_path):
    d = musurf.make_builtin("mu", 3.0)
    fit = musurf.decay_fit(d)
    assert fit.slope == pytest.approx(-1.0, abs=0.1)
    cfg = {
        "density": {"kind": "minimal"},
        "grid": {"x0": -1.2, "y0": -1.2, "x1": 1.2, "y1": 1.2, "nx": 17, "ny": 17},
        "boundary": {"name": "scherk"},
        "stages": ["solve", "forms"],
        "outputs": str(tmp_path / "out"),
    }
    code, report = musurf.run_pipeline(json.dumps(cfg))
    assert code == 0
    rep = json.loads(report)
    assert rep["status"] == "ok"
    assert (tmp_path / "out" / "report.json").exists()
