import numpy as np
import pytest

import simplicone as sc


def test_identity_projection():
    p = sc.project(np.eye(2), np.array([1.0, -2.0]))
    np.testing.assert_allclose(p, [1.0, 0.0], atol=1e-14)


def test_cone_spectra():
    cone = sc.Cone(np.array([[1.2]]))
    assert cone.gram_norm_dev == pytest.approx(0.44)
    assert cone.contraction_c == pytest.approx(0.44 / 2.44)


def test_singular_matrix_raises():
    with pytest.raises(sc.SimpliconeError, match="singular matrix"):
        sc.Cone(np.array([[1.0, 2.0], [2.0, 4.0]]))


@pytest.mark.parametrize("solver", ["picard1", "picard2", "ssnewton", "oracle"])
def test_solvers_agree_on_generated_instance(solver):
    inst = sc.gen_instance("conforming", 6, seed=3)
    report = sc.solve(inst["cone"], inst["z"], solver=solver, tol=1e-12)
    assert report["status"] == "converged"
    np.testing.assert_allclose(report["solution"], inst["u"], rtol=1e-8)
    cert = sc.certify(inst["z"], report["solution"], inst["cone"])
    assert cert["accepted"]


def test_guard_reports_not_applicable():
    cone = sc.Cone(sc.monotone_generator(4))
    report = sc.solve(cone, np.ones(4), solver="picard1")
    assert report["status"] == "not_applicable"


def test_monotone_fast_path_matches_dense():
    z = np.linspace(-1.0, 1.0, 30)
    fast = sc.picard2_monotone(z, tol=1e-13)
    dense = sc.solve(sc.Cone(sc.monotone_generator(30)), z, tol=1e-13)
    np.testing.assert_allclose(fast["solution"], dense["solution"], rtol=1e-9)
    assert sc.monotone_eigenvalues(2) == pytest.approx([2.6180339887, 0.3819660113])


def test_monotone_nonneg_projection_is_ordered():
    p = sc.project_monotone_nonneg(np.array([0.3, 1.0, -0.5, 0.2]))
    assert np.all(np.diff(p) <= 1e-9)
    assert p[-1] >= -1e-9


def test_known_stop_requires_solution():
    with pytest.raises(sc.SimpliconeError):
        sc.solve(sc.Cone(np.eye(2)), np.ones(2), stop="known")
