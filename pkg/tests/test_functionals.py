import numpy as np
import pytest
from scipy.linalg import eigh

from arwflow.errors import DegenerateMetric, OutsideCone
from arwflow.functionals import CurvatureFunctional, principal_curvatures


def random_spd(rng):
    a = rng.normal(size=(2, 2))
    return a @ a.T + 0.5 * np.eye(2)


def random_sym(rng):
    a = rng.normal(size=(2, 2))
    return 0.5 * (a + a.T)


@pytest.mark.parametrize("kind", ["mean", "gauss_root"])
def test_normalization_on_the_unit_point(kind):
    for n in (1, 2):
        F = CurvatureFunctional(kind=kind, n=n)
        assert abs(F.evaluate(np.ones((1, n)))[0] - n) < 1e-15


def test_point_values():
    kappa = np.array([[2.0, 8.0]])
    assert CurvatureFunctional("mean", 2).evaluate(kappa)[0] == 10.0
    # 2 * sqrt(2 * 8) = 8
    assert abs(CurvatureFunctional("gauss_root", 2).evaluate(kappa)[0] - 8.0) < 1e-14


@pytest.mark.parametrize("kind", ["mean", "gauss_root"])
@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_degree_one_homogeneity(kind, lam, rng):
    F = CurvatureFunctional(kind=kind, n=2)
    kappa = rng.uniform(0.2, 4.0, size=(50, 2))
    assert np.max(np.abs(F.evaluate(lam * kappa) - lam * F.evaluate(kappa))) < 1e-12


def test_gauss_root_below_mean(rng):
    """Arithmetic-geometric mean inequality, equality only on umbilic points."""
    kappa = rng.uniform(0.1, 5.0, size=(200, 2))
    mean = CurvatureFunctional("mean", 2).evaluate(kappa)
    gr = CurvatureFunctional("gauss_root", 2).evaluate(kappa)
    assert np.all(gr <= mean + 1e-13)
    equal = np.abs(gr - mean) < 1e-12
    umbilic = np.abs(kappa[:, 0] - kappa[:, 1]) < 1e-12
    assert np.array_equal(equal, umbilic)


@pytest.mark.parametrize("kind", ["mean", "gauss_root"])
def test_monotone_in_each_curvature(kind, rng):
    F = CurvatureFunctional(kind=kind, n=2)
    kappa = rng.uniform(0.3, 2.0, size=(40, 2))
    for axis in (0, 1):
        bumped = kappa.copy()
        bumped[:, axis] += 1e-4
        assert np.all(F.evaluate(bumped) > F.evaluate(kappa))


def test_gauss_root_cone_enforced():
    F = CurvatureFunctional("gauss_root", 2)
    with pytest.raises(OutsideCone):
        F.evaluate(np.array([[1.0, -0.5]]))
    with pytest.raises(OutsideCone):
        F.evaluate(np.array([[0.0, 1.0]]))
    # the mean functional is defined on the full space
    assert CurvatureFunctional("mean", 2).evaluate(np.array([[1.0, -0.5]]))[0] == 0.5


def test_principal_curvatures_of_multiples_of_g(rng):
    g = random_spd(rng)[None]
    kappa = principal_curvatures(2.5 * g, g)
    # repeated roots of the characteristic polynomial are accurate to sqrt(eps)
    assert np.max(np.abs(kappa - 2.5)) < 1e-6
    assert abs(np.sum(kappa) - 5.0) < 1e-13  # the trace is still exact


def test_principal_curvatures_diagonal_case():
    g = np.eye(2)[None]
    h = np.diag([1.0, 3.0])[None]
    kappa = principal_curvatures(h, g)
    assert np.max(np.abs(kappa - np.array([1.0, 3.0]))) < 1e-14


def test_principal_curvatures_match_generalized_eigensolver(rng):
    for _ in range(40):
        g = random_spd(rng)
        h = random_sym(rng)
        kappa = principal_curvatures(h[None], g[None])[0]
        ref = eigh(h, g, eigvals_only=True)
        assert np.max(np.abs(np.sort(kappa) - ref)) < 1e-12
    # output is sorted ascending
    assert np.all(kappa[0] <= kappa[1])


def test_principal_curvatures_n1():
    g = np.full((4, 1, 1), 2.0)
    h = np.full((4, 1, 1), 3.0)
    kappa = principal_curvatures(h, g)
    assert kappa.shape == (4, 1)
    assert np.max(np.abs(kappa - 1.5)) < 1e-15


def test_principal_curvatures_reject_indefinite_metric():
    g = np.diag([1.0, -1.0])[None]
    with pytest.raises(DegenerateMetric):
        principal_curvatures(np.eye(2)[None], g)


def test_constructor_validation():
    with pytest.raises(ValueError):
        CurvatureFunctional("scalar", 2)
    with pytest.raises(ValueError):
        CurvatureFunctional("mean", 3)
    with pytest.raises(ValueError):
        CurvatureFunctional("mean", 2).evaluate(np.ones((3, 1)))
