import numpy as np
import pytest

from coamoeba.roots import residual_bound, solve_univariate, solve_univariate_batch


def _close_sets(a, b, tol=1e-9):
    a, b = list(a), list(b)
    for z in a:
        k = int(np.argmin([abs(z - w) for w in b]))
        assert abs(z - b.pop(k)) <= tol
    assert not b


def test_quadratic_examples():
    _close_sets(solve_univariate([1, 0, 1]), [1j, -1j])
    _close_sets(solve_univariate([1, -3, 2], degree=2), [1, 2])


def test_cube_roots_of_unity():
    r = solve_univariate([1, 0, 0, -1])
    assert np.allclose(np.abs(r), 1)
    d = np.abs(r[:, None] - r[None, :])[~np.eye(3, dtype=bool)]
    assert np.allclose(d, np.sqrt(3))


def test_degree_and_leading_coefficient_checks():
    with pytest.raises(ValueError):
        solve_univariate([0, 1, 1])
    with pytest.raises(ValueError):
        solve_univariate([1, 2], degree=3)
    with pytest.raises(ValueError):
        solve_univariate([3])


def test_multiple_roots_are_returned_with_multiplicity():
    r = solve_univariate(np.poly([2, 2, 2, -1]))
    assert len(r) == 4
    # a residual of 1e-8 only pins a triple root to about (1e-8)**(1/3)
    assert np.sum(np.abs(r - 2) < 1e-2) == 3
    assert abs(np.mean(r[np.abs(r - 2) < 1e-2]) - 2) < 1e-5


def test_residual_bound_on_random_polynomials():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        d = int(rng.integers(1, 13))
        c = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        c *= 10.0 ** rng.integers(-3, 4, size=d + 1)
        r = solve_univariate(c)
        assert len(r) == d
        bound = 1e-8 * np.abs(c).sum() * np.maximum(1.0, np.abs(r)) ** d
        assert np.all(np.abs(np.polyval(c, r)) <= bound)


def test_batch_flags_rows_individually():
    coeffs = np.array([[1, 0, -4], [1, 2, 1], [2, 0, 2]], dtype=complex)
    roots, ok = solve_univariate_batch(coeffs)
    assert ok.all() and roots.shape == (3, 2)
    assert np.all(residual_bound(coeffs, roots) >= 0)
