import math

import numpy as np
import pytest

from eigmatch.core import (
    AUGrid,
    IntervalUnion,
    RealMultiset,
    Rect,
    count_grid_in_interval,
    grid_deviation,
    make_uniform_grid,
    restrict_indices,
)

from property_suites import count_bound_suite


def unit_interval():
    return Rect(np.array([0.0]), np.array([1.0]))


def test_rect_validation():
    with pytest.raises(ValueError):
        Rect(np.array([1.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        Rect(np.array([0.0, 0.0]), np.array([1.0]))
    r = Rect(np.array([0.0, -1.0]), np.array([2.0, 1.0]))
    assert r.d == 2
    assert np.allclose(r.lengths, [2.0, 2.0])


def test_uniform_grid_1d_quarters():
    g = make_uniform_grid(Rect(np.array([0.0]), np.array([math.pi])), (4,))
    assert np.allclose(g.points[:, 0], [math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi])
    assert grid_deviation(g) == 0.0


def test_uniform_grid_2d_lexicographic():
    g = make_uniform_grid(Rect(np.array([0.0, 0.0]), np.array([1.0, math.pi])), (2, 2))
    expected = np.array(
        [[0.5, math.pi / 2], [0.5, math.pi], [1.0, math.pi / 2], [1.0, math.pi]]
    )
    assert np.allclose(g.points, expected)


def test_uniform_grid_endpoint_exact():
    g = make_uniform_grid(unit_interval(), (100,))
    assert g.points[-1, 0] == 1.0


def test_uniform_grid_rejects_bad_dims():
    with pytest.raises(ValueError):
        make_uniform_grid(unit_interval(), (0,))
    with pytest.raises(ValueError):
        make_uniform_grid(unit_interval(), (-3,))


def test_grid_deviation_single_perturbation():
    g = make_uniform_grid(unit_interval(), (5,))
    pts = g.points.copy()
    pts[2, 0] += 0.01
    assert grid_deviation(AUGrid(rect=g.rect, dims=g.dims, points=pts)) == pytest.approx(0.01)


def test_grid_deviation_shifted_angles():
    # points i*pi/9 against the uniform grid i*pi/8: the max over i of
    # i*pi/72 is attained at i = 8, giving pi/9
    n = 8
    pts = np.arange(1, n + 1) * math.pi / (n + 1)
    g = AUGrid(rect=Rect(np.array([0.0]), np.array([math.pi])), dims=(n,),
               points=pts.reshape(-1, 1))
    assert grid_deviation(g) == pytest.approx(math.pi / 9, abs=1e-14)


def test_restrict_indices_whole_domain():
    g = make_uniform_grid(unit_interval(), (4,))
    assert restrict_indices(g, None) == [(1,), (2,), (3,), (4,)]


def test_restrict_indices_half_interval():
    g = make_uniform_grid(unit_interval(), (4,))
    idx = restrict_indices(g, lambda x: x <= 0.5)
    assert idx == [(1,), (2,)]


def test_restrict_indices_disk_quadrant_brute_force():
    rect = Rect(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    g = make_uniform_grid(rect, (3, 3))
    inside = lambda x, y: x**2 + y**2 <= 1.0
    idx = restrict_indices(g, inside)
    brute = [
        tuple(mi)
        for mi, pt in zip(g.multi_indices(), g.points)
        if pt[0] ** 2 + pt[1] ** 2 <= 1.0
    ]
    assert [tuple(map(int, mi)) for mi in brute] == idx
    assert idx == [(1, 1), (1, 2), (2, 1), (2, 2)]


@pytest.mark.parametrize("dims", [(7,), (4, 5), (3, 4, 5), (20, 20, 20)])
def test_flatten_unflatten_identity(dims):
    g = make_uniform_grid(Rect(np.zeros(len(dims)), np.ones(len(dims))), dims)
    for flat in range(0, g.size, max(1, g.size // 257)):
        mi = g.unflatten_index(flat)
        assert g.flatten_index(mi) == flat
    # row order of multi_indices agrees with the flat order
    mis = g.multi_indices()
    assert g.flatten_index(tuple(mis[0])) == 0
    assert g.flatten_index(tuple(mis[-1])) == g.size - 1


def test_count_grid_in_interval_examples():
    assert count_grid_in_interval(0.0, 1.0, 0.0, 2.5) == 3
    assert count_grid_in_interval(0.3, 0.1, 0.0, 1.0) == 11
    with pytest.raises(ValueError):
        count_grid_in_interval(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        count_grid_in_interval(0.0, -1.0, 0.0, 1.0)


def test_count_grid_bound_property():
    count_bound_suite(trials=1000)


def test_real_multiset_validation():
    with pytest.raises(ValueError):
        RealMultiset(np.array([]))
    with pytest.raises(ValueError):
        RealMultiset(np.array([1.0, np.inf]))
    ms = RealMultiset([3.0, 1.0, 2.0])
    assert len(ms) == 3
    assert np.allclose(ms.sorted_values(), [1.0, 2.0, 3.0])
    assert np.allclose(ms.values, [3.0, 1.0, 2.0])  # insertion order kept


def test_interval_union():
    u = IntervalUnion(((0.0, 1.0), (2.0, 3.0)))
    assert u.contains(0.5) and u.contains(1.0) and not u.contains(1.5)
    assert np.array_equal(u.contains(np.array([0.0, 1.7, 2.2])), [True, False, True])
    assert u.lo == 0.0 and u.hi == 3.0
    merged = u.expand(0.6)
    assert merged.intervals == ((-0.6, 3.6),)
    with pytest.raises(ValueError):
        IntervalUnion(((0.0, 1.0), (0.5, 2.0)))
    with pytest.raises(ValueError):
        IntervalUnion(((1.0, 0.0),))
    assert IntervalUnion.from_pairs([(2.0, 3.0), (0.0, 1.0), (0.5, 1.5)]).intervals == (
        (0.0, 1.5),
        (2.0, 3.0),
    )


def test_matrix_symbol_rejects_non_hermitian_values():
    from eigmatch.core import MatrixSymbol

    sym = MatrixSymbol(
        interval=(0.0, 1.0),
        k=2,
        eval=lambda t: np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
    )
    with pytest.raises(ValueError):
        sym.branch_values(0.5)


def test_matrix_symbol_branches_ascending():
    from eigmatch.core import MatrixSymbol

    sym = MatrixSymbol(
        interval=(0.0, 1.0),
        k=2,
        eval=lambda t: np.array([[2.0, 1.0], [1.0, 0.0]], dtype=complex),
    )
    b = sym.branch_samples([0.1, 0.9])
    assert b.shape == (2, 2)
    assert np.all(np.diff(b, axis=1) >= 0)
