import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvsk.harness import erf_map, jump_scaling, sample_gaussian_nodes
from mvsk.interpolation import NodeSet
from mvsk.metrics import (
    DomainBox,
    fill_distance,
    regional_distances,
    rmse,
    separation_distance,
    unit_square,
)

SQRT_HALF_25 = 3.5355339059327378  # sqrt(25/2)


def test_domain_box_validation():
    with pytest.raises(ValueError, match="lower < upper"):
        DomainBox((0.0, 0.0), (0.0, 1.0))
    with pytest.raises(ValueError, match="resolution"):
        DomainBox((0.0,), (1.0,), resolution=1)
    with pytest.raises(ValueError, match="equal length"):
        DomainBox((0.0,), (1.0, 1.0))


def test_fill_distance_single_center_node():
    domain = unit_square(401)
    nodes = NodeSet(np.array([[0.0, 0.0]]))
    h = fill_distance(nodes, domain)
    spacing = 2.0 / 400
    assert abs(h - np.sqrt(2.0)) <= np.sqrt(2) * spacing


def test_fill_distance_two_corners():
    # farthest point from {(-1,-1), (1,1)} is (1,-1) or (-1,1), at distance 2
    domain = unit_square(401)
    nodes = NodeSet(np.array([[-1.0, -1.0], [1.0, 1.0]]))
    h = fill_distance(nodes, domain)
    spacing = 2.0 / 400
    assert abs(h - 2.0) <= 2 * spacing


def test_fill_distance_dense_grid_of_nodes():
    # nodes on a 21x21 grid: fill distance at most the node spacing
    axis = np.linspace(-1, 1, 21)
    xx, yy = np.meshgrid(axis, axis)
    nodes = NodeSet(np.column_stack([xx.ravel(), yy.ravel()]))
    domain = unit_square(100)
    h = fill_distance(nodes, domain)
    assert h <= 0.1  # node spacing

    # brute-force oracle over the same evaluation grid
    grid = domain.grid()
    dists = np.sqrt(((grid[:, None, :] - nodes.points[None, :, :]) ** 2).sum(-1))
    assert h == pytest.approx(float(np.max(np.min(dists, axis=1))), rel=1e-12)


def test_separation_distance_two_nodes():
    assert separation_distance(NodeSet(np.array([[0.0, 0.0], [2.0, 0.0]]))) == 1.0


def test_separation_distance_collinear():
    s = 0.37
    nodes = NodeSet(np.array([[0.0, 0.0], [s, 0.0], [2 * s, 0.0]]))
    assert separation_distance(nodes) == pytest.approx(s / 2, rel=1e-15)


def test_separation_distance_matches_bruteforce():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1, 1, size=(100, 2))
    nodes = NodeSet(pts)
    # independent double loop in reversed scan order
    best = np.inf
    for i in range(99, -1, -1):
        for j in range(i - 1, -1, -1):
            best = min(best, float(np.linalg.norm(pts[i] - pts[j])))
    assert separation_distance(nodes) == 0.5 * best


def test_separation_requires_two_nodes():
    with pytest.raises(ValueError):
        separation_distance(NodeSet(np.array([[0.0, 0.0]])))


def test_separation_definitional_bound():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1, 1, size=(30, 2))
    q = separation_distance(NodeSet(pts))
    for i in range(30):
        for j in range(i):
            assert q <= 0.5 * np.linalg.norm(pts[i] - pts[j]) + 1e-15


def test_monotonicity_under_node_insertion():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1, 1, size=(40, 2))
    domain = unit_square(60)
    prev_h, prev_q = np.inf, np.inf
    for n in (5, 10, 20, 40):
        nodes = NodeSet(pts[:n])
        h = fill_distance(nodes, domain)
        q = separation_distance(nodes)
        assert h <= prev_h + 1e-15
        assert q <= prev_q + 1e-15
        prev_h, prev_q = h, q


def test_regional_single_region_equals_global():
    from mvsk.scalings import CallbackPartition, PiecewiseConstantScaling

    rng = np.random.default_rng(4)
    nodes = NodeSet(rng.uniform(-1, 1, size=(25, 2)))
    domain = unit_square(80)
    whole = CallbackPartition(
        fn=lambda pts: np.zeros(pts.shape[:-1], dtype=int), n_regions=1
    )
    scaling = PiecewiseConstantScaling(whole, values=(1.0,))
    regional = regional_distances(nodes, domain, scaling)
    assert regional.fill_per_region == (fill_distance(nodes, domain),)
    assert regional.separation_per_region == (separation_distance(nodes),)
    assert regional.fill_global == fill_distance(nodes, domain)
    assert regional.separation_global == separation_distance(nodes)


def test_regional_empty_region_flagged():
    from mvsk.scalings import AxisThresholdPartition, PiecewiseConstantScaling

    nodes = NodeSet(np.array([[-0.5, 0.0], [-0.6, 0.2], [-0.4, -0.3]]))
    domain = unit_square(50)
    scaling = PiecewiseConstantScaling(
        AxisThresholdPartition(0, (0.0,)), values=(0.0, 1.0)
    )
    with pytest.warns(UserWarning, match="no nodes"):
        regional = regional_distances(nodes, domain, scaling)
    assert np.isinf(regional.fill_per_region[1])
    assert np.isnan(regional.separation_per_region[1])
    # global q excludes the empty region
    assert regional.separation_global == regional.separation_per_region[0]


def test_erf_map_improves_both_distances():
    # clustered nodes: the uniformizing map shrinks h and grows q
    domain = unit_square()
    nodes = sample_gaussian_nodes(400, seed=123, domain=domain)
    mapped = NodeSet(erf_map()(nodes.points))
    assert fill_distance(mapped, domain) < fill_distance(nodes, domain)
    assert separation_distance(mapped) > separation_distance(nodes)


def test_regional_consistent_with_scaling_partition():
    scaling = jump_scaling()
    nodes = sample_gaussian_nodes(150, seed=9)
    domain = unit_square(100)
    regional = regional_distances(nodes, domain, scaling)
    assert len(regional.fill_per_region) == 4
    assert regional.fill_global == max(regional.fill_per_region)


def test_rmse_examples():
    assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert rmse(np.zeros(4), np.ones(4)) == 1.0
    assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(SQRT_HALF_25, rel=1e-15)


def test_rmse_errors():
    with pytest.raises(ValueError, match="length mismatch"):
        rmse([1.0], [1.0, 2.0])
    with pytest.raises(ValueError, match="empty"):
        rmse([], [])


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30))
@settings(max_examples=50, deadline=None)
def test_rmse_nonnegative_and_zero_on_equal(vals):
    v = np.asarray(vals)
    assert rmse(v, v) == 0.0
    assert rmse(v, v + 1.0) == pytest.approx(1.0, rel=1e-12)
