import numpy as np
import pytest

from mvsk.harness import jump_scaling, target_f, variant_map
from mvsk.interpolation import (
    IllConditionedError,
    NodeSet,
    NumericalBreakdownError,
    assemble_gram,
    evaluate,
    fit,
    pairwise_distances,
    power_function,
)
from mvsk.kernels import GAUSSIAN, MATERN_C6, PROFILES, WENDLAND_C0, RadialKernel
from mvsk.scalings import (
    AugmentedMap,
    CallbackMap,
    ConstantScaling,
    ErfUniformizeMap,
    IdentityMap,
    InjectivityError,
)

MATERN_AT_ONE = 13.611539323343366  # 37/e

TRIVIAL = AugmentedMap.trivial()


def _random_map(kind):
    if kind == "trivial":
        return TRIVIAL
    if kind == "erf":
        return AugmentedMap(ErfUniformizeMap(variance=0.1), ConstantScaling(0.0))
    if kind == "vsdk":
        return AugmentedMap(IdentityMap(), jump_scaling())
    return variant_map("mvsdk")


MAP_KINDS = ("trivial", "erf", "vsdk", "mvsdk")


# ---------------------------------------------------------------------------
# NodeSet
# ---------------------------------------------------------------------------


def test_nodeset_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        NodeSet(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]))


def test_nodeset_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        NodeSet(np.zeros((0, 2)))
    with pytest.raises(ValueError, match="finite"):
        NodeSet(np.array([[0.0, np.nan]]))


def test_nodeset_promotes_1d():
    ns = NodeSet(np.array([0.0, 1.0, 2.0]))
    assert ns.points.shape == (3, 1)
    assert ns.dim == 1 and ns.n == 3


# ---------------------------------------------------------------------------
# Gram assembly
# ---------------------------------------------------------------------------


def test_gram_single_node():
    k = RadialKernel(MATERN_C6, 1.0)
    gram = assemble_gram(k, TRIVIAL, NodeSet(np.array([[0.3, 0.4]])))
    np.testing.assert_array_equal(gram, [[15.0]])


def test_gram_wendland_beyond_support():
    k = RadialKernel(WENDLAND_C0, 1.0)
    gram = assemble_gram(k, TRIVIAL, NodeSet(np.array([[0.0, 0.0], [2.0, 0.0]])))
    np.testing.assert_array_equal(gram, np.eye(2))


def test_gram_matern_pair():
    k = RadialKernel(MATERN_C6, 1.0)
    gram = assemble_gram(k, TRIVIAL, NodeSet(np.array([[0.0, 0.0], [1.0, 0.0]])))
    expected = np.array([[15.0, MATERN_AT_ONE], [MATERN_AT_ONE, 15.0]])
    np.testing.assert_allclose(gram, expected, rtol=1e-15)


def test_gram_exactly_symmetric():
    rng = np.random.default_rng(2)
    nodes = NodeSet(rng.uniform(-1, 1, size=(40, 2)))
    gram = assemble_gram(RadialKernel(GAUSSIAN, 2.0), _random_map("mvsdk"), nodes)
    assert np.array_equal(gram, gram.T)


def test_mvsk_gram_equals_augmented_classical_gram():
    # interpolating with the augmented map is literally classical
    # interpolation on the augmented node set, entrywise exactly
    rng = np.random.default_rng(3)
    nodes = NodeSet(rng.uniform(-1, 1, size=(25, 2)))
    amap = _random_map("mvsdk")
    kern = RadialKernel(MATERN_C6, 1.2)
    gram = assemble_gram(kern, amap, nodes)
    gram_aug = assemble_gram(kern, TRIVIAL, NodeSet(amap.augment(nodes.points)))
    assert np.array_equal(gram, gram_aug)


# ---------------------------------------------------------------------------
# fit / evaluate
# ---------------------------------------------------------------------------


def test_fit_single_node():
    k = RadialKernel(MATERN_C6, 1.0)
    interp = fit(k, TRIVIAL, NodeSet(np.array([[0.0, 0.0]])), [7.5])
    np.testing.assert_allclose(interp.coefficients, [7.5 / 15.0], rtol=1e-15)


def test_fit_diagonal_gram():
    # all pairwise distances beyond the Wendland support: K = I
    k = RadialKernel(WENDLAND_C0, 1.0)
    nodes = NodeSet(np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]))
    values = np.array([2.0, -1.0, 0.5])
    interp = fit(k, TRIVIAL, nodes, values)
    np.testing.assert_allclose(interp.coefficients, values / 1.0, rtol=1e-15)


def test_fit_residual_small():
    rng = np.random.default_rng(4)
    nodes = NodeSet(rng.uniform(-1, 1, size=(3, 2)))
    values = rng.normal(size=3)
    interp = fit(RadialKernel(MATERN_C6, 1.0), TRIVIAL, nodes, values)
    gram = assemble_gram(RadialKernel(MATERN_C6, 1.0), TRIVIAL, nodes)
    assert np.max(np.abs(gram @ interp.coefficients - values)) <= 1e-10


def test_fit_value_length_mismatch():
    nodes = NodeSet(np.array([[0.0, 0.0], [1.0, 0.0]]))
    with pytest.raises(ValueError, match="values"):
        fit(RadialKernel(MATERN_C6, 1.0), TRIVIAL, nodes, [1.0])


def test_evaluate_at_nodes_reproduces_values():
    # the erf map expects clustered input (it spreads a normal sample toward
    # uniform); feeding it uniform nodes piles them onto the boundary instead
    from mvsk.harness import sample_gaussian_nodes

    rng = np.random.default_rng(5)
    for i, kind in enumerate(MAP_KINDS):
        if kind in ("erf", "mvsdk"):
            nodes = sample_gaussian_nodes(60, seed=50 + i)
        else:
            nodes = NodeSet(rng.uniform(-1, 1, size=(60, 2)))
        values = target_f(nodes.points)
        interp = fit(RadialKernel(MATERN_C6, 3.0), _random_map(kind), nodes, values)
        if interp.diagnostics.condition_estimate > 1e12:
            continue
        err = np.max(np.abs(evaluate(interp, nodes.points) - values))
        assert err <= 1e-8 * (1 + np.max(np.abs(values)))


def test_evaluate_single_node_formula():
    # c = 1/15, queried at unit distance: (1/15) * 37/e
    interp = fit(
        RadialKernel(MATERN_C6, 1.0), TRIVIAL, NodeSet(np.array([[0.0, 0.0]])), [1.0]
    )
    got = evaluate(interp, np.array([1.0, 0.0]))
    assert got == pytest.approx(MATERN_AT_ONE / 15.0, rel=1e-14)


def test_evaluate_constant_data_matches_dense_oracle():
    # interpolant of constant data, checked against an independent dense solve
    rng = np.random.default_rng(6)
    nodes = NodeSet(rng.uniform(-1, 1, size=(25, 2)))
    gamma = 2.5
    values = np.full(25, gamma)
    kern = RadialKernel(GAUSSIAN, 2.0)
    interp = fit(kern, TRIVIAL, nodes, values)
    queries = rng.uniform(-1, 1, size=(40, 2))
    got = evaluate(interp, queries)

    gram = np.array(
        [
            [np.exp(-(2.0**2) * np.sum((a - b) ** 2)) for b in nodes.points]
            for a in nodes.points
        ]
    )
    coeff = np.linalg.solve(gram, values)
    cross = np.array(
        [
            [np.exp(-(2.0**2) * np.sum((q - b) ** 2)) for b in nodes.points]
            for q in queries
        ]
    )
    np.testing.assert_allclose(got, cross @ coeff, atol=1e-9)


def test_fit_multi_column_values():
    rng = np.random.default_rng(7)
    nodes = NodeSet(rng.uniform(-1, 1, size=(20, 2)))
    values = rng.normal(size=(20, 2))
    interp = fit(RadialKernel(MATERN_C6, 2.0), TRIVIAL, nodes, values)
    out = evaluate(interp, nodes.points)
    assert out.shape == (20, 2)
    assert np.max(np.abs(out - values)) <= 1e-8


def test_fit_coefficients_identical_on_augmented_nodes():
    rng = np.random.default_rng(8)
    nodes = NodeSet(rng.uniform(-1, 1, size=(40, 2)))
    values = target_f(nodes.points)
    amap = _random_map("mvsdk")
    kern = RadialKernel(MATERN_C6, 1.5)
    direct = fit(kern, amap, nodes, values)
    lifted = fit(kern, TRIVIAL, NodeSet(amap.augment(nodes.points)), values)
    scale = np.max(np.abs(lifted.coefficients))
    assert np.max(np.abs(direct.coefficients - lifted.coefficients)) <= 1e-13 * scale


def test_fit_ridge_changes_solution():
    rng = np.random.default_rng(9)
    nodes = NodeSet(rng.uniform(-1, 1, size=(15, 2)))
    values = rng.normal(size=15)
    pure = fit(RadialKernel(GAUSSIAN, 2.0), TRIVIAL, nodes, values)
    ridged = fit(RadialKernel(GAUSSIAN, 2.0), TRIVIAL, nodes, values, ridge=1e-3)
    assert not np.allclose(pure.coefficients, ridged.coefficients)


def test_fit_ill_conditioned_raises_with_estimate():
    # near-coincident nodes with a smooth kernel: condition blows past 1e16
    nodes = NodeSet(np.array([[0.0, 0.0], [1e-9, 0.0], [0.0, 1e-9], [1.0, 1.0]]))
    with pytest.raises(IllConditionedError) as info:
        fit(RadialKernel(GAUSSIAN, 1.0), TRIVIAL, nodes, np.ones(4))
    assert info.value.condition_estimate > 1e16


def test_fit_noninjective_map_raises():
    collapse = CallbackMap(
        lambda pts: np.column_stack([np.zeros(len(pts)), pts[:, 1]])
    )
    amap = AugmentedMap(collapse, ConstantScaling(0.0))
    nodes = NodeSet(np.array([[0.0, 0.5], [1.0, 0.5], [0.0, -0.5]]))
    with pytest.raises(InjectivityError):
        fit(RadialKernel(MATERN_C6, 1.0), amap, nodes, np.ones(3))


# ---------------------------------------------------------------------------
# power function
# ---------------------------------------------------------------------------


def test_power_function_zero_at_nodes():
    rng = np.random.default_rng(10)
    nodes = NodeSet(rng.uniform(-1, 1, size=(8, 2)))
    p = power_function(RadialKernel(MATERN_C6, 2.0), TRIVIAL, nodes, nodes.points)
    assert np.max(p) <= 1e-6


def test_power_function_beyond_support():
    # no interaction with any node: P = sqrt(phi(0)) = 1 for Wendland
    nodes = NodeSet(np.array([[0.0, 0.0], [0.5, 0.0]]))
    p = power_function(
        RadialKernel(WENDLAND_C0, 1.0), TRIVIAL, nodes, np.array([[10.0, 10.0]])
    )
    assert p[0] == pytest.approx(1.0, rel=1e-15)


def test_power_function_matches_bruteforce():
    rng = np.random.default_rng(11)
    nodes = NodeSet(rng.uniform(-1, 1, size=(5, 2)))
    kern = RadialKernel(MATERN_C6, 2.0)
    queries = rng.uniform(-1, 1, size=(10, 2))
    p = power_function(kern, TRIVIAL, nodes, queries)

    # independent dense evaluation of kappa(x,x) - k(x)^T K^{-1} k(x)
    def phi(r):
        t = 2.0 * r
        return np.exp(-t) * (15 + 15 * t + 6 * t**2 + t**3)

    gram = phi(pairwise_distances(nodes.points))
    for j, q in enumerate(queries):
        kvec = phi(np.linalg.norm(nodes.points - q, axis=1))
        expected = np.sqrt(phi(0.0) - kvec @ np.linalg.solve(gram, kvec))
        assert p[j] == pytest.approx(expected, rel=1e-8, abs=1e-10)


def test_power_function_error_bound_for_kernel_translate():
    # |f(x) - R(x)| <= P(x) * sqrt(kappa(z, z)) for f = kappa(., z)
    rng = np.random.default_rng(12)
    nodes = NodeSet(rng.uniform(-1, 1, size=(12, 2)))
    kern = RadialKernel(MATERN_C6, 2.0)
    for amap in (TRIVIAL, _random_map("vsdk")):
        z = rng.uniform(-1, 1, size=2)
        from mvsk.scalings import mvsk_eval

        f = mvsk_eval(kern, amap, nodes.points, z)
        interp = fit(kern, amap, nodes, f)
        queries = rng.uniform(-1, 1, size=(30, 2))
        predicted = evaluate(interp, queries)
        actual = mvsk_eval(kern, amap, queries, z)
        p = power_function(kern, amap, nodes, queries)
        norm_f = np.sqrt(mvsk_eval(kern, amap, z, z))
        assert np.all(np.abs(actual - predicted) <= p * norm_f + 1e-8)


def test_power_function_breakdown_error():
    # force a strongly negative radicand via a huge condition number
    nodes = NodeSet(np.concatenate([
        np.array([[0.0, 0.0]]),
        np.array([[0.0, 0.0]]) + 1e-8 * np.random.default_rng(1).normal(size=(6, 2)),
        np.array([[1.0, 1.0]]),
    ]))
    with pytest.raises((NumericalBreakdownError, IllConditionedError)):
        power_function(
            RadialKernel(GAUSSIAN, 0.5), TRIVIAL, nodes, np.array([[0.5, 0.5]])
        )


# ---------------------------------------------------------------------------
# SPD property
# ---------------------------------------------------------------------------


def test_gram_spd_across_kernels_and_maps():
    rng = np.random.default_rng(13)
    for i in range(50):
        n = int(rng.integers(3, 31))
        nodes = NodeSet(rng.uniform(-1, 1, size=(n, 2)))
        kern = RadialKernel(PROFILES[i % 3], float(rng.uniform(0.5, 8.0)))
        amap = _random_map(MAP_KINDS[i % 4])
        gram = assemble_gram(kern, amap, nodes)
        assert np.linalg.eigvalsh(gram)[0] > 0
