import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cstarmod import (
    AlgebraElement,
    AlgebraShape,
    AModuleMap,
    CLinearMap,
    ModuleVector,
    ShapeMismatchError,
    ToleranceConfig,
    alg_norm,
    inner_product,
    is_positive,
    modulus,
    modulus_squared,
    polarization_gram,
    vector_norm,
)
from cstarmod.module import a_linearity_residual, right_action, theta_map

from conftest import seeds, shapes

ks = st.integers(min_value=1, max_value=3)


def direct_inner(x, y):
    """Entrywise sum of x_i^* y_i (oracle)."""
    total = AlgebraElement.zeros(x.shape)
    for a, b in zip(x.entries, y.entries):
        total = total + a.H @ b
    return total


@given(shapes, ks, seeds)
def test_inner_product_matches_entrywise_sum(shape, k, seed):
    rng = np.random.default_rng(seed)
    x, y = ModuleVector.random(shape, k, rng), ModuleVector.random(shape, k, rng)
    assert inner_product(x, y).allclose(direct_inner(x, y), atol=1e-12)


@given(shapes, ks, seeds)
def test_inner_product_axioms(shape, k, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (ModuleVector.random(shape, k, rng) for _ in range(3))
    a = AlgebraElement.random(shape, rng)
    alpha = complex(*rng.standard_normal(2))
    tol = 1e-10 * (1 + vector_norm(x) * vector_norm(y) * alg_norm(a))
    # linear in the second slot, adjoint-symmetric, positive
    assert inner_product(x, y * alpha + z).allclose(
        inner_product(x, y) * alpha + inner_product(x, z), atol=tol)
    assert inner_product(x, y @ a).allclose(inner_product(x, y) @ a, atol=tol)
    assert inner_product(y, x).allclose(inner_product(x, y).H, atol=tol)
    assert is_positive(inner_product(x, x))


def test_zero_vector_has_zero_inner_square():
    x = ModuleVector.zeros(AlgebraShape([2]), 2)
    assert alg_norm(inner_product(x, x)) == 0.0
    assert vector_norm(x) == 0.0


@given(shapes, ks, seeds)
def test_modulus_squares_to_inner_square(shape, k, seed):
    x = ModuleVector.random(shape, k, np.random.default_rng(seed))
    m = modulus(x)
    assert is_positive(m)
    assert (m @ m).allclose(inner_product(x, x), atol=1e-10 * vector_norm(x) ** 2)
    assert modulus_squared(x).allclose(inner_product(x, x), atol=1e-12 * vector_norm(x) ** 2)


@given(shapes, ks, seeds)
def test_norm_and_cauchy_schwarz(shape, k, seed):
    rng = np.random.default_rng(seed)
    x, y = ModuleVector.random(shape, k, rng), ModuleVector.random(shape, k, rng)
    a = AlgebraElement.random(shape, rng)
    assert vector_norm(x) == pytest.approx(np.sqrt(alg_norm(inner_product(x, x))), rel=1e-10)
    assert alg_norm(inner_product(x, y)) <= vector_norm(x) * vector_norm(y) * (1 + 1e-10)
    assert vector_norm(x @ a) <= vector_norm(x) * alg_norm(a) * (1 + 1e-10)
    assert vector_norm(x + y) <= (vector_norm(x) + vector_norm(y)) * (1 + 1e-12)


def test_right_action_is_entrywise():
    shape = AlgebraShape([2])
    rng = np.random.default_rng(0)
    x = ModuleVector.random(shape, 2, rng)
    a = AlgebraElement.random(shape, rng)
    xa = right_action(x, a)
    for xi, yi in zip(x.entries, xa.entries):
        assert (xi @ a).allclose(yi, atol=1e-12)


def test_theta_map():
    shape = AlgebraShape([1, 2])
    rng = np.random.default_rng(1)
    x, y, z = (ModuleVector.random(shape, 2, rng) for _ in range(3))
    assert theta_map(x, y, z).allclose(x @ inner_product(y, z), atol=1e-12)


def test_vector_shape_errors():
    with pytest.raises(ShapeMismatchError):
        ModuleVector(AlgebraShape([2]), [np.zeros((2, 3, 3))])
    x = ModuleVector.zeros(AlgebraShape([2]), 2)
    with pytest.raises(ShapeMismatchError):
        inner_product(x, ModuleVector.zeros(AlgebraShape([2]), 3))


def test_flatten_round_trip():
    shape = AlgebraShape([1, 2])
    x = ModuleVector.random(shape, 3, np.random.default_rng(2))
    assert ModuleVector.unflatten(shape, 3, x.flatten()).allclose(x, atol=0)


@given(shapes, ks, seeds)
def test_module_maps_are_a_linear(shape, k, seed):
    rng = np.random.default_rng(seed)
    T = AModuleMap.random(shape, k, k, rng)
    assert a_linearity_residual(T, shape, k, rng, samples=5) < 1e-12
    assert a_linearity_residual(T.to_clinear(), shape, k, rng, samples=5) < 1e-12


def test_dense_map_is_generally_not_a_linear():
    shape = AlgebraShape([2])
    rng = np.random.default_rng(3)
    T = CLinearMap.random(shape, 2, 2, rng)
    assert a_linearity_residual(T, shape, 2, rng) > 1e-3


@given(shapes, ks, seeds)
def test_unitary_maps_preserve_inner_products(shape, k, seed):
    rng = np.random.default_rng(seed)
    U = AModuleMap.random_unitary(shape, k, rng)
    x, y = ModuleVector.random(shape, k, rng), ModuleVector.random(shape, k, rng)
    assert inner_product(U(x), U(y)).allclose(inner_product(x, y), atol=1e-10 * (1 + vector_norm(x) * vector_norm(y)))


def test_module_map_constructors():
    shape = AlgebraShape([1, 1])
    x = ModuleVector.random(shape, 3, np.random.default_rng(4))
    assert AModuleMap.identity(shape, 3)(x).allclose(x, atol=0)
    P = AModuleMap.permutation(shape, [2, 0, 1])
    assert P(x).entries[0].allclose(x.entries[2], atol=0)
    a = AlgebraElement(shape, [[[2.0]], [[3.0]]])
    D = AModuleMap.diagonal(shape, 3, a)
    assert D(x).entries[1].allclose(a @ x.entries[1], atol=1e-14)


@given(shapes, st.integers(1, 2), seeds)
def test_polarization_recovers_inner_product(shape, k, seed):
    # oracle: the inner product of Tx and Ty formed directly
    rng = np.random.default_rng(seed)
    T = AModuleMap.random(shape, k, k, rng)
    x, y = ModuleVector.random(shape, k, rng), ModuleVector.random(shape, k, rng)
    direct = direct_inner(T(x), T(y))
    scale = 1 + vector_norm(T(x)) * vector_norm(T(y))
    assert polarization_gram(T, x, y).allclose(direct, atol=1e-10 * scale)


def test_polarization_with_identity():
    shape = AlgebraShape([2])
    rng = np.random.default_rng(5)
    x, y = ModuleVector.random(shape, 2, rng), ModuleVector.random(shape, 2, rng)
    got = polarization_gram(lambda v: v, x, y)
    assert got.allclose(inner_product(x, y), atol=1e-12 * (1 + vector_norm(x) * vector_norm(y)))


def test_tolerance_config_validation():
    assert ToleranceConfig().eq_tol == 1e-8
    with pytest.raises(ValueError):
        ToleranceConfig(eq_tol=-1.0)
    with pytest.raises(ValueError):
        ToleranceConfig(psd_tol=float("nan"))
    assert ToleranceConfig(opt_tol=1e-6).to_dict()["opt_tol"] == 1e-6
