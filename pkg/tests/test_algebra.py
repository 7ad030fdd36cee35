import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from cstarmod import (
    AlgebraElement,
    AlgebraShape,
    NotInvertible,
    ShapeMismatchError,
    State,
    alg_mul,
    alg_norm,
    characters,
    is_invertible,
    is_positive,
    sqrt_positive,
    try_inverse,
)
from cstarmod.algebra import min_singular

from conftest import block_diag_matrix, seeds, shapes


def test_shape_validation():
    assert AlgebraShape(2).block_dims == (2,)
    assert AlgebraShape([1, 1]).is_abelian
    assert not AlgebraShape([1, 2]).is_abelian
    assert AlgebraShape([2, 3]).dim == 13
    with pytest.raises(ValueError):
        AlgebraShape([])
    with pytest.raises(ValueError):
        AlgebraShape([2, 0])


def test_element_rejects_wrong_blocks():
    with pytest.raises(ShapeMismatchError):
        AlgebraElement(AlgebraShape([2]), [np.eye(3)])
    with pytest.raises(ShapeMismatchError):
        AlgebraElement(AlgebraShape([1, 1]), [np.eye(1)])


def test_elements_are_immutable():
    a = AlgebraElement.identity(AlgebraShape([2]))
    with pytest.raises(AttributeError):
        a.blocks = ()
    with pytest.raises(ValueError):
        a.blocks[0][0, 0] = 5


def test_mixed_shapes_rejected():
    a = AlgebraElement.identity(AlgebraShape([2]))
    b = AlgebraElement.identity(AlgebraShape([1, 1]))
    with pytest.raises(ShapeMismatchError):
        alg_mul(a, b)


@given(shapes, seeds)
def test_product_matches_dense_block_product(shape, seed):
    rng = np.random.default_rng(seed)
    a, b = AlgebraElement.random(shape, rng), AlgebraElement.random(shape, rng)
    dense = block_diag_matrix(a) @ block_diag_matrix(b)
    assert np.allclose(block_diag_matrix(alg_mul(a, b)), dense)


@given(shapes, seeds)
def test_norm_is_largest_block_singular_value(shape, seed):
    rng = np.random.default_rng(seed)
    a = AlgebraElement.random(shape, rng)
    m = block_diag_matrix(a)
    # independent route: top eigenvalue of m^* m by a plain eigensolve
    oracle = np.sqrt(np.max(np.linalg.eigvals(m.conj().T @ m).real))
    assert alg_norm(a) == pytest.approx(oracle, rel=1e-10)


@given(shapes, seeds)
def test_cstar_identity(shape, seed):
    a = AlgebraElement.random(shape, np.random.default_rng(seed))
    assert alg_norm(a.H @ a) == pytest.approx(alg_norm(a) ** 2, rel=1e-10)


@given(shapes, seeds)
def test_norm_is_submultiplicative(shape, seed):
    rng = np.random.default_rng(seed)
    a, b = AlgebraElement.random(shape, rng), AlgebraElement.random(shape, rng)
    assert alg_norm(a @ b) <= alg_norm(a) * alg_norm(b) * (1 + 1e-12)


def test_norm_examples():
    shape = AlgebraShape([2])
    assert alg_norm(AlgebraElement.identity(shape)) == pytest.approx(1.0)
    assert alg_norm(AlgebraElement(shape, [np.diag([1.0, -3.0])])) == pytest.approx(3.0)
    assert alg_norm(AlgebraElement(AlgebraShape([1, 1]), [[[2]], [[-5j]]])) == pytest.approx(5.0)


@given(shapes, seeds)
def test_positive_elements_and_square_roots(shape, seed):
    a = AlgebraElement.random(shape, np.random.default_rng(seed))
    p = a.H @ a
    assert is_positive(p)
    r = sqrt_positive(p)
    assert is_positive(r)
    assert (r @ r).allclose(p, atol=1e-9 * max(1.0, alg_norm(p)))


def test_non_positive_examples():
    shape = AlgebraShape([2])
    assert not is_positive(AlgebraElement(shape, [np.diag([1.0, -1.0])]))
    assert not is_positive(AlgebraElement(shape, [[[0, 1], [0, 0]]]))


@given(shapes, seeds)
def test_inverse_matches_dense_inverse(shape, seed):
    a = AlgebraElement.random(shape, np.random.default_rng(seed))
    inv = try_inverse(a)
    assert np.allclose(block_diag_matrix(inv), np.linalg.inv(block_diag_matrix(a)), atol=1e-8)
    assert (a @ inv).allclose(AlgebraElement.identity(shape), atol=1e-8)


def test_singular_element_not_invertible():
    shape = AlgebraShape([2, 1])
    a = AlgebraElement(shape, [np.diag([1.0, 0.0]), [[3.0]]])
    with pytest.raises(NotInvertible) as err:
        try_inverse(a)
    assert err.value.block == 0
    assert not is_invertible(a)
    assert min_singular(a) == 0.0


def test_states_evaluate_density_traces():
    shape = AlgebraShape([2, 1])
    phi = State.pure(shape, 0, [0, 1])
    a = AlgebraElement(shape, [np.diag([1.0, 7.0]), [[2.0]]])
    assert phi(a) == pytest.approx(7.0)
    assert phi(AlgebraElement.identity(shape)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        State(shape, [np.eye(2) / 2, np.eye(1)], [0.7, 0.7])
    with pytest.raises(ValueError):
        State(shape, [np.diag([2.0, -1.0]), np.eye(1)], [1.0, 0.0])


@given(shapes, seeds)
def test_states_are_positive_and_unital(shape, seed):
    rng = np.random.default_rng(seed)
    parts = [rng.standard_normal(d) + 1j * rng.standard_normal(d) for d in shape.block_dims]
    total = np.sqrt(sum(np.vdot(p, p).real for p in parts))
    phi = State.mixture(shape, [[p / total for p in parts]], [1.0])
    a = AlgebraElement.random(shape, rng)
    assert phi(AlgebraElement.identity(shape)) == pytest.approx(1.0)
    assert phi(a.H @ a).real >= -1e-12
    assert abs(phi(a)) <= alg_norm(a) * (1 + 1e-12)


def test_characters_on_abelian_shapes():
    shape = AlgebraShape([1, 1, 1])
    chars = characters(shape)
    a = AlgebraElement(shape, [[[2]], [[3j]], [[-1]]])
    b = AlgebraElement(shape, [[[5]], [[1]], [[4]]])
    assert len(chars) == 3
    assert np.allclose(chars.values(a @ b), chars.values(a) * chars.values(b))
    # total: vanishing under every character forces zero
    assert np.allclose(chars.values(AlgebraElement.zeros(shape)), 0)


def test_no_characters_on_full_matrix_blocks():
    assert characters(AlgebraShape([2])) is None
    assert characters(AlgebraShape([1, 2])) is None


def test_matrix_block_has_only_zero_multiplicative_functional():
    # symbolic oracle: phi(E_ij E_kl) = phi(E_ij) phi(E_kl) on M_2 forces phi = 0
    p = sp.symbols("p00 p01 p10 p11")
    phi = {(0, 0): p[0], (0, 1): p[1], (1, 0): p[2], (1, 1): p[3]}
    eqs = []
    for (i, j) in phi:
        for (k, l) in phi:
            prod = phi[(i, l)] if j == k else 0
            eqs.append(sp.Eq(prod, phi[(i, j)] * phi[(k, l)]))
    sols = sp.solve(eqs, p, dict=True)
    assert sols == [{s: 0 for s in p}]


@given(st.sampled_from([(1,), (2,), (1, 1)]), seeds)
def test_real_coordinates_round_trip(dims, seed):
    shape = AlgebraShape(dims)
    a = AlgebraElement.random(shape, np.random.default_rng(seed))
    b = AlgebraElement.from_real_coords(shape, a.real_coords())
    assert b.allclose(a, atol=0)
