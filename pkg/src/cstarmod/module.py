"""The standard Hilbert A-module A^k.

A vector is stored blockwise: for block ``b`` of size ``d`` the k entries are
kept as one ``(k, d, d)`` array, so the stacked ``(k*d, d)`` matrix
``X_b`` satisfies ``<x, y>_b = X_b^* Y_b``.  Norms and moduli then come from
the singular value decomposition of ``X_b``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    ShapeMismatchError,
    alg_norm,
    random_complex,
)

__all__ = [
    "ToleranceConfig",
    "ModuleVector",
    "AModuleMap",
    "CLinearMap",
    "inner_product",
    "modulus",
    "modulus_squared",
    "vector_norm",
    "right_action",
    "theta_map",
    "polarization_gram",
    "a_linearity_residual",
]


@dataclass(frozen=True)
class ToleranceConfig:
    eq_tol: float = 1e-8
    psd_tol: float = 1e-9
    opt_tol: float = 1e-7
    sing_tol: float = 1e-10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (isinstance(value, (int, float)) and value > 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = ToleranceConfig()


def _shape(shape) -> AlgebraShape:
    return shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)


class ModuleVector:
    """Element of A^k with entries ``x_1, ..., x_k``."""

    __slots__ = ("shape", "k", "blocks")

    def __init__(self, shape: AlgebraShape, blocks: Sequence[np.ndarray]):
        shape = _shape(shape)
        if len(blocks) != shape.n_blocks:
            raise ShapeMismatchError(f"expected {shape.n_blocks} blocks, got {len(blocks)}")
        arrs, k = [], None
        for d, b in zip(shape.block_dims, blocks):
            b = np.array(b, dtype=complex)
            if b.ndim != 3 or b.shape[1:] != (d, d):
                raise ShapeMismatchError(f"block array of shape {b.shape} for block size {d}")
            if k is None:
                k = b.shape[0]
            elif b.shape[0] != k:
                raise ShapeMismatchError("blocks disagree on the module rank")
            b.setflags(write=False)
            arrs.append(b)
        if k < 1:
            raise ValueError("module rank must be positive")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "blocks", tuple(arrs))

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    @classmethod
    def from_entries(cls, entries: Sequence[AlgebraElement]) -> "ModuleVector":
        if not entries:
            raise ValueError("need at least one entry")
        shape = entries[0].shape
        for e in entries:
            if e.shape != shape:
                raise ShapeMismatchError("entries live in different algebras")
        blocks = [np.stack([e.blocks[i] for e in entries]) for i in range(shape.n_blocks)]
        return cls(shape, blocks)

    @classmethod
    def zeros(cls, shape, k: int) -> "ModuleVector":
        shape = _shape(shape)
        return cls(shape, [np.zeros((k, d, d)) for d in shape.block_dims])

    @classmethod
    def basis(cls, shape, k: int, i: int) -> "ModuleVector":
        """The vector with the unit in entry ``i`` and zeros elsewhere."""
        shape = _shape(shape)
        blocks = []
        for d in shape.block_dims:
            b = np.zeros((k, d, d), dtype=complex)
            b[i] = np.eye(d)
            blocks.append(b)
        return cls(shape, blocks)

    @classmethod
    def random(cls, shape, k: int, rng: np.random.Generator) -> "ModuleVector":
        shape = _shape(shape)
        return cls(shape, [random_complex(rng, (k, d, d)) for d in shape.block_dims])

    @property
    def entries(self) -> tuple[AlgebraElement, ...]:
        return tuple(
            AlgebraElement(self.shape, [b[i] for b in self.blocks]) for i in range(self.k)
        )

    def stacked(self, block: int) -> np.ndarray:
        """Entries of one block stacked vertically, shape ``(k*d, d)``."""
        b = self.blocks[block]
        return b.reshape(self.k * b.shape[1], b.shape[2])

    def flatten(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    @classmethod
    def unflatten(cls, shape, k: int, flat: np.ndarray) -> "ModuleVector":
        shape = _shape(shape)
        flat = np.asarray(flat)
        blocks, pos = [], 0
        for d in shape.block_dims:
            n = k * d * d
            blocks.append(flat[pos:pos + n].reshape(k, d, d))
            pos += n
        if pos != flat.size:
            raise ShapeMismatchError(f"expected {pos} coordinates, got {flat.size}")
        return cls(shape, blocks)

    def _check(self, other: "ModuleVector"):
        if not isinstance(other, ModuleVector):
            raise TypeError(f"expected ModuleVector, got {type(other).__name__}")
        if other.shape != self.shape or other.k != self.k:
            raise ShapeMismatchError(
                f"A^{self.k} over {self.shape} vs A^{other.k} over {other.shape}"
            )

    def __add__(self, other):
        self._check(other)
        return ModuleVector(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return ModuleVector(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return ModuleVector(self.shape, [-a for a in self.blocks])

    def __mul__(self, alpha):
        if isinstance(alpha, (AlgebraElement, ModuleVector)):
            raise TypeError("use @ for the right action")
        return ModuleVector(self.shape, [alpha * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return self * (1.0 / alpha)

    def __matmul__(self, a):
        if not isinstance(a, AlgebraElement):
            return NotImplemented
        return right_action(self, a)

    def norm(self) -> float:
        return vector_norm(self)

    def allclose(self, other: "ModuleVector", atol: float = 1e-8) -> bool:
        self._check(other)
        return vector_norm(self - other) <= atol

    def __repr__(self) -> str:
        return f"ModuleVector(k={self.k}, shape={list(self.shape.block_dims)})"


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """<x, y> = sum_i x_i^* y_i."""
    x._check(y)
    return AlgebraElement(
        x.shape, [x.stacked(i).conj().T @ y.stacked(i) for i in range(x.shape.n_blocks)]
    )


def _gram_svd(x: ModuleVector, i: int):
    _, s, vh = np.linalg.svd(x.stacked(i), full_matrices=False)
    return s, vh


def modulus(x: ModuleVector) -> AlgebraElement:
    """|x|, the positive square root of <x, x>.

    Computed from the SVD of the stacked entries, X = U S V^*, as V S V^*;
    this avoids the square-root loss of precision on small eigenvalues.
    """
    blocks = []
    for i in range(x.shape.n_blocks):
        s, vh = _gram_svd(x, i)
        blocks.append((vh.conj().T * s) @ vh)
    return AlgebraElement(x.shape, blocks)


def modulus_squared(x: ModuleVector) -> AlgebraElement:
    """|x|^2 assembled from the same decomposition as :func:`modulus`."""
    blocks = []
    for i in range(x.shape.n_blocks):
        s, vh = _gram_svd(x, i)
        blocks.append((vh.conj().T * s**2) @ vh)
    return AlgebraElement(x.shape, blocks)


def vector_norm(x: ModuleVector) -> float:
    """||x|| = sqrt(||<x, x>||) = max over blocks of the top singular value."""
    best = 0.0
    for i, d in enumerate(x.shape.block_dims):
        m = x.stacked(i)
        # a single column's top singular value is its Euclidean length
        val = np.sqrt(np.vdot(m, m).real) if d == 1 else np.linalg.norm(m, 2)
        best = max(best, float(val))
    return best


def right_action(x: ModuleVector, a: AlgebraElement) -> ModuleVector:
    if a.shape != x.shape:
        raise ShapeMismatchError(f"{x.shape} vs {a.shape}")
    return ModuleVector(x.shape, [xb @ ab for xb, ab in zip(x.blocks, a.blocks)])


def theta_map(x: ModuleVector, y: ModuleVector, z: ModuleVector) -> ModuleVector:
    """The rank-one operator theta_{x,y}: z -> x <y, z>."""
    x._check(y)
    return right_action(x, inner_product(y, z))


class AModuleMap:
    """A-linear map A^k -> A^m given by left multiplication with an m x k matrix over A."""

    __slots__ = ("shape", "rows", "cols", "coeffs")

    def __init__(self, shape: AlgebraShape, coeffs: Sequence[np.ndarray]):
        shape = _shape(shape)
        if len(coeffs) != shape.n_blocks:
            raise ShapeMismatchError("one coefficient array per block")
        arrs, dims = [], None
        for d, c in zip(shape.block_dims, coeffs):
            c = np.array(c, dtype=complex)
            if c.ndim != 4 or c.shape[2:] != (d, d):
                raise ShapeMismatchError(f"coefficient array of shape {c.shape} for block size {d}")
            if dims is None:
                dims = c.shape[:2]
            elif c.shape[:2] != dims:
                raise ShapeMismatchError("blocks disagree on the map dimensions")
            c.setflags(write=False)
            arrs.append(c)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rows", int(dims[0]))
        object.__setattr__(self, "cols", int(dims[1]))
        object.__setattr__(self, "coeffs", tuple(arrs))

    def __setattr__(self, name, value):
        raise AttributeError("AModuleMap is immutable")

    @classmethod
    def from_elements(cls, rows: Sequence[Sequence[AlgebraElement]]) -> "AModuleMap":
        shape = rows[0][0].shape
        coeffs = []
        for i in range(shape.n_blocks):
            coeffs.append(np.array([[e.blocks[i] for e in row] for row in rows]))
        return cls(shape, coeffs)

    @classmethod
    def identity(cls, shape, k: int) -> "AModuleMap":
        shape = _shape(shape)
        coeffs = []
        for d in shape.block_dims:
            c = np.zeros((k, k, d, d), dtype=complex)
            for i in range(k):
                c[i, i] = np.eye(d)
            coeffs.append(c)
        return cls(shape, coeffs)

    @classmethod
    def diagonal(cls, shape, k: int, a: AlgebraElement) -> "AModuleMap":
        """x -> (a x_1, ..., a x_k)."""
        coeffs = []
        for d, ab in zip(_shape(shape).block_dims, a.blocks):
            c = np.zeros((k, k, d, d), dtype=complex)
            for i in range(k):
                c[i, i] = ab
            coeffs.append(c)
        return cls(shape, coeffs)

    @classmethod
    def random(cls, shape, rows: int, cols: int, rng: np.random.Generator) -> "AModuleMap":
        shape = _shape(shape)
        return cls(shape, [random_complex(rng, (rows, cols, d, d)) for d in shape.block_dims])

    @classmethod
    def random_unitary(cls, shape, k: int, rng: np.random.Generator) -> "AModuleMap":
        """Haar-random unitary of M_k(A), so that |Tx| = |x| for every x."""
        shape = _shape(shape)
        coeffs = []
        for d in shape.block_dims:
            q, r = np.linalg.qr(random_complex(rng, (k * d, k * d)))
            q = q * (np.diag(r) / np.abs(np.diag(r)))
            coeffs.append(q.reshape(k, d, k, d).transpose(0, 2, 1, 3))
        return cls(shape, coeffs)

    @classmethod
    def permutation(cls, shape, perm: Sequence[int]) -> "AModuleMap":
        """(Tx)_i = x_{perm[i]}."""
        shape = _shape(shape)
        k = len(perm)
        coeffs = []
        for d in shape.block_dims:
            c = np.zeros((k, k, d, d), dtype=complex)
            for i, j in enumerate(perm):
                c[i, j] = np.eye(d)
            coeffs.append(c)
        return cls(shape, coeffs)

    def block_matrix(self, block: int) -> np.ndarray:
        """The map on block ``block`` as a ``(rows*d, cols*d)`` matrix."""
        c = self.coeffs[block]
        m, k, d, _ = c.shape
        return c.transpose(0, 2, 1, 3).reshape(m * d, k * d)

    def __call__(self, x: ModuleVector) -> ModuleVector:
        if x.shape != self.shape or x.k != self.cols:
            raise ShapeMismatchError(f"map on A^{self.cols} applied to A^{x.k}")
        out = []
        for i, d in enumerate(self.shape.block_dims):
            out.append((self.block_matrix(i) @ x.stacked(i)).reshape(self.rows, d, d))
        return ModuleVector(self.shape, out)

    def __mul__(self, alpha):
        return AModuleMap(self.shape, [alpha * c for c in self.coeffs])

    __rmul__ = __mul__

    def __add__(self, other: "AModuleMap") -> "AModuleMap":
        return AModuleMap(self.shape, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def to_clinear(self) -> "CLinearMap":
        """Same map as a dense matrix on flattened coordinates."""
        n_in = self.cols * self.shape.dim
        cols = []
        for j in range(n_in):
            e = np.zeros(n_in, dtype=complex)
            e[j] = 1.0
            cols.append(self(ModuleVector.unflatten(self.shape, self.cols, e)).flatten())
        return CLinearMap(self.shape, self.cols, self.rows, np.array(cols).T)


class CLinearMap:
    """Complex-linear map A^k -> A^m acting on flattened complex coordinates.

    Nothing forces it to commute with the right A-action; see
    :func:`a_linearity_residual`.
    """

    __slots__ = ("shape", "cols", "rows", "matrix")

    def __init__(self, shape: AlgebraShape, cols: int, rows: int, matrix: np.ndarray):
        shape = _shape(shape)
        matrix = np.array(matrix, dtype=complex)
        if matrix.shape != (rows * shape.dim, cols * shape.dim):
            raise ShapeMismatchError(
                f"dense matrix of shape {matrix.shape} does not map A^{cols} -> A^{rows}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "cols", int(cols))
        object.__setattr__(self, "rows", int(rows))
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("CLinearMap is immutable")

    @classmethod
    def random(cls, shape, rows: int, cols: int, rng: np.random.Generator) -> "CLinearMap":
        shape = _shape(shape)
        n_out, n_in = rows * shape.dim, cols * shape.dim
        return cls(shape, cols, rows, random_complex(rng, (n_out, n_in)) / np.sqrt(n_in))

    def __call__(self, x: ModuleVector) -> ModuleVector:
        if x.shape != self.shape or x.k != self.cols:
            raise ShapeMismatchError(f"map on A^{self.cols} applied to A^{x.k}")
        return ModuleVector.unflatten(self.shape, self.rows, self.matrix @ x.flatten())

    def __mul__(self, alpha):
        return CLinearMap(self.shape, self.cols, self.rows, alpha * self.matrix)

    __rmul__ = __mul__

    def __add__(self, other: "CLinearMap") -> "CLinearMap":
        return CLinearMap(self.shape, self.cols, self.rows, self.matrix + other.matrix)


ModuleMap = Callable[[ModuleVector], ModuleVector]


def polarization_gram(T: ModuleMap, x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """<Tx, Ty> recovered from four squared moduli.

    (|Ty+Tx|^2 - |Ty-Tx|^2 - i|iTy+Tx|^2 + i|iTy-Tx|^2) / 4; the inner
    product of Tx with Ty is never formed directly.
    """
    tx, ty = T(x), T(y)
    total = (
        modulus_squared(ty + tx)
        - modulus_squared(ty - tx)
        - 1j * modulus_squared(1j * ty + tx)
        + 1j * modulus_squared(1j * ty - tx)
    )
    return 0.25 * total


def a_linearity_residual(
    T: ModuleMap, shape, k: int, rng: np.random.Generator, samples: int = 20
) -> float:
    """max ||T(xa) - (Tx)a|| / (||x|| ||a||) over random x, a."""
    shape = _shape(shape)
    worst = 0.0
    for _ in range(samples):
        x = ModuleVector.random(shape, k, rng)
        a = AlgebraElement.random(shape, rng)
        diff = T(right_action(x, a)) - right_action(T(x), a)
        worst = max(worst, vector_norm(diff) / (vector_norm(x) * alg_norm(a)))
    return worst
