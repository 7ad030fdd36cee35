"""Finite-dimensional C*-algebras as direct sums of full complex matrix blocks.

An algebra is fixed by its block sizes ``(d_1, ..., d_m)``; an element holds
one ``d_i x d_i`` complex matrix per block.  Norm, positivity and
invertibility are all decided blockwise with dense eigen/singular value
solves, which is cheap at the block sizes used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "AlgebraShape",
    "AlgebraElement",
    "State",
    "Character",
    "CharacterSet",
    "ShapeMismatchError",
    "NotPositiveError",
    "NotInvertible",
    "alg_mul",
    "alg_norm",
    "is_positive",
    "sqrt_positive",
    "try_inverse",
    "is_invertible",
    "min_singular",
    "apply_state",
    "characters",
    "random_complex",
]


class ShapeMismatchError(ValueError):
    """Operands live in different algebras or modules."""


class NotPositiveError(ValueError):
    """A positive element was required."""


class NotInvertible(ArithmeticError):
    """Raised by :func:`try_inverse` for elements outside the invertible group.

    ``block`` is the index of the first offending block and ``min_singular``
    its smallest singular value.
    """

    def __init__(self, block: int, min_singular: float, threshold: float):
        self.block = block
        self.min_singular = float(min_singular)
        self.threshold = float(threshold)
        super().__init__(
            f"block {block} has smallest singular value {min_singular:.3e} "
            f"<= {threshold:.3e}"
        )


def random_complex(rng: np.random.Generator, size) -> np.ndarray:
    """Standard complex normal samples (unit variance)."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


@dataclass(frozen=True)
class AlgebraShape:
    block_dims: tuple[int, ...]

    def __init__(self, block_dims: Sequence[int] | int):
        if isinstance(block_dims, (int, np.integer)):
            block_dims = (int(block_dims),)
        dims = tuple(int(d) for d in block_dims)
        if not dims:
            raise ValueError("an algebra needs at least one block")
        if any(d < 1 for d in dims):
            raise ValueError(f"block sizes must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def is_abelian(self) -> bool:
        return all(d == 1 for d in self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra."""
        return sum(d * d for d in self.block_dims)

    def __iter__(self):
        return iter(self.block_dims)

    def __repr__(self) -> str:
        return f"AlgebraShape({list(self.block_dims)})"


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


class AlgebraElement:
    """Immutable element of a block-diagonal matrix algebra."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape, blocks: Sequence[np.ndarray]):
        if not isinstance(shape, AlgebraShape):
            shape = AlgebraShape(shape)
        if len(blocks) != shape.n_blocks:
            raise ShapeMismatchError(
                f"expected {shape.n_blocks} blocks, got {len(blocks)}"
            )
        frozen = []
        for i, (d, b) in enumerate(zip(shape.block_dims, blocks)):
            b = _frozen(b)
            if b.ndim == 0 and d == 1:
                b = _frozen(b.reshape(1, 1))
            if b.shape != (d, d):
                raise ShapeMismatchError(
                    f"block {i} has shape {b.shape}, expected {(d, d)}"
                )
            frozen.append(b)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    # construction helpers
    @classmethod
    def zeros(cls, shape) -> "AlgebraElement":
        shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
        return cls(shape, [np.zeros((d, d)) for d in shape.block_dims])

    @classmethod
    def identity(cls, shape) -> "AlgebraElement":
        shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
        return cls(shape, [np.eye(d) for d in shape.block_dims])

    @classmethod
    def scalar(cls, shape, alpha: complex) -> "AlgebraElement":
        shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
        return cls(shape, [alpha * np.eye(d) for d in shape.block_dims])

    @classmethod
    def random(cls, shape, rng: np.random.Generator) -> "AlgebraElement":
        shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
        return cls(shape, [random_complex(rng, (d, d)) for d in shape.block_dims])

    @classmethod
    def from_real_coords(cls, shape: AlgebraShape, coords: np.ndarray) -> "AlgebraElement":
        """Inverse of :meth:`real_coords`."""
        coords = np.asarray(coords, dtype=float)
        n = shape.dim
        if coords.shape != (2 * n,):
            raise ShapeMismatchError(f"expected {2 * n} real coordinates")
        flat = coords[:n] + 1j * coords[n:]
        blocks, pos = [], 0
        for d in shape.block_dims:
            blocks.append(flat[pos:pos + d * d].reshape(d, d))
            pos += d * d
        return cls(shape, blocks)

    def real_coords(self) -> np.ndarray:
        """Real parametrisation (real parts then imaginary parts), length 2*dim."""
        flat = np.concatenate([b.ravel() for b in self.blocks])
        return np.concatenate([flat.real, flat.imag])

    # algebra structure
    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")

    @property
    def H(self) -> "AlgebraElement":
        """Adjoint a*."""
        return AlgebraElement(self.shape, [b.conj().T for b in self.blocks])

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __mul__(self, alpha):
        if isinstance(alpha, AlgebraElement):
            raise TypeError("use @ for the algebra product")
        return AlgebraElement(self.shape, [alpha * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return self * (1.0 / alpha)

    def __matmul__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return alg_mul(self, other)

    def norm(self) -> float:
        return alg_norm(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-8) -> bool:
        self._check(other)
        return alg_norm(self - other) <= atol

    def __repr__(self) -> str:
        return f"AlgebraElement({list(self.shape.block_dims)}, {[b.tolist() for b in self.blocks]})"


def alg_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.shape, [x @ y for x, y in zip(a.blocks, b.blocks)])


def alg_norm(a: AlgebraElement) -> float:
    """Operator norm: max over blocks of sqrt(lambda_max(b* b))."""
    best = 0.0
    for b in a.blocks:
        if b.shape == (1, 1):
            best = max(best, float(abs(b[0, 0])))
            continue
        top = np.linalg.eigvalsh(b.conj().T @ b)[-1]
        best = max(best, float(np.sqrt(max(top, 0.0))))
    return best


def _hermitian_part(b: np.ndarray) -> np.ndarray:
    return 0.5 * (b + b.conj().T)


def is_positive(a: AlgebraElement, tol: float = 1e-9) -> bool:
    """Hermitian within tolerance and no eigenvalue below ``-tol``.

    Both tests are relative to ``max(1, ||a||)``.
    """
    scale = max(1.0, alg_norm(a))
    for b in a.blocks:
        if np.abs(b - b.conj().T).max(initial=0.0) > tol * scale:
            return False
        if np.linalg.eigvalsh(_hermitian_part(b))[0] < -tol * scale:
            return False
    return True


def sqrt_positive(a: AlgebraElement, tol: float = 1e-9) -> AlgebraElement:
    if not is_positive(a, tol):
        raise NotPositiveError("square root requested for a non-positive element")
    blocks = []
    for b in a.blocks:
        w, v = np.linalg.eigh(_hermitian_part(b))
        w = np.sqrt(np.clip(w, 0.0, None))
        blocks.append((v * w) @ v.conj().T)
    return AlgebraElement(a.shape, blocks)


def try_inverse(a: AlgebraElement, sing_tol: float | None = None) -> AlgebraElement:
    """Blockwise inverse, or :class:`NotInvertible`.

    ``sing_tol`` is an absolute threshold on the smallest singular value of
    each block; the default is ``1e-10 * ||a||``.
    """
    if sing_tol is None:
        sing_tol = 1e-10 * alg_norm(a)
    inv = []
    for i, b in enumerate(a.blocks):
        smin = np.linalg.svd(b, compute_uv=False)[-1]
        if not smin > sing_tol:
            raise NotInvertible(i, smin, sing_tol)
        inv.append(np.linalg.inv(b))
    return AlgebraElement(a.shape, inv)


def is_invertible(a: AlgebraElement, sing_tol: float | None = None) -> bool:
    try:
        try_inverse(a, sing_tol)
    except NotInvertible:
        return False
    return True


def min_singular(a: AlgebraElement) -> float:
    return min(float(np.linalg.svd(b, compute_uv=False)[-1]) for b in a.blocks)


class State:
    """Positive norm-one functional ``a -> sum_i w_i tr(rho_i a_i)``."""

    __slots__ = ("shape", "densities", "weights")

    def __init__(self, shape: AlgebraShape, densities, weights, tol: float = 1e-9):
        if len(densities) != shape.n_blocks or len(weights) != shape.n_blocks:
            raise ShapeMismatchError("one density and one weight per block")
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < -tol) or abs(weights.sum() - 1.0) > tol:
            raise ValueError(f"weights must be a probability vector, got {weights}")
        dens = []
        for d, rho in zip(shape.block_dims, densities):
            rho = _frozen(rho)
            if rho.shape != (d, d):
                raise ShapeMismatchError(f"density of shape {rho.shape} for block size {d}")
            if abs(np.trace(rho) - 1.0) > tol:
                raise ValueError("densities must have unit trace")
            if np.linalg.eigvalsh(_hermitian_part(rho))[0] < -tol:
                raise ValueError("densities must be positive semidefinite")
            dens.append(rho)
        weights = np.clip(weights, 0.0, None)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "densities", tuple(dens))
        object.__setattr__(self, "weights", tuple(float(w) for w in weights / weights.sum()))

    def __setattr__(self, name, value):
        raise AttributeError("State is immutable")

    @classmethod
    def pure(cls, shape: AlgebraShape, block: int, vector) -> "State":
        """Vector state ``a -> <v, a_block v>`` for a unit vector in one block."""
        vector = np.asarray(vector, dtype=complex)
        vector = vector / np.linalg.norm(vector)
        dens = [np.eye(d) / d for d in shape.block_dims]
        dens[block] = np.outer(vector, vector.conj())
        weights = np.zeros(shape.n_blocks)
        weights[block] = 1.0
        return cls(shape, dens, weights)

    @classmethod
    def mixture(cls, shape: AlgebraShape, vectors, coefficients) -> "State":
        """Convex combination of vector functionals on the whole direct sum.

        Each entry of ``vectors`` is a list of per-block component vectors
        whose squared norms sum to one.
        """
        acc = [np.zeros((d, d), dtype=complex) for d in shape.block_dims]
        for parts, t in zip(vectors, coefficients):
            for i, v in enumerate(parts):
                v = np.asarray(v, dtype=complex)
                acc[i] += t * np.outer(v, v.conj())
        weights = np.array([np.trace(m).real for m in acc])
        total = weights.sum()
        dens = []
        for d, m, w in zip(shape.block_dims, acc, weights):
            dens.append(m / w if w > 1e-300 else np.eye(d) / d)
        return cls(shape, dens, weights / total)

    def __call__(self, a: AlgebraElement) -> complex:
        return apply_state(self, a)


def apply_state(phi: State, a: AlgebraElement) -> complex:
    if phi.shape != a.shape:
        raise ShapeMismatchError(f"{phi.shape} vs {a.shape}")
    total = 0.0 + 0.0j
    for w, rho, b in zip(phi.weights, phi.densities, a.blocks):
        if w:
            total += w * np.trace(rho @ b)
    return complex(total)


@dataclass(frozen=True)
class Character:
    """Evaluation of the ``index``-th coordinate of an abelian algebra."""

    index: int

    def __call__(self, a: AlgebraElement) -> complex:
        return complex(a.blocks[self.index][0, 0])


@dataclass(frozen=True)
class CharacterSet:
    shape: AlgebraShape
    characters: tuple[Character, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def values(self, a: AlgebraElement) -> np.ndarray:
        return np.array([chi(a) for chi in self.characters])


def characters(shape: AlgebraShape) -> CharacterSet | None:
    """All multiplicative functionals, or ``None`` when a block has size >= 2.

    A full matrix block admits no nonzero multiplicative functional, so
    the set is only total (indeed nonempty on that block) for abelian shapes.
    """
    if not shape.is_abelian:
        return None
    return CharacterSet(shape, tuple(Character(i) for i in range(shape.n_blocks)))
