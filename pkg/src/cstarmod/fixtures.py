"""JSON encoding of algebra elements, vectors, maps and forms.

Complex numbers are ``[re, im]`` pairs and floats are written with full
precision, so every fixture re-parses to exactly the value that was written.
Decoding errors carry the JSON path of the offending element.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, State
from .forms import MultiForm
from .module import AModuleMap, CLinearMap, ModuleVector

__all__ = [
    "FixtureError",
    "to_jsonable",
    "element_to_json",
    "element_from_json",
    "vector_to_json",
    "vector_from_json",
    "map_to_json",
    "map_from_json",
    "form_to_json",
    "form_from_json",
    "load_json",
    "dumps",
]


class FixtureError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _matrix_to_json(m: np.ndarray) -> list:
    return [[_complex_to_json(z) for z in row] for row in m]


def _complex_from_json(obj, path: str) -> complex:
    if isinstance(obj, bool) or not isinstance(obj, (list, int, float)):
        raise FixtureError(path, f"expected [re, im] pair, got {type(obj).__name__}")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if len(obj) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                for v in obj):
        raise FixtureError(path, "expected [re, im] pair of numbers")
    z = complex(obj[0], obj[1])
    if not np.isfinite(z):
        raise FixtureError(path, "non-finite entry")
    return z


def _matrix_from_json(obj, d: int, path: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != d:
        raise FixtureError(path, f"expected {d} rows")
    out = np.empty((d, d), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != d:
            raise FixtureError(f"{path}[{i}]", f"expected {d} entries")
        for j, z in enumerate(row):
            out[i, j] = _complex_from_json(z, f"{path}[{i}][{j}]")
    return out


def _shape_from_json(obj, path: str) -> AlgebraShape:
    if isinstance(obj, int) and not isinstance(obj, bool):
        obj = [obj]
    if (not isinstance(obj, list) or not obj
            or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in obj)):
        raise FixtureError(path, "shape must be a nonempty list of positive integers")
    return AlgebraShape(obj)


def _require(obj, key: str, path: str):
    if not isinstance(obj, dict):
        raise FixtureError(path, "expected an object")
    if key not in obj:
        raise FixtureError(f"{path}.{key}", "missing")
    return obj[key]


def _int_field(obj, key: str, path: str) -> int:
    v = _require(obj, key, path)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise FixtureError(f"{path}.{key}", "expected a positive integer")
    return v


def element_to_json(a: AlgebraElement) -> dict:
    return {"shape": list(a.shape.block_dims), "blocks": [_matrix_to_json(b) for b in a.blocks]}


def element_from_json(obj, path: str = "$", shape: AlgebraShape | None = None) -> AlgebraElement:
    shape_obj = obj.get("shape") if isinstance(obj, dict) else None
    if shape_obj is not None:
        own = _shape_from_json(shape_obj, f"{path}.shape")
        if shape is not None and own != shape:
            raise FixtureError(f"{path}.shape", f"expected {list(shape.block_dims)}")
        shape = own
    blocks = _require(obj, "blocks", path)
    if shape is None:
        raise FixtureError(f"{path}.shape", "missing")
    if not isinstance(blocks, list) or len(blocks) != shape.n_blocks:
        raise FixtureError(f"{path}.blocks", f"expected {shape.n_blocks} blocks")
    return AlgebraElement(shape, [_matrix_from_json(b, d, f"{path}.blocks[{i}]")
                                  for i, (d, b) in enumerate(zip(shape.block_dims, blocks))])


def vector_to_json(x: ModuleVector) -> dict:
    return {"shape": list(x.shape.block_dims), "k": x.k,
            "entries": [element_to_json(e) for e in x.entries]}


def vector_from_json(obj, path: str = "$") -> ModuleVector:
    entries = _require(obj, "entries", path)
    if not isinstance(entries, list) or not entries:
        raise FixtureError(f"{path}.entries", "expected a nonempty list")
    shape = _shape_from_json(obj["shape"], f"{path}.shape") if "shape" in obj else None
    k = _int_field(obj, "k", path) if "k" in obj else len(entries)
    if len(entries) != k:
        raise FixtureError(f"{path}.entries", f"expected {k} entries")
    elems = []
    for i, e in enumerate(entries):
        a = element_from_json(e, f"{path}.entries[{i}]", shape)
        shape = a.shape
        elems.append(a)
    return ModuleVector.from_entries(elems)


def map_to_json(T) -> dict:
    if isinstance(T, AModuleMap):
        return {"shape": list(T.shape.block_dims), "rows": T.rows, "cols": T.cols,
                "coeffs": [[element_to_json(AlgebraElement(T.shape, [c[i, j] for c in T.coeffs]))
                            for j in range(T.cols)] for i in range(T.rows)]}
    if isinstance(T, CLinearMap):
        return {"shape": list(T.shape.block_dims), "rows": T.rows, "cols": T.cols,
                "dense": _matrix_to_json(T.matrix)}
    raise TypeError(f"cannot encode {type(T).__name__}")


def map_from_json(obj, path: str = "$"):
    shape = _shape_from_json(_require(obj, "shape", path), f"{path}.shape")
    rows, cols = _int_field(obj, "rows", path), _int_field(obj, "cols", path)
    if "dense" in obj:
        dense = obj["dense"]
        n_out, n_in = rows * shape.dim, cols * shape.dim
        if not isinstance(dense, list) or len(dense) != n_out:
            raise FixtureError(f"{path}.dense", f"expected {n_out} rows")
        m = np.empty((n_out, n_in), dtype=complex)
        for i, row in enumerate(dense):
            if not isinstance(row, list) or len(row) != n_in:
                raise FixtureError(f"{path}.dense[{i}]", f"expected {n_in} entries")
            for j, z in enumerate(row):
                m[i, j] = _complex_from_json(z, f"{path}.dense[{i}][{j}]")
        return CLinearMap(shape, cols, rows, m)
    coeffs = _require(obj, "coeffs", path)
    if not isinstance(coeffs, list) or len(coeffs) != rows:
        raise FixtureError(f"{path}.coeffs", f"expected {rows} rows")
    grid = []
    for i, row in enumerate(coeffs):
        if not isinstance(row, list) or len(row) != cols:
            raise FixtureError(f"{path}.coeffs[{i}]", f"expected {cols} entries")
        grid.append([element_from_json(e, f"{path}.coeffs[{i}][{j}]", shape)
                     for j, e in enumerate(row)])
    return AModuleMap.from_elements(grid)


def form_to_json(F: MultiForm) -> dict:
    coeffs = {}
    for idx, a in F.entries().items():
        if any(np.any(b) for b in a.blocks):
            coeffs[",".join(str(i) for i in idx)] = element_to_json(a)
    return {"shape": list(F.shape.block_dims), "n": F.n, "k": F.k, "coeffs": coeffs}


def form_from_json(obj, path: str = "$") -> MultiForm:
    shape = _shape_from_json(_require(obj, "shape", path), f"{path}.shape")
    n, k = _int_field(obj, "n", path), _int_field(obj, "k", path)
    coeffs = _require(obj, "coeffs", path)
    if not isinstance(coeffs, dict):
        raise FixtureError(f"{path}.coeffs", "expected an object keyed by multi-index")
    entries = {}
    for key, e in coeffs.items():
        kp = f"{path}.coeffs[{json.dumps(key)}]"
        try:
            idx = tuple(int(s) for s in key.split(","))
        except ValueError:
            raise FixtureError(kp, "key must be comma-separated indices") from None
        if len(idx) != n or any(not 0 <= i < k for i in idx):
            raise FixtureError(kp, f"multi-index out of range for n={n}, k={k}")
        entries[idx] = element_from_json(e, kp, shape)
    return MultiForm.from_elements(shape, k, n, entries)


def state_to_json(phi: State) -> dict:
    return {"shape": list(phi.shape.block_dims), "weights": list(phi.weights),
            "densities": [_matrix_to_json(r) for r in phi.densities]}


def to_jsonable(obj: Any) -> Any:
    """Recursively convert library objects and numpy values to JSON types."""
    if isinstance(obj, AlgebraElement):
        return element_to_json(obj)
    if isinstance(obj, ModuleVector):
        return vector_to_json(obj)
    if isinstance(obj, (AModuleMap, CLinearMap)):
        return map_to_json(obj)
    if isinstance(obj, MultiForm):
        return form_to_json(obj)
    if isinstance(obj, State):
        return state_to_json(obj)
    if isinstance(obj, AlgebraShape):
        return list(obj.block_dims)
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _complex_to_json(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FixtureError("$", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FixtureError("$", f"invalid JSON in {path}: {exc.msg} at line {exc.lineno}") from None


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
