"""Decision procedures for the orthogonality relations on A^k.

Every check returns an :class:`OrthogonalityVerdict`.  ``margin`` is the
signed value at the deciding point (for example ``min ||x + lam y|| - ||x||``)
and ``threshold`` the slack allowed for it, so ``holds == margin >= -threshold``.

The norm-inequality characterisations are infima of non-convex functions of
``a``; they are searched from a fixed, seeded set of ten starting points.
Two of the starts are analytic: ``a = 0`` and ``a = <x,y>/lam`` where ``lam``
minimises ``||x<x,y> + lam y||``.  Whenever ``<x,y> != 0`` this second start
already violates all three conditions, so a missed global minimum can only
produce a false "holds" on a non-orthogonal pair, which the cross-checks
against :func:`ip_orthogonal` expose.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .algebra import AlgebraElement, State, random_complex
from .module import (
    DEFAULT_TOLERANCES,
    ModuleVector,
    ToleranceConfig,
    inner_product,
    vector_norm,
)

__all__ = [
    "Relation",
    "OrthogonalityVerdict",
    "ip_orthogonal",
    "bj_orthogonal_minimize",
    "bj_orthogonal_witness",
    "strong_bj_orthogonal",
    "reversed_action_condition",
    "squared_modulus_condition",
    "modulus_condition",
    "bj_symmetry_probe",
    "make_bj_pair",
    "sample_orthogonal_pair",
    "N_STARTS",
]

N_STARTS = 10
# Local searches stay inside ||a|| <= BOX_SCALE * max(1, ||y||/||x||).
BOX_SCALE = 1e4


class Relation(str, enum.Enum):
    INNER_PRODUCT = "InnerProduct"
    BIRKHOFF_JAMES = "BirkhoffJames"
    STRONG_BJ = "StrongBJ"
    REVERSED_ACTION = "ReversedAction"
    MODULUS = "Modulus"
    SQUARED_MODULUS = "SquaredModulus"


@dataclass
class OrthogonalityVerdict:
    relation: Relation
    holds: bool
    margin: float
    threshold: float = 0.0
    value: float | None = None
    witness: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.relation = Relation(self.relation)
        self.holds = bool(self.holds)
        self.margin = float(self.margin)
        self.threshold = float(self.threshold)


def _cfg(cfg: ToleranceConfig | None) -> ToleranceConfig:
    return DEFAULT_TOLERANCES if cfg is None else cfg


def _stacks(x: ModuleVector) -> list[np.ndarray]:
    return [x.stacked(i) for i in range(x.shape.n_blocks)]


def _spec_norm(m: np.ndarray) -> float:
    """Largest singular value, via the d x d Gram matrix for thin matrices."""
    d = m.shape[1]
    if d == 1:
        return float(np.sqrt(np.vdot(m, m).real))
    g = m.conj().T @ m
    if d == 2:
        a, c = g[0, 0].real, g[1, 1].real
        b2 = abs(g[0, 1]) ** 2
        top = 0.5 * (a + c) + np.sqrt(0.25 * (a - c) ** 2 + b2)
        return float(np.sqrt(max(top, 0.0)))
    return float(np.sqrt(max(np.linalg.eigvalsh(g)[-1], 0.0)))


def ip_orthogonal(x: ModuleVector, y: ModuleVector, cfg: ToleranceConfig | None = None):
    cfg = _cfg(cfg)
    c = inner_product(x, y)
    bound = cfg.eq_tol * (1.0 + vector_norm(x) * vector_norm(y))
    size = c.norm()
    margin = bound - size
    return OrthogonalityVerdict(
        Relation.INNER_PRODUCT, margin >= 0, margin, 0.0, size, {"inner_product": c}
    )


# --- Birkhoff-James orthogonality --------------------------------------------


def _bj_objective(xs, ys):
    def f(lam: complex) -> float:
        return max(_spec_norm(a + lam * b) for a, b in zip(xs, ys))

    return f


def _bj_grid(xs, ys, radius: float, n: int):
    axis = np.linspace(-radius, radius, n)
    re, im = np.meshgrid(axis, axis)
    lams = (re + 1j * im).ravel()
    lams = lams[np.abs(lams) <= radius * (1 + 1e-12)]
    vals = np.zeros(lams.size)
    for a, b in zip(xs, ys):
        batch = a[None, :, :] + lams[:, None, None] * b[None, :, :]
        vals = np.maximum(vals, np.linalg.norm(batch, 2, axis=(1, 2)))
    return lams, vals


def _nelder_mead_2d(f, z0: complex, step: float, tol_x: float, tol_f: float, restarts: int = 3):
    """Minimise f over the complex plane from ``z0``, restarting with shrinking simplices."""

    def g(v):
        return f(complex(v[0], v[1]))

    best_z, best_f = z0, f(z0)
    for r in range(restarts):
        s = step * 0.1**r
        simplex = np.array([[best_z.real, best_z.imag],
                            [best_z.real + s, best_z.imag],
                            [best_z.real, best_z.imag + s]])
        res = minimize(g, simplex[0], method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": tol_x,
                                "fatol": tol_f, "maxiter": 400})
        if res.fun < best_f:
            best_z, best_f = complex(res.x[0], res.x[1]), float(res.fun)
    return best_z, best_f


def bj_minimize_value(x: ModuleVector, y: ModuleVector, cfg: ToleranceConfig | None = None,
                      grid: int = 21):
    """(min over complex lam of ||x + lam y||, argmin)."""
    cfg = _cfg(cfg)
    xs, ys = _stacks(x), _stacks(y)
    nx = max(_spec_norm(a) for a in xs)
    ny = max(_spec_norm(b) for b in ys)
    if ny == 0.0 or nx == 0.0:
        return nx, 0j
    f = _bj_objective(xs, ys)
    # Outside |lam| <= 2||x||/||y|| the objective exceeds ||x||, so the box is exact.
    radius = 2.0 * nx / ny
    lams, vals = _bj_grid(xs, ys, radius, grid)
    j = int(np.argmin(vals))
    z0, f0 = complex(lams[j]), float(vals[j])
    if nx <= f0:
        z0, f0 = 0j, nx
    step = 2.0 * radius / (grid - 1)
    z, fz = _nelder_mead_2d(f, z0, step, tol_x=cfg.opt_tol * radius * 1e-3,
                            tol_f=cfg.opt_tol * nx * 1e-3)
    if fz < f0:
        return fz, z
    return f0, z0


def bj_orthogonal_minimize(x: ModuleVector, y: ModuleVector,
                           cfg: ToleranceConfig | None = None, grid: int = 21):
    """x ⊥_B y decided by direct minimisation of ||x + lam y|| over lam."""
    cfg = _cfg(cfg)
    nx = vector_norm(x)
    if vector_norm(y) == 0.0:
        return OrthogonalityVerdict(Relation.BIRKHOFF_JAMES, True, 0.0,
                                    cfg.opt_tol * max(1.0, nx), nx, {"lambda": 0j})
    mu, lam = bj_minimize_value(x, y, cfg, grid)
    threshold = cfg.opt_tol * max(1.0, nx)
    margin = mu - nx
    return OrthogonalityVerdict(Relation.BIRKHOFF_JAMES, margin >= -threshold, margin,
                                threshold, mu, {"lambda": lam})


def _norming_compression(x: ModuleVector, y: ModuleVector, psd_tol: float):
    """Compress <x,y> to the top eigenspace of <x,x> (across all blocks).

    Returns (M, bases) where M is block diagonal of size r and ``bases[i]``
    is the ``d_i x r_i`` isometry onto the kept eigenvectors of block i.
    """
    gram = inner_product(x, x)
    cross = inner_product(x, y)
    eig = [np.linalg.eigh(0.5 * (g + g.conj().T)) for g in gram.blocks]
    top = max(w[-1] for w, _ in eig)
    cutoff = top - psd_tol * top
    bases, pieces = [], []
    for (w, v), c in zip(eig, cross.blocks):
        keep = v[:, w >= cutoff]
        bases.append(keep)
        if keep.shape[1]:
            pieces.append(keep.conj().T @ c @ keep)
    r = sum(p.shape[0] for p in pieces)
    m = np.zeros((r, r), dtype=complex)
    pos = 0
    for p in pieces:
        n = p.shape[0]
        m[pos:pos + n, pos:pos + n] = p
        pos += n
    return m, bases, top


def _hermitian_rotations(m: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    rot = np.exp(1j * thetas)[:, None, None]
    return 0.5 * (rot * m[None] + np.conj(rot) * m.conj().T[None])


def _lift(xi: np.ndarray, bases) -> list[np.ndarray]:
    """Spread a vector on the compressed space back over the algebra blocks."""
    parts, pos = [], 0
    for basis in bases:
        r = basis.shape[1]
        parts.append(basis @ xi[pos:pos + r] if r else np.zeros(basis.shape[0], dtype=complex))
        pos += r
    return parts


def _zero_state(m: np.ndarray, n_theta: int, target: float):
    """Unit vectors and convex weights with sum_t w_t xi_t^* M xi_t ~ 0.

    Assumes 0 lies in the numerical range of ``m``.  For each direction theta
    the extreme eigenvectors of Re(e^{i theta} M) give two points of the
    range on either side of the line Re(e^{i theta} z) = 0; the chord between
    them meets that line at p(theta).  p(theta + pi) mirrors p(theta), so a
    sign change of Im(e^{i theta} p) on [0, pi] is bisected to p = 0.
    """
    r = m.shape[0]
    if r == 1:
        return [np.ones(1, dtype=complex)], [1.0]

    def chord(theta):
        h = 0.5 * (np.exp(1j * theta) * m + np.exp(-1j * theta) * m.conj().T)
        w, u = np.linalg.eigh(h)
        hi, lo = u[:, -1], u[:, 0]
        z_hi, z_lo = hi.conj() @ m @ hi, lo.conj() @ m @ lo
        gap = w[-1] - w[0]
        t = 0.5 if gap <= 1e-300 else min(1.0, max(0.0, -w[0] / gap))
        p = t * z_hi + (1 - t) * z_lo
        s = float((np.exp(1j * theta) * p).imag)
        return s, p, ([hi, lo], [t, 1 - t])

    thetas = np.linspace(0.0, np.pi, n_theta // 2 + 1)
    evals = [chord(t) for t in thetas]
    best = min(range(len(evals)), key=lambda j: abs(evals[j][1]))
    if abs(evals[best][1]) <= target:
        return evals[best][2]
    signs = [e[0] for e in evals]
    j = next(j for j in range(len(signs) - 1) if signs[j] == 0 or signs[j] * signs[j + 1] <= 0)
    lo_t, hi_t = thetas[j], thetas[j + 1]
    lo_e, hi_e = evals[j], evals[j + 1]
    for _ in range(80):
        mid = 0.5 * (lo_t + hi_t)
        e = chord(mid)
        if abs(e[1]) <= target:
            return e[2]
        if lo_e[0] * e[0] <= 0:
            hi_t, hi_e = mid, e
        else:
            lo_t, lo_e = mid, e
    # The chord point jumped across 0 at a direction with a multiple extreme
    # eigenvalue; 0 then sits between the two limiting chord points.
    pa, pb = lo_e[1], hi_e[1]
    u = abs(pb) / (abs(pa) + abs(pb)) if abs(pa) + abs(pb) > 0 else 0.5
    vecs = lo_e[2][0] + hi_e[2][0]
    weights = [u * w for w in lo_e[2][1]] + [(1 - u) * w for w in hi_e[2][1]]
    return vecs, weights


def bj_orthogonal_witness(x: ModuleVector, y: ModuleVector,
                          cfg: ToleranceConfig | None = None, n_theta: int = 720):
    """x ⊥_B y decided through states.

    A state attains ||x||^2 on <x,x> exactly when it lives on the top
    eigenspace P of <x,x>, so x ⊥_B y iff 0 lies in the numerical range of the
    compression P<x,y>P, i.e. iff lambda_max(Re(e^{i theta} P<x,y>P)) >= 0 for
    every theta.  On success the witness holds a state phi with
    phi(<x,x>) = ||x||^2 and phi(<x,y>) = 0.
    """
    cfg = _cfg(cfg)
    nx = vector_norm(x)
    if nx == 0.0:
        raise ValueError("state witnesses need x != 0")
    ny = vector_norm(y)
    m, bases, top = _norming_compression(x, y, cfg.psd_tol)
    threshold = cfg.psd_tol * max(nx * ny, 1e-300)
    if ny == 0.0:
        support, value = 0.0, 0.0
    else:
        thetas = 2 * np.pi * np.arange(n_theta) / n_theta
        lmax = np.linalg.eigvalsh(_hermitian_rotations(m, thetas))[:, -1]
        j = int(np.argmin(lmax))
        support, value = float(thetas[j]), float(lmax[j])
        step = 2 * np.pi / n_theta
        res = minimize_scalar(
            lambda t: float(np.linalg.eigvalsh(_hermitian_rotations(m, np.array([t])))[0, -1]),
            bounds=(support - step, support + step), method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < value:
            support, value = float(res.x), float(res.fun)
    holds = value >= -threshold
    witness: dict[str, Any] = {"theta": support}
    if holds:
        target = 1e-3 * threshold if ny else 1.0
        vecs, weights = _zero_state(m, n_theta, target)
        state = State.mixture(x.shape, [_lift(v, bases) for v in vecs], weights)
        witness["state"] = state
        witness["phi_xx"] = state(inner_product(x, x)).real
        witness["phi_xy"] = state(inner_product(x, y))
    return OrthogonalityVerdict(Relation.BIRKHOFF_JAMES, holds, value, threshold, value, witness)


# --- strong Birkhoff-James orthogonality --------------------------------------


def _nm(f, x0: np.ndarray, step: float, maxfev: int, fatol: float, stop_below: float | None = None):
    """Nelder-Mead from x0 with an axis-aligned simplex; returns (x, f(x))."""
    n = x0.size
    simplex = np.vstack([x0, x0 + step * np.eye(n)])
    calls = {"best": (x0, f(x0))}

    def tracked(v):
        val = f(v)
        if val < calls["best"][1]:
            calls["best"] = (v.copy(), val)
        if stop_below is not None and val < stop_below:
            raise StopIteration
        return val

    try:
        minimize(tracked, x0, method="Nelder-Mead",
                 options={"initial_simplex": simplex, "maxfev": maxfev,
                          "xatol": 1e-12, "fatol": fatol})
    except StopIteration:
        pass
    return calls["best"]


def strong_bj_orthogonal(x: ModuleVector, y: ModuleVector,
                         cfg: ToleranceConfig | None = None, maxfev: int = 4000):
    """x ⊥ˢ_B y: min over a of ||x + y a|| compared with ||x||.

    ||x + ya|| is the maximum over blocks of ||X_b + Y_b a_b|| and each a_b
    enters one block only, so the minimum is the maximum of per-block minima.
    Each block is a convex problem solved by Nelder-Mead from a = 0 and from
    the least-squares point a = -Y_b^+ X_b, with the pseudo-inverse cut off
    at eq_tol relative to ||Y_b||.
    """
    cfg = _cfg(cfg)
    nx = vector_norm(x)
    xs, ys = _stacks(x), _stacks(y)
    best_blocks, per_block = [], []
    for xb, yb in zip(xs, ys):
        d = xb.shape[1]

        def f(v, xb=xb, yb=yb, d=d):
            a = (v[: d * d] + 1j * v[d * d:]).reshape(d, d)
            return _spec_norm(xb + yb @ a)

        # directions of y below eq_tol are noise, not room to cancel x
        starts = [np.zeros((d, d), dtype=complex), -np.linalg.pinv(yb, rcond=cfg.eq_tol) @ xb]
        scale = max(1.0, nx / max(_spec_norm(yb), 1e-300))
        candidates = []
        for a0 in starts:
            v0 = np.concatenate([a0.ravel().real, a0.ravel().imag])
            v, val = _nm(f, v0, 0.1 * scale, maxfev, cfg.opt_tol * 1e-3 * max(1.0, nx))
            v, val = _nm(f, v, 0.01 * scale, maxfev, cfg.opt_tol * 1e-3 * max(1.0, nx))
            candidates.append((val, v))
        val, v = min(candidates, key=lambda t: t[0])
        per_block.append(val)
        best_blocks.append((v[: d * d] + 1j * v[d * d:]).reshape(d, d))
    mu = max(per_block)
    threshold = cfg.opt_tol * max(1.0, nx)
    a = AlgebraElement(x.shape, best_blocks)
    return OrthogonalityVerdict(Relation.STRONG_BJ, mu - nx >= -threshold, mu - nx,
                                threshold, mu, {"a": a})


# --- the reversed-action and modulus characterisations ------------------------


_REVERSAL_CACHE: dict = {}


def _reversal_start(x: ModuleVector, y: ModuleVector, cfg: ToleranceConfig):
    """a = <x,y>/lam with lam minimising ||x<x,y> + lam y||, or None if unusable.

    The three conditions share this start for a given pair, so the last few
    results are kept.
    """
    key = (x.flatten().tobytes(), y.flatten().tobytes(), cfg)
    if key not in _REVERSAL_CACHE:
        if len(_REVERSAL_CACHE) >= 8:
            _REVERSAL_CACHE.pop(next(iter(_REVERSAL_CACHE)))
        _REVERSAL_CACHE[key] = _compute_reversal_start(x, y, cfg)
    return _REVERSAL_CACHE[key]


def _compute_reversal_start(x: ModuleVector, y: ModuleVector, cfg: ToleranceConfig):
    c = inner_product(x, y)
    u = x @ c
    if vector_norm(u) == 0.0 or vector_norm(y) == 0.0:
        return None
    mu, lam = bj_minimize_value(u, y, cfg)
    if lam == 0 or mu >= vector_norm(u):
        return None
    return c / lam


def _unpack(v: np.ndarray, dims) -> list[np.ndarray]:
    n = v.size // 2
    flat = v[:n] + 1j * v[n:]
    out, pos = [], 0
    for d in dims:
        out.append(flat[pos:pos + d * d].reshape(d, d))
        pos += d * d
    return out


def _pack(blocks) -> np.ndarray:
    flat = np.concatenate([np.asarray(b).ravel() for b in blocks])
    return np.concatenate([flat.real, flat.imag])


def _search(objective: Callable[[list], float], dims, starts, box: float,
            stop_below: float, maxfev: int, step: float):
    """Multi-start local minimisation over a with ||a||_F <= box.

    ``starts`` are lists of blocks.  All starts are evaluated first, then
    refined in order; the search stops at the first value below
    ``stop_below`` (a certain violation).  Ties keep the earliest start.
    Returns (value, blocks, start index).
    """
    def clip(v):
        n = float(np.linalg.norm(v))
        return (v * (box / n), n - box) if n > box else (v, 0.0)

    def f(v):
        v, excess = clip(v)
        return objective(_unpack(v, dims)) + excess

    coords = [_pack(s) for s in starts]
    values = [f(v0) for v0 in coords]
    idx = int(np.argmin(values))
    best = (values[idx], coords[idx], idx)
    for i, v0 in enumerate(coords):
        if best[0] < stop_below:
            break
        v, val = _nm(f, v0, step, maxfev, 1e-14, stop_below)
        if val < best[0] - 1e-12 * max(1.0, abs(best[0])):
            best = (val, v, i)
    val, v, idx = best
    v, excess = clip(v)
    if excess:
        val = objective(_unpack(v, dims))
    return float(val), _unpack(v, dims), idx


def _condition_setup(x, y, cfg, seed):
    nx, ny = vector_norm(x), vector_norm(y)
    scale = max(ny, 1e-12) / max(nx, 1e-12)
    box = BOX_SCALE * max(1.0, scale)
    rng = np.random.default_rng(seed)
    rev = _reversal_start(x, y, cfg) if nx > 0 else None
    if rev is not None and rev.norm() > box:
        rev = rev * (box / rev.norm())
    return nx, ny, scale, box, rng, rev


def _starts(x, rng, scale, analytic):
    starts = [list(a.blocks) for a in analytic if a is not None]
    while len(starts) < N_STARTS:
        starts.append([scale * random_complex(rng, (d, d)) for d in x.shape.block_dims])
    return starts


def reversed_action_condition(x: ModuleVector, y: ModuleVector,
                              cfg: ToleranceConfig | None = None, seed: int = 0,
                              maxfev: int = 40):
    """∀a ||xa + y|| >= ||xa||, via the infimum of ||xa + y|| - ||xa||."""
    cfg = _cfg(cfg)
    nx, ny, scale, box, rng, rev = _condition_setup(x, y, cfg, seed)
    zero = AlgebraElement.zeros(x.shape)
    threshold = cfg.opt_tol * max(1.0, ny)
    if nx == 0.0:
        return OrthogonalityVerdict(Relation.REVERSED_ACTION, True, ny, threshold, ny, {"a": zero})
    xs, ys = _stacks(x), _stacks(y)

    def g(blocks) -> float:
        xa = [xb @ ab for xb, ab in zip(xs, blocks)]
        return (max(_spec_norm(p + q) for p, q in zip(xa, ys))
                - max(_spec_norm(p) for p in xa))

    starts = _starts(x, rng, scale, [zero, rev])
    val, blocks, idx = _search(g, x.shape.block_dims, starts, box, -10 * threshold, maxfev,
                               0.25 * scale)
    return OrthogonalityVerdict(Relation.REVERSED_ACTION, val >= -threshold, val, threshold, val,
                                {"a": AlgebraElement(x.shape, blocks), "start": idx})


def _blockwise_condition(relation, x, y, cfg, seed, threshold, make_objective, extra_start,
                         maxfev):
    """Infimum of min over blocks of lambda_min(h_b(a_b)); each block searched on its own."""
    nx, ny, scale, box, rng, rev = _condition_setup(x, y, cfg, seed)
    shape = x.shape
    zero = AlgebraElement.zeros(shape)
    starts = _starts(x, rng, scale, [zero, rev, extra_start])
    best_val, best_blocks = np.inf, [np.zeros((d, d), dtype=complex) for d in shape.block_dims]
    for i, d in enumerate(shape.block_dims):
        obj = make_objective(i)
        val, blocks, _ = _search(lambda b, obj=obj: obj(b[0]), (d,), [[s[i]] for s in starts],
                                 box, -10 * threshold, maxfev, 0.25 * scale)
        best_blocks[i] = blocks[0]
        best_val = min(best_val, val)
        if best_val < -10 * threshold:
            break
    a = AlgebraElement(shape, best_blocks)
    return OrthogonalityVerdict(relation, best_val >= -threshold, best_val, threshold, best_val,
                                {"a": a})


def _lambda_min(h: np.ndarray) -> float:
    if h.shape[0] == 1:
        return float(h[0, 0].real)
    if h.shape[0] == 2:
        p, q = h[0, 0].real, h[1, 1].real
        off = 0.5 * (h[0, 1] + h[1, 0].conjugate())
        return float(0.5 * (p + q) - np.sqrt(0.25 * (p - q) ** 2 + abs(off) ** 2))
    return float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])


def squared_modulus_condition(x: ModuleVector, y: ModuleVector,
                              cfg: ToleranceConfig | None = None, seed: int = 0,
                              maxfev: int = 40):
    """∀a |xa + y|^2 >= |xa|^2, i.e. lambda_min(a*<x,y> + <y,x>a + |y|^2) >= 0.

    The objective is linear in a, so an inner product that is zero only up to
    roundoff would still be driven below zero by large a.  The search therefore
    adds rho ||a|| with rho = 2 eq_tol (1 + ||x|| ||y||): exactly the inner
    products that :func:`ip_orthogonal` accepts as zero cannot be amplified.
    """
    cfg = _cfg(cfg)
    c = inner_product(x, y)
    yy = inner_product(y, y)
    ny = vector_norm(y)
    threshold = cfg.psd_tol * max(1.0, ny**2)
    rho = 2.0 * cfg.eq_tol * (1.0 + vector_norm(x) * ny)
    cn = c.norm()
    extra = None
    if cn > 0:
        extra = c * (-2.0 * max(ny**2, 1e-12) / cn**2)

    def make(i):
        cb, yb = c.blocks[i], yy.blocks[i]
        cbh = cb.conj().T

        def obj(ab):
            return _lambda_min(ab.conj().T @ cb + cbh @ ab + yb) + rho * _spec_norm(ab)

        return obj

    return _blockwise_condition(Relation.SQUARED_MODULUS, x, y, cfg, seed, threshold, make,
                                extra, maxfev)


def _abs_stacked(m: np.ndarray) -> np.ndarray:
    if m.shape[1] == 1:
        return np.array([[np.linalg.norm(m)]], dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=False)
    return (vh.conj().T * s) @ vh


def modulus_condition(x: ModuleVector, y: ModuleVector,
                      cfg: ToleranceConfig | None = None, seed: int = 0, maxfev: int = 40):
    """∀a |xa + y| >= |xa|, i.e. lambda_min(|xa + y| - |xa|) >= 0."""
    cfg = _cfg(cfg)
    ny = vector_norm(y)
    threshold = cfg.psd_tol * max(1.0, ny)
    xs, ys = _stacks(x), _stacks(y)

    def make(i):
        xb, yb = xs[i], ys[i]

        def obj(ab):
            xa = xb @ ab
            return _lambda_min(_abs_stacked(xa + yb) - _abs_stacked(xa))

        return obj

    return _blockwise_condition(Relation.MODULUS, x, y, cfg, seed, threshold, make, None, maxfev)


# --- symmetry of Birkhoff-James orthogonality ---------------------------------


def sample_orthogonal_pair(shape, k: int, rng: np.random.Generator,
                           cfg: ToleranceConfig | None = None, tries: int = 10):
    """Random (x, y) with <x, y> = 0.

    y is corrected by y <- y - x (<x,x> + eps)^{-1} <x,y>, eps = 1e-12 ||x||^2,
    and the pair is kept once ||<x,y>|| <= eq_tol (1 + ||x|| ||y||).  On A^1 the
    correction would annihilate y whenever x is invertible, so there each block
    of x first gets a random rank.
    """
    from .algebra import AlgebraShape, try_inverse

    cfg = _cfg(cfg)
    shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
    for _ in range(tries):
        x = ModuleVector.random(shape, k, rng)
        y = ModuleVector.random(shape, k, rng)
        y0_norm = vector_norm(y)
        if k == 1:
            blocks = []
            for blk in x.blocks:
                d = blk.shape[1]
                q, _ = np.linalg.qr(random_complex(rng, (d, d)))
                r = int(rng.integers(0, d + 1))
                blocks.append(blk @ (q[:, :r] @ q[:, :r].conj().T))
            x = ModuleVector(shape, blocks)
        for _ in range(3 if vector_norm(x) > 0 else 0):
            g = inner_product(x, x)
            eps = 1e-12 * max(g.norm(), 1e-300)
            corr = try_inverse(g + AlgebraElement.scalar(shape, eps), 0.0) @ inner_product(x, y)
            y = y - x @ corr
        # blocks where x was invertible keep only roundoff; make them exactly zero
        floor = cfg.eq_tol * max(1.0, y0_norm)
        y = ModuleVector(shape, [np.zeros_like(b) if _spec_norm(b.reshape(-1, b.shape[-1])) <= floor
                                 else b for b in y.blocks])
        if ip_orthogonal(x, y, cfg).holds:
            return x, y
    raise RuntimeError("could not construct an orthogonal pair")


def make_bj_pair(x: ModuleVector, y: ModuleVector) -> ModuleVector:
    """Shift y along x so that x ⊥_B y.

    With phi the vector state of a top eigenvector of <x,x>, the returned
    y - (phi(<x,y>)/||x||^2) x satisfies phi(<x,x>) = ||x||^2 and
    phi(<x, y'>) = 0.
    """
    gram = inner_product(x, x)
    best = None
    for i, g in enumerate(gram.blocks):
        w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
        if best is None or w[-1] > best[0]:
            best = (w[-1], i, v[:, -1])
    top, block, vec = best
    phi = State.pure(x.shape, block, vec)
    beta = phi(inner_product(x, y)) / top
    return y - beta * x


def bj_symmetry_probe(shape, k: int, trials: int, cfg: ToleranceConfig | None = None,
                      seed: int = 0, min_gap: float = 0.1, stop_at_first: bool = True):
    """Search for x ⊥_B y with ||x + y|| < ||y||.

    Returns a dict with the number of BJ pairs tested and every
    counterexample found (pairs whose gap ||y|| - ||x + y|| exceeds
    ``min_gap`` and which both BJ procedures confirm).  Confirmed pairs
    with a smaller positive gap are only counted.
    """
    from .algebra import AlgebraShape

    cfg = _cfg(cfg)
    shape = shape if isinstance(shape, AlgebraShape) else AlgebraShape(shape)
    rng = np.random.default_rng(seed)
    tested, found, weak = 0, [], 0
    for t in range(trials):
        x = ModuleVector.random(shape, k, rng)
        y = ModuleVector.random(shape, k, rng) * rng.uniform(0.5, 3.0)
        y = make_bj_pair(x, y)
        tested += 1
        gap = vector_norm(y) - vector_norm(x + y)
        if gap <= cfg.opt_tol * max(1.0, vector_norm(y)):
            continue
        v_min = bj_orthogonal_minimize(x, y, cfg)
        v_wit = bj_orthogonal_witness(x, y, cfg)
        if not (v_min.holds and v_wit.holds):
            continue
        if gap < min_gap:
            weak += 1
        else:
            found.append({"trial": t, "x": x, "y": y, "gap": gap,
                          "norm_x_plus_y": vector_norm(x + y), "norm_y": vector_norm(y)})
            if stop_at_first:
                break
    return {"tested": tested, "counterexamples": found, "weak_counterexamples": weak}
