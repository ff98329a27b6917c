"""Frame and mesh sizes, poll directions and mesh membership.

Directions are integer vectors ``d``; a poll point around ``x`` is
``x + delta_mesh * scale * d`` where ``scale`` is the per-variable
scaling of the problem. ``|d_i| <= delta_frame / delta_mesh`` keeps every
poll point inside the frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def mesh_size_of(delta_frame: float) -> float:
    if not delta_frame > 0:
        raise ValueError(f"frame size must be positive, got {delta_frame}")
    return min(delta_frame, delta_frame * delta_frame)


@dataclass(frozen=True)
class MeshState:
    delta_frame: float
    tau: float = 0.5
    delta0: float = 1.0
    anchor: np.ndarray | None = None
    scale: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        mesh_size_of(self.delta_frame)

    @property
    def delta_mesh(self) -> float:
        return mesh_size_of(self.delta_frame)

    def shrink(self) -> "MeshState":
        return MeshState(self.tau * self.delta_frame, self.tau, self.delta0, self.anchor, self.scale)

    def enlarge(self) -> "MeshState":
        return MeshState(self.delta_frame / self.tau, self.tau, self.delta0, self.anchor, self.scale)

    def point(self, direction) -> np.ndarray:
        step = self.delta_mesh * np.asarray(direction, dtype=float)
        if self.scale is not None:
            step = step * self.scale
        return np.asarray(self.anchor, dtype=float) + step


@dataclass(frozen=True)
class PollDirectionSet:
    directions: np.ndarray  # one integer direction per row

    @property
    def count(self) -> int:
        return self.directions.shape[0]

    def __iter__(self):
        return iter(self.directions)


def positively_spans(basis: np.ndarray, extra: np.ndarray) -> bool:
    """True when the columns of ``basis`` (invertible) plus ``extra`` positively span R^n."""
    try:
        lam = np.linalg.solve(basis, extra)
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(lam < 0))


def _frame_round(v: np.ndarray, ell: int) -> np.ndarray:
    """Scale ``v`` to infinity norm ``ell`` and truncate toward zero."""
    raw = ell * v / np.max(np.abs(v))
    d = np.trunc(raw)
    if not np.any(d):
        i = int(np.argmax(np.abs(raw)))
        d[i] = np.sign(raw[i])
    return d.astype(np.int64)


def _signed_permutation(h: np.ndarray, ell: int) -> np.ndarray:
    """Fallback basis: each column takes a distinct coordinate, greedily by |H_ij|."""
    n = h.shape[0]
    cols = np.zeros((n, n), dtype=np.int64)
    free_rows = set(range(n))
    order = np.argsort(-np.abs(h), axis=None, kind="stable")
    assigned = set()
    for flat in order:
        i, j = divmod(int(flat), n)
        if j in assigned or i not in free_rows:
            continue
        cols[i, j] = ell if h[i, j] >= 0 else -ell
        assigned.add(j)
        free_rows.discard(i)
        if len(assigned) == n:
            break
    return cols


def generate_poll_directions(n: int, delta_frame: float, delta_mesh: float,
                             rng_seed: int, count: int | None = None) -> PollDirectionSet:
    """Householder-based integer poll directions.

    ``count`` is ``n + 1`` (a minimal positive spanning set) or 2 (a single
    direction and its negation).
    """
    if count is None:
        count = n + 1
    if n < 1:
        raise ValueError("n must be at least 1")
    if count not in (n + 1, 2):
        raise ValueError(f"count must be n+1={n + 1} or 2, got {count}")
    if delta_mesh > delta_frame * (1 + 1e-12):
        raise ValueError("mesh size exceeds frame size")
    ell = max(1, int(np.floor(delta_frame / delta_mesh + 1e-9)))

    rng = np.random.default_rng(rng_seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    householder = np.eye(n) - 2.0 * np.outer(v, v)

    basis = np.column_stack([_frame_round(householder[:, j], ell) for j in range(n)])
    last = -basis.sum(axis=1)
    if np.max(np.abs(last)) > ell:
        last = _frame_round(last.astype(float), ell)
    if abs(np.linalg.det(basis.astype(float))) < 0.5 or not positively_spans(basis.astype(float), last.astype(float)):
        basis = _signed_permutation(householder, ell)
        last = -basis.sum(axis=1)

    if count == 2:
        d = basis[:, 0]
        dirs = np.vstack([d, -d])
    else:
        dirs = np.vstack([basis.T, last])
    return PollDirectionSet(dirs.astype(np.int64))


def on_mesh(x, anchor, delta_mesh: float, scale=None) -> bool:
    if not delta_mesh > 0:
        raise ValueError("mesh size must be positive")
    x = np.asarray(x, dtype=float)
    step = delta_mesh * (np.ones_like(x) if scale is None else np.asarray(scale, dtype=float))
    offset = x - np.asarray(anchor, dtype=float)
    # residual measured in decision-space units so tiny meshes do not amplify rounding noise
    residual = offset - step * np.round(offset / step)
    tol = 1e-10 * max(1.0, float(np.max(np.abs(x))) if x.size else 1.0)
    return bool(np.all(np.abs(residual) <= tol))
