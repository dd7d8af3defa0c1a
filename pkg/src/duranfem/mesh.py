"""Recursively graded Durán-type meshes on [0, 2].

The (0, 1) half carries ``ceil(1/H)`` uniform cells of width ``H*eps`` followed
by geometric growth with ratio ``1 + H`` up to the node at 1.  The (1, 2) half
is either an exact mirror (standard variant) or a coarser copy whose fine
cells have width ``H*eps**((k-1)/k)`` (coarse variant).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Variant",
    "MeshParams",
    "Mesh1D",
    "compute_M",
    "compute_M2",
    "build_standard",
    "build_coarse",
    "build_mesh",
    "check_coarse_assumption",
    "check_mesh",
    "MeshError",
]


class MeshError(ValueError):
    """Invalid mesh parameters or a violated mesh invariant."""


class Variant(str, enum.Enum):
    STANDARD = "standard"
    COARSE = "coarse"


@dataclass(frozen=True)
class MeshParams:
    H: float
    epsilon: float
    degree: int = 1
    variant: Variant = Variant.STANDARD
    omission_theta: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not 0.0 < self.H < 1.0:
            raise MeshError(f"H must lie in (0, 1), got {self.H}")
        if not 0.0 < self.epsilon < 1.0:
            raise MeshError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise MeshError(f"degree must be an integer >= 1, got {self.degree}")
        if not 0.0 < self.omission_theta < 1.0:
            raise MeshError(f"omission_theta must lie in (0, 1), got {self.omission_theta}")

    @property
    def n_fine(self) -> int:
        """Number of uniform fine cells, ``ceil(1/H)``."""
        return math.ceil(1.0 / self.H)


@dataclass(frozen=True)
class Mesh1D:
    nodes: np.ndarray
    M: int
    M2: int
    params: MeshParams
    omitted: tuple = field(default=())

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_cells(self) -> int:
        return len(self.nodes) - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def variant(self) -> Variant:
        return self.params.variant

    def cells(self) -> np.ndarray:
        """Array of shape (n_cells, 2) with the cell endpoints."""
        return np.column_stack([self.nodes[:-1], self.nodes[1:]])

    def locate(self, x) -> np.ndarray:
        """Index of the cell containing ``x``; interior nodes belong to the left cell."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.nodes, x, side="left") - 1
        return np.clip(idx, 0, self.n_cells - 1)

    def h_bound_ratio(self) -> float:
        """Diagnostic ``H * N / ln(1/eps)``; stays bounded as H shrinks."""
        return self.params.H * self.n_cells / math.log(1.0 / self.params.epsilon)

    def to_text(self) -> str:
        return "".join(f"{x!r}\n" for x in self.nodes.tolist())

    def to_csv(self) -> str:
        lines = ["index,x,h"]
        h = np.concatenate([[0.0], self.h])
        for i, (x, hi) in enumerate(zip(self.nodes.tolist(), h.tolist())):
            lines.append(f"{i},{x!r},{'' if i == 0 else repr(hi)}")
        return "\n".join(lines) + "\n"

    def write(self, path, fmt: str = "csv") -> None:
        text = self.to_csv() if fmt == "csv" else self.to_text()
        Path(path).write_text(text)


def _graded_count(H: float, fine_width: float) -> int:
    n = math.ceil(1.0 / H)
    arg = fine_width * n
    if arg <= 0.0:
        raise MeshError(f"logarithm argument must be positive, got {arg}")
    return math.ceil(n - math.log(arg) / math.log1p(H))


def compute_M(H: float, epsilon: float) -> int:
    """Index of the node at 1 for the standard Durán mesh."""
    n = math.ceil(1.0 / H)
    arg = H * epsilon * n
    if not 0.0 < arg < 1.0:
        raise MeshError(f"H*eps*ceil(1/H) must lie in (0, 1), got {arg}")
    return _graded_count(H, H * epsilon)


def compute_M2(H: float, epsilon: float, degree: int) -> int:
    """Number of cells in (1, 2) for the coarse variant.

    Falls back to ``ceil(1/H)`` equidistant cells when the fine cells already
    cover (1, 2), which happens for ``degree == 1``.
    """
    if degree < 1:
        raise MeshError(f"degree must be >= 1, got {degree}")
    n = math.ceil(1.0 / H)
    width = H * epsilon ** ((degree - 1) / degree)
    arg = width * n
    if arg <= 0.0:
        raise MeshError(f"logarithm argument must be positive, got {arg}")
    if arg >= 1.0:
        return n
    return _graded_count(H, width)


def _graded_half(n: int, count: int, width: float, H: float) -> list[float]:
    """Offsets x_0..x_count of one half, mapped onto [0, 1]."""
    pts = [0.0]
    for i in range(1, count):
        if i <= n:
            pts.append(i * width)
        else:
            pts.append((1.0 + H) * pts[-1])
    pts.append(1.0)
    return pts


def _apply_omission(pts: list[float], H: float, theta: float) -> bool:
    # Merge the last cell into its neighbour only if the merged cell stays <= H.
    if len(pts) < 3:
        return False
    last = pts[-1] - pts[-2]
    prev = pts[-2] - pts[-3]
    if last < theta * prev and pts[-1] - pts[-3] <= H:
        del pts[-2]
        return True
    return False


def build_standard(params: MeshParams) -> Mesh1D:
    if params.variant is not Variant.STANDARD:
        raise MeshError("build_standard requires the standard variant")
    H, eps = params.H, params.epsilon
    M = compute_M(H, eps)
    left = _graded_half(params.n_fine, M, H * eps, H)
    omitted = ()
    if _apply_omission(left, H, params.omission_theta):
        omitted = (M - 1, 2 * M - 1)
    M = len(left) - 1
    nodes = np.array(left + [1.0 + x for x in left[1:]])
    return Mesh1D(nodes=nodes, M=M, M2=M, params=params, omitted=omitted)


def build_coarse(params: MeshParams) -> Mesh1D:
    if params.variant is not Variant.COARSE:
        raise MeshError("build_coarse requires the coarse variant")
    H, eps, k = params.H, params.epsilon, params.degree
    M = compute_M(H, eps)
    M2 = compute_M2(H, eps, k)
    left = _graded_half(params.n_fine, M, H * eps, H)
    omitted = []
    if _apply_omission(left, H, params.omission_theta):
        omitted.append(M - 1)
    M = len(left) - 1
    right = _graded_half(params.n_fine, M2, H * eps ** ((k - 1) / k), H)
    if _apply_omission(right, H, params.omission_theta):
        omitted.append(M + M2 - 1)
    M2 = len(right) - 1
    nodes = np.array(left + [1.0 + x for x in right[1:]])
    nodes[-1] = 2.0
    return Mesh1D(nodes=nodes, M=M, M2=M2, params=params, omitted=tuple(omitted))


def build_mesh(params: MeshParams) -> Mesh1D:
    if params.variant is Variant.STANDARD:
        return build_standard(params)
    return build_coarse(params)


def check_coarse_assumption(params: MeshParams) -> bool:
    """Whether ``exp(-eps**(-1/k)) <= H**(k-1)`` holds."""
    k = params.degree
    return math.exp(-params.epsilon ** (-1.0 / k)) <= params.H ** (k - 1)


def check_mesh(mesh: Mesh1D, ulps: int = 8) -> list[str]:
    """Return a list of violated invariants (empty when the mesh is valid)."""
    p = mesh.params
    x, h = mesh.nodes, mesh.h
    H, eps, n = p.H, p.epsilon, p.n_fine
    problems = []
    if x[0] != 0.0 or x[mesh.M] != 1.0 or x[-1] != 2.0:
        problems.append("endpoints are not 0, 1 (at index M), 2")
    if not np.all(h > 0):
        problems.append("nodes are not strictly increasing")
    if mesh.n_cells != mesh.M + mesh.M2:
        problems.append("cell count differs from M + M2")
    if np.any(h > H * (1 + 1e-14)):
        problems.append("some cell is wider than H")
    if np.any(h < p.omission_theta * H * eps * (1 - 1e-12)):
        problems.append("some cell is narrower than theta*H*eps")

    tol = ulps * np.spacing(x[1:])
    nf = min(n, mesh.M - 1)
    if np.any(np.abs(h[:nf] - H * eps) > tol[:nf]):
        problems.append("fine cells near 0 do not have width H*eps")
    graded = np.arange(nf, mesh.M)
    if np.any(h[graded] > H * x[graded + 1] * (1 + 1e-14)):
        problems.append("graded region violates h_i <= H*x_i near 0")

    if mesh.variant is Variant.STANDARD:
        mirror_tol = ulps * np.spacing(x[mesh.M:])
        if np.any(np.abs(x[mesh.M:] - 1.0 - x[: mesh.M + 1]) > mirror_tol):
            problems.append("standard mesh is not mirrored on (1, 2)")
    else:
        k = p.degree
        width = H * eps ** ((k - 1) / k)
        nf2 = min(n, mesh.M2 - 1)
        hr = h[mesh.M:]
        if np.any(np.abs(hr[:nf2] - width) > tol[mesh.M:mesh.M + nf2]):
            problems.append("fine cells after 1 do not have width H*eps**((k-1)/k)")
        graded = np.arange(mesh.M + nf2, mesh.n_cells)
        if np.any(h[graded] > H * (x[graded + 1] - 1.0) * (1 + 1e-14) + tol[graded]):
            problems.append("graded region violates h_i <= H*(x_i - 1) after 1")
    return problems
