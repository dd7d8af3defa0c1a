"""Continuous P_k Lagrange finite elements on a 1D mesh of [0, 2].

The bilinear form is

    B(u, v) = eps (u', v') + (c u - b u', v) + (dshift u(. - 1), v)_{(1, 2)}

and the load is ``F(v) = (f, v) - (dshift phi(. - 1), v)_{(0, 1)}``.  The shift
term couples test functions on (1, 2) with trial functions on (0, 1); it is
integrated on the overlay of the two half-meshes so that every quadrature
subinterval lies inside one target and one source cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import Mesh1D
from .problem import ProblemSpec

__all__ = [
    "FeSpace",
    "FeFunction",
    "LinearSystem",
    "FemError",
    "SolverError",
    "shape_eval",
    "shape_values",
    "gauss_rule",
    "assemble",
    "overlay",
    "shift_couple",
    "solve",
    "solve_problem",
    "evaluate",
    "default_quad_points",
]

MERGE_TOL = 2e-14
SHIFT_MIN_POINTS = 12


class FemError(ValueError):
    pass


class SolverError(RuntimeError):
    """The linear system could not be solved (singular or inaccurate)."""


# -- reference element --------------------------------------------------------

@lru_cache(maxsize=None)
def _monomial_coeffs(k: int) -> tuple[np.ndarray, np.ndarray]:
    # Column j holds the monomial coefficients of the j-th Lagrange polynomial.
    xi = np.linspace(0.0, 1.0, k + 1)
    C = np.linalg.inv(np.vander(xi, k + 1, increasing=True))
    dC = C[1:] * np.arange(1, k + 1)[:, None]
    C.setflags(write=False)
    dC.setflags(write=False)
    return C, dC


def shape_values(k: int, xi) -> tuple[np.ndarray, np.ndarray]:
    """Values and reference derivatives of all ``k+1`` basis functions.

    Returns two arrays of shape ``xi.shape + (k + 1,)``.
    """
    if k < 1:
        raise FemError(f"degree must be >= 1, got {k}")
    xi = np.asarray(xi, dtype=float)
    C, dC = _monomial_coeffs(k)
    powers = xi[..., None] ** np.arange(k + 1)
    return powers @ C, powers[..., :k] @ dC


def shape_eval(k: int, j: int, xi):
    """Value and derivative of the j-th equidistant Lagrange basis function on [0, 1]."""
    if not 0 <= j <= k:
        raise FemError(f"local index {j} out of range for degree {k}")
    val, der = shape_values(k, xi)
    return val[..., j], der[..., j]


@lru_cache(maxsize=None)
def _gauss(q: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(q)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_rule(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1], exact up to degree ``2q - 1``."""
    if int(q) != q or not 1 <= q <= 20:
        raise FemError(f"number of Gauss points must be in 1..20, got {q}")
    return _gauss(int(q))


def default_quad_points(k: int) -> int:
    return k + 2


def default_shift_quad_points(k: int) -> int:
    # dshift is typically non-polynomial and overlay pieces can be O(1) wide.
    return max(k + 2, SHIFT_MIN_POINTS)


# -- spaces and functions -------------------------------------------------------

class FeSpace:
    """H^1_0-conforming piecewise P_k space on ``mesh``.

    Global Lagrange points are numbered left to right; the two boundary
    points are dropped, so interior dof ``g`` sits at Lagrange point ``g+1``.
    ``cell_dofs[e, j]`` is -1 for the boundary points.
    """

    def __init__(self, mesh: Mesh1D, degree: int):
        if int(degree) != degree or degree < 1:
            raise FemError(f"degree must be an integer >= 1, got {degree}")
        self.mesh = mesh
        self.degree = int(degree)
        k, n = self.degree, mesh.n_cells
        full = np.arange(n)[:, None] * k + np.arange(k + 1)[None, :]
        dofs = full - 1
        dofs[full == n * k] = -1
        self.cell_dofs = dofs
        self.cell_dofs.setflags(write=False)

    @property
    def dof_count(self) -> int:
        return self.mesh.n_cells * self.degree - 1

    @property
    def n_cells(self) -> int:
        return self.mesh.n_cells

    def lagrange_points(self) -> np.ndarray:
        """Coordinates of all ``n_cells*k + 1`` Lagrange points, boundary included."""
        x, h = self.mesh.nodes[:-1], self.mesh.h
        k = self.degree
        pts = x[:, None] + h[:, None] * (np.arange(k) / k)[None, :]
        return np.concatenate([pts.ravel(), [self.mesh.nodes[-1]]])

    def dof_points(self) -> np.ndarray:
        return self.lagrange_points()[1:-1]

    def __repr__(self):
        return f"FeSpace(cells={self.n_cells}, degree={self.degree}, dofs={self.dof_count})"


@dataclass(frozen=True)
class FeFunction:
    space: FeSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.space.dof_count,):
            raise FemError(f"expected {self.space.dof_count} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def full_coeffs(self) -> np.ndarray:
        """Coefficients at every Lagrange point, boundary zeros included."""
        return np.concatenate([[0.0], self.coeffs, [0.0]])

    def cell_coeffs(self) -> np.ndarray:
        full = self.full_coeffs()
        k = self.space.degree
        idx = np.arange(self.space.n_cells)[:, None] * k + np.arange(k + 1)[None, :]
        return full[idx]

    def eval_in_cells(self, cells, x) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate using the polynomial of the given cells (no cell search)."""
        cells = np.asarray(cells)
        x = np.asarray(x, dtype=float)
        nodes = self.space.mesh.nodes
        a, h = nodes[cells], nodes[cells + 1] - nodes[cells]
        return self.eval_reference(cells, (x - a) / h)

    def eval_reference(self, cells, xi) -> tuple[np.ndarray, np.ndarray]:
        cells = np.asarray(cells)
        h = self.space.mesh.h[cells]
        phi, dphi = shape_values(self.space.degree, xi)
        cc = self.cell_coeffs()[cells]
        return np.sum(phi * cc, axis=-1), np.sum(dphi * cc, axis=-1) / h

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other: "FeFunction") -> "FeFunction":
        if other.space is not self.space:
            raise FemError("cannot add functions from different spaces")
        return FeFunction(self.space, self.coeffs + other.coeffs)

    def __rmul__(self, scalar: float) -> "FeFunction":
        return FeFunction(self.space, scalar * self.coeffs)


def evaluate(fe: FeFunction, x) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of ``fe`` at ``x``; interior nodes use the left cell."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 2.0)):
        raise FemError("evaluation point outside [0, 2]")
    return fe.eval_in_cells(fe.space.mesh.locate(x), x)


# -- assembly ---------------------------------------------------------------

@dataclass
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    shift: sp.csr_matrix
    space: FeSpace
    quad_points: int

    @property
    def bandwidth(self) -> int:
        return 2 * self.space.degree + 1

    def offband(self) -> sp.coo_matrix:
        """Entries of ``matrix`` farther than ``degree`` from the diagonal."""
        A = self.matrix.tocoo()
        keep = np.abs(A.row - A.col) > self.space.degree
        return sp.coo_matrix((A.data[keep], (A.row[keep], A.col[keep])), shape=A.shape)

    def dump(self, path) -> None:
        """Write the matrix as ``row col value`` lines."""
        A = self.matrix.tocoo()
        order = np.lexsort((A.col, A.row))
        with open(path, "w") as fh:
            for r, c, v in zip(A.row[order], A.col[order], A.data[order]):
                fh.write(f"{r} {c} {float(v)!r}\n")


def _scatter(dofs_rows, dofs_cols, vals, n):
    rows = np.broadcast_to(dofs_rows[:, :, None], vals.shape).ravel()
    cols = np.broadcast_to(dofs_cols[:, None, :], vals.shape).ravel()
    v = vals.ravel()
    keep = (rows >= 0) & (cols >= 0)
    return sp.coo_matrix((v[keep], (rows[keep], cols[keep])), shape=(n, n)).tocsr()


def overlay(space: FeSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Common refinement of the (1, 2) half shifted by -1 with the (0, 1) half.

    Returns ``(breaks, target, source)``: subinterval endpoints in the shifted
    coordinate ``s = x - 1``, and for each subinterval the global index of the
    target cell in (1, 2) and of the source cell in (0, 1).
    """
    mesh = space.mesh
    M = mesh.M
    src = mesh.nodes[: M + 1]
    tgt = mesh.nodes[M:] - 1.0
    pts = np.union1d(src, tgt)
    keep = np.concatenate([[True], np.diff(pts) > MERGE_TOL])
    pts = pts[keep]
    if pts[-1] < 1.0 - MERGE_TOL:
        pts = np.append(pts, 1.0)
    pts[-1] = 1.0
    mid = 0.5 * (pts[:-1] + pts[1:])
    source = np.searchsorted(src, mid) - 1
    target = np.searchsorted(tgt, mid) - 1 + M
    return pts, target, source


def _shift_entries(spec: ProblemSpec, space: FeSpace, q: int, cells=None):
    mesh = space.mesh
    k = space.degree
    pts, target, source = overlay(space)
    a, length = pts[:-1], np.diff(pts)
    if cells is not None:
        sel = np.isin(target, np.asarray(cells))
        a, length, target, source = a[sel], length[sel], target[sel], source[sel]
    xq, wq = gauss_rule(q)
    s = a[:, None] + length[:, None] * xq[None, :]
    src_a = mesh.nodes[source]
    src_h = mesh.nodes[source + 1] - src_a
    tgt_a = mesh.nodes[target] - 1.0
    tgt_h = mesh.nodes[target + 1] - mesh.nodes[target]
    phi_src, _ = shape_values(k, (s - src_a[:, None]) / src_h[:, None])
    phi_tgt, _ = shape_values(k, (s - tgt_a[:, None]) / tgt_h[:, None])
    wd = wq[None, :] * length[:, None] * spec.dshift(1.0 + s)
    vals = np.einsum("eq,eqi,eqj->eij", wd, phi_tgt, phi_src)
    return space.cell_dofs[target], space.cell_dofs[source], vals


def shift_couple(spec: ProblemSpec, space: FeSpace, cell: int, quad_points: int | None = None):
    """Triplets ``(row, col, value)`` of the shift term restricted to target ``cell``."""
    mesh = space.mesh
    if not mesh.M <= cell < mesh.n_cells:
        raise FemError(f"cell {cell} is not inside (1, 2)")
    q = quad_points or default_shift_quad_points(space.degree)
    rows, cols, vals = _shift_entries(spec, space, q, cells=[cell])
    R = np.broadcast_to(rows[:, :, None], vals.shape).ravel()
    C = np.broadcast_to(cols[:, None, :], vals.shape).ravel()
    V = vals.ravel()
    keep = (R >= 0) & (C >= 0) & (V != 0.0)
    A = sp.coo_matrix((V[keep], (R[keep], C[keep])), shape=(space.dof_count,) * 2).tocsr()
    A.sum_duplicates()
    A = A.tocoo()
    return list(zip(A.row.tolist(), A.col.tolist(), A.data.tolist()))


def assemble(spec: ProblemSpec, space: FeSpace, quad_points: int | None = None,
             shift_quad_points: int | None = None) -> LinearSystem:
    """Matrix ``A[i, j] = B(phi_j, phi_i)`` and load ``F(phi_i)``.

    Cell integrals use ``quad_points`` Gauss points (default ``k + 2``); the
    shift term uses ``shift_quad_points`` per overlay piece (default
    ``max(k + 2, 12)``).
    """
    mesh = space.mesh
    M = mesh.M
    if not (0 < M < mesh.n_cells and mesh.nodes[M] == 1.0):
        raise FemError("mesh must have a node at x = 1 with index M")
    k, n = space.degree, space.dof_count
    q = quad_points or default_quad_points(k)
    xq, wq = gauss_rule(q)
    phi, dphi = shape_values(k, xq)

    a, h = mesh.nodes[:-1], mesh.h
    x = a[:, None] + h[:, None] * xq[None, :]
    w = wq[None, :] * h[:, None]
    dphi_x = dphi[None, :, :] / h[:, None, None]
    eps, b, c = spec.epsilon, spec.b(x), spec.c(x)

    local = (
        eps * np.einsum("eq,eqi,eqj->eij", w, dphi_x, dphi_x)
        + np.einsum("eq,qi,qj->eij", w * c, phi, phi)
        - np.einsum("eq,qi,eqj->eij", w * b, phi, dphi_x)
    )
    dofs = space.cell_dofs
    A = _scatter(dofs, dofs, local, n)

    load = w * spec.f(x)
    left = np.arange(mesh.n_cells) < M
    hist = spec.dshift(x[left]) * spec.phi(x[left] - 1.0)
    load[left] -= w[left] * hist
    cell_rhs = load @ phi
    keep = dofs >= 0
    rhs = np.bincount(dofs[keep], weights=cell_rhs[keep], minlength=n)

    qs = shift_quad_points or max(q, default_shift_quad_points(k))
    rows, cols, vals = _shift_entries(spec, space, qs)
    S = _scatter(rows, cols, vals, n)
    S.eliminate_zeros()
    return LinearSystem(matrix=(A + S).tocsr(), rhs=rhs, shift=S, space=space, quad_points=q)


def solve(system: LinearSystem, rtol: float = 1e-10) -> np.ndarray:
    """Sparse LU solve with a relative residual check."""
    A, rhs = system.matrix.tocsc(), system.rhs
    if not np.any(rhs):
        return np.zeros_like(rhs)
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise SolverError(f"factorization failed: {exc}") from exc
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise SolverError("solution contains non-finite values")
    res = np.max(np.abs(A @ x - rhs)) / np.max(np.abs(rhs))
    if res > rtol:
        raise SolverError(f"relative residual {res:.3e} exceeds {rtol:.1e}")
    return x


def solve_problem(spec: ProblemSpec, space: FeSpace, quad_points: int | None = None,
                  shift_quad_points: int | None = None) -> FeFunction:
    return FeFunction(space, solve(assemble(spec, space, quad_points, shift_quad_points)))
