"""Energy norms, Lagrange interpolation and convergence tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fem import FeFunction, FeSpace, gauss_rule
from .mesh import Mesh1D, MeshParams, Variant, build_mesh
from .problem import LayerModel

__all__ = [
    "EnergyNormParams",
    "ConvergenceRow",
    "ConvergenceTable",
    "AnalysisError",
    "energy_norm",
    "l2_norm",
    "interpolate",
    "interpolation_study",
    "error_vs_reference",
    "error_vs_exact",
    "merged_nodes",
    "rates",
]

MERGE_TOL = 2e-14
CSV_HEADER = ["H", "cells", "dofs", "energy_error", "rate"]


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class EnergyNormParams:
    epsilon: float
    gamma: float

    def __post_init__(self):
        if self.epsilon <= 0 or self.gamma <= 0:
            raise AnalysisError("epsilon and gamma must be positive")


def _cell_quadrature(nodes: np.ndarray, q: int):
    xq, wq = gauss_rule(q)
    a, h = nodes[:-1], np.diff(nodes)
    return a[:, None] + h[:, None] * xq[None, :], wq[None, :] * h[:, None]


def _norm_parts(g, nodes, q):
    x, w = _cell_quadrature(nodes, q)
    val, der = g(x)
    return float(np.sum(w * der**2)), float(np.sum(w * val**2))


def energy_norm(g: Callable, mesh: Mesh1D | np.ndarray, params: EnergyNormParams,
                degree: int = 1, quad_points: int | None = None) -> float:
    """``sqrt(eps ||g'||^2 + gamma ||g||^2)`` by per-cell Gauss quadrature.

    ``g`` maps an array of points to ``(value, derivative)``.  The default
    rule uses ``degree + 3`` points per cell.
    """
    nodes = mesh.nodes if isinstance(mesh, Mesh1D) else np.asarray(mesh, dtype=float)
    d2, v2 = _norm_parts(g, nodes, quad_points or degree + 3)
    return math.sqrt(params.epsilon * d2 + params.gamma * v2)


def l2_norm(g: Callable, mesh: Mesh1D | np.ndarray, degree: int = 1,
            quad_points: int | None = None) -> float:
    nodes = mesh.nodes if isinstance(mesh, Mesh1D) else np.asarray(mesh, dtype=float)
    return math.sqrt(_norm_parts(g, nodes, quad_points or degree + 3)[1])


def interpolate(g: Callable, space: FeSpace, boundary_tol: float = 1e-8) -> FeFunction:
    """Nodal Lagrange interpolant of ``g`` (called on an array of points)."""
    pts = space.lagrange_points()
    vals = np.asarray(g(pts), dtype=float)
    if abs(vals[0]) > boundary_tol or abs(vals[-1]) > boundary_tol:
        raise AnalysisError(
            f"interpolated function must vanish at 0 and 2, got {vals[0]:.3e}, {vals[-1]:.3e}"
        )
    return FeFunction(space, vals[1:-1])


def merged_nodes(a: np.ndarray, b: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    pts = np.union1d(a, b)
    keep = np.concatenate([[True], np.diff(pts) > tol])
    pts = pts[keep]
    pts[-1] = max(a[-1], b[-1])
    return pts


def _diff_on_merged(u: FeFunction, v: FeFunction, q: int):
    nodes = merged_nodes(u.space.mesh.nodes, v.space.mesh.nodes)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    cu = np.searchsorted(u.space.mesh.nodes, mid) - 1
    cv = np.searchsorted(v.space.mesh.nodes, mid) - 1
    x, w = _cell_quadrature(nodes, q)
    uv, ud = u.eval_in_cells(cu[:, None], x)
    vv, vd = v.eval_in_cells(cv[:, None], x)
    return w, uv - vv, ud - vd


def error_vs_reference(u_N: FeFunction, u_ref: FeFunction, params: EnergyNormParams) -> float:
    """Energy norm of ``u_N - u_ref`` integrated on the union of both meshes."""
    q = max(u_N.space.degree, u_ref.space.degree) + 3
    w, dv, dd = _diff_on_merged(u_N, u_ref, q)
    return math.sqrt(params.epsilon * np.sum(w * dd**2) + params.gamma * np.sum(w * dv**2))


def error_vs_exact(u_N: FeFunction, exact: tuple[Callable, Callable], params: EnergyNormParams,
                   quad_points: int | None = None) -> float:
    """Energy norm of ``u_N - u`` for an exact solution given as ``(u, u')``."""
    u, du = exact

    def diff(x):
        val, der = u_N.eval_in_cells(np.arange(u_N.space.n_cells)[:, None], x)
        return val - u(x), der - du(x)

    return energy_norm(diff, u_N.space.mesh, params, u_N.space.degree, quad_points)


# -- convergence tables ---------------------------------------------------------

@dataclass
class ConvergenceRow:
    H: float
    cells: int
    dofs: int
    energy_error: float
    rate: float | None = None


@dataclass
class ConvergenceTable:
    rows: list[ConvergenceRow] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def errors(self) -> np.ndarray:
        return np.array([r.energy_error for r in self.rows])

    def cells(self) -> np.ndarray:
        return np.array([r.cells for r in self.rows])

    def rates(self) -> list[float | None]:
        return [r.rate for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([repr(r.H), r.cells, r.dofs, repr(r.energy_error),
                             "" if r.rate is None else repr(r.rate)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, meta: dict | None = None) -> "ConvergenceTable":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != CSV_HEADER:
            raise AnalysisError(f"unexpected CSV header {reader.fieldnames}")
        rows = [
            ConvergenceRow(float(r["H"]), int(r["cells"]), int(r["dofs"]),
                           float(r["energy_error"]), float(r["rate"]) if r["rate"] else None)
            for r in reader
        ]
        return cls(rows, dict(meta or {}))

    def to_text(self) -> str:
        title = []
        if self.meta:
            title.append("# " + ", ".join(f"{k}={v}" for k, v in self.meta.items()))
        lines = [f"{'H':>6} {'cells':>6} {'dofs':>6} {'error':>10} {'rate':>6}"]
        for r in self.rows:
            rate = "" if r.rate is None else f"{r.rate:.2f}"
            lines.append(f"{r.H:6.2f} {r.cells:6d} {r.dofs:6d} {r.energy_error:10.2e} {rate:>6}")
        return "\n".join(title + lines) + "\n"


def rates(errors: Sequence[float], counts: Sequence[float], by: str = "cells") -> list[float | None]:
    """Observed orders between consecutive rows; the last entry is None.

    With ``by="cells"`` (default) ``rate_i = ln(e_i/e_{i+1}) / ln(N_{i+1}/N_i)``
    where ``counts`` are cell counts; with ``by="H"`` ``counts`` are the grading
    parameters and ``rate_i = ln(e_i/e_{i+1}) / ln(H_i/H_{i+1})``.
    """
    e = np.asarray(errors, dtype=float)
    n = np.asarray(counts, dtype=float)
    if len(e) < 2 or len(e) != len(n):
        raise AnalysisError("need at least two rows with matching lengths")
    if np.any(e <= 0):
        raise AnalysisError("errors must be positive to compute rates")
    num = np.log(e[:-1] / e[1:])
    if by == "cells":
        den = np.log(n[1:] / n[:-1])
    elif by == "H":
        den = np.log(n[:-1] / n[1:])
    else:
        raise AnalysisError(f"unknown rate convention {by!r}")
    return [float(r) for r in num / den] + [None]


def fill_rates(table: ConvergenceTable, by: str = "cells") -> ConvergenceTable:
    if len(table.rows) >= 2:
        counts = table.cells() if by == "cells" else [r.H for r in table.rows]
        for row, r in zip(table.rows, rates(table.errors(), counts, by)):
            row.rate = r
    return table


# -- interpolation studies ------------------------------------------------------

def _continuous_model(model: LayerModel):
    """``S + E + W`` with the jump of W at 1 removed and the boundary values lifted off.

    Subtracting a piecewise constant on (1, 2) and a global linear function
    leaves the P_k interpolation error unchanged for every k >= 1.
    """
    size = float(model.W(np.array([np.nextafter(1.0, 2.0)]))[0])

    def raw(x, order=0):
        x = np.asarray(x, dtype=float)
        jump = np.where(x > 1.0, size, 0.0) if order == 0 else 0.0
        return model.u(x, order) - jump

    u0 = float(raw(np.array([0.0]))[0])
    u2 = float(raw(np.array([2.0]))[0])

    def g(x, order=0):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return raw(x) - u0 * (1.0 - 0.5 * x) - u2 * 0.5 * x
        if order == 1:
            return raw(x, 1) + 0.5 * u0 - 0.5 * u2
        return raw(x, order)

    return g


def interpolation_study(model: LayerModel, variant: Variant | str, degree: int,
                        H_list: Sequence[float], epsilon: float | None = None,
                        gamma: float = 1.0, quad_points: int | None = None,
                        omission_theta: float | None = None):
    """Interpolation errors of the synthetic layer model over an H sweep.

    Returns ``(l2_table, energy_table)``; the ``energy_error`` column of the
    first holds L2 errors.
    """
    eps = model.epsilon if epsilon is None else epsilon
    g = _continuous_model(model)
    params = EnergyNormParams(eps, gamma)
    q = quad_points or degree + 3
    meta = {"k": degree, "epsilon": eps, "variant": Variant(variant).value}
    l2_table = ConvergenceTable(meta={**meta, "norm": "L2"})
    en_table = ConvergenceTable(meta={**meta, "norm": "energy"})
    for H in H_list:
        kw = {} if omission_theta is None else {"omission_theta": omission_theta}
        mesh = build_mesh(MeshParams(H, eps, degree, variant, **kw))
        space = FeSpace(mesh, degree)
        Ig = interpolate(g, space)
        cells = np.arange(mesh.n_cells)[:, None]

        def err(x):
            val, der = Ig.eval_in_cells(cells, x)
            return g(x) - val, g(x, 1) - der

        d2, v2 = _norm_parts(err, mesh.nodes, q)
        l2_table.rows.append(ConvergenceRow(H, mesh.n_cells, space.dof_count, math.sqrt(v2)))
        en_table.rows.append(ConvergenceRow(H, mesh.n_cells, space.dof_count,
                                            math.sqrt(params.epsilon * d2 + params.gamma * v2)))
    return fill_rates(l2_table), fill_rates(en_table)
