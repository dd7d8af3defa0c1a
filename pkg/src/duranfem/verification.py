"""Invariant suites and brute-force oracles.

The oracles here deliberately avoid the production code paths: basis
functions come from the explicit product formula and integrals from
composite Simpson rules on per-pair cell intersections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .fem import FeFunction, FeSpace, assemble, gauss_rule
from .mesh import MeshParams, Variant, build_mesh, check_mesh
from .problem import ProblemSpec, layer_model, registry_get

__all__ = [
    "Check",
    "SUITES",
    "run_suite",
    "lagrange_product",
    "brute_force_shift_block",
    "energy_gram",
    "coercivity_margin",
]

SIMPSON_PANELS = 10_000


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}" + (f": {self.detail}" if self.detail else "")


def lagrange_product(k: int, j: int, xi) -> np.ndarray:
    """``prod_{m != j} (xi - xi_m) / (xi_j - xi_m)`` on equidistant nodes."""
    xi = np.asarray(xi, dtype=float)
    nodes = np.arange(k + 1) / k
    out = np.ones_like(xi)
    for m in range(k + 1):
        if m != j:
            out = out * (xi - nodes[m]) / (nodes[j] - nodes[m])
    return out


def brute_force_shift_block(spec: ProblemSpec, space: FeSpace, panels: int = SIMPSON_PANELS) -> np.ndarray:
    """Dense shift-coupling block by composite Simpson on every target/source cell pair."""
    mesh = space.mesh
    M, k, n = mesh.M, space.degree, space.dof_count
    x = mesh.nodes
    out = np.zeros((n, n))
    for t in range(M, mesh.n_cells):
        t0, t1 = x[t] - 1.0, x[t + 1] - 1.0
        for s in range(M):
            lo, hi = max(t0, x[s]), min(t1, x[s + 1])
            if hi <= lo:
                continue
            sg = np.linspace(lo, hi, panels + 1)
            xi_t = (sg - t0) / (t1 - t0)
            xi_s = (sg - x[s]) / (x[s + 1] - x[s])
            d = spec.dshift(1.0 + sg)
            for i in range(k + 1):
                row = space.cell_dofs[t, i]
                if row < 0:
                    continue
                pi = lagrange_product(k, i, xi_t)
                for j in range(k + 1):
                    col = space.cell_dofs[s, j]
                    if col < 0:
                        continue
                    out[row, col] += simpson(d * lagrange_product(k, j, xi_s) * pi, x=sg)
    return out


def energy_gram(space: FeSpace) -> tuple[np.ndarray, np.ndarray]:
    """Dense stiffness ``(phi_j', phi_i')`` and mass ``(phi_j, phi_i)`` matrices."""
    k, n = space.degree, space.dof_count
    xq, wq = gauss_rule(k + 1)
    V = np.stack([lagrange_product(k, j, xq) for j in range(k + 1)], axis=1)
    # Derivatives of the product basis by exact differentiation of the monomial fit.
    D = np.zeros_like(V)
    for j in range(k + 1):
        c = np.polyfit(np.arange(k + 1) / k, np.eye(k + 1)[j], k)
        D[:, j] = np.polyval(np.polyder(c), xq)
    K = np.zeros((n, n))
    Mm = np.zeros((n, n))
    for e, h in enumerate(space.mesh.h):
        dofs = space.cell_dofs[e]
        Ke = (D.T * wq) @ D / h
        Me = (V.T * wq) @ V * h
        for a, i in enumerate(dofs):
            if i < 0:
                continue
            for b, j in enumerate(dofs):
                if j >= 0:
                    K[i, j] += Ke[a, b]
                    Mm[i, j] += Me[a, b]
    return K, Mm


def coercivity_margin(spec: ProblemSpec, space: FeSpace, samples: int = 200, seed: int = 0,
                      quad_points: int | None = None) -> float:
    """Smallest ``(v.A.v - |||v_h|||^2) / |v|^2`` over random coefficient vectors."""
    A = assemble(spec, space, quad_points).matrix.toarray()
    K, Mm = energy_gram(space)
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((samples, space.dof_count))
    lhs = np.einsum("si,ij,sj->s", V, A, V)
    rhs = spec.epsilon * np.einsum("si,ij,sj->s", V, K, V) + spec.gamma * np.einsum("si,ij,sj->s", V, Mm, V)
    return float(np.min((lhs - rhs) / np.einsum("si,si->s", V, V)))


# -- suites -----------------------------------------------------------------

MESH_GRID = list(itertools.product([0.9, 0.5, 0.2, 0.1], [1e-2, 1e-4, 1e-6], list(Variant), [1, 2, 3]))


def mesh_suite() -> list[Check]:
    checks = []
    counts = {}
    for H, eps, variant, k in MESH_GRID:
        mesh = build_mesh(MeshParams(H, eps, k, variant))
        problems = check_mesh(mesh)
        counts[(eps, variant, k, H)] = mesh.n_cells
        checks.append(Check(f"mesh H={H} eps={eps:g} {variant.value} k={k}", not problems,
                            "; ".join(problems)))
    for (eps, variant, k, H), n in counts.items():
        coarser = [n2 for (e2, v2, k2, H2), n2 in counts.items() if (e2, v2, k2) == (eps, variant, k) and H2 > H]
        if coarser and min(n - c for c in coarser) < 0:
            checks.append(Check(f"monotone count eps={eps:g} {variant.value} k={k} H={H}", False))
    return checks


def quadrature_suite() -> list[Check]:
    checks = []
    for q in range(1, 11):
        x, w = gauss_rule(q)
        errs = [abs(np.dot(w, x**p) - 1.0 / (p + 1)) for p in range(2 * q)]
        checks.append(Check(f"gauss q={q} exact to degree {2 * q - 1}", max(errs) < 1e-14,
                            f"max error {max(errs):.1e}"))
    return checks


def _small_spaces():
    for variant, k, H in [(Variant.STANDARD, 1, 0.9), (Variant.STANDARD, 2, 0.8),
                          (Variant.COARSE, 2, 0.9), (Variant.COARSE, 3, 0.8)]:
        yield variant, k, H, FeSpace(build_mesh(MeshParams(H, 1e-6, k, variant)), k)


def assembly_suite() -> list[Check]:
    checks = []
    spec = registry_get("paper-example", 1e-6)
    for variant, k, H, space in _small_spaces():
        system = assemble(spec, space)
        brute = brute_force_shift_block(spec, space)
        off = system.offband()
        diff = np.max(np.abs(off.toarray() - np.where(_offband_mask(space), brute, 0.0)))
        checks.append(Check(f"shift block vs brute force {variant.value} k={k} H={H}", diff <= 1e-10,
                            f"max |diff| {diff:.1e}"))
        no_shift = assemble(replace(spec, dshift=lambda x: np.zeros_like(x)), space)
        checks.append(Check(f"banded without shift {variant.value} k={k}", no_shift.offband().nnz == 0))
    return checks


def _offband_mask(space: FeSpace) -> np.ndarray:
    i, j = np.indices((space.dof_count,) * 2)
    return np.abs(i - j) > space.degree


def interpolation_suite() -> list[Check]:
    from .analysis import interpolation_study

    checks = []
    eps = 1e-6
    for variant in Variant:
        for k in (1, 2, 3):
            model = layer_model(2.0, eps, k)
            l2, en = interpolation_study(model, variant, k, [0.4, 0.2, 0.1])
            r_l2, r_en = l2.rows[-2].rate, en.rows[-2].rate
            label = f"{variant.value} k={k}"
            if variant is Variant.STANDARD:
                checks.append(Check(f"interpolation L2 order {label}", r_l2 >= k + 0.8, f"{r_l2:.2f}"))
            checks.append(Check(f"interpolation energy order {label}", r_en >= k - 0.2, f"{r_en:.2f}"))
    return checks


def coercivity_suite() -> list[Check]:
    checks = []
    spec = registry_get("paper-example", 1e-6)
    for variant, k, H in itertools.product(list(Variant), [1, 2, 3], [0.9, 0.5]):
        space = FeSpace(build_mesh(MeshParams(H, spec.epsilon, k, variant)), k)
        margin = coercivity_margin(spec, space)
        checks.append(Check(f"coercivity {variant.value} k={k} H={H}", margin >= -1e-10,
                            f"min margin {margin:.3e}"))
    return checks


SUITES = {
    "mesh": mesh_suite,
    "quadrature": quadrature_suite,
    "assembly": assembly_suite,
    "interpolation": interpolation_suite,
    "coercivity": coercivity_suite,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for suite in SUITES.values() for c in suite()]
    try:
        return SUITES[name]()
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}") from None
